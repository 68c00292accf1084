//! Gradient descent for the vortex equations `∂̄_A Φ = 0`, `ΛF_A + μ(Φ) = c`
//! on the lattice torus.
//!
//! Two objectives are available. `Objective::Ymh` is the discrete
//! Yang–Mills–Higgs functional. `Objective::Bogomolov` is
//! `‖ΛF_A + μ(Φ) - c‖² + 2‖∂̄_A Φ‖²`, which differs from it by a topological
//! constant in the continuum but whose lattice zeros are exact solutions of
//! the discrete equations. `Objective::Auto` picks between them by degree.
//!
//! The descent direction is the gradient in the L² metric: link components
//! are used as is, Higgs components are divided by the cell area.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    background_connection, energy_identity_defect, kahler_terms, moment_map_linear,
    plaquette_angles, scaled_differences, stable_sum, ymh_energy, CentralParam, EnergyBreakdown,
    HiggsField, LinkField, TorusLattice,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// `Ymh` for degree zero, `Bogomolov` otherwise.
    #[default]
    Auto,
    Bogomolov,
    Ymh,
}

impl Objective {
    /// Concrete objective used for a connection of the given degree.
    ///
    /// In degree zero the vacuum is an exact zero of the discrete functional,
    /// while the forward-difference `∂̄` has a spurious zero mode at momentum
    /// `(π/2, -π/2)` that makes the Bogomolov objective nearly flat there.
    pub fn resolve(self, degree: i64) -> Objective {
        match self {
            Objective::Auto if degree == 0 => Objective::Ymh,
            Objective::Auto => Objective::Bogomolov,
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LineSearch {
    #[default]
    Armijo,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Preconditioned nonlinear conjugate gradients (Polak–Ribière, reset
    /// whenever the direction stops descending).
    #[default]
    Cg,
    /// Preconditioned steepest descent.
    Descent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Initial step (Armijo) or the constant step (fixed).
    pub step: f64,
    pub tol_residual: f64,
    pub line_search: LineSearch,
    pub method: Method,
    pub seed: u64,
    pub record_every: usize,
    pub objective: Objective,
    /// Stop without convergence once the objective has decreased by less
    /// than this relative amount over `stall_window` iterations.
    pub stall_tol: f64,
    pub stall_window: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            step: 1e-3,
            tol_residual: 1e-6,
            line_search: LineSearch::Armijo,
            method: Method::Cg,
            seed: 0,
            record_every: 100,
            objective: Objective::Auto,
            stall_tol: 1e-13,
            stall_window: 2_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidInput("tol_residual must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidInput("step must be positive".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidInput("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iter: usize,
    pub energy: f64,
    pub residual_eq1: f64,
    pub residual_eq2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Objective actually descended (never `Auto`).
    pub objective: Objective,
    /// Discrete Yang–Mills–Higgs energy of the final configuration.
    pub final_energy: f64,
    pub term_breakdown: EnergyBreakdown,
    /// Sup-norm of `∂̄_A Φ`.
    pub residual_eq1: f64,
    /// Sup-norm of `ΛF_A + μ(Φ) - c`.
    pub residual_eq2: f64,
    /// Values of the descended objective.
    pub energy_trace: Vec<TracePoint>,
    pub converged: bool,
    pub bogomolov: f64,
    /// `2∫⟨ΛF_A, c⟩`
    pub topological: f64,
    pub identity_defect: f64,
    /// `|2π·degree/volume + mean(μ) - c|`, the part of the second equation
    /// fixed by integration over the torus.
    pub integral_obstruction: f64,
    pub vortex_count: usize,
}

impl SolveReport {
    /// CSV with one row per recorded iteration.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,energy,residual_eq1,residual_eq2\n");
        for p in &self.energy_trace {
            out.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                p.iter, p.energy, p.residual_eq1, p.residual_eq2
            ));
        }
        out
    }
}

/// Gradient with respect to every real coordinate. Higgs entries pack
/// `(∂/∂Re Φ, ∂/∂Im Φ)` into one complex number.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub links_x: Vec<f64>,
    pub links_y: Vec<f64>,
    pub higgs: Vec<Complex64>,
}

impl Gradient {
    fn zeros(sites: usize, entries: usize) -> Self {
        Self {
            links_x: vec![0.0; sites],
            links_y: vec![0.0; sites],
            higgs: vec![Complex64::new(0.0, 0.0); entries],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.links_x
            .iter()
            .chain(&self.links_y)
            .map(|v| v.abs())
            .chain(self.higgs.iter().map(|z| z.re.abs().max(z.im.abs())))
            .fold(0.0, f64::max)
    }

    /// `⟨self, other⟩` with Higgs entries weighted by `higgs_scale`.
    fn dot(&self, other: &Gradient, higgs_scale: f64) -> f64 {
        stable_sum(
            self.links_x
                .iter()
                .zip(&other.links_x)
                .chain(self.links_y.iter().zip(&other.links_y))
                .map(|(u, v)| u * v)
                .chain(self.higgs.iter().zip(&other.higgs).map(|(u, v)| higgs_scale * (u.conj() * v).re)),
        )
    }

    /// `self += k·other`
    fn axpy(&mut self, k: f64, other: &Gradient) {
        for (u, v) in self.links_x.iter_mut().zip(&other.links_x) {
            *u += k * v;
        }
        for (u, v) in self.links_y.iter_mut().zip(&other.links_y) {
            *u += k * v;
        }
        for (u, v) in self.higgs.iter_mut().zip(&other.higgs) {
            *u += k * v;
        }
    }
}

fn transport(w: i32, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, w as f64 * theta)
}

/// Exact gradient of `ymh_energy`.
pub fn ymh_gradient(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<Gradient> {
    a.check(lattice)?;
    phi.check(lattice)?;
    let area = lattice.cell_area();
    let sites = lattice.sites();
    let r = phi.rank();
    let theta = plaquette_angles(a, lattice)?;
    let m = moment_map_linear(phi);
    let mut g = Gradient::zeros(sites, phi.values.len());

    for s in 0..sites {
        g.links_x[s] = 2.0 / area * (theta[s] - theta[lattice.bwd_y(s)]);
        g.links_y[s] = 2.0 / area * (theta[lattice.bwd_x(s)] - theta[s]);
    }

    let i = Complex64::i();
    for s in 0..sites {
        let sx = lattice.fwd_x(s);
        let sy = lattice.fwd_y(s);
        for (j, &w) in phi.weights.iter().enumerate() {
            let here = phi.values[s * r + j];
            let ux = transport(w, a.angles_x[s]);
            let uy = transport(w, a.angles_y[s]);
            let tx = ux * phi.values[sx * r + j];
            let ty = uy * phi.values[sy * r + j];
            let dx = tx - here;
            let dy = ty - here;
            g.links_x[s] += 2.0 * (dx.conj() * i * w as f64 * tx).re;
            g.links_y[s] += 2.0 * (dy.conj() * i * w as f64 * ty).re;
            g.higgs[s * r + j] -= 2.0 * (dx + dy);
            g.higgs[sx * r + j] += 2.0 * ux.conj() * dx;
            g.higgs[sy * r + j] += 2.0 * uy.conj() * dy;
            g.higgs[s * r + j] -= 2.0 * area * (m[s] - c.c) * w as f64 * here;
        }
    }
    Ok(g)
}

/// The Bogomolov objective `‖ΛF_A + μ(Φ) - c‖² + 2‖∂̄_A Φ‖²`.
pub fn bogomolov_objective(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<f64> {
    let k = kahler_terms(a, phi, c, lattice)?;
    Ok(k.equation_norm + 2.0 * k.dbar_norm)
}

/// Exact gradient of `bogomolov_objective`.
pub fn bogomolov_gradient(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<Gradient> {
    a.check(lattice)?;
    phi.check(lattice)?;
    let area = lattice.cell_area();
    let sites = lattice.sites();
    let r = phi.rank();
    let theta = plaquette_angles(a, lattice)?;
    let m = moment_map_linear(phi);
    let eq: Vec<f64> = (0..sites).map(|s| theta[s] / area + m[s] - c.c).collect();
    let mut g = Gradient::zeros(sites, phi.values.len());

    for s in 0..sites {
        g.links_x[s] = 2.0 * (eq[s] - eq[lattice.bwd_y(s)]);
        g.links_y[s] = 2.0 * (eq[lattice.bwd_x(s)] - eq[s]);
    }

    let i = Complex64::i();
    let one_i = Complex64::new(1.0, 1.0);
    for s in 0..sites {
        let sx = lattice.fwd_x(s);
        let sy = lattice.fwd_y(s);
        for (j, &w) in phi.weights.iter().enumerate() {
            let wf = w as f64;
            let here = phi.values[s * r + j];
            let ux = transport(w, a.angles_x[s]);
            let uy = transport(w, a.angles_y[s]);
            let tx = ux * phi.values[sx * r + j];
            let ty = uy * phi.values[sy * r + j];
            let b = tx + i * ty - one_i * here;
            g.links_x[s] += 2.0 * (b.conj() * i * wf * tx).re;
            g.links_y[s] += 2.0 * (b.conj() * (-wf) * ty).re;
            g.higgs[s * r + j] -= 2.0 * one_i.conj() * b;
            g.higgs[sx * r + j] += 2.0 * ux.conj() * b;
            g.higgs[sy * r + j] -= 2.0 * i * uy.conj() * b;
            g.higgs[s * r + j] -= 2.0 * area * eq[s] * wf * here;
        }
    }
    Ok(g)
}

/// Sup-norms of `∂̄_A Φ` (pointwise norm over components) and of
/// `ΛF_A + μ(Φ) - c`.
pub fn residuals(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<(f64, f64)> {
    a.check(lattice)?;
    phi.check(lattice)?;
    let area = lattice.cell_area();
    let spacing = lattice.spacing();
    let theta = plaquette_angles(a, lattice)?;
    let m = moment_map_linear(phi);
    let (dx, dy) = scaled_differences(a, phi, lattice);
    let r = phi.rank();
    let i = Complex64::i();
    let mut eq1 = 0.0_f64;
    for s in 0..lattice.sites() {
        let sq: f64 = (0..r)
            .map(|j| (dx[s * r + j] + i * dy[s * r + j]).norm_sqr())
            .sum();
        eq1 = eq1.max(sq.sqrt() / (2.0 * spacing));
    }
    let eq2 = (0..lattice.sites())
        .map(|s| (theta[s] / area + m[s] - c.c).abs())
        .fold(0.0, f64::max);
    Ok((eq1, eq2))
}

/// Value of the descended objective.
pub fn objective_value(
    objective: Objective,
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<f64> {
    match objective.resolve(a.degree) {
        Objective::Bogomolov | Objective::Auto => bogomolov_objective(a, phi, c, lattice),
        Objective::Ymh => Ok(ymh_energy(a, phi, c, lattice)?.total),
    }
}

fn objective_gradient(
    objective: Objective,
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<Gradient> {
    match objective.resolve(a.degree) {
        Objective::Bogomolov | Objective::Auto => bogomolov_gradient(a, phi, c, lattice),
        Objective::Ymh => ymh_gradient(a, phi, c, lattice),
    }
}

/// Seeded starting point: the degree-`d` background plus uniform link noise
/// of amplitude 0.05, and i.i.d. complex Gaussian Higgs entries scaled so
/// that `|Φ|²` averages `τ`.
pub fn initial_fields(
    degree: i64,
    weights: Vec<i32>,
    central: &CentralParam,
    lattice: &TorusLattice,
    seed: u64,
) -> Result<(LinkField, HiggsField)> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("at least one weight is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = background_connection(degree, lattice)?;
    for t in a.angles_x.iter_mut().chain(a.angles_y.iter_mut()) {
        *t += rng.gen_range(-0.05..0.05);
    }
    let mut phi = HiggsField::zeros(lattice, weights);
    let scale = (central.tau / (2.0 * phi.rank() as f64)).sqrt();
    for z in phi.values.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex64::new(re, im) * scale;
    }
    Ok((a, phi))
}

/// Number of 4-connected clusters of sites with `|Φ| < 0.1·median |Φ|`.
pub fn vortex_count(phi: &HiggsField, lattice: &TorusLattice) -> usize {
    vortex_cells(phi, lattice).len()
}

/// Site clusters where `|Φ|` is below a tenth of its median.
pub fn vortex_cells(phi: &HiggsField, lattice: &TorusLattice) -> Vec<Vec<usize>> {
    let norms = phi.norms();
    if norms.is_empty() {
        return Vec::new();
    }
    let mut sorted = norms.clone();
    sorted.sort_by(|x, y| x.total_cmp(y));
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    let cut = 0.1 * median;
    let low: Vec<bool> = norms.iter().map(|&v| v < cut).collect();
    let mut seen = vec![false; norms.len()];
    let mut clusters = Vec::new();
    for start in 0..norms.len() {
        if !low[start] || seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut cluster = Vec::new();
        while let Some(s) = stack.pop() {
            cluster.push(s);
            for nb in [lattice.fwd_x(s), lattice.bwd_x(s), lattice.fwd_y(s), lattice.bwd_y(s)] {
                if low[nb] && !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        cluster.sort_unstable();
        clusters.push(cluster);
    }
    clusters
}

fn step_fields(
    a: &LinkField,
    phi: &HiggsField,
    g: &Gradient,
    alpha: f64,
    higgs_scale: f64,
) -> (LinkField, HiggsField) {
    let mut a2 = a.clone();
    let mut phi2 = phi.clone();
    for (t, d) in a2.angles_x.iter_mut().zip(&g.links_x) {
        *t -= alpha * d;
    }
    for (t, d) in a2.angles_y.iter_mut().zip(&g.links_y) {
        *t -= alpha * d;
    }
    for (z, d) in phi2.values.iter_mut().zip(&g.higgs) {
        *z -= alpha * higgs_scale * d;
    }
    (a2, phi2)
}

/// Minimise the configured objective from `(a0, phi0)`.
///
/// Returns `converged = true` once both equation residuals are below
/// `tol_residual`. Running out of iterations or stalling returns the current
/// state with `converged = false`.
pub fn solve(
    a0: &LinkField,
    phi0: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
    cfg: &SolverConfig,
) -> Result<(LinkField, HiggsField, SolveReport)> {
    cfg.validate()?;
    a0.check(lattice)?;
    phi0.check(lattice)?;
    if !c.c.is_finite() {
        return Err(Error::NonFinite("central parameter".into()));
    }
    let higgs_scale = 1.0 / lattice.cell_area();
    let mut a = a0.clone();
    let mut phi = phi0.clone();
    let mut energy = objective_value(cfg.objective, &a, &phi, c, lattice)?;
    if !energy.is_finite() {
        return Err(Error::NonFinite("initial energy".into()));
    }
    let mut trace = Vec::new();
    let mut alpha = cfg.step;
    let mut converged = false;
    let mut iterations = 0;
    let mut window_start = energy;
    let mut previous: Option<(Gradient, Gradient, f64)> = None;

    for it in 0..cfg.max_iters {
        let (r1, r2) = residuals(&a, &phi, c, lattice)?;
        if it % cfg.record_every == 0 {
            trace.push(TracePoint { iter: it, energy, residual_eq1: r1, residual_eq2: r2 });
        }
        if r1 < cfg.tol_residual && r2 < cfg.tol_residual {
            converged = true;
            iterations = it;
            if it % cfg.record_every != 0 {
                trace.push(TracePoint { iter: it, energy, residual_eq1: r1, residual_eq2: r2 });
            }
            break;
        }
        let g = objective_gradient(cfg.objective, &a, &phi, c, lattice)?;
        let gg = g.dot(&g, higgs_scale);
        iterations = it + 1;
        if gg == 0.0 {
            break;
        }
        let mut dir = g.clone();
        let mut augmented = false;
        if let (Method::Cg, Some((prev_g, prev_dir, prev_gg))) = (cfg.method, &previous) {
            let beta = ((gg - g.dot(prev_g, higgs_scale)) / prev_gg).max(0.0);
            dir.axpy(beta, prev_dir);
            augmented = beta > 0.0;
            if dir.dot(&g, higgs_scale) <= 0.0 {
                dir = g.clone();
                augmented = false;
            }
        }
        // directional derivative along the preconditioned direction
        let slope = dir.dot(&g, higgs_scale);
        let (next_a, next_phi, next_energy) = match cfg.line_search {
            LineSearch::Fixed => {
                let (na, np) = step_fields(&a, &phi, &dir, alpha, higgs_scale);
                let e = objective_value(cfg.objective, &na, &np, c, lattice)?;
                (na, np, e)
            }
            LineSearch::Armijo => {
                let mut trial = alpha * 2.0;
                loop {
                    let (na, np) = step_fields(&a, &phi, &dir, trial, higgs_scale);
                    let e = objective_value(cfg.objective, &na, &np, c, lattice)?;
                    if e.is_finite() && e <= energy - 1e-4 * trial * slope {
                        alpha = trial;
                        break (na, np, e);
                    }
                    trial *= 0.5;
                    if trial < 1e-300 {
                        break (a.clone(), phi.clone(), energy);
                    }
                }
            }
        };
        if !next_energy.is_finite() {
            return Err(Error::NonFinite(format!("energy at iteration {}", it + 1)));
        }
        let stalled_step = next_energy >= energy;
        if stalled_step && cfg.line_search == LineSearch::Armijo {
            if augmented {
                // retry from plain descent
                previous = None;
                continue;
            }
            break;
        }
        previous = Some((g, dir, gg));
        a = next_a;
        phi = next_phi;
        energy = next_energy;
        if (it + 1) % cfg.stall_window == 0 {
            if window_start - energy <= cfg.stall_tol * window_start.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            window_start = energy;
        }
    }

    let (r1, r2) = residuals(&a, &phi, c, lattice)?;
    if !converged && trace.last().map(|p| p.iter) != Some(iterations) {
        trace.push(TracePoint { iter: iterations, energy, residual_eq1: r1, residual_eq2: r2 });
    }
    let breakdown = ymh_energy(&a, &phi, c, lattice)?;
    let k = kahler_terms(&a, &phi, c, lattice)?;
    let mean_mu = stable_sum(moment_map_linear(&phi)) / lattice.sites() as f64;
    let obstruction = (TAU * a.degree as f64 / lattice.volume() + mean_mu - c.c).abs();
    let report = SolveReport {
        iterations,
        objective: cfg.objective.resolve(a.degree),
        final_energy: breakdown.total,
        term_breakdown: breakdown,
        residual_eq1: r1,
        residual_eq2: r2,
        energy_trace: trace,
        converged,
        bogomolov: k.curvature_c + k.equivariant_symplectic(),
        topological: k.topological(),
        identity_defect: energy_identity_defect(&a, &phi, c, lattice)?,
        integral_obstruction: obstruction,
        vortex_count: vortex_count(&phi, lattice),
    };
    Ok((a, phi, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_config(n: usize, amp: f64, seed: u64) -> (TorusLattice, LinkField, HiggsField) {
        let l = TorusLattice::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = LinkField::zero(&l);
        for t in a.angles_x.iter_mut().chain(a.angles_y.iter_mut()) {
            *t = rng.gen_range(-amp..amp);
        }
        let mut phi = HiggsField::zeros(&l, vec![1, -1]);
        for z in phi.values.iter_mut() {
            *z = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        }
        (l, a, phi)
    }

    fn perturb(
        a: &LinkField,
        phi: &HiggsField,
        coord: usize,
        h: f64,
    ) -> (LinkField, HiggsField) {
        let mut a = a.clone();
        let mut phi = phi.clone();
        let sites = a.angles_x.len();
        if coord < sites {
            a.angles_x[coord] += h;
        } else if coord < 2 * sites {
            a.angles_y[coord - sites] += h;
        } else {
            let k = coord - 2 * sites;
            if k.is_multiple_of(2) {
                phi.values[k / 2].re += h;
            } else {
                phi.values[k / 2].im += h;
            }
        }
        (a, phi)
    }

    fn component(g: &Gradient, coord: usize) -> f64 {
        let sites = g.links_x.len();
        if coord < sites {
            g.links_x[coord]
        } else if coord < 2 * sites {
            g.links_y[coord - sites]
        } else {
            let k = coord - 2 * sites;
            if k.is_multiple_of(2) {
                g.higgs[k / 2].re
            } else {
                g.higgs[k / 2].im
            }
        }
    }

    fn worst_fd_error(objective: Objective) -> f64 {
        let (l, a, phi) = random_config(16, 0.3, 21);
        let c = CentralParam::new(0.7).unwrap();
        let g = objective_gradient(objective, &a, &phi, &c, &l).unwrap();
        let total = 2 * l.sites() + 2 * phi.values.len();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-5;
        (0..100)
            .map(|_| {
                let k = rng.gen_range(0..total);
                let (ap, pp) = perturb(&a, &phi, k, h);
                let (am, pm) = perturb(&a, &phi, k, -h);
                let fd = (objective_value(objective, &ap, &pp, &c, &l).unwrap()
                    - objective_value(objective, &am, &pm, &c, &l).unwrap())
                    / (2.0 * h);
                (component(&g, k) - fd).abs() / fd.abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn ymh_gradient_matches_finite_differences() {
        let err = worst_fd_error(Objective::Ymh);
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn bogomolov_gradient_matches_finite_differences() {
        let err = worst_fd_error(Objective::Bogomolov);
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn trivial_configuration_has_zero_gradient() {
        let l = TorusLattice::new(8).unwrap();
        let c = CentralParam::new(0.0).unwrap();
        let phi = HiggsField::zeros(&l, vec![1]);
        let a = LinkField::zero(&l);
        assert_eq!(ymh_gradient(&a, &phi, &c, &l).unwrap().sup_norm(), 0.0);
        assert_eq!(bogomolov_gradient(&a, &phi, &c, &l).unwrap().sup_norm(), 0.0);
    }

    fn near_vacuum(n: usize, tau: f64, seed: u64) -> (TorusLattice, LinkField, HiggsField, CentralParam) {
        let l = TorusLattice::new(n).unwrap();
        let c = CentralParam::with_tau(-tau / 2.0, tau).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = LinkField::zero(&l);
        for t in a.angles_x.iter_mut().chain(a.angles_y.iter_mut()) {
            *t = rng.gen_range(-0.01..0.01);
        }
        let mut phi = HiggsField::zeros(&l, vec![1]);
        for z in phi.values.iter_mut() {
            *z = Complex64::new(tau.sqrt() + rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
        }
        (l, a, phi, c)
    }

    #[test]
    fn vacuum_solve_converges() {
        let (l, a, phi, c) = near_vacuum(16, 2.0, 1);
        let cfg = SolverConfig { tol_residual: 1e-9, ..Default::default() };
        let (a, phi, rep) = solve(&a, &phi, &c, &l, &cfg).unwrap();
        assert!(rep.converged, "{:?}", rep.energy_trace.last());
        assert!(rep.residual_eq1 < 1e-8 && rep.residual_eq2 < 1e-8);
        assert!(rep.final_energy < 1e-10);
        assert_eq!(rep.vortex_count, 0);
        assert!(ymh_gradient(&a, &phi, &c, &l).unwrap().sup_norm() < 1e-8);
    }

    #[test]
    fn recorded_energies_do_not_increase() {
        for objective in [Objective::Bogomolov, Objective::Ymh] {
            let (l, a, phi) = random_config(8, 0.2, 2);
            let c = CentralParam::new(-1.0).unwrap();
            let cfg = SolverConfig { max_iters: 400, record_every: 1, objective, ..Default::default() };
            let (_, _, rep) = solve(&a, &phi, &c, &l, &cfg).unwrap();
            assert!(rep.energy_trace.len() > 10);
            for w in rep.energy_trace.windows(2) {
                assert!(w[1].energy <= w[0].energy + 1e-12);
            }
        }
    }

    #[test]
    fn fixed_step_runs_and_is_deterministic() {
        let (l, a, phi) = random_config(8, 0.2, 9);
        let c = CentralParam::new(-1.0).unwrap();
        let cfg = SolverConfig {
            max_iters: 50,
            step: 1e-4,
            line_search: LineSearch::Fixed,
            ..Default::default()
        };
        let r1 = solve(&a, &phi, &c, &l, &cfg).unwrap().2;
        let r2 = solve(&a, &phi, &c, &l, &cfg).unwrap().2;
        assert_eq!(r1, r2);
        assert!(r1.energy_trace.last().unwrap().energy < r1.energy_trace[0].energy);
    }

    #[test]
    fn blow_up_is_an_error() {
        let (l, a, phi) = random_config(8, 0.2, 9);
        let c = CentralParam::new(-1.0).unwrap();
        let cfg = SolverConfig {
            max_iters: 200,
            step: 1e3,
            line_search: LineSearch::Fixed,
            ..Default::default()
        };
        assert!(matches!(solve(&a, &phi, &c, &l, &cfg), Err(Error::NonFinite(_))));
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig { tol_residual: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { max_iters: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let cfg: SolverConfig = serde_json::from_str(r#"{"max_iters": 10, "line_search": "fixed"}"#).unwrap();
        assert_eq!(cfg.max_iters, 10);
        assert_eq!(cfg.line_search, LineSearch::Fixed);
    }

    #[test]
    fn vortex_clusters_wrap_around_the_torus() {
        let l = TorusLattice::new(8).unwrap();
        let mut phi = HiggsField::constant(&l, vec![1], &[Complex64::new(1.0, 0.0)]).unwrap();
        for s in [l.index(0, 0), l.index(7, 0), l.index(0, 7), l.index(4, 4)] {
            phi.values[s] = Complex64::new(0.01, 0.0);
        }
        assert_eq!(vortex_count(&phi, &l), 2);
        let cells = vortex_cells(&phi, &l);
        assert!(cells.iter().any(|c| c.len() == 3));
    }

    #[test]
    fn initial_fields_are_seeded() {
        let l = TorusLattice::new(8).unwrap();
        let c = CentralParam::with_tau(1.0, 3.0).unwrap();
        let x = initial_fields(1, vec![-1], &c, &l, 5).unwrap();
        let y = initial_fields(1, vec![-1], &c, &l, 5).unwrap();
        let z = initial_fields(1, vec![-1], &c, &l, 6).unwrap();
        assert_eq!(x, y);
        assert_ne!(x, z);
        let mean_sq = x.1.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / l.sites() as f64;
        assert!((mean_sq - 3.0).abs() < 0.6);
    }
}
