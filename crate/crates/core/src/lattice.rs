//! Periodic square lattice on the flat torus, compact U(1) link variables,
//! Higgs fields with diagonal integer weights, and the local quantities that
//! enter the vortex equations and the Yang–Mills–Higgs functional.
//!
//! Sign conventions are fixed in `docs/CONVENTIONS.md`. In short: the link
//! angle on the edge `s -> s + e` transports a weight-`w` component by
//! `exp(i w θ)`, the curvature scalar is the wrapped plaquette angle over the
//! cell area, and the moment map of `C^r` is stored as the real scalar `m`
//! with `μ = i m`, `m = -1/2 Σ w_j |Φ_j|²`.
//!
//! All reductions run over sites in row-major order with compensated
//! summation, so results are bit-reproducible.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square `n × n` periodic lattice covering a flat torus of side `side_length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusLattice {
    n: usize,
    side_length: f64,
}

impl TorusLattice {
    /// Unit torus with `n` sites per side.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_side(n, 1.0)
    }

    pub fn with_side(n: usize, side_length: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::LatticeTooSmall(n));
        }
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(Error::BadSideLength(side_length));
        }
        Ok(Self { n, side_length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.side_length / self.n as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        let a = self.spacing();
        a * a
    }

    #[inline]
    pub fn volume(&self) -> f64 {
        self.side_length * self.side_length
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.n * self.n
    }

    /// Row-major site index of `(ix, iy)`.
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.n + iy
    }

    #[inline]
    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s / self.n, s % self.n)
    }

    #[inline]
    pub fn fwd_x(&self, s: usize) -> usize {
        let (ix, iy) = self.coords(s);
        self.index((ix + 1) % self.n, iy)
    }

    #[inline]
    pub fn fwd_y(&self, s: usize) -> usize {
        let (ix, iy) = self.coords(s);
        self.index(ix, (iy + 1) % self.n)
    }

    #[inline]
    pub fn bwd_x(&self, s: usize) -> usize {
        let (ix, iy) = self.coords(s);
        self.index((ix + self.n - 1) % self.n, iy)
    }

    #[inline]
    pub fn bwd_y(&self, s: usize) -> usize {
        let (ix, iy) = self.coords(s);
        self.index(ix, (iy + self.n - 1) % self.n)
    }

    /// Physical position of site `s`.
    pub fn position(&self, s: usize) -> (f64, f64) {
        let (ix, iy) = self.coords(s);
        let a = self.spacing();
        (ix as f64 * a, iy as f64 * a)
    }
}

/// U(1) connection stored as parallel-transport angles on the `+x` and `+y`
/// edges leaving every site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkField {
    pub angles_x: Vec<f64>,
    pub angles_y: Vec<f64>,
    pub degree: i64,
}

impl LinkField {
    /// Flat trivial connection.
    pub fn zero(lattice: &TorusLattice) -> Self {
        Self {
            angles_x: vec![0.0; lattice.sites()],
            angles_y: vec![0.0; lattice.sites()],
            degree: 0,
        }
    }

    pub fn check(&self, lattice: &TorusLattice) -> Result<()> {
        let sites = lattice.sites();
        if self.angles_x.len() != sites || self.angles_y.len() != sites {
            return Err(Error::ShapeMismatch(format!(
                "link field has {}/{} angles, lattice has {} sites",
                self.angles_x.len(),
                self.angles_y.len(),
                sites
            )));
        }
        Ok(())
    }

    /// Number of real coordinates (two angles per site).
    pub fn len(&self) -> usize {
        self.angles_x.len() + self.angles_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_x.is_empty()
    }
}

/// Section of the trivial `C^r` bundle twisted by the link field, with the
/// circle acting on component `j` through the integer weight `weights[j]`.
///
/// Layout: component `j` at site `s` is `values[s * r + j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiggsField {
    pub values: Vec<Complex64>,
    pub weights: Vec<i32>,
}

impl HiggsField {
    pub fn zeros(lattice: &TorusLattice, weights: Vec<i32>) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); lattice.sites() * weights.len()],
            weights,
        }
    }

    /// Same value at every site.
    pub fn constant(lattice: &TorusLattice, weights: Vec<i32>, value: &[Complex64]) -> Result<Self> {
        if value.len() != weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} components for {} weights",
                value.len(),
                weights.len()
            )));
        }
        let mut values = Vec::with_capacity(lattice.sites() * weights.len());
        for _ in 0..lattice.sites() {
            values.extend_from_slice(value);
        }
        Ok(Self { values, weights })
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn at(&self, s: usize, j: usize) -> Complex64 {
        self.values[s * self.weights.len() + j]
    }

    pub fn check(&self, lattice: &TorusLattice) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::ShapeMismatch("Higgs field has no components".into()));
        }
        if self.values.len() != lattice.sites() * self.weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "Higgs field has {} entries, expected {} sites x {} components",
                self.values.len(),
                lattice.sites(),
                self.weights.len()
            )));
        }
        if let Some(k) = self.values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!("Higgs entry {k}")));
        }
        Ok(())
    }

    /// Pointwise norm `|Φ(s)|`.
    pub fn norms(&self) -> Vec<f64> {
        self.values
            .chunks(self.rank())
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }
}

/// Central element `c = i t` of `Lie(S¹) = iR`, plus the symplectic scale `τ`
/// used to size initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralParam {
    pub c: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_tau() -> f64 {
    1.0
}

impl CentralParam {
    pub fn new(c: f64) -> Result<Self> {
        Self::with_tau(c, 1.0)
    }

    pub fn with_tau(c: f64, tau: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite("central parameter".into()));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { c, tau })
    }
}

/// Wrap an angle to the principal branch `(-π, π]`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    x - TAU * ((x - PI) / TAU).ceil()
}

/// Compensated (Neumaier) sum in iteration order.
pub fn stable_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_pair(a: &LinkField, phi: &HiggsField, lattice: &TorusLattice) -> Result<()> {
    a.check(lattice)?;
    phi.check(lattice)
}

/// Wrapped plaquette angles `θ_p ∈ (-π, π]`, one per site (lower-left corner).
pub fn plaquette_angles(a: &LinkField, lattice: &TorusLattice) -> Result<Vec<f64>> {
    a.check(lattice)?;
    Ok((0..lattice.sites())
        .map(|s| {
            let raw = a.angles_x[s] + a.angles_y[lattice.fwd_x(s)]
                - a.angles_x[lattice.fwd_y(s)]
                - a.angles_y[s];
            wrap_angle(raw)
        })
        .collect())
}

/// Curvature scalar `ΛF_A / i` per plaquette: wrapped angle over cell area.
pub fn plaquette_curvature(a: &LinkField, lattice: &TorusLattice) -> Result<Vec<f64>> {
    let area = lattice.cell_area();
    Ok(plaquette_angles(a, lattice)?.into_iter().map(|t| t / area).collect())
}

/// Sum of wrapped plaquette angles; equals `2π·degree` for a branch-safe field.
pub fn total_curvature(a: &LinkField, lattice: &TorusLattice) -> Result<f64> {
    Ok(stable_sum(plaquette_angles(a, lattice)?))
}

/// Uniform-curvature connection of degree `d` in Landau gauge, with a single
/// transition column at `ix = n - 1`.
pub fn background_connection(d: i64, lattice: &TorusLattice) -> Result<LinkField> {
    let n = lattice.n();
    let limit = (n / 2) as i64;
    if d.abs() > limit {
        return Err(Error::DegreeTooLarge { degree: d, n, limit });
    }
    let mut field = LinkField::zero(lattice);
    field.degree = d;
    if d == 0 {
        return Ok(field);
    }
    let nf = n as f64;
    let flux = TAU * d as f64;
    for ix in 0..n {
        for iy in 0..n {
            let s = lattice.index(ix, iy);
            field.angles_y[s] = flux * ix as f64 / (nf * nf);
            if ix == n - 1 {
                field.angles_x[s] = -flux * iy as f64 / nf;
            }
        }
    }
    Ok(field)
}

/// Scaled forward covariant differences `a·D_x Φ` and `a·D_y Φ` (no division
/// by the spacing), laid out like `HiggsField::values`.
pub(crate) fn scaled_differences(
    a: &LinkField,
    phi: &HiggsField,
    lattice: &TorusLattice,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let r = phi.rank();
    let mut dx = vec![Complex64::new(0.0, 0.0); phi.values.len()];
    let mut dy = vec![Complex64::new(0.0, 0.0); phi.values.len()];
    for s in 0..lattice.sites() {
        let sx = lattice.fwd_x(s);
        let sy = lattice.fwd_y(s);
        for (j, &w) in phi.weights.iter().enumerate() {
            let ux = Complex64::from_polar(1.0, w as f64 * a.angles_x[s]);
            let uy = Complex64::from_polar(1.0, w as f64 * a.angles_y[s]);
            let here = phi.values[s * r + j];
            dx[s * r + j] = ux * phi.values[sx * r + j] - here;
            dy[s * r + j] = uy * phi.values[sy * r + j] - here;
        }
    }
    (dx, dy)
}

/// Forward covariant differences `(D_x Φ, D_y Φ)`.
pub fn covariant_derivative(
    a: &LinkField,
    phi: &HiggsField,
    lattice: &TorusLattice,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_pair(a, phi, lattice)?;
    let inv = 1.0 / lattice.spacing();
    let (mut dx, mut dy) = scaled_differences(a, phi, lattice);
    dx.iter_mut().chain(dy.iter_mut()).for_each(|z| *z *= inv);
    Ok((dx, dy))
}

/// Antiholomorphic part `(D_x + i D_y) Φ / 2`.
pub fn dbar(a: &LinkField, phi: &HiggsField, lattice: &TorusLattice) -> Result<Vec<Complex64>> {
    let (dx, dy) = covariant_derivative(a, phi, lattice)?;
    Ok(dx
        .iter()
        .zip(&dy)
        .map(|(x, y)| (x + Complex64::i() * y) * 0.5)
        .collect())
}

/// Holomorphic part `(D_x - i D_y) Φ / 2`.
pub fn del(a: &LinkField, phi: &HiggsField, lattice: &TorusLattice) -> Result<Vec<Complex64>> {
    let (dx, dy) = covariant_derivative(a, phi, lattice)?;
    Ok(dx
        .iter()
        .zip(&dy)
        .map(|(x, y)| (x - Complex64::i() * y) * 0.5)
        .collect())
}

/// Real moment map `m = -1/2 Σ_j w_j |Φ_j|²` per site (`μ = i m`).
pub fn moment_map_linear(phi: &HiggsField) -> Vec<f64> {
    let r = phi.rank();
    if r == 0 {
        return Vec::new();
    }
    phi.values
        .chunks(r)
        .map(|c| {
            -0.5 * c
                .iter()
                .zip(&phi.weights)
                .map(|(z, &w)| w as f64 * z.norm_sqr())
                .sum::<f64>()
        })
        .collect()
}

/// The three summands of the Yang–Mills–Higgs functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    /// `‖F_A‖²`
    pub curvature: f64,
    /// `‖d_A Φ‖²`
    pub covariant: f64,
    /// `‖μ(Φ) - c‖²`
    pub potential: f64,
}

pub fn ymh_energy(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<EnergyBreakdown> {
    check_pair(a, phi, lattice)?;
    let area = lattice.cell_area();
    let theta = plaquette_angles(a, lattice)?;
    let curvature = stable_sum(theta.iter().map(|t| t * t / area));
    let (dx, dy) = scaled_differences(a, phi, lattice);
    let covariant = stable_sum(dx.iter().zip(&dy).map(|(x, y)| x.norm_sqr() + y.norm_sqr()));
    let m = moment_map_linear(phi);
    let potential = stable_sum(m.iter().map(|v| area * (v - c.c) * (v - c.c)));
    Ok(EnergyBreakdown {
        total: curvature + covariant + potential,
        curvature,
        covariant,
        potential,
    })
}

/// Every lattice integral that enters the Bogomolov rewriting of the
/// functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KahlerTerms {
    /// `‖ΛF_A + μ(Φ) - c‖²`
    pub equation_norm: f64,
    /// `‖∂̄_A Φ‖²` as the L² norm of a (0,1)-form.
    pub dbar_norm: f64,
    /// `‖∂_A Φ‖²` as the L² norm of a (1,0)-form.
    pub del_norm: f64,
    /// `∫ ⟨ΛF_A, c⟩`
    pub curvature_c: f64,
    /// `∫ ⟨ΛF_A, μ(Φ)⟩`
    pub curvature_mu: f64,
}

impl KahlerTerms {
    /// Lattice value of `∫ Φ*φ_A(ω̄_F)`; its continuum value is zero for a
    /// linear target.
    pub fn equivariant_symplectic(&self) -> f64 {
        0.5 * (self.del_norm - self.dbar_norm) - self.curvature_mu
    }

    /// Topological term `2∫⟨ΛF_A, c⟩ + 2∫Φ*φ_A(ω̄_F)` with the linear-target
    /// constant (zero) in place of the second integral.
    pub fn topological(&self) -> f64 {
        2.0 * self.curvature_c
    }
}

pub fn kahler_terms(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<KahlerTerms> {
    check_pair(a, phi, lattice)?;
    let area = lattice.cell_area();
    let theta = plaquette_angles(a, lattice)?;
    let m = moment_map_linear(phi);
    let (dx, dy) = scaled_differences(a, phi, lattice);
    let i = Complex64::i();
    let equation_norm = stable_sum(theta.iter().zip(&m).map(|(t, v)| {
        let e = t / area + v - c.c;
        area * e * e
    }));
    let dbar_norm = stable_sum(dx.iter().zip(&dy).map(|(x, y)| 0.5 * (x + i * y).norm_sqr()));
    let del_norm = stable_sum(dx.iter().zip(&dy).map(|(x, y)| 0.5 * (x - i * y).norm_sqr()));
    let curvature_c = stable_sum(theta.iter().map(|t| t * c.c));
    let curvature_mu = stable_sum(theta.iter().zip(&m).map(|(t, v)| t * v));
    Ok(KahlerTerms {
        equation_norm,
        dbar_norm,
        del_norm,
        curvature_c,
        curvature_mu,
    })
}

/// Mismatch between the functional and its Bogomolov rewriting
/// `‖ΛF+μ-c‖² + 2‖∂̄Φ‖² + 2∫⟨ΛF,c⟩`. Algebraically this is
/// `|‖∂Φ‖² - ‖∂̄Φ‖² - 2∫⟨ΛF,μ⟩|`, which is how it is evaluated.
pub fn energy_identity_defect(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<f64> {
    let k = kahler_terms(a, phi, c, lattice)?;
    Ok((2.0 * k.equivariant_symplectic()).abs())
}

/// `∫⟨ΛF_A, c⟩ + ∫Φ*φ_A(ω̄_F)` on the lattice.
pub fn bogomolov_value(
    a: &LinkField,
    phi: &HiggsField,
    c: &CentralParam,
    lattice: &TorusLattice,
) -> Result<f64> {
    let k = kahler_terms(a, phi, c, lattice)?;
    Ok(k.curvature_c + k.equivariant_symplectic())
}

/// Apply the gauge transformation `g: sites -> U(1)` given as angles.
pub fn gauge_transform(
    a: &LinkField,
    phi: &HiggsField,
    g: &[f64],
    lattice: &TorusLattice,
) -> Result<(LinkField, HiggsField)> {
    check_pair(a, phi, lattice)?;
    if g.len() != lattice.sites() {
        return Err(Error::ShapeMismatch(format!(
            "gauge angle count {} != {} sites",
            g.len(),
            lattice.sites()
        )));
    }
    let mut a2 = a.clone();
    let mut phi2 = phi.clone();
    let r = phi.rank();
    for s in 0..lattice.sites() {
        a2.angles_x[s] += g[s] - g[lattice.fwd_x(s)];
        a2.angles_y[s] += g[s] - g[lattice.fwd_y(s)];
        for (j, &w) in phi.weights.iter().enumerate() {
            phi2.values[s * r + j] *= Complex64::from_polar(1.0, w as f64 * g[s]);
        }
    }
    Ok((a2, phi2))
}

/// JSON snapshot of a lattice configuration. Sites are row-major with
/// `(ix, iy)` at `ix·n + iy`; Higgs components are innermost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSnapshot {
    pub n: usize,
    pub side_length: f64,
    pub degree: i64,
    pub angles_x: Vec<f64>,
    pub angles_y: Vec<f64>,
    pub weights: Vec<i32>,
    pub values_re: Vec<f64>,
    pub values_im: Vec<f64>,
}

impl FieldSnapshot {
    pub fn from_fields(lattice: &TorusLattice, a: &LinkField, phi: &HiggsField) -> Self {
        Self {
            n: lattice.n(),
            side_length: lattice.side_length(),
            degree: a.degree,
            angles_x: a.angles_x.clone(),
            angles_y: a.angles_y.clone(),
            weights: phi.weights.clone(),
            values_re: phi.values.iter().map(|z| z.re).collect(),
            values_im: phi.values.iter().map(|z| z.im).collect(),
        }
    }

    pub fn into_fields(self) -> Result<(TorusLattice, LinkField, HiggsField)> {
        let lattice = TorusLattice::with_side(self.n, self.side_length)?;
        if self.values_re.len() != self.values_im.len() {
            return Err(Error::ShapeMismatch("values_re and values_im differ in length".into()));
        }
        let a = LinkField {
            angles_x: self.angles_x,
            angles_y: self.angles_y,
            degree: self.degree,
        };
        let phi = HiggsField {
            values: self
                .values_re
                .iter()
                .zip(&self.values_im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
            weights: self.weights,
        };
        check_pair(&a, &phi, &lattice)?;
        Ok((lattice, a, phi))
    }
}
