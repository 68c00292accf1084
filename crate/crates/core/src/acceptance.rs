//! The acceptance suite: thirteen end-to-end checks with pinned tolerances,
//! shared by the `acceptance` test target and `vortexlab verify`.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::index::{codim_fuzz, oracle_sweep, roots_of_unity_sums, SweepConfig};
use crate::lattice::{
    background_connection, energy_identity_defect, plaquette_angles, stable_sum, CentralParam, HiggsField,
    LinkField, TorusLattice,
};
use crate::s2::{invariant_phibar, moduli_dimension, pair_with_b, ClassB, EquivClass};
use crate::solver::{
    initial_fields, objective_value, solve, ymh_gradient, Gradient, Objective, SolverConfig,
};
use crate::stability::{
    admissible_c, banfield_reduction_check, bogomolov_filtration, is_stable, s2_pair_window, FiltrationSpec, Step,
    SubsheafCandidate,
};
use crate::weights::{
    integrated_lambda, kempf_ness_find_zero, lambda_t_projective, max_weight_linear, max_weight_projective,
    max_weight_s2, moment_pairing, Direction, MaxWeight, Mode, WeightedPoint,
};

pub const SWEEP_MIN_CASES: usize = 10_000;
pub const SWEEP_MAX_SECONDS: f64 = 60.0;
pub const ROOT_SUM_TOL: f64 = 1e-9;
pub const ROOT_SUM_MAX_M: i64 = 50;
pub const CODIM_CASES: usize = 20_000;
pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-6;
pub const FD_SAMPLES: usize = 100;
pub const VACUUM_RESIDUAL: f64 = 1e-8;
pub const VACUUM_ENERGY: f64 = 1e-10;
pub const VACUUM_SECONDS: f64 = 5.0;
pub const VORTEX_RESIDUAL: f64 = 1e-5;
pub const VORTEX_BOGOMOLOV_FLOOR: f64 = -1e-6;
pub const VORTEX_ENERGY_REL: f64 = 0.02;
pub const VORTEX_SECONDS: f64 = 120.0;
pub const REFINEMENT_RATIO: f64 = 0.7;
pub const CHERN_WEIL_TOL: f64 = 1e-10;
pub const MONOTONE_TOL: f64 = 1e-10;
pub const CONVEXITY_TOL: f64 = 1e-9;
pub const KEMPF_NESS_TOL: f64 = 1e-10;
pub const FUZZ_CASES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {}: {} ({:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const NAMES: [&str; 13] = [
    "index closed forms agree with cohomology weights",
    "degree identity on circle bundles",
    "root-of-unity sums",
    "bubble codimension inequality",
    "gradient against finite differences",
    "vacuum solve",
    "one-vortex solve",
    "energy identity under refinement",
    "Chern-Weil sum",
    "maximal weights and convexity",
    "Kempf-Ness zero finder",
    "sphere example",
    "filtration stability checker",
];

/// Run one criterion, `1 ..= 13`.
pub fn run(id: u8) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => index_equivalence(),
        2 => degree_identity(),
        3 => root_sums(),
        4 => codimension(),
        5 => gradient_check(),
        6 => vacuum(),
        7 => one_vortex(),
        8 => refinement(),
        9 => chern_weil(),
        10 => maximal_weights(),
        11 => kempf_ness(),
        12 => sphere(),
        13 => stability_checker(),
        _ => (false, format!("no criterion {id}")),
    };
    Outcome {
        id,
        name: NAMES.get(id as usize - 1).copied().unwrap_or("unknown").to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=13).map(run).collect()
}

fn index_equivalence() -> (bool, String) {
    let start = Instant::now();
    let r = oracle_sweep(&SweepConfig::default());
    let secs = start.elapsed().as_secs_f64();
    let ok = r.index_mismatches == 0 && r.errors == 0 && r.cases >= SWEEP_MIN_CASES && secs < SWEEP_MAX_SECONDS;
    (
        ok,
        format!(
            "{} bundles ({} circle, {} cyclic), {} mismatches, {} errors, sweep {:.1}s {}",
            r.cases,
            r.circle_cases,
            r.cyclic_cases,
            r.index_mismatches,
            r.errors,
            secs,
            r.examples.first().cloned().unwrap_or_default()
        ),
    )
}

fn degree_identity() -> (bool, String) {
    let r = oracle_sweep(&SweepConfig::default());
    (
        r.degree_mismatches == 0 && r.errors == 0 && r.circle_cases > 0,
        format!("{} circle bundles, {} violations", r.circle_cases, r.degree_mismatches),
    )
}

fn root_sums() -> (bool, String) {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for m in 2..=ROOT_SUM_MAX_M {
        for w in 1..m {
            let (a, b) = match roots_of_unity_sums(m, w) {
                Ok(v) => v,
                Err(e) => return (false, e.to_string()),
            };
            let ea = (a - Complex64::new((m - 1) as f64 / 2.0, 0.0)).norm();
            let eb = (b - Complex64::new(-(m - 1) as f64 / 2.0 + w as f64 - 1.0, 0.0)).norm();
            worst = worst.max(ea).max(eb);
            count += 1;
        }
    }
    (worst < ROOT_SUM_TOL, format!("{count} pairs (m, w), worst deviation {worst:.2e}"))
}

fn codimension() -> (bool, String) {
    let r = codim_fuzz(CODIM_CASES, 6, &[2, 3, 4, 5, 6, 7], 11);
    (
        r.counterexamples.is_empty() && r.cases >= 10_000,
        format!(
            "{} valid configurations ({} draws rejected), {} counterexamples",
            r.cases,
            r.rejected,
            r.counterexamples.len()
        ),
    )
}

fn random_configuration(n: usize, seed: u64) -> (TorusLattice, LinkField, HiggsField) {
    let l = TorusLattice::new(n).expect("lattice");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = LinkField::zero(&l);
    for t in a.angles_x.iter_mut().chain(a.angles_y.iter_mut()) {
        *t = rng.gen_range(-0.3..0.3);
    }
    let mut phi = HiggsField::zeros(&l, vec![1, -1]);
    for z in phi.values.iter_mut() {
        *z = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
    }
    (l, a, phi)
}

fn nudge(a: &LinkField, phi: &HiggsField, coord: usize, h: f64) -> (LinkField, HiggsField) {
    let (mut a, mut phi) = (a.clone(), phi.clone());
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

fn gradient_entry(g: &Gradient, coord: usize) -> f64 {
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

fn gradient_check() -> (bool, String) {
    let (l, a, phi) = random_configuration(16, 2024);
    let c = CentralParam::new(0.4).expect("central");
    let g = match ymh_gradient(&a, &phi, &c, &l) {
        Ok(g) => g,
        Err(e) => return (false, e.to_string()),
    };
    let energy = |a: &LinkField, p: &HiggsField| objective_value(Objective::Ymh, a, p, &c, &l).expect("energy");
    let total = 2 * l.sites() + 2 * phi.values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0_f64;
    for _ in 0..FD_SAMPLES {
        let k = rng.gen_range(0..total);
        let (ap, pp) = nudge(&a, &phi, k, FD_STEP);
        let (am, pm) = nudge(&a, &phi, k, -FD_STEP);
        let fd = (energy(&ap, &pp) - energy(&am, &pm)) / (2.0 * FD_STEP);
        worst = worst.max((gradient_entry(&g, k) - fd).abs() / fd.abs());
    }
    (worst < FD_REL_TOL, format!("{FD_SAMPLES} coordinates, worst relative error {worst:.2e}"))
}

fn vacuum() -> (bool, String) {
    let l = TorusLattice::new(32).expect("lattice");
    let tau = 2.0;
    let c = CentralParam::with_tau(-tau / 2.0, tau).expect("central");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut a = LinkField::zero(&l);
    for t in a.angles_x.iter_mut().chain(a.angles_y.iter_mut()) {
        *t = rng.gen_range(-0.01..0.01);
    }
    let mut phi = HiggsField::zeros(&l, vec![1]);
    for z in phi.values.iter_mut() {
        *z = Complex64::new(tau.sqrt() + rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
    }
    let cfg = SolverConfig { tol_residual: 1e-9, ..Default::default() };
    let start = Instant::now();
    let rep = match solve(&a, &phi, &c, &l, &cfg) {
        Ok((_, _, rep)) => rep,
        Err(e) => return (false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let ok = rep.converged
        && rep.residual_eq1 < VACUUM_RESIDUAL
        && rep.residual_eq2 < VACUUM_RESIDUAL
        && rep.final_energy < VACUUM_ENERGY
        && secs < VACUUM_SECONDS;
    (
        ok,
        format!(
            "n = 32, {} iterations, residuals {:.1e} / {:.1e}, energy {:.1e}, solve {:.2}s",
            rep.iterations, rep.residual_eq1, rep.residual_eq2, rep.final_energy, secs
        ),
    )
}

fn one_vortex() -> (bool, String) {
    let l = TorusLattice::new(32).expect("lattice");
    // weight −1 so that c − 2π·d/vol > 0 leaves room for |Φ|²
    let t = 3.0 * PI;
    let c = CentralParam::with_tau(t, 2.0 * (t - TAU)).expect("central");
    let (a, phi) = match initial_fields(1, vec![-1], &c, &l, 1) {
        Ok(v) => v,
        Err(e) => return (false, e.to_string()),
    };
    let cfg = SolverConfig { tol_residual: 1e-6, ..Default::default() };
    let start = Instant::now();
    let rep = match solve(&a, &phi, &c, &l, &cfg) {
        Ok((_, _, rep)) => rep,
        Err(e) => return (false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let rel = (rep.final_energy - rep.topological).abs() / rep.topological.abs();
    let ok = rep.converged
        && rep.residual_eq1 < VORTEX_RESIDUAL
        && rep.residual_eq2 < VORTEX_RESIDUAL
        && rep.vortex_count == 1
        && rep.bogomolov >= VORTEX_BOGOMOLOV_FLOOR
        && rel <= VORTEX_ENERGY_REL
        && secs < VORTEX_SECONDS;
    (
        ok,
        format!(
            "n = 32, c = 3π, {} iterations, residuals {:.1e} / {:.1e}, {} vortex, bogomolov {:.3e}, energy {:.4} vs {:.4} ({:.2}%), solve {:.1}s",
            rep.iterations,
            rep.residual_eq1,
            rep.residual_eq2,
            rep.vortex_count,
            rep.bogomolov,
            rep.final_energy,
            rep.topological,
            100.0 * rel,
            secs
        ),
    )
}

/// Smooth degree-zero fields sampled on an `n × n` unit torus.
pub fn smooth_fields(n: usize) -> (TorusLattice, LinkField, HiggsField) {
    let l = TorusLattice::new(n).expect("lattice");
    let h = l.spacing();
    let mut a = LinkField::zero(&l);
    let mut phi = HiggsField::zeros(&l, vec![1]);
    for s in 0..l.sites() {
        let (x, y) = l.position(s);
        a.angles_x[s] = h * 0.8 * (TAU * y).sin() * (1.0 + 0.3 * (TAU * (x + h / 2.0)).cos());
        a.angles_y[s] = h * 0.6 * (TAU * x).cos();
        phi.values[s] = Complex64::new(1.0 + 0.3 * (TAU * y).sin(), 0.0) + 0.5 * Complex64::from_polar(1.0, TAU * x);
    }
    (l, a, phi)
}

fn refinement() -> (bool, String) {
    let c = CentralParam::new(0.5).expect("central");
    let defect = |n| {
        let (l, a, phi) = smooth_fields(n);
        energy_identity_defect(&a, &phi, &c, &l)
    };
    match (defect(32), defect(64)) {
        (Ok(d32), Ok(d64)) => {
            let ratio = d64 / d32;
            (ratio <= REFINEMENT_RATIO, format!("defect {d32:.3e} at n = 32, {d64:.3e} at n = 64, ratio {ratio:.3}"))
        }
        (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
    }
}

fn chern_weil() -> (bool, String) {
    let l = TorusLattice::new(32).expect("lattice");
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0_f64;
    for d in -8i64..=8 {
        let mut a = match background_connection(d, &l) {
            Ok(a) => a,
            Err(e) => return (false, e.to_string()),
        };
        for t in a.angles_x.iter_mut().chain(a.angles_y.iter_mut()) {
            *t += rng.gen_range(-0.3..0.3);
        }
        let total = stable_sum(plaquette_angles(&a, &l).expect("plaquettes"));
        worst = worst.max((total - TAU * d as f64).abs());
    }
    (worst < CHERN_WEIL_TOL, format!("|d| <= 8 with random link noise, worst error {worst:.2e}"))
}

fn proj(coords: &[f64], weights: &[i64]) -> WeightedPoint {
    WeightedPoint::from_ints(coords, weights, Mode::Projective).expect("point")
}

fn random_projective(rng: &mut ChaCha8Rng, max_weight: i64) -> WeightedPoint {
    let r = rng.gen_range(2..=6);
    loop {
        let coords: Vec<Complex64> = (0..r)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
                }
            })
            .collect();
        if coords.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let weights = (0..r).map(|_| Rational64::from_integer(rng.gen_range(-max_weight..=max_weight))).collect();
        return WeightedPoint::new(coords, weights, Mode::Projective).expect("point");
    }
}

fn maximal_weights() -> (bool, String) {
    let q = |v: i64| MaxWeight::Finite(Rational64::from_integer(v));
    let lin = |c: &[f64], w: &[i64]| {
        max_weight_linear(&WeightedPoint::from_ints(c, w, Mode::Linear).expect("point")).expect("weight")
    };
    let c = Complex64::new;
    let exact = [
        lin(&[1.0], &[-2]) == q(0),
        lin(&[1.0], &[1]) == MaxWeight::Infinite,
        max_weight_projective(&proj(&[1.0, 1.0], &[1, -1])).ok() == Some(q(1)),
        max_weight_projective(&proj(&[0.0, 1.0], &[1, -1])).ok() == Some(q(-1)),
        max_weight_s2(c(1.0, 0.0), c(1.0, 0.0), Direction::PlusI).ok() == Some(1),
        max_weight_s2(c(1.0, 0.0), c(0.0, 0.0), Direction::PlusI).ok() == Some(-1),
        max_weight_s2(c(0.0, 0.0), c(1.0, 0.0), Direction::MinusI).ok() == Some(-1),
    ];
    let exact_ok = exact.iter().filter(|&&b| b).count();

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst_step = 0.0_f64;
    let mut worst_second = 0.0_f64;
    for _ in 0..FUZZ_CASES {
        let p = random_projective(&mut rng, 3);
        let grid: Vec<f64> = (0..100).map(|k| -2.5 + 5.0 * k as f64 / 99.0).collect();
        let lam: Vec<f64> = grid.iter().map(|&t| lambda_t_projective(&p, t).expect("lambda")).collect();
        for w in lam.windows(2) {
            worst_step = worst_step.min(w[1] - w[0]);
        }
        let psi: Vec<f64> = grid.iter().map(|&t| integrated_lambda(&p, t).expect("psi")).collect();
        for w in psi.windows(3) {
            worst_second = worst_second.min(w[2] - 2.0 * w[1] + w[0]);
        }
    }
    let ok = exact_ok == exact.len() && worst_step >= -MONOTONE_TOL && worst_second >= -CONVEXITY_TOL;
    (
        ok,
        format!(
            "{exact_ok}/{} exact values, {FUZZ_CASES} random points: min increment {worst_step:.1e}, min second difference {worst_second:.1e}",
            exact.len()
        ),
    )
}

fn kempf_ness() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let (mut stable, mut unstable, mut failures) = (0, 0, 0);
    let mut worst = 0.0_f64;
    for _ in 0..FUZZ_CASES {
        let p = random_projective(&mut rng, 4);
        let offset = rng.gen_range(-4.5..4.5);
        let up = max_weight_projective(&p).expect("weight").to_f64();
        let neg = WeightedPoint { weights: p.weights.iter().map(|w| -w).collect(), ..p.clone() };
        let down = max_weight_projective(&neg).expect("weight").to_f64();
        let expect_stable = up - offset > 0.0 && down + offset > 0.0;
        match kempf_ness_find_zero(&p, offset) {
            Ok(k) if expect_stable => {
                stable += 1;
                let at = WeightedPoint { coords: k.point.clone(), ..p.clone() };
                let r = (moment_pairing(&at).expect("pairing") - offset).abs();
                worst = worst.max(r);
                if r >= KEMPF_NESS_TOL {
                    failures += 1;
                }
            }
            Err(Error::Unstable(_)) if !expect_stable => unstable += 1,
            _ => failures += 1,
        }
    }
    (
        failures == 0 && stable > 0 && unstable > 0,
        format!("{stable} stable solved (worst residual {worst:.1e}), {unstable} unstable flagged, {failures} failures"),
    )
}

fn sphere() -> (bool, String) {
    let mut checked = 0;
    let mut bad = 0;
    for p in 1..=39i64 {
        for q in 1..=40 - p {
            if p == q {
                continue;
            }
            let b = ClassB::new(p, q);
            let via_index = pair_with_b(&EquivClass::c1_tangent(), b).ok();
            let dim = moduli_dimension(b).ok();
            let inv = invariant_phibar(b).ok();
            checked += 1;
            if dim != Some(p + q) || via_index != Some(p + q) || inv != Some(1) {
                bad += 1;
            }
        }
    }
    let r = |n, d| Rational64::new(n, d);
    // (deg E, vol, ⟨c, i⟩, inside)
    let table = [
        (0, r(1, 1), r(1, 2), true),
        (2, r(1, 1), r(1, 2), false),
        (1, r(1, 1), r(0, 1), false),
        (-1, r(1, 1), r(0, 1), false),
        (1, r(2, 1), r(1, 1), true),
        (3, r(2, 1), r(1, 2), false),
        (0, r(1, 2), r(1, 1), false),
        (1, r(3, 1), r(1, 3), true),
        (-2, r(1, 1), r(-3, 2), true),
        (4, r(5, 2), r(2, 1), true),
    ];
    let mut window_bad = 0;
    for &(d, vol, c, inside) in &table {
        let a = s2_pair_window(d, vol, c).ok();
        let mirrored = s2_pair_window(-d, vol, -c).ok();
        if a != Some(inside) || mirrored != Some(inside) {
            window_bad += 1;
        }
    }
    (
        bad == 0 && window_bad == 0,
        format!(
            "{checked} classes (p, q), {bad} mismatches; window table {}/{} rows",
            table.len() - window_bad,
            table.len()
        ),
    )
}

fn spec(rank: i64, degree: i64, steps: &[(i64, i64)], taus: &[Rational64]) -> FiltrationSpec {
    FiltrationSpec::new(
        rank,
        Rational64::from_integer(degree),
        steps.iter().map(|&(r, d)| Step { rank: r, degree: Rational64::from_integer(d) }).collect(),
        taus.to_vec(),
    )
    .expect("filtration")
}

fn candidate(rank: i64, degree: i64, meet: &[i64]) -> SubsheafCandidate {
    SubsheafCandidate { rank, degree: Rational64::from_integer(degree), meet_ranks: meet.to_vec() }
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational64 {
    Rational64::new(rng.gen_range(lo..=hi), rng.gen_range(1..=6))
}

fn stability_checker() -> (bool, String) {
    let r = |n, d| Rational64::new(n, d);
    let one = r(1, 1);
    let base = spec(2, 0, &[(1, -1)], &[one]);
    let verdict = is_stable(&base, &[candidate(1, -1, &[1]), candidate(1, 0, &[0]), candidate(1, 1, &[0])]);
    let examples = [
        admissible_c(&spec(2, 0, &[(1, 0)], &[one])).ok() == Some(r(1, 2)),
        admissible_c(&spec(3, 2, &[(1, 0)], &[r(0, 1)])).ok() == Some(r(2, 3)),
        admissible_c(&spec(3, 2, &[(1, -1), (2, 0)], &[one, r(1, 2)])).ok() == Some(r(4, 3)),
        is_stable(&base, &[candidate(1, -1, &[1])]).map(|v| v.stable).ok() == Some(true),
        is_stable(&base, &[candidate(1, 0, &[0])]).map(|v| v.stable).ok() == Some(true),
        verdict
            .as_ref()
            .map(|v| !v.stable && v.worst.as_ref().map(|w| (w.index, w.slope)) == Some((2, one)))
            .unwrap_or(false),
        banfield_reduction_check(r(-1, 1), r(3, 2), r(1, 1), false),
        banfield_reduction_check(r(-1, 1), r(2, 1), r(1, 1), true),
        !banfield_reduction_check(r(-1, 1), r(1, 1), r(1, 1), true),
        bogomolov_filtration(&base, r(0, 1)).ok() == Some(one),
        bogomolov_filtration(&spec(2, 0, &[(1, 0)], &[r(0, 1)]), r(0, 1)).ok() == Some(r(0, 1)),
        bogomolov_filtration(&spec(2, -4, &[(1, 0)], &[one]), r(0, 1)).ok() == Some(r(6, 1)),
    ];
    let examples_ok = examples.iter().filter(|&&b| b).count();

    let mut rng = ChaCha8Rng::seed_from_u64(57);
    let mut changed = 0;
    let mut unstable_seen = 0;
    for _ in 0..FUZZ_CASES {
        let rank = rng.gen_range(2..=6);
        let mut ranks: Vec<i64> = (1..=rank).filter(|_| rng.gen_bool(0.5)).collect();
        ranks.truncate(3);
        let steps: Vec<Step> =
            ranks.iter().map(|&k| Step { rank: k, degree: Rational64::from_integer(rng.gen_range(-5..=5)) }).collect();
        let taus: Vec<Rational64> = ranks.iter().map(|_| random_rational(&mut rng, 1, 9)).collect();
        let f = FiltrationSpec {
            rank,
            degree: Rational64::from_integer(rng.gen_range(-6..=6)),
            steps,
            taus,
            vol: random_rational(&mut rng, 1, 6),
        };
        let cands: Vec<SubsheafCandidate> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let cr = rng.gen_range(1..rank);
                let mut prev = 0;
                let meet = ranks
                    .iter()
                    .map(|&k| {
                        let hi = k.min(cr);
                        prev = rng.gen_range(prev.min(hi)..=hi);
                        prev
                    })
                    .collect();
                SubsheafCandidate { rank: cr, degree: Rational64::from_integer(rng.gen_range(-6..=6)), meet_ranks: meet }
            })
            .collect();
        let t = random_rational(&mut rng, 1, 12);
        let scaled_f = f.rescaled(t);
        let scaled_c: Vec<SubsheafCandidate> =
            cands.iter().map(|c| SubsheafCandidate { degree: c.degree * t, ..c.clone() }).collect();
        match (is_stable(&f, &cands), is_stable(&scaled_f, &scaled_c), admissible_c(&f), admissible_c(&scaled_f)) {
            (Ok(v), Ok(w), Ok(c0), Ok(c1)) => {
                if !v.stable {
                    unstable_seen += 1;
                }
                if v.stable != w.stable || c1 != c0 * t {
                    changed += 1;
                }
            }
            _ => changed += 1,
        }
    }
    (
        examples_ok == examples.len() && changed == 0,
        format!(
            "{examples_ok}/{} examples, {FUZZ_CASES} rescaled specs ({unstable_seen} unstable), {changed} verdict changes",
            examples.len()
        ),
    )
}
