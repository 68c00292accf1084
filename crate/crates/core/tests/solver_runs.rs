use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexlab::lattice::{gauge_transform, ymh_energy, CentralParam, TorusLattice};
use vortexlab::solver::{initial_fields, residuals, solve, Method, Objective, SolverConfig, SolveReport};

fn run(n: usize, degree: i64, weight: i32, t: f64, seed: u64, cfg: &SolverConfig) -> SolveReport {
    let l = TorusLattice::new(n).unwrap();
    let tau = (2.0 * (t - TAU * degree as f64 / l.volume()) / -weight as f64).abs().max(1.0);
    let c = CentralParam::with_tau(t, tau).unwrap();
    let (a, phi) = initial_fields(degree, vec![weight], &c, &l, seed).unwrap();
    solve(&a, &phi, &c, &l, cfg).unwrap().2
}

#[test]
fn one_vortex_is_seed_independent() {
    let cfg = SolverConfig::default();
    let energies: Vec<f64> = (1..=3)
        .map(|seed| {
            let rep = run(24, 1, -1, 3.0 * PI, seed, &cfg);
            assert!(rep.converged);
            assert_eq!(rep.vortex_count, 1);
            rep.final_energy
        })
        .collect();
    for e in &energies {
        assert!((e - energies[0]).abs() < 1e-5 * energies[0], "{energies:?}");
    }
}

#[test]
fn one_vortex_satisfies_energy_bounds() {
    let rep = run(32, 1, -1, 3.0 * PI, 4, &SolverConfig::default());
    assert!(rep.converged);
    assert!(rep.bogomolov >= -1e-6);
    assert!(rep.identity_defect < 1e-3 * rep.final_energy, "{} vs {}", rep.identity_defect, rep.final_energy);
    assert!(rep.final_energy >= rep.topological - 1e-6);
    assert!(rep.integral_obstruction <= rep.residual_eq2);
}

#[test]
fn degree_two_has_two_vortices() {
    let rep = run(32, 2, -1, 6.0 * PI, 3, &SolverConfig::default());
    assert!(rep.converged);
    assert_eq!(rep.vortex_count, 2);
}

#[test]
fn antivortex_with_positive_weight() {
    let rep = run(32, -1, 1, -3.0 * PI, 2, &SolverConfig::default());
    assert!(rep.converged);
    assert_eq!(rep.vortex_count, 1);
}

#[test]
fn inconsistent_parameter_reports_obstruction() {
    let cfg = SolverConfig { max_iters: 20_000, ..Default::default() };
    let rep = run(16, 1, -1, 5.0, 1, &cfg);
    assert!(!rep.converged);
    assert!((rep.integral_obstruction - (TAU - 5.0)).abs() < 1e-6);
}

#[test]
fn both_methods_reach_the_vacuum() {
    for method in [Method::Cg, Method::Descent] {
        let cfg = SolverConfig { method, tol_residual: 1e-8, ..Default::default() };
        let rep = run(16, 0, 1, -1.0, 6, &cfg);
        assert!(rep.converged, "{method:?}");
        assert_eq!(rep.objective, Objective::Ymh);
        assert!(rep.final_energy < 1e-10);
        assert_eq!(rep.vortex_count, 0);
    }
}

#[test]
fn solution_is_gauge_covariant() {
    let l = TorusLattice::new(24).unwrap();
    let c = CentralParam::with_tau(3.0 * PI, 2.0 * PI).unwrap();
    let (a, phi) = initial_fields(1, vec![-1], &c, &l, 8).unwrap();
    let (a, phi, rep) = solve(&a, &phi, &c, &l, &SolverConfig::default()).unwrap();
    assert!(rep.converged);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g: Vec<f64> = (0..l.sites()).map(|_| rng.gen_range(-PI..PI)).collect();
    let (a2, phi2) = gauge_transform(&a, &phi, &g, &l).unwrap();
    let e1 = ymh_energy(&a, &phi, &c, &l).unwrap().total;
    let e2 = ymh_energy(&a2, &phi2, &c, &l).unwrap().total;
    assert!((e1 - e2).abs() < 1e-9 * e1);
    let (r1, r2) = residuals(&a2, &phi2, &c, &l).unwrap();
    assert!(r1 < 1e-6 && r2 < 1e-6);
}

#[test]
fn identical_seeds_give_identical_reports() {
    let cfg = SolverConfig { max_iters: 300, ..Default::default() };
    let r1 = run(16, 1, -1, 3.0 * PI, 9, &cfg);
    let r2 = run(16, 1, -1, 3.0 * PI, 9, &cfg);
    assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
}
