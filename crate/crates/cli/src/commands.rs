use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use vortexlab::acceptance;
use vortexlab::index::{self, SplitBundle, WeightData};
use vortexlab::lattice::{CentralParam, FieldSnapshot, TorusLattice};
use vortexlab::rational::{self, Q};
use vortexlab::s2::{self, ClassB};
use vortexlab::solver::{self, SolveReport, SolverConfig};
use vortexlab::stability::{self, FiltrationSpec, StabilityVerdict, SubsheafCandidate};
use vortexlab::weights::{
    self, Direction, GrassData, KempfNess, MaxWeight, Mode, PsiValues, WeightedPoint,
};

use crate::io::{emit, parse, read_input, Failure, Options};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveInput {
    n: usize,
    #[serde(default = "one")]
    side_length: f64,
    degree: i64,
    weights: Vec<i32>,
    c: f64,
    /// Typical `|Φ|²` of the random start; derived from `c` when absent.
    tau: Option<f64>,
    #[serde(default)]
    solver: SolverConfig,
    /// Start here instead of from seeded random data.
    initial: Option<FieldSnapshot>,
    #[serde(default)]
    save_fields: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOutput {
    pub report: SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<FieldSnapshot>,
}

/// `|Φ|²` balancing the second equation on average for the mean weight.
fn suggested_tau(input: &SolveInput, volume: f64) -> f64 {
    let mean_w = input.weights.iter().map(|&w| w as f64).sum::<f64>() / input.weights.len().max(1) as f64;
    let target = input.c - TAU * input.degree as f64 / volume;
    if mean_w == 0.0 {
        return 1.0;
    }
    let tau = (-2.0 * target / mean_w).abs();
    if tau.is_finite() && tau > 1e-3 {
        tau
    } else {
        1.0
    }
}

pub fn solve(name: &str, opts: &Options) -> Result<(), Failure> {
    let text = read_input(opts)?;
    let mut input: SolveInput = parse(&text)?;
    if let Some(seed) = opts.seed {
        input.solver.seed = seed;
    }
    let lattice = TorusLattice::with_side(input.n, input.side_length)?;
    let tau = input.tau.unwrap_or_else(|| suggested_tau(&input, lattice.volume()));
    let central = CentralParam::with_tau(input.c, tau)?;
    let (a0, phi0) = match input.initial.take() {
        Some(snap) => {
            let (l, a, phi) = snap.into_fields()?;
            if l != lattice {
                return Err(Failure::Domain("initial fields live on a different lattice".into()));
            }
            if a.degree != input.degree || phi.weights != input.weights {
                return Err(Failure::Domain("initial fields disagree with degree or weights".into()));
            }
            (a, phi)
        }
        None => solver::initial_fields(input.degree, input.weights.clone(), &central, &lattice, input.solver.seed)?,
    };
    let (a, phi, report) = solver::solve(&a0, &phi0, &central, &lattice, &input.solver)?;
    let csv = report.trace_csv();
    let out = SolveOutput {
        report,
        fields: input.save_fields.then(|| FieldSnapshot::from_fields(&lattice, &a, &phi)),
    };
    emit(name, opts, &text, input.solver.seed, &out, Some(csv))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexOutput {
    pub index: i64,
    pub oracle: i64,
    pub agree: bool,
    pub weight_data: WeightData,
}

pub fn index(name: &str, opts: &Options) -> Result<(), Failure> {
    let text = read_input(opts)?;
    let value: Value = parse(&text)?;
    let invalid = |e: serde_json::Error| Failure::Domain(format!("invalid input: {e}"));
    let (data, bundle) = if value.get("summands").is_some() {
        let b: SplitBundle = serde_json::from_value(value).map_err(invalid)?;
        (b.weight_data()?, b)
    } else {
        let w: WeightData = serde_json::from_value(value).map_err(invalid)?;
        (w, index::realize(&w)?)
    };
    let closed = index::index(&data)?;
    let oracle = index::index_oracle(&bundle)?;
    let out = IndexOutput { index: closed, oracle, agree: closed == oracle, weight_data: data };
    emit(name, opts, &text, opts.seed.unwrap_or(0), &out, None)?;
    if out.agree {
        Ok(())
    } else {
        Err(Failure::Domain(format!("closed form {closed} disagrees with oracle {oracle}")))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StabilityInput {
    spec: FiltrationSpec,
    #[serde(default)]
    candidates: Vec<SubsheafCandidate>,
    /// Curvature term of the Bogomolov-type inequality; 0 on a curve.
    ch2: Option<Q>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityOutput {
    pub verdict: StabilityVerdict,
    #[serde(with = "rational::single")]
    pub bogomolov: Rational64,
}

pub fn stability(name: &str, opts: &Options) -> Result<(), Failure> {
    let text = read_input(opts)?;
    let input: StabilityInput = parse(&text)?;
    let verdict = stability::is_stable(&input.spec, &input.candidates)?;
    let ch2 = input.ch2.map(|q| q.0).unwrap_or_default();
    let bogomolov = stability::bogomolov_filtration(&input.spec, ch2)?;
    emit(name, opts, &text, opts.seed.unwrap_or(0), &StabilityOutput { verdict, bogomolov }, None)
}

/// A coordinate given as a real number or as `[re, im]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
enum Coord {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Coord> for Complex64 {
    fn from(c: Coord) -> Self {
        match c {
            Coord::Real(x) => Complex64::new(x, 0.0),
            Coord::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
enum WeightsInput {
    Linear {
        coords: Vec<Coord>,
        weights: Vec<Q>,
    },
    Projective {
        coords: Vec<Coord>,
        weights: Vec<Q>,
        /// Times at which to report `λ_t`.
        #[serde(default)]
        t: Vec<f64>,
        /// Scale `σ` for the integral of the moment map along `exp(σ s)`.
        psi_scale: Option<f64>,
        /// Level for the Kempf-Ness finder.
        c_offset: Option<f64>,
    },
    Grassmann(GrassData),
    S2 {
        point: [Coord; 2],
        direction: Direction,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsOutput {
    pub value: MaxWeight,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_t_curve: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiValues>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kempf_ness: Option<KempfNess>,
    /// Why the Kempf-Ness finder refused, when it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unstable: Option<String>,
}

fn point(coords: Vec<Coord>, weights: Vec<Q>, mode: Mode) -> Result<WeightedPoint, Failure> {
    Ok(WeightedPoint::new(
        coords.into_iter().map(Complex64::from).collect(),
        weights.into_iter().map(|q| q.0).collect(),
        mode,
    )?)
}

pub fn weights(name: &str, opts: &Options) -> Result<(), Failure> {
    let text = read_input(opts)?;
    let input: WeightsInput = parse(&text)?;
    let mut out = WeightsOutput { value: MaxWeight::Infinite, lambda_t_curve: None, psi: None, kempf_ness: None, unstable: None };
    match input {
        WeightsInput::Linear { coords, weights: w } => {
            out.value = weights::max_weight_linear(&point(coords, w, Mode::Linear)?)?;
        }
        WeightsInput::Projective { coords, weights: w, t, psi_scale, c_offset } => {
            let p = point(coords, w, Mode::Projective)?;
            out.value = weights::max_weight_projective(&p)?;
            if !t.is_empty() {
                let curve = t
                    .iter()
                    .map(|&s| Ok([s, weights::lambda_t_projective(&p, s)?]))
                    .collect::<Result<Vec<_>, vortexlab::Error>>()?;
                out.lambda_t_curve = Some(curve);
            }
            if let Some(s) = psi_scale {
                out.psi = Some(weights::psi_projective(&p, s)?);
            }
            if let Some(c) = c_offset {
                match weights::kempf_ness_find_zero(&p, c) {
                    Ok(k) => out.kempf_ness = Some(k),
                    Err(vortexlab::Error::Unstable(msg)) => out.unstable = Some(msg),
                    Err(e) => return Err(e.into()),
                }
            }
        }
        WeightsInput::Grassmann(g) => {
            out.value = MaxWeight::Finite(weights::max_weight_grassmann(&g)?);
        }
        WeightsInput::S2 { point: [x, y], direction } => {
            let v = weights::max_weight_s2(x.into(), y.into(), direction)?;
            out.value = MaxWeight::Finite(Rational64::from_integer(v));
        }
    }
    emit(name, opts, &text, opts.seed.unwrap_or(0), &out, None)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRow {
    pub deg_e: i64,
    #[serde(with = "rational::single")]
    pub vol: Rational64,
    #[serde(with = "rational::single")]
    pub c_pairing: Rational64,
    pub inside: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct S2Output {
    pub p: i64,
    pub q: i64,
    pub dimension: i64,
    pub invariant: i64,
    pub window_examples: Vec<WindowRow>,
}

pub fn example_s2(name: &str, opts: &Options, p: Option<i64>, q: Option<i64>) -> Result<(), Failure> {
    let (b, text) = match (p, q, &opts.json) {
        (Some(p), Some(q), None) => (ClassB::new(p, q), format!("{{\"p\":{p},\"q\":{q}}}")),
        (None, None, Some(_)) => {
            let text = read_input(opts)?;
            (parse::<ClassB>(&text)?, text)
        }
        _ => return Err(Failure::Usage("give either both --p and --q, or --json {\"p\":…,\"q\":…}".into())),
    };
    let dimension = s2::moduli_dimension(b)?;
    let invariant = s2::invariant_phibar(b)?;
    let deg = b.bundle_degree();
    let vol = Rational64::from_integer(1);
    let window_examples = [(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1)]
        .iter()
        .map(|&(n, d)| {
            let c = Rational64::from_integer(deg) + Rational64::new(n, d);
            Ok(WindowRow { deg_e: deg, vol, c_pairing: c, inside: stability::s2_pair_window(deg, vol, c)? })
        })
        .collect::<Result<Vec<_>, vortexlab::Error>>()?;
    let out = S2Output { p: b.p, q: b.q, dimension, invariant, window_examples };
    emit(name, opts, &text, opts.seed.unwrap_or(0), &out, None)
}

pub fn verify(name: &str, opts: &Options, only: &[u8]) -> Result<(), Failure> {
    let ids: Vec<u8> = if only.is_empty() { (1..=13).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=13).contains(&i)) {
        return Err(Failure::Usage(format!("no criterion {bad}; criteria are numbered 1 to 13")));
    }
    let mut outcomes = Vec::new();
    for id in ids {
        let o = acceptance::run(id);
        println!("{}", o.line());
        outcomes.push(o);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if opts.out.is_some() {
        emit(name, opts, "", opts.seed.unwrap_or(0), &outcomes, None)?;
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Domain(format!("{failed} criteria failed")))
    }
}
