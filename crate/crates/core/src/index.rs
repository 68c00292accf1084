//! Equivariant indices `dim H⁰(E)^Γ − dim H¹(E)^Γ` of holomorphic bundles on
//! `CP¹` for `Γ = S¹` and `Γ = Z/m` acting by rotation about `x_±`.
//!
//! `WeightData` only records how many fibre weights at each pole are
//! positive, zero or negative (for `Z/m`: equal to `l`, `0`, `−l`). A
//! `SplitBundle` is an explicit sum of line bundles `O(λ_j)` with a diagonal
//! lift; its index is computed independently by listing the weights of the
//! cohomology: for an `S¹` lift with fibre weights `a_±` and `λ = a₊ − a₋`,
//! `H⁰(O(λ))` has weights `a₋, …, a₊` and `H¹(O(λ))` has weights
//! `a₊+1, …, a₋−1`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Circle,
    /// `Z/m` with fibre weights in `{−l, 0, l}`; `l` is stored reduced into
    /// `[1, m−1]`.
    Cyclic { m: i64, l: i64 },
}

impl Group {
    pub fn cyclic(m: i64, l: i64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!("m must be at least 2, got {m}")));
        }
        let l = l.mod_floor(&m);
        if l == 0 {
            return Err(Error::InvalidInput(format!("l must not be divisible by m = {m}")));
        }
        Ok(Group::Cyclic { m, l })
    }
}

/// Counts of fibre weights at the two fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WeightDataJson", into = "WeightDataJson")]
pub struct WeightData {
    pub group: Group,
    pub rank: i64,
    pub deg: i64,
    pub p_plus: i64,
    pub z_plus: i64,
    pub n_plus: i64,
    pub p_minus: i64,
    pub z_minus: i64,
    pub n_minus: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDataJson {
    group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<i64>,
    rank: i64,
    deg: i64,
    #[serde(rename = "Pp", default)]
    p_plus: i64,
    #[serde(rename = "Zp", default)]
    z_plus: i64,
    #[serde(rename = "Np", default)]
    n_plus: i64,
    #[serde(rename = "Pm", default)]
    p_minus: i64,
    #[serde(rename = "Zm", default)]
    z_minus: i64,
    #[serde(rename = "Nm", default)]
    n_minus: i64,
}

fn parse_group(name: &str, m: Option<i64>, l: Option<i64>) -> Result<Group> {
    match name {
        "circle" => Ok(Group::Circle),
        "cyclic" => Group::cyclic(
            m.ok_or_else(|| Error::InvalidInput("cyclic group needs field \"m\"".into()))?,
            l.ok_or_else(|| Error::InvalidInput("cyclic group needs field \"l\"".into()))?,
        ),
        other => Err(Error::InvalidInput(format!(
            "unknown group {other:?}, expected \"circle\" or \"cyclic\""
        ))),
    }
}

fn group_fields(g: Group) -> (String, Option<i64>, Option<i64>) {
    match g {
        Group::Circle => ("circle".into(), None, None),
        Group::Cyclic { m, l } => ("cyclic".into(), Some(m), Some(l)),
    }
}

impl TryFrom<WeightDataJson> for WeightData {
    type Error = Error;
    fn try_from(j: WeightDataJson) -> Result<Self> {
        WeightData::new(
            parse_group(&j.group, j.m, j.l)?,
            j.rank,
            j.deg,
            [j.p_plus, j.z_plus, j.n_plus],
            [j.p_minus, j.z_minus, j.n_minus],
        )
    }
}

impl From<WeightData> for WeightDataJson {
    fn from(w: WeightData) -> Self {
        let (group, m, l) = group_fields(w.group);
        Self {
            group,
            m,
            l,
            rank: w.rank,
            deg: w.deg,
            p_plus: w.p_plus,
            z_plus: w.z_plus,
            n_plus: w.n_plus,
            p_minus: w.p_minus,
            z_minus: w.z_minus,
            n_minus: w.n_minus,
        }
    }
}

impl WeightData {
    /// `plus = [P₊, Z₊, N₊]`, `minus = [P₋, Z₋, N₋]`.
    pub fn new(group: Group, rank: i64, deg: i64, plus: [i64; 3], minus: [i64; 3]) -> Result<Self> {
        let w = Self {
            group,
            rank,
            deg,
            p_plus: plus[0],
            z_plus: plus[1],
            n_plus: plus[2],
            p_minus: minus[0],
            z_minus: minus[1],
            n_minus: minus[2],
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if let Group::Cyclic { m, l } = self.group {
            if m < 2 || l < 1 || l >= m {
                return Err(Error::InvalidInput(format!("bad cyclic group m = {m}, l = {l}")));
            }
        }
        if self.rank < 1 {
            return Err(Error::InconsistentWeights(format!("rank must be positive, got {}", self.rank)));
        }
        let counts = [self.p_plus, self.z_plus, self.n_plus, self.p_minus, self.z_minus, self.n_minus];
        if counts.iter().any(|&c| c < 0) {
            return Err(Error::InconsistentWeights("weight counts must be nonnegative".into()));
        }
        if self.p_plus + self.z_plus + self.n_plus != self.rank
            || self.p_minus + self.z_minus + self.n_minus != self.rank
        {
            return Err(Error::InconsistentWeights(format!(
                "weight counts at each pole must add up to the rank {}",
                self.rank
            )));
        }
        if self.group == Group::Circle && self.deg != self.degree_from_weights() {
            return Err(Error::InconsistentWeights(format!(
                "degree {} differs from P+ + N- - P- - N+ = {}",
                self.deg,
                self.degree_from_weights()
            )));
        }
        Ok(())
    }

    /// `P₊ + N₋ − P₋ − N₊`
    pub fn degree_from_weights(&self) -> i64 {
        self.p_plus + self.n_minus - self.p_minus - self.n_plus
    }

    /// `P₊ + N₊ + P₋ + N₋`
    pub fn moving_weights(&self) -> i64 {
        self.p_plus + self.n_plus + self.p_minus + self.n_minus
    }
}

/// `(P₊+Z₊) + (N₋+Z₋) − rk E`
pub fn index_s1(w: &WeightData) -> Result<i64> {
    w.validate()?;
    if w.group != Group::Circle {
        return Err(Error::InvalidInput("index_s1 needs circle weight data".into()));
    }
    Ok((w.p_plus + w.z_plus) + (w.n_minus + w.z_minus) - w.rank)
}

/// `m·Ind` as an exact numerator over `m`.
fn cyclic_numerator(w: &WeightData, m: i64, l: i64) -> i64 {
    w.deg + m * w.rank - m * (w.p_minus + w.n_plus)
        + l * (w.p_minus + w.n_plus - w.p_plus - w.n_minus)
}

/// `(deg E + m·rk E − m(P₋+N₊) + l'(P₋+N₊−P₊−N₋)) / m`; errors when the
/// value is not an integer, which happens exactly when no bundle realises
/// the data.
pub fn index_cyclic(w: &WeightData) -> Result<i64> {
    w.validate()?;
    let Group::Cyclic { m, l } = w.group else {
        return Err(Error::InvalidInput("index_cyclic needs cyclic weight data".into()));
    };
    let value = Rational64::new(cyclic_numerator(w, m, l), m);
    if !value.is_integer() {
        return Err(Error::InconsistentWeights(format!(
            "index evaluates to {}/{}, data cannot come from a bundle",
            value.numer(),
            value.denom()
        )));
    }
    Ok(value.to_integer())
}

/// Closed-form index for either group.
pub fn index(w: &WeightData) -> Result<i64> {
    match w.group {
        Group::Circle => index_s1(w),
        Group::Cyclic { .. } => index_cyclic(w),
    }
}

/// Line bundle `O(degree)` with fibre weights `plus` at `x₊` and `minus` at
/// `x₋`. For cyclic groups the weights are taken modulo `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub degree: i64,
    pub plus: i64,
    pub minus: i64,
}

impl Summand {
    /// Circle lift of `O(degree)` from its Δ-weight `w`, so that
    /// `2a_± = w ± degree`.
    pub fn from_delta(degree: i64, w: i64) -> Result<Self> {
        if (w - degree).rem_euclid(2) != 0 {
            return Err(Error::InconsistentWeights(format!(
                "Δ-weight {w} and degree {degree} have different parity"
            )));
        }
        Ok(Self { degree, plus: (w + degree) / 2, minus: (w - degree) / 2 })
    }

    pub fn delta_weight(&self) -> i64 {
        self.plus + self.minus
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SplitBundleJson", into = "SplitBundleJson")]
pub struct SplitBundle {
    pub group: Group,
    pub summands: Vec<Summand>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitBundleJson {
    group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<i64>,
    summands: Vec<Summand>,
}

impl TryFrom<SplitBundleJson> for SplitBundle {
    type Error = Error;
    fn try_from(j: SplitBundleJson) -> Result<Self> {
        SplitBundle::new(parse_group(&j.group, j.m, j.l)?, j.summands)
    }
}

impl From<SplitBundle> for SplitBundleJson {
    fn from(b: SplitBundle) -> Self {
        let (group, m, l) = group_fields(b.group);
        Self { group, m, l, summands: b.summands }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    P,
    Z,
    N,
}

fn classify(group: Group, weight: i64) -> Result<Class> {
    match group {
        Group::Circle => match weight {
            1 => Ok(Class::P),
            0 => Ok(Class::Z),
            -1 => Ok(Class::N),
            _ => Err(Error::InconsistentWeights(format!("circle weight {weight} is not in {{-1, 0, 1}}"))),
        },
        Group::Cyclic { m, l } => {
            let r = weight.mod_floor(&m);
            if r == 0 {
                Ok(Class::Z)
            } else if r == l {
                Ok(Class::P)
            } else if r == (m - l) {
                Ok(Class::N)
            } else {
                Err(Error::InconsistentWeights(format!(
                    "weight {weight} is not in {{-{l}, 0, {l}}} mod {m}"
                )))
            }
        }
    }
}

impl SplitBundle {
    pub fn new(group: Group, summands: Vec<Summand>) -> Result<Self> {
        let b = Self { group, summands };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.summands.is_empty() {
            return Err(Error::InvalidInput("bundle has no summands".into()));
        }
        for s in &self.summands {
            match self.group {
                Group::Circle => {
                    if s.plus - s.minus != s.degree {
                        return Err(Error::InconsistentWeights(format!(
                            "circle lift of O({}) needs a+ - a- = {}, got {} - {}",
                            s.degree, s.degree, s.plus, s.minus
                        )));
                    }
                }
                Group::Cyclic { m, .. } => {
                    classify(self.group, s.plus)?;
                    classify(self.group, s.minus)?;
                    if (s.plus - s.minus - s.degree).mod_floor(&m) != 0 {
                        return Err(Error::InconsistentWeights(format!(
                            "Z/{m} lift of O({}) needs a+ - a- = {} mod {m}",
                            s.degree, s.degree
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> i64 {
        self.summands.len() as i64
    }

    pub fn degree(&self) -> i64 {
        self.summands.iter().map(|s| s.degree).sum()
    }

    /// Weight counts; circle weights must lie in `{−1, 0, 1}`.
    pub fn weight_data(&self) -> Result<WeightData> {
        self.validate()?;
        let mut plus = [0i64; 3];
        let mut minus = [0i64; 3];
        let slot = |c: Class| match c {
            Class::P => 0,
            Class::Z => 1,
            Class::N => 2,
        };
        for s in &self.summands {
            plus[slot(classify(self.group, s.plus)?)] += 1;
            minus[slot(classify(self.group, s.minus)?)] += 1;
        }
        WeightData::new(self.group, self.rank(), self.degree(), plus, minus)
    }
}

/// Weights of `S¹` on `H⁰(O(λ))` and `H¹(O(λ))` for the lift with fibre
/// weights `a₊` and `a₋ = a₊ − λ`.
pub fn cohomology_weights(degree: i64, plus: i64) -> (Vec<i64>, Vec<i64>) {
    let minus = plus - degree;
    let h0 = if degree >= 0 { (minus..=plus).collect() } else { Vec::new() };
    let h1 = if degree <= -2 { (plus + 1..minus).collect() } else { Vec::new() };
    (h0, h1)
}

/// Index by listing cohomology weights: the number of invariant weights in
/// `H⁰` minus those in `H¹`, via the character average over the group in
/// the cyclic case.
pub fn index_oracle(b: &SplitBundle) -> Result<i64> {
    b.validate()?;
    match b.group {
        Group::Circle => Ok(b
            .summands
            .iter()
            .map(|s| {
                let (h0, h1) = cohomology_weights(s.degree, s.plus);
                h0.iter().filter(|&&w| w == 0).count() as i64
                    - h1.iter().filter(|&&w| w == 0).count() as i64
            })
            .sum()),
        Group::Cyclic { m, .. } => {
            let theta = |w: i64, k: i64| Complex64::from_polar(1.0, TAU * ((w * k).mod_floor(&m)) as f64 / m as f64);
            let mut total = Complex64::new(0.0, 0.0);
            for s in &b.summands {
                let (h0, h1) = cohomology_weights(s.degree, s.plus);
                for k in 0..m {
                    for &w in &h0 {
                        total += theta(w, k);
                    }
                    for &w in &h1 {
                        total -= theta(w, k);
                    }
                }
            }
            let avg = total / m as f64;
            let rounded = avg.re.round();
            let residual = (avg - Complex64::new(rounded, 0.0)).norm();
            if residual >= 1e-9 {
                return Err(Error::InconsistentWeights(format!(
                    "character average {avg} is not an integer (residual {residual:e})"
                )));
            }
            Ok(rounded as i64)
        }
    }
}

/// A split bundle realising the weight data, or an error when none exists.
pub fn realize(w: &WeightData) -> Result<SplitBundle> {
    w.validate()?;
    let (pw, nw) = match w.group {
        Group::Circle => (1, -1),
        Group::Cyclic { l, .. } => (l, -l),
    };
    let expand = |p: i64, z: i64, n: i64| -> Vec<i64> {
        std::iter::repeat_n(pw, p as usize)
            .chain(std::iter::repeat_n(0, z as usize))
            .chain(std::iter::repeat_n(nw, n as usize))
            .collect()
    };
    let plus = expand(w.p_plus, w.z_plus, w.n_plus);
    let minus = expand(w.p_minus, w.z_minus, w.n_minus);
    let mut summands: Vec<Summand> = plus
        .iter()
        .zip(&minus)
        .map(|(&a, &b)| Summand { degree: a - b, plus: a, minus: b })
        .collect();
    let gap = w.deg - summands.iter().map(|s| s.degree).sum::<i64>();
    match w.group {
        Group::Circle => {}
        Group::Cyclic { m, .. } => {
            if gap.mod_floor(&m) != 0 {
                return Err(Error::InconsistentWeights(format!(
                    "degree {} is not congruent to the fibre weights modulo {m}",
                    w.deg
                )));
            }
            // shift the lift on one summand by a multiple of m
            summands[0].degree += gap;
            summands[0].minus -= gap;
        }
    }
    SplitBundle::new(w.group, summands)
}

/// `Σ_{k=1}^{m−1} 1/(1−θ^k)` and `Σ_{k=1}^{m−1} θ^{wk}/(1−θ^k)`, `θ = e^{2πi/m}`.
pub fn roots_of_unity_sums(m: i64, w: i64) -> Result<(Complex64, Complex64)> {
    if m < 2 || w < 1 || w > m - 1 {
        return Err(Error::InvalidInput(format!("need m >= 2 and 1 <= w <= m-1, got m = {m}, w = {w}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for k in 1..m {
        let t = Complex64::from_polar(1.0, TAU * k as f64 / m as f64);
        let tw = Complex64::from_polar(1.0, TAU * ((w * k) % m) as f64 / m as f64);
        first += one / (one - t);
        second += tw / (one - t);
    }
    Ok((first, second))
}

/// `⟨c₁^K(TF) − c₁^K(𝔤), B⟩ + (n − dim K)(1 − g)`
pub fn virtual_dimension(c1_pairing: i64, n: i64, g: i64, dim_k: i64, c1_g_pairing: i64) -> i64 {
    c1_pairing - c1_g_pairing + (n - dim_k) * (1 - g)
}

/// Whether the invariant index is at least two below the full index
/// `deg E + rk E`. Requires `deg E ≥ 1` and `P₊+N₊+P₋+N₋ ≥ 2`.
pub fn bubble_codim_check(w: &WeightData) -> Result<bool> {
    w.validate()?;
    if w.deg < 1 {
        return Err(Error::Precondition(format!("degree must be at least 1, got {}", w.deg)));
    }
    if w.moving_weights() < 2 {
        return Err(Error::Precondition(format!(
            "need P+ + N+ + P- + N- >= 2, got {}",
            w.moving_weights()
        )));
    }
    Ok(match w.group {
        Group::Circle => index_s1(w)? <= w.deg + w.rank - 2,
        Group::Cyclic { m, l } => {
            // m·Ind_γ ≤ m(deg + rk) − (m + 1), which rearranges to this
            m < (m - 1) * w.deg + (m - l) * (w.p_minus + w.n_plus) + l * (w.p_plus + w.n_minus)
        }
    })
}

/// Summand types with `|λ| ≤ max_degree` and fibre weights in `{−l, 0, l}`
/// (`l = 1` for the circle).
pub fn summand_types(group: Group, max_degree: i64) -> Vec<Summand> {
    let mut out = Vec::new();
    match group {
        Group::Circle => {
            for plus in -1i64..=1 {
                for minus in -1..=1 {
                    if (plus - minus).abs() <= max_degree {
                        out.push(Summand { degree: plus - minus, plus, minus });
                    }
                }
            }
        }
        Group::Cyclic { m, l } => {
            let mut reps = vec![0, l, m - l];
            reps.sort_unstable();
            reps.dedup();
            for &plus in &reps {
                for &minus in &reps {
                    for degree in -max_degree..=max_degree {
                        if (plus - minus - degree).mod_floor(&m) == 0 {
                            out.push(Summand { degree, plus, minus });
                        }
                    }
                }
            }
        }
    }
    out
}

fn multisets(n_types: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for t in start..n {
            cur.push(t);
            rec(t, n, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, n_types, size, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub cases: usize,
    pub circle_cases: usize,
    pub cyclic_cases: usize,
    pub index_mismatches: usize,
    pub degree_mismatches: usize,
    pub errors: usize,
    /// First few disagreements, for diagnostics.
    pub examples: Vec<String>,
}

impl SweepReport {
    fn merge(mut self, other: SweepReport) -> SweepReport {
        self.cases += other.cases;
        self.circle_cases += other.circle_cases;
        self.cyclic_cases += other.cyclic_cases;
        self.index_mismatches += other.index_mismatches;
        self.degree_mismatches += other.degree_mismatches;
        self.errors += other.errors;
        self.examples.extend(other.examples);
        self.examples.truncate(5);
        self
    }

    pub fn clean(&self) -> bool {
        self.index_mismatches == 0 && self.degree_mismatches == 0 && self.errors == 0
    }
}

fn check_bundle(b: &SplitBundle) -> SweepReport {
    let mut r = SweepReport { cases: 1, ..Default::default() };
    match b.group {
        Group::Circle => r.circle_cases = 1,
        Group::Cyclic { .. } => r.cyclic_cases = 1,
    }
    let outcome = b.weight_data().and_then(|w| Ok((w, index(&w)?, index_oracle(b)?)));
    match outcome {
        Ok((w, closed, oracle)) => {
            if closed != oracle {
                r.index_mismatches = 1;
                r.examples.push(format!("{b:?}: closed form {closed}, oracle {oracle}"));
            }
            if b.group == Group::Circle && w.degree_from_weights() != b.degree() {
                r.degree_mismatches = 1;
                r.examples.push(format!("{b:?}: degree identity fails"));
            }
        }
        Err(e) => {
            r.errors = 1;
            r.examples.push(format!("{b:?}: {e}"));
        }
    }
    r
}

/// Sweep parameters for the closed-form versus oracle comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub max_degree: i64,
    pub moduli: Vec<i64>,
    /// Ranks enumerated exhaustively.
    pub exhaustive_rank: usize,
    pub max_rank: usize,
    /// Random bundles per (group, rank) above `exhaustive_rank`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            max_degree: 6,
            moduli: (2..=7).collect(),
            exhaustive_rank: 3,
            max_rank: 5,
            samples: 2000,
            seed: 7,
        }
    }
}

fn groups(cfg: &SweepConfig) -> Vec<Group> {
    let mut gs = vec![Group::Circle];
    for &m in &cfg.moduli {
        for l in 1..m {
            gs.push(Group::Cyclic { m, l });
        }
    }
    gs
}

/// Compare closed forms with the oracle over every split bundle built from
/// the summand types up to `exhaustive_rank`, plus random bundles up to
/// `max_rank` whose total degree stays within `max_degree`.
pub fn oracle_sweep(cfg: &SweepConfig) -> SweepReport {
    let jobs: Vec<(Group, usize)> = groups(cfg)
        .into_iter()
        .flat_map(|g| (1..=cfg.max_rank).map(move |r| (g, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(g, rank)| {
            let types = summand_types(g, cfg.max_degree);
            if rank <= cfg.exhaustive_rank {
                multisets(types.len(), rank)
                    .into_iter()
                    .map(|idx| {
                        let b = SplitBundle { group: g, summands: idx.iter().map(|&i| types[i]).collect() };
                        check_bundle(&b)
                    })
                    .fold(SweepReport::default(), SweepReport::merge)
            } else {
                let seed = cfg.seed ^ (rank as u64) << 32 ^ group_key(g);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut acc = SweepReport::default();
                for _ in 0..cfg.samples {
                    let b = SplitBundle {
                        group: g,
                        summands: (0..rank).map(|_| types[rng.gen_range(0..types.len())]).collect(),
                    };
                    acc = acc.merge(check_bundle(&b));
                }
                acc
            }
        })
        .reduce(SweepReport::default, SweepReport::merge)
}

fn group_key(g: Group) -> u64 {
    match g {
        Group::Circle => 0,
        Group::Cyclic { m, l } => (m as u64) << 8 | l as u64,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimReport {
    pub cases: usize,
    pub rejected: usize,
    pub counterexamples: Vec<WeightData>,
}

/// Draw random weight data, keep what satisfies the preconditions (and, for
/// cyclic groups, comes from a bundle), and test the codimension bound.
pub fn codim_fuzz(cases: usize, max_rank: i64, moduli: &[i64], seed: u64) -> CodimReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gs = vec![Group::Circle];
    for &m in moduli {
        for l in 1..m {
            gs.push(Group::Cyclic { m, l });
        }
    }
    let mut report = CodimReport::default();
    let split = |rng: &mut ChaCha8Rng, rank: i64| {
        let p = rng.gen_range(0..=rank);
        let z = rng.gen_range(0..=rank - p);
        [p, z, rank - p - z]
    };
    while report.cases < cases {
        let g = gs[rng.gen_range(0..gs.len())];
        let rank = rng.gen_range(1..=max_rank);
        let plus = split(&mut rng, rank);
        let minus = split(&mut rng, rank);
        let deg = match g {
            Group::Circle => plus[0] + minus[2] - minus[0] - plus[2],
            Group::Cyclic { .. } => rng.gen_range(1..=12),
        };
        let Ok(w) = WeightData::new(g, rank, deg, plus, minus) else {
            report.rejected += 1;
            continue;
        };
        if w.deg < 1 || w.moving_weights() < 2 || index(&w).is_err() {
            report.rejected += 1;
            continue;
        }
        report.cases += 1;
        match bubble_codim_check(&w) {
            Ok(true) => {}
            _ => report.counterexamples.push(w),
        }
    }
    report
}
