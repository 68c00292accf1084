//! Maximal weights, the one-parameter moment curve `λ_t`, the integral of the
//! moment map along a ray, and a scalar Kempf–Ness zero finder.
//!
//! A diagonal one-parameter subgroup is given by the eigenvalues `λ_k` of
//! `iρ(s)`; the complexified flow `exp(t·s)` scales coordinate `k` by
//! `e^{t λ_k}`. The pairing `⟨μ(x), s⟩` on projective space is the
//! `|x_k|²`-weighted mean of the `λ_k`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Projective,
}

/// A point of `C^r` (linear mode) or a lift of a point of `P^{r-1}`
/// (projective mode) together with the weights of a diagonal circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub coords: Vec<Complex64>,
    #[serde(with = "rational::list")]
    pub weights: Vec<Rational64>,
    pub mode: Mode,
}

impl WeightedPoint {
    pub fn new(coords: Vec<Complex64>, weights: Vec<Rational64>, mode: Mode) -> Result<Self> {
        let p = Self { coords, weights, mode };
        p.check()?;
        Ok(p)
    }

    /// Integer weights and real coordinates, for brevity in examples.
    pub fn from_ints(coords: &[f64], weights: &[i64], mode: Mode) -> Result<Self> {
        Self::new(
            coords.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            weights.iter().map(|&w| Rational64::from_integer(w)).collect(),
            mode,
        )
    }

    pub fn check(&self) -> Result<()> {
        if self.coords.len() != self.weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for {} weights",
                self.coords.len(),
                self.weights.len()
            )));
        }
        if self.coords.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("coordinate".into()));
        }
        if self.mode == Mode::Projective && self.norm() == 0.0 {
            return Err(Error::InvalidInput("projective point has zero lift".into()));
        }
        Ok(())
    }

    fn norm(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Indices `k` with `|x_k| > 1e-12·‖x‖`.
    pub fn support(&self) -> Vec<usize> {
        let cut = 1e-12 * self.norm();
        (0..self.coords.len())
            .filter(|&k| self.coords[k].norm() > cut)
            .collect()
    }

    /// Same point, weights multiplied by `factor` (the direction `factor·s`).
    pub fn scaled(&self, factor: Rational64) -> Self {
        Self {
            coords: self.coords.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
            mode: self.mode,
        }
    }
}

/// `λ(x; s) ∈ Q ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxWeight {
    Finite(Rational64),
    Infinite,
}

impl MaxWeight {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            MaxWeight::Finite(v) => Some(v),
            MaxWeight::Infinite => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            MaxWeight::Finite(v) => q_to_f64(v),
            MaxWeight::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for MaxWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxWeight::Finite(v) => f.write_str(&rational::format(v)),
            MaxWeight::Infinite => f.write_str("infinity"),
        }
    }
}

impl Serialize for MaxWeight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MaxWeight::Finite(v) => rational::Q(*v).serialize(s),
            MaxWeight::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for MaxWeight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        if v.as_str() == Some("infinity") {
            return Ok(MaxWeight::Infinite);
        }
        rational::Q::deserialize(v)
            .map(|q| MaxWeight::Finite(q.0))
            .map_err(serde::de::Error::custom)
    }
}

pub(crate) fn q_to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn require(p: &WeightedPoint, mode: Mode) -> Result<()> {
    p.check()?;
    if p.mode != mode {
        return Err(Error::InvalidInput(format!("expected a {mode:?} point, got {:?}", p.mode)));
    }
    Ok(())
}

/// Linear target: `0` when every active weight is `≤ 0`, otherwise `∞`.
pub fn max_weight_linear(p: &WeightedPoint) -> Result<MaxWeight> {
    require(p, Mode::Linear)?;
    if p.support().iter().all(|&k| p.weights[k] <= Rational64::zero()) {
        Ok(MaxWeight::Finite(Rational64::zero()))
    } else {
        Ok(MaxWeight::Infinite)
    }
}

/// Projective target: the largest active weight.
pub fn max_weight_projective(p: &WeightedPoint) -> Result<MaxWeight> {
    require(p, Mode::Projective)?;
    let best = p
        .support()
        .into_iter()
        .map(|k| p.weights[k])
        .max()
        .ok_or_else(|| Error::InvalidInput("projective point has zero lift".into()))?;
    Ok(MaxWeight::Finite(best))
}

/// `λ_t(x; s) = Σ λ_k e^{2tλ_k}|x_k|² / Σ e^{2tλ_k}|x_k|²`.
pub fn lambda_t_projective(p: &WeightedPoint, t: f64) -> Result<f64> {
    require(p, Mode::Projective)?;
    Ok(lambda_t_unchecked(p, t))
}

fn lambda_t_unchecked(p: &WeightedPoint, t: f64) -> f64 {
    let (mean, _) = weighted_moments(p, t);
    mean
}

/// Mean and variance of the weights under `e^{2tλ_k}|x_k|²`.
fn weighted_moments(p: &WeightedPoint, t: f64) -> (f64, f64) {
    let terms: Vec<(f64, f64)> = p
        .coords
        .iter()
        .zip(&p.weights)
        .filter(|(z, _)| z.norm_sqr() > 0.0)
        .map(|(z, w)| {
            let w = q_to_f64(*w);
            (w, 2.0 * t * w + z.norm_sqr().ln())
        })
        .collect();
    let top = terms.iter().map(|&(_, e)| e).fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    let mut first = 0.0;
    for &(w, e) in &terms {
        let m = (e - top).exp();
        z += m;
        first += w * m;
    }
    let mean = first / z;
    let var = terms
        .iter()
        .map(|&(w, e)| (w - mean) * (w - mean) * (e - top).exp())
        .sum::<f64>()
        / z;
    (mean, var)
}

/// `⟨μ(x), s⟩` for a projective point.
pub fn moment_pairing(p: &WeightedPoint) -> Result<f64> {
    lambda_t_projective(p, 0.0)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫_a^b f` with the 64-point Gauss–Legendre rule.
pub fn integrate64<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    thread_local! {
        static RULE: (Vec<f64>, Vec<f64>) = gauss_legendre(64);
    }
    RULE.with(|(x, w)| {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>()
    })
}

/// Both evaluations of the integral of the moment map along `exp(σ s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiValues {
    /// `¼·log(‖e^{σλ} x̂‖² / ‖x̂‖²)`
    pub closed_form: f64,
    /// `∫₀¹ λ_t(x; σ s) dt`
    pub quadrature: f64,
}

pub fn psi_projective(p: &WeightedPoint, s_scale: f64) -> Result<PsiValues> {
    require(p, Mode::Projective)?;
    if !s_scale.is_finite() {
        return Err(Error::NonFinite("s_scale".into()));
    }
    Ok(PsiValues {
        closed_form: 0.25 * log_norm_ratio(p, s_scale),
        quadrature: integrate64(0.0, 1.0, |t| s_scale * lambda_t_unchecked(p, s_scale * t)),
    })
}

/// `log(Σ e^{2σλ_k}|x_k|² / Σ|x_k|²)`, evaluated stably.
fn log_norm_ratio(p: &WeightedPoint, sigma: f64) -> f64 {
    let logs = |scale: f64| -> f64 {
        let e: Vec<f64> = p
            .coords
            .iter()
            .zip(&p.weights)
            .filter(|(z, _)| z.norm_sqr() > 0.0)
            .map(|(z, w)| 2.0 * scale * q_to_f64(*w) + z.norm_sqr().ln())
            .collect();
        let top = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top + e.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
    };
    logs(sigma) - logs(0.0)
}

/// `∫₀^t λ_u(x; s) du` by quadrature.
pub fn integrated_lambda(p: &WeightedPoint, t: f64) -> Result<f64> {
    require(p, Mode::Projective)?;
    Ok(integrate64(0.0, t, |u| lambda_t_unchecked(p, u)))
}

/// Eigenvalue and cumulative subspace of a filtration step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenFlag {
    #[serde(with = "rational::single")]
    pub eigenvalue: Rational64,
    /// Basis vectors of `E_j`, each of length `ambient_dim`.
    pub basis: Vec<Vec<Complex64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    /// Exact elimination over `Q(i)`; every finite double is a dyadic rational.
    #[default]
    Exact,
    /// Singular values above `1e-9·σ_max`.
    Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrassData {
    pub ambient_dim: usize,
    /// Columns spanning the plane `π`, each of length `ambient_dim`.
    pub plane: Vec<Vec<Complex64>>,
    pub eigen_flags: Vec<EigenFlag>,
    #[serde(with = "rational::single")]
    pub tau: Rational64,
    #[serde(default)]
    pub rank_method: RankMethod,
}

fn exact_rank(cols: &[&Vec<Complex64>], dim: usize) -> Result<usize> {
    let to_q = |x: f64| {
        BigRational::from_float(x).ok_or_else(|| Error::NonFinite("matrix entry".into()))
    };
    let mut rows: Vec<Vec<Complex<BigRational>>> = Vec::with_capacity(cols.len());
    for c in cols {
        let mut row = Vec::with_capacity(dim);
        for z in c.iter() {
            row.push(Complex::new(to_q(z.re)?, to_q(z.im)?));
        }
        rows.push(row);
    }
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = Complex::<BigRational>::one() / rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() * inv.clone();
            for k in col..dim {
                let sub = factor.clone() * rows[rank][k].clone();
                rows[r][k] = rows[r][k].clone() - sub;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(rank)
}

fn threshold_rank(cols: &[&Vec<Complex64>], dim: usize) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(dim, cols.len(), |i, j| cols[j][i]);
    let sv = m.svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

impl GrassData {
    fn rank(&self, cols: &[&Vec<Complex64>]) -> Result<usize> {
        match self.rank_method {
            RankMethod::Exact => exact_rank(cols, self.ambient_dim),
            RankMethod::Threshold => Ok(threshold_rank(cols, self.ambient_dim)),
        }
    }

    /// `dim(π ∩ E_j)` for each flag step.
    pub fn intersection_dims(&self) -> Result<Vec<usize>> {
        self.validate()?;
        let k = self.plane.len();
        self.eigen_flags
            .iter()
            .map(|flag| {
                let e: Vec<&Vec<Complex64>> = flag.basis.iter().collect();
                let both: Vec<&Vec<Complex64>> = self.plane.iter().chain(&flag.basis).collect();
                Ok(k + self.rank(&e)? - self.rank(&both)?)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.ambient_dim;
        if r == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        let bad_len = self
            .plane
            .iter()
            .chain(self.eigen_flags.iter().flat_map(|f| f.basis.iter()))
            .any(|v| v.len() != r);
        if bad_len {
            return Err(Error::ShapeMismatch(format!("vectors must have length {r}")));
        }
        if self.tau <= Rational64::zero() {
            return Err(Error::InvalidInput("tau must be positive".into()));
        }
        if self.eigen_flags.is_empty() {
            return Err(Error::InvalidInput("at least one eigenvalue is required".into()));
        }
        let plane: Vec<&Vec<Complex64>> = self.plane.iter().collect();
        if self.plane.is_empty() || self.rank(&plane)? != self.plane.len() {
            return Err(Error::InvalidInput("rank-deficient plane".into()));
        }
        if self.eigen_flags.windows(2).any(|w| w[0].eigenvalue >= w[1].eigenvalue) {
            return Err(Error::InvalidInput("eigenvalues must increase strictly".into()));
        }
        let mut prev_rank = 0;
        let mut prev: Vec<&Vec<Complex64>> = Vec::new();
        for flag in &self.eigen_flags {
            let cur: Vec<&Vec<Complex64>> = flag.basis.iter().collect();
            let rank = self.rank(&cur)?;
            let joint: Vec<&Vec<Complex64>> = prev.iter().copied().chain(cur.iter().copied()).collect();
            if rank <= prev_rank || self.rank(&joint)? != rank {
                return Err(Error::InvalidInput("flag subspaces must increase strictly".into()));
            }
            prev_rank = rank;
            prev = cur;
        }
        if prev_rank != r {
            return Err(Error::InvalidInput("last flag subspace must be the whole space".into()));
        }
        Ok(())
    }
}

/// `τ(dim π·λ_r + Σ_{j<r} dim(π∩E_j)·(λ_j − λ_{j+1}))`.
pub fn max_weight_grassmann(g: &GrassData) -> Result<Rational64> {
    let dims = g.intersection_dims()?;
    let flags = &g.eigen_flags;
    let last = flags[flags.len() - 1].eigenvalue;
    let mut total = Rational64::from_integer(g.plane.len() as i64) * last;
    for j in 0..flags.len() - 1 {
        let alpha = flags[j].eigenvalue - flags[j + 1].eigenvalue;
        total += Rational64::from_integer(dims[j] as i64) * alpha;
    }
    Ok(g.tau * total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

/// Maximal weight of `[x:y] ∈ CP¹ ≅ S²` for the rotation `[λx:y]`.
pub fn max_weight_s2(x: Complex64, y: Complex64, dir: Direction) -> Result<i64> {
    if x == Complex64::zero() && y == Complex64::zero() {
        return Err(Error::InvalidInput("[0:0] is not a point of CP^1".into()));
    }
    Ok(match dir {
        Direction::PlusI => {
            if y != Complex64::zero() {
                1
            } else {
                -1
            }
        }
        Direction::MinusI => {
            if x == Complex64::zero() {
                -1
            } else {
                1
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KempfNess {
    pub t_star: f64,
    /// `e^{t* λ} x̂`
    pub point: Vec<Complex64>,
    pub iterations: usize,
    /// `|⟨μ(point), s⟩ − c|`
    pub residual: f64,
}

/// Solve `⟨μ(e^{t s} x), s⟩ = c_offset` for `t`.
///
/// The orbit meets the level set iff the largest active weight exceeds
/// `c_offset` and the smallest lies below it; otherwise `Error::Unstable`.
pub fn kempf_ness_find_zero(p: &WeightedPoint, c_offset: f64) -> Result<KempfNess> {
    require(p, Mode::Projective)?;
    if !c_offset.is_finite() {
        return Err(Error::NonFinite("c_offset".into()));
    }
    let support = p.support();
    let hi = support.iter().map(|&k| q_to_f64(p.weights[k])).fold(f64::NEG_INFINITY, f64::max);
    let lo = support.iter().map(|&k| q_to_f64(p.weights[k])).fold(f64::INFINITY, f64::min);
    if !(hi - c_offset > 0.0) {
        return Err(Error::Unstable(format!(
            "maximal weight {hi} along s does not exceed {c_offset}"
        )));
    }
    if !(c_offset - lo > 0.0) {
        return Err(Error::Unstable(format!(
            "maximal weight {} along -s does not exceed {}",
            -lo, -c_offset
        )));
    }
    // drop numerically inactive coordinates so the flow sees the same support
    let mut q = p.clone();
    let keep: std::collections::HashSet<usize> = support.into_iter().collect();
    for (k, z) in q.coords.iter_mut().enumerate() {
        if !keep.contains(&k) {
            *z = Complex64::zero();
        }
    }
    let f = |t: f64| lambda_t_unchecked(&q, t) - c_offset;
    let mut a = -1.0;
    let mut b = 1.0;
    let mut iterations = 0;
    while f(a) > 0.0 {
        a *= 2.0;
        iterations += 1;
    }
    while f(b) < 0.0 {
        b *= 2.0;
        iterations += 1;
    }
    let mut t = 0.0_f64.clamp(a, b);
    for _ in 0..200 {
        iterations += 1;
        let (mean, var) = weighted_moments(&q, t);
        let val = mean - c_offset;
        if val.abs() < 1e-13 {
            break;
        }
        if val > 0.0 {
            b = t;
        } else {
            a = t;
        }
        let newton = t - val / (2.0 * var);
        t = if var > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a < 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    let point: Vec<Complex64> = p
        .coords
        .iter()
        .zip(&p.weights)
        .map(|(z, w)| z * (t * q_to_f64(*w)).exp())
        .collect();
    Ok(KempfNess {
        t_star: t,
        point,
        iterations,
        residual: f(t).abs(),
    })
}

/// `|x_k|²/‖x‖²`, the `K`-invariant shape of a lift.
pub fn normalized_masses(coords: &[Complex64]) -> Vec<f64> {
    let total: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
    coords.iter().map(|z| z.norm_sqr() / total).collect()
}

/// Exact `|x|²` support test for rational data: a coordinate is active iff
/// its squared modulus is a positive rational.
pub fn max_weight_projective_exact(masses: &[Rational64], weights: &[Rational64]) -> Result<Rational64> {
    if masses.len() != weights.len() {
        return Err(Error::ShapeMismatch("masses and weights differ in length".into()));
    }
    if masses.iter().any(|m| m.is_negative()) {
        return Err(Error::InvalidInput("squared moduli must be nonnegative".into()));
    }
    masses
        .iter()
        .zip(weights)
        .filter(|(m, _)| m.is_positive())
        .map(|(_, w)| *w)
        .max()
        .ok_or_else(|| Error::InvalidInput("projective point has zero lift".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn e(i: usize, n: usize) -> Vec<Complex64> {
        (0..n).map(|k| Complex64::new(if k == i { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn linear_examples() {
        let p = WeightedPoint::from_ints(&[1.0], &[-2], Mode::Linear).unwrap();
        assert_eq!(max_weight_linear(&p).unwrap(), MaxWeight::Finite(q(0)));
        let p = WeightedPoint::from_ints(&[1.0], &[1], Mode::Linear).unwrap();
        assert_eq!(max_weight_linear(&p).unwrap(), MaxWeight::Infinite);
        let p = WeightedPoint::from_ints(&[0.0, 0.0], &[3, 1], Mode::Linear).unwrap();
        assert_eq!(max_weight_linear(&p).unwrap(), MaxWeight::Finite(q(0)));
        let p = WeightedPoint::from_ints(&[0.0, 2.0], &[3, -1], Mode::Linear).unwrap();
        assert_eq!(max_weight_linear(&p).unwrap(), MaxWeight::Finite(q(0)));
    }

    #[test]
    fn projective_examples() {
        let p = WeightedPoint::from_ints(&[1.0, 1.0], &[1, -1], Mode::Projective).unwrap();
        assert_eq!(max_weight_projective(&p).unwrap(), MaxWeight::Finite(q(1)));
        let p = WeightedPoint::from_ints(&[0.0, 1.0], &[1, -1], Mode::Projective).unwrap();
        assert_eq!(max_weight_projective(&p).unwrap(), MaxWeight::Finite(q(-1)));
        assert!(WeightedPoint::from_ints(&[0.0, 0.0], &[1, -1], Mode::Projective).is_err());
        let lin = WeightedPoint::from_ints(&[1.0], &[1], Mode::Linear).unwrap();
        assert!(max_weight_projective(&lin).is_err());
    }

    #[test]
    fn lambda_t_examples() {
        let p = WeightedPoint::from_ints(&[1.0, 1.0], &[1, -1], Mode::Projective).unwrap();
        assert_eq!(lambda_t_projective(&p, 0.0).unwrap(), 0.0);
        assert!((lambda_t_projective(&p, 20.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((lambda_t_projective(&p, 1e4).unwrap() - 1.0).abs() < 1e-12);
        let single = WeightedPoint::from_ints(&[0.0, 3.0], &[5, -2], Mode::Projective).unwrap();
        for t in [-50.0, 0.0, 7.0] {
            assert_eq!(lambda_t_projective(&single, t).unwrap(), -2.0);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(64);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        // exact up to degree 127
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(100)).sum();
        assert!((approx - 2.0 / 101.0).abs() < 1e-14);
        assert!((integrate64(0.0, 1.0, |t| t.exp()) - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn psi_examples() {
        let p = WeightedPoint::from_ints(&[1.0, 2.0], &[1, -3], Mode::Projective).unwrap();
        let v = psi_projective(&p, 0.0).unwrap();
        assert_eq!(v.closed_form, 0.0);
        assert_eq!(v.quadrature, 0.0);

        for w in [-3i64, 1, 4] {
            let p = WeightedPoint::from_ints(&[1.0, 0.0], &[w, 0], Mode::Projective).unwrap();
            let v = psi_projective(&p, 1.0).unwrap();
            assert!((v.quadrature - w as f64).abs() < 1e-13);
            assert!((v.closed_form - w as f64 / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn integrated_lambda_has_moment_slope() {
        let p = WeightedPoint::from_ints(&[0.3, 1.2, -0.7], &[2, -1, 0], Mode::Projective).unwrap();
        let h = 1e-5;
        let slope = (integrated_lambda(&p, h).unwrap() - integrated_lambda(&p, -h).unwrap()) / (2.0 * h);
        assert!((slope - moment_pairing(&p).unwrap()).abs() < 1e-8);
        // quadrature agrees with the primitive ½ log ratio
        let t = 0.8;
        assert!((integrated_lambda(&p, t).unwrap() - 0.5 * log_norm_ratio(&p, t)).abs() < 1e-12);
    }

    fn flags_2d() -> Vec<EigenFlag> {
        vec![
            EigenFlag { eigenvalue: q(-1), basis: vec![e(0, 2)] },
            EigenFlag { eigenvalue: q(1), basis: vec![e(0, 2), e(1, 2)] },
        ]
    }

    #[test]
    fn grassmann_examples() {
        for method in [RankMethod::Exact, RankMethod::Threshold] {
            let mut g = GrassData {
                ambient_dim: 2,
                plane: vec![e(0, 2)],
                eigen_flags: flags_2d(),
                tau: Rational64::new(3, 2),
                rank_method: method,
            };
            assert_eq!(max_weight_grassmann(&g).unwrap(), -Rational64::new(3, 2));
            g.plane = vec![e(1, 2)];
            assert_eq!(max_weight_grassmann(&g).unwrap(), Rational64::new(3, 2));
            let before = max_weight_grassmann(&g).unwrap();
            g.tau *= 2;
            assert_eq!(max_weight_grassmann(&g).unwrap(), before * 2);
        }
    }

    #[test]
    fn grassmann_rejects_bad_data() {
        let base = GrassData {
            ambient_dim: 2,
            plane: vec![e(0, 2), e(0, 2)],
            eigen_flags: flags_2d(),
            tau: q(1),
            rank_method: RankMethod::Exact,
        };
        assert!(max_weight_grassmann(&base).is_err());
        let mut g = base.clone();
        g.plane = vec![e(0, 2)];
        g.eigen_flags[1].eigenvalue = q(-1);
        assert!(max_weight_grassmann(&g).is_err());
        let mut g = base.clone();
        g.plane = vec![e(0, 2)];
        g.eigen_flags.pop();
        assert!(max_weight_grassmann(&g).is_err());
        let mut g = base;
        g.plane = vec![e(0, 2)];
        g.eigen_flags[1].basis = vec![e(1, 2)];
        g.eigen_flags[0].basis = vec![Complex64::new(1.0, 1.0); 1].into_iter().map(|z| vec![z, z]).collect();
        assert!(max_weight_grassmann(&g).is_err());
    }

    #[test]
    fn grassmann_exact_vs_threshold_on_generic_plane() {
        // π = span(e1 + e2) meets E1 = span(e1) trivially in C^3
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)];
        let flags = vec![
            EigenFlag { eigenvalue: q(-2), basis: vec![e(0, 3)] },
            EigenFlag { eigenvalue: q(0), basis: vec![e(0, 3), e(1, 3)] },
            EigenFlag { eigenvalue: q(1), basis: vec![e(0, 3), e(1, 3), e(2, 3)] },
        ];
        let mut g = GrassData { ambient_dim: 3, plane: vec![v], eigen_flags: flags, tau: q(1), rank_method: RankMethod::Exact };
        assert_eq!(g.intersection_dims().unwrap(), vec![0, 1, 1]);
        // 1·1 + 0·(−2) + 1·(−1)
        assert_eq!(max_weight_grassmann(&g).unwrap(), q(0));
        g.rank_method = RankMethod::Threshold;
        assert_eq!(max_weight_grassmann(&g).unwrap(), q(0));
    }

    #[test]
    fn s2_examples() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::zero();
        assert_eq!(max_weight_s2(one, one, Direction::PlusI).unwrap(), 1);
        assert_eq!(max_weight_s2(one, zero, Direction::PlusI).unwrap(), -1);
        assert_eq!(max_weight_s2(zero, one, Direction::MinusI).unwrap(), -1);
        assert_eq!(max_weight_s2(one, one, Direction::MinusI).unwrap(), 1);
        assert!(max_weight_s2(zero, zero, Direction::PlusI).is_err());
    }

    #[test]
    fn s2_weights_agree_with_projective_rule() {
        // the rotation acts on a lift of [x:y] with weights (-1, 1) along +i
        let pts = [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (2.0, -0.5)];
        for (x, y) in pts {
            for (dir, sign) in [(Direction::PlusI, 1), (Direction::MinusI, -1)] {
                let p = WeightedPoint::from_ints(&[x, y], &[-sign, sign], Mode::Projective).unwrap();
                let expect = max_weight_projective(&p).unwrap();
                let got = max_weight_s2(Complex64::new(x, 0.0), Complex64::new(y, 0.0), dir).unwrap();
                assert_eq!(expect, MaxWeight::Finite(q(got)));
            }
        }
    }

    #[test]
    fn kempf_ness_examples() {
        let p = WeightedPoint::from_ints(&[1.0, 1.0], &[1, 0], Mode::Projective).unwrap();
        let kn = kempf_ness_find_zero(&p, 0.5).unwrap();
        assert!(kn.t_star.abs() < 1e-12);
        let p = WeightedPoint::from_ints(&[2.0, 1.0], &[1, 0], Mode::Projective).unwrap();
        let kn = kempf_ness_find_zero(&p, 0.5).unwrap();
        assert!((kn.t_star + 2f64.ln()).abs() < 1e-12);
        assert!((kn.point[0].norm() - 1.0).abs() < 1e-12);
        assert!(kn.residual < 1e-10);
        let p = WeightedPoint::from_ints(&[0.0, 1.0], &[1, 0], Mode::Projective).unwrap();
        assert!(matches!(kempf_ness_find_zero(&p, 0.5), Err(Error::Unstable(_))));
        let p = WeightedPoint::from_ints(&[1.0, 0.0], &[1, 0], Mode::Projective).unwrap();
        assert!(matches!(kempf_ness_find_zero(&p, 0.5), Err(Error::Unstable(_))));
    }

    #[test]
    fn exact_projective_weight() {
        let w = [q(2), Rational64::new(-1, 3), q(5)];
        let m = [q(1), Rational64::new(1, 7), q(0)];
        assert_eq!(max_weight_projective_exact(&m, &w).unwrap(), q(2));
        assert!(max_weight_projective_exact(&[q(0); 3], &w).is_err());
    }

    #[test]
    fn max_weight_serialization() {
        assert_eq!(serde_json::to_string(&MaxWeight::Infinite).unwrap(), "\"infinity\"");
        assert_eq!(serde_json::to_string(&MaxWeight::Finite(Rational64::new(1, 2))).unwrap(), "\"1/2\"");
        let back: MaxWeight = serde_json::from_str("\"infinity\"").unwrap();
        assert_eq!(back, MaxWeight::Infinite);
        let back: MaxWeight = serde_json::from_str("-3").unwrap();
        assert_eq!(back, MaxWeight::Finite(q(-3)));
    }

    fn point_strategy() -> impl Strategy<Value = WeightedPoint> {
        (2usize..6).prop_flat_map(|r| {
            (
                prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, any::<bool>()), r),
                prop::collection::vec(-6i64..=6, r),
            )
                .prop_filter_map("nonzero lift", |(c, w)| {
                    let coords: Vec<Complex64> = c
                        .iter()
                        .map(|&(re, im, on)| if on { Complex64::new(re, im) } else { Complex64::zero() })
                        .collect();
                    WeightedPoint::new(coords, w.into_iter().map(Rational64::from_integer).collect(), Mode::Projective).ok()
                })
        })
    }

    proptest! {
        #[test]
        fn lambda_t_is_monotone(p in point_strategy()) {
            let vals: Vec<f64> = (0..100).map(|i| lambda_t_projective(&p, -5.0 + 0.1 * i as f64).unwrap()).collect();
            for w in vals.windows(2) {
                prop_assert!(w[1] - w[0] >= -1e-10);
            }
        }

        #[test]
        fn integrated_lambda_is_convex(p in point_strategy()) {
            let h = 0.05;
            let f: Vec<f64> = (0..41).map(|i| integrated_lambda(&p, -1.0 + h * i as f64).unwrap()).collect();
            for w in f.windows(3) {
                prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9);
            }
        }

        #[test]
        fn max_weight_is_homogeneous(p in point_strategy(), num in 1i64..20, den in 1i64..20) {
            let s = Rational64::new(num, den);
            let base = max_weight_projective(&p).unwrap().finite().unwrap();
            prop_assert_eq!(max_weight_projective(&p.scaled(s)).unwrap(), MaxWeight::Finite(base * s));
            let mut lin = p.clone();
            lin.mode = Mode::Linear;
            prop_assert_eq!(max_weight_linear(&lin).unwrap(), max_weight_linear(&lin.scaled(s)).unwrap());
        }

        #[test]
        fn max_weight_is_permutation_invariant(p in point_strategy(), rot in 0usize..6) {
            let r = p.coords.len();
            let mut q2 = p.clone();
            q2.coords.rotate_left(rot % r);
            q2.weights.rotate_left(rot % r);
            prop_assert_eq!(max_weight_projective(&p).unwrap(), max_weight_projective(&q2).unwrap());
        }

        #[test]
        fn lambda_t_tends_to_max_weight(p in point_strategy()) {
            let limit = max_weight_projective(&p).unwrap().to_f64();
            prop_assert!((lambda_t_projective(&p, 40.0).unwrap() - limit).abs() < 1e-6);
        }

        #[test]
        fn kempf_ness_is_unique_on_orbit(p in point_strategy(), c in -3.0f64..3.0, shift in -1.0f64..1.0) {
            let moved = WeightedPoint {
                coords: p.coords.iter().zip(&p.weights).map(|(z, w)| z * (shift * q_to_f64(*w)).exp()).collect(),
                ..p.clone()
            };
            match (kempf_ness_find_zero(&p, c), kempf_ness_find_zero(&moved, c)) {
                (Ok(a), Ok(b)) => {
                    prop_assert!(a.residual < 1e-10 && b.residual < 1e-10);
                    for (x, y) in normalized_masses(&a.point).iter().zip(normalized_masses(&b.point)) {
                        prop_assert!((x - y).abs() < 1e-8);
                    }
                }
                (Err(Error::Unstable(_)), Err(Error::Unstable(_))) => {}
                other => prop_assert!(false, "inconsistent verdicts {:?}", other),
            }
        }
    }
}
