//! Slope stability for filtered bundles `0 ⊂ V_1 ⊂ … ⊂ V_s ⊂ V` over a
//! curve with parameters `τ_k`, checked against caller-supplied subsheaf
//! data. Everything is exact rational arithmetic.
//!
//! Degrees are plain numbers (no `2π`). With volume `vol` the `τ`-terms come
//! from integrating a pointwise quantity and scale with `vol`, while degrees
//! do not:
//!
//! * `τ`-slope of `V`: `(deg V + vol·Σ τ_k rk V_k) / R`
//! * admissible central parameter: `c = τ`-slope / `vol`
//!
//! For `vol = 1` these are the usual expressions.

use num_rational::Rational64;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rank: i64,
    #[serde(with = "rational::single")]
    pub degree: Rational64,
}

fn one() -> Rational64 {
    Rational64::from_integer(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationSpec {
    pub rank: i64,
    #[serde(with = "rational::single")]
    pub degree: Rational64,
    #[serde(default)]
    pub steps: Vec<Step>,
    #[serde(default, with = "rational::list")]
    pub taus: Vec<Rational64>,
    #[serde(default = "one", with = "rational::single")]
    pub vol: Rational64,
}

impl FiltrationSpec {
    pub fn new(rank: i64, degree: Rational64, steps: Vec<Step>, taus: Vec<Rational64>) -> Result<Self> {
        let f = Self { rank, degree, steps, taus, vol: one() };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank < 1 {
            return Err(Error::InvalidInput(format!("rank must be positive, got {}", self.rank)));
        }
        if !self.vol.is_positive() {
            return Err(Error::InvalidInput("volume must be positive".into()));
        }
        if self.steps.len() != self.taus.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} filtration steps but {} parameters",
                self.steps.len(),
                self.taus.len()
            )));
        }
        if self.taus.iter().any(|t| t.is_negative()) {
            return Err(Error::InvalidInput("parameters must be nonnegative".into()));
        }
        let mut prev = 0;
        for s in &self.steps {
            if s.rank <= prev || s.rank > self.rank {
                return Err(Error::InvalidInput(format!(
                    "step ranks must satisfy 0 < r_1 < ... < r_s <= {}",
                    self.rank
                )));
            }
            prev = s.rank;
        }
        Ok(())
    }

    /// `(deg V + vol·Σ τ_k rk V_k) / R`
    pub fn tau_slope(&self) -> Rational64 {
        let weighted: Rational64 = self
            .steps
            .iter()
            .zip(&self.taus)
            .map(|(s, t)| t * s.rank)
            .sum();
        (self.degree + self.vol * weighted) / self.rank
    }

    /// Same data with degrees and parameters multiplied by `t`.
    pub fn rescaled(&self, t: Rational64) -> Self {
        Self {
            rank: self.rank,
            degree: self.degree * t,
            steps: self.steps.iter().map(|s| Step { rank: s.rank, degree: s.degree * t }).collect(),
            taus: self.taus.iter().map(|x| x * t).collect(),
            vol: self.vol,
        }
    }
}

/// Rank, degree and `rk(V_k ∩ V')` of a candidate subsheaf `V'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsheafCandidate {
    pub rank: i64,
    #[serde(with = "rational::single")]
    pub degree: Rational64,
    #[serde(default)]
    pub meet_ranks: Vec<i64>,
}

impl SubsheafCandidate {
    pub fn validate(&self, f: &FiltrationSpec) -> Result<()> {
        if self.rank <= 0 || self.rank >= f.rank {
            return Err(Error::InvalidInput(format!(
                "candidate rank {} must lie strictly between 0 and {}",
                self.rank, f.rank
            )));
        }
        if self.meet_ranks.len() != f.steps.len() {
            return Err(Error::ShapeMismatch(format!(
                "candidate has {} intersection ranks for {} steps",
                self.meet_ranks.len(),
                f.steps.len()
            )));
        }
        let mut prev = 0;
        for (m, s) in self.meet_ranks.iter().zip(&f.steps) {
            if *m < prev || *m > s.rank.min(self.rank) {
                return Err(Error::InvalidInput(format!(
                    "intersection ranks must be nondecreasing and bounded by min(r_k, r'), got {:?}",
                    self.meet_ranks
                )));
            }
            prev = *m;
        }
        Ok(())
    }

    /// `(deg V' + vol·Σ τ_k rk(V_k ∩ V')) / rk V'`
    pub fn tau_slope(&self, f: &FiltrationSpec) -> Rational64 {
        let weighted: Rational64 = self
            .meet_ranks
            .iter()
            .zip(&f.taus)
            .map(|(m, t)| t * *m)
            .sum();
        (self.degree + f.vol * weighted) / self.rank
    }
}

pub fn admissible_c(f: &FiltrationSpec) -> Result<Rational64> {
    f.validate()?;
    Ok(f.tau_slope() / f.vol)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub index: usize,
    #[serde(with = "rational::single")]
    pub slope: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// `τ`-slope of `V`, the bound every candidate must stay strictly below.
    #[serde(with = "rational::single")]
    pub bound: Rational64,
    #[serde(with = "rational::single")]
    pub admissible_c: Rational64,
    /// Candidate with the largest `τ`-slope (first one on ties).
    pub worst: Option<Witness>,
}

pub fn is_stable(f: &FiltrationSpec, candidates: &[SubsheafCandidate]) -> Result<StabilityVerdict> {
    f.validate()?;
    for c in candidates {
        c.validate(f)?;
    }
    let bound = f.tau_slope();
    let mut worst: Option<Witness> = None;
    for (index, c) in candidates.iter().enumerate() {
        let slope = c.tau_slope(f);
        if worst.as_ref().is_none_or(|w| slope > w.slope) {
            worst = Some(Witness { index, slope });
        }
    }
    Ok(StabilityVerdict {
        stable: worst.as_ref().is_none_or(|w| w.slope < bound),
        bound,
        admissible_c: bound / f.vol,
        worst,
    })
}

/// `|deg E − vol·⟨c, i⟩| < vol`
pub fn s2_pair_window(deg_e: i64, vol: Rational64, c_pairing: Rational64) -> Result<bool> {
    if !vol.is_positive() {
        return Err(Error::InvalidInput("volume must be positive".into()));
    }
    Ok((Rational64::from_integer(deg_e) - vol * c_pairing).abs() < vol)
}

/// Necessary condition on a reduction `(σ, χ)` whose negative part contains
/// the section: `deg(σ, χ) + ⟨iχ, c⟩·vol > 0`. Vacuous otherwise.
pub fn banfield_reduction_check(
    deg_sigma_chi: Rational64,
    chi_c_pairing: Rational64,
    vol: Rational64,
    phi_in_fminus: bool,
) -> bool {
    !phi_in_fminus || (deg_sigma_chi + chi_c_pairing * vol).is_positive()
}

/// `deg V·c − Σ τ_k deg V_k − ch2`, with `c` the admissible parameter.
pub fn bogomolov_filtration(f: &FiltrationSpec, ch2_pairing: Rational64) -> Result<Rational64> {
    let c = admissible_c(f)?;
    let weighted: Rational64 = f
        .steps
        .iter()
        .zip(&f.taus)
        .map(|(s, t)| t * s.degree)
        .sum();
    Ok(f.degree * c - weighted - ch2_pairing)
}

/// Ordinary slope stability `d'/r' < deg V / R` for every candidate.
pub fn slope_stable(rank: i64, degree: Rational64, candidates: &[(i64, Rational64)]) -> bool {
    let mu = degree / rank;
    candidates.iter().all(|(r, d)| *d / *r < mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn rank2() -> FiltrationSpec {
        FiltrationSpec::new(2, q(0), vec![Step { rank: 1, degree: q(-1) }], vec![q(1)]).unwrap()
    }

    #[test]
    fn admissible_c_examples() {
        assert_eq!(admissible_c(&rank2()).unwrap(), r(1, 2));
        let f = FiltrationSpec::new(3, q(2), vec![Step { rank: 1, degree: q(-1) }], vec![q(0)]).unwrap();
        assert_eq!(admissible_c(&f).unwrap(), r(2, 3));
        let f = FiltrationSpec::new(
            3,
            q(2),
            vec![Step { rank: 1, degree: q(-1) }, Step { rank: 2, degree: q(0) }],
            vec![q(1), r(1, 2)],
        )
        .unwrap();
        assert_eq!(admissible_c(&f).unwrap(), r(4, 3));
    }

    #[test]
    fn admissible_c_with_volume() {
        let mut f = rank2();
        f.vol = q(2);
        // (0 + 2·1)/2 = 1 is the slope; c = 1/2
        assert_eq!(f.tau_slope(), q(1));
        assert_eq!(admissible_c(&f).unwrap(), r(1, 2));
        f.degree = q(2);
        assert_eq!(admissible_c(&f).unwrap(), q(1));
    }

    #[test]
    fn stability_examples() {
        let f = rank2();
        let itself = SubsheafCandidate { rank: 1, degree: q(-1), meet_ranks: vec![1] };
        let v = is_stable(&f, std::slice::from_ref(&itself)).unwrap();
        assert!(v.stable);
        assert_eq!(v.worst.unwrap().slope, q(0));

        let other = SubsheafCandidate { rank: 1, degree: q(0), meet_ranks: vec![0] };
        assert!(is_stable(&f, std::slice::from_ref(&other)).unwrap().stable);

        let bad = SubsheafCandidate { rank: 1, degree: q(1), meet_ranks: vec![0] };
        let v = is_stable(&f, &[itself, other, bad]).unwrap();
        assert!(!v.stable);
        assert_eq!(v.worst, Some(Witness { index: 2, slope: q(1) }));
        assert_eq!(v.bound, r(1, 2));
    }

    #[test]
    fn boundary_slope_is_unstable() {
        let f = rank2();
        let edge = SubsheafCandidate { rank: 1, degree: r(1, 2), meet_ranks: vec![0] };
        assert!(!is_stable(&f, &[edge]).unwrap().stable);
    }

    #[test]
    fn invalid_data_is_rejected() {
        assert!(FiltrationSpec::new(0, q(0), vec![], vec![]).is_err());
        assert!(FiltrationSpec::new(2, q(0), vec![Step { rank: 3, degree: q(0) }], vec![q(1)]).is_err());
        assert!(FiltrationSpec::new(2, q(0), vec![Step { rank: 1, degree: q(0) }], vec![]).is_err());
        let f = rank2();
        for bad in [
            SubsheafCandidate { rank: 2, degree: q(0), meet_ranks: vec![0] },
            SubsheafCandidate { rank: 1, degree: q(0), meet_ranks: vec![2] },
            SubsheafCandidate { rank: 1, degree: q(0), meet_ranks: vec![] },
        ] {
            assert!(is_stable(&f, &[bad]).is_err());
        }
        let three = FiltrationSpec::new(
            3,
            q(0),
            vec![Step { rank: 1, degree: q(0) }, Step { rank: 2, degree: q(0) }],
            vec![q(1), q(1)],
        )
        .unwrap();
        let decreasing = SubsheafCandidate { rank: 2, degree: q(0), meet_ranks: vec![1, 0] };
        assert!(is_stable(&three, &[decreasing]).is_err());
    }

    #[test]
    fn trivial_filtration_is_slope_stability() {
        let f = FiltrationSpec::new(3, q(1), vec![], vec![]).unwrap();
        let cands = [(1, q(0)), (2, q(1)), (1, r(1, 3))];
        for (rk, d) in cands {
            let c = SubsheafCandidate { rank: rk, degree: d, meet_ranks: vec![] };
            assert_eq!(is_stable(&f, &[c]).unwrap().stable, slope_stable(3, q(1), &[(rk, d)]));
        }
    }

    #[test]
    fn window_examples() {
        assert!(s2_pair_window(0, q(1), r(1, 2)).unwrap());
        assert!(!s2_pair_window(2, q(1), r(1, 2)).unwrap());
        assert!(!s2_pair_window(1, q(1), q(0)).unwrap());
        assert!(!s2_pair_window(-1, q(1), q(0)).unwrap());
        assert!(s2_pair_window(3, q(2), q(1)).unwrap());
        assert!(s2_pair_window(0, q(0), q(0)).is_err());
    }

    #[test]
    fn banfield_examples() {
        assert!(banfield_reduction_check(q(-10), q(0), q(1), false));
        assert!(banfield_reduction_check(q(-1), q(2), q(1), true));
        assert!(!banfield_reduction_check(q(-1), q(1), q(1), true));
        assert!(banfield_reduction_check(q(-1), q(1), q(2), true));
    }

    #[test]
    fn bogomolov_examples() {
        assert_eq!(bogomolov_filtration(&rank2(), q(0)).unwrap(), q(1));
        let f = FiltrationSpec::new(2, q(0), vec![Step { rank: 1, degree: q(0) }], vec![q(0)]).unwrap();
        assert_eq!(bogomolov_filtration(&f, q(0)).unwrap(), q(0));
        let f = FiltrationSpec::new(2, q(-4), vec![Step { rank: 1, degree: q(0) }], vec![q(1)]).unwrap();
        assert_eq!(bogomolov_filtration(&f, q(0)).unwrap(), q(6));
        assert_eq!(bogomolov_filtration(&f, q(2)).unwrap(), q(4));
    }

    fn spec_and_candidates() -> impl Strategy<Value = (FiltrationSpec, Vec<SubsheafCandidate>)> {
        (2i64..6).prop_flat_map(|rank| {
            let steps = prop::collection::btree_set(1..=rank, 0..rank as usize);
            (Just(rank), -10i64..10, steps).prop_flat_map(|(rank, deg, ranks)| {
                let ranks: Vec<i64> = ranks.into_iter().collect();
                let s = ranks.len();
                let cands = prop::collection::vec(
                    (1..rank, -10i64..10, prop::collection::vec(0i64..=rank, s)),
                    1..6,
                );
                (
                    Just(rank),
                    Just(deg),
                    Just(ranks),
                    prop::collection::vec(-8i64..8, s),
                    prop::collection::vec((0i64..6, 1i64..4), s),
                    cands,
                )
            })
        })
        .prop_map(|(rank, deg, ranks, degs, taus, cands)| {
            let steps = ranks.iter().zip(&degs).map(|(&r, &d)| Step { rank: r, degree: q(d) }).collect();
            let taus = taus.into_iter().map(|(n, d)| Rational64::new(n, d)).collect();
            let f = FiltrationSpec { rank, degree: q(deg), steps, taus, vol: q(1) };
            let cands = cands
                .into_iter()
                .map(|(r1, d1, raw)| {
                    let mut prev = 0;
                    let meet = raw
                        .iter()
                        .zip(&ranks)
                        .map(|(&m, &rk)| {
                            prev = m.min(rk).min(r1).max(prev);
                            prev
                        })
                        .collect();
                    SubsheafCandidate { rank: r1, degree: q(d1), meet_ranks: meet }
                })
                .collect();
            (f, cands)
        })
    }

    proptest! {
        #[test]
        fn verdict_is_homogeneous((f, cands) in spec_and_candidates(), n in 1i64..9, d in 1i64..9) {
            let t = Rational64::new(n, d);
            let before = is_stable(&f, &cands).unwrap();
            let g = f.rescaled(t);
            let scaled: Vec<SubsheafCandidate> = cands
                .iter()
                .map(|c| SubsheafCandidate { degree: c.degree * t, ..c.clone() })
                .collect();
            let after = is_stable(&g, &scaled).unwrap();
            prop_assert_eq!(before.stable, after.stable);
            prop_assert_eq!(admissible_c(&g).unwrap(), admissible_c(&f).unwrap() * t);
            prop_assert_eq!(after.worst.map(|w| w.index), before.worst.map(|w| w.index));
        }

        #[test]
        fn window_is_symmetric(d in -20i64..20, vn in 1i64..10, vd in 1i64..5, cn in -30i64..30, cd in 1i64..7) {
            let vol = Rational64::new(vn, vd);
            let c = Rational64::new(cn, cd);
            prop_assert_eq!(s2_pair_window(d, vol, c).unwrap(), s2_pair_window(-d, vol, -c).unwrap());
        }
    }
}
