//! Admissible sequences of the form `C·2^(s·j)·(1+j)^b·ln(e+j)^c`.
//!
//! The family is closed under inversion, products and rational powers, which
//! is all the decision tables need: every condition sequence is a shift of the
//! exponent triple `(s, b, c)`.

use std::f64::consts::{E, LN_2};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{q_display, q_to_f64, Q};

/// Integer window scanned exactly before switching to the asymptotic grid.
pub const RATIO_WINDOW: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSequence {
    /// Positive scale `C`. Never affects a verdict, so it is kept in floating point.
    pub scale: f64,
    /// Exponential rate: base-2 exponent per step.
    #[serde(with = "crate::serde_q")]
    pub s: Q,
    /// Power of `(1+j)`.
    #[serde(with = "crate::serde_q")]
    pub b: Q,
    /// Power of `ln(e+j)`.
    #[serde(with = "crate::serde_q")]
    pub c: Q,
}

impl ParamSequence {
    pub fn new(scale: f64, s: Q, b: Q, c: Q) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidSequence(format!(
                "scale C must be a positive finite number, got {scale}"
            )));
        }
        Ok(Self { scale, s, b, c })
    }

    /// Unit-scale member of the family.
    pub fn from_exponents(s: Q, b: Q, c: Q) -> Self {
        Self { scale: 1.0, s, b, c }
    }

    pub fn constant_one() -> Self {
        Self::from_exponents(Q::zero(), Q::zero(), Q::zero())
    }

    /// `2^(s·j)`
    pub fn geometric(s: Q) -> Self {
        Self::from_exponents(s, Q::zero(), Q::zero())
    }

    pub fn exponents(&self) -> (&Q, &Q, &Q) {
        (&self.s, &self.b, &self.c)
    }

    pub fn log2_eval(&self, j: u64) -> f64 {
        let jf = j as f64;
        self.scale.log2()
            + q_to_f64(&self.s) * jf
            + q_to_f64(&self.b) * (1.0 + jf).log2()
            + q_to_f64(&self.c) * (E + jf).ln().log2()
    }

    pub fn eval(&self, j: u64) -> f64 {
        let jf = j as f64;
        let mut v = self.scale;
        if !self.s.is_zero() {
            v *= (q_to_f64(&self.s) * jf).exp2();
        }
        if !self.b.is_zero() {
            v *= (1.0 + jf).powf(q_to_f64(&self.b));
        }
        if !self.c.is_zero() {
            v *= (E + jf).ln().powf(q_to_f64(&self.c));
        }
        v
    }

    pub fn prefix(&self, len: usize) -> Vec<f64> {
        (0..len as u64).map(|j| self.eval(j)).collect()
    }

    /// `1/σ`
    pub fn inverse(&self) -> Self {
        Self {
            scale: 1.0 / self.scale,
            s: -self.s.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
        }
    }

    /// Termwise product.
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            scale: self.scale * other.scale,
            s: &self.s + &other.s,
            b: &self.b + &other.b,
            c: &self.c + &other.c,
        }
    }

    /// Termwise rational power `σ^e`.
    pub fn pow(&self, e: &Q) -> Self {
        Self {
            scale: self.scale.powf(q_to_f64(e)),
            s: &self.s * e,
            b: &self.b * e,
            c: &self.c * e,
        }
    }

    /// `σ_{j+1}/σ_j` extended to real `x ≥ 0`, in natural-log units relative to `2^s`.
    ///
    /// Returns `b·ln((2+x)/(1+x)) + c·ln(ln(e+1+x)/ln(e+x))`.
    fn ratio_deviation(&self, x: f64) -> f64 {
        let a = (1.0 / (1.0 + x)).ln_1p();
        let l = (E + x).ln();
        let bterm = (1.0 / (E + x)).ln_1p() / l;
        q_to_f64(&self.b) * a + q_to_f64(&self.c) * bterm.ln_1p()
    }

    pub fn ratio(&self, j: u64) -> f64 {
        (q_to_f64(&self.s) * LN_2 + self.ratio_deviation(j as f64)).exp()
    }

    /// Global admissibility constants `d0 = inf σ_{j+1}/σ_j`, `d1 = sup σ_{j+1}/σ_j`.
    pub fn admissibility_bounds(&self) -> AdmissibilityReport {
        let (lo, hi) = self.deviation_extrema();
        let s = q_to_f64(&self.s);
        let d0 = (s * LN_2 + lo.value).exp();
        let d1 = (s * LN_2 + hi.value).exp();
        let satisfies = match lo.at {
            Extremum::Limit => self.s.is_positive(),
            Extremum::Attained(_) => s * LN_2 + lo.value > 0.0,
        };
        AdmissibilityReport {
            d0,
            d1,
            lambda0: d0,
            lambda1: d1,
            d0_at: lo.at,
            d1_at: hi.at,
            is_admissible: true,
            satisfies_assumption_n: satisfies,
            log2_d0_exact: matches!(lo.at, Extremum::Limit).then(|| self.s.clone()),
            log2_d1_exact: matches!(hi.at, Extremum::Limit).then(|| self.s.clone()),
        }
    }

    /// The deviation `ratio/2^s` is a sum of `b·A(x) + c·B(x)` with `A`, `B`
    /// positive and decreasing to zero. Same-sign coefficients give a monotone
    /// deviation whose extremes are at `j = 0` and at the limit; mixed signs need
    /// a scan, which covers the integer window exactly and the tail on a
    /// geometric grid out to `1e300`.
    fn deviation_extrema(&self) -> (Located, Located) {
        let limit = Located {
            value: 0.0,
            at: Extremum::Limit,
        };
        let at_zero = Located {
            value: self.ratio_deviation(0.0),
            at: Extremum::Attained(0),
        };
        let b = self.b.clone();
        let c = self.c.clone();
        if !b.is_negative() && !c.is_negative() {
            return (limit, at_zero);
        }
        if !b.is_positive() && !c.is_positive() {
            return (at_zero, limit);
        }
        let mut lo = limit.clone();
        let mut hi = limit;
        let consider = |value: f64, j: u64, lo: &mut Located, hi: &mut Located| {
            if value < lo.value {
                *lo = Located {
                    value,
                    at: Extremum::Attained(j),
                };
            }
            if value > hi.value {
                *hi = Located {
                    value,
                    at: Extremum::Attained(j),
                };
            }
        };
        for j in 0..=RATIO_WINDOW {
            consider(self.ratio_deviation(j as f64), j, &mut lo, &mut hi);
        }
        // Tail beyond the window: integers there are dense relative to the grid
        // spacing, so the nearest integer to a grid point is a valid index.
        let mut x = RATIO_WINDOW as f64;
        while x < 1e300 {
            x *= 1.02;
            let j = x.round();
            let idx = if j < u64::MAX as f64 { j as u64 } else { u64::MAX };
            consider(self.ratio_deviation(j), idx, &mut lo, &mut hi);
        }
        (lo, hi)
    }

    pub fn boyd_indices(&self) -> BoydIndices {
        BoydIndices {
            alpha: self.s.clone(),
            beta: self.s.clone(),
        }
    }

    /// Equivalence: `σ_j/τ_j` bounded above and below. Within the family this
    /// happens exactly when the exponent triples coincide.
    pub fn equivalent(&self, other: &Self) -> bool {
        self.s == other.s && self.b == other.b && self.c == other.c
    }

    pub fn is_constant_profile(&self) -> bool {
        self.s.is_zero() && self.b.is_zero() && self.c.is_zero()
    }
}

impl fmt::Display for ParamSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::grammar::print_sequence(self))
    }
}

#[derive(Debug, Clone)]
struct Located {
    value: f64,
    at: Extremum,
}

/// Where an admissibility constant is realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    /// Realised by the ratio at index `j`.
    Attained(u64),
    /// Approached as `j → ∞`; the value is exactly `2^s`.
    Limit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub d0: f64,
    pub d1: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub d0_at: Extremum,
    pub d1_at: Extremum,
    pub is_admissible: bool,
    pub satisfies_assumption_n: bool,
    /// `log2 d0` when it is known exactly (limit case).
    #[serde(skip)]
    pub log2_d0_exact: Option<Q>,
    #[serde(skip)]
    pub log2_d1_exact: Option<Q>,
}

/// Boyd indices; closed form `α = β = s` for this family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoydIndices {
    #[serde(with = "crate::serde_q")]
    pub alpha: Q,
    #[serde(with = "crate::serde_q")]
    pub beta: Q,
}

/// `(d0, d1, λ0 > 1)` for `N`.
pub fn assumption_n_check(n: &ParamSequence) -> AdmissibilityReport {
    n.admissibility_bounds()
}

/// Least natural `κ` with `λ^κ ≥ 2`, for a numerically given `λ`.
pub fn kappa_for_lambda(lambda: f64) -> Result<u32> {
    if lambda.is_nan() || lambda <= 1.0 {
        return Err(Error::InvalidInput(format!("kappa0 needs lambda0 > 1, got {lambda}")));
    }
    let x = 1.0 / lambda.log2();
    // Forgive rounding for exact roots of 2 such as 2^(1/3).
    let k = (x - 1e-9 * x.max(1.0)).ceil().max(1.0);
    if k > u32::MAX as f64 {
        return Err(Error::Numerical(format!("kappa0 overflow for lambda0 = {lambda}")));
    }
    Ok(k as u32)
}

/// Least natural `κ` with `2^(κ·ℓ) ≥ 2`, i.e. `κ ≥ 1/ℓ`, for an exact `ℓ = log2 λ > 0`.
fn kappa_for_log2(l: &Q) -> u32 {
    let x = l.recip();
    let k = x.ceil().to_integer();
    let k: u32 = k.try_into().unwrap_or(u32::MAX);
    k.max(1)
}

/// `κ0` for an `N` satisfying the Assumption: least natural with `λ0^κ0 ≥ 2`.
pub fn kappa0(n: &ParamSequence) -> Result<u32> {
    let report = assumption_n_check(n);
    if !report.satisfies_assumption_n {
        return Err(Error::InvalidInput(format!(
            "N = {n} violates the Assumption: lambda0 = {} is not > 1",
            report.lambda0
        )));
    }
    match &report.log2_d0_exact {
        Some(l) => Ok(kappa_for_log2(l)),
        None => kappa_for_lambda(report.lambda0),
    }
}

/// Least natural `κ1` with `λ1 ≤ 2^κ1`.
pub fn kappa1(report: &AdmissibilityReport) -> u32 {
    let k = match &report.log2_d1_exact {
        Some(l) => {
            let k: i64 = l.ceil().to_integer().try_into().unwrap_or(i64::MAX);
            k
        }
        None => {
            let x = report.lambda1.log2();
            (x - 1e-12 * x.abs().max(1.0)).ceil() as i64
        }
    };
    k.max(1) as u32
}

/// Admissibility verdict for finitely sampled input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Inconclusive,
}

/// Finite prefix `σ_0..σ_{J-1}` of a positive sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSequence {
    values: Vec<f64>,
}

impl SampledSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSequence(format!(
                "sampled sequence needs at least 2 terms, got {}",
                values.len()
            )));
        }
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidSequence(format!(
                "term {j} must be positive and finite, got {v}"
            )));
        }
        Ok(Self { values })
    }

    pub fn from_param(seq: &ParamSequence, len: usize) -> Result<Self> {
        Self::new(seq.prefix(len))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Ratio bounds on the sampled window. The tail is unseen, so the
    /// admissibility verdict is always inconclusive.
    pub fn window_bounds(&self) -> SampledAdmissibility {
        let (lo, hi) = self
            .values
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        SampledAdmissibility {
            d0_window: lo,
            d1_window: hi,
            admissible: Decision::Inconclusive,
            satisfies_assumption_n: if lo > 1.0 {
                Decision::Inconclusive
            } else {
                // A ratio ≤ 1 inside the window already refutes λ0 > 1.
                Decision::No
            },
        }
    }

    /// Windowed Boyd estimate `log2(sup_k σ_{j+k}/σ_k)/j` at the largest usable shift.
    pub fn boyd_window(&self, shift: usize) -> Option<(f64, f64)> {
        if shift == 0 || shift >= self.values.len() {
            return None;
        }
        let ratios = (0..self.values.len() - shift).map(|k| self.values[k + shift] / self.values[k]);
        let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        Some((hi.log2() / shift as f64, lo.log2() / shift as f64))
    }

    /// Range of `σ_j/τ_j` over the common window. Boundedness of the whole
    /// ratio sequence cannot be read off a prefix.
    pub fn equivalent(&self, other: &Self) -> (f64, f64, Decision) {
        let (lo, hi) = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a / b)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        (lo, hi, Decision::Inconclusive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledAdmissibility {
    pub d0_window: f64,
    pub d1_window: f64,
    pub admissible: Decision,
    pub satisfies_assumption_n: Decision,
}

/// Human-readable triple, e.g. `(s=1, b=-1/2, c=0)`.
pub fn describe_exponents(seq: &ParamSequence) -> String {
    format!(
        "(s={}, b={}, c={})",
        q_display(&seq.s),
        q_display(&seq.b),
        q_display(&seq.c)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q_frac, q_int};

    fn seq(s: i64, b: i64, c: i64) -> ParamSequence {
        ParamSequence::from_exponents(q_int(s), q_int(b), q_int(c))
    }

    #[test]
    fn eval_trivial_cases() {
        assert_eq!(seq(0, 0, 0).eval(7), 1.0);
        assert_eq!(seq(1, 0, 0).eval(3), 8.0);
        assert_eq!(seq(0, 1, 0).eval(4), 5.0);
    }

    #[test]
    fn bounds_geometric() {
        let r = seq(1, 0, 0).admissibility_bounds();
        assert_eq!(r.d0, 2.0);
        assert_eq!(r.d1, 2.0);
        assert!(r.satisfies_assumption_n);
    }

    #[test]
    fn bounds_polynomial() {
        let r = seq(0, 1, 0).admissibility_bounds();
        assert_eq!(r.d0, 1.0);
        assert_eq!(r.d0_at, Extremum::Limit);
        assert!((r.d1 - 2.0).abs() < 1e-15);
        assert_eq!(r.d1_at, Extremum::Attained(0));
        assert!(!r.satisfies_assumption_n);
    }

    #[test]
    fn bounds_decaying_polynomial_on_geometric() {
        let r = seq(1, -1, 0).admissibility_bounds();
        assert!((r.d0 - 1.0).abs() < 1e-15);
        assert_eq!(r.d0_at, Extremum::Attained(0));
        assert_eq!(r.d1, 2.0);
        assert!(!r.satisfies_assumption_n);

        let r = seq(2, -1, 0).admissibility_bounds();
        assert!(r.satisfies_assumption_n);
        assert!((r.lambda0 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_signs_scan_finds_interior_extremum() {
        // b > 0, c < 0: deviation negative first, positive later.
        let s = ParamSequence::from_exponents(q_int(0), q_int(1), q_int(-3));
        let r = s.admissibility_bounds();
        for j in 0..=2000u64 {
            let ratio = s.ratio(j);
            assert!(ratio >= r.d0 * (1.0 - 1e-12) && ratio <= r.d1 * (1.0 + 1e-12));
        }
        assert!(r.d0 < 1.0 && r.d1 > 1.0);
    }

    #[test]
    fn kappa0_values() {
        assert_eq!(kappa_for_lambda(2.0).unwrap(), 1);
        assert_eq!(kappa_for_lambda(2f64.powf(1.0 / 3.0)).unwrap(), 3);
        assert_eq!(kappa_for_lambda(1.5).unwrap(), 2);
        assert!(kappa_for_lambda(1.0).is_err());
        assert_eq!(kappa0(&ParamSequence::geometric(q_frac(1, 3))).unwrap(), 3);
        assert_eq!(kappa0(&ParamSequence::geometric(q_int(2))).unwrap(), 1);
        assert!(kappa0(&seq(0, 1, 0)).is_err());
    }

    #[test]
    fn boyd_and_equivalence() {
        let s = ParamSequence::from_exponents(q_int(2), q_int(5), q_int(-3));
        assert_eq!(s.boyd_indices().alpha, q_int(2));
        assert_eq!(seq(0, 0, 0).boyd_indices().beta, q_int(0));
        let a = seq(1, 0, 0);
        let mut b = a.clone();
        b.scale = 7.0;
        assert!(a.equivalent(&b));
        assert!(!a.equivalent(&seq(1, 1, 0)));
    }

    #[test]
    fn algebra_shifts_exponents() {
        let s = ParamSequence::from_exponents(q_int(1), q_frac(1, 2), q_int(0));
        let n = ParamSequence::geometric(q_int(1));
        let cond = s.inverse().mul(&n.pow(&q_int(1)));
        assert_eq!(cond.s, q_int(0));
        assert_eq!(cond.b, q_frac(-1, 2));
        assert!(ParamSequence::new(0.0, q_int(0), q_int(0), q_int(0)).is_err());
    }

    #[test]
    fn sampled_is_inconclusive() {
        let s = SampledSequence::new(vec![1.0, 2.0, 4.0]).unwrap();
        let w = s.window_bounds();
        assert_eq!(w.admissible, Decision::Inconclusive);
        assert_eq!(w.d0_window, 2.0);
        assert!(SampledSequence::new(vec![1.0]).is_err());
        assert!(SampledSequence::new(vec![1.0, -1.0]).is_err());
        let flat = SampledSequence::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(flat.window_bounds().satisfies_assumption_n, Decision::No);
    }
}
