//! Extended exponents in `(0, ∞]`, the `ℓ_r` membership criterion for the
//! sequence family, and reverse-Hölder witnesses.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::LogSum;
use crate::rational::{parse_q, q_display, q_int, q_pos_part, q_to_f64, Q};
use crate::seqcore::{ParamSequence, SampledSequence};

/// An integrability index in `(0, ∞]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LrIndex {
    Finite(Q),
    Infinite,
}

impl LrIndex {
    pub fn finite(value: Q) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::InvalidInput(format!(
                "index must be positive, got {}",
                q_display(&value)
            )));
        }
        Ok(LrIndex::Finite(value))
    }

    /// Shorthand for tests and tables: `n/d`.
    pub fn frac(n: i64, d: i64) -> Self {
        LrIndex::finite(crate::rational::q_frac(n, d)).expect("positive literal")
    }

    pub fn int(n: i64) -> Self {
        LrIndex::finite(q_int(n)).expect("positive literal")
    }

    /// Accepts `inf`, `∞`, decimals and rationals.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(LrIndex::Infinite);
        }
        LrIndex::finite(parse_q(t)?)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LrIndex::Infinite)
    }

    /// `1/r`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Q {
        match self {
            LrIndex::Finite(v) => v.recip(),
            LrIndex::Infinite => Q::zero(),
        }
    }

    /// Inverse of [`reciprocal`](Self::reciprocal): `0 ↦ ∞`.
    pub fn from_reciprocal(inv: Q) -> Result<Self> {
        if inv.is_zero() {
            Ok(LrIndex::Infinite)
        } else {
            LrIndex::finite(inv.recip())
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            LrIndex::Finite(v) => q_to_f64(v),
            LrIndex::Infinite => f64::INFINITY,
        }
    }

    pub fn value(&self) -> Option<&Q> {
        match self {
            LrIndex::Finite(v) => Some(v),
            LrIndex::Infinite => None,
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl PartialOrd for LrIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LrIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (LrIndex::Infinite, LrIndex::Infinite) => Equal,
            (LrIndex::Infinite, _) => Greater,
            (_, LrIndex::Infinite) => Less,
            (LrIndex::Finite(a), LrIndex::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for LrIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LrIndex::Finite(v) => f.write_str(&q_display(v)),
            LrIndex::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for LrIndex {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LrIndex {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(de)?;
        LrIndex::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// `r'` with `1/r' = (1 - 1/r)_+`.
pub fn conjugate(r: &LrIndex) -> LrIndex {
    let inv = q_pos_part(Q::one() - r.reciprocal());
    LrIndex::from_reciprocal(inv).expect("non-negative reciprocal")
}

/// Which interpolated index to form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterpKind {
    /// `pq/(q-p)`, with `q = ∞ ↦ p`. Requires `q > p`.
    BminusP,
    /// `2q/(q-2)`, with `q = ∞ ↦ 2`. Requires `q > 2`.
    Bminus2,
    /// `1/q* = (1/q2 - 1/q1)_+`.
    QStar { q1: LrIndex, q2: LrIndex },
}

pub fn interp_index(p: &LrIndex, q: &LrIndex, kind: &InterpKind) -> Result<LrIndex> {
    match kind {
        InterpKind::BminusP => {
            if q <= p {
                return Err(Error::InvalidInput(format!(
                    "pq/(q-p) needs q > p, got p = {p}, q = {q}"
                )));
            }
            // 1/r = 1/p - 1/q
            LrIndex::from_reciprocal(p.reciprocal() - q.reciprocal())
        }
        InterpKind::Bminus2 => {
            let two = LrIndex::int(2);
            if q <= &two {
                return Err(Error::InvalidInput(format!("2q/(q-2) needs q > 2, got q = {q}")));
            }
            LrIndex::from_reciprocal(two.reciprocal() - q.reciprocal())
        }
        InterpKind::QStar { q1, q2 } => LrIndex::from_reciprocal(q_pos_part(q2.reciprocal() - q1.reciprocal())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipStatus {
    Member,
    NotMember,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_sums: Option<Vec<f64>>,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        self.status == MembershipStatus::Member
    }
}

/// Exact `ℓ_r` membership of `u_j = C·2^(t·j)(1+j)^β ln(e+j)^γ`.
///
/// Exponential decay wins outright; at `t = 0` the polynomial and then the
/// logarithmic exponent decide (Bertrand hierarchy, stopping at one log).
pub fn lr_membership(u: &ParamSequence, r: &LrIndex) -> MembershipVerdict {
    let (t, beta, gamma) = u.exponents();
    let (member, reason) = if t.is_negative() {
        (true, format!("exponential decay: t = {} < 0", q_display(t)))
    } else if t.is_positive() {
        (false, format!("exponential growth: t = {} > 0", q_display(t)))
    } else {
        match r {
            LrIndex::Infinite => {
                if beta.is_negative() {
                    (true, format!("t = 0, b = {} < 0: bounded", q_display(beta)))
                } else if beta.is_positive() {
                    (false, format!("t = 0, b = {} > 0: unbounded", q_display(beta)))
                } else if gamma.is_positive() {
                    (false, format!("t = b = 0, c = {} > 0: unbounded", q_display(gamma)))
                } else {
                    (true, format!("t = b = 0, c = {} <= 0: bounded", q_display(gamma)))
                }
            }
            LrIndex::Finite(rv) => {
                let br = beta * rv;
                let gr = gamma * rv;
                let minus_one = -Q::one();
                if br < minus_one {
                    (true, format!("t = 0, b*r = {} < -1", q_display(&br)))
                } else if br > minus_one {
                    (false, format!("t = 0, b*r = {} > -1", q_display(&br)))
                } else if gr < minus_one {
                    (true, format!("t = 0, b*r = -1, c*r = {} < -1", q_display(&gr)))
                } else {
                    (false, format!("t = 0, b*r = -1, c*r = {} >= -1", q_display(&gr)))
                }
            }
        }
    };
    MembershipVerdict {
        status: if member {
            MembershipStatus::Member
        } else {
            MembershipStatus::NotMember
        },
        reason,
        partial_sums: None,
    }
}

/// Finite-data trace: running `Σ_{j<n} u_j^r` (or running sup for `r = ∞`).
/// Never decides membership.
pub fn lr_membership_sampled(u: &SampledSequence, r: &LrIndex, budget: usize) -> Result<MembershipVerdict> {
    if budget > u.len() {
        return Err(Error::InvalidInput(format!(
            "budget {budget} exceeds sample length {}",
            u.len()
        )));
    }
    let vals = &u.values()[..budget];
    let trace: Vec<f64> = match r {
        LrIndex::Infinite => vals
            .iter()
            .scan(0.0f64, |acc, v| {
                *acc = acc.max(*v);
                Some(*acc)
            })
            .collect(),
        LrIndex::Finite(rv) => {
            let rf = q_to_f64(rv);
            vals.iter()
                .scan(0.0f64, |acc, v| {
                    *acc += v.powf(rf);
                    Some(*acc)
                })
                .collect()
        }
    };
    Ok(MembershipVerdict {
        status: MembershipStatus::Inconclusive,
        reason: format!("finite sample of {budget} terms; the tail is unknown"),
        partial_sums: Some(trace),
    })
}

/// One row of a witness growth table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub k: usize,
    /// `Σ_{j≤K} |a_j| b_j`
    pub pairing: f64,
    /// `‖(b_j)_{j≤K}‖_{ℓ_r}`
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseHolderWitness {
    pub r: LrIndex,
    pub conjugate: LrIndex,
    /// `b_0..b_{len-1}`
    pub b: Vec<f64>,
    pub table: Vec<GrowthRow>,
    pub construction: String,
}

impl ReverseHolderWitness {
    /// Pairing increases strictly along the schedule.
    pub fn pairing_strictly_increasing(&self) -> bool {
        self.table.windows(2).all(|w| w[1].pairing > w[0].pairing)
    }
}

/// Builds `b ∈ ℓ_r` with `Σ |a_j| b_j` unbounded, given `a ∉ ℓ_{r'}`.
///
/// * `r ≤ 1` (`r' = ∞`): spikes `b_{j_l} = l^{-1/r-1}` at the first index after
///   `j_{l-1}` with `|a_{j_l}| ≥ l^{1/r+1}`.
/// * `r = ∞` (`r' = 1`): `b_j = 1`.
/// * `1 < r < ∞`: indices are grouped greedily into consecutive blocks of
///   `ℓ_{r'}`-mass at least one; on block `m`, `b_j = c_m |a_j|^{r'-1} / A_m^{r'/r}`
///   with `A_m` the block's `ℓ_{r'}` norm and `c_m = (m (1+ln m)^2)^{-1/r}`. The
///   block carries `ℓ_r` norm `c_m` and contributes `c_m A_m ≥ c_m` to the pairing.
///
/// The growth table is evaluated at `K, 2K, 4K`.
pub fn reverse_holder_witness(a: &ParamSequence, r: &LrIndex, k: usize) -> Result<ReverseHolderWitness> {
    reverse_holder_witness_with_schedule(a, r, &[k, 2 * k, 4 * k])
}

pub fn reverse_holder_witness_with_schedule(
    a: &ParamSequence,
    r: &LrIndex,
    schedule: &[usize],
) -> Result<ReverseHolderWitness> {
    let rc = conjugate(r);
    let verdict = lr_membership(a, &rc);
    if verdict.is_member() {
        return Err(Error::InvalidInput(format!(
            "a = {a} belongs to l_{rc} ({}); no reverse-Hölder witness exists",
            verdict.reason
        )));
    }
    let len = schedule.iter().copied().max().unwrap_or(0) + 1;
    // Work with log2|a_j| so that exponentially large a_j stay usable.
    let la: Vec<f64> = (0..len as u64).map(|j| a.log2_eval(j)).collect();
    let (b, construction) = match r {
        LrIndex::Infinite => (vec![1.0; len], "b_j = 1".to_string()),
        LrIndex::Finite(rv) if rv <= &Q::one() => {
            let rf = q_to_f64(rv);
            let mut b = vec![0.0; len];
            let mut l = 1.0f64;
            for (j, lj) in la.iter().enumerate() {
                if *lj >= (1.0 / rf + 1.0) * l.log2() {
                    b[j] = l.powf(-1.0 / rf - 1.0);
                    l += 1.0;
                }
            }
            (
                b,
                "spikes b_{j_l} = l^(-1/r-1) where |a_{j_l}| >= l^(1/r+1)".to_string(),
            )
        }
        LrIndex::Finite(rv) => {
            let rf = q_to_f64(rv);
            let rcf = rc.to_f64();
            let mut b = vec![0.0; len];
            let mut block_start = 0usize;
            let mut mass = LogSum::new();
            let mut m = 1.0f64;
            for j in 0..len {
                mass.add(rcf * la[j]);
                if mass.log2() >= 0.0 || j + 1 == len {
                    // log2 A_m, with A_m the block's l_{r'} norm
                    let log_norm = mass.log2() / rcf;
                    let cm = (m * (1.0 + m.ln()).powi(2)).powf(-1.0 / rf);
                    for i in block_start..=j {
                        b[i] = cm * ((rcf - 1.0) * la[i] - rcf / rf * log_norm).exp2();
                    }
                    block_start = j + 1;
                    mass = LogSum::new();
                    m += 1.0;
                }
            }
            (
                b,
                "block duality: b_j = c_m |a_j|^(r'-1) / A_m^(r'/r) on unit-mass blocks".to_string(),
            )
        }
    };
    let table = schedule
        .iter()
        .map(|&k| GrowthRow {
            k,
            pairing: la[..=k].iter().zip(&b[..=k]).map(|(x, y)| x.exp2() * y).sum(),
            norm: lr_norm(&b[..=k], r),
        })
        .collect();
    Ok(ReverseHolderWitness {
        r: r.clone(),
        conjugate: rc,
        b,
        table,
        construction,
    })
}

/// `‖x‖_{ℓ_r}` of a finite vector (quasi-norm for `r < 1`).
pub fn lr_norm(x: &[f64], r: &LrIndex) -> f64 {
    match r {
        LrIndex::Infinite => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        LrIndex::Finite(rv) => {
            let rf = q_to_f64(rv);
            x.iter().map(|v| v.abs().powf(rf)).sum::<f64>().powf(1.0 / rf)
        }
    }
}
