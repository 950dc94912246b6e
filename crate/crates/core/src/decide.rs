//! Decision tables: when does `B^{σ,N}_{p,q}` or `F^{σ,N}_{p,q}` consist of
//! regular distributions (`⊂ L_1^loc`)?
//!
//! Every criterion is an `ℓ_r` membership test of a condition sequence built
//! from `σ` and `N` inside the parametric family, so verdicts are exact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lr::{conjugate, interp_index, lr_membership, InterpKind, LrIndex, MembershipVerdict};
use crate::rational::{q_display, q_floor_plus_one, q_int, q_pos_part, Q};
use crate::seqcore::{assumption_n_check, ParamSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    B,
    F,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::B => "B",
            Family::F => "F",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(Family::B),
            "F" | "f" => Ok(Family::F),
            other => Err(Error::InvalidInput(format!("family must be B or F, got '{other}'"))),
        }
    }
}

/// The query object `(family, n, p, q, σ, N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub family: Family,
    pub n: u32,
    pub p: LrIndex,
    pub q: LrIndex,
    pub sigma: ParamSequence,
    #[serde(rename = "N")]
    pub big_n: ParamSequence,
}

impl SpaceSpec {
    pub fn new(
        family: Family,
        n: u32,
        p: LrIndex,
        q: LrIndex,
        sigma: ParamSequence,
        big_n: ParamSequence,
    ) -> Result<Self> {
        let spec = Self {
            family,
            n,
            p,
            q,
            sigma,
            big_n,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("dimension n must be at least 1".into()));
        }
        if self.family == Family::F && self.p.is_infinite() {
            return Err(Error::InvalidSpec("F requires p < ∞".into()));
        }
        let report = assumption_n_check(&self.big_n);
        if !report.satisfies_assumption_n {
            return Err(Error::InvalidSpec(format!(
                "N = {} must satisfy lambda0 N_j <= N_(j+1) with lambda0 > 1 (inf ratio = {})",
                self.big_n, report.lambda0
            )));
        }
        Ok(())
    }

    pub fn with_q(&self, q: LrIndex) -> Self {
        Self { q, ..self.clone() }
    }

    pub fn with_family(&self, family: Family) -> Self {
        Self { family, ..self.clone() }
    }

    /// `N_j^e`
    fn n_power(&self, e: &Q) -> ParamSequence {
        self.big_n.pow(e)
    }

    /// `n(1/p - 1)`, with `1/∞ = 0`.
    fn n_shift(&self) -> Q {
        q_int(self.n as i64) * (self.p.reciprocal() - Q::one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    B1,
    B2,
    B3,
    B4,
    F1,
    F2,
    F3,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub contained: bool,
    pub case_id: CaseId,
    /// The condition sequence, e.g. `σ_j^{-1} N_j^{n(1/p-1)}`.
    pub tested_sequence: ParamSequence,
    pub tested_index: LrIndex,
    pub membership: MembershipVerdict,
    pub explanation: String,
}

fn one_as_index() -> LrIndex {
    LrIndex::int(1)
}

fn two_as_index() -> LrIndex {
    LrIndex::int(2)
}

/// Case of the B-characterization for `(p, q)`; boundaries are inclusive
/// exactly as stated (`q ≤ min{p,2}` for B2).
pub fn case_b(p: &LrIndex, q: &LrIndex) -> CaseId {
    let one = one_as_index();
    let two = two_as_index();
    if p <= &one {
        CaseId::B1
    } else if q <= &p.min(&two) {
        CaseId::B2
    } else if p <= &two {
        CaseId::B3
    } else {
        CaseId::B4
    }
}

pub fn case_f(p: &LrIndex, q: &LrIndex) -> CaseId {
    if p < &one_as_index() {
        CaseId::F1
    } else if q <= &two_as_index() {
        CaseId::F2
    } else {
        CaseId::F3
    }
}

/// Decides `B^{σ,N}_{p,q} ⊂ L_1^loc` or `F^{σ,N}_{p,q} ⊂ L_1^loc`.
pub fn regularity(spec: &SpaceSpec) -> Result<RegularityVerdict> {
    match spec.family {
        Family::B => regularity_b(spec),
        Family::F => regularity_f(spec),
    }
}

pub fn regularity_b(spec: &SpaceSpec) -> Result<RegularityVerdict> {
    if spec.family != Family::B {
        return Err(Error::InvalidSpec("regularity_b needs a B-space".into()));
    }
    spec.validate()?;
    let inv = spec.sigma.inverse();
    let case = case_b(&spec.p, &spec.q);
    let (seq, index) = match case {
        CaseId::B1 => (inv.mul(&spec.n_power(&spec.n_shift())), conjugate(&spec.q)),
        CaseId::B2 => (inv, LrIndex::Infinite),
        CaseId::B3 => (inv, interp_index(&spec.p, &spec.q, &InterpKind::BminusP)?),
        CaseId::B4 => (inv, interp_index(&spec.p, &spec.q, &InterpKind::Bminus2)?),
        _ => unreachable!(),
    };
    Ok(finish(spec, case, seq, index))
}

pub fn regularity_f(spec: &SpaceSpec) -> Result<RegularityVerdict> {
    if spec.family != Family::F {
        return Err(Error::InvalidSpec("regularity_f needs an F-space".into()));
    }
    spec.validate()?;
    let inv = spec.sigma.inverse();
    let case = case_f(&spec.p, &spec.q);
    let (seq, index) = match case {
        CaseId::F1 => (inv.mul(&spec.n_power(&spec.n_shift())), LrIndex::Infinite),
        CaseId::F2 => (inv, LrIndex::Infinite),
        CaseId::F3 => (inv, interp_index(&spec.p, &spec.q, &InterpKind::Bminus2)?),
        _ => unreachable!(),
    };
    Ok(finish(spec, case, seq, index))
}

fn finish(spec: &SpaceSpec, case: CaseId, seq: ParamSequence, index: LrIndex) -> RegularityVerdict {
    let membership = lr_membership(&seq, &index);
    let contained = membership.is_member();
    let explanation = explain(spec, case, &seq, &index, &membership);
    RegularityVerdict {
        contained,
        case_id: case,
        tested_sequence: seq,
        tested_index: index,
        membership,
        explanation,
    }
}

/// Symbolic form of `1/r` for the case, as printed in the threshold
/// `b > 1/r` when the condition sequence has no exponential part.
fn threshold_formula(case: CaseId) -> Option<&'static str> {
    match case {
        CaseId::B1 => Some("(q-1)/q"),
        CaseId::B3 => Some("(q-p)/(pq)"),
        CaseId::B4 | CaseId::F3 => Some("(q-2)/(2q)"),
        _ => None,
    }
}

fn explain(
    spec: &SpaceSpec,
    case: CaseId,
    seq: &ParamSequence,
    index: &LrIndex,
    membership: &MembershipVerdict,
) -> String {
    let what = match case {
        CaseId::B1 | CaseId::F1 => format!(
            "sigma_j^-1 N_j^(n(1/p-1)) with n(1/p-1) = {}",
            q_display(&spec.n_shift())
        ),
        _ => "sigma_j^-1".to_string(),
    };
    let mut text = format!(
        "case {case}: ({what}) = 2^({}*j)(1+j)^({})ln(e+j)^({}) in l_{index}? {}",
        q_display(&seq.s),
        q_display(&seq.b),
        q_display(&seq.c),
        membership.reason
    );
    // Threshold on b in the Example form, when the exponential part cancels
    // and N is purely geometric so that the (1+j) power comes from sigma alone.
    let n_pure = spec.big_n.b.is_zero() && spec.big_n.c.is_zero();
    if seq.s.is_zero() && n_pure {
        match index {
            LrIndex::Infinite => {
                text.push_str("; threshold: b > 0, or b = 0 and c >= 0");
            }
            LrIndex::Finite(r) => {
                let thr = r.recip();
                match threshold_formula(case) {
                    Some(formula) => text.push_str(&format!("; threshold: b > {formula} = {}", q_display(&thr))),
                    None => text.push_str(&format!("; threshold: b > {}", q_display(&thr))),
                }
                text.push_str(&format!(" (equality needs c < -{})", q_display(&thr)));
            }
        }
    }
    text
}

/// Classical table for `σ = 2^{sj}`, `N = 2^j`, hand-coded independently of
/// the generalized criteria.
pub fn classical_regularity(family: Family, s: &Q, p: &LrIndex, q: &LrIndex, n: u32) -> Result<bool> {
    let nq = q_int(n as i64);
    let one = one_as_index();
    let two = two_as_index();
    let zero = Q::zero();
    match family {
        Family::F => {
            let pv = p.value().ok_or_else(|| Error::InvalidSpec("F requires p < ∞".into()))?;
            let shift = &nq * (pv.recip() - Q::one());
            Ok((p < &one && s >= &shift) || (p >= &one && s > &zero) || (p >= &one && s == &zero && q <= &two))
        }
        Family::B => {
            let shift = &nq * (p.reciprocal() - Q::one());
            let line1 = s > &q_pos_part(shift.clone());
            let line2 = p <= &one && s == &shift && q <= &one;
            let line3 = p > &one && s == &zero && q <= &p.min(&two);
            Ok(line1 || line2 || line3)
        }
    }
}

/// Outcome of a sufficient-only test; never answers "no".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Holds {
    Yes,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVerdict {
    pub holds: Holds,
    pub condition: ParamSequence,
    pub index: LrIndex,
    pub membership: MembershipVerdict,
    /// Always true: these conditions are sufficient, not necessary.
    pub sufficient_only: bool,
}

fn embedding_verdict(condition: ParamSequence, index: LrIndex) -> EmbeddingVerdict {
    let membership = lr_membership(&condition, &index);
    EmbeddingVerdict {
        holds: if membership.is_member() {
            Holds::Yes
        } else {
            Holds::Unknown
        },
        condition,
        index,
        membership,
        sufficient_only: true,
    }
}

/// `B^{σ,N}_{p1,q1} ↪ B^{τ,N}_{p2,q2}` if `(σ_j^{-1} τ_j N_j^{n(1/p1-1/p2)}) ∈ ℓ_{q*}`.
#[allow(clippy::too_many_arguments)]
pub fn embedding_b(
    sigma: &ParamSequence,
    tau: &ParamSequence,
    big_n: &ParamSequence,
    n: u32,
    p1: &LrIndex,
    p2: &LrIndex,
    q1: &LrIndex,
    q2: &LrIndex,
) -> Result<EmbeddingVerdict> {
    if p1 > p2 {
        return Err(Error::InvalidInput(format!(
            "embedding needs p1 <= p2, got p1 = {p1}, p2 = {p2}"
        )));
    }
    let e = q_int(n as i64) * (p1.reciprocal() - p2.reciprocal());
    let condition = sigma.inverse().mul(tau).mul(&big_n.pow(&e));
    let qstar = interp_index(
        p1,
        p2,
        &InterpKind::QStar {
            q1: q1.clone(),
            q2: q2.clone(),
        },
    )?;
    Ok(embedding_verdict(condition, qstar))
}

/// `F^{σ,N}_{p,q1} ↪ F^{τ,N}_{p,q2}` if `(σ_j^{-1} τ_j) ∈ ℓ_{q*}`.
pub fn embedding_f(
    sigma: &ParamSequence,
    tau: &ParamSequence,
    p: &LrIndex,
    q1: &LrIndex,
    q2: &LrIndex,
) -> Result<EmbeddingVerdict> {
    if p.is_infinite() {
        return Err(Error::InvalidSpec("F requires p < ∞".into()));
    }
    let condition = sigma.inverse().mul(tau);
    let qstar = interp_index(
        p,
        p,
        &InterpKind::QStar {
            q1: q1.clone(),
            q2: q2.clone(),
        },
    )?;
    Ok(embedding_verdict(condition, qstar))
}

/// Known sufficient condition for `B ⊂ L_1^loc` (indeed `B ↪ L_max{1,p}`):
/// `(σ_j^{-1} N_j^{n(1/p-1)_+}) ∈ ℓ_{q'}`.
pub fn sufficient_b(spec: &SpaceSpec) -> EmbeddingVerdict {
    let e = q_pos_part(spec.n_shift());
    embedding_verdict(spec.sigma.inverse().mul(&spec.n_power(&e)), conjugate(&spec.q))
}

/// Known sufficient condition for `F ⊂ L_1^loc`:
/// `(σ_j^{-1} N_j^δ) ∈ ℓ_{p'}` for some `δ > 0` when `p ≥ 1`;
/// `(σ_j^{-1} N_j^{n(1/p-1)}) ∈ ℓ_∞` when `p < 1`.
pub fn sufficient_f(spec: &SpaceSpec) -> Result<EmbeddingVerdict> {
    if spec.p.is_infinite() {
        return Err(Error::InvalidSpec("F requires p < ∞".into()));
    }
    if spec.p < one_as_index() {
        let cond = spec.sigma.inverse().mul(&spec.n_power(&spec.n_shift()));
        return Ok(embedding_verdict(cond, LrIndex::Infinite));
    }
    // N_j^δ contributes δ·s_N > 0 to the exponential rate, so some δ > 0 works
    // exactly when σ^{-1} decays exponentially; δ = s_σ/(2 s_N) is then a witness.
    let delta = if spec.sigma.s.is_positive() && spec.big_n.s.is_positive() {
        &spec.sigma.s / (q_int(2) * &spec.big_n.s)
    } else {
        Q::new(BigInt::one(), BigInt::from(1_000_000))
    };
    let cond = spec.sigma.inverse().mul(&spec.n_power(&delta));
    Ok(embedding_verdict(cond, conjugate(&spec.p)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    /// `L_max{1,p}`
    Lebesgue(LrIndex),
    /// Local Hardy space.
    H1,
    /// Bounded mean oscillation (local).
    Bmo,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Lebesgue(r) => write!(f, "L_{r}"),
            Target::H1 => f.write_str("h1"),
            Target::Bmo => f.write_str("bmo"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetVerdict {
    pub target: Target,
    pub holds: bool,
    pub regularity: RegularityVerdict,
}

/// Containment in `L_1^loc` upgrades to an embedding: into `bmo` for `B` with
/// `p = ∞`, into `h_1` for `p ≤ 1`, otherwise into `L_max{1,p}`.
pub fn embeds_in_target(spec: &SpaceSpec) -> Result<TargetVerdict> {
    let regularity = regularity(spec)?;
    let target = if spec.family == Family::B && spec.p.is_infinite() {
        Target::Bmo
    } else if spec.p <= one_as_index() {
        Target::H1
    } else {
        Target::Lebesgue(spec.p.clone())
    };
    Ok(TargetVerdict {
        target,
        holds: regularity.contained,
        regularity,
    })
}

/// `B^{σ,N}_{p,min{p,q}} ↪ F^{σ,N}_{p,q} ↪ B^{σ,N}_{p,max{p,q}}`: returns the
/// lower and upper B-spaces of the sandwich.
pub fn bf_sandwich(spec: &SpaceSpec) -> Result<(SpaceSpec, SpaceSpec)> {
    if spec.family != Family::F {
        return Err(Error::InvalidSpec("bf_sandwich needs an F-space".into()));
    }
    spec.validate()?;
    let b = spec.with_family(Family::B);
    Ok((
        b.with_q(LrIndex::min(&spec.p, &spec.q)),
        b.with_q(LrIndex::max(&spec.p, &spec.q)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BfbVerdict {
    pub holds: bool,
    /// `σ'_j = N_j^{n(1/p1-1/p)} σ_j`
    pub sigma_prime: ParamSequence,
    /// `σ''_j = N_j^{n(1/p2-1/p)} σ_j`
    pub sigma_double_prime: ParamSequence,
}

/// `B^{σ',N}_{p1,u} ↪ F^{σ,N}_{p,q} ↪ B^{σ'',N}_{p2,v}` holds iff `u ≤ p ≤ v`.
#[allow(clippy::too_many_arguments)]
pub fn bfb_sharp(
    p1: &LrIndex,
    p: &LrIndex,
    p2: &LrIndex,
    u: &LrIndex,
    v: &LrIndex,
    sigma: &ParamSequence,
    big_n: &ParamSequence,
    n: u32,
) -> Result<BfbVerdict> {
    if !(p1 < p && p < p2) {
        return Err(Error::InvalidInput(format!(
            "needs 0 < p1 < p < p2 <= inf, got p1 = {p1}, p = {p}, p2 = {p2}"
        )));
    }
    let nq = q_int(n as i64);
    let e1 = &nq * (p1.reciprocal() - p.reciprocal());
    let e2 = &nq * (p2.reciprocal() - p.reciprocal());
    Ok(BfbVerdict {
        holds: u <= p && p <= v,
        sigma_prime: big_n.pow(&e1).mul(sigma),
        sigma_double_prime: big_n.pow(&e2).mul(sigma),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRequirements {
    /// Smallest `M ∈ N_0` with `M > α_σ/β_N`.
    pub m_min: i64,
    /// Smallest `L ≥ -1` strictly above the moment bound; `-1` means no moment
    /// conditions are needed.
    pub l_min: i64,
    #[serde(with = "crate::serde_q")]
    pub m_bound: Q,
    #[serde(with = "crate::serde_q")]
    pub l_bound: Q,
}

impl AtomRequirements {
    pub fn needs_moments(&self) -> bool {
        self.l_min >= 0
    }
}

/// Order thresholds for atoms in the Boyd-index form:
/// `M > α_σ/β_N` and
/// `L > -1 + n(α_N/β_N · 1/min(1,p[,q]) - 1) - β_σ/β_N`, where the `F` case
/// takes the minimum over `(1, p, q)` and the `B` case over `(1, p)`.
pub fn atom_requirements(
    sigma: &ParamSequence,
    big_n: &ParamSequence,
    n: u32,
    p: &LrIndex,
    q: &LrIndex,
    family: Family,
) -> Result<AtomRequirements> {
    let bs = sigma.boyd_indices();
    let bn = big_n.boyd_indices();
    if !bn.beta.is_positive() {
        return Err(Error::InvalidInput(format!(
            "atom thresholds need beta_N > 0, got {}",
            q_display(&bn.beta)
        )));
    }
    let m_bound = &bs.alpha / &bn.beta;
    let mut floor_index = LrIndex::min(&one_as_index(), p);
    if family == Family::F {
        floor_index = LrIndex::min(&floor_index, q);
    }
    let inv_min = floor_index.reciprocal();
    let l_bound = -Q::one() + q_int(n as i64) * (&bn.alpha / &bn.beta * inv_min - Q::one()) - &bs.beta / &bn.beta;
    let to_i64 = |x: BigInt| {
        x.to_i64()
            .ok_or_else(|| Error::Numerical("atom order out of range".into()))
    };
    let m_min = to_i64(q_floor_plus_one(&m_bound))?.max(0);
    let l_min = to_i64(q_floor_plus_one(&l_bound))?.max(-1);
    Ok(AtomRequirements {
        m_min,
        l_min,
        m_bound,
        l_bound,
    })
}

/// Serialized verdict: `{family, n, p, q, sigma, N, case_id, condition, index_r, contained, explanation}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub family: Family,
    pub n: u32,
    pub p: LrIndex,
    pub q: LrIndex,
    pub sigma: String,
    #[serde(rename = "N")]
    pub big_n: String,
    pub case_id: CaseId,
    pub condition: ConditionRecord,
    pub index_r: LrIndex,
    pub contained: YesNo,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub s: String,
    pub b: String,
    pub c: String,
    #[serde(rename = "C")]
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YesNo {
    Yes,
    No,
}

impl From<bool> for YesNo {
    fn from(b: bool) -> Self {
        if b {
            YesNo::Yes
        } else {
            YesNo::No
        }
    }
}

impl VerdictRecord {
    pub fn new(spec: &SpaceSpec, verdict: &RegularityVerdict) -> Self {
        let cond = &verdict.tested_sequence;
        Self {
            family: spec.family,
            n: spec.n,
            p: spec.p.clone(),
            q: spec.q.clone(),
            sigma: spec.sigma.to_string(),
            big_n: spec.big_n.to_string(),
            case_id: verdict.case_id,
            condition: ConditionRecord {
                s: q_display(&cond.s),
                b: q_display(&cond.b),
                c: q_display(&cond.c),
                scale: cond.scale,
            },
            index_r: verdict.tested_index.clone(),
            contained: verdict.contained.into(),
            explanation: verdict.explanation.clone(),
        }
    }
}
