//! The extremal series `S_K = Σ_{m=1}^K |ρ_m| σ_m^{-1} N_m^{n(1/p-1)}` behind
//! the `p ≤ 1` necessity argument, and its 1-D integral counterpart over the
//! passages `P_m = {C3/(λ0 N_m) ≤ |x| ≤ C1/N_m}`.

use serde::{Deserialize, Serialize};

use super::basic::BasicFunction;
use super::SeqInput;
use crate::error::{Error, Result};
use crate::lr::{conjugate, lr_membership, reverse_holder_witness_with_schedule, LrIndex};
use crate::numeric::LogSum;
use crate::rational::{q_int, q_to_f64, Q};
use crate::seqcore::{assumption_n_check, ParamSequence};

/// Fewest midpoints per passage accepted by [`extremal_integral`].
pub const MIN_PASSAGE_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSpec {
    pub sigma: ParamSequence,
    pub big_n: ParamSequence,
    pub n: u32,
    pub p: LrIndex,
    pub q: LrIndex,
}

impl ExtremalSpec {
    /// `a_m = σ_m^{-1} N_m^{n(1/p-1)}`
    pub fn condition(&self) -> ParamSequence {
        let e = q_int(self.n as i64) * (self.p.reciprocal() - Q::from_integer(1.into()));
        self.sigma.inverse().mul(&self.big_n.pow(&e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalRow {
    pub k: usize,
    pub log2_s_k: f64,
    pub log2_s_2k: f64,
    /// `S_{2K} / S_K`
    pub ratio: f64,
    /// `log2 Σ_{K<m≤2K} |ρ_m| a_m`, summed directly.
    pub log2_increment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub condition: String,
    pub index: LrIndex,
    /// Whether `a ∈ ℓ_{q'}` (exact).
    pub condition_member: bool,
    pub rho: String,
    /// `(K, S_K)` along the schedule and its doubles.
    pub partial_sums: Vec<(usize, f64)>,
    pub rows: Vec<ExtremalRow>,
}

impl ExtremalReport {
    pub fn min_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min)
    }

    /// `|S_{2K} - S_K|` strictly decreasing along the schedule.
    pub fn increments_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].log2_increment < w[0].log2_increment)
    }

    /// `S_K` nondecreasing in `K` over all recorded points.
    pub fn monotone(&self) -> bool {
        let mut pts = self.partial_sums.clone();
        pts.sort_by_key(|p| p.0);
        pts.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

/// Evaluates `S_K` and `S_{2K}` for every `K` in `schedule`. Without `rho`
/// the reverse-Hölder witness for `a ∉ ℓ_{q'}` is used; an explicit
/// symbolic `ρ` must lie in `ℓ_q`.
pub fn extremal_series(spec: &ExtremalSpec, rho: Option<&SeqInput>, schedule: &[usize]) -> Result<ExtremalReport> {
    if schedule.is_empty() || schedule.contains(&0) {
        return Err(Error::InvalidInput("schedule must be a nonempty list of K >= 1".into()));
    }
    let a = spec.condition();
    let index = conjugate(&spec.q);
    let condition_member = lr_membership(&a, &index).is_member();
    let top = 2 * schedule.iter().copied().max().unwrap_or(1);

    let rho_owned;
    let (rho, rho_desc) = match rho {
        Some(SeqInput::Param(r)) => {
            let v = lr_membership(r, &spec.q);
            if !v.is_member() {
                return Err(Error::InvalidInput(format!(
                    "rho = {r} is not in l_{}: {}",
                    spec.q, v.reason
                )));
            }
            (rho.unwrap(), r.to_string())
        }
        Some(s @ SeqInput::Sampled(_)) => (s, s.to_string()),
        None => {
            let w = reverse_holder_witness_with_schedule(&a, &spec.q, &[top])?;
            rho_owned = SeqInput::Sampled(w.b);
            (&rho_owned, format!("reverse-Hölder witness ({})", w.construction))
        }
    };

    // log2 of the terms, m = 1..=top
    let mut terms = vec![f64::NEG_INFINITY; top + 1];
    for (m, t) in terms.iter_mut().enumerate().skip(1) {
        *t = rho.log2_abs(m)? + a.log2_eval(m as u64);
    }
    let prefix_log2 = |k: usize| {
        let mut s = LogSum::new();
        terms[1..=k].iter().for_each(|t| s.add(*t));
        s.log2()
    };
    let mut rows = Vec::new();
    let mut partial_sums = Vec::new();
    for &k in schedule {
        let lk = prefix_log2(k);
        let l2k = prefix_log2(2 * k);
        let mut inc = LogSum::new();
        terms[k + 1..=2 * k].iter().for_each(|t| inc.add(*t));
        partial_sums.push((k, lk.exp2()));
        partial_sums.push((2 * k, l2k.exp2()));
        rows.push(ExtremalRow {
            k,
            log2_s_k: lk,
            log2_s_2k: l2k,
            ratio: (l2k - lk).exp2(),
            log2_increment: inc.log2(),
        });
    }
    Ok(ExtremalReport {
        condition: a.to_string(),
        index,
        condition_member,
        rho: rho_desc,
        partial_sums,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassageRow {
    pub m: usize,
    pub lo: f64,
    pub hi: f64,
    /// `I_m = ∫_{P_m} f^ρ`
    pub integral: f64,
    /// `C2 (Σ_{j≤m} w_j) |P_m|`
    pub lower_bound: f64,
    /// `Φ(N_j x) = 0` on the grid of `P_m` for every `m < j ≤ K`.
    pub support_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub rows: Vec<PassageRow>,
    pub total: f64,
    /// `S_K` with the `p`-exponent `1/p - 1`.
    pub s_k: f64,
    /// `C2 · 2(C1 - C3/λ0)`
    pub c: f64,
    pub passages_disjoint: bool,
}

impl IntegralReport {
    pub fn all_ok(&self) -> bool {
        self.passages_disjoint
            && self
                .rows
                .iter()
                .all(|r| r.support_ok && r.integral >= r.lower_bound * (1.0 - 1e-12))
            && self.total >= self.c * self.s_k * (1.0 - 1e-12)
    }
}

/// Integrates `f^ρ(x) = Σ_{j≤K} |ρ_j| σ_j^{-1} N_j^{1/p} Φ(N_j x)` over each
/// passage on its own midpoint grid (`n = 1`).
pub fn extremal_integral(
    phi: &BasicFunction,
    sigma: &ParamSequence,
    big_n: &ParamSequence,
    p: &LrIndex,
    rho: &SeqInput,
    k: usize,
    points: usize,
) -> Result<IntegralReport> {
    if points < MIN_PASSAGE_POINTS {
        return Err(Error::InvalidInput(format!(
            "grid too coarse: each passage needs at least {MIN_PASSAGE_POINTS} points, got {points}"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidInput("K must be >= 1".into()));
    }
    let lam = assumption_n_check(big_n).lambda0;
    if phi.lambda0 > lam * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "Phi was built for lambda0 = {} but N only guarantees {lam}",
            phi.lambda0
        )));
    }
    let inv_p = q_to_f64(&p.reciprocal());
    let nj: Vec<f64> = (0..=k as u64).map(|j| big_n.eval(j)).collect();
    let mut w = vec![0.0; k + 1];
    for (j, wj) in w.iter_mut().enumerate().skip(1) {
        *wj = (rho.log2_abs(j)? - sigma.log2_eval(j as u64) + inv_p * big_n.log2_eval(j as u64)).exp2();
    }

    let mut rows = Vec::with_capacity(k);
    let mut prefix = 0.0;
    let mut s_k = 0.0;
    for m in 1..=k {
        prefix += w[m];
        s_k += w[m] / nj[m];
        let lo = phi.c3 / (phi.lambda0 * nj[m]);
        let hi = phi.c1 / nj[m];
        let h = (hi - lo) / points as f64;
        let mut sum = 0.0;
        let mut support_ok = true;
        for i in 0..points {
            let x = lo + (i as f64 + 0.5) * h;
            for j in 1..=k {
                let v = phi.eval(nj[j] * x);
                if j > m && v != 0.0 {
                    support_ok = false;
                }
                sum += w[j] * v;
            }
        }
        // Φ is even, so the two halves of the passage contribute equally.
        let integral = 2.0 * h * sum;
        rows.push(PassageRow {
            m,
            lo,
            hi,
            integral,
            lower_bound: phi.c2 * prefix * 2.0 * (hi - lo),
            support_ok,
        });
    }
    // P_{m+1} lies strictly inside |x| < lo(P_m).
    let passages_disjoint = rows.windows(2).all(|r| r[1].hi < r[0].lo) && rows.iter().all(|r| r.lo < r.hi);
    Ok(IntegralReport {
        total: rows.iter().map(|r| r.integral).sum(),
        rows,
        s_k,
        c: phi.c2 * 2.0 * (phi.c1 - phi.c3 / phi.lambda0),
        passages_disjoint,
    })
}
