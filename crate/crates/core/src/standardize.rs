//! Standardization: `k(j) = min{k ≥ 0 : 2^(j-1) ≤ N_(k+κ0)}` and the
//! β-sequence `β_j = σ_(k(j))`, which with `N = 2^j` describes the same space.

use std::fmt::Write as _;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lr::{lr_membership, LrIndex, MembershipStatus};
use crate::numeric::LogSum;
use crate::rational::{q_floor_plus_one, q_int, q_to_f64, Q};
use crate::seqcore::{assumption_n_check, kappa0, kappa1, ParamSequence, SampledSequence};

/// Slack for comparisons made in the log2 domain.
const LOG_TOL: f64 = 1e-9;

/// Scan cap: `k(j)` beyond this means `N` grows too slowly for a desk run.
const MAX_K: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationMap {
    pub kappa0: u32,
    pub kappa1: u32,
    pub j0: u64,
    pub c0: u64,
    pub mu0: f64,
    pub mu1: f64,
    /// `k(0..=J)`
    pub k: Vec<u64>,
    #[serde(skip)]
    log2_d0: f64,
}

impl StandardizationMap {
    pub fn depth(&self) -> usize {
        self.k.len() - 1
    }

    pub fn k_of(&self, j: usize) -> Option<u64> {
        self.k.get(j).copied()
    }
}

/// `j - 1 ≤ log2 N_m`, exactly when `N = 2^(s·m)`.
fn reaches(big_n: &ParamSequence, exact: bool, target: i64, m: u64) -> bool {
    if exact {
        q_int(target) <= &big_n.s * q_int(m as i64)
    } else {
        let v = big_n.log2_eval(m);
        (target as f64) <= v + LOG_TOL * v.abs().max(1.0)
    }
}

fn log2_exact_or(exact: &Option<Q>, approx: f64) -> f64 {
    exact.as_ref().map_or(approx.log2(), q_to_f64)
}

/// `(log2 d0, log2 μ0, log2 μ1)` for `σ`, with `μ0 = min(1, d0^κ0)` and
/// `μ1 = max(1, d1^κ0)`.
fn mu_bounds(sigma: &ParamSequence, k0: u32) -> (f64, f64, f64) {
    let rep = sigma.admissibility_bounds();
    let log2_d0 = log2_exact_or(&rep.log2_d0_exact, rep.d0);
    let log2_d1 = log2_exact_or(&rep.log2_d1_exact, rep.d1);
    (log2_d0, (k0 as f64 * log2_d0).min(0.0), (k0 as f64 * log2_d1).max(0.0))
}

/// `mu0`, `mu1` and the lower-bound constant refer to the `σ` given here;
/// `k` depends on `N` only.
pub fn build_map(sigma: &ParamSequence, big_n: &ParamSequence, depth: usize) -> Result<StandardizationMap> {
    if depth < 1 {
        return Err(Error::InvalidInput("standardization depth J must be >= 1".into()));
    }
    let n_report = assumption_n_check(big_n);
    let k0 = kappa0(big_n)?;
    let k1 = kappa1(&n_report);
    let exact = big_n.scale == 1.0 && big_n.b.is_zero() && big_n.c.is_zero();

    // j0: least natural with j0 - 1 > κ0·log2 λ1 + log2 N0.
    let j0 = match (&n_report.log2_d1_exact, exact) {
        (Some(l1), true) => {
            let x = q_int(k0 as i64) * l1 + Q::one();
            q_floor_plus_one(&x)
                .to_i64()
                .ok_or_else(|| Error::Numerical("j0 out of range".into()))?
                .max(0) as u64
        }
        _ => {
            let x = k0 as f64 * n_report.lambda1.log2() + big_n.log2_eval(0);
            // Rounding up near an integer only enlarges c0, which stays valid.
            ((x + 1.0 + LOG_TOL).floor() + 1.0).max(0.0) as u64
        }
    };
    let c0 = k1 as u64 + j0;

    let (log2_d0, log2_mu0, log2_mu1) = mu_bounds(sigma, k0);

    let mut k = Vec::with_capacity(depth + 1);
    let mut cur = 0u64;
    for j in 0..=depth {
        let target = j as i64 - 1;
        while !reaches(big_n, exact, target, cur + k0 as u64) {
            cur += 1;
            if cur > MAX_K {
                return Err(Error::Numerical(format!(
                    "k({j}) exceeds {MAX_K}; N grows too slowly for this depth"
                )));
            }
        }
        k.push(cur);
    }

    let map = StandardizationMap {
        kappa0: k0,
        kappa1: k1,
        j0,
        c0,
        mu0: log2_mu0.exp2(),
        mu1: log2_mu1.exp2(),
        k,
        log2_d0,
    };
    check_remark(&map)?;
    Ok(map)
}

/// `k(j+1) ≤ k(j) + κ0` and `k(j+c0) > k(j)` on the whole table.
pub fn check_remark(map: &StandardizationMap) -> Result<()> {
    let kk = &map.k;
    for j in 0..kk.len().saturating_sub(1) {
        if kk[j + 1] < kk[j] || kk[j + 1] > kk[j] + map.kappa0 as u64 {
            return Err(Error::InvariantViolated(format!(
                "k({}) = {} not in [k({j}), k({j}) + kappa0] = [{}, {}]",
                j + 1,
                kk[j + 1],
                kk[j],
                kk[j] + map.kappa0 as u64
            )));
        }
    }
    let c0 = map.c0 as usize;
    for j in 0..kk.len().saturating_sub(c0) {
        if kk[j + c0] <= kk[j] {
            return Err(Error::InvariantViolated(format!(
                "k({}) = {} is not > k({j}) = {} (c0 = {c0})",
                j + c0,
                kk[j + c0],
                kk[j]
            )));
        }
    }
    Ok(())
}

/// `log2 β_j = log2 σ_(k(j))` with the ratio bounds `μ0 ≤ β_(j+1)/β_j ≤ μ1`
/// checked in the log domain.
pub fn beta_log2(map: &StandardizationMap, sigma: &ParamSequence) -> Result<Vec<f64>> {
    let (_, log2_mu0, log2_mu1) = mu_bounds(sigma, map.kappa0);
    let lb: Vec<f64> = map.k.iter().map(|&k| sigma.log2_eval(k)).collect();
    for (j, w) in lb.windows(2).enumerate() {
        let d = w[1] - w[0];
        let tol = LOG_TOL * w[0].abs().max(1.0);
        if d < log2_mu0 - tol || d > log2_mu1 + tol {
            return Err(Error::InvariantViolated(format!(
                "beta_{}/beta_{j} = 2^{d} outside [mu0, mu1] = [{}, {}]",
                j + 1,
                log2_mu0.exp2(),
                log2_mu1.exp2()
            )));
        }
    }
    Ok(lb)
}

pub fn beta_sequence(map: &StandardizationMap, sigma: &ParamSequence) -> Result<SampledSequence> {
    let lb = beta_log2(map, sigma)?;
    let vals: Vec<f64> = lb.iter().map(|v| v.exp2()).collect();
    if vals.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Numerical(
            "beta leaves the f64 range at this depth; use beta_log2".into(),
        ));
    }
    SampledSequence::new(vals)
}

/// `(j, k(j), β_j)` as CSV. `β_j` may print as `inf`/`0` at large depth,
/// so `log2_beta` is included.
pub fn to_csv(map: &StandardizationMap, sigma: &ParamSequence) -> String {
    let mut out = String::from("j,k,beta,log2_beta\n");
    for (j, &k) in map.k.iter().enumerate() {
        let lb = sigma.log2_eval(k);
        let _ = writeln!(out, "{j},{k},{:e},{lb}", lb.exp2());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub j: usize,
    pub k: u64,
    /// `log2 A_j`, `A_j = Σ_(i≤j) σ_(k(i))^-r` (a running max for `r = ∞`).
    pub log2_a: f64,
    /// `log2 Σ_(l≤k(j)) σ_l^-r`
    pub log2_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub r: LrIndex,
    pub depth: usize,
    pub c0: u64,
    pub kappa0: u32,
    /// Admissibility constant of the lower bound.
    pub c_lower: f64,
    /// `A_J` (in log2).
    pub log2_a: f64,
    /// `B_J = Σ_(j≤J) σ_j^-r` (in log2), the plain trace of `σ^-1`.
    pub log2_b_plain: f64,
    /// `Σ_(l≤k(J)) σ_l^-r` (in log2), the sum the upper bound is proved against.
    pub log2_b_upper: f64,
    /// `Σ_(k(0)≤l≤k(J)) σ_l^-r` (in log2).
    pub log2_b_lower: f64,
    pub upper_holds: bool,
    pub lower_holds: bool,
    /// Exact verdict for `(σ_j^-1) ∈ ℓ_r`, equal to that of `(β_j^-1)`.
    pub symbolic: MembershipStatus,
    /// Finite evidence: partial sums at `J/8, J/4, J/2, J`.
    pub trace: Vec<TransferRow>,
}

/// Finite-depth check of `(σ_(k(j))^-1) ∈ ℓ_r ⇔ (σ_j^-1) ∈ ℓ_r` through the
/// two inequalities of its proof:
/// `A_J ≤ c0 Σ_(l≤k(J)) σ_l^-r` and `κ0 A_J ≥ c Σ_(k(0)≤l≤k(J)) σ_l^-r`,
/// `c = min(1, d0^((κ0-1) r))`. For `r = ∞` sums become sups.
pub fn lr_transfer_check(
    sigma: &ParamSequence,
    big_n: &ParamSequence,
    r: &LrIndex,
    depth: usize,
) -> Result<TransferReport> {
    let map = build_map(sigma, big_n, depth)?;
    let rf = match r {
        LrIndex::Infinite => None,
        LrIndex::Finite(v) => Some(q_to_f64(v)),
    };
    // log2 of the r-th power of σ_l^-1 (or σ_l^-1 itself for r = ∞)
    let term = |l: u64| -> f64 {
        let x = -sigma.log2_eval(l);
        rf.map_or(x, |rv| rv * x)
    };
    let k_top = *map.k.last().unwrap_or(&0);
    let k_bottom = map.k[0];

    let mut trace = Vec::new();
    let checkpoints: Vec<usize> = [depth / 8, depth / 4, depth / 2, depth]
        .into_iter()
        .filter(|&j| j > 0)
        .collect();
    let mut a = LogSum::new();
    let mut a_sup = f64::NEG_INFINITY;
    let mut b_run = LogSum::new();
    let mut b_sup = f64::NEG_INFINITY;
    let mut l_next = 0u64;
    for (j, &kj) in map.k.iter().enumerate() {
        let t = term(kj);
        a.add(t);
        a_sup = a_sup.max(t);
        while l_next <= kj {
            let u = term(l_next);
            b_run.add(u);
            b_sup = b_sup.max(u);
            l_next += 1;
        }
        if checkpoints.contains(&j) {
            let (la, lb) = if rf.is_some() {
                (a.log2(), b_run.log2())
            } else {
                (a_sup, b_sup)
            };
            trace.push(TransferRow {
                j,
                k: kj,
                log2_a: la,
                log2_b: lb,
            });
        }
    }

    let mut plain = LogSum::new();
    let mut plain_sup = f64::NEG_INFINITY;
    for l in 0..=depth as u64 {
        let u = term(l);
        plain.add(u);
        plain_sup = plain_sup.max(u);
    }
    let mut lower = LogSum::new();
    let mut lower_sup = f64::NEG_INFINITY;
    for l in k_bottom..=k_top {
        let u = term(l);
        lower.add(u);
        lower_sup = lower_sup.max(u);
    }

    let km1 = (map.kappa0 - 1) as f64;
    let log2_c = match rf {
        Some(rv) => (km1 * rv * map.log2_d0).min(0.0),
        None => (km1 * map.log2_d0).min(0.0),
    };
    let (log2_a, log2_b_plain, log2_b_upper, log2_b_lower) = if rf.is_some() {
        (a.log2(), plain.log2(), b_run.log2(), lower.log2())
    } else {
        (a_sup, plain_sup, b_sup, lower_sup)
    };
    let tol = |x: f64| LOG_TOL * x.abs().max(1.0);
    // For sups each value is hit at least once, so the multiplicities drop out.
    let (upper_factor, lower_factor) = if rf.is_some() {
        ((map.c0 as f64).log2(), (map.kappa0 as f64).log2())
    } else {
        (0.0, 0.0)
    };
    let upper_holds = log2_a <= upper_factor + log2_b_upper + tol(log2_a);
    let lower_holds = lower_factor + log2_a + tol(log2_a) >= log2_c + log2_b_lower;

    let report = TransferReport {
        r: r.clone(),
        depth,
        c0: map.c0,
        kappa0: map.kappa0,
        c_lower: log2_c.exp2(),
        log2_a,
        log2_b_plain,
        log2_b_upper,
        log2_b_lower,
        upper_holds,
        lower_holds,
        symbolic: lr_membership(&sigma.inverse(), r).status,
        trace,
    };
    if !upper_holds {
        return Err(Error::InvariantViolated(format!(
            "A_J = 2^{log2_a} exceeds c0 * sum = 2^{}",
            upper_factor + log2_b_upper
        )));
    }
    if !lower_holds {
        return Err(Error::InvariantViolated(format!(
            "kappa0 * A_J = 2^{} is below c * sum = 2^{}",
            lower_factor + log2_a,
            log2_c + log2_b_lower
        )));
    }
    Ok(report)
}

/// `k(j)` from a direct scan over all `k` with no memoization; slow but
/// obviously correct.
pub fn k_by_enumeration(big_n: &ParamSequence, kappa0: u32, j: u64) -> u64 {
    let target = j as f64 - 1.0;
    (0u64..)
        .find(|&k| {
            let v = big_n.log2_eval(k + kappa0 as u64);
            target <= v + LOG_TOL * v.abs().max(1.0)
        })
        .unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_sequence;
    use crate::rational::q_frac;

    fn geo(s: Q) -> ParamSequence {
        ParamSequence::geometric(s)
    }

    #[test]
    fn dyadic_n() {
        let map = build_map(&geo(q_int(0)), &geo(q_int(1)), 1000).unwrap();
        assert_eq!(map.kappa0, 1);
        assert_eq!(map.kappa1, 1);
        assert_eq!(map.j0, 3);
        assert_eq!(map.c0, 4);
        for (j, &k) in map.k.iter().enumerate() {
            assert_eq!(k, (j as u64).saturating_sub(2), "j = {j}");
        }
    }

    #[test]
    fn quartic_n() {
        let map = build_map(&geo(q_int(0)), &geo(q_int(2)), 200).unwrap();
        assert_eq!(map.kappa0, 1);
        for (j, &k) in map.k.iter().enumerate() {
            // max(0, ceil((j-1)/2) - 1)
            let expect = (j as u64 / 2).saturating_sub(1);
            assert_eq!(k, expect, "j = {j}");
        }
    }

    #[test]
    fn slow_n_and_enumeration_agree() {
        let big_n = geo(q_frac(1, 3));
        let map = build_map(&geo(q_int(1)), &big_n, 300).unwrap();
        assert_eq!(map.kappa0, 3);
        for j in 0..=300u64 {
            assert_eq!(map.k[j as usize], k_by_enumeration(&big_n, 3, j));
        }
        let big_n = parse_sequence("3*2^(0.7*j)*(1+j)^2*ln(e+j)^-1").unwrap();
        let k0 = kappa0(&big_n).unwrap();
        let map = build_map(&geo(q_int(0)), &big_n, 300).unwrap();
        for j in 0..=300u64 {
            assert_eq!(map.k[j as usize], k_by_enumeration(&big_n, k0, j));
        }
    }

    #[test]
    fn beta_examples() {
        let one = geo(q_int(0));
        let n = geo(q_int(1));
        let map = build_map(&one, &n, 50).unwrap();
        let b = beta_sequence(&map, &one).unwrap();
        assert!(b.values().iter().all(|v| *v == 1.0));

        let b = beta_sequence(&map, &n).unwrap();
        for (j, v) in b.values().iter().enumerate() {
            assert_eq!(*v, 2f64.powi((j as i32 - 2).max(0)));
        }
        let csv = to_csv(&map, &n);
        assert!(csv.starts_with("j,k,beta,log2_beta\n0,0,"));
        assert_eq!(csv.lines().count(), 52);
    }

    #[test]
    fn transfer_examples() {
        let n = geo(q_int(1));
        let rep = lr_transfer_check(&geo(q_int(0)), &n, &LrIndex::int(1), 100).unwrap();
        assert!((rep.log2_a.exp2() - 101.0).abs() < 1e-9);
        assert!((rep.log2_b_upper.exp2() - 99.0).abs() < 1e-9);
        assert_eq!(rep.symbolic, MembershipStatus::NotMember);

        let rep = lr_transfer_check(&geo(q_int(1)), &n, &LrIndex::int(1), 100).unwrap();
        assert_eq!(rep.symbolic, MembershipStatus::Member);
        assert!(rep.log2_a.exp2() < 4.0 * 2.0 + 1e-9);

        let rep = lr_transfer_check(&parse_sequence("(1+j)").unwrap(), &n, &LrIndex::int(1), 1000).unwrap();
        assert_eq!(rep.symbolic, MembershipStatus::NotMember);
        assert!(rep
            .trace
            .windows(2)
            .all(|w| w[1].log2_a > w[0].log2_a && w[1].log2_b > w[0].log2_b));

        let rep = lr_transfer_check(&geo(q_int(-1)), &geo(q_frac(1, 2)), &LrIndex::Infinite, 1000).unwrap();
        assert_eq!(rep.symbolic, MembershipStatus::NotMember);
        assert!(rep.log2_a > 500.0);
    }
}
