//! Independent oracles shared by the integration targets.
#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::Rng;
use regdist_core::decide::{Family, SpaceSpec};
use regdist_core::lr::LrIndex;
use regdist_core::rational::{q_frac, q_int, q_to_f64, Q};
use regdist_core::seqcore::{assumption_n_check, ParamSequence};

pub fn idx(text: &str) -> LrIndex {
    LrIndex::parse(text).unwrap()
}

pub fn seq(text: &str) -> ParamSequence {
    regdist_core::grammar::parse_sequence(text).unwrap()
}

/// The classical table for `σ = 2^(sj)`, `N = 2^j`, typed in by hand.
pub fn classical_by_hand(family: Family, s: &Q, p: &LrIndex, q: &LrIndex, n: u32) -> bool {
    let one = Q::one();
    let zero = Q::zero();
    let crit = q_int(n as i64) * (p.reciprocal() - &one);
    let crit_plus = if crit > zero { crit.clone() } else { zero.clone() };
    let p_lt_1 = p.reciprocal() > one;
    let p_le_1 = p.reciprocal() >= one;
    let q_le = |bound: &LrIndex| q.reciprocal() >= bound.reciprocal();
    match family {
        Family::F => {
            (p_lt_1 && *s >= crit) || (!p_lt_1 && *s > zero) || (!p_lt_1 && *s == zero && q_le(&LrIndex::int(2)))
        }
        Family::B => {
            let min_p2 = if p.reciprocal() > q_frac(1, 2) {
                p.clone()
            } else {
                LrIndex::int(2)
            };
            *s > crit_plus
                || (p_le_1 && *s == crit && q_le(&LrIndex::int(1)))
                || (!p_le_1 && *s == zero && q_le(&min_p2))
        }
    }
}

/// `k + log2 u(2^k)` for `u = (1+x)^β ln(e+x)^γ`, with the `(1+β)k` part
/// kept separate so it cannot swamp the logarithmic term when `k` is huge.
fn condensed(beta: f64, gamma: f64, k: f64) -> f64 {
    let tail = if k > 60.0 {
        0.0
    } else {
        (-k).exp2().ln_1p() / std::f64::consts::LN_2
    };
    let ln_e_plus = if k > 60.0 {
        k * std::f64::consts::LN_2
    } else {
        (std::f64::consts::E + k.exp2()).ln()
    };
    (1.0 + beta) * k + beta * tail + gamma * ln_e_plus.log2()
}

/// Membership of `u_j = 2^(tj)(1+j)^β ln(e+j)^γ` in `ℓ_r`, decided without
/// the Bertrand rule: `r = ∞` by sampling `log2 u` far out, finite `r` by
/// Cauchy condensation applied until the condensed terms show a clear
/// geometric rate.
pub fn lr_by_condensation(t: &Q, beta: &Q, gamma: &Q, r: &LrIndex) -> bool {
    let (t, beta, gamma) = (q_to_f64(t), q_to_f64(beta), q_to_f64(gamma));
    match r {
        LrIndex::Infinite => {
            if t != 0.0 {
                return t < 0.0;
            }
            // log2 u at x = 2^k is condensed(..) - k; eventually monotone
            let probe = |k: f64| condensed(beta, gamma, k) - k;
            let (a, b, c) = (probe(200.0), probe(400.0), probe(800.0));
            !(c > b + 1e-9 && b > a)
        }
        LrIndex::Finite(rq) => {
            let rf = q_to_f64(rq);
            if t != 0.0 {
                // ratio test: u_{j+1}^r/u_j^r → 2^(tr)
                return (t * rf).exp2() < 1.0;
            }
            let (beta, gamma) = (beta * rf, gamma * rf);
            // first condensation: terms 2^k u(2^k)^r
            let slope1 = (condensed(beta, gamma, 2.0e6) - condensed(beta, gamma, 1.0e6)) / 1.0e6;
            if slope1.abs() > 1e-3 {
                return slope1 < 0.0;
            }
            // flat rate means 1 + βr = 0; condense again: 2^m (2^m)^{γr}-type terms
            let level2 = |m: f64| m + gamma * (m + std::f64::consts::LN_2.log2());
            let slope2 = (level2(800.0) - level2(400.0)) / 400.0;
            if slope2.abs() > 1e-3 {
                return slope2 < 0.0;
            }
            // flat again: harmonic-like, divergent
            false
        }
    }
}

pub fn rational_from(rng: &mut impl Rng, num: std::ops::RangeInclusive<i64>, den: &[i64]) -> Q {
    let d = den[rng.gen_range(0..den.len())];
    q_frac(rng.gen_range(num), d)
}

pub const INDEX_POOL: [&str; 9] = ["1/4", "1/2", "3/4", "1", "3/2", "2", "5/2", "3", "inf"];

pub fn random_index(rng: &mut impl Rng, allow_inf: bool) -> LrIndex {
    loop {
        let r = idx(INDEX_POOL[rng.gen_range(0..INDEX_POOL.len())]);
        if allow_inf || !r.is_infinite() {
            return r;
        }
    }
}

/// Random `N` satisfying the Assumption: positive exponential rate.
/// Redrawn until the ratio bound `λ0 > 1` also holds at small `j`.
pub fn random_big_n(rng: &mut impl Rng) -> ParamSequence {
    loop {
        let s = rational_from(rng, 1..=6, &[2, 3, 4]);
        let b = rational_from(rng, -2..=2, &[1, 2]);
        let c = rational_from(rng, -2..=2, &[1, 2]);
        let scale = [1.0, 0.5, 3.0][rng.gen_range(0..3)];
        let n = ParamSequence::new(scale, s, b, c).unwrap();
        if assumption_n_check(&n).satisfies_assumption_n {
            return n;
        }
    }
}

/// Random `σ`, biased toward the critical rates where the verdicts are delicate.
pub fn random_sigma(rng: &mut impl Rng, big_n: &ParamSequence, n: u32, p: &LrIndex) -> ParamSequence {
    let crit = q_int(n as i64) * (p.reciprocal() - Q::one()) * &big_n.s;
    let s = match rng.gen_range(0..4) {
        0 => Q::zero(),
        1 => crit,
        _ => rational_from(rng, -8..=8, &[1, 2, 4]),
    };
    let b = rational_from(rng, -6..=6, &[1, 2, 3, 4]);
    let c = rational_from(rng, -4..=4, &[1, 2]);
    ParamSequence::new(rng.gen_range(0.1..10.0), s, b, c).unwrap()
}

pub fn random_spec(rng: &mut impl Rng, family: Family) -> SpaceSpec {
    let n = rng.gen_range(1..=3);
    let p = random_index(rng, family == Family::B);
    let q = random_index(rng, true);
    let big_n = random_big_n(rng);
    let sigma = random_sigma(rng, &big_n, n, &p);
    SpaceSpec::new(family, n, p, q, sigma, big_n).unwrap()
}
