//! The rectangle construction for `1 < p`, `q > min{p, 2}`: floored weights
//! `γ̃_j = max(|γ_j|, 10³ N0^{-1} λ0^{-j})`, cube counts, and the norm and
//! integral proxies of the test function.

use serde::{Deserialize, Serialize};

use super::SeqInput;
use crate::error::{Error, Result};
use crate::lr::{interp_index, lr_membership, reverse_holder_witness_with_schedule, InterpKind, LrIndex};
use crate::numeric::LogSum;
use crate::rational::{q_to_f64, Q};
use crate::seqcore::{assumption_n_check, ParamSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct Case3Spec {
    pub sigma: ParamSequence,
    pub big_n: ParamSequence,
    pub n: u32,
    pub p: LrIndex,
    pub q: LrIndex,
}

impl Case3Spec {
    /// `1 - 1/p + 1/q`
    pub fn exponent(&self) -> Q {
        Q::from_integer(1.into()) - self.p.reciprocal() + self.q.reciprocal()
    }

    fn check(&self) -> Result<()> {
        if self.p <= LrIndex::int(1) {
            return Err(Error::InvalidInput(format!(
                "the rectangle construction needs 1 < p, got p = {}",
                self.p
            )));
        }
        if self.p.is_infinite() {
            return Err(Error::InvalidInput("the rectangle construction needs p < inf".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case3Row {
    pub j: usize,
    pub gamma_tilde: f64,
    /// `κ_j = Σ_{l=1}^j γ̃_l`
    pub kappa: f64,
    /// `log2 ⌊N_j γ̃_j⌋·⌊N_j⌋^{n-1}`
    pub log2_m_exact: f64,
    /// `log2 N_j^n γ̃_j`
    pub log2_m_asymptotic: f64,
}

impl Case3Row {
    /// exact / asymptotic cube count
    pub fn count_ratio(&self) -> f64 {
        (self.log2_m_exact - self.log2_m_asymptotic).exp2()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case3Report {
    pub k: usize,
    pub rows: Vec<Case3Row>,
    /// `‖γ̃‖_{ℓ1}` over `j ≤ K`
    pub gamma_tilde_l1: f64,
    pub norm_proxy: f64,
    /// `‖γ̃‖_{ℓ1}^{1/q}` (`1` for `q = ∞`)
    pub norm_bound: f64,
    /// `(K', Σ_{j≤K'} σ_j^{-1} γ̃_j^{1-1/p+1/q})` at `K/8, K/4, K/2, K`
    pub integral_partial: Vec<(usize, f64)>,
    /// Exact verdict for the B-condition `σ^{-1} ∈ ℓ_r` of this case.
    pub condition_index: LrIndex,
    pub condition_member: bool,
    pub integral_increasing: bool,
}

impl Case3Report {
    pub fn count_ratio_range(&self) -> (f64, f64) {
        self.rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
            let c = r.count_ratio();
            (lo.min(c), hi.max(c))
        })
    }
}

/// `log2 ⌊2^x⌋`; the floor is invisible in `f64` once `x > 52`.
fn log2_floor(x: f64) -> f64 {
    if x > 52.0 {
        x
    } else {
        x.exp2().floor().log2()
    }
}

/// Symbolic `γ` must lie in `ℓ_1`; a sampled `γ` is taken as given.
pub fn case3_series(spec: &Case3Spec, gamma: &SeqInput, k: usize) -> Result<Case3Report> {
    spec.check()?;
    if k < 1 {
        return Err(Error::InvalidInput("K must be >= 1".into()));
    }
    if let SeqInput::Param(g) = gamma {
        let v = lr_membership(g, &LrIndex::int(1));
        if !v.is_member() {
            return Err(Error::InvalidInput(format!("gamma = {g} is not in l_1: {}", v.reason)));
        }
    }
    let n_rep = assumption_n_check(&spec.big_n);
    if !n_rep.satisfies_assumption_n {
        return Err(Error::InvalidInput(format!(
            "N = {} violates the Assumption",
            spec.big_n
        )));
    }
    let log2_lambda0 = n_rep.lambda0.log2();
    let log2_n0 = spec.big_n.log2_eval(0);
    let nf = spec.n as f64;
    let inv_p = q_to_f64(&spec.p.reciprocal());
    let q_over_p = match &spec.q {
        LrIndex::Infinite => None,
        LrIndex::Finite(q) => Some(q_to_f64(q) * inv_p),
    };
    let e = q_to_f64(&spec.exponent());

    let mut rows = Vec::with_capacity(k);
    let mut kappa = 0.0;
    let mut norm = LogSum::new();
    let mut norm_sup = f64::NEG_INFINITY;
    let mut integral = LogSum::new();
    let checkpoints: Vec<usize> = [k / 8, k / 4, k / 2, k].into_iter().filter(|&c| c > 0).collect();
    let mut integral_partial = Vec::new();
    for j in 1..=k {
        let floor = (1000f64).log2() - log2_n0 - j as f64 * log2_lambda0;
        let lg = gamma.log2_abs(j)?.max(floor);
        let gt = lg.exp2();
        kappa += gt;
        let log2_nj = spec.big_n.log2_eval(j as u64);
        let log2_m_exact = log2_floor(log2_nj + lg) + (nf - 1.0) * log2_floor(log2_nj);
        let log2_m_asymptotic = nf * log2_nj + lg;
        // M_j / (N_j^n γ̃_j) ≤ 1, raised to q/p, times γ̃_j
        let shrink = log2_m_exact - log2_m_asymptotic;
        match q_over_p {
            Some(qp) => norm.add(lg + qp * shrink),
            None => norm_sup = norm_sup.max(inv_p * shrink),
        }
        integral.add(-spec.sigma.log2_eval(j as u64) + e * lg);
        if checkpoints.contains(&j) {
            integral_partial.push((j, integral.log2().exp2()));
        }
        rows.push(Case3Row {
            j,
            gamma_tilde: gt,
            kappa,
            log2_m_exact,
            log2_m_asymptotic,
        });
    }
    let (norm_proxy, norm_bound) = match (&spec.q, q_over_p) {
        (LrIndex::Finite(q), Some(_)) => {
            let qf = q_to_f64(q);
            ((norm.log2() / qf).exp2(), kappa.powf(1.0 / qf))
        }
        _ => (norm_sup.exp2(), 1.0),
    };
    let condition_index = if spec.q > spec.p {
        interp_index(&spec.p, &spec.q, &InterpKind::BminusP)?
    } else {
        LrIndex::Infinite
    };
    let condition_member = lr_membership(&spec.sigma.inverse(), &condition_index).is_member();
    let integral_increasing = integral_partial.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(Case3Report {
        k,
        rows,
        gamma_tilde_l1: kappa,
        norm_proxy,
        norm_bound,
        integral_partial,
        condition_index,
        condition_member,
        integral_increasing,
    })
}

/// `γ ∈ ℓ_1` with `Σ σ_j^{-1} γ_j^{1-1/p+1/q} = ∞`, from the reverse-Hölder
/// witness for `σ^{-1} ∉ ℓ_{pq/(q-p)}` at `r = 1/(1-1/p+1/q)`.
pub fn case3_witness(spec: &Case3Spec, len: usize) -> Result<Vec<f64>> {
    spec.check()?;
    let e = spec.exponent();
    let r = LrIndex::finite(e.recip())?;
    let w = reverse_holder_witness_with_schedule(&spec.sigma.inverse(), &r, &[len])?;
    let inv_e = q_to_f64(&e.recip());
    Ok(w.b.iter().map(|d| d.powf(inv_e)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_sequence;
    use crate::rational::q_int;

    fn spec(sigma: &str, p: LrIndex, q: LrIndex) -> Case3Spec {
        Case3Spec {
            sigma: parse_sequence(sigma).unwrap(),
            big_n: ParamSequence::geometric(q_int(1)),
            n: 1,
            p,
            q,
        }
    }

    #[test]
    fn rejects_p_at_most_one() {
        let g = SeqInput::Param(parse_sequence("(1+j)^-2").unwrap());
        assert!(case3_series(&spec("1", LrIndex::int(1), LrIndex::int(2)), &g, 10).is_err());
        let not_l1 = SeqInput::Param(parse_sequence("(1+j)^-1").unwrap());
        assert!(case3_series(&spec("1", LrIndex::int(2), LrIndex::int(2)), &not_l1, 10).is_err());
    }

    #[test]
    fn bounded_example() {
        let g = SeqInput::Param(parse_sequence("(1+j)^-2").unwrap());
        let rep = case3_series(&spec("1", LrIndex::int(2), LrIndex::int(2)), &g, 10_000).unwrap();
        assert!(rep.norm_proxy <= rep.norm_bound * (1.0 + 1e-12));
        // σ = 1, e = 1: the integral proxy is Σ γ̃_j, bounded by π²/6 plus the floor.
        assert!(rep.integral_partial.last().unwrap().1 < 1000.0 + 1.0);
        let (lo, hi) = rep.count_ratio_range();
        assert!(lo >= 0.25 && hi <= 1.0, "{lo} {hi}");
    }

    #[test]
    fn witness_breaks_the_integral() {
        let sp = spec("1", LrIndex::frac(3, 2), LrIndex::int(3));
        let gamma = case3_witness(&sp, 1 << 14).unwrap();
        assert!(gamma.iter().sum::<f64>() < 10.0);
        let rep = case3_series(&sp, &SeqInput::Sampled(gamma), 1 << 14).unwrap();
        assert!(!rep.condition_member);
        assert!(rep.integral_increasing);
    }
}
