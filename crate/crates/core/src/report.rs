//! Markdown tables regenerated from the decision engine: the classical table
//! for `σ = 2^(sj)`, `N = 2^j`, and the `b`-thresholds for
//! `σ = 2^(sj)(1+j)^b` at the critical `s`.
//!
//! Boundaries are located by rational bisection and snapped to the simplest
//! rational in the final bracket, then re-tested at that point so the table
//! records whether the boundary itself is included.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::decide::{classical_regularity, regularity, Family, SpaceSpec};
use crate::error::{Error, Result};
use crate::lr::LrIndex;
use crate::rational::{q_display, q_frac, q_int, q_pos_part, simplest_between, Q};
use crate::seqcore::ParamSequence;

/// Bisection steps; the bracket ends up `2^-48` times the initial width.
const BISECT_STEPS: u32 = 48;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundary {
    #[serde(with = "crate::serde_q")]
    pub value: Q,
    /// Whether the predicate holds at the boundary itself.
    pub attained: bool,
}

impl Boundary {
    pub fn describe(&self, var: &str) -> String {
        let op = if self.attained { ">=" } else { ">" };
        format!("{var} {op} {}", q_display(&self.value))
    }
}

/// Threshold of a monotone predicate on `[lo, hi]` with `pred(lo)` false and
/// `pred(hi)` true. The snapped value is re-checked: the predicate must fail
/// just below it and hold just above it.
pub fn find_boundary(pred: impl Fn(&Q) -> Result<bool>, lo: &Q, hi: &Q) -> Result<Boundary> {
    if pred(lo)? || !pred(hi)? {
        return Err(Error::InvalidInput(format!(
            "boundary search needs pred({}) false and pred({}) true",
            q_display(lo),
            q_display(hi)
        )));
    }
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let two = q_int(2);
    for _ in 0..BISECT_STEPS {
        let mid = (&a + &b) / &two;
        if pred(&mid)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    let value = simplest_between(&a, &b);
    let eps = (hi - lo) / Q::from_integer(num_bigint::BigInt::one() << (BISECT_STEPS + 8));
    if pred(&(&value - &eps))? || !pred(&(&value + &eps))? {
        return Err(Error::InvariantViolated(format!(
            "snapped boundary {} does not separate the predicate",
            q_display(&value)
        )));
    }
    Ok(Boundary {
        attained: pred(&value)?,
        value,
    })
}

fn index_label(r: &LrIndex) -> String {
    match r {
        LrIndex::Infinite => "inf".into(),
        LrIndex::Finite(v) => q_display(v),
    }
}

/// Grid of `p`, `q` used by the classical sweep.
pub fn classical_grid() -> Vec<LrIndex> {
    vec![
        LrIndex::frac(1, 4),
        LrIndex::frac(1, 2),
        LrIndex::int(1),
        LrIndex::frac(3, 2),
        LrIndex::int(2),
        LrIndex::int(3),
        LrIndex::Infinite,
    ]
}

/// Smoothness threshold of the classical table at `(p, q, n)`.
pub fn classical_threshold(family: Family, p: &LrIndex, q: &LrIndex, n: u32) -> Result<Boundary> {
    let pred = |s: &Q| classical_regularity(family, s, p, q, n);
    let lo = q_int(-4);
    let hi = q_int(4) + q_int(n as i64) * q_pos_part(p.reciprocal() - Q::one());
    find_boundary(pred, &lo, &hi)
}

pub fn classical_report() -> Result<String> {
    let mut out = String::new();
    out.push_str("# Regular distributions in the classical scales\n\n");
    out.push_str("Containment in L1_loc for sigma_j = 2^(s j), N_j = 2^j.\n\n");
    out.push_str("## F^s_{p,q}\n\n");
    out.push_str("| p | s | q |\n|---|---|---|\n");
    out.push_str("| 0 < p < 1 | s >= n(1/p - 1) | 0 < q <= inf |\n");
    out.push_str("| 1 <= p < inf | s > 0 | 0 < q <= inf |\n");
    out.push_str("| 1 <= p < inf | s = 0 | 0 < q <= 2 |\n\n");
    out.push_str("## B^s_{p,q}\n\n");
    out.push_str("| p | s | q |\n|---|---|---|\n");
    out.push_str("| 0 < p <= inf | s > n(1/p - 1)_+ | 0 < q <= inf |\n");
    out.push_str("| 0 < p <= 1 | s = n(1/p - 1) | 0 < q <= 1 |\n");
    out.push_str("| 1 < p <= inf | s = 0 | 0 < q <= min(p, 2) |\n\n");
    let grid = classical_grid();
    for n in 1..=2u32 {
        for family in [Family::F, Family::B] {
            let _ = writeln!(out, "## Sweep: {family}, n = {n} (rows p, columns q)\n");
            out.push_str("| p \\ q |");
            for q in &grid {
                let _ = write!(out, " {} |", index_label(q));
            }
            out.push_str("\n|---|");
            out.push_str(&"---|".repeat(grid.len()));
            out.push('\n');
            for p in &grid {
                if family == Family::F && p.is_infinite() {
                    continue;
                }
                let _ = write!(out, "| {} |", index_label(p));
                for q in &grid {
                    let b = classical_threshold(family, p, q, n)?;
                    let _ = write!(out, " {} |", b.describe("s"));
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// One region of the `b`-threshold table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRegion {
    pub label: &'static str,
    pub family: Family,
    pub region: &'static str,
    pub formula: &'static str,
    pub probes: Vec<(LrIndex, LrIndex)>,
}

pub fn threshold_regions() -> Vec<ThresholdRegion> {
    vec![
        ThresholdRegion {
            label: "i",
            family: Family::B,
            region: "0 < p <= 1, 1 < q <= inf, s = n(1/p - 1)",
            formula: "(q-1)/q",
            probes: vec![
                (LrIndex::frac(1, 2), LrIndex::int(2)),
                (LrIndex::int(1), LrIndex::int(3)),
                (LrIndex::frac(1, 4), LrIndex::Infinite),
            ],
        },
        ThresholdRegion {
            label: "ii",
            family: Family::B,
            region: "1 < p <= 2, min(p,2) < q <= inf, s = 0",
            formula: "(q-p)/(pq)",
            probes: vec![
                (LrIndex::frac(3, 2), LrIndex::int(2)),
                (LrIndex::int(2), LrIndex::int(4)),
                (LrIndex::frac(5, 4), LrIndex::Infinite),
            ],
        },
        ThresholdRegion {
            label: "iii",
            family: Family::B,
            region: "2 < p <= inf, min(p,2) < q <= inf, s = 0",
            formula: "(q-2)/(2q)",
            probes: vec![
                (LrIndex::int(3), LrIndex::int(4)),
                (LrIndex::int(4), LrIndex::Infinite),
                (LrIndex::Infinite, LrIndex::int(3)),
            ],
        },
        ThresholdRegion {
            label: "iv",
            family: Family::F,
            region: "1 <= p < inf, 2 < q <= inf, s = 0",
            formula: "(q-2)/(2q)",
            probes: vec![
                (LrIndex::int(1), LrIndex::int(3)),
                (LrIndex::int(2), LrIndex::Infinite),
                (LrIndex::frac(3, 2), LrIndex::int(4)),
            ],
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdProbe {
    pub label: String,
    pub family: Family,
    pub n: u32,
    pub p: LrIndex,
    pub q: LrIndex,
    #[serde(with = "crate::serde_q")]
    pub s: Q,
    pub boundary: Boundary,
}

/// Boundary `b` for `σ = 2^(sj)(1+j)^b`, `N = 2^j`, with `s = n(1/p-1)` in
/// region i and `s = 0` otherwise.
pub fn threshold_probe(label: &str, family: Family, n: u32, p: &LrIndex, q: &LrIndex) -> Result<ThresholdProbe> {
    let s = if label == "i" {
        q_int(n as i64) * (p.reciprocal() - Q::one())
    } else {
        Q::zero()
    };
    let big_n = ParamSequence::geometric(Q::one());
    let pred = |b: &Q| -> Result<bool> {
        let sigma = ParamSequence::from_exponents(s.clone(), b.clone(), Q::zero());
        let spec = SpaceSpec::new(family, n, p.clone(), q.clone(), sigma, big_n.clone())?;
        Ok(regularity(&spec)?.contained)
    };
    let boundary = find_boundary(pred, &q_int(-8), &q_int(8))?;
    Ok(ThresholdProbe {
        label: label.to_string(),
        family,
        n,
        p: p.clone(),
        q: q.clone(),
        s,
        boundary,
    })
}

pub fn threshold_probes(n: u32) -> Result<Vec<ThresholdProbe>> {
    let mut out = Vec::new();
    for region in threshold_regions() {
        for (p, q) in &region.probes {
            out.push(threshold_probe(region.label, region.family, n, p, q)?);
        }
    }
    Ok(out)
}

/// The `b`-threshold table (`report example48`).
pub fn example48_report() -> Result<String> {
    let mut out = String::new();
    out.push_str("# Thresholds in b for sigma_j = 2^(s j) (1+j)^b, N_j = 2^j, n = 1\n\n");
    out.push_str("| region | space | parameters | condition | q = inf |\n|---|---|---|---|---|\n");
    for r in threshold_regions() {
        let at_inf = match r.formula {
            "(q-1)/q" => "b > 1",
            "(q-p)/(pq)" => "b > 1/p",
            _ => "b > 1/2",
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | b > {} | {} |",
            r.label, r.family, r.region, r.formula, at_inf
        );
    }
    out.push_str("\n## Boundary b recovered by bisection\n\n");
    out.push_str("| region | space | p | q | s | boundary | formula value |\n|---|---|---|---|---|---|---|\n");
    let regions = threshold_regions();
    for probe in threshold_probes(1)? {
        let formula = regions
            .iter()
            .find(|r| r.label == probe.label)
            .map(|r| r.formula)
            .unwrap_or("?");
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} = {} |",
            probe.label,
            probe.family,
            index_label(&probe.p),
            index_label(&probe.q),
            q_display(&probe.s),
            probe.boundary.describe("b"),
            formula,
            q_display(&formula_value(formula, &probe.p, &probe.q)),
        );
    }
    Ok(out)
}

/// Closed-form value of a threshold formula, with `q = ∞` taken as the limit.
pub fn formula_value(formula: &str, p: &LrIndex, q: &LrIndex) -> Q {
    let iq = q.reciprocal();
    match formula {
        "(q-1)/q" => Q::one() - iq,
        "(q-p)/(pq)" => p.reciprocal() - iq,
        _ => q_frac(1, 2) - iq,
    }
}
