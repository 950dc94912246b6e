//! Desk-scale numerical checks of the constructions behind the necessity
//! proofs. Everything here is one-dimensional; the dimension `n` only enters
//! through exponents.

use std::fmt;

use crate::error::{Error, Result};
use crate::seqcore::ParamSequence;

pub mod basic;
pub mod case3;
pub mod config;
pub mod extremal;
pub mod lacunary;

/// A coefficient sequence given either symbolically or as sampled values.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqInput {
    Param(ParamSequence),
    Sampled(Vec<f64>),
}

impl SeqInput {
    /// `log2 |x_j|`; `-∞` for a zero entry.
    pub fn log2_abs(&self, j: usize) -> Result<f64> {
        match self {
            SeqInput::Param(p) => Ok(p.log2_eval(j as u64)),
            SeqInput::Sampled(v) => v.get(j).map(|x| x.abs().log2()).ok_or_else(|| {
                Error::InvalidInput(format!("sampled sequence has {} terms, index {j} requested", v.len()))
            }),
        }
    }

    pub fn abs(&self, j: usize) -> Result<f64> {
        self.log2_abs(j).map(f64::exp2)
    }
}

impl fmt::Display for SeqInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqInput::Param(p) => write!(f, "{p}"),
            SeqInput::Sampled(v) => write!(f, "sampled[{}]", v.len()),
        }
    }
}
