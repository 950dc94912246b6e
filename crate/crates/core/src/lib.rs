//! Decision procedures for regular-distribution content of Besov and
//! Triebel–Lizorkin spaces of generalized smoothness `B^{σ,N}_{p,q}`,
//! `F^{σ,N}_{p,q}`, over the sequence family `C·2^(s·j)·(1+j)^b·ln(e+j)^c`,
//! together with desk-scale numerical checks of the constructions behind them.

pub mod decide;
pub mod error;
pub mod grammar;
pub mod lr;
mod numeric;
pub mod rational;
pub mod report;
pub mod seqcore;
mod serde_q;
pub mod standardize;
pub mod verify;

pub use decide::{regularity, CaseId, Family, RegularityVerdict, SpaceSpec, VerdictRecord};
pub use error::{Error, ParseError, Result};
pub use grammar::{parse_sequence, print_sequence};
pub use lr::{conjugate, lr_membership, LrIndex, MembershipStatus, MembershipVerdict};
pub use rational::Q;
pub use seqcore::{ParamSequence, SampledSequence};
