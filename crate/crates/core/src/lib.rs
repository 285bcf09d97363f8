//! Exact analysis of one-dimensional privacy-preserving tracking.
//!
//! A robot tracks a target on a line with an interval information state
//! whose size must stay within `[r_p, r_t]` forever. The crate classifies
//! problem instances, computes feasible initial sizes and the forced
//! strategy for boundary instances, and checks every answer against an
//! independent fixpoint oracle.

pub mod analysis;
pub mod boundary;
pub mod classifier;
pub mod error;
pub mod exactnum;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use exactnum::{q, Interval, IntervalSet, Rational, SetOp};
pub use model::{Action, ProblemInstance, StrategyWord};
