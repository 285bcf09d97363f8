//! Exact rationals and interval-set algebra with explicit endpoint topology.

mod interval;
mod rational;
mod set;

pub use interval::Interval;
pub use rational::{q, Rational};
pub use set::{affine_image, measure, set_combine, IntervalSet, SetOp};
