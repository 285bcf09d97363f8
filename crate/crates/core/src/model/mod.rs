//! Problem instances, I-state size dynamics, sensing and simulation.

mod instance;
mod sensing;
mod sim;
mod strategy;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::Rational;

pub use instance::{derived_a, ProblemInstance};
pub use sensing::{posterior_from_sensing, worst_case_cells, SensingVector};
pub use sim::{first_violation, simulate, simulate_policy, Policy, SimStep, SimTrace, Simulation};
pub use strategy::StrategyWord;

/// An even split of the prior into `i` cells. `Plus` and `Minus` are the
/// basis splits `a` and `a + 1` of a given instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Plus,
    Minus,
    Split(u64),
}

impl Action {
    /// Cell count for `p`, without checking sensor capability.
    pub fn divisor(&self, p: &ProblemInstance) -> u64 {
        match self {
            Action::Plus => p.a(),
            Action::Minus => p.a().saturating_add(1),
            Action::Split(i) => *i,
        }
    }

    pub fn divisor_checked(&self, p: &ProblemInstance) -> Result<u64> {
        let i = self.divisor(p);
        if i == 0 {
            return Err(Error::InvalidArgument(
                "a split needs at least one cell".into(),
            ));
        }
        if i > p.max_split() {
            return Err(Error::ExceedsSensorCapability {
                parts: i,
                max: p.max_split(),
            });
        }
        Ok(i)
    }

    /// Rewrites `Split(a)` / `Split(a+1)` as `Plus` / `Minus`.
    pub fn normalize(&self, p: &ProblemInstance) -> Action {
        match self {
            Action::Split(i) if *i == p.a() => Action::Plus,
            Action::Split(i) if *i == p.a().saturating_add(1) => Action::Minus,
            other => *other,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Plus => f.write_str("+"),
            Action::Minus => f.write_str("-"),
            Action::Split(i) => write!(f, "s{}", i),
        }
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(x + delta) / i` for `act = Split(i)`.
pub fn step_size(x: &Rational, act: Action, p: &ProblemInstance) -> Result<Rational> {
    let i = act.divisor_checked(p)?;
    Ok(p.split(x, i))
}

/// `i * y - delta`, the exact inverse of [`step_size`].
pub fn step_size_inv(y: &Rational, act: Action, p: &ProblemInstance) -> Result<Rational> {
    let i = act.divisor_checked(p)?;
    Ok(p.split_inv(y, i))
}

impl ProblemInstance {
    pub fn split(&self, x: &Rational, i: u64) -> Rational {
        &(x + self.delta()) / &Rational::from(i)
    }

    pub fn split_inv(&self, y: &Rational, i: u64) -> Rational {
        &(y * &Rational::from(i)) - self.delta()
    }

    /// `f+(x) = (x + delta) / a`
    pub fn f_plus(&self, x: &Rational) -> Rational {
        self.split(x, self.a())
    }

    /// `f-(x) = (x + delta) / (a + 1)`
    pub fn f_minus(&self, x: &Rational) -> Rational {
        self.split(x, self.a().saturating_add(1))
    }

    pub fn f_plus_inv(&self, y: &Rational) -> Rational {
        self.split_inv(y, self.a())
    }

    pub fn f_minus_inv(&self, y: &Rational) -> Rational {
        self.split_inv(y, self.a().saturating_add(1))
    }

    /// Fixed point `delta / (i - 1)` of the split map, for `i > 1`.
    pub fn fixed_point(&self, i: u64) -> Option<Rational> {
        (i > 1).then(|| self.delta() / &Rational::from(i - 1))
    }
}
