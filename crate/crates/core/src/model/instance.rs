use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Interval, Rational};

use super::Action;

/// Problem instance `(eta0, r_p, r_t, delta, c)`.
///
/// `delta` is the full per-step growth of the I-state diameter: the target
/// moves at most `delta / 2` either way, so a prior is the posterior plus
/// `delta`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct ProblemInstance {
    r_p: Rational,
    r_t: Rational,
    delta: Rational,
    c: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta0: Option<Interval>,
    a: u64,
}

#[derive(Deserialize)]
struct RawInstance {
    r_p: Rational,
    r_t: Rational,
    delta: Rational,
    c: u64,
    #[serde(default)]
    eta0: Option<Interval>,
}

impl TryFrom<RawInstance> for ProblemInstance {
    type Error = Error;
    fn try_from(r: RawInstance) -> Result<Self> {
        let p = ProblemInstance::new(r.r_p, r.r_t, r.delta, r.c)?;
        match r.eta0 {
            Some(e) => p.with_eta0(e),
            None => Ok(p),
        }
    }
}

impl ProblemInstance {
    pub fn new(r_p: Rational, r_t: Rational, delta: Rational, c: u64) -> Result<Self> {
        for (name, v) in [("r_p", &r_p), ("r_t", &r_t), ("delta", &delta)] {
            if !v.is_positive() {
                return Err(Error::InvalidInstance(format!(
                    "{} must be positive, got {}",
                    name, v
                )));
            }
        }
        if c == 0 {
            return Err(Error::InvalidInstance("c must be at least 1".into()));
        }
        let a = ceil_ratio_u64(&delta, &r_t);
        Ok(ProblemInstance {
            r_p,
            r_t,
            delta,
            c,
            eta0: None,
            a,
        })
    }

    /// Builds an instance from exact decimal or `p/q` strings.
    pub fn parse(r_p: &str, r_t: &str, delta: &str, c: u64) -> Result<Self> {
        Self::new(
            Rational::parse(r_p)?,
            Rational::parse(r_t)?,
            Rational::parse(delta)?,
            c,
        )
    }

    /// Attaches an initial I-state; its size must lie in `[r_p, r_t]`.
    pub fn with_eta0(mut self, eta0: Interval) -> Result<Self> {
        self.check_size(&eta0.length())?;
        self.eta0 = Some(eta0);
        Ok(self)
    }

    pub fn r_p(&self) -> &Rational {
        &self.r_p
    }

    pub fn r_t(&self) -> &Rational {
        &self.r_t
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn eta0(&self) -> Option<&Interval> {
        self.eta0.as_ref()
    }

    /// `ceil(delta / r_t)`, saturating at `u64::MAX`.
    pub fn a(&self) -> u64 {
        self.a
    }

    /// Largest legal split: the sensor's `c` cuts give `c + 1` cells.
    pub fn max_split(&self) -> u64 {
        self.c.saturating_add(1)
    }

    pub fn plus(&self) -> Action {
        Action::Plus
    }

    pub fn minus(&self) -> Action {
        Action::Minus
    }

    /// `[r_p, r_t]`, or `None` when `r_p > r_t`.
    pub fn bounds(&self) -> Option<Interval> {
        Interval::closed(self.r_p.clone(), self.r_t.clone()).ok()
    }

    pub fn in_bounds(&self, x: &Rational) -> bool {
        &self.r_p <= x && x <= &self.r_t
    }

    pub fn check_size(&self, x: &Rational) -> Result<()> {
        if self.in_bounds(x) {
            Ok(())
        } else {
            Err(Error::InitialSizeOutOfBounds {
                size: x.to_string(),
                lo: self.r_p.to_string(),
                hi: self.r_t.to_string(),
            })
        }
    }

    /// Same parameters multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: &Rational) -> Result<Self> {
        Self::new(
            &self.r_p * lambda,
            &self.r_t * lambda,
            &self.delta * lambda,
            self.c,
        )
    }
}

fn ceil_ratio_u64(num: &Rational, den: &Rational) -> u64 {
    (num / den).ceil().to_u64().unwrap_or(u64::MAX)
}

/// `ceil(delta / r_t)` for a valid instance.
pub fn derived_a(p: &ProblemInstance) -> u64 {
    p.a()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    #[test]
    fn derived_a_examples() {
        let e1 = ProblemInstance::parse("76", "101.3", "227", 4).unwrap();
        assert_eq!(derived_a(&e1), 3);
        assert_eq!(
            derived_a(&ProblemInstance::parse("1", "2", "2", 1).unwrap()),
            1
        );
        assert_eq!(
            derived_a(&ProblemInstance::parse("1", "2", "5", 3).unwrap()),
            3
        );
    }

    #[test]
    fn a_brackets_delta() {
        for (rt, d) in [
            ("101.3", "227"),
            ("2", "2"),
            ("2", "5"),
            ("1/3", "7/9"),
            ("0.7", "0.01"),
        ] {
            let p = ProblemInstance::parse("0.1", rt, d, 9).unwrap();
            let a = Rational::from(p.a());
            assert!(&(&a - &Rational::one()) * p.r_t() < *p.delta());
            assert!(*p.delta() <= &a * p.r_t());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            ProblemInstance::parse("0", "1", "1", 1),
            Err(Error::InvalidInstance(_))
        ));
        assert!(ProblemInstance::parse("1", "-1", "1", 1).is_err());
        assert!(ProblemInstance::parse("1", "1", "1", 0).is_err());
        assert!(matches!(
            ProblemInstance::parse("1", "x", "1", 1),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn eta0_size_checked() {
        let p = ProblemInstance::parse("76", "101.3", "227", 4).unwrap();
        let ok = Interval::closed(q("0"), q("80")).unwrap();
        assert!(p.clone().with_eta0(ok).is_ok());
        let bad = Interval::closed(q("0"), q("200")).unwrap();
        assert!(matches!(
            p.with_eta0(bad),
            Err(Error::InitialSizeOutOfBounds { .. })
        ));
    }
}
