use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Bounded interval with independent endpoint closedness.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(r: RawInterval) -> Result<Self> {
        Interval::new(r.lo, r.hi, r.lo_closed, r.hi_closed)
    }
}

/// Position just before (`side == false`) or just after (`side == true`) a real.
///
/// An interval is the half-open cut range `[start, end)`, which turns every
/// endpoint-topology question into a plain comparison.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct Cut {
    pub x: Rational,
    pub after: bool,
}

impl Ord for Cut {
    fn cmp(&self, o: &Self) -> Ordering {
        self.x.cmp(&o.x).then(self.after.cmp(&o.after))
    }
}

impl PartialOrd for Cut {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let ok = match lo.cmp(&hi) {
            Ordering::Less => true,
            Ordering::Equal => lo_closed && hi_closed,
            Ordering::Greater => false,
        };
        if !ok {
            return Err(Error::EmptyInterval(fmt_parts(
                &lo, &hi, lo_closed, hi_closed,
            )));
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// `[lo, hi]`
    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    /// `(lo, hi)`
    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// `(lo, hi]`
    pub fn open_closed(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, false, true)
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (s1, e1) = self.cuts();
        let (s2, e2) = other.cuts();
        let s = s1.max(s2);
        let e = e1.min(e2);
        Interval::from_cuts(s, e)
    }

    /// Exact image under `x -> scale * x + offset`.
    pub fn affine_image(&self, scale: &Rational, offset: &Rational) -> Result<Interval> {
        if scale.is_zero() {
            return Err(Error::DegenerateAffineMap);
        }
        let a = &(&self.lo * scale) + offset;
        let b = &(&self.hi * scale) + offset;
        if scale.is_positive() {
            Interval::new(a, b, self.lo_closed, self.hi_closed)
        } else {
            Interval::new(b, a, self.hi_closed, self.lo_closed)
        }
    }

    pub(crate) fn cuts(&self) -> (Cut, Cut) {
        (
            Cut {
                x: self.lo.clone(),
                after: !self.lo_closed,
            },
            Cut {
                x: self.hi.clone(),
                after: self.hi_closed,
            },
        )
    }

    pub(crate) fn from_cuts(start: Cut, end: Cut) -> Option<Interval> {
        if start >= end {
            return None;
        }
        Some(Interval {
            lo: start.x,
            hi: end.x,
            lo_closed: !start.after,
            hi_closed: end.after,
        })
    }

    /// Renders endpoints as decimals when they terminate, `p/q` otherwise.
    pub fn to_pretty(&self) -> String {
        format!(
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo.to_pretty(),
            self.hi.to_pretty(),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

fn fmt_parts(lo: &Rational, hi: &Rational, lc: bool, hc: bool) -> String {
    format!(
        "{}{}, {}{}",
        if lc { '[' } else { '(' },
        lo,
        hi,
        if hc { ']' } else { ')' }
    )
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_parts(
            &self.lo,
            &self.hi,
            self.lo_closed,
            self.hi_closed,
        ))
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    #[test]
    fn rejects_empty() {
        assert!(Interval::open(q("1"), q("1")).is_err());
        assert!(Interval::closed_open(q("1"), q("1")).is_err());
        assert!(Interval::closed(q("2"), q("1")).is_err());
        assert!(Interval::closed(q("1"), q("1")).unwrap().is_point());
    }

    #[test]
    fn membership_respects_topology() {
        let i = Interval::open_closed(q("0"), q("1")).unwrap();
        assert!(!i.contains(&q("0")));
        assert!(i.contains(&q("1")));
        assert!(i.contains(&q("1/2")));
        assert!(!i.contains(&q("1.0001")));
    }

    #[test]
    fn intersect_touching() {
        let a = Interval::closed(q("0"), q("1")).unwrap();
        let b = Interval::open_closed(q("1"), q("2")).unwrap();
        assert!(a.intersect(&b).is_none());
        let c = Interval::closed(q("1"), q("2")).unwrap();
        assert_eq!(a.intersect(&c), Some(Interval::point(q("1"))));
    }

    #[test]
    fn negative_scale_flips_topology() {
        let a = Interval::closed_open(q("0"), q("1")).unwrap();
        let img = a.affine_image(&q("-2"), &q("1")).unwrap();
        assert_eq!(img, Interval::open_closed(q("-1"), q("1")).unwrap());
        assert_eq!(
            a.affine_image(&q("0"), &q("1")),
            Err(Error::DegenerateAffineMap)
        );
    }

    #[test]
    fn serde_validates() {
        let i = Interval::open(q("76.9"), q("77")).unwrap();
        let s = serde_json::to_string(&i).unwrap();
        assert_eq!(
            s,
            r#"{"lo":"769/10","hi":"77","lo_closed":false,"hi_closed":false}"#
        );
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, i);
        let bad = r#"{"lo":"1","hi":"1","lo_closed":false,"hi_closed":true}"#;
        assert!(serde_json::from_str::<Interval>(bad).is_err());
    }
}
