use std::fmt;

use serde::{Deserialize, Serialize};

use super::interval::{Cut, Interval};
use super::rational::Rational;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Intersect,
    Subtract,
}

impl SetOp {
    fn keep(self, in_a: bool, in_b: bool) -> bool {
        match self {
            SetOp::Union => in_a || in_b,
            SetOp::Intersect => in_a && in_b,
            SetOp::Subtract => in_a && !in_b,
        }
    }
}

/// Finite union of bounded intervals in canonical form: sorted, disjoint,
/// and with no two parts that could merge.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl From<Vec<Interval>> for IntervalSet {
    fn from(v: Vec<Interval>) -> Self {
        IntervalSet::from_parts(v)
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(s: IntervalSet) -> Self {
        s.parts
    }
}

impl From<Interval> for IntervalSet {
    fn from(i: Interval) -> Self {
        IntervalSet { parts: vec![i] }
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_parts<I: IntoIterator<Item = Interval>>(parts: I) -> Self {
        let mut ranges: Vec<(Cut, Cut)> = parts.into_iter().map(|i| i.cuts()).collect();
        ranges.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Cut, Cut)> = Vec::with_capacity(ranges.len());
        for (s, e) in ranges {
            match merged.last_mut() {
                Some(last) if s <= last.1 => {
                    if e > last.1 {
                        last.1 = e;
                    }
                }
                _ => merged.push((s, e)),
            }
        }
        Self::from_cut_ranges(merged)
    }

    fn from_cut_ranges(ranges: Vec<(Cut, Cut)>) -> Self {
        IntervalSet {
            parts: ranges
                .into_iter()
                .filter_map(|(s, e)| Interval::from_cuts(s, e))
                .collect(),
        }
    }

    fn cut_ranges(&self) -> Vec<(Cut, Cut)> {
        self.parts.iter().map(|i| i.cuts()).collect()
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn combine(&self, other: &IntervalSet, op: SetOp) -> IntervalSet {
        let a = self.cut_ranges();
        let b = other.cut_ranges();
        let mut cuts: Vec<Cut> = a
            .iter()
            .chain(b.iter())
            .flat_map(|(s, e)| [s.clone(), e.clone()])
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut out: Vec<(Cut, Cut)> = Vec::new();
        let (mut ia, mut ib) = (0, 0);
        for w in cuts.windows(2) {
            let (s, e) = (&w[0], &w[1]);
            while ia < a.len() && a[ia].1 <= *s {
                ia += 1;
            }
            while ib < b.len() && b[ib].1 <= *s {
                ib += 1;
            }
            let in_a = ia < a.len() && a[ia].0 <= *s;
            let in_b = ib < b.len() && b[ib].0 <= *s;
            if op.keep(in_a, in_b) {
                match out.last_mut() {
                    Some(last) if last.1 == *s => last.1 = e.clone(),
                    _ => out.push((s.clone(), e.clone())),
                }
            }
        }
        Self::from_cut_ranges(out)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, SetOp::Union)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, SetOp::Intersect)
    }

    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, SetOp::Subtract)
    }

    pub fn intersect_interval(&self, i: &Interval) -> IntervalSet {
        IntervalSet {
            parts: self.parts.iter().filter_map(|p| p.intersect(i)).collect(),
        }
    }

    /// Exact image under `x -> scale * x + offset`.
    pub fn affine_image(&self, scale: &Rational, offset: &Rational) -> Result<IntervalSet> {
        let mut parts = self
            .parts
            .iter()
            .map(|p| p.affine_image(scale, offset))
            .collect::<Result<Vec<_>>>()?;
        if scale.is_negative() {
            parts.reverse();
        }
        Ok(IntervalSet { parts })
    }

    pub fn measure(&self) -> Rational {
        self.parts.iter().map(|p| p.length()).sum()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.component_of(x).is_some()
    }

    /// Index of the part containing `x`.
    pub fn component_of(&self, x: &Rational) -> Option<usize> {
        let idx = self.parts.partition_point(|p| p.hi() < x);
        match self.parts.get(idx) {
            Some(p) if p.contains(x) => Some(idx),
            _ => None,
        }
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.subtract(other).is_empty()
    }

    pub fn inf(&self) -> Option<&Rational> {
        self.parts.first().map(|p| p.lo())
    }

    pub fn sup(&self) -> Option<&Rational> {
        self.parts.last().map(|p| p.hi())
    }

    pub fn to_pretty(&self) -> String {
        if self.parts.is_empty() {
            return "∅".to_string();
        }
        self.parts
            .iter()
            .map(|p| p.to_pretty())
            .collect::<Vec<_>>()
            .join(" ∪ ")
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{}", p)?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Set algebra entry point with an explicit mode.
pub fn set_combine(a: &IntervalSet, b: &IntervalSet, mode: SetOp) -> IntervalSet {
    a.combine(b, mode)
}

pub fn affine_image(s: &IntervalSet, scale: &Rational, offset: &Rational) -> Result<IntervalSet> {
    s.affine_image(scale, offset)
}

pub fn measure(s: &IntervalSet) -> Rational {
    s.measure()
}
