use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Interval, Rational};

use super::ProblemInstance;

/// Sensor set-points `u_1 < ... < u_c`; cells are
/// `(-inf, u_1], (u_1, u_2], ..., (u_c, inf)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct SensingVector {
    set_points: Vec<Rational>,
}

impl TryFrom<Vec<Rational>> for SensingVector {
    type Error = Error;
    fn try_from(v: Vec<Rational>) -> Result<Self> {
        SensingVector::new(v)
    }
}

impl From<SensingVector> for Vec<Rational> {
    fn from(v: SensingVector) -> Self {
        v.set_points
    }
}

impl SensingVector {
    pub fn new(set_points: Vec<Rational>) -> Result<Self> {
        if set_points.is_empty() {
            return Err(Error::InvalidSensingVector("no set-points".into()));
        }
        if let Some(w) = set_points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSensingVector(format!(
                "set-points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(SensingVector { set_points })
    }

    /// Checks the vector has exactly `c` set-points.
    pub fn for_instance(set_points: Vec<Rational>, p: &ProblemInstance) -> Result<Self> {
        if set_points.len() as u64 != p.c() {
            return Err(Error::InvalidSensingVector(format!(
                "expected {} set-points, got {}",
                p.c(),
                set_points.len()
            )));
        }
        Self::new(set_points)
    }

    pub fn set_points(&self) -> &[Rational] {
        &self.set_points
    }

    /// Even split of `prior` into `cells` parts, with unused set-points
    /// parked above the prior.
    pub fn even_split(prior: &Interval, cells: u64, c: u64) -> Result<Self> {
        if cells == 0 || cells > c + 1 {
            return Err(Error::ExceedsSensorCapability {
                parts: cells,
                max: c + 1,
            });
        }
        let w = &prior.length() / &Rational::from(cells);
        let mut pts: Vec<Rational> = (1..cells)
            .map(|k| prior.lo() + &(&w * &Rational::from(k)))
            .collect();
        let mut top = prior.hi().clone();
        while (pts.len() as u64) < c {
            top = &top + &Rational::one();
            pts.push(top.clone());
        }
        Self::new(pts)
    }
}

/// `prior` intersected with the sensor cell containing `panda_pos`.
pub fn posterior_from_sensing(
    prior: &Interval,
    v: &SensingVector,
    panda_pos: &Rational,
) -> Result<Interval> {
    if !prior.contains(panda_pos) {
        return Err(Error::InconsistentObservation {
            position: panda_pos.to_string(),
            prior: prior.to_string(),
        });
    }
    let u = v.set_points();
    // Cell k is (u_{k-1}, u_k]; the ends are unbounded.
    let k = u.partition_point(|ui| ui < panda_pos);
    let (mut lo, mut lo_closed) = (prior.lo().clone(), prior.lo_closed());
    if k > 0 {
        match u[k - 1].cmp(prior.lo()) {
            Ordering::Greater => {
                lo = u[k - 1].clone();
                lo_closed = false;
            }
            Ordering::Equal => lo_closed = false,
            Ordering::Less => {}
        }
    }
    let (mut hi, mut hi_closed) = (prior.hi().clone(), prior.hi_closed());
    if k < u.len() && u[k] < hi {
        hi = u[k].clone();
        hi_closed = true;
    }
    Interval::new(lo, hi, lo_closed, hi_closed)
}

/// Smallest and largest non-empty cell produced by cutting a prior of size
/// `prior_size` at the given offsets. Offsets outside `(0, prior_size)` are
/// ignored.
pub fn worst_case_cells(prior_size: &Rational, cuts: &[Rational]) -> (Rational, Rational) {
    let zero = Rational::zero();
    let mut inner: Vec<&Rational> = cuts
        .iter()
        .filter(|c| **c > zero && *c < prior_size)
        .collect();
    inner.sort();
    inner.dedup();
    let mut edges = Vec::with_capacity(inner.len() + 2);
    edges.push(&zero);
    edges.extend(inner);
    edges.push(prior_size);
    let mut min = prior_size.clone();
    let mut max = Rational::zero();
    for w in edges.windows(2) {
        let len = w[1] - w[0];
        if len < min {
            min = len.clone();
        }
        if len > max {
            max = len;
        }
    }
    (min, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;
    use proptest::prelude::*;

    fn sv(pts: &[&str]) -> SensingVector {
        SensingVector::new(pts.iter().map(|s| q(s)).collect()).unwrap()
    }

    #[test]
    fn posterior_examples() {
        let prior = Interval::closed(q("0"), q("10")).unwrap();
        assert_eq!(
            posterior_from_sensing(&prior, &sv(&["5"]), &q("5")).unwrap(),
            Interval::closed(q("0"), q("5")).unwrap()
        );
        assert_eq!(
            posterior_from_sensing(&prior, &sv(&["5"]), &q("5.01")).unwrap(),
            Interval::open_closed(q("5"), q("10")).unwrap()
        );
        let prior = Interval::closed(q("0"), q("9")).unwrap();
        assert_eq!(
            posterior_from_sensing(&prior, &sv(&["3", "6"]), &q("4")).unwrap(),
            Interval::open_closed(q("3"), q("6")).unwrap()
        );
        assert!(matches!(
            posterior_from_sensing(&prior, &sv(&["3"]), &q("9.5")),
            Err(Error::InconsistentObservation { .. })
        ));
    }

    #[test]
    fn cut_on_prior_edge() {
        let prior = Interval::closed(q("0"), q("10")).unwrap();
        let post = posterior_from_sensing(&prior, &sv(&["0"]), &q("3")).unwrap();
        assert_eq!(post, Interval::open_closed(q("0"), q("10")).unwrap());
        let post = posterior_from_sensing(&prior, &sv(&["0"]), &q("0")).unwrap();
        assert_eq!(post, Interval::point(q("0")));
    }

    #[test]
    fn rejects_unsorted() {
        assert!(SensingVector::new(vec![q("2"), q("1")]).is_err());
        assert!(SensingVector::new(vec![q("1"), q("1")]).is_err());
        assert!(SensingVector::new(vec![]).is_err());
        let p = ProblemInstance::parse("1", "2", "2", 2).unwrap();
        assert!(SensingVector::for_instance(vec![q("1")], &p).is_err());
        assert!(serde_json::from_str::<SensingVector>(r#"["3","1"]"#).is_err());
    }

    #[test]
    fn worst_case_examples() {
        assert_eq!(worst_case_cells(&q("10"), &[q("4")]), (q("4"), q("6")));
        assert_eq!(worst_case_cells(&q("10"), &[q("5")]), (q("5"), q("5")));
        assert_eq!(
            worst_case_cells(&q("10"), &[q("-1"), q("12")]),
            (q("10"), q("10"))
        );
    }

    #[test]
    fn even_split_cells() {
        let prior = Interval::closed(q("0"), q("303")).unwrap();
        let v = SensingVector::even_split(&prior, 3, 4).unwrap();
        assert_eq!(v.set_points().len(), 4);
        for pos in ["0", "50", "101", "150", "303"] {
            let post = posterior_from_sensing(&prior, &v, &q(pos)).unwrap();
            assert_eq!(post.length(), q("101"));
        }
        assert!(SensingVector::even_split(&prior, 6, 4).is_err());
    }

    proptest! {
        #[test]
        fn pigeonhole(size in 1i64..1000, raw in proptest::collection::vec(0i64..1000, 0..8)) {
            let size = Rational::from(size);
            let cuts: Vec<Rational> = raw.iter().map(|&r| Rational::ratio(r, 1000) * &size).collect();
            let (min, max) = worst_case_cells(&size, &cuts);
            let mut inner: Vec<&Rational> = cuts.iter().filter(|c| c.is_positive() && **c < size).collect();
            inner.sort();
            inner.dedup();
            let i = Rational::from(inner.len() as u64 + 1);
            let even = &size / &i;
            prop_assert!(min <= even && even <= max);
        }
    }
}
