//! Boundary instances: forced-action partition, impossibility-zone
//! back-propagation, closed-form case labels, feasible initial sizes and
//! strategy synthesis.
//!
//! With `A = a r_t - delta` and `B = (a+1) r_p - delta`, sizes in `[r_p, A]`
//! admit only `+`, sizes in `[B, r_t]` only `-`, and the open zone `(A, B)`
//! admits nothing. Zone `j` holds the sizes whose forced orbit first enters
//! `(A, B)` after exactly `j` steps.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::classifier::classify;
use crate::error::{Error, Result};
use crate::exactnum::{Interval, IntervalSet, Rational};
use crate::model::{Action, Policy, ProblemInstance, StrategyWord};

/// Default bound on back-propagation, in multiples of `p + m + 1` steps.
pub const DEFAULT_MAX_PERIODS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    /// `I_1^+ .. I_p^+`, right to left, each `(f+^-1(r), r]`; the last is
    /// clipped to start at `r_p` (closed).
    pub plus_intervals: Vec<Interval>,
    /// `I_1^- .. I_m^-`, left to right, each `[l, f-^-1(l))`; the last is
    /// clipped to end at `r_t` (closed).
    pub minus_intervals: Vec<Interval>,
    pub p: usize,
    pub m: usize,
    pub zone0: Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Cell {
    Zero,
    Plus(usize),
    Minus(usize),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Zero => f.write_str("I0"),
            Cell::Plus(k) => write!(f, "I{}+", k),
            Cell::Minus(k) => write!(f, "I{}-", k),
        }
    }
}

impl Partition {
    /// `[r_p, A]`, where only `+` is legal.
    pub fn plus_region(&self) -> Interval {
        let lo = self.plus_intervals.last().expect("p >= 1").lo().clone();
        Interval::closed(lo, self.zone0.lo().clone()).expect("r_p <= A")
    }

    /// `[B, r_t]`, where only `-` is legal.
    pub fn minus_region(&self) -> Interval {
        let hi = self.minus_intervals.last().expect("m >= 1").hi().clone();
        Interval::closed(self.zone0.hi().clone(), hi).expect("B <= r_t")
    }

    /// The cell that contains all of `iv`.
    pub fn cell_containing(&self, iv: &Interval) -> Option<Cell> {
        let inside = |c: &Interval| c.intersect(iv).as_ref() == Some(iv);
        if inside(&self.zone0) {
            return Some(Cell::Zero);
        }
        if let Some(k) = self.plus_intervals.iter().position(inside) {
            return Some(Cell::Plus(k + 1));
        }
        self.minus_intervals
            .iter()
            .position(inside)
            .map(|k| Cell::Minus(k + 1))
    }

    pub fn tiling(&self) -> IntervalSet {
        IntervalSet::from_parts(
            self.plus_intervals
                .iter()
                .chain(self.minus_intervals.iter())
                .chain(std::iter::once(&self.zone0))
                .cloned(),
        )
    }
}

fn require_boundary(p: &ProblemInstance) -> Result<()> {
    if classify(p).is_boundary() {
        Ok(())
    } else {
        Err(Error::NotBoundary)
    }
}

fn zone_edges(p: &ProblemInstance) -> (Rational, Rational) {
    let a = Rational::from(p.a());
    let a1 = Rational::from(p.a() + 1);
    (&(&a * p.r_t()) - p.delta(), &(&a1 * p.r_p()) - p.delta())
}

pub fn build_partition(p: &ProblemInstance) -> Result<Partition> {
    require_boundary(p)?;
    let (za, zb) = zone_edges(p);
    let zone0 = Interval::open(za.clone(), zb.clone()).expect("boundary zone is non-empty");

    let mut plus_intervals = Vec::new();
    let mut r = za;
    loop {
        let lo = p.f_plus_inv(&r);
        if &lo <= p.r_p() {
            plus_intervals.push(Interval::closed(p.r_p().clone(), r).expect("r_p <= A"));
            break;
        }
        plus_intervals.push(Interval::open_closed(lo.clone(), r).expect("f+^-1 decreases"));
        r = lo;
    }

    let mut minus_intervals = Vec::new();
    let mut l = zb;
    loop {
        let hi = p.f_minus_inv(&l);
        if &hi >= p.r_t() {
            minus_intervals.push(Interval::closed(l, p.r_t().clone()).expect("B <= r_t"));
            break;
        }
        minus_intervals.push(Interval::closed_open(l, hi.clone()).expect("f-^-1 increases"));
        l = hi;
    }

    Ok(Partition {
        p: plus_intervals.len(),
        m: minus_intervals.len(),
        plus_intervals,
        minus_intervals,
        zone0,
    })
}

/// Which side of `(A, B)` the closed-form tests are phrased on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `m = 1`: a single `-` cell, a chain of `p` `+` cells.
    PlusChain,
    /// `p = 1`, `m >= 2`: the mirrored construction.
    MinusChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    L9,
    L10,
    L11,
    #[serde(rename = "L12_feasible")]
    L12Feasible,
    #[serde(rename = "L12_infeasible")]
    L12Infeasible,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::L9 => "L9",
            CaseLabel::L10 => "L10",
            CaseLabel::L11 => "L11",
            CaseLabel::L12Feasible => "L12_feasible",
            CaseLabel::L12Infeasible => "L12_infeasible",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClosedFormCase {
    L9,
    L10,
    L11,
    L12,
}

/// Outcome of the closed-form position and ratio tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub family: Family,
    pub case: ClosedFormCase,
    /// `|w| / |v|` in the ratio case; `None` when `|v| = 0` or not in that case.
    pub ratio_w_over_v: Option<Rational>,
    /// Verdict of the ratio bounds in the ratio case.
    pub ratio_test_feasible: Option<bool>,
}

fn iterate(x: &Rational, n: usize, f: impl Fn(&Rational) -> Rational) -> Rational {
    let mut y = x.clone();
    for _ in 0..n {
        y = f(&y);
    }
    y
}

/// Closed-form case tests; `None` when neither `p` nor `m` equals one.
pub fn closed_form(p: &ProblemInstance, part: &Partition) -> Option<ClosedForm> {
    let a = Rational::from(p.a());
    let a1 = Rational::from(p.a() + 1);
    let (za, zb) = (part.zone0.lo(), part.zone0.hi());
    let ratio = |v: Rational, w: Rational, lo: Rational, hi: Rational| {
        if v.is_zero() {
            (None, None)
        } else {
            let r = &w / &v;
            let ok = lo <= r && r <= hi;
            (Some(r), Some(ok))
        }
    };
    if part.m == 1 {
        let pp = part.p;
        let mut out = ClosedForm {
            family: Family::PlusChain,
            case: ClosedFormCase::L12,
            ratio_w_over_v: None,
            ratio_test_feasible: None,
        };
        if &iterate(p.r_p(), pp, |x| p.f_plus(x)) < zb {
            out.case = ClosedFormCase::L9;
            return Some(out);
        }
        let y = p.f_minus(p.r_t());
        let upper = part.plus_intervals[pp - 1].hi().clone();
        if y <= upper {
            out.case = ClosedFormCase::L10;
            return Some(out);
        }
        let g = iterate(zb, pp - 1, |x| p.f_plus_inv(x));
        if y < g {
            out.case = ClosedFormCase::L11;
            return Some(out);
        }
        let v = &upper - p.r_p();
        let w = &y - &g;
        let lo = (&a.pow(pp as u32) * &a1).recip();
        let hi = &a.pow(pp as u32 - 1) * &a1;
        let (r, ok) = ratio(v, w, lo, hi);
        out.ratio_w_over_v = r;
        out.ratio_test_feasible = ok;
        return Some(out);
    }
    if part.p == 1 {
        let m = part.m;
        let mut out = ClosedForm {
            family: Family::MinusChain,
            case: ClosedFormCase::L12,
            ratio_w_over_v: None,
            ratio_test_feasible: None,
        };
        if &iterate(p.r_t(), m, |x| p.f_minus(x)) > za {
            out.case = ClosedFormCase::L9;
            return Some(out);
        }
        let y = p.f_plus(p.r_p());
        let lm = part.minus_intervals[m - 1].lo().clone();
        if y >= lm {
            out.case = ClosedFormCase::L10;
            return Some(out);
        }
        let g = iterate(za, m - 1, |x| p.f_minus_inv(x));
        if y > g {
            out.case = ClosedFormCase::L11;
            return Some(out);
        }
        let v = p.r_t() - &lm;
        let w = &g - &y;
        let lo = (&a * &a1.pow(m as u32)).recip();
        let hi = &a * &a1.pow(m as u32 - 1);
        let (r, ok) = ratio(v, w, lo, hi);
        out.ratio_w_over_v = r;
        out.ratio_test_feasible = ok;
        return Some(out);
    }
    None
}

/// Impossibility zone `I_j`: every forced orbit from it violates a bound at
/// step `j + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Zone {
    pub j: usize,
    #[serde(flatten)]
    pub interval: Interval,
    pub cell: Cell,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    /// The newest zone had an empty preimage; the zone list is complete.
    Exhausted,
    /// Every orbit visits both forced regions, so covering either one by
    /// zones empties the feasible set.
    RegionCovered,
    /// Step budget spent before either of the above.
    StepCap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Feasible,
    Infeasible,
    Undetermined,
}

/// `+` on `[.., A]`, `-` on `[B, ..]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForcedRule {
    pub plus_up_to: Rational,
    pub minus_from: Rational,
}

impl ForcedRule {
    /// The only non-violating basis action at `x`, if any.
    pub fn forced(&self, x: &Rational) -> Option<Action> {
        if x <= &self.plus_up_to {
            Some(Action::Plus)
        } else if x >= &self.minus_from {
            Some(Action::Minus)
        } else {
            None
        }
    }
}

impl Policy for ForcedRule {
    fn action(&self, _k: usize, size: &Rational) -> Action {
        self.forced(size).unwrap_or(Action::Plus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZoneReport {
    pub instance: ProblemInstance,
    pub partition: Partition,
    pub zones: Vec<Zone>,
    pub termination: Termination,
    pub outcome: Outcome,
    /// Final label. Ratio-case feasibility comes from the exact zone
    /// computation; `None` only when the outcome is undetermined in the
    /// ratio case or no closed form applies.
    pub case_label: Option<CaseLabel>,
    pub closed_form: Option<ClosedForm>,
    /// Whether the closed-form prediction matches the exact outcome.
    pub closed_form_consistent: Option<bool>,
    pub feasible_set: Option<IntervalSet>,
    pub strategy_rule: ForcedRule,
}

impl ZoneReport {
    pub fn zones_complete(&self) -> bool {
        self.termination == Termination::Exhausted
    }

    pub fn ratio_w_over_v(&self) -> Option<&Rational> {
        self.closed_form
            .as_ref()
            .and_then(|c| c.ratio_w_over_v.as_ref())
    }

    pub fn zone_union(&self) -> IntervalSet {
        IntervalSet::from_parts(self.zones.iter().map(|z| z.interval.clone()))
    }

    /// Index of the zone containing `x`.
    pub fn zone_of(&self, x: &Rational) -> Option<usize> {
        self.zones
            .iter()
            .find(|z| z.interval.contains(x))
            .map(|z| z.j)
    }
}

struct Backprop {
    zones: Vec<Zone>,
    termination: Termination,
}

fn propagate(
    p: &ProblemInstance,
    part: &Partition,
    step_cap: usize,
    stop_on_cover: bool,
) -> Result<Backprop> {
    let left = part.plus_region();
    let right = part.minus_region();
    let left_set = IntervalSet::from(left.clone());
    let right_set = IntervalSet::from(right.clone());
    let a = Rational::from(p.a());
    let a1 = Rational::from(p.a() + 1);
    let neg_delta = -p.delta();

    let mut zones = vec![Zone {
        j: 0,
        interval: part.zone0.clone(),
        cell: Cell::Zero,
    }];
    let mut covered = IntervalSet::from(part.zone0.clone());
    for j in 1..=step_cap {
        let newest = &zones[j - 1].interval;
        let via_plus = newest
            .affine_image(&a, &neg_delta)
            .expect("a >= 1")
            .intersect(&left);
        let via_minus = newest
            .affine_image(&a1, &neg_delta)
            .expect("a + 1 >= 2")
            .intersect(&right);
        let next = match (via_plus, via_minus) {
            (None, None) => {
                return Ok(Backprop {
                    zones,
                    termination: Termination::Exhausted,
                })
            }
            (Some(z), None) | (None, Some(z)) => z,
            (Some(_), Some(_)) => return Err(Error::ZoneNotSimple { index: j }),
        };
        let cell = part
            .cell_containing(&next)
            .ok_or(Error::ZoneNotSimple { index: j })?;
        covered = covered.union(&IntervalSet::from(next.clone()));
        zones.push(Zone {
            j,
            interval: next,
            cell,
        });
        if stop_on_cover && (left_set.is_subset(&covered) || right_set.is_subset(&covered)) {
            return Ok(Backprop {
                zones,
                termination: Termination::RegionCovered,
            });
        }
    }
    Ok(Backprop {
        zones,
        termination: Termination::StepCap,
    })
}

/// Full boundary analysis. `max_periods` bounds the number of
/// back-propagation steps to `max_periods * (p + m + 1)`.
pub fn backpropagate_zones(p: &ProblemInstance, max_periods: usize) -> Result<ZoneReport> {
    if max_periods == 0 {
        return Err(Error::InvalidArgument(
            "max_periods must be at least 1".into(),
        ));
    }
    let part = build_partition(p)?;
    let step_cap = max_periods.saturating_mul(part.p + part.m + 1);
    let bp = propagate(p, &part, step_cap, true)?;
    let x = IntervalSet::from(p.bounds().expect("boundary has r_p <= r_t"));

    let feasible_set = match bp.termination {
        Termination::Exhausted => {
            let zones = IntervalSet::from_parts(bp.zones.iter().map(|z| z.interval.clone()));
            Some(x.subtract(&zones))
        }
        Termination::RegionCovered => Some(IntervalSet::empty()),
        Termination::StepCap => None,
    };
    let outcome = match &feasible_set {
        Some(s) if s.is_empty() => Outcome::Infeasible,
        Some(_) => Outcome::Feasible,
        None => Outcome::Undetermined,
    };

    let cf = closed_form(p, &part);
    let (case_label, consistent) = match &cf {
        None => (None, None),
        Some(c) => {
            let predicted_feasible = match c.case {
                ClosedFormCase::L9 | ClosedFormCase::L11 => Some(false),
                ClosedFormCase::L10 => Some(true),
                ClosedFormCase::L12 => c.ratio_test_feasible,
            };
            let label = match (c.case, outcome) {
                (ClosedFormCase::L9, _) => Some(CaseLabel::L9),
                (ClosedFormCase::L10, _) => Some(CaseLabel::L10),
                (ClosedFormCase::L11, _) => Some(CaseLabel::L11),
                (ClosedFormCase::L12, Outcome::Feasible) => Some(CaseLabel::L12Feasible),
                (ClosedFormCase::L12, Outcome::Infeasible) => Some(CaseLabel::L12Infeasible),
                (ClosedFormCase::L12, Outcome::Undetermined) => None,
            };
            let consistent = match (predicted_feasible, outcome) {
                (_, Outcome::Undetermined) | (None, _) => None,
                (Some(f), o) => Some(f == (o == Outcome::Feasible)),
            };
            (label, consistent)
        }
    };

    Ok(ZoneReport {
        instance: p.clone(),
        strategy_rule: ForcedRule {
            plus_up_to: part.zone0.lo().clone(),
            minus_from: part.zone0.hi().clone(),
        },
        partition: part,
        zones: bp.zones,
        termination: bp.termination,
        outcome,
        case_label,
        closed_form: cf,
        closed_form_consistent: consistent,
        feasible_set,
    })
}

/// The unique basis-action strategy from a feasible `eta0_size`, as a prefix
/// and cycle. The cycle is rotated to start at the first occurrence of its
/// rarer action (`+` on ties).
pub fn synthesize_strategy(report: &ZoneReport, eta0_size: &Rational) -> Result<StrategyWord> {
    let infeasible = || Error::InitialStateInfeasible(eta0_size.to_string());
    let fs = report.feasible_set.as_ref().ok_or_else(infeasible)?;
    if !fs.contains(eta0_size) {
        return Err(infeasible());
    }
    let p = &report.instance;
    // Each feasible component maps into a single component under its forced
    // action, so the component sequence determines the word.
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut actions: Vec<Action> = Vec::new();
    let mut x = eta0_size.clone();
    let start = loop {
        let comp = fs.component_of(&x).ok_or_else(infeasible)?;
        if let Some(&s) = seen.get(&comp) {
            break s;
        }
        seen.insert(comp, actions.len());
        let act = report.strategy_rule.forced(&x).ok_or_else(infeasible)?;
        x = p.split(&x, act.divisor(p));
        actions.push(act);
    };
    let periodic = &actions[start..];
    let plus = periodic.iter().filter(|a| **a == Action::Plus).count();
    let minus = periodic.len() - plus;
    let rare = if plus <= minus {
        Action::Plus
    } else {
        Action::Minus
    };
    let rot = if plus == 0 || minus == 0 {
        start
    } else {
        start
            + periodic
                .iter()
                .position(|a| *a == rare)
                .expect("rare action present")
    };
    let prefix = actions[..rot].to_vec();
    let mut cycle = actions[rot..].to_vec();
    cycle.extend_from_slice(&actions[start..rot]);
    StrategyWord::new(prefix, cycle)
}

/// Sizes that survive a pursuer who gives up after `tau` steps: everything
/// outside the zones with index below `tau`.
pub fn tau_relaxed_feasible(report: &ZoneReport, tau: usize) -> Result<IntervalSet> {
    let x = IntervalSet::from(report.instance.bounds().expect("boundary has r_p <= r_t"));
    let have = report.zones.len();
    let zones: Vec<Interval> = if tau <= have || report.zones_complete() {
        report
            .zones
            .iter()
            .take(tau)
            .map(|z| z.interval.clone())
            .collect()
    } else {
        let bp = propagate(
            &report.instance,
            &report.partition,
            tau.saturating_sub(1),
            false,
        )?;
        bp.zones.into_iter().take(tau).map(|z| z.interval).collect()
    };
    Ok(x.subtract(&IntervalSet::from_parts(zones)))
}
