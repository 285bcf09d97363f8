//! Independent verification: the maximal invariant set of the basis-action
//! dynamics by fixpoint iteration, and exhaustive finite-depth search.
//!
//! Nothing here depends on the classifier or on the boundary analysis.

use std::collections::HashMap;

use serde::Serialize;

use crate::exactnum::{IntervalSet, Rational};
use crate::model::ProblemInstance;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub safe_set: IntervalSet,
    pub converged: bool,
    pub iterations: usize,
}

/// Cell counts of the basis splits the sensor can realize.
fn basis_splits(p: &ProblemInstance) -> Vec<u64> {
    [p.a(), p.a().saturating_add(1)]
        .into_iter()
        .filter(|&i| i >= 1 && i <= p.max_split())
        .collect()
}

/// Iterates `S <- S ∩ ∪_i pre_i(S)` from `[r_p, r_t]`, where `pre_i` is the
/// preimage under `x -> (x + delta) / i`, until nothing changes or
/// `iteration_cap` updates have been made.
pub fn maximal_invariant_set(p: &ProblemInstance, iteration_cap: usize) -> OracleResult {
    let Some(x) = p.bounds() else {
        return OracleResult {
            safe_set: IntervalSet::empty(),
            converged: true,
            iterations: 0,
        };
    };
    let splits = basis_splits(p);
    let neg_delta = -p.delta();
    let mut s = IntervalSet::from(x);
    for k in 1..=iteration_cap {
        let mut reach = IntervalSet::empty();
        for &i in &splits {
            let pre = s
                .affine_image(&Rational::from(i), &neg_delta)
                .expect("split count is positive");
            reach = reach.union(&pre);
        }
        let next = s.intersect(&reach);
        if next == s {
            return OracleResult {
                safe_set: s,
                converged: true,
                iterations: k,
            };
        }
        s = next;
        if s.is_empty() {
            return OracleResult {
                safe_set: s,
                converged: true,
                iterations: k,
            };
        }
    }
    OracleResult {
        safe_set: s,
        converged: false,
        iterations: iteration_cap,
    }
}

/// Whether `s` maps into itself under some basis split at every point.
pub fn is_fixpoint(p: &ProblemInstance, s: &IntervalSet) -> bool {
    let neg_delta = -p.delta();
    let mut reach = IntervalSet::empty();
    for i in basis_splits(p) {
        reach = reach.union(
            &s.affine_image(&Rational::from(i), &neg_delta)
                .expect("positive split"),
        );
    }
    s.intersect(&reach) == *s
}

/// Step index at which a violation becomes unavoidable from `eta0_size`,
/// searching every split `s(1)..s(c+1)`; returns `depth` if some sequence
/// stays within bounds for `depth` steps.
pub fn brute_force_survival(p: &ProblemInstance, eta0_size: &Rational, depth: u32) -> u32 {
    if depth == 0 {
        return 0;
    }
    let mut memo: HashMap<(Rational, u32), u32> = HashMap::new();
    survive(p, eta0_size, depth, &mut memo)
}

fn survive(
    p: &ProblemInstance,
    x: &Rational,
    d: u32,
    memo: &mut HashMap<(Rational, u32), u32>,
) -> u32 {
    if let Some(&v) = memo.get(&(x.clone(), d)) {
        return v;
    }
    let mut best = 1;
    if d > 1 {
        let prior = x + p.delta();
        for i in 1..=p.max_split() {
            let next = &prior / &Rational::from(i);
            if &next < p.r_p() {
                // Larger splits only shrink further.
                break;
            }
            if &next > p.r_t() {
                continue;
            }
            best = best.max(1 + survive(p, &next, d - 1, memo));
            if best == d {
                break;
            }
        }
    }
    memo.insert((x.clone(), d), best);
    best
}

/// `[r_p, r_t]` as a set, or empty when `r_p > r_t`.
pub fn state_space(p: &ProblemInstance) -> IntervalSet {
    p.bounds().map(IntervalSet::from).unwrap_or_default()
}
