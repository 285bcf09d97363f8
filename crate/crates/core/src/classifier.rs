//! Exact classification of problem instances.
//!
//! Decision tree, every comparison exact (`a = ceil(delta / r_t)`):
//!
//! | step | test                                             | result                     |
//! |------|--------------------------------------------------|----------------------------|
//! | 1    | `r_p > r_t`                                      | trivially infeasible       |
//! | 2    | `delta > c * r_t`                                | over-constrained, L4       |
//! | 3    | `delta >= a * r_p`                               | under-constrained, L3      |
//! | 4    | `a * r_t >= (a + 1) * r_p`                       | under-constrained, L5      |
//! | 5    | `r_p <= a r_t - delta`, `(a+1) r_p - delta <= r_t` | boundary                 |
//! | 6    | `delta > a r_t - r_p`                            | over-constrained, L6i      |
//! |      | otherwise                                        | over-constrained, L6ii     |
//!
//! Equality seams: `delta = c * r_t` is not L4 (falls through); `delta = a * r_p`
//! is L3; `a r_t = (a + 1) r_p` (an empty zone) is L5; both boundary
//! inequalities of step 5 are inclusive.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::exactnum::{Interval, Rational};
use crate::model::{Action, Policy, ProblemInstance, StrategyWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Lemma {
    L3,
    L4,
    L5,
    L6i,
    L6ii,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// State feedback on the prior size: `-` when the prior lies in
/// `[(a+1) r_p, (a+1) r_t]`, `+` otherwise (in which case it lies in
/// `[a r_p, a r_t]` on any instance this rule is issued for).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedbackRule {
    delta: Rational,
    minus_lo: Rational,
    minus_hi: Rational,
    plus_lo: Rational,
    plus_hi: Rational,
}

impl FeedbackRule {
    pub fn for_instance(p: &ProblemInstance) -> Self {
        let a = Rational::from(p.a());
        let a1 = Rational::from(p.a() + 1);
        FeedbackRule {
            delta: p.delta().clone(),
            minus_lo: &a1 * p.r_p(),
            minus_hi: &a1 * p.r_t(),
            plus_lo: &a * p.r_p(),
            plus_hi: &a * p.r_t(),
        }
    }

    pub fn plus_prior_range(&self) -> (&Rational, &Rational) {
        (&self.plus_lo, &self.plus_hi)
    }

    pub fn minus_prior_range(&self) -> (&Rational, &Rational) {
        (&self.minus_lo, &self.minus_hi)
    }

    pub fn choose(&self, posterior: &Rational) -> Action {
        let prior = posterior + &self.delta;
        if self.minus_lo <= prior && prior <= self.minus_hi {
            Action::Minus
        } else {
            Action::Plus
        }
    }

    /// Unrolls the rule from `eta0_size` and returns the word it plays if the
    /// size sequence becomes exactly periodic within `max_steps`.
    pub fn as_word(
        &self,
        p: &ProblemInstance,
        eta0_size: &Rational,
        max_steps: usize,
    ) -> Option<StrategyWord> {
        let mut seen: HashMap<Rational, usize> = HashMap::new();
        let mut acts = Vec::new();
        let mut x = eta0_size.clone();
        for k in 0..=max_steps {
            if let Some(&start) = seen.get(&x) {
                let cycle = acts.split_off(start);
                return StrategyWord::new(acts, cycle).ok();
            }
            seen.insert(x.clone(), k);
            let act = self.choose(&x);
            x = p.split(&x, act.divisor(p));
            acts.push(act);
        }
        None
    }
}

impl Policy for FeedbackRule {
    fn action(&self, _k: usize, size: &Rational) -> Action {
        self.choose(size)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Word(StrategyWord),
    Feedback(Box<FeedbackRule>),
}

impl Witness {
    pub fn policy(&self) -> &dyn Policy {
        match self {
            Witness::Word(w) => w,
            Witness::Feedback(f) => f.as_ref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    TriviallyInfeasible,
    UnderConstrained { lemma: Lemma, witness: Witness },
    OverConstrained { lemma: Lemma },
    Boundary,
}

/// Coarse class without payload, for grids and comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ClassKind {
    TriviallyInfeasible,
    UnderConstrained,
    OverConstrained,
    Boundary,
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Classification {
    pub fn kind(&self) -> ClassKind {
        match self {
            Classification::TriviallyInfeasible => ClassKind::TriviallyInfeasible,
            Classification::UnderConstrained { .. } => ClassKind::UnderConstrained,
            Classification::OverConstrained { .. } => ClassKind::OverConstrained,
            Classification::Boundary => ClassKind::Boundary,
        }
    }

    pub fn lemma(&self) -> Option<Lemma> {
        match self {
            Classification::UnderConstrained { lemma, .. }
            | Classification::OverConstrained { lemma } => Some(*lemma),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Classification::UnderConstrained { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, Classification::Boundary)
    }

    pub fn report(&self, p: &ProblemInstance) -> ClassificationReport {
        let (witness_strategy, witness_rule) = match self.witness() {
            Some(Witness::Word(w)) => (Some(w.to_string()), None),
            Some(Witness::Feedback(f)) => (
                None,
                Some(WitnessRule {
                    plus_when_prior_in: Interval::closed(f.plus_lo.clone(), f.plus_hi.clone()).ok(),
                    minus_when_prior_in: Interval::closed(f.minus_lo.clone(), f.minus_hi.clone())
                        .ok(),
                }),
            ),
            None => (None, None),
        };
        ClassificationReport {
            class: self.kind(),
            lemma: self.lemma(),
            a: p.a(),
            witness_strategy,
            witness_rule,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessRule {
    pub plus_when_prior_in: Option<Interval>,
    pub minus_when_prior_in: Option<Interval>,
}

/// JSON shape: `{class, lemma, a, witness_strategy?, witness_rule?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub class: ClassKind,
    pub lemma: Option<Lemma>,
    pub a: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_strategy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_rule: Option<WitnessRule>,
}

pub fn classify(p: &ProblemInstance) -> Classification {
    let (rp, rt, d) = (p.r_p(), p.r_t(), p.delta());
    if rp > rt {
        return Classification::TriviallyInfeasible;
    }
    if d > &(rt * &Rational::from(p.c())) {
        return Classification::OverConstrained { lemma: Lemma::L4 };
    }
    let a = Rational::from(p.a());
    let a1 = Rational::from(p.a() + 1);
    if d >= &(&a * rp) {
        return Classification::UnderConstrained {
            lemma: Lemma::L3,
            witness: Witness::Word(
                StrategyWord::cyclic(vec![Action::Minus]).expect("non-empty cycle"),
            ),
        };
    }
    let art = &a * rt;
    let a1rp = &a1 * rp;
    if art >= a1rp {
        return Classification::UnderConstrained {
            lemma: Lemma::L5,
            witness: Witness::Feedback(Box::new(FeedbackRule::for_instance(p))),
        };
    }
    let left = &art - d;
    let right = &a1rp - d;
    if rp <= &left && &right <= rt {
        return Classification::Boundary;
    }
    if d > &(&art - rp) {
        Classification::OverConstrained { lemma: Lemma::L6i }
    } else {
        Classification::OverConstrained { lemma: Lemma::L6ii }
    }
}

/// Classifies raw parameters, validating them first.
pub fn classify_params(
    r_p: Rational,
    r_t: Rational,
    delta: Rational,
    c: u64,
) -> Result<Classification> {
    Ok(classify(&ProblemInstance::new(r_p, r_t, delta, c)?))
}
