use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Rational;

use super::{Action, ProblemInstance, StrategyWord};

/// Chooses the next action from the step number (1-based) and the current
/// posterior size.
pub trait Policy {
    fn action(&self, k: usize, size: &Rational) -> Action;
}

impl Policy for StrategyWord {
    fn action(&self, k: usize, _size: &Rational) -> Action {
        self.action_at(k - 1)
    }
}

impl<F: Fn(usize, &Rational) -> Action> Policy for F {
    fn action(&self, k: usize, size: &Rational) -> Action {
        self(k, size)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimStep {
    pub k: usize,
    pub prior_size: Rational,
    pub action: Action,
    pub posterior_size: Rational,
    pub ppc_ok: bool,
    pub ttc_ok: bool,
}

impl SimStep {
    pub fn ok(&self) -> bool {
        self.ppc_ok && self.ttc_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimTrace {
    pub eta0_size: Rational,
    pub steps: Vec<SimStep>,
}

impl SimTrace {
    /// Step number of the first violation.
    pub fn first_violation(&self) -> Option<usize> {
        self.steps.iter().find(|s| !s.ok()).map(|s| s.k)
    }

    pub fn is_clean(&self) -> bool {
        self.first_violation().is_none()
    }

    pub fn sizes(&self) -> impl Iterator<Item = &Rational> {
        std::iter::once(&self.eta0_size).chain(self.steps.iter().map(|s| &s.posterior_size))
    }

    /// CSV with exact `p/q` sizes, or rounded decimals when `decimals` is set.
    pub fn to_csv(&self, decimals: Option<usize>) -> String {
        let fmt = |r: &Rational| match decimals {
            Some(d) => r.to_decimal(d),
            None => r.to_string(),
        };
        let mut out = String::from("k,prior_size,action,posterior_size,ppc_ok,ttc_ok\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.k,
                fmt(&s.prior_size),
                s.action,
                fmt(&s.posterior_size),
                s.ppc_ok,
                s.ttc_ok
            ));
        }
        out
    }
}

/// Lazy run of a policy; stops after the first violating step or the horizon.
pub struct Simulation<'a, P: Policy + ?Sized> {
    p: &'a ProblemInstance,
    policy: &'a P,
    x: Rational,
    k: usize,
    horizon: usize,
    done: bool,
}

impl<'a, P: Policy + ?Sized> Simulation<'a, P> {
    pub fn new(p: &'a ProblemInstance, policy: &'a P, eta0_size: Rational, horizon: usize) -> Self {
        Simulation {
            p,
            policy,
            x: eta0_size,
            k: 0,
            horizon,
            done: false,
        }
    }

    pub fn current(&self) -> &Rational {
        &self.x
    }
}

impl<P: Policy + ?Sized> Iterator for Simulation<'_, P> {
    type Item = Result<SimStep>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.k >= self.horizon {
            return None;
        }
        self.k += 1;
        let action = self.policy.action(self.k, &self.x);
        let i = match action.divisor_checked(self.p) {
            Ok(i) => i,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        let prior = &self.x + self.p.delta();
        let post = &prior / &Rational::from(i);
        let step = SimStep {
            k: self.k,
            ppc_ok: &post >= self.p.r_p(),
            ttc_ok: &post <= self.p.r_t(),
            prior_size: prior,
            action,
            posterior_size: post.clone(),
        };
        if !step.ok() {
            self.done = true;
        }
        self.x = post;
        Some(Ok(step))
    }
}

fn check_start(p: &ProblemInstance, eta0_size: &Rational, horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    p.check_size(eta0_size)
}

/// Runs `w` from `eta0_size` for up to `horizon` steps.
pub fn simulate(
    p: &ProblemInstance,
    w: &StrategyWord,
    eta0_size: &Rational,
    horizon: usize,
) -> Result<SimTrace> {
    w.validate(p)?;
    simulate_policy(p, w, eta0_size, horizon)
}

pub fn simulate_policy<P: Policy + ?Sized>(
    p: &ProblemInstance,
    policy: &P,
    eta0_size: &Rational,
    horizon: usize,
) -> Result<SimTrace> {
    check_start(p, eta0_size, horizon)?;
    let steps =
        Simulation::new(p, policy, eta0_size.clone(), horizon).collect::<Result<Vec<_>>>()?;
    Ok(SimTrace {
        eta0_size: eta0_size.clone(),
        steps,
    })
}

/// First violating step without storing the trace.
pub fn first_violation<P: Policy + ?Sized>(
    p: &ProblemInstance,
    policy: &P,
    eta0_size: &Rational,
    horizon: usize,
) -> Result<Option<usize>> {
    check_start(p, eta0_size, horizon)?;
    for step in Simulation::new(p, policy, eta0_size.clone(), horizon) {
        let step = step?;
        if !step.ok() {
            return Ok(Some(step.k));
        }
    }
    Ok(None)
}
