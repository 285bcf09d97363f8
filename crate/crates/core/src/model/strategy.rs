use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

use super::{Action, ProblemInstance};

/// Prefix played once, then the cycle repeated forever.
///
/// Text form: `[prefix ['|']] '(' cycle ')*'` where each action is `+`, `-`
/// or `s<i>`. Display always writes the `|` separator when a prefix exists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrategyWord {
    prefix: Vec<Action>,
    cycle: Vec<Action>,
}

impl StrategyWord {
    pub fn new(prefix: Vec<Action>, cycle: Vec<Action>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidStrategy {
                input: format!("{}()*", tokens(&prefix)),
                reason: "cycle must be non-empty".into(),
            });
        }
        Ok(StrategyWord { prefix, cycle })
    }

    pub fn cyclic(cycle: Vec<Action>) -> Result<Self> {
        Self::new(Vec::new(), cycle)
    }

    pub fn prefix(&self) -> &[Action] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Action] {
        &self.cycle
    }

    /// Action played at zero-based step `i`.
    pub fn action_at(&self, i: usize) -> Action {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.prefix.iter().chain(self.cycle.iter())
    }

    /// Fails if any action is illegal for `p`.
    pub fn validate(&self, p: &ProblemInstance) -> Result<()> {
        for act in self.actions() {
            act.divisor_checked(p)?;
        }
        Ok(())
    }

    pub fn parse(input: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidStrategy {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s = input.trim();
        let open = s.find('(').ok_or_else(|| bad("missing '('"))?;
        let body = s[open + 1..]
            .strip_suffix(")*")
            .ok_or_else(|| bad("cycle must end with \")*\""))?;
        let mut head = &s[..open];
        if let Some(h) = head.strip_suffix('|') {
            head = h;
        }
        let prefix = parse_tokens(head).map_err(|r| bad(&r))?;
        let cycle = parse_tokens(body).map_err(|r| bad(&r))?;
        if cycle.is_empty() {
            return Err(bad("cycle must be non-empty"));
        }
        Ok(StrategyWord { prefix, cycle })
    }
}

fn parse_tokens(s: &str) -> std::result::Result<Vec<Action>, String> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b'+' => {
                out.push(Action::Plus);
                i += 1;
            }
            b'-' => {
                out.push(Action::Minus);
                i += 1;
            }
            b's' => {
                let start = i + 1;
                let mut j = start;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err("'s' must be followed by a split count".into());
                }
                let n: u64 = s[start..j]
                    .parse()
                    .map_err(|_| format!("split count {:?} out of range", &s[start..j]))?;
                if n == 0 {
                    return Err("split count must be at least 1".into());
                }
                out.push(Action::Split(n));
                i = j;
            }
            c => return Err(format!("unexpected character {:?}", c as char)),
        }
    }
    Ok(out)
}

fn tokens(acts: &[Action]) -> String {
    acts.iter().map(|a| a.to_string()).collect()
}

impl fmt::Display for StrategyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write!(f, "{}|", tokens(&self.prefix))?;
        }
        write!(f, "({})*", tokens(&self.cycle))
    }
}

impl FromStr for StrategyWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StrategyWord::parse(s)
    }
}

impl Serialize for StrategyWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StrategyWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        StrategyWord::parse(&s).map_err(serde::de::Error::custom)
    }
}
