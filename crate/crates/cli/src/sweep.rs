//! Seeded oracle-vs-analyzer sweep behind `privtrack verify`.

use privtrack::analysis::boundary_triangles;
use privtrack::boundary::{backpropagate_zones, Outcome, DEFAULT_MAX_PERIODS};
use privtrack::classifier::{classify, ClassKind};
use privtrack::oracle::maximal_invariant_set;
use privtrack::{IntervalSet, ProblemInstance, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const DEN: i64 = 1000;
// Gives up on a class after this many draws per requested instance.
const MAX_DRAWS_PER_HIT: usize = 500;

fn grid_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Rational {
    let lo = ((lo * DEN as f64).floor() as i64).max(1);
    let hi = ((hi * DEN as f64).ceil() as i64).max(lo);
    Rational::ratio(rng.gen_range(lo..=hi), DEN)
}

fn rescale(rng: &mut ChaCha8Rng, p: ProblemInstance) -> ProblemInstance {
    let lambda = Rational::ratio(rng.gen_range(1..=400), 4);
    p.scaled(&lambda).expect("positive scale")
}

/// Boundary instance drawn from the bounding box of a random triangle at
/// `delta = 2`, then rescaled.
pub fn sample_boundary(rng: &mut ChaCha8Rng) -> Option<ProblemInstance> {
    for _ in 0..MAX_DRAWS_PER_HIT {
        let c = rng.gen_range(2..=6u64);
        let tris = boundary_triangles(c);
        let t = &tris[rng.gen_range(0..tris.len())];
        let xs: Vec<f64> = t.vertices.iter().map(|v| v.0.to_f64()).collect();
        let ys: Vec<f64> = t.vertices.iter().map(|v| v.1.to_f64()).collect();
        let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rp = grid_point(rng, lo(&xs), hi(&xs));
        let rt = grid_point(rng, lo(&ys), hi(&ys));
        let p = ProblemInstance::new(rp, rt, Rational::from(2), c).expect("positive");
        if classify(&p).is_boundary() {
            return Some(rescale(rng, p));
        }
    }
    None
}

/// Instance of class `kind`, uniform over `(0, 2]^2` at `delta = 2`, rescaled.
pub fn sample_class(rng: &mut ChaCha8Rng, kind: ClassKind) -> Option<ProblemInstance> {
    for _ in 0..MAX_DRAWS_PER_HIT {
        let c = rng.gen_range(1..=8u64);
        let rp = grid_point(rng, 0.0, 2.0);
        let rt = grid_point(rng, 0.0, 2.0);
        let p = ProblemInstance::new(rp, rt, Rational::from(2), c).expect("positive");
        if classify(&p).kind() == kind {
            return Some(rescale(rng, p));
        }
    }
    None
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckCount {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    /// Instances without a verdict from one of the two paths.
    pub skipped: usize,
}

impl CheckCount {
    fn new(name: &'static str) -> Self {
        CheckCount {
            name,
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        }
    }

    pub fn ok(&self) -> bool {
        self.checked > 0 && self.checked == self.passed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub count: usize,
    pub checks: Vec<CheckCount>,
    /// First few disagreements, as instance descriptions.
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckCount::ok)
    }

    pub fn check(&self, name: &str) -> Option<&CheckCount> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("seed {} count {}\n", self.seed, self.count);
        for c in &self.checks {
            out.push_str(&format!(
                "{} {}: {}/{} (skipped {})\n",
                if c.ok() { "PASS" } else { "FAIL" },
                c.name,
                c.passed,
                c.checked,
                c.skipped
            ));
        }
        for f in &self.failures {
            out.push_str(&format!("  failure: {f}\n"));
        }
        out.push_str(if self.passed() {
            "verify: pass\n"
        } else {
            "verify: FAIL\n"
        });
        out
    }
}

fn describe(p: &ProblemInstance) -> String {
    format!(
        "r_p={} r_t={} delta={} c={}",
        p.r_p(),
        p.r_t(),
        p.delta(),
        p.c()
    )
}

/// Compares the zone analysis with the fixpoint oracle on `count` boundary
/// instances, and checks the oracle alone on `count` solvable and `count`
/// over-constrained instances. Boundary instances without a verdict from
/// either path are redrawn and counted as skipped.
pub fn verify(seed: u64, count: usize, oracle_cap: usize) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut fail = |msg: String| {
        if failures.len() < 10 {
            failures.push(msg);
        }
    };

    let mut equiv = CheckCount::new("boundary-oracle-equivalence");
    let mut lemma8 = CheckCount::new("boundary-partition-p-or-m-is-1");
    let mut draws = 0;
    while equiv.checked < count && draws < count * 4 {
        draws += 1;
        let Some(p) = sample_boundary(&mut rng) else {
            break;
        };
        let report = match backpropagate_zones(&p, DEFAULT_MAX_PERIODS) {
            Ok(r) => r,
            Err(e) => {
                equiv.record(false);
                fail(format!("{}: {e}", describe(&p)));
                continue;
            }
        };
        let l8 = report.partition.p == 1 || report.partition.m == 1;
        lemma8.record(l8);
        if !l8 {
            fail(format!(
                "{}: p={} m={}",
                describe(&p),
                report.partition.p,
                report.partition.m
            ));
        }
        let oracle = maximal_invariant_set(&p, oracle_cap);
        match (&report.feasible_set, oracle.converged) {
            (Some(fs), true) => {
                let ok = fs == &oracle.safe_set;
                equiv.record(ok);
                if !ok {
                    fail(format!(
                        "{}: zones give {} but oracle gives {}",
                        describe(&p),
                        fs,
                        oracle.safe_set
                    ));
                }
            }
            _ => {
                debug_assert!(report.outcome == Outcome::Undetermined || !oracle.converged);
                equiv.skipped += 1;
            }
        }
    }

    let mut under = CheckCount::new("under-constrained-safe-set-is-everything");
    for _ in 0..count {
        let Some(p) = sample_class(&mut rng, ClassKind::UnderConstrained) else {
            break;
        };
        let r = maximal_invariant_set(&p, oracle_cap);
        let want = IntervalSet::from(p.bounds().expect("r_p <= r_t"));
        let ok = r.converged && r.safe_set == want;
        under.record(ok);
        if !ok {
            fail(format!("{}: safe set {}", describe(&p), r.safe_set));
        }
    }

    let mut over = CheckCount::new("over-constrained-safe-set-is-empty");
    for _ in 0..count {
        let Some(p) = sample_class(&mut rng, ClassKind::OverConstrained) else {
            break;
        };
        let r = maximal_invariant_set(&p, oracle_cap);
        if !r.converged {
            over.skipped += 1;
            continue;
        }
        let ok = r.safe_set.is_empty();
        over.record(ok);
        if !ok {
            fail(format!("{}: safe set {}", describe(&p), r.safe_set));
        }
    }

    VerifyReport {
        seed,
        count,
        checks: vec![equiv, lemma8, under, over],
        failures,
    }
}
