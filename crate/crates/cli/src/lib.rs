//! Command-line front end: argument types, dispatch and exit statuses.
//! `run` is pure apart from writing requested artifact files, so tests can
//! drive it without spawning a process.

pub mod sweep;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use privtrack::analysis::{c_star, region_map, rt_star, rt_star_exact, tracking_power, Window};
use privtrack::boundary::{
    backpropagate_zones, synthesize_strategy, tau_relaxed_feasible, Outcome, ZoneReport,
    DEFAULT_MAX_PERIODS,
};
use privtrack::classifier::{classify, Classification, Witness};
use privtrack::model::simulate;
use privtrack::oracle::{brute_force_survival, maximal_invariant_set, OracleResult};
use privtrack::{Error, IntervalSet, ProblemInstance, Rational, StrategyWord};
use serde::Serialize;

pub const OUT_DIR_ENV: &str = "PRIVTRACK_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    Usage = 1,
    /// Infeasible instance or initial size, or a failed sweep.
    Infeasible = 2,
    Undetermined = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "privtrack",
    version,
    about = "Exact analysis of privacy-preserving tracking instances"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; each subcommand accepts a subset.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base directory for relative artifact paths.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
}

/// Numbers are exact decimals or `p/q`.
#[derive(Clone, Debug, Args)]
pub struct InstanceArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rp: String,
    #[arg(long, allow_hyphen_values = true)]
    pub rt: String,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: String,
    #[arg(long)]
    pub c: u64,
}

impl InstanceArgs {
    pub fn instance(&self) -> privtrack::Result<ProblemInstance> {
        ProblemInstance::parse(&self.rp, &self.rt, &self.delta, self.c)
    }
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Classification JSON.
    Classify(InstanceArgs),
    /// Impossibility zones and feasible set of a boundary instance.
    Zones {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Also report sizes that survive a pursuer giving up after N steps.
        #[arg(long)]
        tau: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_PERIODS)]
        max_periods: usize,
        /// Cross-check the feasible set against the fixpoint oracle.
        #[arg(long)]
        check_oracle: bool,
        #[arg(long, default_value_t = 20_000)]
        oracle_cap: usize,
    },
    /// Strategy word from an initial size.
    Strategy {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, allow_hyphen_values = true)]
        eta0: String,
        #[arg(long, default_value_t = DEFAULT_MAX_PERIODS)]
        max_periods: usize,
    },
    /// Step-by-step trace of a strategy word.
    Simulate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, allow_hyphen_values = true)]
        strategy: String,
        #[arg(long, allow_hyphen_values = true)]
        eta0: String,
        #[arg(long, default_value_t = 100)]
        horizon: usize,
        /// Print sizes as rounded decimals instead of exact values.
        #[arg(long)]
        decimals: Option<usize>,
    },
    /// Maximal invariant set by fixpoint iteration.
    Oracle {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 20_000)]
        cap: usize,
        /// Also run the exhaustive survival search from this size.
        #[arg(long, allow_hyphen_values = true)]
        eta0: Option<String>,
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// Tightest tracking bound solvable from every initial size.
    Rtstar {
        #[arg(long, allow_hyphen_values = true)]
        rp: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long)]
        c: u64,
        /// Use the true threshold `r_p` when `delta / r_p` is an integer.
        #[arg(long)]
        exact: bool,
    },
    /// Classification grid over (r_p, r_t) at delta = 2.
    Map {
        #[arg(long)]
        c: u64,
        #[arg(long, default_value_t = 400)]
        resolution: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "0")]
        rp_lo: String,
        #[arg(long, default_value = "2")]
        rp_hi: String,
        #[arg(long, default_value = "0")]
        rt_lo: String,
        #[arg(long, default_value = "2")]
        rt_hi: String,
    },
    /// Area of solvable-or-boundary instances at delta = 2.
    Power {
        #[arg(long)]
        c: u64,
        #[arg(long, default_value_t = 2000)]
        resolution: u32,
    },
    /// Seeded sweep comparing the zone analysis with the oracle.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 20_000)]
        cap: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub status: Status,
    pub stdout: String,
    pub stderr: String,
}

struct Fail(Status, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NotBoundary
            | Error::InitialStateInfeasible(_)
            | Error::InitialSizeOutOfBounds { .. } => Status::Infeasible,
            _ => Status::Usage,
        };
        Fail(status, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(Status::Usage, msg.into())
}

struct Emit {
    status: Status,
    body: String,
    notes: Vec<String>,
}

impl Emit {
    fn ok(body: String) -> Self {
        Emit {
            status: Status::Ok,
            body,
            notes: Vec::new(),
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn num(s: &str) -> Result<Rational, Fail> {
    Rational::parse(s).map_err(Fail::from)
}

fn formats(cfg: &RunConfig, allowed: &[Format], default: Format) -> Result<Format, Fail> {
    match cfg.format {
        None => Ok(default),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(usage(format!(
            "format {f:?} is not supported by this subcommand"
        ))),
    }
}

fn resolve(cfg: &RunConfig, p: &Path) -> PathBuf {
    match &cfg.out_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

fn write_file(
    cfg: &RunConfig,
    p: &Path,
    contents: &str,
    notes: &mut Vec<String>,
) -> Result<(), Fail> {
    let path = resolve(cfg, p);
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| usage(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(&path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    notes.push(format!("wrote {}", path.display()));
    Ok(())
}

/// Executes one subcommand.
pub fn run(cfg: &RunConfig) -> RunOutput {
    let result = dispatch(cfg).and_then(|mut e| {
        if let Some(out) = &cfg.out {
            let body = std::mem::take(&mut e.body);
            write_file(cfg, out, &body, &mut e.notes)?;
        }
        Ok(e)
    });
    match result {
        Ok(e) => {
            let mut stderr = String::new();
            for n in &e.notes {
                let _ = writeln!(stderr, "{n}");
            }
            RunOutput {
                status: e.status,
                stdout: e.body,
                stderr,
            }
        }
        Err(Fail(status, msg)) => RunOutput {
            status,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

/// Parses `args` (including the program name) and runs. Help and version
/// requests exit 0; other argument errors exit 1.
pub fn run_args<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                RunOutput {
                    status: Status::Usage,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                RunOutput {
                    status: Status::Ok,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Emit, Fail> {
    match &cfg.command {
        Command::Classify(inst) => {
            formats(cfg, &[Format::Json], Format::Json)?;
            let p = inst.instance()?;
            Ok(Emit::ok(json(&classify(&p).report(&p))))
        }
        Command::Zones {
            inst,
            tau,
            max_periods,
            check_oracle,
            oracle_cap,
        } => {
            formats(cfg, &[Format::Json], Format::Json)?;
            zones(
                &inst.instance()?,
                *tau,
                *max_periods,
                *check_oracle,
                *oracle_cap,
            )
        }
        Command::Strategy {
            inst,
            eta0,
            max_periods,
        } => {
            formats(cfg, &[Format::Text], Format::Text)?;
            let p = inst.instance()?;
            let x0 = num(eta0)?;
            strategy(&p, &x0, *max_periods)
        }
        Command::Simulate {
            inst,
            strategy,
            eta0,
            horizon,
            decimals,
        } => {
            let fmt = formats(cfg, &[Format::Csv, Format::Json], Format::Csv)?;
            let p = inst.instance()?;
            let x0 = num(eta0)?;
            let w = StrategyWord::parse(strategy)?;
            let trace = simulate(&p, &w, &x0, *horizon)?;
            let body = match fmt {
                Format::Json => json(&trace),
                _ => trace.to_csv(*decimals),
            };
            let mut e = Emit::ok(body);
            if let Some(k) = trace.first_violation() {
                e.status = Status::Infeasible;
                e.notes.push(format!("violation at step {k}"));
            }
            Ok(e)
        }
        Command::Oracle {
            inst,
            cap,
            eta0,
            depth,
        } => {
            formats(cfg, &[Format::Json], Format::Json)?;
            let p = inst.instance()?;
            let x0 = eta0.as_deref().map(num).transpose()?;
            if *cap == 0 {
                return Err(usage("--cap must be at least 1"));
            }
            oracle(&p, *cap, x0, *depth)
        }
        Command::Rtstar {
            rp,
            delta,
            c,
            exact,
        } => {
            let fmt = formats(cfg, &[Format::Text, Format::Json], Format::Text)?;
            let (rp, delta) = (num(rp)?, num(delta)?);
            let v = if *exact {
                rt_star_exact(&rp, &delta, *c)?
            } else {
                rt_star(&rp, &delta, *c)?
            };
            #[derive(Serialize)]
            struct Out {
                rt_star: Rational,
                c_star: u64,
                decimal: String,
            }
            Ok(Emit::ok(match fmt {
                Format::Json => json(&Out {
                    decimal: v.to_decimal(12),
                    rt_star: v,
                    c_star: c_star(&rp, &delta),
                }),
                _ => format!("{v}\n"),
            }))
        }
        Command::Map {
            c,
            resolution,
            csv,
            svg,
            rp_lo,
            rp_hi,
            rt_lo,
            rt_hi,
        } => {
            let fmt = formats(cfg, &[Format::Csv, Format::Svg], Format::Csv)?;
            let window = Window {
                rp_lo: num(rp_lo)?,
                rp_hi: num(rp_hi)?,
                rt_lo: num(rt_lo)?,
                rt_hi: num(rt_hi)?,
            };
            let grid = region_map(*c, *resolution, &window)?;
            let mut e = Emit::ok(String::new());
            if let Some(path) = csv {
                write_file(cfg, path, &grid.to_csv(), &mut e.notes)?;
            }
            if let Some(path) = svg {
                write_file(cfg, path, &grid.to_svg(), &mut e.notes)?;
            }
            if csv.is_none() && svg.is_none() {
                e.body = match fmt {
                    Format::Svg => grid.to_svg(),
                    _ => grid.to_csv(),
                };
            }
            Ok(e)
        }
        Command::Power { c, resolution } => {
            let fmt = formats(cfg, &[Format::Text, Format::Json], Format::Text)?;
            if *resolution < 100 {
                return Err(usage("--resolution must be at least 100"));
            }
            let est = tracking_power(*c, *resolution)?;
            Ok(Emit::ok(match fmt {
                Format::Json => json(&est),
                _ => format!("{:.6} ± {:.6}\n", est.estimate_f64(), est.error_bound_f64()),
            }))
        }
        Command::Verify { seed, count, cap } => {
            let fmt = formats(cfg, &[Format::Text, Format::Json], Format::Text)?;
            if *count == 0 || *cap == 0 {
                return Err(usage("--count and --cap must be at least 1"));
            }
            let report = sweep::verify(*seed, *count, *cap);
            let mut e = Emit::ok(match fmt {
                Format::Json => json(&report),
                _ => report.to_text(),
            });
            if !report.passed() {
                e.status = Status::Infeasible;
            }
            Ok(e)
        }
    }
}

/// Instances whose published reference zone lists do not follow from the
/// size dynamics, with the reason shown to the user.
fn known_discrepancy(p: &ProblemInstance) -> Option<&'static str> {
    let ex2 = ProblemInstance::parse("76", "101.3", "223", 4).expect("valid literal");
    (p.r_p() == ex2.r_p() && p.r_t() == ex2.r_t() && p.delta() == ex2.delta() && p.c() == ex2.c()).then_some(
        "note: the interval list and strategy (+--(-)^2)* published for (76, 101.3, 223, 4) \
         are inconsistent with the size dynamics (76 -> 299/3 -> 242/3 -> 911/12 < 76 under +,-,-); \
         the zones here are computed exactly and cross-checked against the fixpoint oracle",
    )
}

#[derive(Serialize)]
struct ZonesOut<'a> {
    #[serde(flatten)]
    report: &'a ZoneReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau_feasible_set: Option<IntervalSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

fn zones(
    p: &ProblemInstance,
    tau: Option<usize>,
    max_periods: usize,
    check: bool,
    cap: usize,
) -> Result<Emit, Fail> {
    let report = backpropagate_zones(p, max_periods)?;
    let tau_feasible_set = tau.map(|t| tau_relaxed_feasible(&report, t)).transpose()?;
    let mut notes = Vec::new();
    let note = known_discrepancy(p);
    let oracle_agrees = if check || note.is_some() {
        let o = maximal_invariant_set(p, cap);
        match &report.feasible_set {
            Some(fs) if o.converged => Some(fs == &o.safe_set),
            _ => None,
        }
    } else {
        None
    };
    if let Some(n) = note {
        notes.push(n.to_string());
    }
    let body = json(&ZonesOut {
        report: &report,
        tau,
        tau_feasible_set,
        oracle_agrees,
        notes: notes.clone(),
    });
    let status = match report.outcome {
        Outcome::Feasible => Status::Ok,
        Outcome::Infeasible => Status::Infeasible,
        Outcome::Undetermined => Status::Undetermined,
    };
    if oracle_agrees == Some(false) {
        notes.push("oracle disagrees with the zone analysis".into());
    }
    Ok(Emit {
        status,
        body,
        notes,
    })
}

fn strategy(p: &ProblemInstance, x0: &Rational, max_periods: usize) -> Result<Emit, Fail> {
    p.check_size(x0)?;
    match classify(p) {
        Classification::Boundary => {
            let report = backpropagate_zones(p, max_periods)?;
            if report.outcome == Outcome::Undetermined {
                return Err(Fail(
                    Status::Undetermined,
                    "zone analysis undetermined at the step cap".into(),
                ));
            }
            let w = synthesize_strategy(&report, x0)?;
            Ok(Emit::ok(format!("{w}\n")))
        }
        Classification::UnderConstrained { witness, .. } => match witness {
            Witness::Word(w) => Ok(Emit::ok(format!("{w}\n"))),
            Witness::Feedback(rule) => match rule.as_word(p, x0, 10_000) {
                Some(w) => Ok(Emit::ok(format!("{w}\n"))),
                None => {
                    let (plo, phi) = rule.plus_prior_range();
                    let (mlo, mhi) = rule.minus_prior_range();
                    let mut e = Emit::ok(format!(
                        "feedback: - when prior in [{mlo}, {mhi}], + when prior in [{plo}, {phi}]\n"
                    ));
                    e.notes.push(
                        "no periodic word within 10000 steps; printing the feedback rule".into(),
                    );
                    Ok(e)
                }
            },
        },
        other => Err(Fail(
            Status::Infeasible,
            format!(
                "no strategy exists: instance is {}{}",
                other.kind(),
                other.lemma().map(|l| format!(" ({l})")).unwrap_or_default()
            ),
        )),
    }
}

#[derive(Serialize)]
struct Survival {
    eta0: Rational,
    depth: u32,
    steps: u32,
}

#[derive(Serialize)]
struct OracleOut<'a> {
    #[serde(flatten)]
    result: &'a OracleResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    survival: Option<Survival>,
}

fn oracle(p: &ProblemInstance, cap: usize, x0: Option<Rational>, depth: u32) -> Result<Emit, Fail> {
    let survival = match x0 {
        Some(x) => {
            p.check_size(&x)?;
            if depth == 0 {
                return Err(usage("--depth must be at least 1"));
            }
            let steps = brute_force_survival(p, &x, depth);
            Some(Survival {
                eta0: x,
                depth,
                steps,
            })
        }
        None => None,
    };
    let result = maximal_invariant_set(p, cap);
    let status = if result.converged {
        Status::Ok
    } else {
        Status::Undetermined
    };
    let body = json(&OracleOut {
        result: &result,
        survival,
    });
    let mut e = Emit::ok(body);
    e.status = status;
    if !result.converged {
        e.notes
            .push(format!("not converged after {cap} iterations"));
    }
    Ok(e)
}
