//! The `pdtn` command-line front end.
//!
//! Every analytic command prints one JSON document on stdout and a short
//! summary on stderr. Exit codes: 0 answer computed, 2 input or flag
//! error, 3 budget exhausted outside a reportable value, 4 internal
//! inconsistency (engine disagreement, failed self-check).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::{json, Value};

use crate::decide::{solve, Bounds, DecideError, Mode, ProblemInstance};
use crate::model::{classify, valuate, GuardedPta, ParamValuation};
use crate::semantics::{region_reach_oracle, simulate, Goal};
use crate::textfmt::{parse_machine, parse_model, parse_property, parse_valuation, serialize_model};
use crate::twocm::{compile, EncodingKind};
use crate::zone::{reach, ReachOptions, ReachStatus, DEFAULT_BUDGET};
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "pdtn", version, about = "Parametric disjunctive timed networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
#[command(group(ArgGroup::new("goal").required(true).args(["target", "prop"])))]
struct GoalArgs {
    /// Target location.
    #[arg(long)]
    target: Option<String>,
    /// Global property, e.g. "#error >= 1 & #init = 0".
    #[arg(long)]
    prop: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the syntactic class of a model.
    Classify { model: PathBuf },
    /// Zone-based reachability for a valuated network.
    Reach {
        model: PathBuf,
        #[command(flatten)]
        goal: GoalArgs,
        #[arg(long)]
        n: usize,
        /// Parameter value, NAME=INT; repeatable.
        #[arg(long = "param", value_name = "NAME=INT")]
        params: Vec<String>,
        /// Write the witness trace to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        budget: Option<usize>,
        /// Cross-check with the region-graph oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Parameter emptiness.
    Check {
        model: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[command(flatten)]
        goal: GoalArgs,
        #[arg(long = "bound-n", default_value_t = 4)]
        bound_n: usize,
        #[arg(long = "bound-p", default_value_t = 4)]
        bound_p: u64,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Random run of a valuated network.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long = "param", value_name = "NAME=INT")]
        params: Vec<String>,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Compile a 2-counter machine into a model.
    #[command(name = "compile-2cm")]
    Compile2cm {
        machine: PathBuf,
        /// single, three or fixed:N
        #[arg(long, value_parser = parse_encoding)]
        encoding: EncodingArg,
        /// Keep invariants (one-clock encodings).
        #[arg(long)]
        invariants: bool,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Canonical re-serialization.
    Fmt { model: PathBuf },
}

#[derive(Debug, Clone, Copy)]
enum EncodingArg {
    Single,
    Three,
    Fixed(usize),
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "pr-e" => Ok(Mode::PRe),
        "pgr-e" => Ok(Mode::PGRe),
        _ => Err(format!("expected pr-e or pgr-e, got `{s}`")),
    }
}

fn parse_encoding(s: &str) -> Result<EncodingArg, String> {
    match s {
        "single" => Ok(EncodingArg::Single),
        "three" => Ok(EncodingArg::Three),
        _ => {
            let n = s
                .strip_prefix("fixed:")
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| format!("expected single, three or fixed:N, got `{s}`"))?;
            if n < 3 {
                return Err(format!("fixed:N needs N >= 3, got {n}"));
            }
            Ok(EncodingArg::Fixed(n))
        }
    }
}

/// A failed command: exit code and message.
struct Failure(i32, String);

impl Failure {
    fn input(msg: impl ToString) -> Self {
        Failure(EXIT_INPUT, msg.to_string())
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        let code = match e {
            DecideError::BudgetExhausted { .. } => EXIT_BUDGET,
            DecideError::SelfCheck(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure(code, e.to_string())
    }
}

/// Result of a command: stdout text and stderr summary.
struct Output {
    stdout: String,
    summary: String,
    code: i32,
}

impl Output {
    fn json(v: Value, summary: impl Into<String>) -> Self {
        Output { stdout: format!("{}\n", serde_json::to_string_pretty(&v).unwrap()), summary: summary.into(), code: EXIT_OK }
    }
}

/// Runs `pdtn` with `args` (including the program name); returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            if !out.summary.is_empty() {
                eprintln!("{}", out.summary);
            }
            out.code
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn execute(cmd: Command) -> Result<Output, Failure> {
    match cmd {
        Command::Classify { model } => {
            let m = load_model(&model)?;
            let report = classify(&m).map_err(Failure::input)?;
            let summary = format!(
                "{}: {} clock(s), {} parameter(s), {}",
                m.name,
                report.clock_count,
                report.param_count,
                if report.is_lu() { "L/U" } else { "not L/U" }
            );
            Ok(Output::json(serde_json::to_value(&report).unwrap(), summary))
        }
        Command::Reach { model, goal, n, params, witness, budget, oracle } => {
            let m = load_model(&model)?;
            let goal = resolve_goal(&goal)?;
            let v = collect_params(&params)?;
            let budget = effective_budget(budget)?;
            let r = reach(&m, &v, n, &goal, &ReachOptions::with_budget(budget)).map_err(Failure::input)?;
            let mut doc = r.to_json();
            let mut summary = format!("{} at n={n} ({} symbolic states)", r.status.as_str(), r.explored);
            let mut code = EXIT_OK;
            if let (Some(path), Some(w)) = (&witness, &r.witness) {
                write_json(path, &w.to_json())?;
                summary.push_str(&format!("; witness written to {}", path.display()));
            }
            if oracle {
                let valuated = valuate(&m, &v).map_err(Failure::input)?;
                let o = region_reach_oracle(&valuated, n, &goal, budget).map_err(Failure::input)?;
                doc["oracle"] = json!(o.as_str());
                let decided = |s: ReachStatus| s != ReachStatus::BudgetExceeded;
                if decided(o) && decided(r.status) && o != r.status {
                    summary.push_str(&format!("; ORACLE DISAGREES: {}", o.as_str()));
                    code = EXIT_INTERNAL;
                } else {
                    summary.push_str(&format!("; oracle: {}", o.as_str()));
                }
            }
            let mut out = Output::json(doc, summary);
            out.code = code;
            Ok(out)
        }
        Command::Check { model, mode, goal, bound_n, bound_p, budget } => {
            let m = load_model(&model)?;
            let goal = resolve_goal(&goal)?;
            let inst = ProblemInstance::new(m, mode, goal)?;
            let bounds = Bounds { n_max: bound_n, p_max: bound_p, state_budget: effective_budget(budget)? };
            let verdict = solve(&inst, &bounds)?;
            let summary = format!(
                "{mode}: {} ({}, method {})",
                verdict.answer_str(),
                if verdict.exact { "exact" } else { "bounded" },
                verdict.method
            );
            Ok(Output::json(verdict.to_json(), summary))
        }
        Command::Simulate { model, n, params, steps, seed } => {
            let m = load_model(&model)?;
            let v = collect_params(&params)?;
            let trace = simulate::<Rational>(&m, n, &v, steps, seed).map_err(Failure::input)?;
            let summary = format!("{} steps, total delay {}", trace.len(), trace.total_delay());
            Ok(Output::json(trace.to_json(), summary))
        }
        Command::Compile2cm { machine, encoding, invariants, output } => {
            let text = read(&machine)?;
            let m = parse_machine(&text).map_err(|e| Failure::input(format!("{}: {e}", machine.display())))?;
            let kind = match encoding {
                EncodingArg::Single => EncodingKind::SinglePta,
                EncodingArg::Three => EncodingKind::ThreeProcess { with_invariants: invariants },
                EncodingArg::Fixed(n) => EncodingKind::FixedN { n, with_invariants: invariants },
            };
            let compiled = compile(&m, kind).map_err(Failure::input)?;
            let sidecar = sidecar_path(&output);
            fs::write(&output, serialize_model(&compiled.model))
                .map_err(|e| Failure::input(format!("{}: {e}", output.display())))?;
            write_json(&sidecar, &compiled.sidecar())?;
            let doc = json!({
                "model": output.display().to_string(),
                "sidecar": sidecar.display().to_string(),
                "halt": compiled.halt,
                "locations": compiled.model.locations.len(),
                "edges": compiled.model.edges.len(),
            });
            let summary = format!("{kind} encoding: {} locations, halt location {}", compiled.model.locations.len(), compiled.halt);
            Ok(Output::json(doc, summary))
        }
        Command::Fmt { model } => {
            let m = load_model(&model)?;
            Ok(Output { stdout: serialize_model(&m), summary: String::new(), code: EXIT_OK })
        }
    }
}

/// `out.json` gets `out.sidecar.json`; other names get `.sidecar.json` appended.
pub fn sidecar_path(model_path: &Path) -> PathBuf {
    let s = model_path.to_string_lossy();
    match s.strip_suffix(".json") {
        Some(stem) => PathBuf::from(format!("{stem}.sidecar.json")),
        None => PathBuf::from(format!("{s}.sidecar.json")),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<GuardedPta, Failure> {
    parse_model(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = format!("{}\n", serde_json::to_string_pretty(v).unwrap());
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn resolve_goal(g: &GoalArgs) -> Result<Goal, Failure> {
    match (&g.target, &g.prop) {
        (Some(t), None) => Ok(Goal::location(t.clone())),
        (None, Some(p)) => parse_property(p).map(Goal::Property).map_err(|e| Failure::input(format!("--prop: {e}"))),
        _ => Err(Failure::input("exactly one of --target and --prop is required")),
    }
}

fn collect_params(params: &[String]) -> Result<ParamValuation, Failure> {
    parse_valuation(&params.join(",")).map_err(|e| Failure::input(format!("--param: {e}")))
}

/// `--budget`, else `PDTN_BUDGET`, else the default.
fn effective_budget(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("PDTN_BUDGET") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::input(format!("PDTN_BUDGET: not a number: `{s}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}
