//! Command-line front end: builds one of the bundled models (or a
//! serialized one), searches it, and renders the result.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdmusic::models::{build_all_interval, build_jarrell, verify_solution};
use fdmusic::oracle::{oracle_all_interval, oracle_jarrell, OracleError};
use fdmusic::pitch::pitch_name;
use fdmusic::search::{bab, dfs, Direction};
use fdmusic::{JarrellSpec, ModelSpec, Objective, SearchOptions, SearchOutcome, ValHeuristic, VarHeuristic, VarId};
use serde::{Deserialize, Serialize};

/// Exit status for usage and spec errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when `--verify` finds a mismatch.
pub const EXIT_VERIFY_FAILED: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "fdmusic", version, about = "Finite-domain solver for all-interval series and motive melodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All-interval series of length n.
    AllInterval {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Melody with motive counts, chord tones and fixed endpoints, read from a JSON spec file.
    Jarrell {
        spec: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Any serialized model (JSON `ModelSpec`).
    Solve {
        model: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum VarChoice {
    Input,
    Smallest,
    Largest,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ValChoice {
    Min,
    Max,
    Median,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
    Pitches,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizeArg {
    pub direction: Direction,
    pub index: usize,
}

fn parse_optimize(s: &str) -> Result<OptimizeArg, String> {
    let (dir, index) = s.split_once(':').ok_or_else(|| format!("expected min:<index> or max:<index>, got `{s}`"))?;
    let direction = match dir {
        "min" => Direction::Minimize,
        "max" => Direction::Maximize,
        other => return Err(format!("direction must be `min` or `max`, got `{other}`")),
    };
    let index = index.parse().map_err(|e| format!("bad variable index `{index}`: {e}"))?;
    Ok(OptimizeArg { direction, index })
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Stop after this many solutions (default 1 for plain search, unlimited with --optimize).
    #[arg(long, conflicts_with = "all")]
    count: Option<usize>,
    /// Enumerate every solution.
    #[arg(long)]
    all: bool,
    /// Wall-clock limit in milliseconds.
    #[arg(long, value_name = "MS")]
    time_limit: Option<u64>,
    #[arg(long, value_enum, default_value = "input")]
    var_heuristic: VarChoice,
    #[arg(long, value_enum, default_value = "min")]
    val_heuristic: ValChoice,
    /// Seed for the random heuristics.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Branch and bound on a melody note: `min:<index>` or `max:<index>`.
    #[arg(long, value_parser = parse_optimize)]
    optimize: Option<OptimizeArg>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Print search statistics.
    #[arg(long)]
    stats: bool,
    /// Re-check solutions with the direct evaluator and, where feasible, the brute-force oracle.
    #[arg(long)]
    verify: bool,
}

/// Echo of the options that shaped a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionsEcho {
    pub var_heuristic: String,
    pub val_heuristic: String,
    pub seed: u64,
    pub max_solutions: Option<usize>,
    pub time_limit_ms: Option<u64>,
    pub optimize: Option<OptimizeArg>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    /// Melody notes (or every variable for `solve`).
    pub values: Vec<i64>,
    /// Every model variable, auxiliaries included; feeds `verify_solution`.
    pub assignment: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitches: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub nodes: u64,
    pub failures: u64,
    pub max_depth: usize,
    pub elapsed_ms: u64,
}

/// The structured (`--format structured`) document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub model: serde_json::Value,
    pub options: OptionsEcho,
    pub solutions: Vec<SolutionRecord>,
    pub stats: StatsRecord,
    pub stopped_by_limit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn usage(message: impl Into<String>) -> Output {
        Output { code: EXIT_USAGE, stdout: String::new(), stderr: message.into() }
    }
}

/// How solution values map to note names.
#[derive(Clone, Copy)]
enum PitchMode {
    None,
    /// Pitch classes placed in the octave of middle C.
    PitchClass,
    Midi,
}

impl PitchMode {
    fn render(self, values: &[i64]) -> Option<Vec<String>> {
        match self {
            PitchMode::None => None,
            PitchMode::PitchClass => Some(values.iter().map(|&v| pitch_name(60 + v)).collect()),
            PitchMode::Midi => Some(values.iter().map(|&v| pitch_name(v)).collect()),
        }
    }
}

/// Outcome of `--verify`.
struct Verification {
    ok: bool,
    detail: String,
}

struct Problem {
    descriptor: serde_json::Value,
    spec: ModelSpec,
    shown: Vec<VarId>,
    pitch_mode: PitchMode,
    /// Oracle solutions over `shown`, or the reason there are none.
    oracle: Box<dyn Fn() -> Result<Vec<Vec<i64>>, OracleError>>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (problem, search) = match build_problem(cli.command) {
        Ok(p) => p,
        Err(message) => return Output::usage(format!("error: {message}\n")),
    };
    execute(problem, &search)
}

fn build_problem(command: Command) -> Result<(Problem, SearchArgs), String> {
    match command {
        Command::AllInterval { n, search } => {
            let model = build_all_interval(n).map_err(|e| format!("--n: {e}"))?;
            let pitch_mode = if n == 12 { PitchMode::PitchClass } else { PitchMode::None };
            if search.format == Format::Pitches && n != 12 {
                return Err(format!("--format pitches needs n = 12 (pitch classes), got n = {n}"));
            }
            let problem = Problem {
                descriptor: serde_json::json!({ "kind": "all_interval", "n": n }),
                spec: model.spec,
                shown: model.pitches,
                pitch_mode,
                oracle: Box::new(move || oracle_all_interval(n).map(|r| r.solutions)),
            };
            Ok((problem, search))
        }
        Command::Jarrell { spec, search } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| format!("cannot read {}: {e}", spec.display()))?;
            let jspec = JarrellSpec::from_json(&text).map_err(|e| format!("{}: {e}", spec.display()))?;
            let model = build_jarrell(&jspec).map_err(|e| e.to_string())?;
            let descriptor = serde_json::json!({
                "kind": "jarrell",
                "n": jspec.n,
                "chord": jspec.chord,
                "first": jspec.first,
                "last": jspec.last,
                "motives": jspec.motives.iter().zip(&jspec.occurrences)
                    .map(|(m, o)| serde_json::json!({ "intervals": m, "occurrences": o }))
                    .collect::<Vec<_>>(),
            });
            let problem = Problem {
                descriptor,
                spec: model.spec,
                shown: model.pitches,
                pitch_mode: PitchMode::Midi,
                oracle: Box::new(move || oracle_jarrell(&jspec).map(|r| r.solutions)),
            };
            Ok((problem, search))
        }
        Command::Solve { model, search } => {
            let text = std::fs::read_to_string(&model).map_err(|e| format!("cannot read {}: {e}", model.display()))?;
            let spec: ModelSpec = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", model.display()))?;
            if search.format == Format::Pitches {
                return Err("--format pitches is only available for the musical models".into());
            }
            let shown: Vec<VarId> = (0..spec.var_count()).map(VarId).collect();
            let problem = Problem {
                descriptor: serde_json::json!({ "kind": "model", "path": model.display().to_string(), "vars": spec.var_count() }),
                spec,
                shown,
                pitch_mode: PitchMode::None,
                oracle: Box::new(|| Err(OracleError::Refused("no oracle for arbitrary models".into()))),
            };
            Ok((problem, search))
        }
    }
}

fn search_options(args: &SearchArgs) -> Result<SearchOptions, String> {
    let var_heuristic = match args.var_heuristic {
        VarChoice::Input => VarHeuristic::InputOrder,
        VarChoice::Smallest => VarHeuristic::SmallestDomain,
        VarChoice::Largest => VarHeuristic::LargestDomain,
        VarChoice::Random => VarHeuristic::Random(args.seed),
    };
    let val_heuristic = match args.val_heuristic {
        ValChoice::Min => ValHeuristic::Min,
        ValChoice::Max => ValHeuristic::Max,
        ValChoice::Median => ValHeuristic::Median,
        ValChoice::Random => ValHeuristic::Random(args.seed ^ 0x9E37_79B9_7F4A_7C15),
    };
    let time_limit = match args.time_limit {
        Some(0) => return Err("--time-limit must be positive".into()),
        Some(ms) => Some(Duration::from_millis(ms)),
        None => None,
    };
    let max_solutions = match (args.count, args.all) {
        (Some(0), _) => return Err("--count must be positive".into()),
        (Some(k), _) => Some(k),
        (None, true) => None,
        (None, false) if args.optimize.is_some() => None,
        (None, false) => Some(1),
    };
    Ok(SearchOptions { var_heuristic, val_heuristic, time_limit, max_solutions })
}

fn verify(problem: &Problem, outcome: &SearchOutcome, shown: &[Vec<i64>], exhaustive: bool) -> Verification {
    let bad = outcome.solutions.iter().filter(|s| !verify_solution(&problem.spec, s.values())).count();
    if bad > 0 {
        return Verification { ok: false, detail: format!("{bad} solutions violate the model") };
    }
    match (problem.oracle)() {
        Err(e) => Verification { ok: true, detail: format!("{} solutions pass direct evaluation; {e}", shown.len()) },
        Ok(expected) => {
            let expected: BTreeSet<&Vec<i64>> = expected.iter().collect();
            let got: BTreeSet<&Vec<i64>> = shown.iter().collect();
            if exhaustive {
                if got == expected {
                    Verification { ok: true, detail: format!("{} solutions, oracle agrees", got.len()) }
                } else {
                    Verification {
                        ok: false,
                        detail: format!("search found {} solutions, oracle found {}", got.len(), expected.len()),
                    }
                }
            } else if got.is_subset(&expected) {
                Verification { ok: true, detail: format!("{} solutions, all confirmed by the oracle", got.len()) }
            } else {
                Verification { ok: false, detail: "search returned a solution the oracle does not know".into() }
            }
        }
    }
}

fn execute(problem: Problem, args: &SearchArgs) -> Output {
    let opts = match search_options(args) {
        Ok(o) => o,
        Err(message) => return Output::usage(format!("error: {message}\n")),
    };
    let space = match problem.spec.to_space() {
        Ok(s) => s,
        Err(e) => return Output::usage(format!("error: {e}\n")),
    };
    let outcome = match &args.optimize {
        Some(opt) => {
            let Some(&var) = problem.shown.get(opt.index) else {
                return Output::usage(format!(
                    "error: --optimize index {} out of range (0..{})\n",
                    opt.index,
                    problem.shown.len()
                ));
            };
            bab(space, Objective { var, direction: opt.direction }, &opts)
        }
        None => dfs(space, &opts),
    };

    let shown: Vec<Vec<i64>> = outcome.solutions.iter().map(|s| s.project(&problem.shown)).collect();
    // Only a plain, uncapped, unbounded search enumerates the full solution set.
    let exhaustive = !outcome.stopped_by_limit && args.optimize.is_none();
    let verification = args.verify.then(|| verify(&problem, &outcome, &shown, exhaustive));
    let stats = StatsRecord {
        nodes: outcome.stats.nodes,
        failures: outcome.stats.failures,
        max_depth: outcome.stats.max_depth,
        elapsed_ms: outcome.stats.elapsed.as_millis() as u64,
    };

    let mut stdout = String::new();
    let mut stderr = String::new();
    match args.format {
        Format::Structured => {
            let record = OutputRecord {
                model: problem.descriptor.clone(),
                options: OptionsEcho {
                    var_heuristic: format!("{:?}", args.var_heuristic).to_lowercase(),
                    val_heuristic: format!("{:?}", args.val_heuristic).to_lowercase(),
                    seed: args.seed,
                    max_solutions: opts.max_solutions,
                    time_limit_ms: args.time_limit,
                    optimize: args.optimize.clone(),
                },
                solutions: shown
                    .iter()
                    .zip(&outcome.solutions)
                    .map(|(v, s)| SolutionRecord {
                        values: v.clone(),
                        assignment: s.values().to_vec(),
                        pitches: problem.pitch_mode.render(v),
                    })
                    .collect(),
                stats,
                stopped_by_limit: outcome.stopped_by_limit,
                verified: verification.as_ref().map(|v| v.ok),
            };
            stdout = serde_json::to_string_pretty(&record).expect("output record serializes");
            stdout.push('\n');
            if let Some(v) = &verification {
                let _ = writeln!(stderr, "{}: {}", if v.ok { "VERIFIED" } else { "VERIFICATION FAILED" }, v.detail);
            }
        }
        Format::Text | Format::Pitches => {
            for v in &shown {
                let line = if args.format == Format::Pitches {
                    problem.pitch_mode.render(v).unwrap_or_default().join(" ")
                } else {
                    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
                };
                let _ = writeln!(stdout, "{line}");
            }
            if shown.is_empty() {
                let _ = writeln!(stdout, "% no solutions");
            }
            if args.stats {
                let _ = writeln!(
                    stdout,
                    "% solutions={} nodes={} failures={} max_depth={} elapsed_ms={}",
                    shown.len(),
                    stats.nodes,
                    stats.failures,
                    stats.max_depth,
                    stats.elapsed_ms
                );
            }
            if outcome.stopped_by_limit {
                let _ = writeln!(stderr, "% search stopped at a limit before exhausting the tree");
            }
            if let Some(v) = &verification {
                let _ = writeln!(stdout, "{} {}", if v.ok { "VERIFIED" } else { "VERIFICATION FAILED" }, v.detail);
            }
        }
    }
    let code = match &verification {
        Some(v) if !v.ok => EXIT_VERIFY_FAILED,
        _ => 0,
    };
    Output { code, stdout, stderr }
}
