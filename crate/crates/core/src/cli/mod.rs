//! The `timed-opacity` command line.
//!
//! Exit codes: 0 opaque / found / agreement, 2 not opaque / nothing found /
//! mismatch, 3 inconclusive under the state budget or timeout, 1 usage,
//! input or output errors.

pub mod bench;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;

use crate::intervals::Granularity;
use crate::model::TimedAutomaton;
use crate::oracle::{cross_check, OracleConfig, OracleError, Side};
use crate::parser::parse_model;
use crate::reach::ExplorationLimits;
use crate::synth::{check_full_opacity, synthesize, Mode, SynthError, SynthOptions};

use bench::{parse_range, run_bench, BenchMode, CSV_HEADER};
use report::{verdict_label, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "timed-opacity", version, about = "Full timed opacity checking and control synthesis for timed automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the execution time leaks the secret.
    Check(CheckArgs),
    /// Print the private and public duration sets.
    Durations(CheckArgs),
    /// Synthesize sets of controllable actions that make the model opaque.
    Synth(SynthArgs),
    /// Compare the symbolic duration sets with a grid search.
    Oracle(OracleArgs),
    /// Time synthesis on the ATM with extra controllable actions.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    All,
    Min,
    Max,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::All => Mode::All,
            ModeArg::Min => Mode::Min,
            ModeArg::Max => Mode::Max,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = ExplorationLimits::default().max_states)]
    pub max_states: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Stop at the first strategy found (min or max only).
    #[arg(long)]
    pub witness: bool,
    /// Ignore strategies under which the final location is unreachable.
    #[arg(long)]
    pub effective_only: bool,
    /// Skip subsets of strategies known to block the final location.
    #[arg(long)]
    pub prune: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long, default_value_t = ExplorationLimits::default().max_states)]
    pub max_states: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub file: PathBuf,
    #[arg(long, default_value = "0.5")]
    pub granularity: Granularity,
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: i64,
    /// Budget of the grid search.
    #[arg(long, default_value_t = OracleConfig::default().max_states)]
    pub max_states: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark family; only `atm` exists.
    pub family: String,
    /// Number of added actions, `N` or `A..B`.
    #[arg(long)]
    pub added_actions: String,
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub modes: Vec<BenchMode>,
    /// Per-run wall-clock limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub effective_only: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<i32, String> {
    match command {
        Command::Check(a) => cmd_check(a, out, false),
        Command::Durations(a) => cmd_check(a, out, true),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

/// Reads and parses a model file.
pub fn load_model(path: &Path) -> Result<TimedAutomaton, String> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => format!("no such file: {}", path.display()),
        _ => format!("cannot read {}: {e}", path.display()),
    })?;
    parse_model(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), String> {
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write, durations_only: bool) -> Result<i32, String> {
    let ta = load_model(&a.file)?;
    let started = Instant::now();
    let limits = ExplorationLimits::with_max_states(a.max_states);
    let verdict = check_full_opacity(&ta, &limits).map_err(|e| e.to_string())?;
    let seconds = started.elapsed().as_secs_f64();
    let algorithm = if durations_only { "durations" } else { "check" };
    let report = RunReport::check(&ta, algorithm, &verdict, seconds);
    let text = match a.format {
        Format::Json => report.to_json() + "\n",
        Format::Text if durations_only => format!("dpriv: {}\ndpub: {}\n", verdict.dpriv, verdict.dpub),
        Format::Text => format!(
            "model {}\nverdict: {}\ndpriv: {}\ndpub: {}\nstates: {}\n",
            ta.name,
            verdict_label(&verdict),
            verdict.dpriv,
            verdict.dpub,
            verdict.states_explored
        ),
    };
    emit(out, &text)?;
    Ok(match (verdict.conclusive, verdict.opaque) {
        (false, _) => EXIT_INCONCLUSIVE,
        (true, _) if durations_only => EXIT_OK,
        (true, true) => EXIT_OK,
        (true, false) => EXIT_NEGATIVE,
    })
}

fn timeout(seconds: Option<f64>) -> Result<Option<Duration>, String> {
    match seconds {
        Some(s) if s <= 0.0 || !s.is_finite() => Err("timeout must be positive".into()),
        Some(s) => Ok(Some(Duration::from_secs_f64(s))),
        None => Ok(None),
    }
}

fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<i32, String> {
    if a.witness && a.mode == ModeArg::All {
        return Err("witness requires min or max".into());
    }
    if a.jobs == 0 {
        return Err("jobs must be positive".into());
    }
    let ta = load_model(&a.file)?;
    let options = SynthOptions {
        effective_only: a.effective_only,
        prune: a.prune,
        limits: ExplorationLimits::with_max_states(a.max_states),
        jobs: a.jobs,
        timeout: timeout(a.timeout)?,
    };
    let result = match synthesize(&ta, a.mode.into(), a.witness, &options) {
        Ok(r) => r,
        Err(e @ (SynthError::Inconclusive(_) | SynthError::Timeout(_))) => {
            emit(out, &format!("inconclusive: {e}\n"))?;
            return Ok(EXIT_INCONCLUSIVE);
        }
        Err(e) => return Err(e.to_string()),
    };
    let report = RunReport::synthesis(&ta, &result);
    let text = match a.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.synthesis_text(),
    };
    emit(out, &text)?;
    Ok(if result.strategies.is_empty() { EXIT_NEGATIVE } else { EXIT_OK })
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<i32, String> {
    if a.horizon <= 0 {
        return Err("horizon must be positive".into());
    }
    let ta = load_model(&a.file)?;
    let config = OracleConfig {
        granularity: a.granularity,
        horizon: a.horizon,
        max_states: a.max_states,
    };
    let check = match cross_check(&ta, &config, &ExplorationLimits::default()) {
        Ok(c) => c,
        Err(e @ (OracleError::Budget(_) | OracleError::Symbolic(_))) => {
            emit(out, &format!("inconclusive: {e}\n"))?;
            return Ok(EXIT_INCONCLUSIVE);
        }
        Err(e) => return Err(e.to_string()),
    };
    let mut text = format!(
        "model {}\ngrid points: {} private, {} public, {} states\n",
        ta.name,
        check.grid.dpriv.len(),
        check.grid.dpub.len(),
        check.grid.states
    );
    if check.agrees {
        text.push_str("agreement\n");
    } else {
        text.push_str("mismatch\n");
        for m in &check.mismatches {
            let side = match m.side {
                Side::Private => "dpriv",
                Side::Public => "dpub",
            };
            let found = if m.in_symbolic { "symbolic only" } else { "grid only" };
            text.push_str(&format!("  {side} {}: {found}\n", m.time));
        }
    }
    emit(out, &text)?;
    Ok(if check.agrees { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, String> {
    if a.family != "atm" {
        return Err(format!("unknown benchmark {} (expected atm)", a.family));
    }
    let range = parse_range(&a.added_actions)?;
    if a.jobs == 0 {
        return Err("jobs must be positive".into());
    }
    let mut file = std::fs::File::create(&a.out).map_err(|e| format!("cannot write {}: {e}", a.out.display()))?;
    let options = SynthOptions {
        effective_only: a.effective_only,
        jobs: a.jobs,
        timeout: timeout(a.timeout)?,
        ..Default::default()
    };
    emit(out, &format!("{CSV_HEADER}\n"))?;
    let rows = run_bench(range, &a.modes, &options, |row| {
        let _ = writeln!(out, "{}", row.csv());
    })
    .map_err(|e| e.to_string())?;
    let csv = std::iter::once(CSV_HEADER.to_string()).chain(rows.iter().map(|r| r.csv())).join("\n") + "\n";
    file.write_all(csv.as_bytes())
        .map_err(|e| format!("cannot write {}: {e}", a.out.display()))?;
    Ok(EXIT_OK)
}
