//! Command-line front end. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 bad input or usage.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::context::{finest_partitions, is_stable, Context};
use crate::ensemble::{assign_value, assign_value_pullback, expectation_exact, expectation_mc, EnsembleDump, LabeledEnsemble, ModelConfig};
use crate::error::{Error, Result};
use crate::io::{read_json, to_json_pretty, FrameDoc, HistoryDoc, ObservableDoc, StateDoc};

use super::checks::{run_suite, Suite};
use super::peres::run_peres;
use super::remark::run_remark;
use super::ScenarioConfig;

/// Tolerance between the exact ensemble expectation and `<φ|O|φ>`.
pub const BORN_TOL: f64 = 1e-9;
/// Monte Carlo estimates must fall within this many standard errors.
pub const MC_SIGMAS: f64 = 5.0;

#[derive(Parser, Debug)]
#[command(name = "ctxhist", version, about = "History-dependent contextual value assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Gfunc,
    Ntrns,
    Symplectic,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include per-sample values in the report.
    #[arg(long)]
    per_sample: bool,
}

impl RunArgs {
    fn scenario(&self) -> Result<ScenarioConfig> {
        let cfg = ScenarioConfig {
            epsilon: self.epsilon,
            seed: self.seed,
            n_samples: self.samples,
            per_sample: self.per_sample,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Singlet state over the six Peres contexts.
    Peres(RunArgs),
    /// The degenerate observable reachable from two non-commuting ones.
    Remark(RunArgs),
    /// Exact and sampled expectation of an observable after a history.
    Born {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        history: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the labeled ensemble to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finest partitions of two frames (1-based indices).
    Partitions {
        #[arg(long)]
        frame_a: PathBuf,
        #[arg(long)]
        frame_b: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Randomized property suites.
    Check {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct BornReport {
    history: Vec<String>,
    exact: f64,
    quantum: f64,
    deviation: f64,
    mc_estimate: f64,
    mc_stderr: f64,
    mc_within_bound: bool,
    dual_path_agree: bool,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct PartitionsReport {
    i_blocks: Vec<Vec<usize>>,
    j_blocks: Vec<Vec<usize>>,
}

fn emit(text: &str, out_path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match out_path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = to_json_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn one_based(blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
}

fn fmt_blocks(blocks: &[Vec<usize>]) -> String {
    blocks
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_born(
    state: &Path,
    history: &Path,
    observable: &Path,
    cfg: &ScenarioConfig,
    dump: Option<&Path>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<bool> {
    let phi = read_json::<StateDoc>(state)?.to_state()?;
    let history = read_json::<HistoryDoc>(history)?.to_history()?;
    let o = read_json::<ObservableDoc>(observable)?.to_observable()?;
    let config = ModelConfig::new(phi.clone(), cfg.epsilon, history.first().clone(), cfg.seed, cfg.n_samples)?;
    let le = LabeledEnsemble::along(&config, history.contexts())?;
    if !is_stable(o.matrix(), le.current())? {
        return Err(Error::NotStable);
    }
    let exact = expectation_exact(&le, &o)?;
    let quantum = o.matrix().sandwich(config.state(), config.state()).re;
    let (mc_estimate, mc_stderr) = expectation_mc(&le, &o)?;
    let mc_within_bound = (mc_estimate - exact).abs() <= MC_SIGMAS * mc_stderr || mc_estimate == exact;
    let dual_path_agree = assign_value(&le, &o)? == assign_value_pullback(&le, &o)?;
    let deviation = (exact - quantum).abs();
    let report = BornReport {
        history: history.contexts().iter().map(Context::label).collect(),
        exact,
        quantum,
        deviation,
        mc_estimate,
        mc_stderr,
        mc_within_bound,
        dual_path_agree,
        passed: deviation <= BORN_TOL && mc_within_bound && dual_path_agree,
    };
    if let Some(p) = dump {
        fs::write(p, json_line(&EnsembleDump::of(&le))?)?;
    }
    emit(&json_line(&report)?, out_path, out)?;
    Ok(report.passed)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    match cli.command {
        Command::Peres(args) => {
            let report = run_peres(&args.scenario()?)?;
            let text = match args.format {
                Format::Json => json_line(&report)?,
                Format::Table => report.to_table(),
            };
            emit(&text, args.out.as_deref(), out)?;
            Ok(report.passed)
        }
        Command::Remark(args) => {
            let report = run_remark(&args.scenario()?)?;
            let text = match args.format {
                Format::Json => json_line(&report)?,
                Format::Table => report.to_table(),
            };
            emit(&text, args.out.as_deref(), out)?;
            Ok(report.passed)
        }
        Command::Born {
            state,
            history,
            observable,
            epsilon,
            samples,
            seed,
            dump,
            out: out_path,
        } => {
            let cfg = ScenarioConfig {
                epsilon,
                seed,
                n_samples: samples,
                per_sample: false,
            };
            cfg.validate()?;
            run_born(&state, &history, &observable, &cfg, dump.as_deref(), out_path.as_deref(), out)
        }
        Command::Partitions { frame_a, frame_b, format } => {
            let a = read_json::<FrameDoc>(&frame_a)?.to_context()?;
            let b = read_json::<FrameDoc>(&frame_b)?.to_context()?;
            let p = finest_partitions(&a, &b)?;
            let report = PartitionsReport {
                i_blocks: one_based(&p.i_blocks),
                j_blocks: one_based(&p.j_blocks),
            };
            let text = match format {
                Format::Json => json_line(&report)?,
                Format::Table => format!("I: {}\nJ: {}\n", fmt_blocks(&report.i_blocks), fmt_blocks(&report.j_blocks)),
            };
            emit(&text, None, out)?;
            Ok(true)
        }
        Command::Check { suite, trials, seed, out: out_path } => {
            let suite = match suite {
                SuiteArg::Gfunc => Suite::GFunc,
                SuiteArg::Ntrns => Suite::NTrns,
                SuiteArg::Symplectic => Suite::Symplectic,
            };
            let report = run_suite(suite, trials, seed)?;
            emit(&json_line(&report)?, out_path.as_deref(), out)?;
            Ok(report.passed)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_violation() {
                1
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(std::iter::once("ctxhist").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_error_exits_two() {
        let (code, _, err) = run(&["peres", "--bogus"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn bad_epsilon_exits_two() {
        let (code, _, err) = run(&["peres", "--epsilon", "0.9", "--samples", "10"]);
        assert_eq!(code, 2);
        assert!(err.contains("epsilon"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("peres"));
    }

    #[test]
    fn small_peres_table() {
        let (code, out, _) = run(&["peres", "--samples", "200", "--format", "table"]);
        assert_eq!(code, 0);
        assert!(out.contains("PASS"));
    }
}
