//! Command-line driver.
//!
//! Exit codes: 0 success, 1 usage/config/input error, 2 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{run_diagnostics, DiagnosticPlan, MMS_SIZES};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{make_grid, ComplexField};
use crate::internal_data::{ForwardModel, InternalData, Permittivity};
use crate::inversion::{landweber_run, StopReason};
use crate::io::field::FIELD_MAGIC;
use crate::io::{make_phantom, read_scalar_field, render_pgm, write_field, write_trace_csv, RunConfig, TRACE_HEADER};

#[derive(Debug, Parser)]
#[command(name = "aetomo", version, about = "Multi-frequency acousto-electromagnetic tomography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file (`key = value` lines).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Run per-frequency work on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the true permittivity as a field and an image.
    Phantom(Common),
    /// Synthesize the internal data for every configured frequency.
    Forward(Common),
    /// Run the projected Landweber reconstruction.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Directory written by `forward`; synthesized in memory when absent.
        #[arg(long, value_name = "DIR")]
        data: Option<PathBuf>,
    },
    /// Run the numerical self-checks and write report.txt.
    Diagnose(Common),
    /// Render a real field file as a PGM image.
    Render {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        range: Option<Vec<f64>>,
    },
}

/// Runs the CLI and returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for kv in &common.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k, v).map_err(|m| Error::Config(format!("--set {kv}: {m}")))?;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn model(cfg: &RunConfig, sequential: bool) -> Result<ForwardModel> {
    let grid = make_grid(cfg.n)?;
    let execution = if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    Ok(ForwardModel::new(grid, ComplexField::constant(grid, cfg.phi), cfg.solver_options())?.with_execution(execution))
}

fn truth(cfg: &RunConfig) -> Result<Permittivity> {
    make_phantom(&cfg.phantom_spec(), make_grid(cfg.n)?)
}

fn psi_name(i: usize) -> String {
    format!("psi_{i:02}.aetf")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_manifest(dir: &Path, command: &str, cfg: &RunConfig, extra: &[(String, String)], outputs: &[String]) -> Result<()> {
    let mut text = format!(
        "aetomo manifest\ncommand = {command}\npackage_version = {}\nfield_format = {FIELD_MAGIC}\ntrace_header = {TRACE_HEADER}\n",
        env!("CARGO_PKG_VERSION")
    );
    for (k, v) in extra {
        text.push_str(&format!("{k} = {v}\n"));
    }
    text.push_str("[config]\n");
    text.push_str(&cfg.to_text());
    text.push_str("[outputs]\n");
    for o in outputs {
        text.push_str(o);
        text.push('\n');
    }
    write_text(&dir.join("manifest.txt"), &text)
}

fn stop_name(r: StopReason) -> &'static str {
    match r {
        StopReason::Converged => "converged",
        StopReason::Stagnated => "stagnated",
        StopReason::MaxIterations => "max_iterations",
        StopReason::StepRejected => "step_rejected",
    }
}

fn read_data(dir: &Path, cfg: &RunConfig) -> Result<InternalData> {
    let path = dir.join("frequencies.txt");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.clone(),
            line: idx + 1,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let (i, omega): (usize, f64) = match toks.as_slice() {
            [i, w] => (
                i.parse().map_err(|_| err(format!("invalid index `{i}`")))?,
                w.parse().map_err(|_| err(format!("invalid frequency `{w}`")))?,
            ),
            _ => return Err(err("expected `<index> <omega>`".into())),
        };
        let psi = read_scalar_field(&dir.join(psi_name(i)))?;
        if psi.grid().n() != cfg.n {
            return Err(Error::Config(format!(
                "data grid has n = {}, configuration has n = {}",
                psi.grid().n(),
                cfg.n
            )));
        }
        entries.push((omega, psi));
    }
    InternalData::new(entries, cfg.noise_level, cfg.noise_seed)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Phantom(common) => {
            let cfg = load_config(&common)?;
            let dir = output_dir(&cfg)?;
            let q = truth(&cfg)?;
            write_field(q.field().clone(), &dir.join("q_true.aetf"))?;
            render_pgm(q.field(), &dir.join("q_true.pgm"), None)?;
            write_manifest(&dir, "phantom", &cfg, &[], &["q_true.aetf".into(), "q_true.pgm".into()])
        }
        Command::Forward(common) => {
            let cfg = load_config(&common)?;
            let dir = output_dir(&cfg)?;
            let m = model(&cfg, common.sequential)?;
            let q = truth(&cfg)?;
            let freqs = cfg.frequency_set()?;
            let data = InternalData::synthesize(&m, &q, freqs.omegas(), cfg.noise_level, cfg.noise_seed)?;
            let mut outputs = vec!["q_true.aetf".to_string(), "frequencies.txt".into()];
            write_field(q.field().clone(), &dir.join("q_true.aetf"))?;
            let mut listing = String::new();
            for (i, (omega, psi)) in data.entries().iter().enumerate() {
                write_field(psi.clone(), &dir.join(psi_name(i)))?;
                listing.push_str(&format!("{i} {omega}\n"));
                outputs.push(psi_name(i));
            }
            write_text(&dir.join("frequencies.txt"), &listing)?;
            write_manifest(&dir, "forward", &cfg, &[], &outputs)
        }
        Command::Reconstruct { common, data } => {
            let cfg = load_config(&common)?;
            let dir = output_dir(&cfg)?;
            let m = model(&cfg, common.sequential)?;
            let (data, q_true) = match data {
                Some(d) => {
                    let truth_path = d.join("q_true.aetf");
                    let q_true = if truth_path.exists() {
                        Some(Permittivity::new(read_scalar_field(&truth_path)?, cfg.lambda_bound, cfg.margin)?)
                    } else {
                        None
                    };
                    (read_data(&d, &cfg)?, q_true)
                }
                None => {
                    let q = truth(&cfg)?;
                    let freqs = cfg.frequency_set()?;
                    (
                        InternalData::synthesize(&m, &q, freqs.omegas(), cfg.noise_level, cfg.noise_seed)?,
                        Some(q),
                    )
                }
            };
            let trace = match landweber_run(&m, &data, &cfg.landweber(), q_true.as_ref()) {
                Ok(t) => t,
                Err(Error::NonFinite { iteration, trace }) => {
                    write_trace_csv(&trace, &dir.join("trace.csv"))?;
                    return Err(Error::NonFinite { iteration, trace });
                }
                Err(e) => return Err(e),
            };
            write_trace_csv(&trace, &dir.join("trace.csv"))?;
            write_field(trace.final_q.field().clone(), &dir.join("q_final.aetf"))?;
            render_pgm(trace.final_q.field(), &dir.join("q_final.pgm"), None)?;
            let last = trace.records.last().map(|r| r.iteration).unwrap_or(0);
            let extra = vec![
                ("step".to_string(), format!("{:.16e}", trace.step)),
                ("iterations".to_string(), last.to_string()),
                ("stop_reason".to_string(), stop_name(trace.stop_reason).to_string()),
                ("final_h1_norm".to_string(), format!("{:.16e}", trace.final_h1_norm)),
                ("h1_within_bound".to_string(), trace.h1_within_bound().to_string()),
            ];
            write_manifest(
                &dir,
                "reconstruct",
                &cfg,
                &extra,
                &["trace.csv".into(), "q_final.aetf".into(), "q_final.pgm".into()],
            )
        }
        Command::Diagnose(common) => {
            let cfg = load_config(&common)?;
            let dir = output_dir(&cfg)?;
            let m = model(&cfg, common.sequential)?;
            let q = truth(&cfg)?;
            let plan = DiagnosticPlan {
                mms_sizes: MMS_SIZES.to_vec(),
                mms_omegas: cfg.mms_omegas.clone(),
                dot_omegas: cfg.dot_omegas.clone(),
                dot_trials: cfg.dot_trials,
                sobolev_alpha: cfg.sobolev_alpha,
                taylor_omega: cfg.taylor_omega,
                cross_omega: cfg.cross_omega,
                cross_amplitude: cfg.cross_amplitude,
                frequencies: cfg.frequency_set()?,
                probe_iterations: cfg.probe_iterations,
                seed: cfg.seed,
            };
            let report = run_diagnostics(&m, &q, &plan)?;
            write_text(&dir.join("report.txt"), &report.to_text())?;
            write_manifest(&dir, "diagnose", &cfg, &[], &["report.txt".into()])
        }
        Command::Render { input, output, range } => {
            let f = read_scalar_field(&input)?;
            let range = range.map(|r| (r[0], r[1]));
            render_pgm(&f, &output, range)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_usage_codes() {
        assert_eq!(cli_main(["aetomo", "--help"]), 0);
        assert_eq!(cli_main(["aetomo"]), 1);
        assert_eq!(cli_main(["aetomo", "bogus"]), 1);
        assert_eq!(cli_main(["aetomo", "phantom", "--nope"]), 1);
        assert_eq!(cli_main(["aetomo", "phantom", "--set", "wrong=1"]), 1);
        assert_eq!(cli_main(["aetomo", "phantom", "--set", "noequals"]), 1);
    }
}
