use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use active_walk::config::{parse_override, resolve, ExperimentKind};
use active_walk::experiment::{run_experiment, run_pump};
use active_walk::verify::{verify_suite, Level};
use active_walk::Error;

#[derive(Parser)]
#[command(name = "active-walk", version, about = "Non-Hermitian quantum walk simulator for a quantum active particle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reproduction preset (fig3, fig4, fig5, fig6, fig7, fig9, fig10, fig11, fig12).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; same as `--set output.dir=DIR`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set params.g=1` or `--set run.g_values=[0,1]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment.
    Run(RunArgs),
    /// Dense spectra of the one-step operator (defaults to the fig3 preset).
    Spectrum(RunArgs),
    /// Integrate the two-level rate equations.
    Pump {
        #[arg(long, default_value_t = 0.25)]
        w: f64,
        /// Comma-separated g values.
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
        g: Vec<f64>,
        #[arg(long, default_value_t = 200.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the built-in acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
    },
}

fn resolve_args(args: &RunArgs, spectrum: bool) -> Result<active_walk::config::ExperimentConfig, Error> {
    let text = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| Error::Config {
                    path: String::new(),
                    message: format!("cannot read {}: {e}", path.display()),
                })?,
        ),
        None => None,
    };
    let mut overrides = args.overrides.iter().map(|o| parse_override(o)).collect::<Result<Vec<_>, _>>()?;
    if let Some(out) = &args.out {
        overrides.push(("output.dir".into(), Value::String(out.to_string_lossy().into_owned())));
    }
    let preset = match (&args.preset, &text, spectrum) {
        (None, None, true) => Some("fig3"),
        (p, _, _) => p.as_deref(),
    };
    let mut cfg = resolve(text.as_deref(), preset, &overrides)?;
    if spectrum {
        cfg.kind = ExperimentKind::Spectrum;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run(args) => execute(&args, false),
        Command::Spectrum(args) => execute(&args, true),
        Command::Pump { w, g, t_max, dt, out } => {
            let path = run_pump(w, &g, t_max, dt, &out)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let checks = verify_suite(level, |c| println!("{c}"));
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!("{} checks, {} failed", checks.len(), failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn execute(args: &RunArgs, spectrum: bool) -> Result<ExitCode, Error> {
    let cfg = resolve_args(args, spectrum)?;
    let summary = run_experiment(&cfg)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(z) = summary.eigenvalue {
        println!("eigenvalue {:.16e} {:+.16e}i", z.re, z.im);
    }
    for p in &summary.outputs {
        println!("wrote {}", cfg.output_dir.join(p).display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
