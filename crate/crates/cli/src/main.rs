//! `fiberloop`: run loss and mismatch sweeps, dump maps, and check the oracle suite.
//!
//! Data goes to `--out` (or stdout); progress goes to stderr. Failures print a single JSON
//! line `{"error":{"kind":...,"message":...}}` on stderr and exit nonzero.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fiberloop::sweep::{
    dump_map, run_sweep, Cell, Experiment, Grid, OutputFormat, SweepConfig, SweepTable,
};
use fiberloop::validate;

#[derive(Debug, Parser)]
#[command(
    name = "fiberloop",
    version,
    about = "Fiber-loop interferometer sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Similarity and post-selection probability versus loss (loss-similarity or loss-switch).
    LossSweep(SweepArgs),
    /// Fidelity versus loop-length error.
    MismatchSweep(SweepArgs),
    /// Fidelity versus source time-jitter.
    JitterSweep(SweepArgs),
    /// Write V, V', the loss matrix, U and U' for one switching program as JSON.
    DumpMap(SweepArgs),
    /// Run the cross-module oracle suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON sweep config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Random draws per grid point.
    #[arg(long)]
    iterations: Option<usize>,
    /// Experiment name, e.g. loss-switch.
    #[arg(long, value_parser = parse_experiment)]
    experiment: Option<Experiment>,
    /// Mode counts, `start:stop:step` or a comma list.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    m: Option<Grid>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    eta_f: Option<Grid>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    eta_s: Option<Grid>,
    /// Loop-length error in units of c.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    delta: Option<Grid>,
    /// Jitter standard deviation in units of c.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    sigma: Option<Grid>,
    /// Bin separation in units of c.
    #[arg(long)]
    tau: Option<f64>,
    /// Jitter draws averaged per sampled sequence.
    #[arg(long)]
    jitter_repeats: Option<usize>,
    /// Inner-loop passes for dump-map.
    #[arg(long)]
    loops: Option<usize>,
    /// Leave out the outer-loop attenuation.
    #[arg(long)]
    no_outer: bool,
    /// Suppress progress output.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format, default_value = "csv")]
    format: OutputFormat,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse().map_err(|e: fiberloop::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: fiberloop::Error| e.to_string())
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: fiberloop::Error| e.to_string())
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl From<fiberloop::Error> for Failure {
    fn from(e: fiberloop::Error) -> Self {
        let kind = e.kind();
        Failure {
            kind,
            message: e.to_string(),
            code: if kind == "config" { 2 } else { 1 },
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        fiberloop::Error::from(e).into()
    }
}

fn config_error(message: String) -> Failure {
    fiberloop::Error::Config(message).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Loss,
    Mismatch,
    Jitter,
    Dump,
}

impl Family {
    fn accepts(self, e: Experiment) -> bool {
        match self {
            Family::Loss => e.is_loss(),
            Family::Mismatch => e == Experiment::MismatchDelta,
            Family::Jitter => e == Experiment::JitterSigma,
            Family::Dump => e == Experiment::MapDump,
        }
    }

    fn default_experiment(self) -> Experiment {
        match self {
            Family::Loss => Experiment::LossSimilarity,
            Family::Mismatch => Experiment::MismatchDelta,
            Family::Jitter => Experiment::JitterSigma,
            Family::Dump => Experiment::MapDump,
        }
    }
}

/// Config file (if any), then the subcommand's experiment, then individual flags.
fn build_config(family: Family, args: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let mut cfg = SweepConfig::from_path(path)?;
            if !family.accepts(cfg.experiment) {
                cfg.experiment = family.default_experiment();
            }
            cfg
        }
        None => SweepConfig::for_experiment(family.default_experiment()),
    };
    if let Some(e) = args.experiment {
        if !family.accepts(e) {
            return Err(config_error(format!(
                "experiment '{e}' does not belong to this subcommand"
            )));
        }
        cfg.experiment = e;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = args.iterations {
        cfg.iterations = Some(n);
    }
    for (slot, flag) in [
        (&mut cfg.m, &args.m),
        (&mut cfg.eta_f, &args.eta_f),
        (&mut cfg.eta_s, &args.eta_s),
        (&mut cfg.delta, &args.delta),
        (&mut cfg.sigma, &args.sigma),
    ] {
        if let Some(grid) = flag {
            *slot = Some(grid.clone());
        }
    }
    if let Some(tau) = args.tau {
        cfg.tau = tau;
    }
    if let Some(r) = args.jitter_repeats {
        cfg.jitter_repeats = r;
    }
    if let Some(loops) = args.loops {
        cfg.loops = Some(loops);
    }
    if args.no_outer {
        cfg.include_outer = false;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }
    Ok(cfg.resolved())
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure {
            kind: "io",
            message: format!("cannot write {}: {e}", path.display()),
            code: 1,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run_sweep_command(family: Family, args: &SweepArgs) -> Result<(), Failure> {
    let cfg = build_config(family, args)?;
    let quiet = args.quiet;
    let name = cfg.experiment.name();
    let bytes = if family == Family::Dump {
        let dump = dump_map(&cfg)?;
        let mut bytes = serde_json::to_vec_pretty(&dump).map_err(fiberloop::Error::from)?;
        bytes.push(b'\n');
        bytes
    } else {
        let table = run_sweep(&cfg, &mut |done, total| {
            if !quiet {
                eprintln!("[{done}/{total}] {name}");
            }
        })?;
        table.to_bytes(&cfg, cfg.format)?
    };
    emit(&bytes, cfg.output.as_ref())?;
    if !quiet {
        if let Some(path) = &cfg.output {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let checks = validate::run_all(args.seed)?;
    let bytes = match args.format {
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(&checks).map_err(fiberloop::Error::from)?;
            bytes.push(b'\n');
            bytes
        }
        OutputFormat::Csv => {
            let mut table =
                SweepTable::new(vec!["check", "passed", "worst", "tolerance", "instances"]);
            for c in &checks {
                table.push(vec![
                    c.name.into(),
                    Cell::Text(c.passed.to_string()),
                    c.worst.into(),
                    c.tolerance.into(),
                    c.instances.into(),
                ]);
            }
            let mut bytes = Vec::new();
            table.write_csv(&mut bytes)?;
            bytes
        }
    };
    emit(&bytes, args.out.as_ref())?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            kind: "validation",
            message: format!("failed checks: {}", failed.join(", ")),
            code: 1,
        })
    }
}

fn report(failure: &Failure) {
    let line = serde_json::json!({
        "error": { "kind": failure.kind, "message": failure.message }
    });
    eprintln!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            let first = message
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            report(&Failure {
                kind: "usage",
                message: first.to_string(),
                code: 2,
            });
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::LossSweep(args) => run_sweep_command(Family::Loss, args),
        Command::MismatchSweep(args) => run_sweep_command(Family::Mismatch, args),
        Command::JitterSweep(args) => run_sweep_command(Family::Jitter, args),
        Command::DumpMap(args) => run_sweep_command(Family::Dump, args),
        Command::Validate(args) => run_validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            report(&failure);
            ExitCode::from(failure.code)
        }
    }
}
