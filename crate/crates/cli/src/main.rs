use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adiashort::series::default_order;
use adiashort::{
    build_shortcut, is_shortcut_candidate, laurent_coefficients, make_ising_spectrum, DriveParams,
    IsingChainParams, RelaxationSpectrum, SeriesError, ShortcutError,
};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

mod config;
mod scan;

use config::{read_json, Format, MethodArg, PartialConfig, ProtocolChoice, Spacing, SpectrumSource};

/// Universal shortcuts to adiabaticity: spectra, comb synthesis and
/// excess-work scans.
#[derive(Parser)]
#[command(name = "adiashort", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relaxation spectrum of the transverse-field Ising chain.
    Ising {
        #[arg(long = "J", default_value_t = 1.0)]
        coupling: f64,
        #[arg(long = "gamma0", default_value_t = 0.95)]
        field: f64,
        #[arg(long = "N", default_value_t = 10)]
        spin_count: usize,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Excess work over a switching-time grid.
    Scan(ScanArgs),
    /// Laurent coefficients and waiting time of a spectrum.
    Series {
        #[arg(long)]
        spectrum: PathBuf,
        /// Highest regular order (default 2K - 2).
        #[arg(long)]
        order: Option<usize>,
        /// Threshold on |a_-1| for the shortcut verdict.
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Protocol JSON of the shortcut for a spectrum at one switching time.
    Shortcut {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags override the config file field by field.
#[derive(clap::Args)]
struct ScanArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spectrum JSON file (replaces the config's spectrum source).
    #[arg(long)]
    spectrum: Option<PathBuf>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_count: Option<usize>,
    #[arg(long, value_enum)]
    tau_spacing: Option<Spacing>,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolChoice>,
    #[arg(long)]
    protocol_file: Option<PathBuf>,
    #[arg(long)]
    delta_lambda: Option<f64>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comb diagnostics for shortcut scans (default: next to --out).
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl ScanArgs {
    fn into_config(self) -> Result<PartialConfig> {
        let mut cfg = match &self.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        if let Some(p) = self.spectrum {
            cfg.spectrum = Some(SpectrumSource::File(p));
        }
        let grid = &mut cfg.tau_grid;
        grid.min = self.tau_min.or(grid.min);
        grid.max = self.tau_max.or(grid.max);
        grid.count = self.tau_count.or(grid.count);
        grid.spacing = self.tau_spacing.or(grid.spacing);
        cfg.protocol = self.protocol.or(cfg.protocol);
        cfg.protocol_file = self.protocol_file.or(cfg.protocol_file);
        cfg.drive.delta_lambda = self.delta_lambda.or(cfg.drive.delta_lambda);
        cfg.drive.lambda0 = self.lambda0.or(cfg.drive.lambda0);
        cfg.tolerance = self.tolerance.or(cfg.tolerance);
        cfg.method = self.method.map(Into::into).or(cfg.method);
        cfg.output.path = self.out.or(cfg.output.path);
        cfg.output.sidecar = self.sidecar.or(cfg.output.sidecar);
        cfg.output.format = self.format.or(cfg.output.format);
        Ok(cfg)
    }
}

/// Exit code 2 for invalid input, 3 for numeric failure.
enum Failure {
    Invalid(anyhow::Error),
    Numeric(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Invalid(e.into())
    }
}

/// `None` or `-` writes to stdout.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path.filter(|p| *p != Path::new("-")) {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("ADIASHORT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .with_context(|| format!("ADIASHORT_THREADS must be a nonnegative integer, got {v:?}"))?,
        Err(_) => 0,
    };
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

fn cmd_scan(args: ScanArgs) -> Result<(), Failure> {
    let cfg = args.into_config()?.resolve()?;
    let spec = cfg.spectrum.load()?;
    let drive = DriveParams::new(cfg.delta_lambda, cfg.lambda0);
    if drive.weak_drive_warning() {
        eprintln!(
            "warning: |delta_lambda/lambda0| = {:.3} exceeds the weak-drive threshold",
            (cfg.delta_lambda / cfg.lambda0).abs()
        );
    }

    let outcome = thread_pool()?
        .install(|| scan::run(&cfg, &spec))
        .map_err(|e| Failure::Invalid(e.0))?;

    let mut out = output(cfg.output.as_deref())?;
    scan::write_rows(&mut out, &outcome.rows, cfg.format)?;
    out.flush()?;

    if let Some(sidecar) = &outcome.sidecar {
        let path = cfg
            .sidecar
            .clone()
            .or_else(|| {
                cfg.output
                    .as_ref()
                    .filter(|p| *p != Path::new("-"))
                    .map(|p| p.with_extension("comb.json"))
            });
        match path {
            Some(p) => write_json(Some(&p), sidecar)?,
            None => eprintln!("note: comb diagnostics need --out or --sidecar to be written"),
        }
    }

    match outcome.numeric_failure {
        Some(msg) => Err(Failure::Numeric(anyhow::anyhow!(msg))),
        None => Ok(()),
    }
}

fn cmd_series(spectrum: &Path, order: Option<usize>, tolerance: f64) -> Result<(), Failure> {
    let spec: RelaxationSpectrum = read_json(spectrum)?;
    let order = order.unwrap_or_else(|| default_order(&spec));
    let coeffs = laurent_coefficients(&spec, order).map_err(|e| match e {
        SeriesError::NonFinite { .. } => Failure::Numeric(e.into()),
        _ => Failure::Invalid(e.into()),
    })?;
    let mut out = io::stdout().lock();
    writeln!(out, "a_-2 {:.16e}", coeffs.a_minus2)?;
    writeln!(out, "a_-1 {:.16e}", coeffs.a_minus1)?;
    for (n, a) in coeffs.a_regular.iter().enumerate() {
        writeln!(out, "a_{n} {a:.16e}")?;
    }
    writeln!(out, "waiting_time {:.16e}", coeffs.waiting_time())?;
    let verdict = is_shortcut_candidate(&coeffs, tolerance);
    writeln!(out, "shortcut_candidate {verdict}")?;
    Ok(())
}

fn cmd_shortcut(spectrum: &Path, tau: f64, out: Option<&Path>) -> Result<(), Failure> {
    let spec: RelaxationSpectrum = read_json(spectrum)?;
    let protocol = build_shortcut(&spec, tau).map_err(|e| match e {
        ShortcutError::SingularSystem | ShortcutError::IllConditioned(_) => Failure::Numeric(e.into()),
        _ => Failure::Invalid(e.into()),
    })?;
    write_json(out, &protocol)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ising {
            coupling,
            field,
            spin_count,
            hbar,
            out,
        } => {
            let spec = make_ising_spectrum(&IsingChainParams::new(coupling, field, spin_count, hbar))?;
            write_json(out.as_deref(), &spec)?;
            Ok(())
        }
        Command::Scan(args) => cmd_scan(args),
        Command::Series {
            spectrum,
            order,
            tolerance,
        } => cmd_series(&spectrum, order, tolerance),
        Command::Shortcut { spectrum, tau, out } => cmd_shortcut(&spectrum, tau, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numeric failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
