//! Run configuration: a JSON file, optionally overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use adiashort::{make_ising_spectrum, IsingChainParams, Method, Protocol, RelaxationSpectrum};
use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    Ising(IsingChainParams),
    Inline(RelaxationSpectrum),
    File(PathBuf),
}

impl SpectrumSource {
    pub fn load(&self) -> Result<RelaxationSpectrum> {
        match self {
            SpectrumSource::Ising(params) => Ok(make_ising_spectrum(params)?),
            SpectrumSource::Inline(spec) => Ok(spec.clone()),
            SpectrumSource::File(path) => read_json(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolChoice {
    Shortcut,
    Ramp,
    Quench,
    CustomFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Spectral,
    Quadrature,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Spectral => Method::Spectral,
            MethodArg::Quadrature => Method::Quadrature,
        }
    }
}

/// Config file contents. Every field may be missing so flags can fill gaps.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub spectrum: Option<SpectrumSource>,
    #[serde(default)]
    pub tau_grid: PartialGrid,
    #[serde(default)]
    pub drive: PartialDrive,
    pub protocol: Option<ProtocolChoice>,
    pub protocol_file: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub method: Option<Method>,
    #[serde(default)]
    pub output: PartialOutput,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialGrid {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialDrive {
    pub delta_lambda: Option<f64>,
    pub lambda0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialOutput {
    pub path: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub format: Option<Format>,
}

impl PartialConfig {
    /// Reads a config file; relative input paths inside it are taken
    /// relative to the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg: PartialConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(SpectrumSource::File(p)) = &mut cfg.spectrum {
            *p = base.join(&*p);
        }
        if let Some(p) = &mut cfg.protocol_file {
            *p = base.join(&*p);
        }
        Ok(cfg)
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let spectrum = self.spectrum.context("no spectrum given (config `spectrum` or --spectrum)")?;
        let min = self.tau_grid.min.context("tau_grid.min is required")?;
        let count = self.tau_grid.count.unwrap_or(1);
        let max = match (self.tau_grid.max, count) {
            (Some(max), _) => max,
            (None, 1) => min,
            (None, _) => bail!("tau_grid.max is required when count > 1"),
        };
        let tau_grid = TauGrid {
            min,
            max,
            count,
            spacing: self.tau_grid.spacing.unwrap_or(Spacing::Log),
        };
        tau_grid.validate()?;

        let delta_lambda = self.drive.delta_lambda.context("drive.delta_lambda is required")?;
        let lambda0 = match (&spectrum, self.drive.lambda0) {
            (_, Some(l)) => l,
            (SpectrumSource::Ising(p), None) => p.field,
            (_, None) => bail!("drive.lambda0 is required unless the spectrum is an Ising block"),
        };
        ensure!(delta_lambda.is_finite() && delta_lambda != 0.0, "delta_lambda must be finite and nonzero");
        ensure!(lambda0.is_finite() && lambda0 != 0.0, "lambda0 must be finite and nonzero");

        let protocol = self.protocol.unwrap_or(ProtocolChoice::Shortcut);
        let protocol_file = match protocol {
            ProtocolChoice::CustomFile => Some(
                self.protocol_file
                    .context("protocol custom-file needs protocol_file (--protocol-file)")?,
            ),
            _ => None,
        };
        let tolerance = self.tolerance.unwrap_or(1e-10);
        ensure!(tolerance.is_finite() && tolerance > 0.0, "tolerance must be positive, got {tolerance}");

        Ok(RunConfig {
            spectrum,
            tau_grid,
            delta_lambda,
            lambda0,
            protocol,
            protocol_file,
            tolerance,
            method: self.method.unwrap_or(Method::Spectral),
            output: self.output.path,
            sidecar: self.output.sidecar,
            format: self.output.format.unwrap_or(Format::Csv),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl TauGrid {
    fn validate(&self) -> Result<()> {
        ensure!(self.min.is_finite() && self.min > 0.0, "tau_grid.min must be positive, got {}", self.min);
        ensure!(self.max.is_finite() && self.max >= self.min, "tau_grid.max must be >= min, got {}", self.max);
        ensure!(self.count >= 1, "tau_grid.count must be at least 1");
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let x = i as f64 / last;
                match (i, self.spacing) {
                    (0, _) => self.min,
                    (i, _) if i + 1 == self.count => self.max,
                    (_, Spacing::Linear) => self.min + (self.max - self.min) * x,
                    (_, Spacing::Log) => (self.min.ln() + (self.max / self.min).ln() * x).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spectrum: SpectrumSource,
    pub tau_grid: TauGrid,
    pub delta_lambda: f64,
    pub lambda0: f64,
    pub protocol: ProtocolChoice,
    pub protocol_file: Option<PathBuf>,
    pub tolerance: f64,
    pub method: Method,
    pub output: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn custom_protocol(&self) -> Result<Option<Protocol>> {
        self.protocol_file.as_deref().map(read_json).transpose()
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
