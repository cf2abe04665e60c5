//! Excess-work scans over a switching-time grid.

use std::io::Write;

use adiashort::work::suggested_grid_points;
use adiashort::{
    excess_work_quadrature, excess_work_spectral, solve_comb, CombSolution, DriveParams, Method,
    Protocol, RelaxationSpectrum, ShortcutError, WorkError,
};
use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, ProtocolChoice, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub tau: f64,
    pub w_ex: f64,
    pub w_ex_norm: f64,
    pub pass: bool,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    fn failed(tau: f64, method: Method, error: String) -> Self {
        Self {
            tau,
            w_ex: f64::NAN,
            w_ex_norm: f64::NAN,
            pass: false,
            method: method.as_str(),
            error: Some(error),
        }
    }
}

/// Comb diagnostics written next to shortcut scans.
#[derive(Debug, Serialize)]
pub struct Sidecar {
    pub orders: Vec<u32>,
    /// Weights at τ = 1; the weights at τ are these divided by τ.
    pub unit_weights: Vec<f64>,
    pub omega_n: Vec<Option<f64>>,
    pub nonpositive_terms: Vec<usize>,
    pub condition_number: f64,
}

impl From<&CombSolution> for Sidecar {
    fn from(c: &CombSolution) -> Self {
        Self {
            orders: c.orders.clone(),
            unit_weights: c.weights.clone(),
            omega_n: c.omega_n.clone(),
            nonpositive_terms: c.nonpositive_terms(),
            condition_number: c.condition_number,
        }
    }
}

pub struct ScanOutcome {
    pub rows: Vec<Row>,
    pub sidecar: Option<Sidecar>,
    /// Set when any row failed numerically.
    pub numeric_failure: Option<String>,
}

/// How each τ gets its protocol.
enum Source {
    Unit(Vec<(u32, f64)>),
    Ramp,
    Quench,
    Custom(Protocol),
}

impl Source {
    fn at(&self, tau: f64) -> Result<Protocol, adiashort::ProtocolError> {
        match self {
            Source::Unit(w) => Protocol::universal(0.0, w, tau),
            Source::Ramp => Protocol::ramp(tau),
            Source::Quench => Protocol::quench(tau),
            Source::Custom(p) => p.rescaled(tau),
        }
    }
}

/// Errors that make the whole scan invalid rather than numerically failed.
#[derive(Debug)]
pub struct Invalid(pub anyhow::Error);

pub fn run(cfg: &RunConfig, spec: &RelaxationSpectrum) -> Result<ScanOutcome, Invalid> {
    let grid = cfg.tau_grid.points();
    let drive = DriveParams::new(cfg.delta_lambda, cfg.lambda0);
    if cfg.method == Method::Spectral && !spec.is_pure_cosine() {
        return Err(Invalid(anyhow::anyhow!(
            "spectral method needs a pure cosine spectrum; use method quadrature"
        )));
    }

    let (source, sidecar) = match cfg.protocol {
        ProtocolChoice::Shortcut => match solve_comb(spec, 1.0) {
            Ok(comb) => (Source::Unit(comb.unit_weights()), Some(Sidecar::from(&comb))),
            Err(ShortcutError::UnsupportedSpectrum) => {
                return Err(Invalid(ShortcutError::UnsupportedSpectrum.into()))
            }
            Err(e) => {
                let msg = format!("shortcut synthesis failed: {e}");
                let rows = grid
                    .iter()
                    .map(|&tau| Row::failed(tau, cfg.method, msg.clone()))
                    .collect();
                return Ok(ScanOutcome {
                    rows,
                    sidecar: None,
                    numeric_failure: Some(msg),
                });
            }
        },
        ProtocolChoice::Ramp => (Source::Ramp, None),
        ProtocolChoice::Quench => (Source::Quench, None),
        ProtocolChoice::CustomFile => {
            let p = cfg.custom_protocol().map_err(Invalid)?.expect("resolved config has a file");
            (Source::Custom(p), None)
        }
    };

    let scale = drive.work_scale(spec);
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&tau| {
            let work = source
                .at(tau)
                .map_err(|e| e.to_string())
                .and_then(|p| evaluate(spec, &p, &drive, cfg.method).map_err(|e| e.to_string()));
            match work {
                Ok(w) => Row {
                    tau,
                    w_ex: w,
                    w_ex_norm: w / scale,
                    pass: (w / scale).abs() <= cfg.tolerance,
                    method: cfg.method.as_str(),
                    error: None,
                },
                Err(e) => Row::failed(tau, cfg.method, e),
            }
        })
        .collect();
    let numeric_failure = rows
        .iter()
        .find_map(|r| r.error.as_ref().map(|e| format!("tau = {}: {e}", r.tau)));
    Ok(ScanOutcome {
        rows,
        sidecar,
        numeric_failure,
    })
}

fn evaluate(
    spec: &RelaxationSpectrum,
    p: &Protocol,
    drive: &DriveParams,
    method: Method,
) -> Result<f64, WorkError> {
    match method {
        Method::Spectral => Ok(excess_work_spectral(spec, p, drive)?.excess_work),
        Method::Quadrature => {
            let tau = p.tau();
            let width = spec
                .max_frequency()
                .map_or(tau / 50.0, |w| (tau / 50.0).min(0.3 / w));
            let n = suggested_grid_points(spec, p, width);
            Ok(excess_work_quadrature(spec, p, drive, width, n)?.excess_work)
        }
    }
}

/// 17 significant digits, so the text round-trips and is byte-stable.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_rows<W: Write>(out: W, rows: &[Row], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["tau", "w_ex", "w_ex_norm", "pass", "method"])?;
            for r in rows {
                w.write_record([
                    float(r.tau),
                    float(r.w_ex),
                    float(r.w_ex_norm),
                    r.pass.to_string(),
                    r.method.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn failed_rows_render_as_nan() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[Row::failed(2.0, Method::Spectral, "x".into())], Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "2.0000000000000000e0,NaN,NaN,false,spectral");
    }
}
