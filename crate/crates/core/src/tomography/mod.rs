//! Homodyne tomography: quadrature marginals, seeded sampling through a lossy
//! detector, maximum-likelihood reconstruction and Wigner functions.

mod maxlik;
mod quadrature;
mod wigner;

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use maxlik::maxlik_reconstruct;
pub use quadrature::{hermite_functions, quadrature_pdf, sample_quadratures, CDF_POINTS, X_RANGE};
pub use wigner::{wigner, wigner_point, WignerGrid};

use crate::error::{Error, Result};
use crate::fock::DensityOperator;

/// One homodyne outcome at local-oscillator phase `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSample {
    pub theta: f64,
    pub x: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomographySettings {
    pub n_samples: usize,
    pub phase_grid: Vec<f64>,
    /// Detection efficiency, used both for simulated loss and in the POVM.
    pub eta: f64,
    pub cutoff: usize,
    pub max_iters: usize,
    pub log_likelihood_tol: f64,
    pub seed: u64,
}

/// `n` phases spaced evenly over [0, π).
pub fn uniform_phases(n: usize) -> Vec<f64> {
    (0..n).map(|k| std::f64::consts::PI * k as f64 / n as f64).collect()
}

impl Default for TomographySettings {
    fn default() -> Self {
        Self {
            n_samples: 50_000,
            phase_grid: uniform_phases(12),
            eta: 0.55,
            cutoff: 14,
            max_iters: 2000,
            log_likelihood_tol: 1e-9,
            seed: 7,
        }
    }
}

impl TomographySettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta = {} outside (0, 1]", self.eta)));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be positive".into()));
        }
        if self.phase_grid.is_empty() {
            return Err(Error::InvalidParameter("empty phase grid".into()));
        }
        if let Some(t) = self.phase_grid.iter().find(|t| !(0.0..std::f64::consts::PI).contains(*t)) {
            return Err(Error::InvalidParameter(format!("phase {t} outside [0, π)")));
        }
        if self.cutoff < 1 {
            return Err(Error::InvalidParameter("reconstruction cutoff must be ≥ 1".into()));
        }
        if !(self.log_likelihood_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("log_likelihood_tol = {}", self.log_likelihood_tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub rho: DensityOperator,
    pub iterations: usize,
    pub final_log_likelihood: f64,
    /// Stopped on the tolerance rather than on `max_iters`.
    pub converged: bool,
    /// Log-likelihood before the first iteration and after each accepted one.
    pub log_likelihood_trace: Vec<f64>,
}

/// Writes samples as CSV `theta,x` with 17 significant digits.
pub fn write_samples_csv<W: Write>(out: W, samples: &[QuadratureSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "x"]).map_err(csv_err)?;
    for s in samples {
        w.write_record([format!("{:.16e}", s.theta), format!("{:.16e}", s.x)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(input: R) -> Result<Vec<QuadratureSample>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.iter().ne(["theta", "x"]) {
        return Err(Error::Config {
            line: 1,
            msg: format!("expected header theta,x, found {}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    r.deserialize().map(|rec| rec.map_err(csv_err)).collect()
}

pub fn save_samples(path: &Path, samples: &[QuadratureSample]) -> Result<()> {
    write_samples_csv(std::fs::File::create(path)?, samples)
}

/// Writes a Wigner grid as CSV `x,p,w`, x slowest.
pub fn write_wigner_csv<W: Write>(out: W, grid: &WignerGrid, w: &nalgebra::DMatrix<f64>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["x", "p", "w"]).map_err(csv_err)?;
    for (i, x) in grid.xs().iter().enumerate() {
        for (j, p) in grid.ps().iter().enumerate() {
            wr.write_record([format!("{x:.16e}"), format!("{p:.16e}"), format!("{:.16e}", w[(i, j)])])
                .map_err(csv_err)?;
        }
    }
    wr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config {
            line,
            msg: format!("{other:?}"),
        },
    }
}
