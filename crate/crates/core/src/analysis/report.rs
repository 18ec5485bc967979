use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{BlochSummary, Rates};
use crate::error::Result;

/// JSON analysis report. Absent quantities serialize as `null`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub fidelities: BTreeMap<String, f64>,
    pub entanglement_bound: Option<f64>,
    pub mean_bloch_fidelity: Option<f64>,
    pub rates: Option<Rates>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Writes the Bloch map as CSV `theta,phi,fidelity`.
pub fn write_bloch_csv<W: Write>(out: W, summary: &BlochSummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi", "fidelity"]).map_err(to_io)?;
    for p in &summary.map {
        w.write_record([format!("{:.16e}", p.theta), format!("{:.16e}", p.phi), format!("{:.16e}", p.fidelity)])
            .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

fn to_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}
