use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Count-rate model inputs: rates in Hz, detector efficiency, and the
/// teleported qubit a|H⟩ + b|V⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateParams {
    pub r_rep: f64,
    pub r_b: f64,
    pub r_alpha: f64,
    pub r_beta: f64,
    pub eta_spcm: f64,
    pub a: Complex64,
    pub b: Complex64,
}

impl Default for RateParams {
    fn default() -> Self {
        Self {
            r_rep: 76e6,
            r_b: 4e3,
            r_alpha: 18e3,
            r_beta: 6e3,
            eta_spcm: 0.01,
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }
}

impl RateParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("R_rep", self.r_rep), ("R_B", self.r_b), ("R_alpha", self.r_alpha), ("R_beta", self.r_beta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v}")));
            }
        }
        if self.r_rep == 0.0 {
            return Err(Error::InvalidParameter("R_rep must be positive".into()));
        }
        if !(self.eta_spcm > 0.0 && self.eta_spcm <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta_spcm = {} outside (0, 1]", self.eta_spcm)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub p_db: f64,
    pub p_good: f64,
    pub triple_rate_hz: f64,
}

/// p_dB = (3/2) η R_B²/R², p_good = η R_B (|b|² R_α + |a|² R_β)/R², triple rate R (p_good + p_dB).
pub fn rates(params: &RateParams) -> Result<Rates> {
    params.validate()?;
    let r2 = params.r_rep * params.r_rep;
    let p_db = 1.5 * params.eta_spcm * params.r_b * params.r_b / r2;
    let p_good = params.eta_spcm * params.r_b * (params.b.norm_sqr() * params.r_alpha + params.a.norm_sqr() * params.r_beta) / r2;
    Ok(Rates {
        p_db,
        p_good,
        triple_rate_hz: params.r_rep * (p_good + p_db),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_b_probability() {
        let r = rates(&RateParams::default()).unwrap();
        assert!((r.p_db - 4.155e-11).abs() < 1e-14);
        // |H⟩ input: p_good = p_dB exactly at these singles rates
        assert!((r.p_good - r.p_db).abs() < 1e-24);
    }

    #[test]
    fn scaling_in_heralding_rate() {
        let base = RateParams::default();
        let doubled = RateParams { r_b: 2.0 * base.r_b, ..base };
        let (r1, r2) = (rates(&base).unwrap(), rates(&doubled).unwrap());
        assert!((r2.p_db / r1.p_db - 4.0).abs() < 1e-12);
        assert!((r2.p_good / r1.p_good - 2.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(rates(&RateParams { eta_spcm: 0.0, ..Default::default() }).is_err());
        assert!(rates(&RateParams { r_b: -1.0, ..Default::default() }).is_err());
    }
}
