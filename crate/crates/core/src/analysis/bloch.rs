use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::protocol::{prepare_omega, teleport_unnormalized, BranchAmplitudes, HybridState, ProtocolParams};

/// Fidelity at one Bloch-sphere point of the input qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct BlochSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub map: Vec<BlochPoint>,
}

impl BlochSummary {
    /// Mean exceeds the 2/3 achievable by measure-and-prepare strategies.
    pub fn beats_classical(&self) -> bool {
        self.mean > 2.0 / 3.0
    }
}

/// Area-uniform grid of about `n` points: midpoints in cos θ and in φ,
/// with φ offset by `phi_origin`.
pub fn bloch_grid(n: usize, phi_origin: f64) -> Vec<(f64, f64)> {
    let n_theta = ((n as f64).sqrt().round() as usize).max(1);
    let n_phi = n.div_ceil(n_theta);
    let mut pts = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = (1.0 - (2 * i + 1) as f64 / n_theta as f64).acos();
        for j in 0..n_phi {
            pts.push((theta, phi_origin + 2.0 * PI * (j as f64 + 0.5) / n_phi as f64));
        }
    }
    pts
}

/// Teleportation outputs for |H⟩ and |V⟩ inputs; by linearity they give the
/// good-event output for any input.
struct Teleporter {
    out_h: FockVector,
    out_v: FockVector,
    double_b: FockVector,
    p_double_b: f64,
    amps: BranchAmplitudes,
}

impl Teleporter {
    fn new(omega: &HybridState, params: &ProtocolParams) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let out_h = teleport_unnormalized(omega, one, zero)?;
        let out_v = teleport_unnormalized(omega, zero, one)?;
        Ok(Self {
            p_double_b: params.ratio_pdb_pgood_at_h * out_h.norm_sqr(),
            out_h,
            out_v,
            double_b: omega.vacuum_branch.clone(),
            amps: BranchAmplitudes {
                basis: params.target_basis(),
                ..omega.amplitudes
            },
        })
    }

    fn fidelity(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let good = self.out_h.scaled(a).add(&self.out_v.scaled(b))?;
        let target = self.amps.teleport_target(a, b)?.normalized()?;
        let p_good = good.norm_sqr();
        let total = p_good + self.p_double_b;
        if total <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        let f_good = target.overlap(&good)?.norm_sqr();
        let f_dbl = target.overlap(&self.double_b)?.norm_sqr();
        Ok((f_good + self.p_double_b * f_dbl) / total)
    }
}

/// (cos θ/2, e^{iφ} sin θ/2).
pub fn bloch_input(theta: f64, phi: f64) -> (Complex64, Complex64) {
    (
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    )
}

/// Teleportation fidelity averaged over the Bloch sphere of input states,
/// against the first-order target built from the configured cat amplitudes.
pub fn mean_bloch_fidelity(params: &ProtocolParams, n_grid: usize) -> Result<BlochSummary> {
    mean_bloch_fidelity_with_origin(params, n_grid, 0.0)
}

pub fn mean_bloch_fidelity_with_origin(params: &ProtocolParams, n_grid: usize, phi_origin: f64) -> Result<BlochSummary> {
    if n_grid < 100 {
        return Err(Error::InvalidParameter(format!("n_grid = {n_grid} below 100")));
    }
    let omega = prepare_omega(params)?;
    bloch_average(&omega, params, n_grid, phi_origin)
}

pub fn bloch_average(omega: &HybridState, params: &ProtocolParams, n_grid: usize, phi_origin: f64) -> Result<BlochSummary> {
    let tele = Teleporter::new(omega, params)?;
    let map: Vec<BlochPoint> = bloch_grid(n_grid, phi_origin)
        .into_par_iter()
        .map(|(theta, phi)| {
            let (a, b) = bloch_input(theta, phi);
            tele.fidelity(a, b).map(|fidelity| BlochPoint { theta, phi, fidelity })
        })
        .collect::<Result<_>>()?;
    let n = map.len() as f64;
    Ok(BlochSummary {
        mean: map.iter().map(|p| p.fidelity).sum::<f64>() / n,
        min: map.iter().map(|p| p.fidelity).fold(f64::INFINITY, f64::min),
        max: map.iter().map(|p| p.fidelity).fold(f64::NEG_INFINITY, f64::max),
        map,
    })
}
