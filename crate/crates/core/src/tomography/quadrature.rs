use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{QuadratureSample, TomographySettings};
use crate::channels::{apply_loss, LossChannel};
use crate::error::{Error, Result};
use crate::fock::DensityOperator;

/// Sampling range of the quadrature and number of CDF grid points.
pub const X_RANGE: (f64, f64) = (-6.0, 6.0);
pub const CDF_POINTS: usize = 4096;

/// Hermite functions ψ₀(x) … ψ_cutoff(x), normalized on the real line.
pub fn hermite_functions(x: f64, cutoff: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(cutoff + 1);
    psi.push(std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp());
    if cutoff >= 1 {
        psi.push(std::f64::consts::SQRT_2 * x * psi[0]);
    }
    for n in 1..cutoff {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
        psi.push(next);
    }
    psi
}

fn single_mode(rho: &DensityOperator) -> Result<()> {
    match rho.register().len() {
        1 => Ok(()),
        n => Err(Error::MultiMode(n)),
    }
}

/// D ρ D† with D = diag(e^{−inθ}): the operator whose real part feeds
/// ⟨x_θ|ρ|x_θ⟩ = Σ ψ_m ψ_n Re(…)_mn.
pub(crate) fn rotated_real(rho: &DMatrix<Complex64>, theta: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rho.nrows(), rho.ncols(), |m, n| {
        (rho[(m, n)] * Complex64::from_polar(1.0, (n as f64 - m as f64) * theta)).re
    })
}

/// Homodyne marginal pr(x|θ) = ⟨x_θ|ρ|x_θ⟩ of a single-mode state.
pub fn quadrature_pdf(rho: &DensityOperator, theta: f64) -> Result<impl Fn(f64) -> f64 + Send + Sync> {
    single_mode(rho)?;
    let cutoff = rho.register().cutoff(0);
    let rho = rho.normalized()?;
    let a = rotated_real(rho.matrix(), theta);
    Ok(move |x: f64| {
        let psi = DVector::from_vec(hermite_functions(x, cutoff));
        psi.dot(&(&a * &psi)).max(0.0)
    })
}

/// Tabulated inverse CDF of one marginal on the sampling grid.
struct InverseCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn new(pdf: impl Fn(f64) -> f64) -> Self {
        let (lo, hi) = X_RANGE;
        let h = (hi - lo) / (CDF_POINTS - 1) as f64;
        let xs: Vec<f64> = (0..CDF_POINTS).map(|i| lo + h * i as f64).collect();
        let p: Vec<f64> = xs.iter().map(|&x| pdf(x)).collect();
        let mut cdf = vec![0.0; CDF_POINTS];
        for i in 1..CDF_POINTS {
            cdf[i] = cdf[i - 1] + 0.5 * h * (p[i] + p[i - 1]);
        }
        let total = cdf[CDF_POINTS - 1];
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { xs, cdf }
    }

    fn sample(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c < u).clamp(1, CDF_POINTS - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1])
    }
}

/// Simulated homodyne record: loss η applied to ρ, then phases taken
/// round-robin from the grid and quadratures drawn by inverse CDF.
pub fn sample_quadratures(rho: &DensityOperator, settings: &TomographySettings) -> Result<Vec<QuadratureSample>> {
    settings.validate()?;
    single_mode(rho)?;
    let lossy = if settings.eta < 1.0 {
        apply_loss(rho, &LossChannel::new(settings.eta, rho.register().label(0))?)?
    } else {
        rho.clone()
    };
    let tables: Vec<InverseCdf> = settings
        .phase_grid
        .par_iter()
        .map(|&theta| quadrature_pdf(&lossy, theta).map(InverseCdf::new))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let n_phases = tables.len();
    Ok((0..settings.n_samples)
        .map(|j| {
            let k = j % n_phases;
            QuadratureSample {
                theta: settings.phase_grid[k],
                x: tables[k].sample(rng.gen::<f64>()),
            }
        })
        .collect())
}
