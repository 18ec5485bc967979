use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::{hermite_functions, rotated_real};
use super::{QuadratureSample, ReconstructionResult, TomographySettings};
use crate::channels::{loss_adjoint, loss_kraus};
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, ModeRegister, CV_MODE};

/// Samples sharing one phase, with their Hermite-function rows.
struct PhaseBlock {
    theta: f64,
    psi: DMatrix<f64>,
}

fn group(samples: &[QuadratureSample], cutoff: usize) -> Vec<PhaseBlock> {
    let mut thetas: Vec<f64> = samples.iter().map(|s| s.theta).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    thetas
        .into_par_iter()
        .map(|theta| {
            let rows: Vec<Vec<f64>> = samples
                .iter()
                .filter(|s| s.theta == theta)
                .map(|s| hermite_functions(s.x, cutoff))
                .collect();
            let psi = DMatrix::from_fn(rows.len(), cutoff + 1, |j, n| rows[j][n]);
            PhaseBlock { theta, psi }
        })
        .collect()
}

fn phase(theta: f64, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |m, n| {
        if m == n {
            Complex64::from_polar(1.0, m as f64 * theta)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// One evaluation of the likelihood at ρ: log-likelihood and R = Λ†(Σ Π_j/pr_j)/N.
fn evaluate(rho: &DMatrix<Complex64>, blocks: &[PhaseBlock], kraus: &[DMatrix<Complex64>], eta: f64, n: usize) -> Result<(f64, DMatrix<Complex64>)> {
    let d = rho.nrows();
    let mut sigma = DMatrix::zeros(d, d);
    for k in kraus {
        sigma += k * rho * k.adjoint();
    }
    let parts: Vec<(f64, DMatrix<Complex64>)> = blocks
        .par_iter()
        .map(|b| -> Result<(f64, DMatrix<Complex64>)> {
            let a = rotated_real(&sigma, b.theta);
            let proj = &b.psi * a;
            let mut weighted = b.psi.clone();
            let mut ll = 0.0;
            for j in 0..b.psi.nrows() {
                let pr = proj.row(j).dot(&b.psi.row(j));
                if !(pr > 0.0) {
                    return Err(Error::ZeroProbability);
                }
                ll += pr.ln();
                weighted.row_mut(j).scale_mut(1.0 / pr);
            }
            let s = b.psi.transpose() * weighted;
            // |x_θ⟩⟨x_θ| = U ψψᵀ U† with U = diag(e^{inθ})
            let u = phase(b.theta, d);
            Ok((ll, &u * s.map(|v| Complex64::new(v, 0.0)) * u.adjoint()))
        })
        .collect::<Result<_>>()?;
    let mut ll = 0.0;
    let mut s = DMatrix::zeros(d, d);
    for (l, m) in parts {
        ll += l;
        s += m;
    }
    let r = if eta < 1.0 { loss_adjoint(&s, eta) } else { s };
    Ok((ll, r / Complex64::new(n as f64, 0.0)))
}

fn step(rho: &DMatrix<Complex64>, r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let next = r * rho * r;
    let next = (&next + next.adjoint()) * Complex64::new(0.5, 0.0);
    let t = next.trace().re;
    next / Complex64::new(t, 0.0)
}

/// Iterative maximum-likelihood estimate ρ ← N[RρR] with the detector
/// efficiency folded into the POVM through the adjoint loss channel.
///
/// The undamped step is used whenever it raises the likelihood; otherwise the
/// diluted step with (1 + εR) is taken, halving ε until the likelihood
/// no longer falls.
pub fn maxlik_reconstruct(samples: &[QuadratureSample], settings: &TomographySettings) -> Result<ReconstructionResult> {
    settings.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no quadrature samples".into()));
    }
    if let Some(bad) = samples.iter().find(|s| !s.x.is_finite() || !s.theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite sample {bad:?}")));
    }
    let cutoff = settings.cutoff;
    let d = cutoff + 1;
    let blocks = group(samples, cutoff);
    let kraus = loss_kraus(settings.eta, cutoff);
    let n = samples.len();

    let mut rho = DMatrix::<Complex64>::identity(d, d) / Complex64::new(d as f64, 0.0);
    let (mut ll, mut r) = evaluate(&rho, &blocks, &kraus, settings.eta, n)?;
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.max_iters {
        iterations += 1;
        let mut candidate = step(&rho, &r);
        let mut eval = evaluate(&candidate, &blocks, &kraus, settings.eta, n)?;
        let mut eps = 1.0;
        while eval.0 < ll && eps > 1e-6 {
            eps /= 2.0;
            let damped = (DMatrix::identity(d, d) + &r * Complex64::new(eps, 0.0)) / Complex64::new(1.0 + eps, 0.0);
            candidate = step(&rho, &damped);
            eval = evaluate(&candidate, &blocks, &kraus, settings.eta, n)?;
        }
        if eval.0 < ll {
            // no ascent direction left at roundoff level
            converged = true;
            iterations -= 1;
            break;
        }
        let gain = eval.0 - ll;
        rho = candidate;
        (ll, r) = eval;
        trace.push(ll);
        if gain <= settings.log_likelihood_tol * ll.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("maximum likelihood stopped after {iterations} iterations without converging");
    }
    Ok(ReconstructionResult {
        rho: DensityOperator::new(ModeRegister::single(CV_MODE, cutoff)?, rho)?,
        iterations,
        final_log_likelihood: ll,
        converged,
        log_likelihood_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fidelity;
    use crate::fock::fock;
    use crate::tomography::sample_quadratures;

    #[test]
    fn vacuum_round_trip() {
        let vac = DensityOperator::from_pure(&fock(0, 6).unwrap());
        let settings = TomographySettings {
            n_samples: 10_000,
            eta: 1.0,
            cutoff: 6,
            ..Default::default()
        };
        let samples = sample_quadratures(&vac, &settings).unwrap();
        let est = maxlik_reconstruct(&samples, &settings).unwrap();
        assert!(fidelity(&est.rho, &vac).unwrap() >= 0.99);
        assert!(est.rho.is_physical());
        for w in est.log_likelihood_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
    }

    #[test]
    fn single_photon_with_loss_correction() {
        let one = DensityOperator::from_pure(&fock(1, 6).unwrap());
        let settings = TomographySettings {
            n_samples: 12_000,
            eta: 0.7,
            cutoff: 6,
            max_iters: 500,
            ..Default::default()
        };
        let samples = sample_quadratures(&one, &settings).unwrap();
        let corrected = maxlik_reconstruct(&samples, &settings).unwrap();
        let raw = maxlik_reconstruct(&samples, &TomographySettings { eta: 1.0, ..settings }).unwrap();
        let f_corr = fidelity(&corrected.rho, &one).unwrap();
        let f_raw = fidelity(&raw.rho, &one).unwrap();
        assert!(f_corr > 0.85, "{f_corr}");
        assert!((f_raw - 0.7).abs() < 0.05, "{f_raw}");
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(maxlik_reconstruct(&[], &TomographySettings::default()).is_err());
    }
}
