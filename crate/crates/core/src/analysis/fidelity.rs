use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{cat_state, coherent, DensityOperator, FockVector, Parity};
use crate::linalg;

/// Largest eigenvalue at which an operator is treated as pure.
const PURITY_THRESHOLD: f64 = 1.0 - 1e-12;

/// Uhlmann fidelity F = (tr √(√ρ₁ ρ₂ √ρ₁))². Inputs are normalized first.
pub fn fidelity(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<f64> {
    if rho1.register().dim() != rho2.register().dim() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity between {}- and {}-dimensional operators",
            rho1.dim(),
            rho2.dim()
        )));
    }
    let r1 = rho1.normalized()?;
    let r2 = rho2.normalized()?;
    let (v1, e1) = linalg::hermitian_eigen(r1.matrix());
    let (v2, e2) = linalg::hermitian_eigen(r2.matrix());
    let top1 = *v1.last().expect("non-empty");
    let top2 = *v2.last().expect("non-empty");
    let f = if top1 >= PURITY_THRESHOLD || top2 >= PURITY_THRESHOLD {
        // ⟨ψ|ρ|ψ⟩ with ψ the dominant eigenvector of the purer operator
        let (vec, other) = if top1 >= top2 {
            (e1.column(e1.ncols() - 1).into_owned(), r2.matrix())
        } else {
            (e2.column(e2.ncols() - 1).into_owned(), r1.matrix())
        };
        vec.dotc(&(other * &vec)).re
    } else {
        let s = linalg::hermitian_map(r1.matrix(), |x| x.max(0.0).sqrt());
        let m = &s * r2.matrix() * &s;
        let root: f64 = linalg::hermitian_eigen(&m).0.iter().map(|x| x.max(0.0).sqrt()).sum();
        root * root
    };
    Ok(f.clamp(0.0, 1.0))
}

/// |⟨a|b⟩|² for normalized vectors.
pub fn fidelity_pure(a: &FockVector, b: &FockVector) -> Result<f64> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok((a.overlap(b)?.norm_sqr() / (na * nb)).clamp(0.0, 1.0))
}

/// ⟨ψ|ρ|ψ⟩ with both normalized, requiring matching dimensions but not labels.
pub fn fidelity_with_pure(rho: &DensityOperator, psi: &FockVector) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch("state and operator dimensions differ".into()));
    }
    let t = rho.trace();
    let n = psi.norm_sqr();
    if t <= 0.0 || n == 0.0 {
        return Err(Error::ZeroProbability);
    }
    let a: &DVector<Complex64> = psi.amps();
    Ok((a.dotc(&(rho.matrix() * a)).re / (t * n)).clamp(0.0, 1.0))
}

/// Result of a one-parameter amplitude fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeFit {
    pub gamma: f64,
    pub fidelity: f64,
}

/// Maximizes `f` over [lo, hi]: coarse scan, then golden-section refinement
/// around the best grid point. Points where `f` errors are skipped.
fn maximize_1d(lo: f64, hi: f64, steps: usize, f: impl Fn(f64) -> Option<f64>) -> Option<AmplitudeFit> {
    let h = (hi - lo) / steps as f64;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..=steps {
        if let Some(v) = f(lo + h * i as f64) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    let (i, _) = best?;
    let (mut a, mut b) = ((lo + h * (i as f64 - 1.0)).max(lo), (lo + h * (i as f64 + 1.0)).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |x: f64| f(x).unwrap_or(f64::NEG_INFINITY);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d);
        }
    }
    let gamma = (a + b) / 2.0;
    Some(AmplitudeFit {
        gamma,
        fidelity: eval(gamma),
    })
}

/// Real cat amplitude maximizing the fidelity of `rho` (single mode) with
/// the cat of the given parity.
pub fn fit_cat_amplitude(rho: &DensityOperator, parity: Parity) -> Result<AmplitudeFit> {
    if rho.register().len() != 1 {
        return Err(Error::MultiMode(rho.register().len()));
    }
    let cutoff = rho.register().cutoff(0);
    let lo = match parity {
        Parity::Even => 0.0,
        Parity::Odd => 1e-4,
    };
    maximize_1d(lo, 2.5, 500, |g| {
        let cat = cat_state(g, parity, cutoff).ok()?;
        fidelity_with_pure(rho, &cat).ok()
    })
    .ok_or_else(|| Error::InvalidParameter("no admissible cat amplitude for this cutoff".into()))
}

/// Coherent state maximizing the fidelity with `rho`: coarse grid in the
/// complex plane, then alternating golden-section refinement of each axis.
pub fn fit_coherent(rho: &DensityOperator) -> Result<(Complex64, f64)> {
    if rho.register().len() != 1 {
        return Err(Error::MultiMode(rho.register().len()));
    }
    let cutoff = rho.register().cutoff(0);
    let eval = |z: Complex64| -> Option<f64> {
        let c = coherent(z, cutoff).ok()?;
        fidelity_with_pure(rho, &c).ok()
    };
    let mut best = (Complex64::new(0.0, 0.0), f64::NEG_INFINITY);
    for i in -40..=40 {
        for j in -40..=40 {
            let z = Complex64::new(i as f64 * 0.05, j as f64 * 0.05);
            if let Some(v) = eval(z) {
                if v > best.1 {
                    best = (z, v);
                }
            }
        }
    }
    for _ in 0..4 {
        let z = best.0;
        if let Some(fit) = maximize_1d(z.re - 0.05, z.re + 0.05, 20, |x| eval(Complex64::new(x, z.im))) {
            best = (Complex64::new(fit.gamma, z.im), fit.fidelity);
        }
        let z = best.0;
        if let Some(fit) = maximize_1d(z.im - 0.05, z.im + 0.05, 20, |y| eval(Complex64::new(z.re, y))) {
            best = (Complex64::new(z.re, fit.gamma), fit.fidelity);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock, squeezed_vacuum, ModeRegister, CV_MODE};

    fn mixed(cutoff: usize) -> DensityOperator {
        let a = DensityOperator::from_pure(&fock(0, cutoff).unwrap());
        let b = DensityOperator::from_pure(&coherent(Complex64::new(0.4, -0.2), cutoff).unwrap());
        let c = DensityOperator::from_pure(&fock(2, cutoff).unwrap());
        DensityOperator::mixture(&[(0.5, &a), (0.3, &b), (0.2, &c)]).unwrap()
    }

    #[test]
    fn fidelity_basics() {
        let zero = DensityOperator::from_pure(&fock(0, 5).unwrap());
        let one = DensityOperator::from_pure(&fock(1, 5).unwrap());
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap() < 1e-15);
        let m = mixed(6);
        assert!((fidelity(&m, &m).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_is_symmetric() {
        let m = mixed(6);
        let sv = DensityOperator::from_pure(&squeezed_vacuum(0.2, 6).unwrap());
        let other = DensityOperator::mixture(&[(0.5, &sv), (0.5, &DensityOperator::from_pure(&fock(1, 6).unwrap()))]).unwrap();
        let f1 = fidelity(&m, &other).unwrap();
        let f2 = fidelity(&other, &m).unwrap();
        assert!((f1 - f2).abs() < 1e-9);
        assert!(f1 > 0.0 && f1 < 1.0);
    }

    #[test]
    fn pure_fidelity_matches_overlap() {
        let a = coherent(Complex64::new(0.3, 0.2), 14).unwrap();
        let b = squeezed_vacuum(0.4, 14).unwrap();
        let via_rho = fidelity(&DensityOperator::from_pure(&a), &DensityOperator::from_pure(&b)).unwrap();
        let via_overlap = a.overlap(&b).unwrap().norm_sqr();
        assert!((via_rho - via_overlap).abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DensityOperator::from_pure(&fock(0, 3).unwrap());
        let b = DensityOperator::from_pure(&fock(0, 4).unwrap());
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn fit_recovers_cat_amplitude() {
        let cat = DensityOperator::from_pure(&cat_state(0.9, Parity::Odd, 14).unwrap());
        let fit = fit_cat_amplitude(&cat, Parity::Odd).unwrap();
        assert!((fit.gamma - 0.9).abs() < 1e-6);
        assert!((fit.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_coherent_amplitude() {
        let target = Complex64::new(0.31, -0.12);
        let rho = DensityOperator::from_pure(&coherent(target, 12).unwrap());
        let (z, f) = fit_coherent(&rho).unwrap();
        assert!((z - target).norm() < 1e-5);
        assert!(f > 1.0 - 1e-9);
    }

    #[test]
    fn fits_need_single_mode() {
        let reg = ModeRegister::new([("A", 1), (CV_MODE, 3)]).unwrap();
        let rho = DensityOperator::from_pure(&FockVector::basis(reg, &[0, 0]).unwrap());
        assert!(matches!(fit_cat_amplitude(&rho, Parity::Even), Err(Error::MultiMode(2))));
    }
}
