//! Standard single-mode states. Every constructor builds the exact amplitudes,
//! measures the norm lost to truncation, and refuses cutoffs that drop more
//! than [`TRUNCATION_LIMIT`].

use nalgebra::DVector;
use num_complex::Complex64;

use super::{FockVector, ModeRegister};
use crate::error::{Error, Result};

/// Largest squared norm a constructor may discard at the cutoff.
pub const TRUNCATION_LIMIT: f64 = 1e-6;

/// Label given to modes built by the single-mode constructors.
pub const CV_MODE: &str = "C";

/// Photon-number parity of a cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

fn finish(amps: Vec<Complex64>, cutoff: usize) -> Result<FockVector> {
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let discarded = (1.0 - kept).max(0.0);
    if discarded > TRUNCATION_LIMIT {
        return Err(Error::CutoffTooSmall {
            discarded,
            limit: TRUNCATION_LIMIT,
        });
    }
    log::debug!("cutoff {cutoff}: discarded norm {discarded:.3e}");
    let scale = 1.0 / kept.sqrt();
    FockVector::new(
        ModeRegister::single(CV_MODE, cutoff)?,
        DVector::from_iterator(amps.len(), amps.into_iter().map(|a| a * scale)),
    )
}

pub fn vacuum(register: ModeRegister) -> FockVector {
    let zeros = vec![0; register.len()];
    FockVector::basis(register, &zeros).expect("all-zero tuple is always valid")
}

pub fn fock(n: usize, cutoff: usize) -> Result<FockVector> {
    FockVector::basis(ModeRegister::single(CV_MODE, cutoff)?, &[n])
}

/// γⁿ/√n! for n = 0..=cutoff.
fn power_series(gamma: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut terms = Vec::with_capacity(cutoff + 1);
    let mut t = Complex64::new(1.0, 0.0);
    for n in 0..=cutoff {
        if n > 0 {
            t *= gamma / (n as f64).sqrt();
        }
        terms.push(t);
    }
    terms
}

/// Coherent state |γ⟩.
pub fn coherent(gamma: Complex64, cutoff: usize) -> Result<FockVector> {
    let env = (-gamma.norm_sqr() / 2.0).exp();
    finish(power_series(gamma, cutoff).into_iter().map(|t| t * env).collect(), cutoff)
}

/// Single-mode squeezed vacuum with squeezing parameter `r`.
///
/// Amplitudes are `sech(r)^½ tanh(r)ⁿ √(2n)!/(2ⁿ n!)` on |2n⟩, all non-negative:
/// the anti-squeezed quadrature is x̂ (θ = 0) and the squeezed one is p̂
/// (θ = π/2), so small-r squeezed vacuum approximates the even cat with a real
/// amplitude.
pub fn squeezed_vacuum(r: f64, cutoff: usize) -> Result<FockVector> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing r = {r}")));
    }
    if cutoff < 2 {
        return Err(Error::InvalidCutoff {
            label: CV_MODE.into(),
            cutoff,
        });
    }
    let t = r.tanh();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mut c = (1.0 / r.cosh()).sqrt();
    for n in 0..=cutoff / 2 {
        if n > 0 {
            let k = 2.0 * n as f64;
            c *= t * ((k - 1.0) / k).sqrt();
        }
        amps[2 * n] = Complex64::new(c, 0.0);
    }
    finish(amps, cutoff)
}

/// Cat state N±(|γ⟩ ± |−γ⟩) with real amplitude γ.
pub fn cat_state(gamma: f64, parity: Parity, cutoff: usize) -> Result<FockVector> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!("cat amplitude {gamma}")));
    }
    if gamma == 0.0 && parity == Parity::Odd {
        return Err(Error::DegenerateCat);
    }
    let norm = 1.0 / (2.0 + 2.0 * parity.sign() * (-2.0 * gamma * gamma).exp()).sqrt();
    let env = (-gamma * gamma / 2.0).exp();
    let amps = power_series(Complex64::new(gamma, 0.0), cutoff)
        .into_iter()
        .enumerate()
        .map(|(n, t)| {
            let branch = 1.0 + parity.sign() * if n % 2 == 0 { 1.0 } else { -1.0 };
            t * (norm * env * branch)
        })
        .collect();
    finish(amps, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fidelity_pure(a: &FockVector, b: &FockVector) -> f64 {
        a.overlap(b).unwrap().norm_sqr()
    }

    #[test]
    fn vacuum_layouts() {
        let one = vacuum(ModeRegister::single("C", 3).unwrap());
        assert_eq!(one.amps().as_slice(), &[1.0, 0.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0)));
        let two = vacuum(ModeRegister::new([("A", 1), ("B", 1)]).unwrap());
        assert_eq!(two.amps()[0], Complex64::new(1.0, 0.0));
        assert_eq!(two.norm_sqr(), 1.0);
        assert_eq!(one.mean_photon_number("C").unwrap(), 0.0);
    }

    #[test]
    fn coherent_mean_and_overlap() {
        assert_eq!(coherent(Complex64::new(0.0, 0.0), 5).unwrap(), fock(0, 5).unwrap());
        let a = coherent(Complex64::new(0.45, 0.0), 12).unwrap();
        assert!((a.mean_photon_number("C").unwrap() - 0.2025).abs() < 1e-6);
        let plus = coherent(Complex64::new(0.9, 0.0), 14).unwrap();
        let minus = coherent(Complex64::new(-0.9, 0.0), 14).unwrap();
        let ov = plus.overlap(&minus).unwrap().norm();
        assert!((ov - (-1.62f64).exp()).abs() < 1e-8, "{ov}");
        assert!((ov - 0.1979).abs() < 1e-4);
    }

    #[test]
    fn coherent_cutoff_too_small() {
        assert!(matches!(
            coherent(Complex64::new(2.0, 0.0), 4),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn squeezed_vacuum_parity_and_limits() {
        assert_eq!(squeezed_vacuum(0.0, 6).unwrap(), fock(0, 6).unwrap());
        let sv = squeezed_vacuum(0.18, 14).unwrap();
        for (n, a) in sv.amps().iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(*a, Complex64::new(0.0, 0.0));
            }
        }
        assert!((sv.mean_photon_number("C").unwrap() - 0.18f64.sinh().powi(2)).abs() < 1e-9);
        assert!(squeezed_vacuum(-0.1, 14).is_err());
        assert!(squeezed_vacuum(0.1, 1).is_err());
    }

    #[test]
    fn cat_parities() {
        let even = cat_state(0.9, Parity::Even, 14).unwrap();
        let odd = cat_state(0.9, Parity::Odd, 14).unwrap();
        for n in 0..=14 {
            if n % 2 == 0 {
                assert_eq!(odd.amps()[n], Complex64::new(0.0, 0.0));
            } else {
                assert_eq!(even.amps()[n], Complex64::new(0.0, 0.0));
            }
        }
        assert_eq!(cat_state(0.0, Parity::Even, 8).unwrap(), fock(0, 8).unwrap());
        assert!(matches!(cat_state(0.0, Parity::Odd, 8), Err(Error::DegenerateCat)));
        assert!(odd.overlap(&cat_state(0.3, Parity::Even, 14).unwrap()).unwrap().norm() == 0.0);
    }

    #[test]
    fn cat_matches_coherent_superposition() {
        let g = 0.7;
        let plus = coherent(Complex64::new(g, 0.0), 14).unwrap();
        let minus = coherent(Complex64::new(-g, 0.0), 14).unwrap();
        let direct = plus.add(&minus.scaled(Complex64::new(-1.0, 0.0))).unwrap().normalized().unwrap();
        let cat = cat_state(g, Parity::Odd, 14).unwrap();
        assert!((fidelity_pure(&direct, &cat) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_odd_cat_is_single_photon() {
        let cat = cat_state(0.1, Parity::Odd, 10).unwrap();
        assert!(fidelity_pure(&cat, &fock(1, 10).unwrap()) >= 0.99);
        let tiny = cat_state(1e-3, Parity::Odd, 10).unwrap();
        assert!(fidelity_pure(&tiny, &fock(1, 10).unwrap()) > 1.0 - 1e-6);
    }

    #[test]
    fn annihilation_maps_even_cat_to_odd_cat() {
        for g in [0.3, 0.45, 0.9] {
            let even = cat_state(g, Parity::Even, 14).unwrap();
            let lowered = even.annihilate(CV_MODE).unwrap().normalized().unwrap();
            let odd = cat_state(g, Parity::Odd, 14).unwrap();
            assert!((fidelity_pure(&lowered, &odd) - 1.0).abs() < 1e-10);
        }
        let zero = fock(0, 4).unwrap().annihilate(CV_MODE).unwrap();
        assert_eq!(zero.norm_sqr(), 0.0);
    }

    #[test]
    fn constructors_are_deterministic() {
        assert_eq!(squeezed_vacuum(0.18, 14).unwrap(), squeezed_vacuum(0.18, 14).unwrap());
        assert_eq!(
            cat_state(0.45, Parity::Even, 14).unwrap(),
            cat_state(0.45, Parity::Even, 14).unwrap()
        );
    }
}
