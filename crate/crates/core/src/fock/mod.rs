//! Truncated Fock-space states and operators.
//!
//! Quadrature convention used throughout the crate:
//! x̂_θ = (â e^{−iθ} + â† e^{iθ})/√2, so the vacuum has variance 1/2.

mod density;
mod json;
mod register;
mod states;
mod vector;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use density::DensityOperator;
pub use register::ModeRegister;
pub use states::{cat_state, coherent, fock, squeezed_vacuum, vacuum, Parity, CV_MODE, TRUNCATION_LIMIT};
pub use vector::FockVector;

/// Matrix of â on a single mode.
pub fn annihilation_matrix(cutoff: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn number_matrix(cutoff: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        Complex64::new(if i == j { i as f64 } else { 0.0 }, 0.0)
    })
}

/// Operations shared by pure and mixed states.
pub trait QuantumState: Sized + Clone {
    fn register(&self) -> &ModeRegister;

    /// Squared norm for vectors, trace for operators: the weight of the
    /// (possibly conditional) state.
    fn weight(&self) -> f64;

    fn apply_matrix(&self, op: &DMatrix<Complex64>, labels: &[&str]) -> crate::Result<Self>;

    fn contract(&self, labels: &[&str], ket: &nalgebra::DVector<Complex64>) -> crate::Result<Self>;

    /// Maps the span of `kets` on the modes `labels` onto a new leading mode
    /// `label` of dimension `kets.len()`; everything outside the span is dropped.
    fn compress(&self, labels: &[&str], kets: &[nalgebra::DVector<Complex64>], label: &str) -> crate::Result<Self>;

    fn to_density(&self) -> DensityOperator;
}

impl QuantumState for FockVector {
    fn register(&self) -> &ModeRegister {
        FockVector::register(self)
    }
    fn weight(&self) -> f64 {
        self.norm_sqr()
    }
    fn apply_matrix(&self, op: &DMatrix<Complex64>, labels: &[&str]) -> crate::Result<Self> {
        FockVector::apply_matrix(self, op, labels)
    }
    fn contract(&self, labels: &[&str], ket: &nalgebra::DVector<Complex64>) -> crate::Result<Self> {
        FockVector::contract(self, labels, ket)
    }
    fn compress(&self, labels: &[&str], kets: &[nalgebra::DVector<Complex64>], label: &str) -> crate::Result<Self> {
        let parts: Vec<FockVector> = kets
            .iter()
            .map(|k| FockVector::contract(self, labels, k))
            .collect::<crate::Result<_>>()?;
        if parts.len() < 2 {
            return Err(crate::Error::InvalidParameter("compression needs at least two kets".into()));
        }
        let rest = parts[0].register().clone();
        let register = ModeRegister::single(label, kets.len() - 1)?.join(&rest)?;
        let mut amps = nalgebra::DVector::zeros(register.dim());
        let block = rest.dim();
        for (q, p) in parts.iter().enumerate() {
            amps.rows_mut(q * block, block).copy_from(p.amps());
        }
        FockVector::new(register, amps)
    }
    fn to_density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

impl QuantumState for DensityOperator {
    fn register(&self) -> &ModeRegister {
        DensityOperator::register(self)
    }
    fn weight(&self) -> f64 {
        self.trace()
    }
    fn apply_matrix(&self, op: &DMatrix<Complex64>, labels: &[&str]) -> crate::Result<Self> {
        DensityOperator::apply_matrix(self, op, labels)
    }
    fn contract(&self, labels: &[&str], ket: &nalgebra::DVector<Complex64>) -> crate::Result<Self> {
        DensityOperator::contract(self, labels, ket)
    }
    fn compress(&self, labels: &[&str], kets: &[nalgebra::DVector<Complex64>], label: &str) -> crate::Result<Self> {
        DensityOperator::compress(self, labels, kets, label)
    }
    fn to_density(&self) -> DensityOperator {
        self.clone()
    }
}
