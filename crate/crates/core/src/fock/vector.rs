use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::register::{IndexSplit, ModeRegister};
use super::{annihilation_matrix, number_matrix};
use crate::error::{Error, Result};

/// Pure state on a truncated multi-mode Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    register: ModeRegister,
    amps: DVector<Complex64>,
}

impl FockVector {
    pub fn new(register: ModeRegister, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != register.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a {}-dimensional register",
                amps.len(),
                register.dim()
            )));
        }
        Ok(Self { register, amps })
    }

    pub fn from_amps(register: ModeRegister, amps: &[Complex64]) -> Result<Self> {
        Self::new(register, DVector::from_column_slice(amps))
    }

    /// Fock basis state with the given photon numbers.
    pub fn basis(register: ModeRegister, occupation: &[usize]) -> Result<Self> {
        let idx = register.flatten(occupation)?;
        let mut amps = DVector::zeros(register.dim());
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { register, amps })
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn amps(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn into_amps(self) -> DVector<Complex64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, occupation: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.register.flatten(occupation)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroProbability);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            register: self.register.clone(),
            amps: self.amps.map(|a| a * factor),
        }
    }

    pub fn add(&self, other: &FockVector) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            register: self.register.clone(),
            amps: &self.amps + &other.amps,
        })
    }

    fn check_same(&self, other: &FockVector) -> Result<()> {
        if self.register != other.register {
            return Err(Error::DimensionMismatch(format!(
                "registers {:?} and {:?} differ",
                self.register, other.register
            )));
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &FockVector) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn tensor(&self, other: &FockVector) -> Result<Self> {
        let register = self.register.join(&other.register)?;
        Ok(Self {
            register,
            amps: self.amps.kronecker(&other.amps),
        })
    }

    /// Applies `op`, acting on the joint space of `labels` (in that order), to the state.
    pub fn apply_matrix(&self, op: &DMatrix<Complex64>, labels: &[&str]) -> Result<Self> {
        let positions = self.register.positions(labels)?;
        self.apply_local(op, &positions)
    }

    pub(crate) fn apply_local(&self, op: &DMatrix<Complex64>, positions: &[usize]) -> Result<Self> {
        let split = IndexSplit::new(&self.register, positions);
        let local_dim = split.local_offsets.len();
        if op.nrows() != local_dim || op.ncols() != local_dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {local_dim}-dimensional subsystem",
                op.nrows(),
                op.ncols()
            )));
        }
        let mut out = DVector::zeros(self.dim());
        let mut local = DVector::zeros(local_dim);
        for &r in &split.rest_offsets {
            for (j, &l) in split.local_offsets.iter().enumerate() {
                local[j] = self.amps[r + l];
            }
            let mapped = op * &local;
            for (i, &l) in split.local_offsets.iter().enumerate() {
                out[r + l] = mapped[i];
            }
        }
        Ok(Self {
            register: self.register.clone(),
            amps: out,
        })
    }

    /// â on the named mode. The result is not normalized; its squared norm is ⟨n̂⟩.
    pub fn annihilate(&self, label: &str) -> Result<Self> {
        let pos = self.register.position(label)?;
        self.apply_local(&annihilation_matrix(self.register.cutoff(pos)), &[pos])
    }

    pub fn mean_photon_number(&self, label: &str) -> Result<f64> {
        let pos = self.register.position(label)?;
        let n = self.apply_local(&number_matrix(self.register.cutoff(pos)), &[pos])?;
        Ok(self.amps.dotc(&n.amps).re)
    }

    /// Contracts the modes in `labels` against the bra ⟨ket|, leaving an
    /// unnormalized state on the remaining modes.
    pub fn contract(&self, labels: &[&str], ket: &DVector<Complex64>) -> Result<Self> {
        let positions = self.register.positions(labels)?;
        let split = IndexSplit::new(&self.register, &positions);
        if ket.len() != split.local_offsets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}-dimensional bra on a {}-dimensional subsystem",
                ket.len(),
                split.local_offsets.len()
            )));
        }
        let rest = self.register.select(&self.register.complement(&positions));
        let amps = DVector::from_iterator(
            split.rest_offsets.len(),
            split.rest_offsets.iter().map(|&r| {
                split
                    .local_offsets
                    .iter()
                    .zip(ket.iter())
                    .map(|(&l, k)| k.conj() * self.amps[r + l])
                    .sum::<Complex64>()
            }),
        );
        Ok(Self {
            register: rest,
            amps,
        })
    }

    /// Same state with modes permuted into the order given by `labels`.
    pub fn reorder(&self, labels: &[&str]) -> Result<Self> {
        let perm = self.register.positions(labels)?;
        if perm.len() != self.register.len() {
            return Err(Error::DimensionMismatch("reorder must list every mode".into()));
        }
        let target = self.register.select(&perm);
        let strides = self.register.strides();
        let amps = DVector::from_iterator(
            target.dim(),
            (0..target.dim()).map(|i| {
                let occ = target.unflatten(i);
                let old: usize = occ.iter().zip(&perm).map(|(n, &p)| n * strides[p]).sum();
                self.amps[old]
            }),
        );
        Ok(Self {
            register: target,
            amps,
        })
    }

    /// Lowers the cutoff of one mode, returning the state and the squared norm dropped.
    pub fn truncate(&self, label: &str, cutoff: usize) -> Result<(Self, f64)> {
        let pos = self.register.position(label)?;
        let target = self.register.with_cutoff(label, cutoff)?;
        let mut discarded = 0.0;
        let mut amps = DVector::zeros(target.dim());
        for (i, a) in self.amps.iter().enumerate() {
            let occ = self.register.unflatten(i);
            if occ[pos] > cutoff {
                discarded += a.norm_sqr();
            } else {
                amps[target.flatten(&occ)?] = *a;
            }
        }
        Ok((
            Self {
                register: target,
                amps,
            },
            discarded,
        ))
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        Ok(Self {
            register: self.register.relabel(labels)?,
            amps: self.amps.clone(),
        })
    }
}
