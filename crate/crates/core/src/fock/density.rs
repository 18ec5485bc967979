use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::register::{IndexSplit, ModeRegister};
use super::{annihilation_matrix, number_matrix, FockVector};
use crate::error::{Error, Result};
use crate::linalg;

/// Density operator on a truncated multi-mode Fock space.
///
/// Operators produced by projections are left unnormalized; their trace is the
/// probability of the conditioning event.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    register: ModeRegister,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(register: ModeRegister, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = register.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {d}-dimensional register",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { register, matrix })
    }

    pub fn from_pure(psi: &FockVector) -> Self {
        let a = psi.amps();
        Self {
            register: psi.register().clone(),
            matrix: a * a.adjoint(),
        }
    }

    /// Convex (or general linear) combination of operators on the same register.
    pub fn mixture(terms: &[(f64, &DensityOperator)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut matrix = DMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in terms {
            first.check_same(rho)?;
            matrix += rho.matrix.scale(*w);
        }
        Ok(Self {
            register: first.register.clone(),
            matrix,
        })
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    fn check_same(&self, other: &DensityOperator) -> Result<()> {
        if self.register != other.register {
            return Err(Error::DimensionMismatch(format!(
                "registers {:?} and {:?} differ",
                self.register, other.register
            )));
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::ZeroProbability);
        }
        Ok(self.scaled(1.0 / t))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            register: self.register.clone(),
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn element(&self, row: &[usize], col: &[usize]) -> Result<Complex64> {
        Ok(self.matrix[(self.register.flatten(row)?, self.register.flatten(col)?)])
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Checks hermiticity, unit trace and positivity at the usual tolerances.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_defect() < 1e-10
            && (self.trace() - 1.0).abs() < 1e-10
            && self.min_eigenvalue() > -1e-8
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn expectation_pure(&self, psi: &FockVector) -> Result<f64> {
        if psi.register() != &self.register {
            return Err(Error::DimensionMismatch("state and operator registers differ".into()));
        }
        let a = psi.amps();
        Ok(a.dotc(&(&self.matrix * a)).re)
    }

    /// tr(ρ O) for an operator on the full space.
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Result<Complex64> {
        if op.shape() != self.matrix.shape() {
            return Err(Error::DimensionMismatch("observable shape".into()));
        }
        Ok((&self.matrix * op).trace())
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        Ok(Self {
            register: self.register.join(&other.register)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Traces out every mode not listed in `keep`. Kept modes stay in register order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let mut positions = self.register.positions(keep)?;
        positions.sort_unstable();
        let split = IndexSplit::new(&self.register, &positions);
        let kept = &split.local_offsets;
        let matrix = DMatrix::from_fn(kept.len(), kept.len(), |i, j| {
            split
                .rest_offsets
                .iter()
                .map(|&t| self.matrix[(kept[i] + t, kept[j] + t)])
                .sum()
        });
        Ok(Self {
            register: self.register.select(&positions),
            matrix,
        })
    }

    /// ρ ↦ O ρ O† with `op` on the joint space of `labels`.
    pub fn apply_matrix(&self, op: &DMatrix<Complex64>, labels: &[&str]) -> Result<Self> {
        let positions = self.register.positions(labels)?;
        self.apply_local(op, &positions)
    }

    pub(crate) fn apply_local(&self, op: &DMatrix<Complex64>, positions: &[usize]) -> Result<Self> {
        let full = self.embed(op, positions)?;
        Ok(Self {
            register: self.register.clone(),
            matrix: &full * &self.matrix * full.adjoint(),
        })
    }

    /// Σ_k K_k ρ K_k† for Kraus operators on the joint space of `labels`.
    pub fn apply_kraus(&self, kraus: &[DMatrix<Complex64>], labels: &[&str]) -> Result<Self> {
        let positions = &self.register.positions(labels)?;
        let mut matrix = DMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            let full = self.embed(k, positions)?;
            matrix += &full * &self.matrix * full.adjoint();
        }
        Ok(Self {
            register: self.register.clone(),
            matrix,
        })
    }

    /// Lifts a local operator to the full register (identity elsewhere).
    pub(crate) fn embed(&self, op: &DMatrix<Complex64>, positions: &[usize]) -> Result<DMatrix<Complex64>> {
        let split = IndexSplit::new(&self.register, positions);
        let ld = split.local_offsets.len();
        if op.nrows() != ld || op.ncols() != ld {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {ld}-dimensional subsystem",
                op.nrows(),
                op.ncols()
            )));
        }
        let mut full = DMatrix::zeros(self.dim(), self.dim());
        for &r in &split.rest_offsets {
            for (i, &li) in split.local_offsets.iter().enumerate() {
                for (j, &lj) in split.local_offsets.iter().enumerate() {
                    full[(r + li, r + lj)] = op[(i, j)];
                }
            }
        }
        Ok(full)
    }

    /// â ρ â† on the named mode (unnormalized).
    pub fn annihilate(&self, label: &str) -> Result<Self> {
        let pos = self.register.position(label)?;
        self.apply_local(&annihilation_matrix(self.register.cutoff(pos)), &[pos])
    }

    pub fn mean_photon_number(&self, label: &str) -> Result<f64> {
        let pos = self.register.position(label)?;
        let n = self.embed(&number_matrix(self.register.cutoff(pos)), &[pos])?;
        Ok(self.expectation(&n)?.re)
    }

    /// ⟨k|ρ|k⟩ with the bra acting on the modes in `labels`.
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
        let rest = &split.rest_offsets;
        let support: Vec<(usize, Complex64)> = split
            .local_offsets
            .iter()
            .zip(ket.iter())
            .filter(|(_, k)| k.norm_sqr() > 0.0)
            .map(|(&l, &k)| (l, k))
            .collect();
        let matrix = DMatrix::from_fn(rest.len(), rest.len(), |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(l1, k1) in &support {
                for &(l2, k2) in &support {
                    acc += k1.conj() * self.matrix[(rest[i] + l1, rest[j] + l2)] * k2;
                }
            }
            acc
        });
        Ok(Self {
            register: self.register.select(&self.register.complement(&positions)),
            matrix,
        })
    }

    /// Density-operator counterpart of [`QuantumState::compress`](super::QuantumState::compress).
    pub fn compress(&self, labels: &[&str], kets: &[DVector<Complex64>], label: &str) -> Result<Self> {
        if kets.len() < 2 {
            return Err(Error::InvalidParameter("compression needs at least two kets".into()));
        }
        let positions = self.register.positions(labels)?;
        let split = IndexSplit::new(&self.register, &positions);
        if kets.iter().any(|k| k.len() != split.local_offsets.len()) {
            return Err(Error::DimensionMismatch("ket dimension does not match the compressed modes".into()));
        }
        let rest_reg = self.register.select(&self.register.complement(&positions));
        let register = ModeRegister::single(label, kets.len() - 1)?.join(&rest_reg)?;
        let supports: Vec<Vec<(usize, Complex64)>> = kets
            .iter()
            .map(|k| {
                split
                    .local_offsets
                    .iter()
                    .zip(k.iter())
                    .filter(|(_, c)| c.norm_sqr() > 0.0)
                    .map(|(&l, &c)| (l, c))
                    .collect()
            })
            .collect();
        let rest = &split.rest_offsets;
        let block = rest.len();
        let matrix = DMatrix::from_fn(register.dim(), register.dim(), |i, j| {
            let (q1, r1) = (i / block, rest[i % block]);
            let (q2, r2) = (j / block, rest[j % block]);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(l1, k1) in &supports[q1] {
                for &(l2, k2) in &supports[q2] {
                    acc += k1.conj() * self.matrix[(r1 + l1, r2 + l2)] * k2;
                }
            }
            acc
        });
        Ok(Self { register, matrix })
    }

    pub fn reorder(&self, labels: &[&str]) -> Result<Self> {
        let perm = self.register.positions(labels)?;
        if perm.len() != self.register.len() {
            return Err(Error::DimensionMismatch("reorder must list every mode".into()));
        }
        let target = self.register.select(&perm);
        let strides = self.register.strides();
        let map: Vec<usize> = (0..target.dim())
            .map(|i| {
                target
                    .unflatten(i)
                    .iter()
                    .zip(&perm)
                    .map(|(n, &p)| n * strides[p])
                    .sum()
            })
            .collect();
        let matrix = DMatrix::from_fn(map.len(), map.len(), |i, j| self.matrix[(map[i], map[j])]);
        Ok(Self {
            register: target,
            matrix,
        })
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        Ok(Self {
            register: self.register.relabel(labels)?,
            matrix: self.matrix.clone(),
        })
    }

    /// Spectral decomposition into weighted pure states, dropping weights below `floor`.
    pub fn pure_ensemble(&self, floor: f64) -> Vec<(f64, FockVector)> {
        let (vals, vecs) = linalg::hermitian_eigen(&self.matrix);
        vals.iter()
            .enumerate()
            .filter(|(_, &w)| w > floor)
            .map(|(i, &w)| {
                let psi = FockVector::new(self.register.clone(), vecs.column(i).into_owned())
                    .expect("eigenvector has register dimension");
                (w, psi)
            })
            .collect()
    }

    /// Photon-number populations of a single-mode operator.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}
