use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::DensityOperator;
use crate::linalg::factorial;

/// Rectangular phase-space grid with `n` points per axis, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WignerGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n: usize,
}

impl Default for WignerGrid {
    fn default() -> Self {
        Self::square(4.0, 81)
    }
}

impl WignerGrid {
    pub fn square(half_width: f64, n: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            n,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        axis(self.x_min, self.x_max, self.n)
    }

    pub fn ps(&self) -> Vec<f64> {
        axis(self.p_min, self.p_max, self.n)
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Generalized Laguerre polynomials L_0^{(k)}(x) … L_nmax^{(k)}(x).
fn laguerre(nmax: usize, k: usize, x: f64) -> Vec<f64> {
    let k = k as f64;
    let mut l = Vec::with_capacity(nmax + 1);
    l.push(1.0);
    if nmax >= 1 {
        l.push(1.0 + k - x);
    }
    for n in 1..nmax {
        let nf = n as f64;
        l.push(((2.0 * nf + 1.0 + k - x) * l[n] - (nf + k) * l[n - 1]) / (nf + 1.0));
    }
    l
}

/// W(x, p) = (1/π) tr[ρ D(α)(−1)^n̂ D(−α)] with α = (x + ip)/√2, from the
/// closed-form displaced-parity matrix elements.
pub fn wigner_point(rho: &DMatrix<Complex64>, x: f64, p: f64) -> f64 {
    let d = rho.nrows();
    let alpha = Complex64::new(x, p) / std::f64::consts::SQRT_2;
    let r2 = alpha.norm_sqr();
    let env = (-2.0 * r2).exp() / std::f64::consts::PI;
    let mut w = 0.0;
    for k in 0..d {
        let lag = laguerre(d - 1 - k, k, 4.0 * r2);
        let pow = (2.0 * alpha.conj()).powu(k as u32);
        for n in 0..d - k {
            let m = n + k;
            // ⟨n|M|m⟩ for m ≥ n; the m < n elements are its conjugates
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let elem = pow * (sign * env * (factorial(n) / factorial(m)).sqrt() * lag[n]);
            if k == 0 {
                w += (rho[(m, n)] * elem).re;
            } else {
                w += 2.0 * (rho[(m, n)] * elem).re;
            }
        }
    }
    w
}

/// Wigner function on a grid; entry (i, j) is W(x_i, p_j).
pub fn wigner(rho: &DensityOperator, grid: &WignerGrid) -> Result<DMatrix<f64>> {
    if rho.register().len() != 1 {
        return Err(Error::MultiMode(rho.register().len()));
    }
    if grid.n == 0 {
        return Err(Error::InvalidParameter("empty Wigner grid".into()));
    }
    let m = rho.normalized()?.matrix().clone();
    let xs = grid.xs();
    let ps = grid.ps();
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| ps.iter().map(|&p| wigner_point(&m, x, p)).collect())
        .collect();
    Ok(DMatrix::from_fn(grid.n, grid.n, |i, j| rows[i][j]))
}
