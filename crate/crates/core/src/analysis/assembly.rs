use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::Polarization;
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, ModeRegister};
use crate::linalg;
use crate::protocol::CatBasis;

/// CV states in mode C conditioned on each polarization projection of the
/// DV mode, with the probability of that projection.
#[derive(Clone, Debug, Default)]
pub struct ConditionalTomogramSet {
    entries: BTreeMap<Polarization, (DensityOperator, f64)>,
}

impl ConditionalTomogramSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, pol: Polarization, rho: DensityOperator, probability: f64) -> Result<()> {
        if !(probability >= 0.0) {
            return Err(Error::InvalidParameter(format!("probability {probability} for {}", pol.name())));
        }
        if rho.register().len() != 1 {
            return Err(Error::MultiMode(rho.register().len()));
        }
        if let Some((other, _)) = self.entries.values().next() {
            if other.dim() != rho.dim() {
                return Err(Error::DimensionMismatch("conditional tomograms differ in cutoff".into()));
            }
        }
        self.entries.insert(pol, (rho.normalized()?, probability));
        Ok(())
    }

    pub fn get(&self, pol: Polarization) -> Result<&(DensityOperator, f64)> {
        self.entries.get(&pol).ok_or(Error::MissingProjection(pol.name()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Conditionals of a state over (qubit, C), obtained by projecting the
    /// qubit onto each of the six polarizations.
    pub fn from_qubit_state(rho: &DensityOperator, qubit: &str) -> Result<Self> {
        let rho = rho.normalized()?;
        let mut set = Self::new();
        for pol in Polarization::ALL {
            let cond = rho.contract(&[qubit], &pol.ket())?;
            let p = cond.trace();
            let cond = if p > 0.0 { cond.normalized()? } else { cond };
            set.entries.insert(pol, (cond, p));
        }
        Ok(set)
    }

    /// Largest relative spread of the per-basis totals p_H + p_V, p_D + p_A, p_L + p_R.
    pub fn basis_total_spread(&self) -> f64 {
        let totals: Vec<f64> = [(Polarization::H, Polarization::V), (Polarization::D, Polarization::A), (Polarization::L, Polarization::R)]
            .iter()
            .filter_map(|(a, b)| Some(self.entries.get(a)?.1 + self.entries.get(b)?.1))
            .collect();
        let max = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
        if totals.len() < 2 || max <= 0.0 {
            0.0
        } else {
            (max - min) / max
        }
    }

    /// Probability-weighted conditional p·ρ.
    fn weighted(&self, pol: Polarization) -> Result<DMatrix<Complex64>> {
        let (rho, p) = self.get(pol)?;
        Ok(rho.matrix() * Complex64::new(*p, 0.0))
    }
}

/// Reassembled DV-CV operator and the trace distance removed by PSD projection.
#[derive(Clone, Debug)]
pub struct AssembledState {
    pub rho: DensityOperator,
    pub psd_projection_distance: f64,
}

/// Builds the two-mode operator over (qubit `qubit`, C) from the six
/// conditionals: diagonal blocks from H and V, off-diagonal block
/// ρ_HV = ½(D − A + iL − iR).
pub fn assemble_two_mode(set: &ConditionalTomogramSet, qubit: &str) -> Result<AssembledState> {
    let hh = set.weighted(Polarization::H)?;
    let vv = set.weighted(Polarization::V)?;
    let i = Complex64::new(0.0, 1.0);
    let hv = (set.weighted(Polarization::D)? - set.weighted(Polarization::A)? + set.weighted(Polarization::L)? * i
        - set.weighted(Polarization::R)? * i)
        * Complex64::new(0.5, 0.0);
    let spread = set.basis_total_spread();
    if spread > 0.05 {
        log::warn!("per-basis probability totals differ by {:.1}%", 100.0 * spread);
    }
    let d = hh.nrows();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(&hh);
    m.view_mut((d, d), (d, d)).copy_from(&vv);
    m.view_mut((0, d), (d, d)).copy_from(&hv);
    m.view_mut((d, 0), (d, d)).copy_from(&hv.adjoint());
    let t = m.trace().re;
    if !(t > 0.0) {
        return Err(Error::ZeroProbability);
    }
    let m = m / Complex64::new(t, 0.0);
    let (c_rho, _) = set.get(Polarization::H)?;
    let register = ModeRegister::single(qubit, 1)?.join(c_rho.register())?;
    let (vals, _) = linalg::hermitian_eigen(&m);
    if vals[0] >= -1e-6 {
        return Ok(AssembledState {
            rho: DensityOperator::new(register, m)?,
            psd_projection_distance: 0.0,
        });
    }
    let clipped = linalg::hermitian_map(&m, |x| x.max(0.0));
    let ct = clipped.trace().re;
    let projected = clipped / Complex64::new(ct, 0.0);
    let distance = 0.5 * linalg::hermitian_eigen(&(&projected - &m)).0.iter().map(|x| x.abs()).sum::<f64>();
    log::info!("assembled operator projected to PSD cone, clipped mass {:.3e}", 1.0 - 1.0 / ct);
    Ok(AssembledState {
        rho: DensityOperator::new(register, projected)?,
        psd_projection_distance: distance,
    })
}

/// Fidelity lower bound with (|H⟩|Θ₊⟩ − |V⟩|Θ₋⟩)/√2 from the H, V, D, A conditionals.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementBound {
    pub lower_bound: f64,
    /// Raw overlap ⟨Θ₊|Θ₋⟩ before orthogonalization.
    pub cat_overlap: Complex64,
    /// ½(ρ_HΘ₊ + ρ_VΘ₋), the diagonal part of the fidelity.
    pub diagonal: f64,
    /// ρ_DΘD + ρ_AΘA − ρ_DΘA − ρ_AΘD.
    pub coherence: f64,
    /// 2√(ρ_HΘ₋ ρ_VΘ₊), the bound on the unobserved cross terms.
    pub residual: f64,
}

impl EntanglementBound {
    /// Separable states cannot exceed 1/2; a roundoff margin keeps product
    /// states, which sit exactly on the threshold, uncertified.
    pub fn certifies_entanglement(&self) -> bool {
        self.lower_bound > 0.5 + 1e-9
    }
}

pub fn entanglement_bound(set: &ConditionalTomogramSet, basis: &CatBasis) -> Result<EntanglementBound> {
    let plus = basis.plus()?;
    let minus_raw = basis.minus()?;
    let overlap = plus.overlap(&minus_raw)?;
    let minus = minus_raw.add(&plus.scaled(-overlap))?.normalized()?;
    if plus.dim() != set.get(Polarization::H)?.0.dim() {
        return Err(Error::DimensionMismatch("cat basis and tomogram cutoffs differ".into()));
    }
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let theta_d = plus.scaled(s).add(&minus.scaled(s))?;
    let theta_a = plus.scaled(s).add(&minus.scaled(-s))?;

    let norm = |a: Polarization, b: Polarization| -> Result<f64> {
        let t = set.get(a)?.1 + set.get(b)?.1;
        if t > 0.0 {
            Ok(t)
        } else {
            Err(Error::ZeroProbability)
        }
    };
    let hv_total = norm(Polarization::H, Polarization::V)?;
    let da_total = norm(Polarization::D, Polarization::A)?;
    let element = |pol: Polarization, cat: &crate::fock::FockVector, total: f64| -> Result<f64> {
        let (rho, p) = set.get(pol)?;
        Ok(p / total * rho.expectation_pure(cat)?)
    };
    let h_plus = element(Polarization::H, &plus, hv_total)?;
    let h_minus = element(Polarization::H, &minus, hv_total)?;
    let v_plus = element(Polarization::V, &plus, hv_total)?;
    let v_minus = element(Polarization::V, &minus, hv_total)?;
    let coherence = element(Polarization::D, &theta_d, da_total)? + element(Polarization::A, &theta_a, da_total)?
        - element(Polarization::D, &theta_a, da_total)?
        - element(Polarization::A, &theta_d, da_total)?;
    let residual = 2.0 * (h_minus * v_plus).max(0.0).sqrt();
    let diagonal = 0.5 * (h_plus + v_minus);
    let lower_bound = diagonal - 0.5 * (coherence + residual);
    if lower_bound > 1.0 + 1e-6 {
        return Err(Error::NonPhysicalBound(lower_bound));
    }
    Ok(EntanglementBound {
        lower_bound,
        cat_overlap: overlap,
        diagonal,
        coherence,
        residual,
    })
}
