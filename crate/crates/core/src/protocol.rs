//! End-to-end pipelines: preparation of the hybrid state |Ω⟩ from squeezed
//! vacuum and a weak coherent state, remote state preparation, teleportation
//! of a polarization qubit onto the cat-state qubit, and entanglement swapping.
//!
//! Everything is simulated exactly in the truncated Fock space; the
//! first-order closed forms (α|H⟩|Θ₊⟩ + β|V⟩|Θ₋⟩ and friends) are available
//! from [`CatBasis`] and [`BranchAmplitudes`] for comparison.
//!
//! Mode layout: the tap output and coherent input share spatial mode A with
//! rails `HA`, `VA`; the cat-state mode is `C`. Teleportation adds the source
//! photon in rails `HB`, `VB`; swapping uses a pair on `HB`, `VB`, `HD`, `VD`.
//! Qubit-valued outputs carry the polarization as a two-level mode (`A` or
//! `D`, level 0 = H, level 1 = V) placed before `C`.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{fit_cat_amplitude, fidelity_with_pure};
use crate::channels::{
    apply_beamsplitter, h_rail, project_bell_psi_minus, project_polarization, single_photon_ket, v_rail,
    BeamsplitterSpec, PhaseConvention, PolarizationProjector, RAIL_CUTOFF,
};
use crate::error::{Error, Result};
use crate::fock::{
    cat_state, coherent, squeezed_vacuum, vacuum, DensityOperator, FockVector, ModeRegister, Parity, QuantumState,
    CV_MODE, TRUNCATION_LIMIT,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Physical parameters of the hybrid-entanglement source and the
/// teleportation model.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolParams {
    /// Squeezing parameter of the initial squeezed vacuum.
    pub squeeze_r: f64,
    /// Intensity reflectivity of the tap beamsplitter.
    pub r_tap: f64,
    /// Target |β/α|; the coherent amplitude is solved from it.
    pub beta_over_alpha: f64,
    /// Explicit coherent amplitude; overrides `beta_over_alpha` when set.
    pub alpha_in: Option<Complex64>,
    /// Relative phase added on top of the lock that makes α and β co-phased.
    pub lock_phase: f64,
    /// Cat amplitudes of the target states used for Bloch-sphere comparisons.
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Fringe visibility of the polarization-entangled pair.
    pub visibility: f64,
    /// p_dB / p_good for input |H⟩.
    pub ratio_pdb_pgood_at_h: f64,
    pub eta_homodyne: f64,
    pub cutoff_cv: usize,
    pub convention: PhaseConvention,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            squeeze_r: 0.18,
            r_tap: 0.1,
            beta_over_alpha: 0.6,
            alpha_in: None,
            lock_phase: 0.0,
            gamma_plus: 0.45,
            gamma_minus: 0.90,
            visibility: 0.97,
            ratio_pdb_pgood_at_h: 1.0,
            eta_homodyne: 0.55,
            cutoff_cv: 14,
            convention: PhaseConvention::RealOrthogonal,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("R_tap", self.r_tap)?;
        unit("visibility", self.visibility)?;
        unit("eta_homodyne", self.eta_homodyne)?;
        if !(self.squeeze_r >= 0.0) {
            return Err(Error::InvalidParameter(format!("squeeze_r = {}", self.squeeze_r)));
        }
        if !(self.beta_over_alpha > 0.0 && self.beta_over_alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta_over_alpha = {}", self.beta_over_alpha)));
        }
        if !(self.ratio_pdb_pgood_at_h >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ratio_pdb_pgood_at_H = {}",
                self.ratio_pdb_pgood_at_h
            )));
        }
        if !(self.gamma_plus >= 0.0 && self.gamma_minus > 0.0) {
            return Err(Error::InvalidParameter("cat amplitudes must be positive".into()));
        }
        if self.cutoff_cv < 2 {
            return Err(Error::InvalidParameter(format!("cutoff_cv = {}", self.cutoff_cv)));
        }
        Ok(())
    }

    /// Heralding-arm amplitude from the first-order expansion, √R·N₊/N₋ with γ₊ = √r.
    pub fn beta_first_order(&self) -> f64 {
        let g2 = self.squeeze_r;
        let n_plus = 1.0 / (2.0 + 2.0 * (-2.0 * g2).exp()).sqrt();
        let n_minus = 1.0 / (2.0 - 2.0 * (-2.0 * g2).exp()).sqrt();
        self.r_tap.sqrt() * n_plus / n_minus
    }

    pub fn target_basis(&self) -> CatBasis {
        CatBasis {
            gamma_plus: self.gamma_plus,
            gamma_minus: self.gamma_minus,
            cutoff: self.cutoff_cv,
        }
    }
}

/// The pair {|Θ₊(γ₊)⟩, |Θ₋(γ₋)⟩} used as the CV qubit basis. The two states
/// are orthogonal for any amplitudes because their photon-number parities differ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatBasis {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub cutoff: usize,
}

impl CatBasis {
    pub fn plus(&self) -> Result<FockVector> {
        cat_state(self.gamma_plus, Parity::Even, self.cutoff)
    }

    pub fn minus(&self) -> Result<FockVector> {
        cat_state(self.gamma_minus, Parity::Odd, self.cutoff)
    }

    /// c₊|Θ₊⟩ + c₋|Θ₋⟩ (unnormalized).
    pub fn combine(&self, c_plus: Complex64, c_minus: Complex64) -> Result<FockVector> {
        self.plus()?.scaled(c_plus).add(&self.minus()?.scaled(c_minus))
    }
}

/// First-order branch amplitudes of |Ω⟩: α on |H⟩|Θ₊⟩ and β on |V⟩|Θ₋⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchAmplitudes {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub basis: CatBasis,
}

impl BranchAmplitudes {
    pub fn ratio(&self) -> f64 {
        self.beta.norm() / self.alpha.norm()
    }

    /// a*α|Θ₊⟩ + b*β|Θ₋⟩ for a projection of mode A onto a|H⟩ + b|V⟩.
    pub fn remote_prep_target(&self, a: Complex64, b: Complex64) -> Result<FockVector> {
        self.basis.combine(a.conj() * self.alpha, b.conj() * self.beta)
    }

    /// (aβ|Θ₋⟩ − bα|Θ₊⟩)/√2 for input a|H⟩ + b|V⟩.
    pub fn teleport_target(&self, a: Complex64, b: Complex64) -> Result<FockVector> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.basis.combine(-b * self.alpha * s, a * self.beta * s)
    }

    /// α|H⟩|Θ₊⟩ + β|V⟩|Θ₋⟩ over (qubit `A`, `C`).
    pub fn resource_target(&self) -> Result<FockVector> {
        qubit_cat_state("A", self.alpha, self.basis.plus()?, self.beta, self.basis.minus()?)
    }

    /// α|H⟩|Θ₊⟩ − β|V⟩|Θ₋⟩ over (qubit `D`, `C`).
    pub fn swap_target(&self) -> Result<FockVector> {
        qubit_cat_state("D", self.alpha, self.basis.plus()?, -self.beta, self.basis.minus()?)
    }
}

/// c_H|H⟩|φ_H⟩ + c_V|V⟩|φ_V⟩ with the qubit as a two-level mode before `C`.
fn qubit_cat_state(qubit: &str, c_h: Complex64, phi_h: FockVector, c_v: Complex64, phi_v: FockVector) -> Result<FockVector> {
    let reg = ModeRegister::single(qubit, 1)?;
    let h = FockVector::basis(reg.clone(), &[0])?.tensor(&phi_h)?;
    let v = FockVector::basis(reg, &[1])?.tensor(&phi_v)?;
    h.scaled(c_h).add(&v.scaled(c_v))
}

/// (|H⟩|Θ₊⟩ + |V⟩|Θ₋⟩)/√2 over (qubit `A`, `C`).
pub fn max_entangled_resource(basis: &CatBasis) -> Result<FockVector> {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    qubit_cat_state("A", s, basis.plus()?, s, basis.minus()?)
}

/// (|H⟩|Θ₊⟩ − |V⟩|Θ₋⟩)/√2 over (qubit `D`, `C`).
pub fn max_entangled_swap(basis: &CatBasis) -> Result<FockVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    qubit_cat_state("D", Complex64::new(s, 0.0), basis.plus()?, Complex64::new(-s, 0.0), basis.minus()?)
}

/// Which pipeline produced a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Exact simulation of squeezed vacuum, tap and coherent injection.
    Omega,
    /// First-order expression built directly from cat states.
    ClosedForm,
}

/// |Ω⟩ over rails (`HA`, `VA`) and mode `C`, with its branch amplitudes and
/// the C-mode state left when mode A is empty.
#[derive(Clone, Debug)]
pub struct HybridState {
    pub state: FockVector,
    pub provenance: Provenance,
    pub amplitudes: BranchAmplitudes,
    /// Coherent amplitude injected into `HA`.
    pub alpha_in: Complex64,
    /// Normalized state of `C` conditioned on vacuum in mode A.
    pub vacuum_branch: FockVector,
    /// Weight of three-or-more-photon rail terms left out of `state`.
    pub rail_overflow: f64,
}

fn rail_register(cutoff_c: usize) -> Result<ModeRegister> {
    ModeRegister::new([("HA", RAIL_CUTOFF), ("VA", RAIL_CUTOFF), (CV_MODE, cutoff_c)])
}

fn vac_ket(n: usize) -> DVector<Complex64> {
    let mut k = DVector::zeros(RAIL_CUTOFF + 1);
    k[n] = ONE;
    k
}

/// Exact preparation of |Ω⟩: squeezed vacuum in `C`, a tap of reflectivity
/// R_tap into rail `VA`, and a coherent state in rail `HA`.
pub fn prepare_omega(params: &ProtocolParams) -> Result<HybridState> {
    params.validate()?;
    let cutoff = params.cutoff_cv;
    let sv = squeezed_vacuum(params.squeeze_r, cutoff)?;
    let tap_in = vacuum(ModeRegister::single("VA", cutoff)?).tensor(&sv)?;
    let tap = BeamsplitterSpec::new(params.r_tap, CV_MODE, "VA")?.with_convention(params.convention);
    let tapped = apply_beamsplitter(&tap_in, &tap)?;
    if (tapped.norm_sqr() - 1.0).abs() > TRUNCATION_LIMIT {
        return Err(Error::CutoffTooSmall {
            discarded: (1.0 - tapped.norm_sqr()).abs(),
            limit: TRUNCATION_LIMIT,
        });
    }
    // like HA below, three or more photons in VA can never pass a
    // single-photon herald; the rail keeps exact amplitudes up to two
    let (tapped, tap_overflow) = tapped.truncate("VA", RAIL_CUTOFF)?;

    let no_tap = tapped.contract(&["VA"], &vac_ket(0))?;
    let one_tap = tapped.contract(&["VA"], &vac_ket(1))?;

    // fit the cat basis to the two heralded branches
    let gamma_plus = fit_cat_amplitude(&no_tap.to_density(), Parity::Even)?.gamma;
    let gamma_minus = if one_tap.norm_sqr() > 0.0 {
        fit_cat_amplitude(&one_tap.to_density(), Parity::Odd)?.gamma
    } else {
        params.gamma_minus
    };
    let basis = CatBasis {
        gamma_plus,
        gamma_minus,
        cutoff,
    };
    let c_plus = basis.plus()?.overlap(&no_tap)?;
    let c_minus = basis.minus()?.overlap(&one_tap)?;

    let alpha_in = match params.alpha_in {
        Some(a) => a,
        None => {
            let n0 = no_tap.norm_sqr().sqrt();
            let n1 = one_tap.norm_sqr().sqrt();
            let magnitude = n1 / (params.beta_over_alpha * n0);
            // lock: α and β share a phase unless `lock_phase` offsets it
            let phase = if n1 > 0.0 { c_minus.arg() - c_plus.arg() } else { 0.0 };
            Complex64::from_polar(magnitude, phase + params.lock_phase)
        }
    };
    // three or more photons in HA never reach a single-photon herald, so the
    // rail keeps the exact low-number amplitudes without renormalizing
    let (coh, coh_overflow) = coherent(alpha_in, 12)?.relabel(&["HA"])?.truncate("HA", RAIL_CUTOFF)?;
    let rail_overflow = 1.0 - (1.0 - tap_overflow) * (1.0 - coh_overflow);
    log::debug!("{rail_overflow:.3e} of norm above the rail cutoff");
    let state = coh.tensor(&tapped)?;
    debug_assert_eq!(state.register(), &rail_register(cutoff)?);

    let env = (-alpha_in.norm_sqr() / 2.0).exp();
    let amplitudes = BranchAmplitudes {
        alpha: env * alpha_in * c_plus,
        beta: env * c_minus,
        basis,
    };
    Ok(HybridState {
        state,
        provenance: Provenance::Omega,
        amplitudes,
        alpha_in,
        vacuum_branch: no_tap.normalized()?,
        rail_overflow,
    })
}

/// |0⟩_A|Θ₊⟩ + α|H⟩|Θ₊⟩ + β|V⟩|Θ₋⟩, normalized, built directly from cat states.
pub fn closed_form_omega(alpha: Complex64, beta: Complex64, basis: CatBasis) -> Result<HybridState> {
    let reg = rail_register(basis.cutoff)?;
    let rails = ModeRegister::new([("HA", RAIL_CUTOFF), ("VA", RAIL_CUTOFF)])?;
    let plus = basis.plus()?;
    let minus = basis.minus()?;
    let vac = FockVector::basis(rails.clone(), &[0, 0])?.tensor(&plus)?;
    let h = FockVector::basis(rails.clone(), &[1, 0])?.tensor(&plus)?.scaled(alpha);
    let v = FockVector::basis(rails, &[0, 1])?.tensor(&minus)?.scaled(beta);
    let raw = vac.add(&h)?.add(&v)?;
    let norm = raw.norm_sqr().sqrt();
    let state = raw.normalized()?;
    debug_assert_eq!(state.register(), &reg);
    Ok(HybridState {
        state,
        provenance: Provenance::ClosedForm,
        amplitudes: BranchAmplitudes {
            alpha: alpha / norm,
            beta: beta / norm,
            basis,
        },
        alpha_in: alpha,
        vacuum_branch: plus,
        rail_overflow: 0.0,
    })
}

fn qubit_kets() -> Result<[DVector<Complex64>; 2]> {
    let reg = ModeRegister::new([("HA", RAIL_CUTOFF), ("VA", RAIL_CUTOFF)])?;
    Ok([
        single_photon_ket(&reg, "A", ONE, ZERO)?,
        single_photon_ket(&reg, "A", ZERO, ONE)?,
    ])
}

/// Single-photon component of mode A as a normalized operator over (qubit `A`, `C`).
pub fn extract_resource(omega: &HybridState) -> Result<DensityOperator> {
    let kets = qubit_kets()?;
    let compressed = omega.state.compress(&["HA", "VA"], &kets, "A")?;
    if compressed.norm_sqr() == 0.0 {
        return Err(Error::ZeroProbability);
    }
    compressed.to_density().normalized()
}

/// Projects mode A onto a|H⟩ + b|V⟩; returns the normalized C state and the heralding probability.
pub fn remote_state_prep(omega: &HybridState, proj: &PolarizationProjector) -> Result<(DensityOperator, f64)> {
    let (out, p) = project_polarization(&omega.state, proj)?;
    if p <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok((out.to_density().normalized()?, p))
}

/// Source photon a|H⟩ + b|V⟩ in rails (`HB`, `VB`).
pub fn source_photon(a: Complex64, b: Complex64) -> Result<FockVector> {
    let reg = ModeRegister::new([("HB", RAIL_CUTOFF), ("VB", RAIL_CUTOFF)])?;
    let amps = single_photon_ket(&reg, "B", a, b)?;
    FockVector::new(reg, amps)
}

/// Unnormalized C state after the ⟨Ψ⁻|_AB projection of |Ω⟩ ⊗ (a|H⟩ + b|V⟩)_B.
pub fn teleport_unnormalized(omega: &HybridState, a: Complex64, b: Complex64) -> Result<FockVector> {
    let joint = omega.state.tensor(&source_photon(a, b)?)?;
    Ok(project_bell_psi_minus(&joint, "A", "B")?.0)
}

/// Ideal teleportation: normalized output on `C` and the Bell-detection probability.
pub fn teleport_ideal(omega: &HybridState, a: Complex64, b: Complex64) -> Result<(DensityOperator, f64)> {
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("input qubit norm {n}")));
    }
    let out = teleport_unnormalized(omega, a, b)?;
    let p = out.norm_sqr();
    if p <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok((out.to_density().normalized()?, p))
}

/// Mixture weights of the realistic teleportation output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TeleportWeights {
    pub p_good: f64,
    pub p_double_b: f64,
}

impl TeleportWeights {
    pub fn good_fraction(&self) -> f64 {
        self.p_good / (self.p_good + self.p_double_b)
    }
}

/// Teleportation with false-positive double-B Bell detections. p_dB does not
/// depend on the input and is calibrated as `ratio_pdb_pgood_at_h` times
/// p_good for input |H⟩; those events leave `C` in the vacuum-branch state.
pub fn teleport_realistic(
    omega: &HybridState,
    a: Complex64,
    b: Complex64,
    params: &ProtocolParams,
) -> Result<(DensityOperator, TeleportWeights)> {
    let p_good_h = teleport_unnormalized(omega, ONE, ZERO)?.norm_sqr();
    teleport_with_calibration(omega, a, b, params.ratio_pdb_pgood_at_h * p_good_h)
}

pub(crate) fn teleport_with_calibration(
    omega: &HybridState,
    a: Complex64,
    b: Complex64,
    p_double_b: f64,
) -> Result<(DensityOperator, TeleportWeights)> {
    if !(p_double_b >= 0.0) {
        return Err(Error::InvalidParameter(format!("p_dB = {p_double_b}")));
    }
    let phi = teleport_unnormalized(omega, a, b)?;
    let weights = TeleportWeights {
        p_good: phi.norm_sqr(),
        p_double_b,
    };
    let total = weights.p_good + weights.p_double_b;
    if total <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let dbl = DensityOperator::from_pure(&omega.vacuum_branch);
    let rho = if weights.p_good > 0.0 {
        let good = phi.to_density().normalized()?;
        DensityOperator::mixture(&[(weights.p_good / total, &good), (weights.p_double_b / total, &dbl)])?
    } else {
        dbl
    };
    Ok((rho, weights))
}

/// Entanglement swapping: ⟨Ψ⁻|_AB on |Ω⟩_AC ⊗ ρ_BD. Returns the normalized
/// operator over (qubit `D`, `C`) and the Bell-detection probability.
///
/// The pair is decomposed into its eigen-ensemble so that only pure states
/// of the full seven-mode register are ever formed.
pub fn entanglement_swap(omega: &HybridState, bell_pair: &DensityOperator) -> Result<(DensityOperator, f64)> {
    let expected = ["HB", "VB", "HD", "VD"];
    if bell_pair.register().labels().ne(expected.iter().copied()) {
        return Err(Error::DimensionMismatch(format!(
            "pair must be over rails {expected:?}, got {:?}",
            bell_pair.register()
        )));
    }
    let d_reg = ModeRegister::new([(h_rail("D"), bell_pair.register().cutoff(2)), (v_rail("D"), bell_pair.register().cutoff(3))])?;
    let kets = [
        single_photon_ket(&d_reg, "D", ONE, ZERO)?,
        single_photon_ket(&d_reg, "D", ZERO, ONE)?,
    ];
    let parts: Vec<DensityOperator> = bell_pair
        .pure_ensemble(1e-14)
        .into_par_iter()
        .map(|(w, pair)| -> Result<DensityOperator> {
            let joint = omega.state.tensor(&pair)?;
            let (projected, _) = project_bell_psi_minus(&joint, "A", "B")?;
            let out = projected.compress(&["HD", "VD"], &kets, "D")?;
            Ok(DensityOperator::from_pure(&out).scaled(w))
        })
        .collect::<Result<_>>()?;
    let weighted: Vec<(f64, &DensityOperator)> = parts.iter().map(|p| (1.0, p)).collect();
    let total = DensityOperator::mixture(&weighted)?;
    let p = total.trace();
    if p <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok((total.normalized()?, p))
}

/// Fidelity of each normalized remote-preparation output with its first-order target.
pub fn remote_prep_fidelity(omega: &HybridState, proj: &PolarizationProjector) -> Result<f64> {
    let (rho, _) = remote_state_prep(omega, proj)?;
    let target = omega.amplitudes.remote_prep_target(proj.a, proj.b)?;
    fidelity_with_pure(&rho, &target)
}
