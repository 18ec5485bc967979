//! Linear-optical elements, photon loss, and the polarization measurements
//! used to herald states.
//!
//! A spatial mode `X` carrying polarization is represented by two rails
//! labeled `HX` and `VX`; the dual-rail qubit basis is |H⟩ = |1,0⟩ and
//! |V⟩ = |0,1⟩ on those rails.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockVector, ModeRegister, QuantumState};
use crate::linalg::{binomial, factorial};

/// Cutoff used for polarization rails: one photon plus overflow headroom.
pub const RAIL_CUTOFF: usize = 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn h_rail(mode: &str) -> String {
    format!("H{mode}")
}

pub fn v_rail(mode: &str) -> String {
    format!("V{mode}")
}

/// Phase convention of the two-mode beamsplitter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhaseConvention {
    /// Real orthogonal matrix, minus sign on the second output:
    /// â₁† → √T â₁† − √R â₂†, â₂† → √R â₁† + √T â₂†.
    #[default]
    RealOrthogonal,
    /// Symmetric splitter with an i on reflection.
    SymmetricImaginary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamsplitterSpec {
    /// Intensity reflectivity R in [0, 1].
    pub reflectivity: f64,
    pub modes: (String, String),
    pub convention: PhaseConvention,
}

impl BeamsplitterSpec {
    pub fn new(reflectivity: f64, first: &str, second: &str) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(Error::InvalidParameter(format!("reflectivity {reflectivity}")));
        }
        Ok(Self {
            reflectivity,
            modes: (first.to_string(), second.to_string()),
            convention: PhaseConvention::RealOrthogonal,
        })
    }

    pub fn with_convention(mut self, convention: PhaseConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Single-photon transfer matrix: column j holds the image of â_j†.
    pub fn mode_matrix(&self) -> [[Complex64; 2]; 2] {
        let t = Complex64::new((1.0 - self.reflectivity).sqrt(), 0.0);
        let r = self.reflectivity.sqrt();
        match self.convention {
            PhaseConvention::RealOrthogonal => [[t, Complex64::new(r, 0.0)], [Complex64::new(-r, 0.0), t]],
            PhaseConvention::SymmetricImaginary => [[t, Complex64::new(0.0, r)], [Complex64::new(0.0, r), t]],
        }
    }

    /// Fock-space unitary on two modes with a shared cutoff, ordered (first, second).
    ///
    /// Exactly unitary on the block with total photon number ≤ cutoff; higher
    /// blocks leak out of the truncated space.
    pub fn unitary(&self, cutoff: usize) -> DMatrix<Complex64> {
        let m = self.mode_matrix();
        let d = cutoff + 1;
        let mut u = DMatrix::zeros(d * d, d * d);
        for n in 0..d {
            for k in 0..d {
                let pref = 1.0 / (factorial(n) * factorial(k)).sqrt();
                // (m00 x + m10 y)^n (m01 x + m11 y)^k
                for i in 0..=n {
                    let ci = binomial(n, i) * pref;
                    let ti = m[0][0].powu(i as u32) * m[1][0].powu((n - i) as u32);
                    for j in 0..=k {
                        let (px, py) = (i + j, n - i + k - j);
                        if px > cutoff || py > cutoff {
                            continue;
                        }
                        let tj = m[0][1].powu(j as u32) * m[1][1].powu((k - j) as u32);
                        let c = ti * tj * (ci * binomial(k, j) * (factorial(px) * factorial(py)).sqrt());
                        u[(px * d + py, n * d + k)] += c;
                    }
                }
            }
        }
        u
    }
}

pub fn apply_beamsplitter<S: QuantumState>(state: &S, spec: &BeamsplitterSpec) -> Result<S> {
    let reg = state.register();
    let (a, b) = (&spec.modes.0, &spec.modes.1);
    let cutoff = reg.cutoff_of(a)?;
    if reg.cutoff_of(b)? != cutoff {
        return Err(Error::CutoffMismatch(a.clone(), b.clone()));
    }
    state.apply_matrix(&spec.unitary(cutoff), &[a, b])
}

/// Pure-loss channel of transmissivity η on one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct LossChannel {
    pub eta: f64,
    pub mode: String,
}

impl LossChannel {
    pub fn new(eta: f64, mode: &str) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("efficiency {eta}")));
        }
        Ok(Self {
            eta,
            mode: mode.to_string(),
        })
    }
}

/// Kraus operators A_k = √((1−η)^k/k!) η^{n̂/2} â^k, k = 0..=cutoff.
pub fn loss_kraus(eta: f64, cutoff: usize) -> Vec<DMatrix<Complex64>> {
    (0..=cutoff)
        .map(|k| {
            DMatrix::from_fn(cutoff + 1, cutoff + 1, |m, n| {
                if n >= k && m == n - k {
                    let amp = binomial(n, k).sqrt() * eta.powf(m as f64 / 2.0) * (1.0 - eta).powf(k as f64 / 2.0);
                    Complex64::new(amp, 0.0)
                } else {
                    ZERO
                }
            })
        })
        .collect()
}

pub fn apply_loss(rho: &DensityOperator, channel: &LossChannel) -> Result<DensityOperator> {
    let cutoff = rho.register().cutoff_of(&channel.mode)?;
    rho.apply_kraus(&loss_kraus(channel.eta, cutoff), &[&channel.mode])
}

/// Heisenberg-picture loss on a single-mode operator: Σ_k A_k† X A_k.
pub fn loss_adjoint(op: &DMatrix<Complex64>, eta: f64) -> DMatrix<Complex64> {
    let cutoff = op.nrows() - 1;
    let mut out = DMatrix::zeros(op.nrows(), op.ncols());
    for a in loss_kraus(eta, cutoff) {
        out += a.adjoint() * op * &a;
    }
    out
}

/// Named polarization states. Diagonal and circular states follow
/// |D⟩ = (|H⟩+|V⟩)/√2, |A⟩ = (|H⟩−|V⟩)/√2, |R⟩ = (|H⟩+i|V⟩)/√2, |L⟩ = (|H⟩−i|V⟩)/√2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
    D,
    A,
    L,
    R,
}

impl Polarization {
    pub const ALL: [Polarization; 6] = [
        Polarization::H,
        Polarization::V,
        Polarization::D,
        Polarization::A,
        Polarization::L,
        Polarization::R,
    ];

    pub fn coefficients(self) -> (Complex64, Complex64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Polarization::H => (ONE, ZERO),
            Polarization::V => (ZERO, ONE),
            Polarization::D => (Complex64::new(s, 0.0), Complex64::new(s, 0.0)),
            Polarization::A => (Complex64::new(s, 0.0), Complex64::new(-s, 0.0)),
            Polarization::R => (Complex64::new(s, 0.0), Complex64::new(0.0, s)),
            Polarization::L => (Complex64::new(s, 0.0), Complex64::new(0.0, -s)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarization::H => "H",
            Polarization::V => "V",
            Polarization::D => "D",
            Polarization::A => "A",
            Polarization::L => "L",
            Polarization::R => "R",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(s))
    }

    /// Qubit ket (H, V components).
    pub fn ket(self) -> DVector<Complex64> {
        let (a, b) = self.coefficients();
        DVector::from_vec(vec![a, b])
    }
}

/// Projection of spatial mode `mode` onto a|H⟩ + b|V⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationProjector {
    pub a: Complex64,
    pub b: Complex64,
    pub mode: String,
}

impl PolarizationProjector {
    /// Normalizes (a, b); a zero pair is rejected.
    pub fn new(a: Complex64, b: Complex64, mode: &str) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("polarization coefficients are zero".into()));
        }
        Ok(Self {
            a: a / n,
            b: b / n,
            mode: mode.to_string(),
        })
    }

    pub fn named(pol: Polarization, mode: &str) -> Self {
        let (a, b) = pol.coefficients();
        Self {
            a,
            b,
            mode: mode.to_string(),
        }
    }

    /// a|1,0⟩ + b|0,1⟩ on the rails of `mode` within `register`.
    pub fn rail_ket(&self, register: &ModeRegister) -> Result<DVector<Complex64>> {
        single_photon_ket(register, &self.mode, self.a, self.b)
    }
}

/// a|1,0⟩ + b|0,1⟩ on the (H, V) rails of `mode`.
pub fn single_photon_ket(register: &ModeRegister, mode: &str, a: Complex64, b: Complex64) -> Result<DVector<Complex64>> {
    let rails = ModeRegister::new([
        (h_rail(mode), register.cutoff_of(&h_rail(mode))?),
        (v_rail(mode), register.cutoff_of(&v_rail(mode))?),
    ])?;
    let mut ket = DVector::zeros(rails.dim());
    ket[rails.flatten(&[1, 0])?] = a;
    ket[rails.flatten(&[0, 1])?] = b;
    Ok(ket)
}

/// Projects the rails of `proj.mode` onto the single-photon polarization state.
/// Returns the unnormalized conditional state on the other modes and its
/// probability.
pub fn project_polarization<S: QuantumState>(state: &S, proj: &PolarizationProjector) -> Result<(S, f64)> {
    let ket = proj.rail_ket(state.register())?;
    let h = h_rail(&proj.mode);
    let v = v_rail(&proj.mode);
    let out = state.contract(&[&h, &v], &ket)?;
    let p = out.weight();
    Ok((out, p))
}

/// Bell-state projection ⟨Ψ⁻| = (⟨H|⟨V| − ⟨V|⟨H|)/√2 on spatial modes `a`, `b`.
pub fn project_bell_psi_minus<S: QuantumState>(state: &S, a: &str, b: &str) -> Result<(S, f64)> {
    let labels = [h_rail(a), v_rail(a), h_rail(b), v_rail(b)];
    let reg = state.register();
    let rails = ModeRegister::new(
        labels
            .iter()
            .map(|l| Ok((l.clone(), reg.cutoff_of(l)?)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut ket = DVector::zeros(rails.dim());
    ket[rails.flatten(&[1, 0, 0, 1])?] = Complex64::new(s, 0.0);
    ket[rails.flatten(&[0, 1, 1, 0])?] = Complex64::new(-s, 0.0);
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let out = state.contract(&refs, &ket)?;
    let p = out.weight();
    Ok((out, p))
}

/// Polarization-entangled pair on spatial modes `b`, `d`:
/// ρ = V|Ψ⁺⟩⟨Ψ⁺| + (1−V)(|HV⟩⟨HV| + |VH⟩⟨VH|)/2, with |Ψ⁺⟩ = (|HV⟩ + |VH⟩)/√2.
/// Rails are ordered (Hb, Vb, Hd, Vd).
pub fn bell_pair_psi_plus(visibility: f64, b: &str, d: &str) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidParameter(format!("visibility {visibility}")));
    }
    let reg = ModeRegister::new([
        (h_rail(b), RAIL_CUTOFF),
        (v_rail(b), RAIL_CUTOFF),
        (h_rail(d), RAIL_CUTOFF),
        (v_rail(d), RAIL_CUTOFF),
    ])?;
    let hv = FockVector::basis(reg.clone(), &[1, 0, 0, 1])?;
    let vh = FockVector::basis(reg, &[0, 1, 1, 0])?;
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi_plus = DensityOperator::from_pure(&hv.scaled(s).add(&vh.scaled(s))?);
    let hv = DensityOperator::from_pure(&hv);
    let vh = DensityOperator::from_pure(&vh);
    let dephased = (1.0 - visibility) / 2.0;
    DensityOperator::mixture(&[(visibility, &psi_plus), (dephased, &hv), (dephased, &vh)])
}

/// Joint probability of projecting mode `pb.mode` and mode `pd.mode` onto the
/// given polarizations.
pub fn coincidence_probability(rho: &DensityOperator, pb: &PolarizationProjector, pd: &PolarizationProjector) -> Result<f64> {
    let (after_b, _) = project_polarization(rho, pb)?;
    let (_, p) = project_polarization(&after_b, pd)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, fock, squeezed_vacuum, CV_MODE};
    use proptest::prelude::*;

    fn two_mode(cutoff: usize) -> ModeRegister {
        ModeRegister::new([("a", cutoff), ("b", cutoff)]).unwrap()
    }

    fn random_vector(reg: ModeRegister, seed: &[f64]) -> FockVector {
        let amps: Vec<Complex64> = (0..reg.dim())
            .map(|i| {
                let x = seed[i % seed.len()] + i as f64 * 0.37;
                Complex64::new(x.sin(), (1.3 * x).cos())
            })
            .collect();
        FockVector::from_amps(reg, &amps).unwrap().normalized().unwrap()
    }

    fn random_density(reg: ModeRegister, seed: &[f64]) -> DensityOperator {
        let a = random_vector(reg.clone(), seed);
        let shifted: Vec<f64> = seed.iter().map(|x| x * 1.7 + 0.3).collect();
        let b = random_vector(reg, &shifted);
        DensityOperator::mixture(&[(0.6, &DensityOperator::from_pure(&a)), (0.4, &DensityOperator::from_pure(&b))]).unwrap()
    }

    #[test]
    fn beamsplitter_extremes() {
        let reg = two_mode(3);
        let psi = random_vector(reg, &[0.1, 0.9, 2.0]);
        let id = apply_beamsplitter(&psi, &BeamsplitterSpec::new(0.0, "a", "b").unwrap()).unwrap();
        assert!((id.amps() - psi.amps()).norm() < 1e-14);

        let one = FockVector::basis(two_mode(3), &[2, 1]).unwrap();
        let swapped = apply_beamsplitter(&one, &BeamsplitterSpec::new(1.0, "a", "b").unwrap()).unwrap();
        assert!((swapped.amp(&[1, 2]).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn balanced_single_photon() {
        let one = FockVector::basis(two_mode(2), &[1, 0]).unwrap();
        let out = apply_beamsplitter(&one, &BeamsplitterSpec::new(0.5, "a", "b").unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amp(&[1, 0]).unwrap() - Complex64::new(s, 0.0)).norm() < 1e-14);
        assert!((out.amp(&[0, 1]).unwrap() - Complex64::new(-s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hong_ou_mandel_dip() {
        for conv in [PhaseConvention::RealOrthogonal, PhaseConvention::SymmetricImaginary] {
            let pair = FockVector::basis(two_mode(2), &[1, 1]).unwrap();
            let spec = BeamsplitterSpec::new(0.5, "a", "b").unwrap().with_convention(conv);
            let out = apply_beamsplitter(&pair, &spec).unwrap();
            assert!(out.amp(&[1, 1]).unwrap().norm() < 1e-14);
            assert!((out.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unitary_on_low_photon_block() {
        let cutoff = 4;
        let spec = BeamsplitterSpec::new(0.3, "a", "b").unwrap().with_convention(PhaseConvention::SymmetricImaginary);
        let u = spec.unitary(cutoff);
        let d = cutoff + 1;
        let low: Vec<usize> = (0..d * d).filter(|i| i / d + i % d <= cutoff).collect();
        for &i in &low {
            for &j in &low {
                let g: Complex64 = (0..d * d).map(|k| u[(k, i)].conj() * u[(k, j)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn beamsplitter_rejects_cutoff_mismatch() {
        let reg = ModeRegister::new([("a", 2), ("b", 3)]).unwrap();
        let psi = FockVector::basis(reg, &[0, 0]).unwrap();
        assert!(matches!(
            apply_beamsplitter(&psi, &BeamsplitterSpec::new(0.1, "a", "b").unwrap()),
            Err(Error::CutoffMismatch(..))
        ));
    }

    #[test]
    fn loss_on_single_photon() {
        let rho = DensityOperator::from_pure(&fock(1, 3).unwrap());
        let out = apply_loss(&rho, &LossChannel::new(0.55, CV_MODE).unwrap()).unwrap();
        assert!((out.element(&[1], &[1]).unwrap().re - 0.55).abs() < 1e-15);
        assert!((out.element(&[0], &[0]).unwrap().re - 0.45).abs() < 1e-15);
        let same = apply_loss(&rho, &LossChannel::new(1.0, CV_MODE).unwrap()).unwrap();
        assert_eq!(same.matrix(), rho.matrix());
    }

    #[test]
    fn kraus_completeness() {
        for eta in [0.0, 0.3, 0.55, 1.0] {
            let ks = loss_kraus(eta, 10);
            let sum = ks.iter().fold(DMatrix::<Complex64>::zeros(11, 11), |acc, k| acc + k.adjoint() * k);
            assert!((sum - DMatrix::identity(11, 11)).norm() < 1e-12);
        }
    }

    #[test]
    fn loss_adjoint_is_dual() {
        let rho = random_density(ModeRegister::single(CV_MODE, 6).unwrap(), &[0.2, 1.1]);
        let obs = crate::fock::number_matrix(6) + crate::fock::annihilation_matrix(6);
        let lhs = apply_loss(&rho, &LossChannel::new(0.4, CV_MODE).unwrap()).unwrap().expectation(&obs).unwrap();
        let rhs = rho.expectation(&loss_adjoint(&obs, 0.4)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn projectors_on_basis_states() {
        let reg = ModeRegister::new([("HA", 2), ("VA", 2)]).unwrap();
        let h = FockVector::basis(reg, &[1, 0]).unwrap();
        let (_, p) = project_polarization(&h, &PolarizationProjector::named(Polarization::H, "A")).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        let (_, p) = project_polarization(&h, &PolarizationProjector::named(Polarization::V, "A")).unwrap();
        assert_eq!(p, 0.0);
        let (_, p) = project_polarization(&h, &PolarizationProjector::named(Polarization::D, "A")).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    fn bell_input(sign: f64) -> FockVector {
        let reg = ModeRegister::new([("HA", 2), ("VA", 2), ("HB", 2), ("VB", 2)]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let hv = FockVector::basis(reg.clone(), &[1, 0, 0, 1]).unwrap();
        let vh = FockVector::basis(reg, &[0, 1, 1, 0]).unwrap();
        let pair = hv.scaled(Complex64::new(s, 0.0)).add(&vh.scaled(Complex64::new(sign * s, 0.0))).unwrap();
        pair.tensor(&coherent(Complex64::new(0.3, 0.1), 8).unwrap()).unwrap()
    }

    #[test]
    fn bell_projection_selects_psi_minus() {
        let (out, p) = project_bell_psi_minus(&bell_input(-1.0), "A", "B").unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let phi = coherent(Complex64::new(0.3, 0.1), 8).unwrap();
        assert!((out.overlap(&phi).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        let (_, p) = project_bell_psi_minus(&bell_input(1.0), "A", "B").unwrap();
        assert!(p < 1e-15);
    }

    #[test]
    fn bell_pair_visibility() {
        for v in [1.0, 0.97, 0.0] {
            let rho = bell_pair_psi_plus(v, "B", "D").unwrap();
            assert!(rho.is_physical());
            let pb = PolarizationProjector::named(Polarization::D, "B");
            let probs: Vec<f64> = (0..=180)
                .map(|deg| {
                    let th = (deg as f64).to_radians();
                    let pd = PolarizationProjector::new(Complex64::new(th.cos(), 0.0), Complex64::new(th.sin(), 0.0), "D").unwrap();
                    coincidence_probability(&rho, &pb, &pd).unwrap()
                })
                .collect();
            let max = probs.iter().cloned().fold(f64::MIN, f64::max);
            let min = probs.iter().cloned().fold(f64::MAX, f64::min);
            let visibility = (max - min) / (max + min);
            assert!((visibility - v).abs() < 1e-9, "{v}: {visibility}");
        }
    }

    #[test]
    fn tap_on_squeezed_vacuum_keeps_norm() {
        let sv = squeezed_vacuum(0.18, 14).unwrap();
        let vac = FockVector::basis(ModeRegister::single("VA", 14).unwrap(), &[0]).unwrap();
        let joint = vac.tensor(&sv).unwrap();
        let out = apply_beamsplitter(&joint, &BeamsplitterSpec::new(0.1, "VA", CV_MODE).unwrap()).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn beamsplitter_conserves_pair_photon_number(seed in prop::collection::vec(-3.0f64..3.0, 4), refl in 0.0f64..1.0) {
            let cutoff = 3;
            let reg = two_mode(cutoff);
            let psi = random_vector(reg.clone(), &seed);
            let spec = BeamsplitterSpec::new(refl, "a", "b").unwrap();
            let u = spec.unitary(cutoff);
            let n_total = DMatrix::from_fn(reg.dim(), reg.dim(), |i, j| {
                if i == j { Complex64::new((i / (cutoff + 1) + i % (cutoff + 1)) as f64, 0.0) } else { ZERO }
            });
            let comm = &u * &n_total - &n_total * &u;
            prop_assert!(comm.norm() < 1e-10);
            // norm is kept for inputs inside the closed block
            let low = psi.amps().map_with_location(|i, _, a| if i / (cutoff + 1) + i % (cutoff + 1) <= cutoff { a } else { ZERO });
            let low = FockVector::new(reg, low).unwrap();
            let out = apply_beamsplitter(&low, &spec).unwrap();
            prop_assert!((out.norm_sqr() - low.norm_sqr()).abs() < 1e-12);
        }

        #[test]
        fn loss_composes(seed in prop::collection::vec(-3.0f64..3.0, 3), e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
            let rho = random_density(ModeRegister::new([("x", 1), (CV_MODE, 6)]).unwrap(), &seed);
            let twice = apply_loss(&apply_loss(&rho, &LossChannel::new(e1, CV_MODE).unwrap()).unwrap(), &LossChannel::new(e2, CV_MODE).unwrap()).unwrap();
            let once = apply_loss(&rho, &LossChannel::new(e1 * e2, CV_MODE).unwrap()).unwrap();
            prop_assert!((twice.matrix() - once.matrix()).norm() < 1e-9);
            prop_assert!((once.trace() - rho.trace()).abs() < 1e-10);
        }

        #[test]
        fn loss_scales_mean_photon_number(seed in prop::collection::vec(-3.0f64..3.0, 3), eta in 0.0f64..1.0) {
            let rho = random_density(ModeRegister::single(CV_MODE, 8).unwrap(), &seed);
            let out = apply_loss(&rho, &LossChannel::new(eta, CV_MODE).unwrap()).unwrap();
            prop_assert!((out.mean_photon_number(CV_MODE).unwrap() - eta * rho.mean_photon_number(CV_MODE).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn projection_probability_bounds(seed in prop::collection::vec(-3.0f64..3.0, 4), th in 0.0f64..3.2, ph in 0.0f64..6.3) {
            let reg = ModeRegister::new([("HA", 2), ("VA", 2), ("HB", 1), ("VB", 1)]).unwrap();
            let psi = random_vector(reg, &seed);
            let proj = PolarizationProjector::new(Complex64::new(th.cos(), 0.0), Complex64::from_polar(th.sin(), ph), "A").unwrap();
            let (out, p) = project_polarization(&psi, &proj).unwrap();
            prop_assert!((0.0..=1.0 + 1e-10).contains(&p));
            prop_assert!((out.norm_sqr() - p).abs() < 1e-14);
            let (out, p) = project_bell_psi_minus(&psi.to_density(), "A", "B").unwrap();
            prop_assert!((0.0..=1.0 + 1e-10).contains(&p));
            prop_assert!((out.trace() - p).abs() < 1e-14);
        }
    }
}
