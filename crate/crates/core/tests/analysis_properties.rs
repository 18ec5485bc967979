use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use dvcv_core::analysis::{
    assemble_two_mode, entanglement_bound, fidelity, fidelity_pure, fit_cat_amplitude, rates, AnalysisReport,
    ConditionalTomogramSet, RateParams,
};
use dvcv_core::fock::{cat_state, coherent, squeezed_vacuum, DensityOperator, FockVector, ModeRegister, Parity};
use dvcv_core::protocol::{max_entangled_swap, CatBasis};

fn ginibre(re: &[f64], im: &[f64], rows: usize) -> DMatrix<Complex64> {
    let cols = re.len() / rows;
    DMatrix::from_fn(rows, cols, |i, j| Complex64::new(re[i * cols + j], im[i * cols + j]))
}

fn dvcv_state(re: &[f64], im: &[f64]) -> DensityOperator {
    let g = ginibre(re, im, 10);
    let reg = ModeRegister::new([("D", 1), ("C", 4)]).unwrap();
    DensityOperator::new(reg, &g * g.adjoint()).unwrap().normalized().unwrap()
}

#[test]
fn squeezed_vacuum_is_close_to_even_cat() {
    let sv = squeezed_vacuum(0.18, 14).unwrap();
    let cat = cat_state(0.45, Parity::Even, 14).unwrap();
    assert!(fidelity_pure(&sv, &cat).unwrap() >= 0.995);
    let fit = fit_cat_amplitude(&DensityOperator::from_pure(&sv), Parity::Even).unwrap();
    assert!(fit.fidelity >= fidelity_pure(&sv, &cat).unwrap());
}

#[test]
fn rate_model_matches_quoted_figures() {
    let r = rates(&RateParams::default()).unwrap();
    assert_eq!(format!("{:.0e}", r.p_db), "4e-11");
    let v = rates(&RateParams {
        a: Complex64::new(0.0, 0.0),
        b: Complex64::new(1.0, 0.0),
        ..Default::default()
    })
    .unwrap();
    assert!((v.p_good - 1.246e-10).abs() < 1e-13);
    assert!((r.triple_rate_hz - 76e6 * (r.p_good + r.p_db)).abs() < 1e-18);
}

#[test]
fn report_serializes_with_fixed_keys() {
    let report = AnalysisReport {
        rates: Some(rates(&RateParams::default()).unwrap()),
        mean_bloch_fidelity: Some(0.85),
        ..Default::default()
    };
    let v: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["entanglement_bound", "fidelities", "mean_bloch_fidelity", "rates"]);
    assert!(v["rates"]["p_db"].is_number());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pure_fidelity_agrees_with_uhlmann(re1 in -1.0f64..1.0, im1 in -1.0f64..1.0, re2 in -1.0f64..1.0, im2 in -1.0f64..1.0) {
        let a = coherent(Complex64::new(re1, im1), 16).unwrap();
        let b = coherent(Complex64::new(re2, im2), 16).unwrap();
        let via_rho = fidelity(&DensityOperator::from_pure(&a), &DensityOperator::from_pure(&b)).unwrap();
        prop_assert!((via_rho - a.overlap(&b).unwrap().norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric(re in proptest::collection::vec(-1.0f64..1.0, 20), im in proptest::collection::vec(-1.0f64..1.0, 20)) {
        let g = ginibre(&re, &im, 5);
        let reg = ModeRegister::single("C", 4).unwrap();
        let r1 = DensityOperator::new(reg.clone(), &g * g.adjoint()).unwrap().normalized().unwrap();
        let h = g.map(|z| z.conj()).transpose();
        let r2 = DensityOperator::new(reg, h.adjoint() * &h).unwrap().normalized().unwrap();
        let f12 = fidelity(&r1, &r2).unwrap();
        let f21 = fidelity(&r2, &r1).unwrap();
        prop_assert!((f12 - f21).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&f12));
    }

    #[test]
    fn assembly_inverts_conditioning(re in proptest::collection::vec(-1.0f64..1.0, 30), im in proptest::collection::vec(-1.0f64..1.0, 30)) {
        let rho = dvcv_state(&re, &im);
        let set = ConditionalTomogramSet::from_qubit_state(&rho, "D").unwrap();
        let out = assemble_two_mode(&set, "D").unwrap();
        prop_assert!((out.rho.matrix() - rho.matrix()).norm() < 1e-9);
    }

    #[test]
    fn bound_is_a_lower_bound(re in proptest::collection::vec(-1.0f64..1.0, 30), im in proptest::collection::vec(-1.0f64..1.0, 30), w in 0.0f64..1.0) {
        let basis = CatBasis { gamma_plus: 0.05, gamma_minus: 0.1, cutoff: 4 };
        let target = max_entangled_swap(&basis).unwrap();
        let mixed = DensityOperator::mixture(&[(w, &DensityOperator::from_pure(&target)), (1.0 - w, &dvcv_state(&re, &im))]).unwrap();
        let set = ConditionalTomogramSet::from_qubit_state(&mixed, "D").unwrap();
        let b = entanglement_bound(&set, &basis).unwrap();
        let f = mixed.expectation_pure(&target).unwrap();
        prop_assert!(b.lower_bound <= f + 1e-9, "{} > {}", b.lower_bound, f);
    }

    #[test]
    fn rates_scale_with_heralding_rate(rb in 1e2f64..1e5, k in 1.5f64..4.0) {
        let base = RateParams { r_b: rb, ..Default::default() };
        let r1 = rates(&base).unwrap();
        let r2 = rates(&RateParams { r_b: k * rb, ..base }).unwrap();
        prop_assert!((r2.p_db / r1.p_db - k * k).abs() < 1e-9);
        prop_assert!((r2.p_good / r1.p_good - k).abs() < 1e-9);
    }
}

#[test]
fn product_state_does_not_certify() {
    let basis = CatBasis {
        gamma_plus: 0.45,
        gamma_minus: 0.9,
        cutoff: 14,
    };
    let v = FockVector::basis(ModeRegister::single("D", 1).unwrap(), &[1]).unwrap();
    let prod = v.tensor(&basis.minus().unwrap()).unwrap();
    let set = ConditionalTomogramSet::from_qubit_state(&DensityOperator::from_pure(&prod), "D").unwrap();
    let b = entanglement_bound(&set, &basis).unwrap();
    assert!(b.lower_bound <= 0.5 + 1e-12);
    assert!(!b.certifies_entanglement());
}
