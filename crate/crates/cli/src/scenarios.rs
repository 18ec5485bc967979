use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use dvcv_core::analysis::{
    assemble_two_mode, entanglement_bound, fidelity, fidelity_with_pure, fit_coherent, mean_bloch_fidelity, rates,
    write_bloch_csv, AnalysisReport, ConditionalTomogramSet,
};
use dvcv_core::channels::{bell_pair_psi_plus, PolarizationProjector};
use dvcv_core::config::{Scenario, ScenarioConfig};
use dvcv_core::fock::{cat_state, DensityOperator, Parity, CV_MODE};
use dvcv_core::protocol::{
    entanglement_swap, extract_resource, max_entangled_resource, max_entangled_swap, prepare_omega, remote_state_prep,
    teleport_ideal, teleport_realistic, BranchAmplitudes,
};
use dvcv_core::tomography::{maxlik_reconstruct, sample_quadratures, save_samples, wigner, wigner_point, write_wigner_csv, WignerGrid};
use dvcv_core::Result;

/// Outcome of one scenario: ordered summary fields and the files written.
pub struct Outcome {
    pub fields: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            fields: Vec::new(),
            files: Vec::new(),
        }
    }

    fn num(&mut self, key: &str, v: f64) {
        self.fields.push((key.to_string(), format!("{v:.6}")));
    }

    fn sci(&mut self, key: &str, v: f64) {
        self.fields.push((key.to_string(), format!("{v:.4e}")));
    }

    fn text(&mut self, key: &str, v: impl ToString) {
        self.fields.push((key.to_string(), v.to_string()));
    }

    pub fn summary(&self, scenario: Scenario) -> String {
        let mut line = format!("scenario={scenario}");
        for (k, v) in &self.fields {
            write!(line, " {k}={v}").expect("writing to a String");
        }
        line
    }
}

/// Writes output files under one directory and remembers their paths.
struct Sink<'a> {
    dir: &'a Path,
    outcome: &'a mut Outcome,
}

impl Sink<'_> {
    fn path(&mut self, name: String) -> PathBuf {
        let p = self.dir.join(name);
        self.outcome.files.push(p.clone());
        p
    }

    fn json<T: Serialize>(&mut self, name: String, value: &T) -> Result<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    fn wigner(&mut self, name: String, rho: &DensityOperator) -> Result<()> {
        let grid = WignerGrid::default();
        let w = wigner(rho, &grid)?;
        let path = self.path(name);
        write_wigner_csv(BufWriter::new(File::create(path)?), &grid, &w)
    }
}

/// Filename tag for a complex coefficient, e.g. `0.600+0.000i`.
fn ctag(z: Complex64) -> String {
    format!("{:.3}{:+.3}i", z.re, z.im)
}

fn input_tag(cfg: &ScenarioConfig) -> String {
    format!("a{}_b{}", ctag(cfg.a), ctag(cfg.b))
}

pub fn run(scenario: Scenario, cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(dir)?;
    let mut outcome = Outcome::new();
    let mut sink = Sink {
        dir,
        outcome: &mut outcome,
    };
    match scenario {
        Scenario::Resource => resource(cfg, &mut sink)?,
        Scenario::Rsp => rsp(cfg, &mut sink)?,
        Scenario::Teleport => teleport(cfg, &mut sink)?,
        Scenario::Swap => swap(cfg, &mut sink)?,
        Scenario::TomoRoundtrip => tomo_roundtrip(cfg, &mut sink)?,
        Scenario::Rates => rate_model(cfg, &mut sink)?,
        Scenario::BlochMap => bloch_map(cfg, &mut sink)?,
    }
    Ok(outcome)
}

fn resource(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let omega = prepare_omega(&cfg.protocol)?;
    let rho = extract_resource(&omega)?;
    let amps = omega.amplitudes;
    let f_me = fidelity_with_pure(&rho, &max_entangled_resource(&amps.basis)?)?;
    let f_eq = fidelity_with_pure(&rho, &amps.resource_target()?)?;
    let assembled = assemble_two_mode(&ConditionalTomogramSet::from_qubit_state(&rho, "A")?, "A")?;
    let tag = format!("resource_ratio{:.3}", cfg.protocol.beta_over_alpha);
    let mut report = AnalysisReport::default();
    report.fidelities.insert("maximally_entangled".into(), f_me);
    report.fidelities.insert("first_order".into(), f_eq);
    report.fidelities.insert("assembled_vs_exact".into(), fidelity(&assembled.rho, &rho)?);
    sink.json(format!("{tag}_rho.json"), &rho)?;
    sink.json(format!("{tag}.json"), &report)?;
    let o = &mut sink.outcome;
    o.num("ratio", amps.ratio());
    o.num("gamma_plus_fit", amps.basis.gamma_plus);
    o.num("gamma_minus_fit", amps.basis.gamma_minus);
    o.num("fidelity_me", f_me);
    o.num("fidelity_first_order", f_eq);
    Ok(())
}

fn rsp(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let omega = prepare_omega(&cfg.protocol)?;
    let proj = PolarizationProjector::new(cfg.a, cfg.b, "A")?;
    let (rho, p) = remote_state_prep(&omega, &proj)?;
    let f = fidelity_with_pure(&rho, &omega.amplitudes.remote_prep_target(proj.a, proj.b)?)?;
    let configured = BranchAmplitudes {
        basis: cfg.protocol.target_basis(),
        ..omega.amplitudes
    };
    let f_cfg = fidelity_with_pure(&rho, &configured.remote_prep_target(proj.a, proj.b)?)?;
    let (coh, f_coh) = fit_coherent(&rho)?;
    let w00 = wigner_point(rho.matrix(), 0.0, 0.0);
    let tag = format!("rsp_{}", input_tag(cfg));
    let mut report = AnalysisReport::default();
    report.fidelities.insert("first_order".into(), f);
    report.fidelities.insert("configured_cats".into(), f_cfg);
    report.fidelities.insert("best_coherent".into(), f_coh);
    sink.json(format!("{tag}_rho.json"), &rho)?;
    sink.json(format!("{tag}.json"), &report)?;
    sink.wigner(format!("{tag}_wigner.csv"), &rho)?;
    let o = &mut sink.outcome;
    o.sci("probability", p);
    o.num("fidelity", f);
    o.num("fidelity_configured_cats", f_cfg);
    o.num("fidelity_coherent", f_coh);
    o.text("coherent_amplitude", ctag(coh));
    o.num("w00", w00);
    Ok(())
}

fn teleport(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let omega = prepare_omega(&cfg.protocol)?;
    let (ideal, p) = teleport_ideal(&omega, cfg.a, cfg.b)?;
    let (real, w) = teleport_realistic(&omega, cfg.a, cfg.b, &cfg.protocol)?;
    let target = BranchAmplitudes {
        basis: cfg.protocol.target_basis(),
        ..omega.amplitudes
    }
    .teleport_target(cfg.a, cfg.b)?;
    let f_ideal = fidelity_with_pure(&ideal, &omega.amplitudes.teleport_target(cfg.a, cfg.b)?)?;
    let f_real = fidelity_with_pure(&real, &target)?;
    let tag = format!("teleport_{}_ratio{:.3}", input_tag(cfg), cfg.protocol.ratio_pdb_pgood_at_h);
    let mut report = AnalysisReport::default();
    report.fidelities.insert("ideal_vs_first_order".into(), f_ideal);
    report.fidelities.insert("realistic_vs_target".into(), f_real);
    sink.json(format!("{tag}_rho.json"), &real)?;
    sink.json(format!("{tag}.json"), &report)?;
    sink.wigner(format!("{tag}_wigner.csv"), &real)?;
    let o = &mut sink.outcome;
    o.sci("p_bell", p);
    o.num("good_fraction", w.good_fraction());
    o.num("fidelity_ideal", f_ideal);
    o.num("fidelity", f_real);
    Ok(())
}

fn swap(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let omega = prepare_omega(&cfg.protocol)?;
    let pair = bell_pair_psi_plus(cfg.protocol.visibility, "B", "D")?;
    let (rho, p) = entanglement_swap(&omega, &pair)?;
    let basis = omega.amplitudes.basis;
    let f_me = fidelity_with_pure(&rho, &max_entangled_swap(&basis)?)?;
    let f_eq = fidelity_with_pure(&rho, &omega.amplitudes.swap_target()?)?;
    let bound = entanglement_bound(&ConditionalTomogramSet::from_qubit_state(&rho, "D")?, &basis)?;
    let tag = format!("swap_V{:.3}", cfg.protocol.visibility);
    let mut report = AnalysisReport::default();
    report.fidelities.insert("maximally_entangled".into(), f_me);
    report.fidelities.insert("first_order".into(), f_eq);
    report.entanglement_bound = Some(bound.lower_bound);
    sink.json(format!("{tag}_rho.json"), &rho)?;
    sink.json(format!("{tag}.json"), &report)?;
    let o = &mut sink.outcome;
    o.sci("p_bell", p);
    o.num("fidelity_me", f_me);
    o.num("fidelity_first_order", f_eq);
    o.num("entanglement_bound", bound.lower_bound);
    o.text("entangled", bound.certifies_entanglement());
    Ok(())
}

fn tomo_roundtrip(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let settings = &cfg.tomography;
    let psi = cat_state(cfg.protocol.gamma_minus, Parity::Odd, cfg.protocol.cutoff_cv.max(settings.cutoff))?;
    let truth = DensityOperator::from_pure(&psi);
    // the estimate lives on the tomography cutoff; its overlap with the
    // truncated (unnormalized) truth equals the fidelity against the full state
    let (target, _) = psi.truncate(CV_MODE, settings.cutoff)?;
    let samples = sample_quadratures(&truth, settings)?;
    let corrected = maxlik_reconstruct(&samples, settings)?;
    let raw_settings = dvcv_core::tomography::TomographySettings {
        eta: 1.0,
        ..settings.clone()
    };
    let raw = maxlik_reconstruct(&samples, &raw_settings)?;
    let f = corrected.rho.expectation_pure(&target)?;
    let w00 = wigner_point(corrected.rho.matrix(), 0.0, 0.0);
    let w00_raw = wigner_point(raw.rho.matrix(), 0.0, 0.0);
    let tag = format!("tomo-roundtrip_n{}_seed{}_eta{:.3}", settings.n_samples, settings.seed, settings.eta);
    let mut report = AnalysisReport::default();
    report.fidelities.insert("corrected".into(), f);
    report.fidelities.insert("uncorrected".into(), raw.rho.expectation_pure(&target)?);
    save_samples(&sink.path(format!("{tag}_samples.csv")), &samples)?;
    sink.json(format!("{tag}_rho.json"), &corrected.rho)?;
    sink.json(format!("{tag}.json"), &report)?;
    sink.wigner(format!("{tag}_wigner.csv"), &corrected.rho)?;
    let o = &mut sink.outcome;
    o.num("fidelity", f);
    o.num("w00", w00);
    o.num("w00_uncorrected", w00_raw);
    o.text("iterations", corrected.iterations);
    o.text("converged", corrected.converged);
    Ok(())
}

fn rate_model(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let r = rates(&cfg.rates)?;
    let tag = format!("rates_{}", input_tag(cfg));
    let report = AnalysisReport {
        rates: Some(r),
        ..Default::default()
    };
    sink.json(format!("{tag}.json"), &report)?;
    let o = &mut sink.outcome;
    o.sci("p_dB", r.p_db);
    o.sci("p_good", r.p_good);
    o.sci("triple_rate_hz", r.triple_rate_hz);
    Ok(())
}

fn bloch_map(cfg: &ScenarioConfig, sink: &mut Sink) -> Result<()> {
    let s = mean_bloch_fidelity(&cfg.protocol, cfg.n_grid)?;
    let tag = format!("bloch-map_n{}_ratio{:.3}", cfg.n_grid, cfg.protocol.ratio_pdb_pgood_at_h);
    let report = AnalysisReport {
        mean_bloch_fidelity: Some(s.mean),
        ..Default::default()
    };
    write_bloch_csv(BufWriter::new(File::create(sink.path(format!("{tag}.csv")))?), &s)?;
    sink.json(format!("{tag}.json"), &report)?;
    let o = &mut sink.outcome;
    o.num("mean", s.mean);
    o.num("min", s.min);
    o.num("max", s.max);
    o.text("beats_classical", s.beats_classical());
    Ok(())
}
