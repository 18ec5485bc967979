//! Flat `key = value` scenario configuration.
//!
//! Blank lines and `#` comments are ignored. Every key may appear at most
//! once; unknown keys are rejected. Complex values use the `num-complex`
//! syntax (`0.6`, `0.8i`, `0.6+0.8i`).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::analysis::RateParams;
use crate::error::{Error, Result};
use crate::protocol::ProtocolParams;
use crate::tomography::{uniform_phases, TomographySettings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    Resource,
    Rsp,
    Teleport,
    Swap,
    TomoRoundtrip,
    Rates,
    BlochMap,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Resource,
        Scenario::Rsp,
        Scenario::Teleport,
        Scenario::Swap,
        Scenario::TomoRoundtrip,
        Scenario::Rates,
        Scenario::BlochMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Resource => "resource",
            Scenario::Rsp => "rsp",
            Scenario::Teleport => "teleport",
            Scenario::Swap => "swap",
            Scenario::TomoRoundtrip => "tomo-roundtrip",
            Scenario::Rates => "rates",
            Scenario::BlochMap => "bloch-map",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub protocol: ProtocolParams,
    pub tomography: TomographySettings,
    pub rates: RateParams,
    /// Input qubit a|H⟩ + b|V⟩ for rsp, teleport and the rate model.
    pub a: Complex64,
    pub b: Complex64,
    pub n_grid: usize,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let rates = RateParams::default();
        Self {
            scenario: None,
            protocol: ProtocolParams::default(),
            tomography: TomographySettings::default(),
            a: rates.a,
            b: rates.b,
            rates,
            n_grid: 10_000,
            output_dir: PathBuf::from("."),
        }
    }
}

pub const KEYS: &[&str] = &[
    "scenario",
    "squeeze_r",
    "R_tap",
    "beta_over_alpha",
    "alpha_in",
    "lock_phase",
    "gamma_plus",
    "gamma_minus",
    "visibility",
    "ratio_pdb_pgood_at_H",
    "eta_homodyne",
    "cutoff_cv",
    "convention",
    "seed",
    "n_samples",
    "phases",
    "eta",
    "tomo_cutoff",
    "max_iters",
    "log_likelihood_tol",
    "R_rep",
    "R_B",
    "R_alpha",
    "R_beta",
    "eta_spcm",
    "a",
    "b",
    "n_grid",
    "output_dir",
];

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::Config {
        line,
        msg: format!("{key}: cannot parse '{value}': {e}"),
    })
}

impl ScenarioConfig {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut eta_set = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected 'key = value', found '{content}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(Error::Config {
                    line,
                    msg: format!("unknown key '{key}'"),
                });
            };
            if seen.contains(&known) {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate key '{key}'"),
                });
            }
            seen.push(known);
            let p = &mut cfg.protocol;
            let t = &mut cfg.tomography;
            let r = &mut cfg.rates;
            match known {
                "scenario" => cfg.scenario = Some(parse(line, key, value)?),
                "squeeze_r" => p.squeeze_r = parse(line, key, value)?,
                "R_tap" => p.r_tap = parse(line, key, value)?,
                "beta_over_alpha" => p.beta_over_alpha = parse(line, key, value)?,
                "alpha_in" => p.alpha_in = Some(parse(line, key, value)?),
                "lock_phase" => p.lock_phase = parse(line, key, value)?,
                "gamma_plus" => p.gamma_plus = parse(line, key, value)?,
                "gamma_minus" => p.gamma_minus = parse(line, key, value)?,
                "visibility" => p.visibility = parse(line, key, value)?,
                "ratio_pdb_pgood_at_H" => p.ratio_pdb_pgood_at_h = parse(line, key, value)?,
                "eta_homodyne" => p.eta_homodyne = parse(line, key, value)?,
                "cutoff_cv" => p.cutoff_cv = parse(line, key, value)?,
                "convention" => {
                    p.convention = match value {
                        "real" => crate::channels::PhaseConvention::RealOrthogonal,
                        "symmetric" => crate::channels::PhaseConvention::SymmetricImaginary,
                        _ => {
                            return Err(Error::Config {
                                line,
                                msg: format!("convention must be 'real' or 'symmetric', found '{value}'"),
                            })
                        }
                    }
                }
                "seed" => t.seed = parse(line, key, value)?,
                "n_samples" => t.n_samples = parse(line, key, value)?,
                "phases" => t.phase_grid = uniform_phases(parse(line, key, value)?),
                "eta" => {
                    t.eta = parse(line, key, value)?;
                    eta_set = true;
                }
                "tomo_cutoff" => t.cutoff = parse(line, key, value)?,
                "max_iters" => t.max_iters = parse(line, key, value)?,
                "log_likelihood_tol" => t.log_likelihood_tol = parse(line, key, value)?,
                "R_rep" => r.r_rep = parse(line, key, value)?,
                "R_B" => r.r_b = parse(line, key, value)?,
                "R_alpha" => r.r_alpha = parse(line, key, value)?,
                "R_beta" => r.r_beta = parse(line, key, value)?,
                "eta_spcm" => r.eta_spcm = parse(line, key, value)?,
                "a" => cfg.a = parse(line, key, value)?,
                "b" => cfg.b = parse(line, key, value)?,
                "n_grid" => cfg.n_grid = parse(line, key, value)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                _ => unreachable!("key list and match arms agree"),
            }
        }
        // the homodyne efficiency doubles as the POVM efficiency unless set apart
        if !eta_set {
            cfg.tomography.eta = cfg.protocol.eta_homodyne;
        }
        if !seen.contains(&"tomo_cutoff") {
            cfg.tomography.cutoff = cfg.protocol.cutoff_cv;
        }
        cfg.rates.a = cfg.a;
        cfg.rates.b = cfg.b;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Checks every parameter group; run before any computation.
    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        self.tomography.validate()?;
        self.rates.validate()?;
        let n = (self.a.norm_sqr() + self.b.norm_sqr()).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("input qubit (a, b) has norm {n}, expected 1")));
        }
        if self.n_grid < 100 {
            return Err(Error::InvalidParameter(format!("n_grid = {} below 100", self.n_grid)));
        }
        Ok(())
    }
}
