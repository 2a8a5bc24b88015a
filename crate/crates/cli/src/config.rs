//! Flat JSON parameter files.
//!
//! ```json
//! {
//!   "omega_r_ghz": 5.0, "omega_10_ghz": 6.0, "anharmonicity_ghz": 0.25,
//!   "g0_ghz": 0.1, "num_qubit_levels": 3, "fock_truncation": 10,
//!   "model": "rabi", "temperature_ghz": 0.05,
//!   "bath_X": {"model": "ohmic", "eta": 0.01, "cutoff_ghz": 50.0},
//!   "bath_Z": {"model": "one_over_f", "amplitude": 1.0, "ir_floor_ghz": 1e-6},
//!   "bath_R": {"model": "flat", "level": 1.0, "temperature_ghz": 0.02}
//! }
//! ```
//!
//! A bath without its own `temperature_ghz` uses the global one; a missing
//! bath is silent.

use std::path::Path;

use dispersive_core::model::{validate, TransmonSpec, Validated};
use dispersive_core::{Baths, InteractionModel, ResonatorSpec, SpectralFunction, SystemSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum BathConfig {
    Ohmic { eta: f64, cutoff_ghz: f64, temperature_ghz: Option<f64> },
    OneOverF { amplitude: f64, ir_floor_ghz: f64, temperature_ghz: Option<f64> },
    Flat { level: f64, temperature_ghz: Option<f64> },
}

impl BathConfig {
    fn build(&self, global_t: f64) -> SpectralFunction {
        match *self {
            BathConfig::Ohmic { eta, cutoff_ghz, temperature_ghz } => {
                SpectralFunction::ohmic(eta, cutoff_ghz, temperature_ghz.unwrap_or(global_t))
            }
            BathConfig::OneOverF { amplitude, ir_floor_ghz, temperature_ghz } => {
                SpectralFunction::one_over_f(amplitude, ir_floor_ghz, temperature_ghz.unwrap_or(global_t))
            }
            BathConfig::Flat { level, temperature_ghz } => {
                SpectralFunction::flat(level, temperature_ghz.unwrap_or(global_t))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub omega_r_ghz: f64,
    pub omega_10_ghz: f64,
    #[serde(default)]
    pub anharmonicity_ghz: f64,
    pub g0_ghz: f64,
    #[serde(default = "default_levels")]
    pub num_qubit_levels: usize,
    #[serde(default = "default_fock")]
    pub fock_truncation: usize,
    #[serde(default = "default_model")]
    pub model: InteractionModel,
    #[serde(default)]
    pub temperature_ghz: f64,
    #[serde(rename = "bath_X", default)]
    pub bath_x: Option<BathConfig>,
    #[serde(rename = "bath_Z", default)]
    pub bath_z: Option<BathConfig>,
    #[serde(rename = "bath_R", default)]
    pub bath_r: Option<BathConfig>,
    #[serde(default)]
    pub transverse_couplings: Option<Vec<f64>>,
    #[serde(default)]
    pub dephasing_sensitivities: Option<Vec<f64>>,
    #[serde(default)]
    pub resonance_tol_ghz: Option<f64>,
}

fn default_levels() -> usize {
    3
}

fn default_fock() -> usize {
    10
}

fn default_model() -> InteractionModel {
    InteractionModel::Rabi
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn has_baths(&self) -> bool {
        self.bath_x.is_some() || self.bath_z.is_some() || self.bath_r.is_some()
    }

    pub fn baths(&self) -> Baths {
        let t = self.temperature_ghz;
        let silent = SpectralFunction::flat(0.0, t);
        let pick = |b: &Option<BathConfig>| b.as_ref().map_or(silent, |b| b.build(t));
        Baths { x: pick(&self.bath_x), z: pick(&self.bath_z), r: pick(&self.bath_r) }
    }

    /// Sets every temperature, including per-bath overrides.
    pub fn set_temperature(&mut self, t: f64) {
        self.temperature_ghz = t;
        for bath in [&mut self.bath_x, &mut self.bath_z, &mut self.bath_r].into_iter().flatten() {
            match bath {
                BathConfig::Ohmic { temperature_ghz, .. }
                | BathConfig::OneOverF { temperature_ghz, .. }
                | BathConfig::Flat { temperature_ghz, .. } => *temperature_ghz = None,
            }
        }
    }

    pub fn detuning(&self) -> f64 {
        self.omega_10_ghz - self.omega_r_ghz
    }

    /// Raw specification; the splitting check of the transmon ladder is the
    /// only thing enforced here.
    pub fn spec(&self) -> dispersive_core::Result<SystemSpec> {
        let transmon = TransmonSpec {
            omega_10: self.omega_10_ghz,
            anharmonicity: self.anharmonicity_ghz,
            g0: self.g0_ghz,
            num_levels: self.num_qubit_levels,
            transverse_couplings: self.transverse_couplings.clone(),
            dephasing_sensitivities: self.dephasing_sensitivities.clone(),
        };
        let resonator = ResonatorSpec { omega_r: self.omega_r_ghz, fock_truncation: self.fock_truncation };
        let mut spec = SystemSpec::new(transmon.expand()?, resonator, self.model).with_baths(self.baths());
        if let Some(tol) = self.resonance_tol_ghz {
            spec.resonance_tol = tol;
        }
        Ok(spec)
    }

    pub fn validated(&self) -> Result<Validated, CliError> {
        let spec = self.spec().map_err(|e| CliError::Config(e.to_string()))?;
        validate(spec).map_err(|e| CliError::Config(e.to_string()))
    }
}
