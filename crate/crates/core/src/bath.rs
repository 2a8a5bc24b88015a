//! Thermal noise-power spectra `C_o(ω)` of the three independent baths.
//!
//! Spectral weights are returned in MHz: they are used directly as Lindblad
//! rates. Frequencies and temperatures are in GHz (`k_B = ħ = 1`).
//!
//! Detailed balance `C(ω)/C(−ω) = exp(ω/T)` holds by construction: the
//! absorption side is always computed as the emission side times
//! `exp(−|ω|/T)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spectral density `J(ω)` of a bath coupling operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralModel {
    /// `J(ω) = η ω exp(−ω/ω_c)`; `η` is in MHz per GHz.
    Ohmic { eta: f64, cutoff: f64 },
    /// `J(ω) = A / max(ω, ω_min)`; `A` is in MHz·GHz.
    OneOverF { amplitude: f64, ir_floor: f64 },
    /// `J(ω) = S0` in MHz.
    Flat { level: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFunction {
    pub model: SpectralModel,
    /// Bath temperature in GHz.
    pub temperature: f64,
}

impl Default for SpectralFunction {
    /// A silent bath.
    fn default() -> Self {
        Self::flat(0.0, 0.0)
    }
}

impl SpectralFunction {
    pub fn ohmic(eta: f64, cutoff: f64, temperature: f64) -> Self {
        Self { model: SpectralModel::Ohmic { eta, cutoff }, temperature }
    }

    pub fn one_over_f(amplitude: f64, ir_floor: f64, temperature: f64) -> Self {
        Self { model: SpectralModel::OneOverF { amplitude, ir_floor }, temperature }
    }

    pub fn flat(level: f64, temperature: f64) -> Self {
        Self { model: SpectralModel::Flat { level }, temperature }
    }

    /// `J(ω)` for `ω ≥ 0`.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 {
            return Err(Error::NegativeFrequency(omega));
        }
        Ok(self.density(omega))
    }

    fn density(&self, omega: f64) -> f64 {
        match self.model {
            SpectralModel::Ohmic { eta, cutoff } => eta * omega * (-omega / cutoff).exp(),
            SpectralModel::OneOverF { amplitude, ir_floor } => amplitude / omega.max(ir_floor),
            SpectralModel::Flat { level } => level,
        }
    }

    /// Emission-side weight `C(|ω|)`.
    ///
    /// Ohmic baths use the bosonic factor `J/(1 − e^{−|ω|/T})`, whose dc
    /// limit is `ηT`. The flat and 1/f models describe noise that stays
    /// finite at dc; they use `J/(1 + e^{−|ω|/T})`, so `C(ω) + C(−ω) = J(|ω|)`.
    fn emission(&self, omega: f64) -> f64 {
        let t = self.temperature;
        if t <= 0.0 {
            return match self.model {
                SpectralModel::Ohmic { .. } => self.density(omega),
                _ if omega == 0.0 => 0.5 * self.density(0.0),
                _ => self.density(omega),
            };
        }
        match self.model {
            SpectralModel::Ohmic { eta, cutoff } => {
                if omega == 0.0 {
                    return eta * t;
                }
                let x = omega / t;
                // η ω e^{−ω/ω_c} / (1 − e^{−x}) = η T e^{−ω/ω_c} · x/(1 − e^{−x})
                eta * t * (-omega / cutoff).exp() * (x / -(-x).exp_m1())
            }
            _ => self.density(omega) / (1.0 + (-omega / t).exp()),
        }
    }

    /// Noise power `C(ω)` at any real frequency.
    pub fn evaluate(&self, omega: f64) -> f64 {
        let w = self.emission(omega.abs());
        if omega >= 0.0 {
            w
        } else if self.temperature <= 0.0 {
            0.0
        } else {
            w * (omega / self.temperature).exp()
        }
    }

    /// `ln C(ω)`; finite even where `C(−|ω|)` underflows.
    pub fn ln_evaluate(&self, omega: f64) -> f64 {
        let ln_w = self.emission(omega.abs()).ln();
        if omega >= 0.0 {
            ln_w
        } else if self.temperature <= 0.0 {
            f64::NEG_INFINITY
        } else {
            ln_w + omega / self.temperature
        }
    }

    pub(crate) fn check(&self, path: &str, report: &mut dyn FnMut(String, String)) {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            report(format!("{path}.temperature"), format!("must be >= 0, got {}", self.temperature));
        }
        let mut non_negative = |field: &str, v: f64| {
            if !(v >= 0.0) {
                report(format!("{path}.{field}"), format!("must be >= 0, got {v}"));
            }
        };
        match self.model {
            SpectralModel::Ohmic { eta, cutoff } => {
                non_negative("eta", eta);
                if !(cutoff > 0.0) {
                    report(format!("{path}.cutoff"), format!("must be positive, got {cutoff}"));
                }
            }
            SpectralModel::OneOverF { amplitude, ir_floor } => {
                non_negative("amplitude", amplitude);
                if !(ir_floor > 0.0 && ir_floor.is_finite()) {
                    report(format!("{path}.ir_floor"), format!("must be positive, got {ir_floor}"));
                }
            }
            SpectralModel::Flat { level } => non_negative("level", level),
        }
    }
}

/// The transverse (`X`), longitudinal (`Z`) and resonator (`R`) baths.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Baths {
    pub x: SpectralFunction,
    pub z: SpectralFunction,
    pub r: SpectralFunction,
}

impl Baths {
    pub(crate) fn check(&self, report: &mut dyn FnMut(String, String)) {
        self.x.check("baths.x", report);
        self.z.check("baths.z", report);
        self.r.check("baths.r", report);
    }
}
