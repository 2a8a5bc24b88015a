//! Physical parameters of the qubit, the resonator and their couplings.
//!
//! Every stored frequency is an ordinary frequency in GHz (the `/2π`
//! convention). All analytic expressions downstream are homogeneous of degree
//! one in the frequencies, so they can be evaluated directly on these values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bath::Baths;
use crate::error::{Error, Result};

/// Default minimum magnitude of a perturbative denominator, in GHz.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-6;

/// Advisory threshold on `g_0 / |ω_{1,0} − ω_r|`.
pub const DISPERSIVE_RATIO_LIMIT: f64 = 0.1;

/// A multi-level qubit with nearest-neighbour ladder couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitSpec {
    /// Level energies `ω_k` in GHz, with `ω_0 = 0`.
    pub level_energies: Vec<f64>,
    /// Resonator couplings `g_k` of the `k ↔ k+1` transition, GHz.
    pub couplings: Vec<f64>,
    /// Dimensionless transverse bath couplings `β_k`.
    pub transverse_couplings: Vec<f64>,
    /// Dimensionless level sensitivities `δω_k` to the longitudinal bath.
    pub dephasing_sensitivities: Vec<f64>,
}

impl QubitSpec {
    pub fn num_levels(&self) -> usize {
        self.level_energies.len()
    }

    /// Splitting `ω_{k+1,k}`, or `None` when `k` is not a transition index.
    pub fn splitting(&self, k: isize) -> Option<f64> {
        let k = usize::try_from(k).ok()?;
        if k + 1 < self.level_energies.len() {
            Some(self.level_energies[k + 1] - self.level_energies[k])
        } else {
            None
        }
    }

    /// `g_k`, zero outside `[0, N-2]`.
    pub fn coupling(&self, k: isize) -> f64 {
        lookup(&self.couplings, k)
    }

    /// `β_k`, zero outside `[0, N-2]`.
    pub fn beta(&self, k: isize) -> f64 {
        lookup(&self.transverse_couplings, k)
    }

    /// `δω_k`, zero outside `[0, N-1]`.
    pub fn dephasing(&self, k: isize) -> f64 {
        lookup(&self.dephasing_sensitivities, k)
    }

    fn check(&self, issues: &mut Vec<ValidationIssue>) {
        let n = self.num_levels();
        if n < 2 {
            issues.push(ValidationIssue::new("qubit.level_energies", format!("need at least 2 levels, got {n}")));
            return;
        }
        for (i, &w) in self.level_energies.iter().enumerate() {
            if !w.is_finite() {
                issues.push(ValidationIssue::new(format!("qubit.level_energies[{i}]"), "not finite"));
            }
        }
        if self.level_energies[0] != 0.0 {
            issues.push(ValidationIssue::new("qubit.level_energies[0]", "ground-state energy must be 0"));
        }
        for k in 0..n - 1 {
            if !(self.level_energies[k + 1] > self.level_energies[k]) {
                issues.push(ValidationIssue::new(
                    format!("qubit.level_energies[{}]", k + 1),
                    "level energies must increase strictly",
                ));
            }
        }
        let expect = |field: &str, len: usize, want: usize, issues: &mut Vec<ValidationIssue>| {
            if len != want {
                issues.push(ValidationIssue::new(
                    format!("qubit.{field}"),
                    format!("expected {want} entries, found {len}"),
                ));
            }
        };
        expect("couplings", self.couplings.len(), n - 1, issues);
        expect("transverse_couplings", self.transverse_couplings.len(), n - 1, issues);
        expect("dephasing_sensitivities", self.dephasing_sensitivities.len(), n, issues);
        for (i, &g) in self.couplings.iter().enumerate() {
            if !g.is_finite() || g < 0.0 {
                issues.push(ValidationIssue::new(
                    format!("qubit.couplings[{i}]"),
                    format!("must be finite and >= 0, got {g}"),
                ));
            }
        }
        for (field, values) in [
            ("transverse_couplings", &self.transverse_couplings),
            ("dephasing_sensitivities", &self.dephasing_sensitivities),
        ] {
            for (i, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    issues.push(ValidationIssue::new(format!("qubit.{field}[{i}]"), "not finite"));
                }
            }
        }
    }
}

fn lookup(values: &[f64], k: isize) -> f64 {
    usize::try_from(k).ok().and_then(|k| values.get(k)).copied().unwrap_or(0.0)
}

/// Transmon-like ladder: `ω_{k+1,k} = ω_{1,0} − kα`, `g_k = √(k+1) g_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmonSpec {
    pub omega_10: f64,
    pub anharmonicity: f64,
    pub g0: f64,
    pub num_levels: usize,
    /// Overrides `β_k = √(k+1)`.
    #[serde(default)]
    pub transverse_couplings: Option<Vec<f64>>,
    /// Overrides `δω_k = k`.
    #[serde(default)]
    pub dephasing_sensitivities: Option<Vec<f64>>,
}

impl TransmonSpec {
    pub fn new(omega_10: f64, anharmonicity: f64, g0: f64, num_levels: usize) -> Self {
        Self { omega_10, anharmonicity, g0, num_levels, transverse_couplings: None, dephasing_sensitivities: None }
    }

    pub fn expand(&self) -> Result<QubitSpec> {
        expand_transmon(self)
    }
}

/// Expands a transmon description into an explicit level ladder.
///
/// The dephasing sensitivities default to `δω_k = k`, i.e. level `k` moves
/// like `k` quanta of the fundamental transition.
pub fn expand_transmon(spec: &TransmonSpec) -> Result<QubitSpec> {
    let n = spec.num_levels;
    let mut level_energies = Vec::with_capacity(n);
    level_energies.push(0.0);
    for k in 0..n.saturating_sub(1) {
        let splitting = spec.omega_10 - k as f64 * spec.anharmonicity;
        if !(splitting > 0.0) {
            return Err(Error::NonPositiveSplitting { lower: k, splitting });
        }
        level_energies.push(level_energies[k] + splitting);
    }
    let ladder = |k: usize| ((k + 1) as f64).sqrt();
    let couplings = (0..n.saturating_sub(1)).map(|k| ladder(k) * spec.g0).collect();
    let transverse_couplings =
        spec.transverse_couplings.clone().unwrap_or_else(|| (0..n.saturating_sub(1)).map(ladder).collect());
    let dephasing_sensitivities =
        spec.dephasing_sensitivities.clone().unwrap_or_else(|| (0..n).map(|k| k as f64).collect());
    Ok(QubitSpec { level_energies, couplings, transverse_couplings, dephasing_sensitivities })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    /// Resonator frequency `ω_r`, GHz.
    pub omega_r: f64,
    /// Number of Fock states kept, `M`.
    pub fock_truncation: usize,
}

/// Qubit-resonator interaction used for perturbation theory or exact numerics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InteractionModel {
    #[serde(rename = "rabi")]
    Rabi,
    #[serde(rename = "jc")]
    JaynesCummings,
}

impl InteractionModel {
    pub const ALL: [InteractionModel; 2] = [InteractionModel::Rabi, InteractionModel::JaynesCummings];

    pub fn name(self) -> &'static str {
        match self {
            InteractionModel::Rabi => "rabi",
            InteractionModel::JaynesCummings => "jc",
        }
    }
}

impl fmt::Display for InteractionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InteractionModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rabi" => Ok(InteractionModel::Rabi),
            "jc" | "jaynes-cummings" | "jaynes_cummings" => Ok(InteractionModel::JaynesCummings),
            other => Err(format!("unknown interaction model `{other}` (expected rabi or jc)")),
        }
    }
}

/// Complete description of qubit, resonator and environment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub qubit: QubitSpec,
    pub resonator: ResonatorSpec,
    pub model: InteractionModel,
    pub baths: Baths,
    /// Minimum magnitude of a perturbative denominator, GHz.
    pub resonance_tol: f64,
}

impl SystemSpec {
    pub fn new(qubit: QubitSpec, resonator: ResonatorSpec, model: InteractionModel) -> Self {
        Self { qubit, resonator, model, baths: Baths::default(), resonance_tol: DEFAULT_RESONANCE_TOL }
    }

    pub fn with_baths(mut self, baths: Baths) -> Self {
        self.baths = baths;
        self
    }

    /// Convenience constructor for a transmon with its default sensitivities.
    pub fn transmon(
        omega_10: f64,
        anharmonicity: f64,
        g0: f64,
        num_levels: usize,
        omega_r: f64,
        fock_truncation: usize,
        model: InteractionModel,
    ) -> Result<Self> {
        let qubit = expand_transmon(&TransmonSpec::new(omega_10, anharmonicity, g0, num_levels))?;
        Ok(Self::new(qubit, ResonatorSpec { omega_r, fock_truncation }, model))
    }

    pub fn omega_r(&self) -> f64 {
        self.resonator.omega_r
    }

    /// Detuning `Δ_0 = ω_{1,0} − ω_r`.
    pub fn detuning(&self) -> f64 {
        self.qubit.splitting(0).unwrap_or(f64::NAN) - self.resonator.omega_r
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub path: String,
    pub message: String,
}

impl ValidationIssue {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// All invariant violations found in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ValidationIssue>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid system specification: ")?;
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

/// Non-fatal observations about a parameter point.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `g_0/|Δ_0|` exceeds [`DISPERSIVE_RATIO_LIMIT`].
    WeakDispersive { ratio: f64 },
    /// `|ω_{k+1,k} − ω_r| < 10 g_k`.
    NearResonance { level: usize, detuning: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub spec: SystemSpec,
    pub warnings: Vec<Warning>,
}

impl std::ops::Deref for Validated {
    type Target = SystemSpec;

    fn deref(&self) -> &SystemSpec {
        &self.spec
    }
}

pub fn validate(spec: SystemSpec) -> std::result::Result<Validated, ValidationErrors> {
    let mut issues = Vec::new();
    spec.qubit.check(&mut issues);
    let omega_r = spec.resonator.omega_r;
    if !(omega_r.is_finite() && omega_r > 0.0) {
        issues.push(ValidationIssue::new("resonator.omega_r", format!("must be positive, got {omega_r}")));
    }
    if spec.resonator.fock_truncation < 2 {
        issues.push(ValidationIssue::new(
            "resonator.fock_truncation",
            format!("need at least 2 Fock states, got {}", spec.resonator.fock_truncation),
        ));
    }
    if !(spec.resonance_tol.is_finite() && spec.resonance_tol > 0.0) {
        issues.push(ValidationIssue::new("resonance_tol", "must be positive"));
    }
    spec.baths.check(&mut |path, msg| issues.push(ValidationIssue::new(path, msg)));
    if !issues.is_empty() {
        return Err(ValidationErrors(issues));
    }

    let mut warnings = Vec::new();
    let g0 = spec.qubit.coupling(0);
    let ratio = g0 / spec.detuning().abs();
    if ratio > DISPERSIVE_RATIO_LIMIT {
        warnings.push(Warning::WeakDispersive { ratio });
    }
    for k in 0..spec.qubit.num_levels() - 1 {
        let detuning = spec.qubit.splitting(k as isize).unwrap() - omega_r;
        if detuning.abs() < 10.0 * spec.qubit.coupling(k as isize) {
            warnings.push(Warning::NearResonance { level: k, detuning });
        }
    }
    Ok(Validated { spec, warnings })
}
