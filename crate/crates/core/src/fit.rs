//! One-parameter least-squares fit of the coupling `g_0` to dispersive-shift
//! data, using the analytic shift of a transmon ladder as the model.

use serde::{Deserialize, Serialize};

use crate::dispersive;
use crate::error::{Error, Result};
use crate::model::{InteractionModel, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Correction to the one-photon resonator energy.
    Resonator,
    /// Correction to the lowest qubit transition.
    Qubit,
}

impl std::str::FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "resonator" => Ok(Observable::Resonator),
            "qubit" => Ok(Observable::Qubit),
            other => Err(format!("unknown observable `{other}` (expected resonator or qubit)")),
        }
    }
}

/// Parameters held fixed during the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitFixed {
    pub omega_r: f64,
    pub anharmonicity: f64,
    pub num_levels: usize,
}

/// Analytic shift at detuning `Δ₀ = ω_{1,0} − ω_r` and coupling `g0`.
pub fn analytic_shift(
    delta0: f64,
    g0: f64,
    model: InteractionModel,
    observable: Observable,
    fixed: FitFixed,
) -> Result<f64> {
    let spec = SystemSpec::transmon(
        fixed.omega_r + delta0,
        fixed.anharmonicity,
        g0,
        fixed.num_levels,
        fixed.omega_r,
        2,
        model,
    )?;
    match observable {
        Observable::Resonator => dispersive::resonator_pull(&spec, model),
        Observable::Qubit => dispersive::qubit_shift(&spec, model),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub g0: f64,
    pub stderr: f64,
    /// Residual sum of squares at the optimum, GHz².
    pub rss: f64,
    /// `model − observed` at each data point.
    pub residuals: Vec<f64>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Fits `g0 > 0` to `(Δ₀, shift)` pairs.
///
/// The residual sum is minimized by golden-section search in `ln g0`; the
/// standard error is `√(2σ²/f'')` with `σ² = RSS/(n−1)` and `f''` the
/// curvature of the residual sum at the optimum.
pub fn fit_g0(
    data: &[(f64, f64)],
    model: InteractionModel,
    observable: Observable,
    fixed: FitFixed,
) -> Result<FitResult> {
    if data.len() < 3 {
        return Err(Error::TooFewPoints(data.len()));
    }
    let rss = |g0: f64| -> Result<f64> {
        let mut sum = 0.0;
        for &(delta0, observed) in data {
            let r = analytic_shift(delta0, g0, model, observable, fixed)? - observed;
            sum += r * r;
        }
        Ok(sum)
    };
    let f = |x: f64| rss(x.exp());

    let (mut a, mut b) = bracket(&f, initial_guess(data, model, observable, fixed)?.ln())?;
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    let g0 = (0.5 * (a + b)).exp();
    let best = rss(g0)?;

    let h = 1e-4 * g0;
    let curvature = (rss(g0 + h)? - 2.0 * best + rss(g0 - h)?) / (h * h);
    if !(curvature > 0.0) || !curvature.is_finite() {
        return Err(Error::DegenerateCurvature(curvature));
    }
    let variance = best / (data.len() - 1) as f64;
    let residuals = data
        .iter()
        .map(|&(delta0, observed)| analytic_shift(delta0, g0, model, observable, fixed).map(|m| m - observed))
        .collect::<Result<Vec<_>>>()?;
    Ok(FitResult { g0, stderr: (2.0 * variance / curvature).sqrt(), rss: best, residuals })
}

/// Every analytic shift is proportional to `g0²`, so a one-point probe
/// gives the linear least-squares estimate of `g0²`.
fn initial_guess(data: &[(f64, f64)], model: InteractionModel, observable: Observable, fixed: FitFixed) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for &(delta0, observed) in data {
        let unit = analytic_shift(delta0, 1.0, model, observable, fixed)?;
        num += unit * observed;
        den += unit * unit;
    }
    let g2 = num / den;
    Ok(if g2 > 0.0 && g2.is_finite() { g2.sqrt() } else { 0.1 })
}

/// Expands geometrically around `x0` until the middle point is lowest.
fn bracket(f: &dyn Fn(f64) -> Result<f64>, x0: f64) -> Result<(f64, f64)> {
    let mut step = 0.1;
    let mut lo = x0 - step;
    let mut hi = x0 + step;
    let (mut f_lo, f_mid, mut f_hi) = (f(lo)?, f(x0)?, f(hi)?);
    for _ in 0..60 {
        if f_mid <= f_lo && f_mid <= f_hi {
            return Ok((lo, hi));
        }
        step *= 2.0;
        if f_lo < f_mid {
            lo = x0 - step;
            f_lo = f(lo)?;
        }
        if f_hi < f_mid {
            hi = x0 + step;
            f_hi = f(hi)?;
        }
    }
    Err(Error::NoBracket)
}

/// `count` uniform points on `[start, stop]`, dropping `|Δ| < exclude_below`
/// (points on the window edge are kept).
pub fn detuning_grid(start: f64, stop: f64, count: usize, exclude_below: f64) -> Vec<f64> {
    let step = if count > 1 { (stop - start) / (count - 1) as f64 } else { 0.0 };
    (0..count).map(|i| start + i as f64 * step).filter(|d| d.abs() >= exclude_below - 1e-9).collect()
}
