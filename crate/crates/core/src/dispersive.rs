//! Second-order dispersive corrections for the Rabi and Jaynes–Cummings
//! interactions.
//!
//! All functions treat indices outside the coupling ladder, and uncoupled
//! transitions, as contributing exactly zero, so `χ_{-1} = ξ_{-1} = χ̃_{-1} = 0`
//! and an uncoupled transition is never resonant.

use crate::error::{Error, Result};
use crate::model::{InteractionModel, SystemSpec};

fn checked(level: usize, denominator: f64, tol: f64) -> Result<f64> {
    if denominator.abs() < tol || !denominator.is_finite() {
        Err(Error::ResonantDivergence { level, denominator })
    } else {
        Ok(denominator)
    }
}

/// `(g_k², ω_{k+1,k})` for an in-range, coupled transition.
fn transition(spec: &SystemSpec, k: isize) -> Option<(usize, f64, f64)> {
    let w = spec.qubit.splitting(k)?;
    let g = spec.qubit.coupling(k);
    (g != 0.0).then_some((k as usize, g * g, w))
}

/// Jaynes–Cummings dispersive shift `χ_k = g_k²/(ω_{k+1,k} − ω_r)`.
pub fn chi(spec: &SystemSpec, k: isize) -> Result<f64> {
    let Some((level, g2, w)) = transition(spec, k) else { return Ok(0.0) };
    Ok(g2 / checked(level, w - spec.omega_r(), spec.resonance_tol)?)
}

/// Bloch–Siegert shift `ξ_k = g_k²/(ω_{k+1,k} + ω_r)`.
pub fn xi(spec: &SystemSpec, k: isize) -> Result<f64> {
    let Some((level, g2, w)) = transition(spec, k) else { return Ok(0.0) };
    Ok(g2 / checked(level, w + spec.omega_r(), spec.resonance_tol)?)
}

/// Generalized dispersive shift `χ̃_k = 2 g_k² ω_{k+1,k}/(ω_{k+1,k}² − ω_r²)`.
pub fn chi_tilde(spec: &SystemSpec, k: isize) -> Result<f64> {
    let Some((level, g2, w)) = transition(spec, k) else { return Ok(0.0) };
    let wr = spec.omega_r();
    let minus = checked(level, w - wr, spec.resonance_tol)?;
    let plus = checked(level, w + wr, spec.resonance_tol)?;
    Ok(2.0 * g2 * w / (minus * plus))
}

/// Coefficients of `a†a σ_{k,k}` and `σ_{k,k}` in the dispersive Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelShift {
    pub photon_number: f64,
    pub constant: f64,
}

/// Per-level dispersive Hamiltonian coefficients for levels `0..N`.
pub fn h2_coefficients(spec: &SystemSpec, model: InteractionModel) -> Result<Vec<LevelShift>> {
    (0..spec.qubit.num_levels() as isize)
        .map(|k| {
            Ok(match model {
                InteractionModel::Rabi => LevelShift {
                    photon_number: chi_tilde(spec, k - 1)? - chi_tilde(spec, k)?,
                    constant: chi(spec, k - 1)? - xi(spec, k)?,
                },
                InteractionModel::JaynesCummings => {
                    LevelShift { photon_number: chi(spec, k - 1)? - chi(spec, k)?, constant: chi(spec, k - 1)? }
                }
            })
        })
        .collect()
}

/// Correction to the one-photon energy with the qubit in its ground state.
pub fn resonator_pull(spec: &SystemSpec, model: InteractionModel) -> Result<f64> {
    Ok(match model {
        InteractionModel::Rabi => -chi_tilde(spec, 0)?,
        InteractionModel::JaynesCummings => -chi(spec, 0)?,
    })
}

/// Correction to the `0 → 1` qubit transition with the resonator empty.
pub fn qubit_shift(spec: &SystemSpec, model: InteractionModel) -> Result<f64> {
    Ok(match model {
        InteractionModel::Rabi => chi(spec, 0)? - xi(spec, 1)? + xi(spec, 0)?,
        InteractionModel::JaynesCummings => chi(spec, 0)?,
    })
}

/// Analytic dispersive corrections at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    /// `χ_k` for `k ∈ [0, N−2]`.
    pub chi: Vec<f64>,
    pub xi: Vec<f64>,
    pub chi_tilde: Vec<f64>,
    pub resonator_pull_rabi: f64,
    pub resonator_pull_jc: f64,
    pub qubit_shift_rabi: f64,
    pub qubit_shift_jc: f64,
    pub h2_rabi: Vec<LevelShift>,
    pub h2_jc: Vec<LevelShift>,
}

impl ShiftReport {
    pub fn h2(&self, model: InteractionModel) -> &[LevelShift] {
        match model {
            InteractionModel::Rabi => &self.h2_rabi,
            InteractionModel::JaynesCummings => &self.h2_jc,
        }
    }
}

pub fn shift_report(spec: &SystemSpec) -> Result<ShiftReport> {
    let transitions = 0..spec.qubit.num_levels().saturating_sub(1) as isize;
    let chi = transitions.clone().map(|k| chi(spec, k)).collect::<Result<Vec<_>>>()?;
    let xi = transitions.clone().map(|k| xi(spec, k)).collect::<Result<Vec<_>>>()?;
    let chi_tilde = transitions.map(|k| chi_tilde(spec, k)).collect::<Result<Vec<_>>>()?;
    Ok(ShiftReport {
        resonator_pull_rabi: resonator_pull(spec, InteractionModel::Rabi)?,
        resonator_pull_jc: resonator_pull(spec, InteractionModel::JaynesCummings)?,
        qubit_shift_rabi: qubit_shift(spec, InteractionModel::Rabi)?,
        qubit_shift_jc: qubit_shift(spec, InteractionModel::JaynesCummings)?,
        h2_rabi: h2_coefficients(spec, InteractionModel::Rabi)?,
        h2_jc: h2_coefficients(spec, InteractionModel::JaynesCummings)?,
        chi,
        xi,
        chi_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn point(omega_10: f64, g0: f64, n: usize) -> SystemSpec {
        SystemSpec::transmon(omega_10, 0.25, g0, n, 5.0, 10, InteractionModel::Rabi).unwrap()
    }

    #[test]
    fn hand_evaluated_shifts() {
        let s = point(6.0, 0.1, 2);
        assert_relative_eq!(chi(&s, 0).unwrap(), 0.01, max_relative = 1e-13);
        assert_relative_eq!(xi(&s, 0).unwrap(), 0.01 / 11.0, max_relative = 1e-13);
        assert_relative_eq!(chi_tilde(&s, 0).unwrap(), 0.12 / 11.0, max_relative = 1e-13);
    }

    #[test]
    fn decoupled_shifts_vanish() {
        let s = point(6.0, 0.0, 3);
        let r = shift_report(&s).unwrap();
        assert!(r.chi.iter().chain(&r.xi).chain(&r.chi_tilde).all(|&v| v == 0.0));
        assert_eq!(r.resonator_pull_rabi, 0.0);
        assert_eq!(r.qubit_shift_jc, 0.0);
    }

    #[test]
    fn uncoupled_resonance_is_harmless() {
        let s = point(5.0, 0.0, 3);
        assert_eq!(chi(&s, 0).unwrap(), 0.0);
        assert_eq!(shift_report(&s).unwrap().resonator_pull_jc, 0.0);
    }

    #[test]
    fn resonance_is_an_error() {
        let s = point(5.0, 0.1, 2);
        assert!(matches!(chi(&s, 0), Err(Error::ResonantDivergence { level: 0, .. })));
        assert!(matches!(chi_tilde(&s, 0), Err(Error::ResonantDivergence { level: 0, .. })));
        assert!(xi(&s, 0).is_ok());
        assert!(matches!(shift_report(&s), Err(Error::ResonantDivergence { level: 0, .. })));
    }

    #[test]
    fn second_level_resonance_reports_level() {
        // ω21 = 5.25 − 0.25 = ω_r
        let s = point(5.25, 0.1, 3);
        assert!(matches!(shift_report(&s), Err(Error::ResonantDivergence { level: 1, .. })));
    }

    #[test]
    fn out_of_range_levels_contribute_nothing() {
        let s = point(6.0, 0.1, 2);
        for k in [-3, -1, 1, 7] {
            assert_eq!(chi(&s, k).unwrap(), 0.0);
            assert_eq!(xi(&s, k).unwrap(), 0.0);
            assert_eq!(chi_tilde(&s, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_level_h2_coefficients() {
        let s = point(6.0, 0.1, 2);
        let ct = chi_tilde(&s, 0).unwrap();
        let rabi = h2_coefficients(&s, InteractionModel::Rabi).unwrap();
        assert_eq!(rabi[0].photon_number, -ct);
        assert_eq!(rabi[0].constant, -xi(&s, 0).unwrap());
        assert_eq!(rabi[1].photon_number, ct);
        assert_eq!(rabi[1].constant, chi(&s, 0).unwrap());
        // −χ̃0(σz/2 + a†a σz) with σz = σ00 − σ11: splitting of the constants is χ̃0
        assert_relative_eq!(rabi[1].constant - rabi[0].constant, ct, max_relative = 1e-14);
        let jc = h2_coefficients(&s, InteractionModel::JaynesCummings).unwrap();
        assert_relative_eq!(jc[0].photon_number, -0.01, max_relative = 1e-13);
        assert_eq!(jc[0].constant, 0.0);
        assert_relative_eq!(jc[1].photon_number, 0.01, max_relative = 1e-13);
        assert_relative_eq!(jc[1].constant, 0.01, max_relative = 1e-13);
    }

    #[test]
    fn decoupled_h2_is_zero() {
        let s = point(6.0, 0.0, 4);
        for model in InteractionModel::ALL {
            for c in h2_coefficients(&s, model).unwrap() {
                assert_eq!(c, LevelShift { photon_number: 0.0, constant: 0.0 });
            }
        }
    }

    #[test]
    fn transmon_qubit_shift_uses_bloch_siegert_of_second_level() {
        let s = point(6.0, 0.1, 3);
        let r = shift_report(&s).unwrap();
        assert_relative_eq!(r.qubit_shift_rabi, r.chi[0] - r.xi[1] + r.xi[0], max_relative = 1e-15);
        assert_relative_eq!(r.qubit_shift_jc, r.chi[0]);
    }

    #[test]
    fn pulls_at_reference_point() {
        let r = shift_report(&point(6.0, 0.1, 3)).unwrap();
        assert_relative_eq!(r.resonator_pull_rabi * 1e3, -120.0 / 11.0, max_relative = 1e-12);
        assert_relative_eq!(r.resonator_pull_jc * 1e3, -10.0, max_relative = 1e-12);
        assert_relative_eq!(r.chi_tilde[0] / r.chi[0], 12.0 / 11.0, max_relative = 1e-13);
    }

    #[test]
    fn pulls_vanish_far_detuned() {
        let r = shift_report(&point(1e7, 0.1, 2)).unwrap();
        assert!(r.resonator_pull_rabi.abs() < 1e-8);
        assert!(r.resonator_pull_jc.abs() < 1e-8);
    }

    #[test]
    fn angular_and_ordinary_units_agree() {
        let two_pi = std::f64::consts::TAU;
        let s = point(6.3, 0.12, 3);
        let mut a = s.clone();
        a.qubit.level_energies.iter_mut().for_each(|w| *w *= two_pi);
        a.qubit.couplings.iter_mut().for_each(|g| *g *= two_pi);
        a.resonator.omega_r *= two_pi;
        for k in 0..2 {
            assert_relative_eq!(chi(&a, k).unwrap() / two_pi, chi(&s, k).unwrap(), max_relative = 1e-13);
            assert_relative_eq!(chi_tilde(&a, k).unwrap() / two_pi, chi_tilde(&s, k).unwrap(), max_relative = 1e-13);
        }
    }

    proptest! {
        #[test]
        fn chi_tilde_is_chi_plus_xi(w in 0.5f64..12.0, g in 0.0f64..0.3, wr in 1.0f64..10.0) {
            prop_assume!((w - wr).abs() > 1e-3);
            let s = SystemSpec::transmon(w, 0.2, g, 3, wr, 4, InteractionModel::Rabi).unwrap();
            for k in 0..2 {
                let ct = chi_tilde(&s, k).unwrap();
                let sum = chi(&s, k).unwrap() + xi(&s, k).unwrap();
                prop_assert!((ct - sum).abs() <= 1e-12 * ct.abs().max(1e-300));
            }
        }

        #[test]
        fn rabi_jc_pull_ratio(w in 0.5f64..12.0, g in 0.01f64..0.3, wr in 1.0f64..10.0) {
            prop_assume!((w - wr).abs() > 1e-3);
            let s = SystemSpec::transmon(w, 0.2, g, 2, wr, 4, InteractionModel::Rabi).unwrap();
            let r = shift_report(&s).unwrap();
            let ratio = r.resonator_pull_rabi / r.resonator_pull_jc;
            prop_assert!((ratio / (2.0 * w / (w + wr)) - 1.0).abs() <= 1e-12);
            prop_assert_eq!(r.chi_tilde[0].abs() > r.chi[0].abs(), w > wr);
        }
    }
}
