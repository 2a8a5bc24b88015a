//! Incoherent rates: second-order qubit and resonator dissipation, and the
//! fourth-order Purcell, dressed-dephasing and photon-assisted dephasing
//! channels for both interaction models.
//!
//! Prefactors are dimensionless; rates are prefactors times bath spectra and
//! therefore in MHz.

use crate::bath::Baths;
use crate::error::{Error, Result};
use crate::model::{InteractionModel, SystemSpec};

/// Qubit factor of a jump operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitOp {
    Identity,
    /// `σ_{k,k+1}`
    Lower(usize),
    /// `σ_{k+1,k}`
    Raise(usize),
    /// `σ_{k,k}`
    Project(usize),
}

/// Resonator factor of a jump operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhotonOp {
    Identity,
    Annihilate,
    Create,
}

/// A jump operator `qubit ⊗ photon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JumpOperator {
    pub qubit: QubitOp,
    pub photon: PhotonOp,
}

impl JumpOperator {
    pub const fn new(qubit: QubitOp, photon: PhotonOp) -> Self {
        Self { qubit, photon }
    }

    pub const fn qubit(qubit: QubitOp) -> Self {
        Self::new(qubit, PhotonOp::Identity)
    }

    pub const fn photon(photon: PhotonOp) -> Self {
        Self::new(QubitOp::Identity, photon)
    }

    pub fn is_product(&self) -> bool {
        self.qubit != QubitOp::Identity && self.photon != PhotonOp::Identity
    }

    /// Short label, e.g. `s01*ad`.
    pub fn label(&self) -> String {
        let q = match self.qubit {
            QubitOp::Identity => None,
            QubitOp::Lower(k) => Some(format!("s{}{}", k, k + 1)),
            QubitOp::Raise(k) => Some(format!("s{}{}", k + 1, k)),
            QubitOp::Project(k) => Some(format!("s{k}{k}")),
        };
        let p = match self.photon {
            PhotonOp::Identity => None,
            PhotonOp::Annihilate => Some("a".to_string()),
            PhotonOp::Create => Some("ad".to_string()),
        };
        match (q, p) {
            (Some(q), Some(p)) => format!("{q}*{p}"),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => "id".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    SecondOrder,
    Purcell,
    DressedDephasing,
    PhotonAssistedDephasing,
    DrivenEffective,
}

/// A jump operator with its non-negative rate in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorTerm {
    pub jump: JumpOperator,
    pub rate: f64,
    pub origin: Origin,
}

impl DissipatorTerm {
    pub fn new(jump: JumpOperator, rate: f64, origin: Origin) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::NegativeRate(rate));
        }
        let product_allowed = matches!(origin, Origin::DressedDephasing | Origin::PhotonAssistedDephasing);
        if jump.is_product() && !product_allowed {
            return Err(Error::InvalidDissipator(format!(
                "product jump operator {} is not allowed for {origin:?} terms",
                jump.label()
            )));
        }
        Ok(Self { jump, rate, origin })
    }
}

/// Second-order dissipators: qubit decay/excitation/dephasing and photon
/// loss/gain.
pub fn second_order_rates(spec: &SystemSpec, baths: &Baths) -> Result<Vec<DissipatorTerm>> {
    let q = &spec.qubit;
    let mut terms = Vec::new();
    for k in 0..q.num_levels() - 1 {
        let w = q.splitting(k as isize).expect("transition in range");
        let b2 = q.beta(k as isize).powi(2);
        terms.push(DissipatorTerm::new(
            JumpOperator::qubit(QubitOp::Lower(k)),
            b2 * baths.x.evaluate(w),
            Origin::SecondOrder,
        )?);
        terms.push(DissipatorTerm::new(
            JumpOperator::qubit(QubitOp::Raise(k)),
            b2 * baths.x.evaluate(-w),
            Origin::SecondOrder,
        )?);
    }
    let dephasing_dc = baths.z.evaluate(0.0);
    for k in 0..q.num_levels() {
        let rate = q.dephasing(k as isize).powi(2) * dephasing_dc;
        terms.push(DissipatorTerm::new(JumpOperator::qubit(QubitOp::Project(k)), rate, Origin::SecondOrder)?);
    }
    let wr = spec.omega_r();
    terms.push(DissipatorTerm::new(
        JumpOperator::photon(PhotonOp::Annihilate),
        baths.r.evaluate(wr),
        Origin::SecondOrder,
    )?);
    terms.push(DissipatorTerm::new(
        JumpOperator::photon(PhotonOp::Create),
        baths.r.evaluate(-wr),
        Origin::SecondOrder,
    )?);
    Ok(terms)
}

fn nonresonant(level: usize, denominator: f64, tol: f64) -> Result<f64> {
    if denominator.abs() < tol {
        Err(Error::ResonantDivergence { level, denominator })
    } else {
        Ok(denominator)
    }
}

/// Purcell prefactor `p_k`.
pub fn purcell_prefactor(spec: &SystemSpec, k: isize, model: InteractionModel) -> Result<f64> {
    let Some(w) = spec.qubit.splitting(k).filter(|_| spec.qubit.coupling(k) != 0.0) else { return Ok(0.0) };
    let (level, g2, wr, tol) = (k as usize, spec.qubit.coupling(k).powi(2), spec.omega_r(), spec.resonance_tol);
    let minus = nonresonant(level, wr - w, tol)?;
    Ok(match model {
        InteractionModel::Rabi => {
            let plus = nonresonant(level, wr + w, tol)?;
            8.0 * g2 * wr * wr / (minus * plus).powi(2)
        }
        InteractionModel::JaynesCummings => 2.0 * g2 / (minus * minus),
    })
}

/// Purcell decay and excitation rates `(γ_P↓, γ_P↑)`, probing the resonator
/// bath at the qubit transition frequency.
pub fn purcell_rates(spec: &SystemSpec, k: isize, baths: &Baths, model: InteractionModel) -> Result<(f64, f64)> {
    let Some(w) = spec.qubit.splitting(k) else { return Ok((0.0, 0.0)) };
    let p = purcell_prefactor(spec, k, model)?;
    Ok((p * baths.r.evaluate(w), p * baths.r.evaluate(-w)))
}

/// Dressed-dephasing prefactors `(d_k, c_k)`.
pub fn dressed_dephasing_prefactors(spec: &SystemSpec, k: isize, model: InteractionModel) -> Result<(f64, f64)> {
    let q = &spec.qubit;
    let Some(w) = q.splitting(k).filter(|_| q.coupling(k) != 0.0) else { return Ok((0.0, 0.0)) };
    let wr = spec.omega_r();
    let numerator = 2.0 * q.coupling(k).powi(2) * (q.dephasing(k) - q.dephasing(k + 1)).powi(2);
    let minus = nonresonant(k as usize, wr - w, spec.resonance_tol)?;
    let d = numerator / (minus * minus);
    let c = match model {
        InteractionModel::Rabi => numerator / (wr + w).powi(2),
        InteractionModel::JaynesCummings => 0.0,
    };
    Ok((d, c))
}

/// Photon-assisted dephasing prefactor `a_k`, defined for every level
/// `k ∈ [0, N−1]`.
pub fn photon_assisted_dephasing_prefactor(spec: &SystemSpec, k: isize, model: InteractionModel) -> Result<f64> {
    let q = &spec.qubit;
    let wr = spec.omega_r();
    let tol = spec.resonance_tol;
    // (amplitude, splitting, transition index) for the k and k−1 transitions
    let leg = |j: isize| -> Result<Option<(f64, f64, f64)>> {
        let amp = q.coupling(j) * q.beta(j);
        let Some(w) = q.splitting(j).filter(|_| amp != 0.0) else { return Ok(None) };
        let denom = match model {
            InteractionModel::Rabi => {
                let minus = nonresonant(j as usize, wr - w, tol)?;
                let plus = nonresonant(j as usize, wr + w, tol)?;
                minus * plus
            }
            InteractionModel::JaynesCummings => nonresonant(j as usize, wr - w, tol)?,
        };
        Ok(Some((amp, w, denom)))
    };
    // For Rabi each leg contributes 2√2 g β ω/(ω_r² − ω²), for JC √2 g β/(ω_r − ω);
    // a_k is the squared difference of the two legs.
    let amplitude = |l: Option<(f64, f64, f64)>| match (l, model) {
        (None, _) => 0.0,
        (Some((amp, w, denom)), InteractionModel::Rabi) => amp * w / denom,
        (Some((amp, _, denom)), InteractionModel::JaynesCummings) => amp / denom,
    };
    let upper = amplitude(leg(k)?);
    let lower = amplitude(leg(k - 1)?);
    let scale = match model {
        InteractionModel::Rabi => 8.0,
        InteractionModel::JaynesCummings => 2.0,
    };
    Ok(scale * (upper * upper + lower * lower - 2.0 * upper * lower))
}

/// Dimensionless fourth-order prefactors of one qubit level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefactors {
    pub level: usize,
    /// `p_k`
    pub purcell: f64,
    /// `d_k`
    pub dressed_difference: f64,
    /// `c_k`
    pub dressed_sum: f64,
    /// `a_k`
    pub photon_assisted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourthOrder {
    pub model: InteractionModel,
    pub prefactors: Vec<Prefactors>,
    pub terms: Vec<DissipatorTerm>,
}

pub fn fourth_order(spec: &SystemSpec, baths: &Baths, model: InteractionModel) -> Result<FourthOrder> {
    use PhotonOp::{Annihilate, Create};
    let q = &spec.qubit;
    let wr = spec.omega_r();
    let mut prefactors = Vec::with_capacity(q.num_levels());
    let mut terms = Vec::new();
    for k in 0..q.num_levels() {
        let ki = k as isize;
        let p = purcell_prefactor(spec, ki, model)?;
        let (d, c) = dressed_dephasing_prefactors(spec, ki, model)?;
        let a = photon_assisted_dephasing_prefactor(spec, ki, model)?;
        prefactors.push(Prefactors { level: k, purcell: p, dressed_difference: d, dressed_sum: c, photon_assisted: a });

        if let Some(w) = q.splitting(ki) {
            let (lower, raise) = (QubitOp::Lower(k), QubitOp::Raise(k));
            let mut push = |jump, rate, origin| -> Result<()> {
                terms.push(DissipatorTerm::new(jump, rate, origin)?);
                Ok(())
            };
            push(JumpOperator::qubit(lower), p * baths.r.evaluate(w), Origin::Purcell)?;
            push(JumpOperator::qubit(raise), p * baths.r.evaluate(-w), Origin::Purcell)?;
            push(JumpOperator::new(lower, Create), d * baths.z.evaluate(w - wr), Origin::DressedDephasing)?;
            push(JumpOperator::new(raise, Annihilate), d * baths.z.evaluate(wr - w), Origin::DressedDephasing)?;
            push(JumpOperator::new(lower, Annihilate), c * baths.z.evaluate(wr + w), Origin::DressedDephasing)?;
            push(JumpOperator::new(raise, Create), c * baths.z.evaluate(-w - wr), Origin::DressedDephasing)?;
        }
        let project = QubitOp::Project(k);
        terms.push(DissipatorTerm::new(
            JumpOperator::new(project, Annihilate),
            a * baths.x.evaluate(wr),
            Origin::PhotonAssistedDephasing,
        )?);
        terms.push(DissipatorTerm::new(
            JumpOperator::new(project, Create),
            a * baths.x.evaluate(-wr),
            Origin::PhotonAssistedDephasing,
        )?);
    }
    Ok(FourthOrder { model, prefactors, terms })
}

/// All rates for one parameter point, both interaction models.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub second_order: Vec<DissipatorTerm>,
    pub rabi: FourthOrder,
    pub jc: FourthOrder,
}

impl RateTable {
    pub fn compute(spec: &SystemSpec, baths: &Baths) -> Result<Self> {
        Ok(Self {
            second_order: second_order_rates(spec, baths)?,
            rabi: fourth_order(spec, baths, InteractionModel::Rabi)?,
            jc: fourth_order(spec, baths, InteractionModel::JaynesCummings)?,
        })
    }

    pub fn fourth_order(&self, model: InteractionModel) -> &FourthOrder {
        match model {
            InteractionModel::Rabi => &self.rabi,
            InteractionModel::JaynesCummings => &self.jc,
        }
    }
}

/// Qubit-only rates in a resonator driven to `n` photons.
///
/// Tracing out the resonator after displacing `a → ã + α` turns every
/// correlated qubit-photon dissipator `D[q ⊗ a^(†)]` into `n·D[q]`, so the
/// effective rate of each qubit operator is `n` times the sum of its
/// dressed-dephasing (or photon-assisted dephasing) partners.
pub fn driven_effective_rates(fourth_order: &[DissipatorTerm], n_photons: f64) -> Result<Vec<DissipatorTerm>> {
    if !(n_photons >= 0.0) {
        return Err(Error::NegativePhotonNumber(n_photons));
    }
    if n_photons == 0.0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<DissipatorTerm> = Vec::new();
    for term in fourth_order {
        let correlated = matches!(term.origin, Origin::DressedDephasing | Origin::PhotonAssistedDephasing);
        if !correlated || term.jump.photon == PhotonOp::Identity {
            continue;
        }
        let jump = JumpOperator::qubit(term.jump.qubit);
        match out.iter_mut().find(|t| t.jump == jump) {
            Some(existing) => existing.rate += n_photons * term.rate,
            None => out.push(DissipatorTerm::new(jump, n_photons * term.rate, Origin::DrivenEffective)?),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::SpectralFunction;
    use crate::model::{QubitSpec, ResonatorSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const RABI: InteractionModel = InteractionModel::Rabi;
    const JC: InteractionModel = InteractionModel::JaynesCummings;

    fn reference_point(omega_10: f64) -> SystemSpec {
        SystemSpec::transmon(omega_10, 0.25, 0.1, 3, 5.0, 10, RABI).unwrap()
    }

    fn rate(terms: &[DissipatorTerm], jump: JumpOperator) -> f64 {
        terms.iter().filter(|t| t.jump == jump).map(|t| t.rate).sum()
    }

    #[test]
    fn zero_temperature_has_no_upward_rates() {
        let baths = Baths {
            x: SpectralFunction::ohmic(1.0, 50.0, 0.0),
            z: SpectralFunction::flat(1.0, 0.0),
            r: SpectralFunction::ohmic(0.5, 50.0, 0.0),
        };
        let s = reference_point(6.0);
        let terms = second_order_rates(&s, &baths).unwrap();
        assert_eq!(rate(&terms, JumpOperator::qubit(QubitOp::Raise(0))), 0.0);
        assert_eq!(rate(&terms, JumpOperator::photon(PhotonOp::Create)), 0.0);
        assert!(rate(&terms, JumpOperator::photon(PhotonOp::Annihilate)) > 0.0);
        let (_, up) = purcell_rates(&s, 0, &baths, RABI).unwrap();
        assert_eq!(up, 0.0);
    }

    #[test]
    fn decay_probes_transverse_bath_at_splitting() {
        let baths = Baths { x: SpectralFunction::ohmic(1.0, f64::INFINITY, 0.0), ..Baths::default() };
        let s = reference_point(6.0);
        let terms = second_order_rates(&s, &baths).unwrap();
        assert_relative_eq!(rate(&terms, JumpOperator::qubit(QubitOp::Lower(0))), 6.0, max_relative = 1e-14);
        // β_1² = 2, ω21 = 5.75
        assert_relative_eq!(rate(&terms, JumpOperator::qubit(QubitOp::Lower(1))), 11.5, max_relative = 1e-14);
    }

    #[test]
    fn insensitive_levels_do_not_dephase() {
        let mut s = reference_point(6.0);
        s.qubit.dephasing_sensitivities = vec![0.0; 3];
        let baths = Baths { z: SpectralFunction::flat(3.0, 0.1), ..Baths::default() };
        let terms = second_order_rates(&s, &baths).unwrap();
        assert!(terms.iter().filter(|t| matches!(t.jump.qubit, QubitOp::Project(_))).all(|t| t.rate == 0.0));
    }

    #[test]
    fn purcell_prefactor_examples() {
        let s = reference_point(6.0);
        assert_relative_eq!(purcell_prefactor(&s, 0, RABI).unwrap(), 8.0 * 0.01 * 25.0 / 121.0, max_relative = 1e-13);
        assert_relative_eq!(purcell_prefactor(&s, 0, RABI).unwrap(), 0.016528925619834711, max_relative = 1e-13);
        assert_relative_eq!(purcell_prefactor(&s, 0, JC).unwrap(), 0.02, max_relative = 1e-13);
        let ratio = purcell_prefactor(&s, 0, RABI).unwrap() / purcell_prefactor(&s, 0, JC).unwrap();
        assert_relative_eq!(ratio, 100.0 / 121.0, max_relative = 1e-13);
        let off = SystemSpec::transmon(6.0, 0.25, 0.0, 3, 5.0, 10, RABI).unwrap();
        assert_eq!(purcell_prefactor(&off, 0, RABI).unwrap(), 0.0);
        assert!(matches!(
            purcell_prefactor(&reference_point(5.0), 0, JC),
            Err(Error::ResonantDivergence { level: 0, .. })
        ));
    }

    #[test]
    fn flat_resonator_bath_factorizes() {
        let baths = Baths { r: SpectralFunction::flat(1.0, 0.0), ..Baths::default() };
        let s = reference_point(6.0);
        let (down, up) = purcell_rates(&s, 0, &baths, RABI).unwrap();
        assert_relative_eq!(down, purcell_prefactor(&s, 0, RABI).unwrap(), max_relative = 1e-15);
        assert_eq!(up, 0.0);
    }

    #[test]
    fn dressed_dephasing_examples() {
        let mut s = SystemSpec::transmon(6.0, 0.25, 0.1, 2, 5.0, 10, RABI).unwrap();
        s.qubit.dephasing_sensitivities = vec![1.0, -1.0];
        let (d, c) = dressed_dephasing_prefactors(&s, 0, RABI).unwrap();
        assert_relative_eq!(d, 0.08, max_relative = 1e-13);
        assert_relative_eq!(c, 0.08 / 121.0, max_relative = 1e-13);
        assert_relative_eq!(c, 6.611570247933884e-4, max_relative = 1e-12);
        let (d_jc, c_jc) = dressed_dephasing_prefactors(&s, 0, JC).unwrap();
        assert_eq!(d_jc, d);
        assert_eq!(c_jc, 0.0);
        s.qubit.dephasing_sensitivities = vec![0.7, 0.7];
        assert_eq!(dressed_dephasing_prefactors(&s, 0, RABI).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn photon_assisted_examples() {
        let s = reference_point(6.0);
        let a_rabi = photon_assisted_dephasing_prefactor(&s, 0, RABI).unwrap();
        let a_jc = photon_assisted_dephasing_prefactor(&s, 0, JC).unwrap();
        assert_relative_eq!(a_rabi, 8.0 * 0.01 * 36.0 / 121.0, max_relative = 1e-13);
        assert_relative_eq!(a_rabi, 0.023801652892561982, max_relative = 1e-13);
        assert_relative_eq!(a_jc, 0.02, max_relative = 1e-13);
        assert_relative_eq!(a_rabi / a_jc, 144.0 / 121.0, max_relative = 1e-13);
    }

    /// Three-term expansion written out literally, as an independent route.
    fn a_expanded(s: &SystemSpec, k: isize, model: InteractionModel) -> f64 {
        let q = &s.qubit;
        let wr = s.omega_r();
        let (g, gm, b, bm) = (q.coupling(k), q.coupling(k - 1), q.beta(k), q.beta(k - 1));
        let w = q.splitting(k).unwrap_or(0.0);
        let wm = q.splitting(k - 1).unwrap_or(0.0);
        match model {
            InteractionModel::Rabi => {
                8.0 * g * g * b * b * w * w / (wr * wr - w * w).powi(2)
                    + 8.0 * gm * gm * bm * bm * wm * wm / (wr * wr - wm * wm).powi(2)
                    - 16.0 * g * gm * b * bm * w * wm / ((wr * wr - wm * wm) * (wr * wr - w * w))
            }
            InteractionModel::JaynesCummings => {
                2.0 * g * g * b * b / (wr - w).powi(2) + 2.0 * gm * gm * bm * bm / (wr - wm).powi(2)
                    - 4.0 * g * gm * b * bm / ((wr - wm) * (wr - w))
            }
        }
    }

    #[test]
    fn photon_assisted_matches_expanded_form_on_every_level() {
        let s = SystemSpec::transmon(6.3, 0.3, 0.12, 5, 5.0, 4, RABI).unwrap();
        for model in InteractionModel::ALL {
            for k in 0..5 {
                let a = photon_assisted_dephasing_prefactor(&s, k, model).unwrap();
                let b = a_expanded(&s, k, model);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-12), "k={k} {model}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn top_level_still_dephases_through_lower_leg() {
        let s = reference_point(6.0);
        assert!(photon_assisted_dephasing_prefactor(&s, 2, RABI).unwrap() > 0.0);
        assert_eq!(purcell_prefactor(&s, 2, RABI).unwrap(), 0.0);
    }

    #[test]
    fn product_terms_only_for_correlated_origins() {
        let j = JumpOperator::new(QubitOp::Lower(0), PhotonOp::Create);
        assert!(DissipatorTerm::new(j, 1.0, Origin::Purcell).is_err());
        assert!(DissipatorTerm::new(j, 1.0, Origin::DressedDephasing).is_ok());
        assert!(matches!(
            DissipatorTerm::new(JumpOperator::photon(PhotonOp::Annihilate), -1.0, Origin::SecondOrder),
            Err(Error::NegativeRate(_))
        ));
    }

    fn noisy_baths(t: f64) -> Baths {
        Baths {
            x: SpectralFunction::ohmic(0.3, 40.0, t),
            z: SpectralFunction::one_over_f(2.0, 1e-3, t),
            r: SpectralFunction::ohmic(0.2, 40.0, t),
        }
    }

    #[test]
    fn driven_rates_examples() {
        let mut s = SystemSpec::transmon(6.0, 0.25, 0.1, 2, 5.0, 10, RABI).unwrap();
        s.qubit.dephasing_sensitivities = vec![1.0, -1.0];
        let baths = noisy_baths(0.1);
        let table = RateTable::compute(&s, &baths).unwrap();
        assert!(driven_effective_rates(&table.rabi.terms, 0.0).unwrap().is_empty());
        assert_eq!(driven_effective_rates(&table.rabi.terms, -1.0), Err(Error::NegativePhotonNumber(-1.0)));

        let driven = driven_effective_rates(&table.rabi.terms, 10.0).unwrap();
        let expected = 10.0 * (0.08 * baths.z.evaluate(1.0) + (0.08 / 121.0) * baths.z.evaluate(11.0));
        assert_relative_eq!(rate(&driven, JumpOperator::qubit(QubitOp::Lower(0))), expected, max_relative = 1e-13);
        assert!(driven.iter().all(|t| t.origin == Origin::DrivenEffective && !t.jump.is_product()));

        let doubled = driven_effective_rates(&table.rabi.terms, 20.0).unwrap();
        for (a, b) in driven.iter().zip(&doubled) {
            assert_eq!(a.jump, b.jump);
            assert_relative_eq!(b.rate, 2.0 * a.rate, max_relative = 1e-15);
        }
    }

    #[test]
    fn rate_table_shapes() {
        let s = reference_point(6.0);
        let t = RateTable::compute(&s, &noisy_baths(0.05)).unwrap();
        // 2 per transition + 1 per level + 2 photon terms
        assert_eq!(t.second_order.len(), 2 * 2 + 3 + 2);
        // 6 per transition + 2 per level
        assert_eq!(t.rabi.terms.len(), 6 * 2 + 2 * 3);
        assert!(t.jc.prefactors.iter().all(|p| p.dressed_sum == 0.0));
        assert_eq!(t.fourth_order(JC).model, JC);
    }

    /// Closed-form two-level formulas written directly in `ω10`, `ω_r`, `g0`.
    #[test]
    fn two_level_specialization() {
        let (w, wr, g) = (6.2, 5.0, 0.09);
        let qubit = QubitSpec {
            level_energies: vec![0.0, w],
            couplings: vec![g],
            transverse_couplings: vec![1.0],
            dephasing_sensitivities: vec![1.0, -1.0],
        };
        let s = SystemSpec::new(qubit, ResonatorSpec { omega_r: wr, fock_truncation: 4 }, RABI);
        let b = noisy_baths(0.2);
        let t = RateTable::compute(&s, &b).unwrap();
        let so = &t.second_order;
        let close = |a: f64, e: f64| assert!((a - e).abs() <= 1e-12 * e.abs(), "{a} vs {e}");
        close(rate(so, JumpOperator::qubit(QubitOp::Lower(0))), b.x.evaluate(w));
        close(rate(so, JumpOperator::qubit(QubitOp::Raise(0))), b.x.evaluate(-w));
        close(rate(so, JumpOperator::qubit(QubitOp::Project(0))), b.z.evaluate(0.0));
        close(rate(so, JumpOperator::photon(PhotonOp::Annihilate)), b.r.evaluate(wr));
        let p = 8.0 * g * g * wr * wr / (w * w - wr * wr).powi(2);
        let f = &t.rabi.terms;
        close(rate(f, JumpOperator::qubit(QubitOp::Lower(0))), p * b.r.evaluate(w));
        close(rate(f, JumpOperator::qubit(QubitOp::Raise(0))), p * b.r.evaluate(-w));
        let dd = 8.0 * g * g / (w - wr).powi(2);
        let cc = 8.0 * g * g / (w + wr).powi(2);
        close(rate(f, JumpOperator::new(QubitOp::Lower(0), PhotonOp::Create)), dd * b.z.evaluate(w - wr));
        close(rate(f, JumpOperator::new(QubitOp::Raise(0), PhotonOp::Annihilate)), dd * b.z.evaluate(wr - w));
        close(rate(f, JumpOperator::new(QubitOp::Lower(0), PhotonOp::Annihilate)), cc * b.z.evaluate(w + wr));
        close(rate(f, JumpOperator::new(QubitOp::Raise(0), PhotonOp::Create)), cc * b.z.evaluate(-w - wr));
        let a = 8.0 * g * g * w * w / (w * w - wr * wr).powi(2);
        for k in 0..2 {
            close(rate(f, JumpOperator::new(QubitOp::Project(k), PhotonOp::Annihilate)), a * b.x.evaluate(wr));
            close(rate(f, JumpOperator::new(QubitOp::Project(k), PhotonOp::Create)), a * b.x.evaluate(-wr));
        }
    }

    proptest! {
        #[test]
        fn model_ratios(w in 0.5f64..12.0, g in 0.01f64..0.3, wr in 1.0f64..10.0, alpha in 0.0f64..0.4) {
            prop_assume!((w - wr).abs() > 1e-3 && (w - alpha - wr).abs() > 1e-3);
            let s = SystemSpec::transmon(w, alpha, g, 3, wr, 4, RABI).unwrap();
            for k in 0..2isize {
                let wk = s.qubit.splitting(k).unwrap();
                let ratio = purcell_prefactor(&s, k, RABI).unwrap() / purcell_prefactor(&s, k, JC).unwrap();
                prop_assert!((ratio / (4.0 * wr * wr / (wr + wk).powi(2)) - 1.0).abs() < 1e-12);
                let (d_r, c_r) = dressed_dephasing_prefactors(&s, k, RABI).unwrap();
                let (d_j, c_j) = dressed_dephasing_prefactors(&s, k, JC).unwrap();
                prop_assert_eq!(d_r, d_j);
                prop_assert_eq!(c_j, 0.0);
                prop_assert!(c_r >= 0.0);
            }
            let ratio = photon_assisted_dephasing_prefactor(&s, 0, RABI).unwrap()
                / photon_assisted_dephasing_prefactor(&s, 0, JC).unwrap();
            prop_assert!((ratio / (4.0 * w * w / (wr + w).powi(2)) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rates_non_negative_and_balanced(w in 3.0f64..8.0, t in 0.02f64..0.5) {
            prop_assume!((w - 5.0).abs() > 0.05);
            let s = SystemSpec::transmon(w, 0.2, 0.1, 3, 5.0, 4, RABI).unwrap();
            let b = noisy_baths(t);
            let table = RateTable::compute(&s, &b).unwrap();
            for term in table.second_order.iter().chain(&table.rabi.terms).chain(&table.jc.terms) {
                prop_assert!(term.rate >= 0.0);
            }
            let (down, up) = purcell_rates(&s, 0, &b, RABI).unwrap();
            prop_assert!((up / down / (-w / t).exp() - 1.0).abs() < 1e-12);
        }
    }
}
