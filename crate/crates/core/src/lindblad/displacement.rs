//! Numerical check of the displaced-frame dissipator identity
//! `D[σ(ã† + α*)] ≃ D[σã†] + |α|² D[σ]` after tracing out the resonator.

use nalgebra::DMatrix;

use super::generator::dissipate;
use super::operators::{to_dense, C64};
use super::states::{fock_state, partial_trace_resonator, product_state};
use crate::error::{Error, Result};
use crate::exact::ProductSpace;
use crate::rates::{JumpOperator, PhotonOp, QubitOp};

/// `D(α) = exp(α a† − α* a)` on `fock_dim` states.
pub fn displacement_operator(alpha: C64, fock_dim: usize) -> DMatrix<C64> {
    let mut gen = DMatrix::zeros(fock_dim, fock_dim);
    for n in 1..fock_dim {
        let s = (n as f64).sqrt();
        gen[(n, n - 1)] = alpha * s;
        gen[(n - 1, n)] = -alpha.conj() * s;
    }
    gen.exp()
}

fn check_truncation(alpha: C64, fock_dim: usize) -> Result<()> {
    let alpha_sq = alpha.norm_sqr();
    if alpha_sq > fock_dim as f64 / 4.0 {
        return Err(Error::TruncationTooSmall { fock_dim, alpha_sq });
    }
    Ok(())
}

/// The displaced correlated operator `σ_{k,k+1} ⊗ D†a†D` and its undisplaced
/// counterpart `σ_{k,k+1} ⊗ a†`.
fn operators(alpha: C64, k: usize, space: ProductSpace) -> Result<(DMatrix<C64>, DMatrix<C64>, DMatrix<C64>)> {
    let sigma = to_dense(&super::operators::jump_matrix(
        JumpOperator::qubit(QubitOp::Lower(k)),
        ProductSpace::new(space.qubit_dim, 1)?,
    )?);
    let ad = to_dense(&super::operators::jump_matrix(
        JumpOperator::photon(PhotonOp::Create),
        ProductSpace::new(1, space.fock_dim)?,
    )?);
    // D is formed on twice the Fock space and D†a†D cut back to M states;
    // exponentiating the truncated generator directly reflects amplitude
    // off the cutoff.
    let m = space.fock_dim;
    let padded_ad =
        to_dense(&super::operators::jump_matrix(JumpOperator::photon(PhotonOp::Create), ProductSpace::new(1, 2 * m)?)?);
    let d = displacement_operator(alpha, 2 * m);
    let displaced = (d.adjoint() * padded_ad * &d).view((0, 0), (m, m)).into_owned();
    let id_r = DMatrix::identity(space.fock_dim, space.fock_dim);
    Ok((sigma.kronecker(&displaced), sigma.kronecker(&ad), sigma.kronecker(&id_r)))
}

/// Resonator test states: vacuum, one photon, and a thermal state with
/// mean occupation 0.2.
fn resonator_states(fock_dim: usize) -> Vec<DMatrix<C64>> {
    let fock = |n: usize| {
        let mut r = DMatrix::zeros(fock_dim, fock_dim);
        r[(n, n)] = C64::new(1.0, 0.0);
        r
    };
    let (vacuum, one) = (fock(0), fock(1));
    let q: f64 = 0.2 / 1.2;
    let mut thermal = DMatrix::zeros(fock_dim, fock_dim);
    let norm: f64 = (0..fock_dim).map(|n| q.powi(n as i32)).sum();
    for n in 0..fock_dim {
        thermal[(n, n)] = C64::new(q.powi(n as i32) / norm, 0.0);
    }
    vec![vacuum, one, thermal]
}

/// Qubit test states: every level, and an equal superposition of `k` and `k+1`.
fn qubit_states(qubit_dim: usize, k: usize) -> Vec<DMatrix<C64>> {
    let mut out: Vec<DMatrix<C64>> = (0..qubit_dim)
        .map(|l| {
            let mut r = DMatrix::zeros(qubit_dim, qubit_dim);
            r[(l, l)] = C64::new(1.0, 0.0);
            r
        })
        .collect();
    let mut sup = DMatrix::zeros(qubit_dim, qubit_dim);
    for (i, j) in [(k, k), (k, k + 1), (k + 1, k), (k + 1, k + 1)] {
        sup[(i, j)] = C64::new(0.5, 0.0);
    }
    out.push(sup);
    out
}

/// Largest entry of the difference between the reduced qubit generators of
/// `D[σ_{k,k+1} D†a†D]` and `D[σ_{k,k+1} a†] + |α|² D[σ_{k,k+1}]`, over
/// product test states.
pub fn verify_displacement_identity(alpha: C64, k: usize, qubit_dim: usize, fock_dim: usize) -> Result<f64> {
    check_truncation(alpha, fock_dim)?;
    let space = ProductSpace::new(qubit_dim, fock_dim)?;
    let (displaced, plain, bare) = operators(alpha, k, space)?;
    let weight = C64::new(alpha.norm_sqr(), 0.0);
    let mut worst = 0.0f64;
    for rho_q in qubit_states(qubit_dim, k) {
        for rho_r in resonator_states(fock_dim) {
            let rho = product_state(&rho_q, &rho_r);
            let lhs = partial_trace_resonator(&dissipate(&displaced, &rho), space)?;
            let rhs = partial_trace_resonator(&(dissipate(&plain, &rho) + dissipate(&bare, &rho) * weight), space)?;
            worst = worst.max((lhs - rhs).camax());
        }
    }
    Ok(worst)
}

/// Unit-rate population transfer `k+1 → k` induced by the displacement
/// alone, starting from `|k+1⟩ ⊗ |0⟩`. Equals `|α|²`.
pub fn displaced_transfer_rate(alpha: C64, k: usize, qubit_dim: usize, fock_dim: usize) -> Result<f64> {
    check_truncation(alpha, fock_dim)?;
    let space = ProductSpace::new(qubit_dim, fock_dim)?;
    let (displaced, plain, _) = operators(alpha, k, space)?;
    let rho = fock_state(space, k + 1, 0)?;
    let reduced = partial_trace_resonator(&(dissipate(&displaced, &rho) - dissipate(&plain, &rho)), space)?;
    Ok(reduced[(k, k)].re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_displacement_is_exact() {
        assert_eq!(verify_displacement_identity(C64::new(0.0, 0.0), 0, 2, 8).unwrap(), 0.0);
    }

    #[test]
    fn unit_amplitude_identity() {
        let dev = verify_displacement_identity(C64::new(0.6, 0.8), 0, 3, 16).unwrap();
        assert!(dev <= 1e-6, "{dev}");
        let dev = verify_displacement_identity(C64::new(1.0, 0.0), 1, 3, 16).unwrap();
        assert!(dev <= 1e-6, "{dev}");
    }

    #[test]
    fn deviation_shrinks_with_truncation() {
        let alpha = C64::new(1.0, 0.0);
        let coarse = verify_displacement_identity(alpha, 0, 2, 6).unwrap();
        let fine = verify_displacement_identity(alpha, 0, 2, 16).unwrap();
        assert!(fine < coarse);
    }

    #[test]
    fn transfer_scales_with_amplitude_squared() {
        let a = displaced_transfer_rate(C64::new(0.5, 0.5), 0, 2, 16).unwrap();
        let b = displaced_transfer_rate(C64::new(1.0, 1.0), 0, 2, 40).unwrap();
        assert!((a - 0.5).abs() < 1e-9, "{a}");
        assert!((b / a - 4.0).abs() < 1e-8);
    }

    #[test]
    fn truncation_guard() {
        assert!(matches!(
            verify_displacement_identity(C64::new(2.0, 0.0), 0, 2, 8),
            Err(Error::TruncationTooSmall { fock_dim: 8, .. })
        ));
    }

    #[test]
    fn displacement_is_unitary() {
        let d = displacement_operator(C64::new(0.3, -0.4), 30);
        let err = (d.adjoint() * &d - DMatrix::identity(30, 30)).camax();
        assert!(err < 1e-12);
    }
}
