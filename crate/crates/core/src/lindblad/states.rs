//! Initial states and reductions.

use nalgebra::{DMatrix, SymmetricEigen};

use super::operators::C64;
use crate::error::{Error, Result};
use crate::exact::{bare_energies, ProductSpace};
use crate::model::SystemSpec;

pub fn fock_state(space: ProductSpace, k: usize, n: usize) -> Result<DMatrix<C64>> {
    if k >= space.qubit_dim || n >= space.fock_dim {
        return Err(Error::InvalidState(format!(
            "|{k},{n}> lies outside the {}x{} space",
            space.qubit_dim, space.fock_dim
        )));
    }
    let d = space.dim();
    let mut rho = DMatrix::zeros(d, d);
    let i = space.index(k, n);
    rho[(i, i)] = C64::new(1.0, 0.0);
    Ok(rho)
}

pub fn ground_state(space: ProductSpace) -> DMatrix<C64> {
    fock_state(space, 0, 0).expect("ground state is always in range")
}

/// Gibbs state `∝ exp(−E/T)` of the bare energies; `T = 0` gives the ground state.
pub fn thermal_state(spec: &SystemSpec, space: ProductSpace, temperature: f64) -> Result<DMatrix<C64>> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidState(format!("temperature must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(ground_state(space));
    }
    let e = bare_energies(spec, space);
    let weights: Vec<f64> = e.iter().map(|&x| (-(x - e[0]) / temperature).exp()).collect();
    let z: f64 = weights.iter().sum();
    let d = space.dim();
    let mut rho = DMatrix::zeros(d, d);
    for (i, w) in weights.iter().enumerate() {
        rho[(i, i)] = C64::new(w / z, 0.0);
    }
    Ok(rho)
}

/// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
pub fn pure_state(psi: &[C64]) -> DMatrix<C64> {
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|c| c / norm));
    &v * v.adjoint()
}

pub fn min_eigenvalue(rho: &DMatrix<C64>) -> f64 {
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.min()
}

/// Checks Hermiticity, unit trace and positivity, each within `tol`.
pub fn check_density_matrix(rho: &DMatrix<C64>, dim: usize, tol: f64) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: rho.nrows() });
    }
    let asym = (rho - rho.adjoint()).camax();
    if asym > tol {
        return Err(Error::InvalidState(format!("not Hermitian (asymmetry {asym:e})")));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let min = min_eigenvalue(rho);
    if min < -tol {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// `Tr_r ρ`, leaving the qubit factor.
pub fn partial_trace_resonator(rho: &DMatrix<C64>, space: ProductSpace) -> Result<DMatrix<C64>> {
    let d = space.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
    }
    let n = space.qubit_dim;
    Ok(DMatrix::from_fn(n, n, |k, l| (0..space.fock_dim).map(|m| rho[(space.index(k, m), space.index(l, m))]).sum()))
}

/// `ρ_q ⊗ ρ_r` in basis order.
pub fn product_state(rho_q: &DMatrix<C64>, rho_r: &DMatrix<C64>) -> DMatrix<C64> {
    rho_q.kronecker(rho_r)
}
