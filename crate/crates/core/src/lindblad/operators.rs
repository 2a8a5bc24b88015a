//! Jump operators as sparse matrices on the product space.

use nalgebra::{Complex, DMatrix};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};
use crate::exact::ProductSpace;
use crate::rates::{JumpOperator, PhotonOp, QubitOp};

pub type C64 = Complex<f64>;

fn qubit_entries(op: QubitOp, n: usize) -> Result<Vec<(usize, usize, f64)>> {
    let check = |k: usize| {
        if k < n {
            Ok(k)
        } else {
            Err(Error::DimensionMismatch { expected: n, found: k + 1 })
        }
    };
    Ok(match op {
        QubitOp::Identity => (0..n).map(|k| (k, k, 1.0)).collect(),
        QubitOp::Lower(k) => vec![(k, check(k + 1)?, 1.0)],
        QubitOp::Raise(k) => vec![(check(k + 1)?, k, 1.0)],
        QubitOp::Project(k) => vec![(check(k)?, k, 1.0)],
    })
}

fn photon_entries(op: PhotonOp, m: usize) -> Vec<(usize, usize, f64)> {
    match op {
        PhotonOp::Identity => (0..m).map(|n| (n, n, 1.0)).collect(),
        PhotonOp::Annihilate => (1..m).map(|n| (n - 1, n, (n as f64).sqrt())).collect(),
        PhotonOp::Create => (0..m - 1).map(|n| (n + 1, n, ((n + 1) as f64).sqrt())).collect(),
    }
}

/// Matrix of `qubit ⊗ photon` in basis order `k·M + n`.
pub fn jump_matrix(op: JumpOperator, space: ProductSpace) -> Result<CsrMatrix<C64>> {
    let q = qubit_entries(op.qubit, space.qubit_dim)?;
    let p = photon_entries(op.photon, space.fock_dim);
    let mut coo = CooMatrix::new(space.dim(), space.dim());
    for &(qi, qj, qv) in &q {
        for &(pi, pj, pv) in &p {
            coo.push(space.index(qi, pi), space.index(qj, pj), C64::new(qv * pv, 0.0));
        }
    }
    Ok(CsrMatrix::from(&coo))
}

/// Conjugate transpose.
pub fn adjoint(m: &CsrMatrix<C64>) -> CsrMatrix<C64> {
    let mut t = m.transpose();
    t.values_mut().iter_mut().for_each(|v| *v = v.conj());
    t
}

pub fn to_dense(m: &CsrMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.triplet_iter() {
        out[(i, j)] += *v;
    }
    out
}

pub fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}
