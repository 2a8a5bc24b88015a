//! Steady state by a dense linear solve with the trace condition replacing
//! one equation.

use nalgebra::{DMatrix, DVector};

use super::generator::LindbladGenerator;
use super::operators::C64;
use crate::error::{Error, Result};

/// Largest superoperator dimension `d²` solved densely.
pub const DENSE_LIMIT: usize = 2500;

/// Pivot ratio below which the replaced system counts as singular.
const PIVOT_TOL: f64 = 1e-13;

pub fn steady_state(gen: &LindbladGenerator) -> Result<DMatrix<C64>> {
    let d = gen.dim();
    let n = d * d;
    if n > DENSE_LIMIT {
        return Err(Error::DimensionOverflow { dim: n, cap: DENSE_LIMIT });
    }
    let mut a = DMatrix::<C64>::zeros(n, n);
    for (i, j, v) in gen.superoperator().triplet_iter() {
        a[(i, j)] += *v;
    }
    // Row 0 is the equation for ρ_00; it becomes Σ ρ_ii = 1.
    a.row_mut(0).fill(C64::new(0.0, 0.0));
    for i in 0..d {
        a[(0, i + i * d)] = C64::new(1.0, 0.0);
    }
    let mut b = DVector::zeros(n);
    b[0] = C64::new(1.0, 0.0);

    let lu = a.lu();
    let u = lu.u();
    let pivots = u.diagonal().map(|z| z.norm());
    let (lo, hi) = (pivots.min(), pivots.max());
    if !(lo > PIVOT_TOL * hi) {
        return Err(Error::DegenerateNullSpace);
    }
    let x = lu.solve(&b).ok_or(Error::DegenerateNullSpace)?;
    let rho = DMatrix::from_column_slice(d, d, x.as_slice());
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let tr = rho.trace();
    Ok(rho / tr)
}

/// `max |Lρ|`.
pub fn residual(gen: &LindbladGenerator, rho: &DMatrix<C64>) -> f64 {
    gen.apply(rho).camax()
}
