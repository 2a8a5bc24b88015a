//! Exact diagonalization on the truncated qubit ⊗ Fock product space.
//!
//! Basis state `|k, n⟩` (qubit level `k`, photon number `n`) sits at index
//! `k·M + n`, where `M` is the Fock truncation.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{InteractionModel, SystemSpec};

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Overlaps at or below this are treated as a tie between two bare states.
pub const LABEL_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductSpace {
    pub qubit_dim: usize,
    pub fock_dim: usize,
}

impl ProductSpace {
    pub fn new(qubit_dim: usize, fock_dim: usize) -> Result<Self> {
        Self::with_cap(qubit_dim, fock_dim, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(qubit_dim: usize, fock_dim: usize, cap: usize) -> Result<Self> {
        let dim = qubit_dim.saturating_mul(fock_dim);
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap });
        }
        Ok(Self { qubit_dim, fock_dim })
    }

    pub fn of(spec: &SystemSpec) -> Result<Self> {
        Self::new(spec.qubit.num_levels(), spec.resonator.fock_truncation)
    }

    pub fn dim(&self) -> usize {
        self.qubit_dim * self.fock_dim
    }

    pub fn index(&self, k: usize, n: usize) -> usize {
        debug_assert!(k < self.qubit_dim && n < self.fock_dim);
        k * self.fock_dim + n
    }

    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.fock_dim, i % self.fock_dim)
    }
}

/// `ω_k + n ω_r` in basis order.
pub fn bare_energies(spec: &SystemSpec, space: ProductSpace) -> Vec<f64> {
    (0..space.dim())
        .map(|i| {
            let (k, n) = space.split(i);
            spec.qubit.level_energies[k] + n as f64 * spec.omega_r()
        })
        .collect()
}

/// `H₀ + H_int` in GHz. Real symmetric; only the upper triangle is
/// assembled and then mirrored.
pub fn build_hamiltonian(spec: &SystemSpec, model: InteractionModel) -> Result<DMatrix<f64>> {
    build_hamiltonian_in(spec, model, ProductSpace::of(spec)?)
}

pub fn build_hamiltonian_in(spec: &SystemSpec, model: InteractionModel, space: ProductSpace) -> Result<DMatrix<f64>> {
    let d = space.dim();
    let mut h = DMatrix::from_diagonal(&DVector::from_vec(bare_energies(spec, space)));
    let m = space.fock_dim;
    for k in 0..space.qubit_dim - 1 {
        let g = spec.qubit.coupling(k as isize);
        for n in 0..m {
            // σ_{k+1,k} a : |k, n+1⟩ → |k+1, n⟩
            if n + 1 < m {
                h[(space.index(k, n + 1), space.index(k + 1, n))] = g * ((n + 1) as f64).sqrt();
            }
            // σ_{k+1,k} a† : |k, n⟩ → |k+1, n+1⟩
            if model == InteractionModel::Rabi && n + 1 < m {
                h[(space.index(k, n), space.index(k + 1, n + 1))] = g * ((n + 1) as f64).sqrt();
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            h[(i, j)] = h[(j, i)];
        }
    }
    Ok(h)
}

/// Eigen-decomposition with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    /// Largest `‖Hv − λv‖` over all pairs.
    pub fn max_residual(&self, h: &DMatrix<f64>) -> f64 {
        (0..self.eigenvalues.len())
            .map(|i| {
                let v = self.eigenvectors.column(i);
                (h * v - v * self.eigenvalues[i]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = &self.eigenvectors;
        let g = v.transpose() * v - DMatrix::identity(v.ncols(), v.ncols());
        g.amax()
    }
}

pub fn diagonalize(h: &DMatrix<f64>) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: h.ncols() });
    }
    let asym = (h - h.transpose()).amax();
    if asym > 1e-12 * h.amax().max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 0).ok_or(Error::ConvergenceFailure)?;
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    Ok(Spectrum { eigenvalues, eigenvectors })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    pub eigenindex: usize,
    pub overlap: f64,
}

/// Assignment of bare product states `(k, n)` to dressed eigenstates.
///
/// Ambiguous assignments are kept and only reported when looked up.
#[derive(Debug, Clone)]
pub struct DressedLabels {
    space: ProductSpace,
    labels: Vec<Label>,
}

impl DressedLabels {
    pub fn label(&self, k: usize, n: usize) -> Label {
        self.labels[self.space.index(k, n)]
    }

    /// Eigenindex of `(k, n)`, or `AmbiguousLabeling` if the best overlap
    /// does not exceed one half.
    pub fn get(&self, k: usize, n: usize) -> Result<usize> {
        let l = self.label(k, n);
        if l.overlap <= LABEL_THRESHOLD + 1e-9 {
            return Err(Error::AmbiguousLabeling { level: k, photons: n, overlap: l.overlap });
        }
        Ok(l.eigenindex)
    }
}

/// Greedy max-overlap labeling. Bare states are visited in ascending bare
/// energy (ties by basis index); each claims the unclaimed eigenvector it
/// overlaps most, ties going to the lower eigenvalue.
pub fn label_dressed_states(spectrum: &Spectrum, spec: &SystemSpec, space: ProductSpace) -> Result<DressedLabels> {
    let d = space.dim();
    if spectrum.eigenvalues.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: spectrum.eigenvalues.len() });
    }
    let bare = bare_energies(spec, space);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| bare[a].total_cmp(&bare[b]).then(a.cmp(&b)));
    let mut claimed = vec![false; d];
    let mut labels = vec![Label { eigenindex: 0, overlap: 0.0 }; d];
    for &i in &order {
        let mut best: Option<Label> = None;
        for j in (0..d).filter(|&j| !claimed[j]) {
            let overlap = spectrum.eigenvectors[(i, j)].powi(2);
            if best.is_none_or(|b| overlap > b.overlap) {
                best = Some(Label { eigenindex: j, overlap });
            }
        }
        let best = best.expect("one unclaimed eigenvector per bare state");
        claimed[best.eigenindex] = true;
        labels[i] = best;
    }
    Ok(DressedLabels { space, labels })
}

/// Exact counterparts of the analytic resonator pull and qubit shift, in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactShifts {
    pub resonator_pull: f64,
    pub qubit_shift: f64,
}

pub fn exact_shifts(spec: &SystemSpec, model: InteractionModel) -> Result<ExactShifts> {
    let space = ProductSpace::of(spec)?;
    let h = build_hamiltonian_in(spec, model, space)?;
    let spectrum = diagonalize(&h)?;
    let labels = label_dressed_states(&spectrum, spec, space)?;
    let e = |k, n| labels.get(k, n).map(|i| spectrum.eigenvalues[i]);
    let ground = e(0, 0)?;
    Ok(ExactShifts {
        resonator_pull: e(0, 1)? - ground - spec.omega_r(),
        qubit_shift: e(1, 0)? - ground - spec.qubit.splitting(0).expect("at least two levels"),
    })
}

/// Row-major CSV dump with a `rows,cols` header line.
pub fn write_matrix_csv<W: Write>(mut out: W, m: &DMatrix<f64>) -> std::io::Result<()> {
    writeln!(out, "rows,{},cols,{}", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
