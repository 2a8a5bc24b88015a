//! Liouvillian superoperator for `ρ̇ = −i[H, ρ] + Σ γ D[L]ρ`.
//!
//! Time is in ns, `H` in GHz (so the commutator carries `2π`) and rates in
//! MHz (scaled by `10⁻³`). Density matrices are vectorized column-major:
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use super::operators::{adjoint, complexify, jump_matrix, C64};
use crate::dispersive::ShiftReport;
use crate::error::{Error, Result};
use crate::exact::{bare_energies, build_hamiltonian_in, ProductSpace};
use crate::model::SystemSpec;
use crate::rates::{DissipatorTerm, RateTable};

const TWO_PI: f64 = std::f64::consts::TAU;
const MHZ_PER_NS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Diagonal `H₀ + H₂` with second- and fourth-order dissipators.
    DressedAnalytic,
    /// Full `H₀ + H_int` with second-order dissipators only.
    BarePlusInteraction,
}

#[derive(Debug, Clone)]
pub struct Dissipator {
    pub jump: CsrMatrix<C64>,
    /// MHz
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    pub space: ProductSpace,
    /// GHz
    pub hamiltonian: DMatrix<f64>,
    pub dissipators: Vec<Dissipator>,
    superop: CsrMatrix<C64>,
}

impl LindbladGenerator {
    pub fn new(space: ProductSpace, hamiltonian: DMatrix<f64>, dissipators: Vec<Dissipator>) -> Result<Self> {
        let d = space.dim();
        if hamiltonian.nrows() != d || hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: hamiltonian.nrows().max(hamiltonian.ncols()) });
        }
        let asym = (&hamiltonian - hamiltonian.transpose()).amax();
        if asym > 1e-12 * hamiltonian.amax().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        for diss in &dissipators {
            if !(diss.rate >= 0.0) {
                return Err(Error::NegativeRate(diss.rate));
            }
            if diss.jump.nrows() != d || diss.jump.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: diss.jump.nrows() });
            }
        }
        let superop = superoperator(d, &hamiltonian, &dissipators);
        Ok(Self { space, hamiltonian, dissipators, superop })
    }

    /// Realizes symbolic dissipator terms on `space`; zero rates are dropped.
    pub fn realize(space: ProductSpace, terms: &[DissipatorTerm]) -> Result<Vec<Dissipator>> {
        terms
            .iter()
            .filter(|t| t.rate != 0.0)
            .map(|t| {
                if !(t.rate >= 0.0) {
                    return Err(Error::NegativeRate(t.rate));
                }
                Ok(Dissipator { jump: jump_matrix(t.jump, space)?, rate: t.rate })
            })
            .collect()
    }

    pub fn assemble(spec: &SystemSpec, shifts: &ShiftReport, rates: &RateTable, mode: Mode) -> Result<Self> {
        let space = ProductSpace::of(spec)?;
        let (hamiltonian, terms): (DMatrix<f64>, Vec<DissipatorTerm>) = match mode {
            Mode::DressedAnalytic => {
                let h2 = shifts.h2(spec.model);
                if h2.len() != space.qubit_dim {
                    return Err(Error::DimensionMismatch { expected: space.qubit_dim, found: h2.len() });
                }
                let diag = bare_energies(spec, space)
                    .into_iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let (k, n) = space.split(i);
                        e + h2[k].photon_number * n as f64 + h2[k].constant
                    })
                    .collect();
                let terms = rates.second_order.iter().chain(&rates.fourth_order(spec.model).terms).copied().collect();
                (DMatrix::from_diagonal(&DVector::from_vec(diag)), terms)
            }
            Mode::BarePlusInteraction => (build_hamiltonian_in(spec, spec.model, space)?, rates.second_order.clone()),
        };
        Self::new(space, hamiltonian, Self::realize(space, &terms)?)
    }

    /// Adds further dissipators, e.g. driven effective rates.
    pub fn with_terms(self, terms: &[DissipatorTerm]) -> Result<Self> {
        let mut dissipators = self.dissipators;
        dissipators.extend(Self::realize(self.space, terms)?);
        Self::new(self.space, self.hamiltonian, dissipators)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Superoperator acting on column-major `vec(ρ)`, in 1/ns.
    pub fn superoperator(&self) -> &CsrMatrix<C64> {
        &self.superop
    }

    pub fn apply_vec(&self, x: &[C64], out: &mut [C64]) {
        let l = &self.superop;
        let (offsets, cols, vals) = (l.row_offsets(), l.col_indices(), l.values());
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for idx in offsets[r]..offsets[r + 1] {
                acc += vals[idx] * x[cols[idx]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        self.apply_vec(rho.as_slice(), out.as_mut_slice());
        out
    }

    /// Dense evaluation of the same right-hand side without the superoperator.
    pub fn apply_direct(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let h = complexify(&self.hamiltonian);
        let mut out = (&h * rho - rho * &h) * C64::new(0.0, -TWO_PI);
        for diss in &self.dissipators {
            let l = super::operators::to_dense(&diss.jump);
            out += dissipate(&l, rho) * C64::new(diss.rate * MHZ_PER_NS, 0.0);
        }
        out
    }
}

/// `D[L]ρ = LρL† − ½{L†L, ρ}`.
pub fn dissipate(l: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let ld = l.adjoint();
    let k = &ld * l;
    l * rho * &ld - (&k * rho + rho * &k) * C64::new(0.5, 0.0)
}

fn superoperator(d: usize, h: &DMatrix<f64>, dissipators: &[Dissipator]) -> CsrMatrix<C64> {
    let mut coo = CooMatrix::new(d * d, d * d);
    // −i2π (I⊗H − Hᵀ⊗I)
    for i in 0..d {
        for j in 0..d {
            let v = h[(i, j)];
            if v == 0.0 {
                continue;
            }
            let c = C64::new(0.0, -TWO_PI * v);
            for p in 0..d {
                coo.push(i + p * d, j + p * d, c);
                coo.push(p + j * d, p + i * d, -c);
            }
        }
    }
    for diss in dissipators {
        let gamma = diss.rate * MHZ_PER_NS;
        let l = &diss.jump;
        for (p, q, lpq) in l.triplet_iter() {
            for (i, j, lij) in l.triplet_iter() {
                coo.push(i + p * d, j + q * d, lpq.conj() * lij * gamma);
            }
        }
        let k = &adjoint(l) * l;
        for (i, j, kij) in k.triplet_iter() {
            let c = -0.5 * gamma * kij;
            for p in 0..d {
                coo.push(i + p * d, j + p * d, c);
                coo.push(p + j * d, p + i * d, c);
            }
        }
    }
    CsrMatrix::from(&coo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{Baths, SpectralFunction};
    use crate::dispersive::shift_report;
    use crate::model::InteractionModel;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_matrix(d: usize, rng: &mut StdRng) -> DMatrix<C64> {
        DMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn thermal_generator(mode: Mode) -> LindbladGenerator {
        let baths = Baths {
            x: SpectralFunction::ohmic(0.05, 40.0, 0.3),
            z: SpectralFunction::one_over_f(2.0, 1e-3, 0.3),
            r: SpectralFunction::ohmic(0.2, 40.0, 0.3),
        };
        let spec = SystemSpec::transmon(6.0, 0.25, 0.1, 3, 5.0, 5, InteractionModel::Rabi).unwrap().with_baths(baths);
        let rates = RateTable::compute(&spec, &baths).unwrap();
        LindbladGenerator::assemble(&spec, &shift_report(&spec).unwrap(), &rates, mode).unwrap()
    }

    #[test]
    fn superoperator_matches_direct_route() {
        let mut rng = StdRng::seed_from_u64(1);
        for mode in [Mode::DressedAnalytic, Mode::BarePlusInteraction] {
            let g = thermal_generator(mode);
            let rho = random_matrix(g.dim(), &mut rng);
            let diff = (g.apply(&rho) - g.apply_direct(&rho)).camax();
            assert!(diff < 1e-11, "{mode:?}: {diff}");
        }
    }

    #[test]
    fn trace_and_hermiticity_preserved() {
        let mut rng = StdRng::seed_from_u64(2);
        let g = thermal_generator(Mode::DressedAnalytic);
        for _ in 0..5 {
            let rho = random_matrix(g.dim(), &mut rng);
            let out = g.apply(&rho);
            assert!(out.trace().norm() < 1e-12);
            let lhs = g.apply(&rho.adjoint());
            assert!((lhs - out.adjoint()).camax() < 1e-12);
        }
    }

    #[test]
    fn dressed_hamiltonian_is_diagonal() {
        let g = thermal_generator(Mode::DressedAnalytic);
        let off: f64 = (0..g.dim())
            .flat_map(|i| (0..g.dim()).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| g.hamiltonian[(i, j)].abs())
            .sum();
        assert_eq!(off, 0.0);
        // |0,1⟩ sits at ω_r − χ̃₀ above |0,0⟩ (plus the ground-state constant, which is zero)
        let s = g.space;
        let pull = g.hamiltonian[(s.index(0, 1), s.index(0, 1))] - g.hamiltonian[(s.index(0, 0), s.index(0, 0))] - 5.0;
        assert!((pull - (-2.0 * 0.01 * 6.0 / 11.0)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let space = ProductSpace::new(2, 2).unwrap();
        let h = DMatrix::zeros(3, 3);
        assert!(matches!(LindbladGenerator::new(space, h, vec![]), Err(Error::DimensionMismatch { .. })));
        let jump = jump_matrix(crate::rates::JumpOperator::photon(crate::rates::PhotonOp::Annihilate), space).unwrap();
        let bad = vec![Dissipator { jump, rate: -1.0 }];
        assert!(matches!(LindbladGenerator::new(space, DMatrix::zeros(4, 4), bad), Err(Error::NegativeRate(_))));
    }
}
