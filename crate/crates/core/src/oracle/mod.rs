//! Independent exact references for every encoded-model claim.
//!
//! Nothing in this module goes through the circuit compiler or the
//! emulator, and the fermionic side never touches the encoding: it works
//! directly in the antisymmetric Fock space with its own mode ordering.
//! The pieces:
//!
//! * [`fermionic`] — exact diagonalization of the Hubbard model in a
//!   fixed-number Fock sector, plus the closed-form free-fermion filling
//!   solver for `U = 0`.
//! * [`lanczos`] — Hermitian Lanczos with full reorthogonalization, the
//!   ground-state engine for everything too big to diagonalize densely.
//! * [`sector`] — the stabilizer-sector basis of the encoded model: orbit
//!   enumeration, sparse projected operators, full/sector conversions.
//! * [`krylov`] — adaptive Krylov `exp(-i tau H)` propagation, the time
//!   evolution reference the circuit results are held against.
//!
//! Everything operates through [`HermitianOp`], a matrix-free "apply"
//! interface, so the same Lanczos/Krylov code drives sparse sector
//! matrices, fermionic sector matrices and full-space Pauli sums.

pub mod fermionic;
pub mod krylov;
pub mod lanczos;
pub mod sector;
pub mod tridiag;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::Complex;

/// Matrix-free Hermitian operator on a fixed-dimension complex space.
pub trait HermitianOp {
    fn dim(&self) -> usize;

    /// `y = A x`, overwriting `y`.
    fn apply(&self, x: &[Complex], y: &mut [Complex]);
}

/// A [`PauliSum`] acting on the full `2^n` space.
pub struct FullSpaceOp<'a> {
    sum: &'a PauliSum,
}

impl<'a> FullSpaceOp<'a> {
    /// Caps at 24 qubits: past that the dense state itself is the problem.
    pub fn new(sum: &'a PauliSum) -> Result<Self> {
        if sum.n_qubits() > 24 {
            return Err(Error::SizeCapExceeded {
                what: "full-space operator application",
                n: sum.n_qubits(),
                cap: 24,
            });
        }
        Ok(FullSpaceOp { sum })
    }
}

impl HermitianOp for FullSpaceOp<'_> {
    fn dim(&self) -> usize {
        1usize << self.sum.n_qubits()
    }

    fn apply(&self, x: &[Complex], y: &mut [Complex]) {
        y.fill(Complex::new(0.0, 0.0));
        self.sum.accumulate_matvec(x, y);
    }
}

/// Dense Hermitian matrix wrapper, used by oracle self-tests and for tiny
/// systems.
pub struct DenseOp {
    dim: usize,
    m: Vec<Complex>,
}

impl DenseOp {
    pub fn new(dim: usize, m: Vec<Complex>) -> Self {
        assert_eq!(m.len(), dim * dim);
        DenseOp { dim, m }
    }
}

impl HermitianOp for DenseOp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex], y: &mut [Complex]) {
        for r in 0..self.dim {
            let mut acc = Complex::new(0.0, 0.0);
            for c in 0..self.dim {
                acc += self.m[r * self.dim + c] * x[c];
            }
            y[r] = acc;
        }
    }
}

/// Ground energy and state of a Pauli sum over the *full* register, the
/// penalty-mode reference: stabilizer violations are pushed up by energy
/// penalties instead of being projected out. Capped at 14 qubits — the
/// point of penalty mode is small-lattice cross-validation.
pub fn full_space_ground(h: &PauliSum) -> Result<(f64, Vec<Complex>)> {
    if h.n_qubits() > 14 {
        return Err(Error::SizeCapExceeded {
            what: "penalty-mode exact diagonalization",
            n: h.n_qubits(),
            cap: 14,
        });
    }
    let op = FullSpaceOp::new(h)?;
    let tol = 1e-10 * h.coeff_one_norm().max(1.0);
    lanczos::lowest_eigenpair(&op, None, 600, tol)
}
