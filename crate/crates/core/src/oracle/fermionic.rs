//! Fermionic exact diagonalization in the antisymmetric Fock space.
//!
//! This side of the cross-validation never sees rishons, dressed sites or
//! the encoded  qubit layout. Basis states are occupation bit masks over
//! modes; operators pick up the textbook antisymmetrization sign
//! `(-1)^{#occupied modes below}` when a creation or annihilation crosses
//! the mode, and the spectrum is provably independent of the mode
//! labeling — a property tested explicitly, since it is exactly the claim
//! the encoded model rides on.
//!
//! The Hubbard constructor orders modes as `2*site + spin` (up = 0), which
//! is *not* the dressed-site order the encoder uses: agreement of the two
//! spectra is then a statement about the physics, not about shared
//! bookkeeping.

use super::{lanczos, HermitianOp};
use crate::error::{Error, Result};
use crate::Complex;

/// A number-conserving fermionic Hamiltonian on up to 16 modes:
/// `sum amp (c^dag_p c_q + c^dag_q c_p) + sum val n_a n_b` (with `a == b`
/// meaning a plain `val n_a` term).
#[derive(Debug, Clone)]
pub struct FermionEd {
    n_modes: usize,
    hoppings: Vec<(usize, usize, f64)>,
    interactions: Vec<(usize, usize, f64)>,
}

impl FermionEd {
    pub fn new(
        n_modes: usize,
        hoppings: Vec<(usize, usize, f64)>,
        interactions: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if n_modes > 16 {
            return Err(Error::SizeCapExceeded {
                what: "fermionic Fock modes",
                n: n_modes,
                cap: 16,
            });
        }
        for &(p, q, _) in &hoppings {
            if p >= n_modes || q >= n_modes || p == q {
                return Err(Error::InvalidConfig(format!("bad hopping pair ({p},{q})")));
            }
        }
        for &(a, b, _) in &interactions {
            if a >= n_modes || b >= n_modes {
                return Err(Error::InvalidConfig(format!("bad interaction pair ({a},{b})")));
            }
        }
        Ok(FermionEd { n_modes, hoppings, interactions })
    }

    /// Spin-1/2 Hubbard: `-t sum_<ij>,s (c^dag c + h.c.) + U sum n_up n_dn`
    /// with mode `2*site + spin`.
    pub fn hubbard(n_sites: usize, bonds: &[(usize, usize)], t: f64, u: f64) -> Result<Self> {
        let mut hoppings = Vec::new();
        for &(i, j) in bonds {
            for spin in 0..2 {
                hoppings.push((2 * i + spin, 2 * j + spin, -t));
            }
        }
        let interactions = (0..n_sites).map(|i| (2 * i, 2 * i + 1, u)).collect();
        FermionEd::new(2 * n_sites, hoppings, interactions)
    }

    /// One species, hopping only.
    pub fn spinless(n_sites: usize, bonds: &[(usize, usize)], t: f64) -> Result<Self> {
        let hoppings = bonds.iter().map(|&(i, j)| (i, j, -t)).collect();
        FermionEd::new(n_sites, hoppings, Vec::new())
    }

    /// Relabels the modes; the spectrum in every sector must not move.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        assert_eq!(perm.len(), self.n_modes);
        FermionEd::new(
            self.n_modes,
            self.hoppings.iter().map(|&(p, q, a)| (perm[p], perm[q], a)).collect(),
            self.interactions.iter().map(|&(a, b, v)| (perm[a], perm[b], v)).collect(),
        )
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// All occupation masks with `n` particles, ascending.
    pub fn sector_states(&self, n: usize) -> Vec<u32> {
        (0u32..1 << self.n_modes).filter(|b| b.count_ones() as usize == n).collect()
    }

    /// Sparse Hamiltonian restricted to the `n`-particle sector.
    pub fn sector_matrix(&self, n: usize) -> FermionSector {
        let states = self.sector_states(n);
        let mut row_ptr = Vec::with_capacity(states.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for &b in &states {
            let mut entries: Vec<(usize, f64)> = Vec::new();
            let mut diag = 0.0;
            for &(a, bb, v) in &self.interactions {
                let occ_a = (b >> a) & 1 == 1;
                if a == bb {
                    if occ_a {
                        diag += v;
                    }
                } else if occ_a && (b >> bb) & 1 == 1 {
                    diag += v;
                }
            }
            if diag != 0.0 {
                entries.push((states.binary_search(&b).unwrap(), diag));
            }
            for &(p, q, amp) in &self.hoppings {
                for (from, to) in [(q, p), (p, q)] {
                    if (b >> from) & 1 == 1 && (b >> to) & 1 == 0 {
                        let (b2, sign) = hop(b, from, to);
                        let col = states.binary_search(&b2).expect("same particle number");
                        entries.push((col, sign * amp));
                    }
                }
            }
            entries.sort_by_key(|e| e.0);
            // Merge duplicate columns (several terms can hit the same pair).
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (c, v) in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                cols.push(c as u32);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        FermionSector { dim: states.len(), row_ptr, cols, vals }
    }

    /// Ground energy at fixed particle number.
    pub fn ground_energy(&self, n: usize) -> Result<f64> {
        let m = self.sector_matrix(n);
        if m.dim == 0 {
            return Err(Error::InvalidConfig(format!(
                "no {n}-particle states on {} modes",
                self.n_modes
            )));
        }
        let scale: f64 = self.hoppings.iter().map(|h| 2.0 * h.2.abs()).sum::<f64>()
            + self.interactions.iter().map(|i| i.2.abs()).sum::<f64>();
        let tol = 1e-11 * scale.max(1.0);
        let (e, _) = lanczos::lowest_eigenpair(&m, None, 500, tol)?;
        Ok(e)
    }

    /// Full sorted sector spectrum, dense; for small cross-check sectors.
    pub fn sector_spectrum(&self, n: usize) -> Result<Vec<f64>> {
        let m = self.sector_matrix(n);
        if m.dim > 1200 {
            return Err(Error::SizeCapExceeded {
                what: "dense fermionic sector",
                n: m.dim,
                cap: 1200,
            });
        }
        let mut dense = nalgebra::DMatrix::<f64>::zeros(m.dim, m.dim);
        for r in 0..m.dim {
            for k in m.row_ptr[r]..m.row_ptr[r + 1] {
                dense[(r, m.cols[k] as usize)] += m.vals[k];
            }
        }
        let mut ev: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(ev)
    }
}

/// `c^dag_to c_from |b>` for occupied `from`, empty `to`: the new mask and
/// the crossing sign.
fn hop(b: u32, from: usize, to: usize) -> (u32, f64) {
    let below = |mask: u32, m: usize| (mask & ((1u32 << m) - 1)).count_ones();
    let b1 = b & !(1 << from);
    let sign = if (below(b, from) + below(b1, to)) % 2 == 0 { 1.0 } else { -1.0 };
    (b1 | (1 << to), sign)
}

/// CSR matrix of one Fock sector; real symmetric.
pub struct FermionSector {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl HermitianOp for FermionSector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex], y: &mut [Complex]) {
        for r in 0..self.dim {
            let mut acc = Complex::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k] as usize] * self.vals[k];
            }
            y[r] = acc;
        }
    }
}

/// `U = 0` reference: fill the `n` lowest single-particle levels of the
/// hopping graph (each level twice when spinful).
pub fn free_fermion_ground_energy(
    n_sites: usize,
    bonds: &[(usize, usize)],
    t: f64,
    n_particles: usize,
    spinful: bool,
) -> f64 {
    let mut adj = nalgebra::DMatrix::<f64>::zeros(n_sites, n_sites);
    for &(i, j) in bonds {
        adj[(i, j)] = -t;
        adj[(j, i)] = -t;
    }
    let mut levels: Vec<f64> = adj.symmetric_eigen().eigenvalues.iter().copied().collect();
    if spinful {
        levels = levels.iter().flat_map(|&e| [e, e]).collect();
    }
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.iter().take(n_particles).sum()
}
