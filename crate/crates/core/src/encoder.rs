//! The encoded Hamiltonian: every operator of the constrained qubit model.
//!
//! Fermionic modes live pre-merge in the site-major order defined by
//! [`QubitLayout`]; a mode operator is built from the two Majorana
//! components
//!
//! ```text
//!     a_j = X_j Z_{j+1} Z_{j+2} ...      b_j = Y_j Z_{j+1} Z_{j+2} ...
//! ```
//!
//! so `a_j = c_j + c_j^dag` and `b_j = i(c_j^dag - c_j)` with occupation
//! `n_j = (1 - Z_j)/2` (bit 1 = occupied). Every *physical* operator is a
//! product of an even number of Majoranas, which collapses the Z tails to
//! the interior of the touched sites; after rishon-pair compression the
//! result is geometrically local. The constructions here:
//!
//! * **hopping**: per link and flavor, two Hermitian strings
//!   `S1 = a(from) g(from) g(to) b(to)` and `S2 = b(from) g(from) g(to) a(to)`
//!   (`g` the rishon Majorana facing the link); the bond Hamiltonian is
//!   `-(t/2)(S1 - S2)`.
//! * **on-site**: `U n_u n_d` expanded in Z's, exactly.
//! * **vertex stabilizers**: Z over every mode of a site; after merging, Z
//!   on the matter qubits and every incident link qubit (weight 4..6).
//! * **plaquette stabilizers**: the ordered product of the eight rishon
//!   Majoranas around a square, one factor `i` per corner. Merging yields
//!   phase -1, letters X/Y on the four bounding links plus residual Z's on
//!   up to two links just outside the square (weight 4..6).
//! * **penalties**: `alpha (1 - S)` per stabilizer and `mu (N_hat - N)^2`,
//!   both zero on the target sector.
//! * **excitations**: the corner charge operator `i g_extra a_u(0,0)` and
//!   the on-site spin flip `X_u X_d`.
//!
//! All returned operators act on the *merged* qubit register.

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Link, Plaquette, QubitLayout, Role, Site};
use crate::pauli::{Letter, MergeMap, PauliString, PauliSum};
use crate::Complex;

/// Operator factory for one lattice.
#[derive(Debug, Clone)]
pub struct Encoder {
    layout: QubitLayout,
    map: MergeMap,
}

impl Encoder {
    pub fn new(spec: LatticeSpec) -> Self {
        let layout = QubitLayout::new(spec);
        let map = layout.merge_map();
        Encoder { layout, map }
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn spec(&self) -> &LatticeSpec {
        self.layout.spec()
    }

    /// Majorana component at a mode: `letter` at the mode's pre-merge qubit,
    /// Z on every later one.
    fn majorana(&self, site: Site, role: Role, letter: Letter) -> Result<PauliString> {
        let j = self.layout.premerge_index(site, role).ok_or_else(|| {
            Error::InvalidLattice(format!("no {role} mode at {site}"))
        })?;
        let n = self.layout.n_premerge();
        let mut s = PauliString::identity(n);
        s.set_letter(j, letter)?;
        for q in j + 1..n {
            s.set_letter(q, Letter::Z)?;
        }
        Ok(s)
    }

    fn matter_flavors(&self) -> &'static [Role] {
        if self.spec().spinful {
            &[Role::U, Role::D]
        } else {
            &[Role::M]
        }
    }

    /// The two Hermitian hopping strings of one link and flavor, merged.
    /// The bond Hamiltonian is `-(t/2) (S1 - S2)`.
    pub fn hopping_pair(&self, link: Link, flavor: Role) -> Result<(PauliString, PauliString)> {
        let from = link.base;
        let to = link.far();
        let (role_out, role_in) = link.roles();
        let g_out = self.majorana(from, role_out, Letter::X)?;
        let g_in = self.majorana(to, role_in, Letter::X)?;
        let build = |first: Letter, last: Letter| -> Result<PauliString> {
            self.majorana(from, flavor, first)?
                .multiply(&g_out)?
                .multiply(&g_in)?
                .multiply(&self.majorana(to, flavor, last)?)?
                .link_merge(&self.map)
        };
        Ok((build(Letter::X, Letter::Y)?, build(Letter::Y, Letter::X)?))
    }

    /// Hopping Hamiltonian `-t sum_<ij> (c^dag_i c_j + h.c.)`, all links and
    /// flavors. Term order is load-bearing for Trotter circuits: links in
    /// canonical order, flavors u before d, `S1` before `S2`.
    pub fn hopping_sum(&self, t: f64) -> Result<PauliSum> {
        let mut h = PauliSum::empty(self.layout.n_merged());
        for &link in self.layout.links() {
            for &flavor in self.matter_flavors() {
                let (s1, s2) = self.hopping_pair(link, flavor)?;
                h.push_real(-t / 2.0, s1)?;
                h.push_real(t / 2.0, s2)?;
            }
        }
        h.canonicalize();
        Ok(h)
    }

    /// On-site repulsion `U sum_s n_u(s) n_d(s)`, including its identity and
    /// single-Z pieces so encoded energies match fermionic ones absolutely.
    pub fn onsite_sum(&self, u: f64) -> Result<PauliSum> {
        let n = self.layout.n_merged();
        let mut h = PauliSum::empty(n);
        if !self.spec().spinful {
            return Ok(h);
        }
        for site in self.spec().sites() {
            let qu = self.layout.matter_qubit(site, Role::U);
            let qd = self.layout.matter_qubit(site, Role::D);
            let zu = PauliString::single(n, qu, Letter::Z)?;
            let zd = PauliString::single(n, qd, Letter::Z)?;
            h.push_real(u / 4.0, PauliString::identity(n))?;
            h.push_real(-u / 4.0, zu.clone())?;
            h.push_real(-u / 4.0, zd.clone())?;
            h.push_real(u / 4.0, zu.multiply(&zd)?)?;
        }
        h.canonicalize();
        Ok(h)
    }

    /// Full encoded Hubbard Hamiltonian: on-site first, then hopping, the
    /// order Trotter steps use.
    pub fn hamiltonian(&self, t: f64, u: f64) -> Result<PauliSum> {
        self.onsite_sum(u)?.add(&self.hopping_sum(t)?)
    }

    /// Vertex stabilizer: Z over every pre-merge mode of the site, merged.
    pub fn vertex_stabilizer(&self, site: Site) -> Result<PauliString> {
        let mut s = PauliString::identity(self.layout.n_premerge());
        for &role in self.layout.site_modes(site) {
            let j = self.layout.premerge_index(site, role).expect("listed mode exists");
            s.set_letter(j, Letter::Z)?;
        }
        s.link_merge(&self.map)
    }

    /// Plaquette stabilizer: `prod_corners i g g` with the role pairs
    /// `(e,n)`, `(s,e)`, `(w,n)`, `(w,s)` at the lower-left, upper-left,
    /// lower-right and upper-right corners. The corner factors are
    /// site-local, so their mutual order drops out.
    pub fn plaquette_stabilizer(&self, p: Plaquette) -> Result<PauliString> {
        let corners = [
            (p.lower_left(), Role::E, Role::N),
            (p.upper_left(), Role::S, Role::E),
            (p.lower_right(), Role::W, Role::N),
            (p.upper_right(), Role::W, Role::S),
        ];
        let mut s = PauliString::identity(self.layout.n_premerge());
        for (site, r1, r2) in corners {
            s = s
                .multiply(&self.majorana(site, r1, Letter::X)?)?
                .multiply(&self.majorana(site, r2, Letter::X)?)?;
            s.mul_phase_exponent(1);
        }
        s.link_merge(&self.map)
    }

    /// All stabilizers: vertices in site order, then plaquettes.
    pub fn stabilizers(&self) -> Result<Vec<PauliString>> {
        let mut out = Vec::new();
        for site in self.spec().sites() {
            out.push(self.vertex_stabilizer(site)?);
        }
        for p in self.spec().plaquettes() {
            out.push(self.plaquette_stabilizer(p)?);
        }
        Ok(out)
    }

    /// `sum_v alpha_v (1 - S_v) + sum_p alpha_p (1 - S_p)`: non-negative,
    /// exactly zero on the stabilizer sector.
    pub fn stabilizer_penalty(&self, alpha_v: f64, alpha_p: f64) -> Result<PauliSum> {
        let n = self.layout.n_merged();
        let mut h = PauliSum::empty(n);
        for site in self.spec().sites() {
            h.push_real(alpha_v, PauliString::identity(n))?;
            h.push_real(-alpha_v, self.vertex_stabilizer(site)?)?;
        }
        for p in self.spec().plaquettes() {
            h.push_real(alpha_p, PauliString::identity(n))?;
            h.push_real(-alpha_p, self.plaquette_stabilizer(p)?)?;
        }
        h.canonicalize();
        Ok(h)
    }

    /// `mu (N_hat - n_target)^2` over the matter modes, expanded in Z's.
    pub fn number_penalty(&self, mu: f64, n_target: usize) -> Result<PauliSum> {
        let m = self.spec().n_matter_modes();
        if n_target > m {
            return Err(Error::InvalidConfig(format!(
                "target filling {n_target} exceeds {m} matter modes"
            )));
        }
        let n = self.layout.n_merged();
        let qubits = self.layout.matter_qubits();
        let c = m as f64 / 2.0 - n_target as f64;
        let mut h = PauliSum::empty(n);
        h.push_real(mu * (c * c + m as f64 / 4.0), PauliString::identity(n))?;
        for &q in &qubits {
            h.push_real(-mu * c, PauliString::single(n, q, Letter::Z)?)?;
        }
        for (i, &q1) in qubits.iter().enumerate() {
            for &q2 in &qubits[i + 1..] {
                let zz = PauliString::single(n, q1, Letter::Z)?
                    .multiply(&PauliString::single(n, q2, Letter::Z)?)?;
                h.push_real(mu / 2.0, zz)?;
            }
        }
        h.canonicalize();
        Ok(h)
    }

    /// The corner charge operator `i g_extra a_u(0,0)`: Hermitian, squares
    /// to one, commutes with every stabilizer, and moves the matter number
    /// by one unit (the extra rishon absorbs the parity).
    pub fn charge_excitation(&self) -> Result<PauliString> {
        if !self.spec().with_extra {
            return Err(Error::MissingExtraRishon);
        }
        let origin = Site::new(0, 0);
        let flavor = if self.spec().spinful { Role::U } else { Role::M };
        let mut s = self
            .majorana(origin, Role::Extra, Letter::X)?
            .multiply(&self.majorana(origin, flavor, Letter::X)?)?;
        s.mul_phase_exponent(1);
        s.link_merge(&self.map)
    }

    /// On-site spin flip `X_u X_d`: swaps the flavors of a singly occupied
    /// site, commutes with every stabilizer.
    pub fn spin_excitation(&self, site: Site) -> Result<PauliString> {
        if !self.spec().spinful {
            return Err(Error::InvalidLattice(
                "spin excitation needs two matter flavors".into(),
            ));
        }
        let n = self.layout.n_merged();
        let s = PauliString::single(n, self.layout.matter_qubit(site, Role::U), Letter::X)?;
        s.multiply(&PauliString::single(
            n,
            self.layout.matter_qubit(site, Role::D),
            Letter::X,
        )?)
    }

    // -- observables --------------------------------------------------------

    /// Total matter number `N_hat = sum (1 - Z)/2`.
    pub fn number_total(&self) -> Result<PauliSum> {
        let n = self.layout.n_merged();
        let qubits = self.layout.matter_qubits();
        let mut h = PauliSum::empty(n);
        h.push_real(qubits.len() as f64 / 2.0, PauliString::identity(n))?;
        for &q in &qubits {
            h.push_real(-0.5, PauliString::single(n, q, Letter::Z)?)?;
        }
        Ok(h)
    }

    /// Occupation of one site, summed over flavors.
    pub fn site_number(&self, site: Site) -> Result<PauliSum> {
        let n = self.layout.n_merged();
        let mut h = PauliSum::empty(n);
        for &flavor in self.matter_flavors() {
            let q = self.layout.matter_qubit(site, flavor);
            h.push_real(0.5, PauliString::identity(n))?;
            h.push_real(-0.5, PauliString::single(n, q, Letter::Z)?)?;
        }
        h.canonicalize();
        Ok(h)
    }

    /// `S_z` of one site: `(n_u - n_d)/2 = (Z_d - Z_u)/4`.
    pub fn site_sz(&self, site: Site) -> Result<PauliSum> {
        if !self.spec().spinful {
            return Err(Error::InvalidLattice("S_z needs two matter flavors".into()));
        }
        let n = self.layout.n_merged();
        let mut h = PauliSum::empty(n);
        let qu = self.layout.matter_qubit(site, Role::U);
        let qd = self.layout.matter_qubit(site, Role::D);
        h.push_real(0.25, PauliString::single(n, qd, Letter::Z)?)?;
        h.push_real(-0.25, PauliString::single(n, qu, Letter::Z)?)?;
        Ok(h)
    }

    /// Total `S_z`.
    pub fn sz_total(&self) -> Result<PauliSum> {
        let mut h = PauliSum::empty(self.layout.n_merged());
        for site in self.spec().sites() {
            h = h.add(&self.site_sz(site)?)?;
        }
        Ok(h)
    }

    /// Occupation of a link qubit (1 when both rishons of the link are).
    pub fn link_occupation(&self, link: Link) -> Result<PauliSum> {
        let n = self.layout.n_merged();
        let q = self.layout.link_qubit(link);
        let mut h = PauliSum::empty(n);
        h.push_real(0.5, PauliString::identity(n))?;
        h.push_real(-0.5, PauliString::single(n, q, Letter::Z)?)?;
        Ok(h)
    }

    /// Total double occupancy `sum_s n_u(s) n_d(s)`.
    pub fn double_occupancy_total(&self) -> Result<PauliSum> {
        // U = 1 strips the prefactor from the on-site expansion.
        self.onsite_sum(1.0)
    }

    /// Matter parity `prod Z` over all matter qubits. Also the product of
    /// every vertex stabilizer (times `Z_extra` when present).
    pub fn matter_parity(&self) -> Result<PauliString> {
        let mut s = PauliString::identity(self.layout.n_merged());
        for q in self.layout.matter_qubits() {
            s.set_letter(q, Letter::Z)?;
        }
        Ok(s)
    }

    /// Global matter spectrum flip `prod X` over all matter qubits;
    /// commutes with hopping exactly and with on-site terms up to a
    /// chemical-potential shift.
    pub fn matter_flip(&self) -> Result<PauliString> {
        let mut s = PauliString::identity(self.layout.n_merged());
        for q in self.layout.matter_qubits() {
            s.set_letter(q, Letter::X)?;
        }
        Ok(s)
    }

    /// Spin raising operator of one site, `c^dag_u c_d`, merged.
    fn site_spin_raise(&self, site: Site) -> Result<PauliSum> {
        let n = self.layout.n_merged();
        let quarter = Complex::new(0.25, 0.0);
        let i = Complex::new(0.0, 1.0);
        let au = self.majorana(site, Role::U, Letter::X)?;
        let bu = self.majorana(site, Role::U, Letter::Y)?;
        let ad = self.majorana(site, Role::D, Letter::X)?;
        let bd = self.majorana(site, Role::D, Letter::Y)?;
        // c^dag_u c_d = (a_u - i b_u)(a_d + i b_d)/4.
        let mut h = PauliSum::empty(n);
        h.push(quarter, au.multiply(&ad)?.link_merge(&self.map)?)?;
        h.push(quarter * i, au.multiply(&bd)?.link_merge(&self.map)?)?;
        h.push(-quarter * i, bu.multiply(&ad)?.link_merge(&self.map)?)?;
        h.push(quarter, bu.multiply(&bd)?.link_merge(&self.map)?)?;
        h.canonicalize();
        Ok(h)
    }

    /// Total-spin Casimir `S^2 = S_z^2 + (S^+ S^- + S^- S^+)/2`.
    pub fn spin_squared(&self) -> Result<PauliSum> {
        if !self.spec().spinful {
            return Err(Error::InvalidLattice("S^2 needs two matter flavors".into()));
        }
        let mut plus = PauliSum::empty(self.layout.n_merged());
        for site in self.spec().sites() {
            plus = plus.add(&self.site_spin_raise(site)?)?;
        }
        let minus = plus.adjoint();
        let sz = self.sz_total()?;
        let half = Complex::new(0.5, 0.0);
        sz.multiply(&sz)?
            .add(&plus.multiply(&minus)?.scale(half))?
            .add(&minus.multiply(&plus)?.scale(half))
    }
}

impl PauliSum {
    /// Term-wise Hermitian adjoint.
    pub fn adjoint(&self) -> PauliSum {
        let mut out = PauliSum::empty(self.n_qubits());
        for (c, s) in self.terms() {
            out.push(c.conj(), s.adjoint()).expect("same register");
        }
        out.canonicalized()
    }
}
