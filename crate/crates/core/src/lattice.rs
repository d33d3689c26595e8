//! Open-boundary rectangular lattice geometry and qubit bookkeeping.
//!
//! Sites carry matter modes (two flavors `u`/`d`, or a single mode `m` in
//! the one-species variant) plus one rishon mode per incident link, named
//! by direction: `w`, `s`, `e`, `n`. Each link of the lattice owns two
//! rishons, one from each endpoint; after the link merge they become one
//! link qubit. Optionally the corner site `(0,0)` carries one extra
//! unpaired rishon, which turns the fixed-parity encoding into one that
//! also reaches odd particle numbers.
//!
//! Two index spaces coexist:
//!
//! * **pre-merge**: one qubit per fermionic mode, ordered site-major with
//!   a parity-dependent order inside each site,
//!
//!   ```text
//!       even site:  u d w s e n        odd site:  d u s w n e
//!       (one-species: m w s e n / m s w n e)
//!   ```
//!
//!   absent boundary rishons are skipped, and the extra rishon of `(0,0)`
//!   sits in the `s` slot. This order *is* the fermion ordering: a mode
//!   operator is its letter at the mode's qubit times `Z` on every later
//!   pre-merge qubit, and the site orderings above are what make every
//!   physical (even) operator collapse to a site-local string.
//!
//! * **merged**: matter qubits first, two per site (`2s`, `2s+1`; one per
//!   site in the one-species variant), then the extra rishon if present,
//!   then one qubit per link in base-site-major order with the east link
//!   before the north link.
//!
//! Site `s = (x, y)` has index `y*lx + x`: row-major from the lower-left
//! corner.

use crate::error::{Error, Result};
use crate::pauli::MergeMap;
use std::collections::HashMap;

/// A lattice site by its coordinates, `0 <= x < lx`, `0 <= y < ly`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub fn new(x: usize, y: usize) -> Self {
        Site { x, y }
    }

    /// Row-major index.
    pub fn index(&self, spec: &LatticeSpec) -> usize {
        self.y * spec.lx + self.x
    }

    /// Checkerboard parity; `(0,0)` is even.
    pub fn is_even(&self) -> bool {
        (self.x + self.y) % 2 == 0
    }
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Canonical link orientation: east or north from the base site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkDir {
    E,
    N,
}

/// A lattice link, identified by its west/south endpoint and orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub base: Site,
    pub dir: LinkDir,
}

impl Link {
    /// The endpoint away from the base.
    pub fn far(&self) -> Site {
        match self.dir {
            LinkDir::E => Site::new(self.base.x + 1, self.base.y),
            LinkDir::N => Site::new(self.base.x, self.base.y + 1),
        }
    }

    /// Rishon roles at the two endpoints: `(role at base, role at far)`.
    pub fn roles(&self) -> (Role, Role) {
        match self.dir {
            LinkDir::E => (Role::E, Role::W),
            LinkDir::N => (Role::N, Role::S),
        }
    }
}

impl std::fmt::Display for Link {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d = match self.dir {
            LinkDir::E => 'E',
            LinkDir::N => 'N',
        };
        write!(f, "{}{}", self.base, d)
    }
}

/// An elementary square, identified by its lower-left corner site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Plaquette {
    pub x: usize,
    pub y: usize,
}

impl Plaquette {
    pub fn lower_left(&self) -> Site {
        Site::new(self.x, self.y)
    }
    pub fn lower_right(&self) -> Site {
        Site::new(self.x + 1, self.y)
    }
    pub fn upper_left(&self) -> Site {
        Site::new(self.x, self.y + 1)
    }
    pub fn upper_right(&self) -> Site {
        Site::new(self.x + 1, self.y + 1)
    }

    /// The four bounding links.
    pub fn links(&self) -> [Link; 4] {
        [
            Link { base: self.lower_left(), dir: LinkDir::E },  // bottom
            Link { base: self.upper_left(), dir: LinkDir::E },  // top
            Link { base: self.lower_left(), dir: LinkDir::N },  // left
            Link { base: self.lower_right(), dir: LinkDir::N }, // right
        ]
    }
}

impl std::fmt::Display for Plaquette {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p({},{})", self.x, self.y)
    }
}

/// One local mode slot on a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Matter, flavor up (two-flavor lattices).
    U,
    /// Matter, flavor down (two-flavor lattices).
    D,
    /// Matter (one-species lattices).
    M,
    /// Rishon toward the west neighbor.
    W,
    /// Rishon toward the south neighbor.
    S,
    /// Rishon toward the east neighbor.
    E,
    /// Rishon toward the north neighbor.
    N,
    /// The unpaired corner rishon.
    Extra,
}

impl Role {
    pub fn is_matter(self) -> bool {
        matches!(self, Role::U | Role::D | Role::M)
    }

    pub fn is_rishon(self) -> bool {
        !self.is_matter()
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Role::U => "u",
            Role::D => "d",
            Role::M => "m",
            Role::W => "w",
            Role::S => "s",
            Role::E => "e",
            Role::N => "n",
            Role::Extra => "extra",
        };
        write!(f, "{s}")
    }
}

/// Lattice shape and variant flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    /// Two matter flavors per site when true, one otherwise.
    pub spinful: bool,
    /// Attach the unpaired rishon at `(0,0)`.
    pub with_extra: bool,
}

impl LatticeSpec {
    pub fn new(lx: usize, ly: usize, spinful: bool, with_extra: bool) -> Result<Self> {
        if lx == 0 || ly == 0 {
            return Err(Error::InvalidLattice(format!(
                "lattice must have positive extent, got {lx}x{ly}"
            )));
        }
        if lx * ly < 2 {
            return Err(Error::InvalidLattice(
                "a single site has no links; need at least 1x2".into(),
            ));
        }
        Ok(LatticeSpec { lx, ly, spinful, with_extra })
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn n_links(&self) -> usize {
        (self.lx - 1) * self.ly + self.lx * (self.ly - 1)
    }

    pub fn n_plaquettes(&self) -> usize {
        (self.lx - 1) * (self.ly - 1)
    }

    /// Matter modes per site (2 or 1).
    pub fn flavors(&self) -> usize {
        if self.spinful {
            2
        } else {
            1
        }
    }

    pub fn n_matter_modes(&self) -> usize {
        self.flavors() * self.n_sites()
    }

    /// Fermionic modes in total: matter + two rishons per link + extra.
    pub fn n_premerge(&self) -> usize {
        self.n_matter_modes() + 2 * self.n_links() + usize::from(self.with_extra)
    }

    /// Qubits after the link merge.
    pub fn n_merged(&self) -> usize {
        self.n_matter_modes() + self.n_links() + usize::from(self.with_extra)
    }

    /// All sites, row-major.
    pub fn sites(&self) -> Vec<Site> {
        let mut v = Vec::with_capacity(self.n_sites());
        for y in 0..self.ly {
            for x in 0..self.lx {
                v.push(Site::new(x, y));
            }
        }
        v
    }

    /// All links, base-site-major, east before north.
    pub fn links(&self) -> Vec<Link> {
        let mut v = Vec::with_capacity(self.n_links());
        for s in self.sites() {
            if s.x + 1 < self.lx {
                v.push(Link { base: s, dir: LinkDir::E });
            }
            if s.y + 1 < self.ly {
                v.push(Link { base: s, dir: LinkDir::N });
            }
        }
        v
    }

    /// All plaquettes, lower-left-corner-major.
    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let mut v = Vec::with_capacity(self.n_plaquettes());
        for y in 0..self.ly.saturating_sub(1) {
            for x in 0..self.lx.saturating_sub(1) {
                v.push(Plaquette { x, y });
            }
        }
        v
    }

    /// Whether `role` exists at `site` on this lattice.
    pub fn has_role(&self, site: Site, role: Role) -> bool {
        match role {
            Role::U | Role::D => self.spinful,
            Role::M => !self.spinful,
            Role::W => site.x > 0,
            Role::S => site.y > 0,
            Role::E => site.x + 1 < self.lx,
            Role::N => site.y + 1 < self.ly,
            Role::Extra => self.with_extra && site.x == 0 && site.y == 0,
        }
    }

    /// Mode slots of `site` in fermion order (see module docs). The extra
    /// rishon of `(0,0)` takes the `s` slot, which that corner never uses.
    pub fn site_modes(&self, site: Site) -> Vec<Role> {
        let base: &[Role] = match (self.spinful, site.is_even()) {
            (true, true) => &[Role::U, Role::D, Role::W, Role::S, Role::E, Role::N],
            (true, false) => &[Role::D, Role::U, Role::S, Role::W, Role::N, Role::E],
            (false, true) => &[Role::M, Role::W, Role::S, Role::E, Role::N],
            (false, false) => &[Role::M, Role::S, Role::W, Role::N, Role::E],
        };
        base.iter()
            .filter_map(|&r| {
                let r = if r == Role::S && self.has_role(site, Role::Extra) {
                    Role::Extra
                } else {
                    r
                };
                self.has_role(site, r).then_some(r)
            })
            .collect()
    }

    /// `(full, physical)` dimensions: `2^merged` and the merged dimension
    /// divided by one factor of 2 per vertex and plaquette constraint.
    pub fn hilbert_dims(&self) -> Result<(u128, u128)> {
        let nq = self.n_merged();
        if nq > 127 {
            return Err(Error::SizeCapExceeded { what: "qubits for dimension count", n: nq, cap: 127 });
        }
        let stabilizers = self.n_sites() + self.n_plaquettes();
        // Euler: links - plaquettes = sites - 1, so the exponent is
        // matter_modes - 1 without the extra rishon and matter_modes with it.
        let phys_bits = nq - stabilizers;
        Ok((1u128 << nq, 1u128 << phys_bits))
    }
}

/// Index assignments for both qubit spaces plus the merge between them.
#[derive(Debug, Clone)]
pub struct QubitLayout {
    spec: LatticeSpec,
    /// Mode slots per site, fermion order.
    site_modes: Vec<Vec<Role>>,
    /// First pre-merge index of each site's block.
    site_offset: Vec<usize>,
    /// Merged index of each link qubit, keyed by link.
    link_index: HashMap<Link, usize>,
    /// Links in canonical order (inverse of `link_index`).
    links: Vec<Link>,
}

impl QubitLayout {
    pub fn new(spec: LatticeSpec) -> Self {
        let sites = spec.sites();
        let site_modes: Vec<Vec<Role>> = sites.iter().map(|&s| spec.site_modes(s)).collect();
        let mut site_offset = Vec::with_capacity(sites.len());
        let mut acc = 0;
        for modes in &site_modes {
            site_offset.push(acc);
            acc += modes.len();
        }
        debug_assert_eq!(acc, spec.n_premerge());
        let links = spec.links();
        let first_link = spec.n_matter_modes() + usize::from(spec.with_extra);
        let link_index =
            links.iter().enumerate().map(|(i, &l)| (l, first_link + i)).collect();
        QubitLayout { spec, site_modes, site_offset, link_index, links }
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn n_premerge(&self) -> usize {
        self.spec.n_premerge()
    }

    pub fn n_merged(&self) -> usize {
        self.spec.n_merged()
    }

    /// Pre-merge (fermion-order) index of a mode, if the slot exists.
    pub fn premerge_index(&self, site: Site, role: Role) -> Option<usize> {
        let si = site.index(&self.spec);
        let pos = self.site_modes.get(si)?.iter().position(|&r| r == role)?;
        Some(self.site_offset[si] + pos)
    }

    /// Mode slots of `site` in fermion order.
    pub fn site_modes(&self, site: Site) -> &[Role] {
        &self.site_modes[site.index(&self.spec)]
    }

    /// Merged index of a matter qubit. The flavor role must exist.
    pub fn matter_qubit(&self, site: Site, role: Role) -> usize {
        assert!(role.is_matter() && self.spec.has_role(site, role), "no {role} matter at {site}");
        let f = self.spec.flavors();
        site.index(&self.spec) * f + usize::from(role == Role::D)
    }

    /// Merged index of the extra rishon, if the lattice has one.
    pub fn extra_qubit(&self) -> Option<usize> {
        self.spec.with_extra.then_some(self.spec.n_matter_modes())
    }

    /// Merged index of a link qubit.
    pub fn link_qubit(&self, link: Link) -> usize {
        self.link_index[&link]
    }

    /// Links in canonical order; `links()[i]` owns merged qubit
    /// `first_link_qubit() + i`.
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn first_link_qubit(&self) -> usize {
        self.spec.n_matter_modes() + usize::from(self.spec.with_extra)
    }

    /// All merged matter qubit indices (extra rishon not included).
    pub fn matter_qubits(&self) -> Vec<usize> {
        (0..self.spec.n_matter_modes()).collect()
    }

    /// True if merged qubit `q` is a link qubit.
    pub fn is_link_qubit(&self, q: usize) -> bool {
        q >= self.first_link_qubit() && q < self.n_merged()
    }

    /// The rishon-pair compression map from the pre-merge space onto the
    /// merged one.
    pub fn merge_map(&self) -> MergeMap {
        let mut pairs = Vec::with_capacity(self.spec.n_links());
        for &link in &self.links {
            let (role_base, role_far) = link.roles();
            let a = self.premerge_index(link.base, role_base).expect("base rishon exists");
            let b = self.premerge_index(link.far(), role_far).expect("far rishon exists");
            pairs.push((a, b, self.link_index[&link]));
        }
        let mut singles = Vec::new();
        for site in self.spec.sites() {
            for role in [Role::U, Role::D, Role::M] {
                if self.spec.has_role(site, role) {
                    let pm = self.premerge_index(site, role).expect("matter mode exists");
                    singles.push((pm, self.matter_qubit(site, role)));
                }
            }
        }
        if let Some(extra_merged) = self.extra_qubit() {
            let pm = self
                .premerge_index(Site::new(0, 0), Role::Extra)
                .expect("extra rishon exists when enabled");
            singles.push((pm, extra_merged));
        }
        MergeMap::new(self.n_premerge(), self.n_merged(), pairs, singles)
            .expect("layout produces a complete bijection")
    }
}
