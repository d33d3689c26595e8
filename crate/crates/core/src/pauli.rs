//! Symplectic Pauli algebra.
//!
//! A string on `n` qubits is stored as two bit masks plus a quartic phase:
//!
//! ```text
//!     P = i^k * prod_q X_q^{x_q} Z_q^{z_q}        k in {0,1,2,3}
//! ```
//!
//! with the per-qubit convention that Z acts before X, so the letter `Y`
//! is carried internally as `i * X * Z`. In this form multiplication is two
//! XORs and one popcount (`Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}`),
//! two strings commute iff `|x1 & z2| + |z1 & x2|` is even, and the weight
//! is `popcount(x | z)`.
//!
//! The *rendered* form is the plain-letter one: an optional global phase
//! `+i`, `-i` or `-` followed by one letter per qubit, qubit 0 leftmost.
//! Rendering and parsing round-trip bit-exactly.
//!
//! [`MergeMap`] and [`PauliString::link_merge`] implement rishon-pair
//! compression: on a pair of qubits jointly restricted to the span of
//! `|00>` and `|11>`, a two-letter block acts as a single letter on the
//! merged qubit (`ZZ -> I`, `XX -> X`, `YY -> -X`, `XY -> Y`, ...). Blocks
//! mixing a diagonal with an off-diagonal letter leave the restricted space
//! and are rejected as a link-parity violation.

use crate::error::{Error, Result};
use crate::Complex;

/// Default qubit cap for dense materialization (`2^12 = 4096` rows).
pub const DENSE_CAP: usize = 12;

/// Coefficients with absolute value below this are dropped when a
/// [`PauliSum`] is canonicalized.
pub const COEFF_DROP_TOL: f64 = 1e-15;

/// One Pauli letter in the rendered (plain) convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn ascii(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// 2x2 dense matrix of the letter.
    pub fn dense(self) -> [[Complex; 2]; 2] {
        let o = Complex::new(0.0, 0.0);
        let l = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        match self {
            Letter::I => [[l, o], [o, l]],
            Letter::X => [[o, l], [l, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[l, o], [o, -l]],
        }
    }
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// A Pauli string with a global quartic phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Exponent of `i` in the internal `i^k X^x Z^z` form.
    k: u8,
}

impl PauliString {
    /// The identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString { n, x: vec![0; w], z: vec![0; w], k: 0 }
    }

    /// A single plain letter at `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, letter: Letter) -> Result<Self> {
        let mut s = Self::identity(n);
        s.set_letter(q, letter)?;
        Ok(s)
    }

    /// Builds a phase-free string from plain letters, qubit 0 first.
    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            s.set_letter(q, l).expect("index in range by construction");
        }
        s
    }

    /// Number of qubits the string is defined on.
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Overwrites the letter at `q`, keeping the rendered phase fixed.
    ///
    /// Writing or erasing a `Y` adjusts the internal exponent so that the
    /// plain-letter phase of the string is unchanged.
    pub fn set_letter(&mut self, q: usize, letter: Letter) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { index: q, n: self.n });
        }
        let (w, b) = (q / 64, q % 64);
        let was_y = (self.x[w] >> b) & (self.z[w] >> b) & 1 == 1;
        let (xb, zb) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
        let is_y = xb && zb;
        // Keep i^(k - #Y) invariant: each Y letter carries one factor of i.
        if is_y && !was_y {
            self.k = (self.k + 1) % 4;
        } else if was_y && !is_y {
            self.k = (self.k + 3) % 4;
        }
        Ok(())
    }

    /// Plain letter at qubit `q`.
    pub fn letter(&self, q: usize) -> Letter {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (w, b) = (q / 64, q % 64);
        Letter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    fn y_count(&self) -> u32 {
        and_popcount(&self.x, &self.z)
    }

    /// Exponent `p` of the rendered global phase `i^p` (plain-letter form).
    pub fn phase_exponent(&self) -> u8 {
        (self.k + 4 - (self.y_count() % 4) as u8) % 4
    }

    /// Rendered global phase as a complex number in `{1, i, -1, -i}`.
    pub fn phase(&self) -> Complex {
        match self.phase_exponent() {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        }
    }

    /// Multiplies the rendered phase by `i^p`.
    pub fn mul_phase_exponent(&mut self, p: u8) {
        self.k = (self.k + p % 4) % 4;
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones()).sum()
    }

    /// True if every letter is `I` (the phase may still be nontrivial).
    pub fn is_identity_letters(&self) -> bool {
        self.weight() == 0
    }

    /// Support of the string as sorted qubit indices.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.letter(q) != Letter::I).collect()
    }

    /// Operator product `self * other` (self applied after `other`).
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        // Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}
        let swaps = and_popcount(&self.z, &other.x);
        let k = (self.k + other.k + 2 * (swaps % 2) as u8) % 4;
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        Ok(PauliString { n: self.n, x, z, k })
    }

    /// True iff the two strings commute as operators.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let anti = and_popcount(&self.x, &other.z) + and_popcount(&self.z, &other.x);
        Ok(anti % 2 == 0)
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> PauliString {
        // (i^k X^x Z^z)^dag = (-i)^k Z^z X^x = (-i)^k (-1)^{|x & z|} X^x Z^z
        let k = ((4 - self.k) + 2 * (self.y_count() % 2) as u8) % 4;
        PauliString { n: self.n, x: self.x.clone(), z: self.z.clone(), k }
    }

    /// True iff the string is Hermitian (rendered phase is `+1` or `-1`).
    pub fn is_hermitian(&self) -> bool {
        self.phase_exponent() % 2 == 0
    }

    /// Action on a computational basis state: `P |b> = amp |b ^ x>`.
    ///
    /// Bit `q` of `b` is the value of qubit `q`.
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex) {
        debug_assert!(self.n <= 64, "basis-state action requires <= 64 qubits");
        let x = self.x.first().copied().unwrap_or(0);
        let z = self.z.first().copied().unwrap_or(0);
        let mut k = self.k;
        if (z & b).count_ones() % 2 == 1 {
            k = (k + 2) % 4;
        }
        let amp = match k {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        };
        (b ^ x, amp)
    }

    /// X mask as a single word (strings on more than 64 qubits refuse).
    pub fn x_word(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.x.first().copied().unwrap_or(0)
    }

    /// Z mask as a single word (strings on more than 64 qubits refuse).
    pub fn z_word(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.z.first().copied().unwrap_or(0)
    }

    /// Dense matrix in the computational basis, row-major, little-endian
    /// (bit `q` of the index is qubit `q`). Capped at [`DENSE_CAP`] qubits.
    pub fn to_dense(&self) -> Result<Vec<Complex>> {
        self.to_dense_capped(DENSE_CAP)
    }

    /// As [`Self::to_dense`] with an explicit cap.
    pub fn to_dense_capped(&self, cap: usize) -> Result<Vec<Complex>> {
        if self.n > cap {
            return Err(Error::DenseCapExceeded { n: self.n, cap });
        }
        let dim = 1usize << self.n;
        let mut m = vec![Complex::new(0.0, 0.0); dim * dim];
        for b in 0..dim as u64 {
            let (b2, amp) = self.apply_to_basis(b);
            m[b2 as usize * dim + b as usize] = amp;
        }
        Ok(m)
    }

    /// Compresses rishon pairs according to `map`.
    ///
    /// Each `(a, b)` pair is restricted to the span of `|00>` and `|11>`
    /// and replaced by one output qubit; single qubits are relabeled. In the
    /// internal X/Z form the rule is phase-free: the pair letters must agree
    /// in their X bit (else the operator leaves the restricted space), and
    /// the merged letter has that X bit and the XOR of the Z bits. Signs
    /// such as `YY -> -X` emerge from the `Y = iXZ` bookkeeping.
    pub fn link_merge(&self, map: &MergeMap) -> Result<PauliString> {
        if self.n != map.n_in {
            return Err(Error::QubitMismatch { left: self.n, right: map.n_in });
        }
        let mut out = PauliString::identity(map.n_out);
        out.k = self.k;
        let get = |words: &[u64], q: usize| (words[q / 64] >> (q % 64)) & 1 == 1;
        let set = |words: &mut [u64], q: usize, v: bool| {
            words[q / 64] = (words[q / 64] & !(1u64 << (q % 64))) | ((v as u64) << (q % 64));
        };
        for &(a, b, m) in &map.pairs {
            let (xa, za) = (get(&self.x, a), get(&self.z, a));
            let (xb, zb) = (get(&self.x, b), get(&self.z, b));
            if xa != xb {
                return Err(Error::LinkParityViolated { a, b });
            }
            set(&mut out.x, m, xa);
            set(&mut out.z, m, za ^ zb);
        }
        for &(s, m) in &map.singles {
            set(&mut out.x, m, get(&self.x, s));
            set(&mut out.z, m, get(&self.z, s));
        }
        Ok(out)
    }

    /// `(x, z)` key ignoring phase; used to merge duplicate strings.
    fn letters_key(&self) -> (Vec<u64>, Vec<u64>) {
        (self.x.clone(), self.z.clone())
    }

    /// Same string with the rendered phase folded out (phase forced to `+1`).
    /// Returns the stripped string and the removed phase.
    pub fn split_phase(&self) -> (PauliString, Complex) {
        let phase = self.phase();
        let mut s = self.clone();
        s.k = (s.y_count() % 4) as u8;
        (s, phase)
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.phase_exponent() {
            0 => {}
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).ascii())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    /// Parses the rendered form: optional `+i`/`-i`/`-` prefix, then one
    /// letter per qubit, qubit 0 first.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseString(s.to_string());
        let (p, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3u8, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2u8, r)
        } else {
            (0u8, s)
        };
        if rest.is_empty() {
            return Err(bad());
        }
        let mut letters = Vec::with_capacity(rest.len());
        for c in rest.chars() {
            letters.push(match c {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => return Err(bad()),
            });
        }
        let mut out = PauliString::from_letters(&letters);
        out.mul_phase_exponent(p);
        Ok(out)
    }
}

/// Relabeling of a pre-merge qubit set onto a reduced one.
///
/// `pairs` are `(a, b, merged)` rishon pairs; `singles` are `(old, new)`
/// pass-through qubits. Together they must cover every input qubit exactly
/// once and hit every output qubit exactly once.
#[derive(Debug, Clone)]
pub struct MergeMap {
    pub n_in: usize,
    pub n_out: usize,
    pub pairs: Vec<(usize, usize, usize)>,
    pub singles: Vec<(usize, usize)>,
}

impl MergeMap {
    pub fn new(
        n_in: usize,
        n_out: usize,
        pairs: Vec<(usize, usize, usize)>,
        singles: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut in_seen = vec![false; n_in];
        let mut out_seen = vec![false; n_out];
        let mut take_in = |q: usize| -> Result<()> {
            if q >= n_in {
                return Err(Error::BadMergeMap(format!("input {q} out of range")));
            }
            if std::mem::replace(&mut in_seen[q], true) {
                return Err(Error::BadMergeMap(format!("input {q} covered twice")));
            }
            Ok(())
        };
        let mut take_out = |q: usize| -> Result<()> {
            if q >= n_out {
                return Err(Error::BadMergeMap(format!("output {q} out of range")));
            }
            if std::mem::replace(&mut out_seen[q], true) {
                return Err(Error::BadMergeMap(format!("output {q} covered twice")));
            }
            Ok(())
        };
        for &(a, b, m) in &pairs {
            take_in(a)?;
            take_in(b)?;
            take_out(m)?;
        }
        for &(s, m) in &singles {
            take_in(s)?;
            take_out(m)?;
        }
        if let Some(q) = in_seen.iter().position(|&v| !v) {
            return Err(Error::BadMergeMap(format!("input {q} not covered")));
        }
        if let Some(q) = out_seen.iter().position(|&v| !v) {
            return Err(Error::BadMergeMap(format!("output {q} not hit")));
        }
        Ok(MergeMap { n_in, n_out, pairs, singles })
    }
}

/// A real-or-complex linear combination of Pauli strings.
///
/// Terms keep their insertion order; [`PauliSum::canonicalize`] folds each
/// string's rendered phase into its coefficient, merges duplicates (first
/// occurrence wins the slot) and drops coefficients below
/// [`COEFF_DROP_TOL`], so equal operators always canonicalize to the same
/// term list.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(Complex, PauliString)>,
}

impl PauliSum {
    pub fn empty(n: usize) -> Self {
        PauliSum { n, terms: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Complex, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn push(&mut self, coeff: Complex, s: PauliString) -> Result<()> {
        if s.n_qubits() != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: s.n_qubits() });
        }
        self.terms.push((coeff, s));
        Ok(())
    }

    pub fn push_real(&mut self, coeff: f64, s: PauliString) -> Result<()> {
        self.push(Complex::new(coeff, 0.0), s)
    }

    /// Sum of `|coeff|`; an easy upper bound on the operator norm.
    pub fn coeff_one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    /// Folds phases into coefficients, merges duplicate strings and drops
    /// negligible terms. Stable: surviving terms keep first-occurrence order.
    pub fn canonicalize(&mut self) {
        let mut order: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
        let mut coeffs: std::collections::HashMap<(Vec<u64>, Vec<u64>), Complex> =
            std::collections::HashMap::new();
        let mut strings: std::collections::HashMap<(Vec<u64>, Vec<u64>), PauliString> =
            std::collections::HashMap::new();
        for (c, s) in self.terms.drain(..) {
            let (stripped, phase) = s.split_phase();
            let key = stripped.letters_key();
            match coeffs.entry(key.clone()) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += c * phase;
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(c * phase);
                    strings.insert(key.clone(), stripped);
                    order.push(key);
                }
            }
        }
        for key in order {
            let c = coeffs[&key];
            if c.norm() >= COEFF_DROP_TOL {
                self.terms.push((c, strings.remove(&key).expect("inserted above")));
            }
        }
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.canonicalize();
        Ok(out)
    }

    pub fn scale(&self, f: Complex) -> PauliSum {
        let mut out = self.clone();
        for (c, _) in &mut out.terms {
            *c *= f;
        }
        out.canonicalize();
        out
    }

    /// Operator product, expanded term by term and canonicalized.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let mut out = PauliSum::empty(self.n);
        for (ca, sa) in &self.terms {
            for (cb, sb) in &other.terms {
                out.terms.push((ca * cb, sa.multiply(sb)?));
            }
        }
        out.canonicalize();
        Ok(out)
    }

    /// `[self, other] = self*other - other*self`, canonicalized.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.add(&ba.scale(Complex::new(-1.0, 0.0)))
    }

    /// True iff the canonical form has real coefficients on Hermitian
    /// strings within `tol` (phase-stripped strings are always Hermitian,
    /// so this reduces to an imaginary-part check).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let c = self.clone().canonicalized();
        c.terms.iter().all(|(coeff, _)| coeff.im.abs() <= tol)
    }

    /// Dense matrix, same conventions as [`PauliString::to_dense`].
    pub fn to_dense(&self) -> Result<Vec<Complex>> {
        self.to_dense_capped(DENSE_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<Vec<Complex>> {
        if self.n > cap {
            return Err(Error::DenseCapExceeded { n: self.n, cap });
        }
        let dim = 1usize << self.n;
        let mut m = vec![Complex::new(0.0, 0.0); dim * dim];
        for (c, s) in &self.terms {
            for b in 0..dim as u64 {
                let (b2, amp) = s.apply_to_basis(b);
                m[b2 as usize * dim + b as usize] += c * amp;
            }
        }
        Ok(m)
    }

    /// Matrix-free action `y += H x` over the full `2^n`-dimensional space.
    ///
    /// Gather form: independent per output index, so callers may parallelize
    /// over disjoint slices of `y`.
    pub fn accumulate_matvec(&self, x: &[Complex], y: &mut [Complex]) {
        let n = self.n;
        assert!(n <= 30, "full-space matvec limited to 30 qubits");
        assert_eq!(x.len(), 1usize << n);
        assert_eq!(y.len(), 1usize << n);
        for (c, s) in &self.terms {
            let xm = s.x_word();
            let zm = s.z_word();
            let base = match s.k {
                0 => Complex::new(1.0, 0.0),
                1 => Complex::new(0.0, 1.0),
                2 => Complex::new(-1.0, 0.0),
                _ => Complex::new(0.0, -1.0),
            } * c;
            for (i, yi) in y.iter_mut().enumerate() {
                let b = i as u64 ^ xm;
                // <i|P|b> with b = i ^ x: phase depends on the source state b.
                let sign = if (zm & b).count_ones() % 2 == 1 { -base } else { base };
                *yi += sign * x[b as usize];
            }
        }
    }
}

impl std::fmt::Display for PauliSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            if c.im == 0.0 {
                write!(f, "{} {}", c.re, s)?;
            } else {
                write!(f, "{}{:+}i {}", c.re, c.im, s)?;
            }
        }
        Ok(())
    }
}
