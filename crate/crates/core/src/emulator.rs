//! Dense statevector execution of circuits.
//!
//! Amplitudes are stored little-endian: bit `q` of the array index is
//! the computational value of qubit `q`. All gate kernels act in place;
//! large registers are processed with rayon over disjoint chunks, which
//! keeps results bit-identical to the serial path regardless of thread
//! count. The RNG is consumed exclusively by `MEASURE` gates, so runs
//! are reproducible from `(circuit, initial state, seed)` alone.
//!
//! The register size is capped at 27 qubits (a 2 GiB amplitude array);
//! 20 and below is comfortable, anything above that is accepted but
//! slow and memory-hungry.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

/// Hard register cap: 2^27 amplitudes.
pub const QUBIT_CAP: usize = 27;

/// Below this amplitude count the serial kernels win; the cutoff only
/// affects speed, never results.
const PAR_THRESHOLD: usize = 1 << 14;

/// A dense `2^n` statevector with a seeded RNG for measurements.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex>,
    rng: StdRng,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn new(n_qubits: usize, seed: u64) -> Result<Self> {
        if n_qubits > QUBIT_CAP {
            return Err(Error::SizeCapExceeded { what: "statevector qubits", n: n_qubits, cap: QUBIT_CAP });
        }
        let mut amps = vec![Complex::new(0.0, 0.0); 1usize << n_qubits];
        amps[0] = Complex::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps, rng: StdRng::seed_from_u64(seed) })
    }

    /// Wraps an explicit amplitude vector (must be a normalized power of
    /// two in length).
    pub fn from_amplitudes(amps: Vec<Complex>, seed: u64) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("amplitude count {len} is not a power of two")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > QUBIT_CAP {
            return Err(Error::SizeCapExceeded { what: "statevector qubits", n: n_qubits, cap: QUBIT_CAP });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidConfig(format!("state norm {norm} differs from 1")));
        }
        Ok(StateVector { n_qubits, amps, rng: StdRng::seed_from_u64(seed) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Collapses back to the computational basis state `b`, keeping the
    /// RNG stream where it is.
    pub fn reset_basis(&mut self, b: u64) -> Result<()> {
        if b >= self.amps.len() as u64 {
            return Err(Error::InvalidConfig(format!("basis index {b} out of range")));
        }
        self.amps.iter_mut().for_each(|a| *a = Complex::new(0.0, 0.0));
        self.amps[b as usize] = Complex::new(1.0, 0.0);
        Ok(())
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Runs a circuit, returning the final classical bit values. The
    /// state is mutated in place; measurement outcomes are drawn from
    /// the seeded RNG.
    pub fn run(&mut self, circuit: &Circuit) -> Result<Vec<u8>> {
        if circuit.width() != self.n_qubits {
            return Err(Error::WidthMismatch { circuit: circuit.width(), state: self.n_qubits });
        }
        let mut bits = vec![0u8; circuit.classical_bits()];
        for gate in circuit.gates() {
            self.apply_gate(gate, &mut bits)?;
        }
        Ok(bits)
    }

    fn apply_gate(&mut self, gate: &Gate, bits: &mut [u8]) -> Result<()> {
        match gate {
            Gate::H(q) => self.kernel_mix(*q, FRAC_1_SQRT_2_C, FRAC_1_SQRT_2_C, FRAC_1_SQRT_2_C, -FRAC_1_SQRT_2_C),
            Gate::X(q) => self.kernel_x(*q),
            Gate::Cnot { control, target } => self.kernel_cnot(*control, *target),
            Gate::Rz { target, angle } => self.kernel_rz(*target, *angle),
            // Rx(theta) = cos(theta/2) I - i sin(theta/2) X at theta = -+ pi/2.
            Gate::RxM(q) => self.kernel_mix(*q, FRAC_1_SQRT_2_C, I_FRAC, I_FRAC, FRAC_1_SQRT_2_C),
            Gate::RxP(q) => self.kernel_mix(*q, FRAC_1_SQRT_2_C, M_I_FRAC, M_I_FRAC, FRAC_1_SQRT_2_C),
            Gate::Measure { target, bit } => {
                let outcome = self.measure(*target);
                bits[*bit] = outcome;
                Ok(())
            }
            Gate::Conditional { bit, inner } => {
                if *bit >= bits.len() {
                    return Err(Error::ClassicalBitOutOfRange { bit: *bit, n: bits.len() });
                }
                if bits[*bit] == 1 {
                    self.apply_gate(inner, bits)?;
                }
                Ok(())
            }
        }
    }

    /// Generic single-qubit kernel `[[a, b], [c, d]]` on qubit `q`.
    fn kernel_mix(&mut self, q: usize, a: Complex, b: Complex, c: Complex, d: Complex) -> Result<()> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        let block = stride << 1;
        let work = |chunk: &mut [Complex]| {
            for i in 0..stride {
                let (lo, hi) = (chunk[i], chunk[i + stride]);
                chunk[i] = a * lo + b * hi;
                chunk[i + stride] = c * lo + d * hi;
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(block).for_each(work);
        } else {
            self.amps.chunks_mut(block).for_each(work);
        }
        Ok(())
    }

    fn kernel_x(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        let block = stride << 1;
        let work = |chunk: &mut [Complex]| {
            for i in 0..stride {
                chunk.swap(i, i + stride);
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(block).for_each(work);
        } else {
            self.amps.chunks_mut(block).for_each(work);
        }
        Ok(())
    }

    fn kernel_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidConfig("CNOT with control == target".into()));
        }
        let stride = 1usize << target;
        let block = stride << 1;
        let cmask = 1usize << control;
        let work = |(idx, chunk): (usize, &mut [Complex])| {
            let base = idx * block;
            for i in 0..stride {
                if (base + i) & cmask != 0 {
                    chunk.swap(i, i + stride);
                }
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(block).enumerate().for_each(work);
        } else {
            self.amps.chunks_mut(block).enumerate().for_each(work);
        }
        Ok(())
    }

    /// `RZ(phi) = diag(e^{-i phi/2}, e^{+i phi/2})`.
    fn kernel_rz(&mut self, target: usize, angle: f64) -> Result<()> {
        self.check_qubit(target)?;
        let minus = Complex::from_polar(1.0, -angle / 2.0);
        let plus = Complex::from_polar(1.0, angle / 2.0);
        let mask = 1usize << target;
        let work = |(b, amp): (usize, &mut Complex)| {
            *amp *= if b & mask == 0 { minus } else { plus };
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter_mut().enumerate().for_each(work);
        } else {
            self.amps.iter_mut().enumerate().for_each(work);
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n: self.n_qubits });
        }
        Ok(())
    }

    /// Probability of reading `1` on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        // Serial sum: reductions stay in one fixed order.
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Samples one projective measurement of `qubit`, collapsing the
    /// state. This is the only place the RNG advances.
    fn measure(&mut self, qubit: usize) -> u8 {
        let p_one = self.probability_one(qubit).expect("validated by run");
        let draw: f64 = self.rng.gen();
        let outcome = u8::from(draw < p_one);
        let p = if outcome == 1 { p_one } else { 1.0 - p_one };
        self.collapse(qubit, outcome, p);
        outcome
    }

    fn collapse(&mut self, qubit: usize, outcome: u8, prob: f64) {
        let mask = 1usize << qubit;
        let keep_set = outcome == 1;
        let scale = 1.0 / prob.sqrt();
        let work = |(b, amp): (usize, &mut Complex)| {
            if ((b & mask) != 0) == keep_set {
                *amp *= scale;
            } else {
                *amp = Complex::new(0.0, 0.0);
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter_mut().enumerate().for_each(work);
        } else {
            self.amps.iter_mut().enumerate().for_each(work);
        }
    }

    /// Deterministic post-selection of `qubit = outcome`; returns the
    /// probability that was projected onto. No RNG involved.
    pub fn project(&mut self, qubit: usize, outcome: u8) -> Result<f64> {
        self.check_qubit(qubit)?;
        let p_one = self.probability_one(qubit)?;
        let p = if outcome == 1 { p_one } else { 1.0 - p_one };
        if p <= 1e-12 {
            return Err(Error::PostSelectionImpossible { prob: p });
        }
        self.collapse(qubit, outcome, p);
        Ok(p)
    }

    /// Applies a Pauli string exactly (phases included).
    pub fn apply_pauli(&mut self, s: &PauliString) -> Result<()> {
        if s.n_qubits() > self.n_qubits {
            return Err(Error::QubitMismatch { left: s.n_qubits(), right: self.n_qubits });
        }
        let x = s.x_word();
        if x == 0 {
            // Pure phase action, diagonal in the basis.
            let work = |(b, amp): (usize, &mut Complex)| {
                let (_, alpha) = s.apply_to_basis(b as u64);
                *amp *= alpha;
            };
            if self.amps.len() >= PAR_THRESHOLD {
                self.amps.par_iter_mut().enumerate().for_each(work);
            } else {
                self.amps.iter_mut().enumerate().for_each(work);
            }
            return Ok(());
        }
        // b and b^x swap; the lowest set bit of x picks one
        // representative per pair.
        let low = x.trailing_zeros() as usize;
        let lmask = 1usize << low;
        let xm = x as usize;
        let dim = self.amps.len();
        // The pair partner can live in another chunk, so this kernel
        // stays serial; Pauli applications are rare (state preparation
        // and excitation injection), never in the gate-level hot loop.
        for b in 0..dim {
            if b & lmask != 0 {
                continue;
            }
            let partner = b ^ xm;
            let (img_b, alpha_b) = s.apply_to_basis(b as u64);
            debug_assert_eq!(img_b as usize, partner);
            let (_, alpha_p) = s.apply_to_basis(partner as u64);
            let (vb, vp) = (self.amps[b], self.amps[partner]);
            self.amps[partner] = alpha_b * vb;
            self.amps[b] = alpha_p * vp;
        }
        Ok(())
    }

    /// `<psi|P|psi>` for one string (generally complex).
    pub fn expectation_string(&self, s: &PauliString) -> Result<Complex> {
        if s.n_qubits() > self.n_qubits {
            return Err(Error::QubitMismatch { left: s.n_qubits(), right: self.n_qubits });
        }
        let value = |range: std::ops::Range<usize>| -> Complex {
            let mut acc = Complex::new(0.0, 0.0);
            for b in range {
                let (img, alpha) = s.apply_to_basis(b as u64);
                acc += self.amps[img as usize].conj() * alpha * self.amps[b];
            }
            acc
        };
        Ok(value(0..self.amps.len()))
    }

    /// `<psi|O|psi>` for a Hermitian operator sum. Terms are evaluated
    /// in parallel and combined in term order, so the result does not
    /// depend on thread count. The imaginary residue must stay below
    /// 1e-10 of the result scale.
    pub fn expectation(&self, op: &PauliSum) -> Result<f64> {
        if op.n_qubits() > self.n_qubits {
            return Err(Error::QubitMismatch { left: op.n_qubits(), right: self.n_qubits });
        }
        let per_term: Vec<Complex> = op
            .terms()
            .par_iter()
            .map(|(c, s)| {
                let mut acc = Complex::new(0.0, 0.0);
                for b in 0..self.amps.len() {
                    let (img, alpha) = s.apply_to_basis(b as u64);
                    acc += self.amps[img as usize].conj() * alpha * self.amps[b];
                }
                c * acc
            })
            .collect();
        let total: Complex = per_term.iter().sum();
        let scale = total.norm().max(op.coeff_one_norm()).max(1.0);
        if total.im.abs() > 1e-10 * scale {
            return Err(Error::NonHermitian(format!(
                "expectation has imaginary residue {:.3e}",
                total.im
            )));
        }
        Ok(total.re)
    }

    /// Rescales to unit norm (numerical hygiene after long gate runs).
    pub fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let s = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= s);
        }
    }
}

const FRAC_1_SQRT_2_C: Complex = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
/// `-i sin(pi/4)` entries of `Rx(-pi/2)` ... sign per the convention test.
const I_FRAC: Complex = Complex::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
const M_I_FRAC: Complex = Complex::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
