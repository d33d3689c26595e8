//! Compilation of Pauli-string propagators into one- and two-qubit gates.
//!
//! The gate set is deliberately small: `H`, `X`, `CNOT`, `RZ`, the fixed
//! quarter-turns `RXM = Rx(-pi/2)` / `RXP = Rx(+pi/2)`, plus `MEASURE` and
//! classically-`CONDITIONAL` gates. A propagator `exp(-i c dt P)`
//! compiles to the textbook sandwich: basis changes rotating every X
//! letter (by `H`) and Y letter (by `RXM`) onto the Z axis, a CNOT
//! cascade accumulating the joint parity onto the string's highest
//! qubit, one `RZ` there, and the mirror image. Stabilizer measurement
//! uses the same basis layer with a CNOT fan-in onto a fresh ancilla.
//!
//! Everything here is pure circuit construction; execution lives in
//! [`crate::emulator`].

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString, PauliSum};
use crate::Complex;
use std::fmt;

/// One gate. Angles are radians; qubits are register indices.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Cnot { control: usize, target: usize },
    Rz { target: usize, angle: f64 },
    /// `Rx(-pi/2)`: rotates Z onto -Y, used as the Y-basis change.
    RxM(usize),
    /// `Rx(+pi/2)`, inverse of [`Gate::RxM`].
    RxP(usize),
    Measure { target: usize, bit: usize },
    Conditional { bit: usize, inner: Box<Gate> },
}

impl Gate {
    /// Highest qubit index the gate touches.
    fn max_qubit(&self) -> usize {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::RxM(q) | Gate::RxP(q) => *q,
            Gate::Cnot { control, target } => (*control).max(*target),
            Gate::Rz { target, .. } | Gate::Measure { target, .. } => *target,
            Gate::Conditional { inner, .. } => inner.max_qubit(),
        }
    }

    fn classical_bit(&self) -> Option<usize> {
        match self {
            Gate::Measure { bit, .. } => Some(*bit),
            Gate::Conditional { bit, inner } => Some((*bit).max(inner.classical_bit().unwrap_or(0))),
            _ => None,
        }
    }

    fn is_valid(&self) -> bool {
        match self {
            Gate::Cnot { control, target } => control != target,
            Gate::Rz { angle, .. } => angle.is_finite(),
            Gate::Conditional { inner, .. } => {
                // Nested conditionals and conditional measurements are not
                // part of the model.
                !matches!(**inner, Gate::Conditional { .. } | Gate::Measure { .. })
                    && inner.is_valid()
            }
            _ => true,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Rz { target, angle } => write!(f, "RZ {target} {angle:.12e}"),
            Gate::RxM(q) => write!(f, "RXM {q}"),
            Gate::RxP(q) => write!(f, "RXP {q}"),
            Gate::Measure { target, bit } => write!(f, "MEASURE {target} {bit}"),
            Gate::Conditional { bit, inner } => write!(f, "CONDITIONAL {bit} {inner}"),
        }
    }
}

/// An ordered gate list over a fixed-width register plus classical bits.
#[derive(Clone, Debug, Default)]
pub struct Circuit {
    width: usize,
    classical_bits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit { width, classical_bits: 0, gates: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn classical_bits(&self) -> usize {
        self.classical_bits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if !gate.is_valid() {
            return Err(Error::InvalidConfig(format!("malformed gate {gate:?}")));
        }
        if gate.max_qubit() >= self.width {
            return Err(Error::QubitOutOfRange { index: gate.max_qubit(), n: self.width });
        }
        if let Some(bit) = gate.classical_bit() {
            self.classical_bits = self.classical_bits.max(bit + 1);
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all of `other`'s gates (widths must match).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(Error::WidthMismatch { circuit: self.width, state: other.width });
        }
        self.classical_bits = self.classical_bits.max(other.classical_bits);
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Same gates on a wider register (for running next to an ancilla).
    pub fn widened(&self, width: usize) -> Result<Circuit> {
        if width < self.width {
            return Err(Error::WidthMismatch { circuit: self.width, state: width });
        }
        Ok(Circuit { width, classical_bits: self.classical_bits, gates: self.gates.clone() })
    }

    pub fn has_measurement(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::Measure { .. }))
    }
}

impl fmt::Display for Circuit {
    /// One gate per line, `KIND q0 [q1] [angle]` — the stable text dump.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Linear interpolation schedule for adiabatic preparation.
#[derive(Clone, Copy, Debug)]
pub struct AdiabaticSchedule {
    pub outer_steps: usize,
    pub inner_steps: usize,
    pub d_tau: f64,
}

impl Default for AdiabaticSchedule {
    fn default() -> Self {
        AdiabaticSchedule { outer_steps: 100, inner_steps: 10, d_tau: 0.01 }
    }
}

impl AdiabaticSchedule {
    /// Ramp value for outer step `k`: linear from 0 to 1 inclusive. A
    /// single-step schedule jumps straight to 1.
    pub fn beta_of(&self, k: usize) -> f64 {
        assert!(k < self.outer_steps);
        if self.outer_steps == 1 {
            1.0
        } else {
            k as f64 / (self.outer_steps - 1) as f64
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outer_steps == 0 || self.inner_steps == 0 {
            return Err(Error::InvalidConfig("schedule needs at least one step".into()));
        }
        if !(self.d_tau.is_finite() && self.d_tau > 0.0) {
            return Err(Error::InvalidConfig(format!("bad d_tau {}", self.d_tau)));
        }
        Ok(())
    }
}

/// Real coefficient of a Hermitian-sum term: folds the string's `-1`
/// phase in and rejects genuinely complex terms.
fn real_coefficient(c: Complex, s: &PauliString) -> Result<f64> {
    if c.im.abs() > 1e-12 * c.norm().max(1.0) {
        return Err(Error::NonHermitian(format!("complex coefficient {c} on {s}")));
    }
    let sign = match s.phase_exponent() {
        0 => 1.0,
        2 => -1.0,
        _ => return Err(Error::NonHermitian(format!("imaginary phase on {s}"))),
    };
    Ok(c.re * sign)
}

/// Compiles `exp(-i c dt P)` for one Pauli string.
///
/// Layout: basis-change layer (`H` per X letter, `RXM` per Y letter), a
/// CNOT cascade accumulating parity onto the highest-index support
/// qubit, `RZ(phi)` there, then the mirrored cascade and basis layer.
/// With `RZ(phi) = diag(e^{-i phi/2}, e^{+i phi/2})` and the `RXM`
/// convention above, each Y letter flips the sense of the rotation, so
/// `phi = 2 c dt (-1)^{#Y}`; the dense-unitary tests pin this down.
pub fn compile_propagator(c: f64, string: &PauliString, dt: f64) -> Result<Circuit> {
    if !(c.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("non-finite angle inputs c={c} dt={dt}")));
    }
    let support = string.support();
    if support.is_empty() {
        return Err(Error::IdentityPropagator);
    }
    let sign = match string.phase_exponent() {
        0 => 1.0,
        2 => -1.0,
        _ => return Err(Error::NonHermitian(format!("imaginary phase on {string}"))),
    };
    let mut circuit = Circuit::new(string.n_qubits());
    let mut n_y = 0usize;
    for &q in &support {
        match string.letter(q) {
            Letter::X => circuit.push(Gate::H(q))?,
            Letter::Y => {
                n_y += 1;
                circuit.push(Gate::RxM(q))?;
            }
            Letter::Z => {}
            Letter::I => unreachable!("support excludes identity"),
        }
    }
    let pivot = *support.last().expect("non-empty");
    for &q in &support[..support.len() - 1] {
        circuit.push(Gate::Cnot { control: q, target: pivot })?;
    }
    let y_sign = if n_y % 2 == 0 { 1.0 } else { -1.0 };
    let angle = 2.0 * c * sign * dt * y_sign;
    circuit.push(Gate::Rz { target: pivot, angle })?;
    for &q in support[..support.len() - 1].iter().rev() {
        circuit.push(Gate::Cnot { control: q, target: pivot })?;
    }
    for &q in support.iter().rev() {
        match string.letter(q) {
            Letter::X => circuit.push(Gate::H(q))?,
            Letter::Y => circuit.push(Gate::RxP(q))?,
            _ => {}
        }
    }
    Ok(circuit)
}

/// One first-order Trotter step `prod_k exp(-i c_k dt P_k)` over the
/// sum's stored term order. Identity terms contribute only global phase
/// and are skipped, as are negligible coefficients.
///
/// `direction = -1.0` compiles the backward step: same term order,
/// negated angles. (Reversing the term order as well would give the
/// exact adjoint and hide all Trotter error, which defeats the
/// round-trip diagnostic this feeds.)
pub fn trotter_step(h: &PauliSum, dt: f64, direction: f64) -> Result<Circuit> {
    let mut circuit = Circuit::new(h.n_qubits());
    for (c, s) in h.terms() {
        let coeff = real_coefficient(*c, s)? * direction;
        if coeff.abs() < 1e-15 || s.is_identity_letters() {
            continue;
        }
        circuit.extend(&compile_propagator(coeff, s, dt)?)?;
    }
    Ok(circuit)
}

/// Measurement circuit for one stabilizer through an ancilla.
///
/// Basis layer, CNOT fan-in from every support qubit onto the ancilla,
/// an `X` on the ancilla when the stabilizer's sign is `-1` (so the
/// classical outcome `b` always means eigenvalue `(-1)^b`), `MEASURE`
/// into `bit`, a conditional `X` restoring the ancilla to `|0>`, and the
/// undone basis layer. For all-Z stabilizers the basis layers vanish and
/// this is exactly the plain CNOT fan-in construction.
pub fn stabilizer_measure_circuit(
    stabilizer: &PauliString,
    ancilla: usize,
    bit: usize,
) -> Result<Circuit> {
    if !stabilizer.is_hermitian() {
        return Err(Error::NonHermitian(format!("stabilizer {stabilizer}")));
    }
    let support = stabilizer.support();
    if support.is_empty() {
        return Err(Error::IdentityPropagator);
    }
    let width = stabilizer.n_qubits().max(ancilla + 1);
    if support.contains(&ancilla) {
        return Err(Error::QubitOutOfRange { index: ancilla, n: stabilizer.n_qubits() });
    }
    let mut circuit = Circuit::new(width);
    for &q in &support {
        match stabilizer.letter(q) {
            Letter::X => circuit.push(Gate::H(q))?,
            Letter::Y => circuit.push(Gate::RxM(q))?,
            _ => {}
        }
    }
    for &q in &support {
        circuit.push(Gate::Cnot { control: q, target: ancilla })?;
    }
    if stabilizer.phase_exponent() == 2 {
        circuit.push(Gate::X(ancilla))?;
    }
    circuit.push(Gate::Measure { target: ancilla, bit })?;
    circuit.push(Gate::Conditional { bit, inner: Box::new(Gate::X(ancilla)) })?;
    for &q in support.iter().rev() {
        match stabilizer.letter(q) {
            Letter::X => circuit.push(Gate::H(q))?,
            Letter::Y => circuit.push(Gate::RxP(q))?,
            _ => {}
        }
    }
    Ok(circuit)
}

/// Full adiabatic ramp: for each outer step `k`, `inner_steps` Trotter
/// steps of `H(beta_k) = H0 + beta_k (H1 - H0)` with time step `d_tau`.
/// `H0` is expected to be the hopping-free Hamiltonian and `H1` the full
/// one, making the combination the interpolated model at ramp value
/// `beta`.
pub fn adiabatic_circuit(
    h0: &PauliSum,
    h1: &PauliSum,
    schedule: &AdiabaticSchedule,
) -> Result<Circuit> {
    schedule.validate()?;
    if h0.n_qubits() != h1.n_qubits() {
        return Err(Error::QubitMismatch { left: h0.n_qubits(), right: h1.n_qubits() });
    }
    let mut circuit = Circuit::new(h0.n_qubits());
    let delta = h1.add(&h0.scale(Complex::new(-1.0, 0.0)))?;
    for k in 0..schedule.outer_steps {
        let beta = schedule.beta_of(k);
        let h_beta = h0.add(&delta.scale(Complex::new(beta, 0.0)))?.canonicalized();
        let step = trotter_step(&h_beta, schedule.d_tau, 1.0)?;
        for _ in 0..schedule.inner_steps {
            circuit.extend(&step)?;
        }
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::Encoder;
    use crate::lattice::LatticeSpec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Dense unitary of a measurement-free circuit, by applying gates to
    /// each computational basis column. Independent of the emulator.
    fn dense_unitary(c: &Circuit) -> Vec<Complex> {
        let n = c.width();
        assert!(n <= 6);
        let dim = 1usize << n;
        let mut u = vec![Complex::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let mut state = vec![Complex::new(0.0, 0.0); dim];
            state[col] = Complex::new(1.0, 0.0);
            for g in c.gates() {
                apply_dense(g, &mut state, n);
            }
            for row in 0..dim {
                u[row * dim + col] = state[row];
            }
        }
        u
    }

    /// Straight-line gate semantics used only by these tests.
    fn apply_dense(g: &Gate, state: &mut [Complex], n: usize) {
        let dim = 1usize << n;
        match g {
            Gate::H(q) => {
                let s = 1.0 / 2.0f64.sqrt();
                for b in 0..dim {
                    if b & (1 << q) == 0 {
                        let (a0, a1) = (state[b], state[b | (1 << q)]);
                        state[b] = (a0 + a1) * s;
                        state[b | (1 << q)] = (a0 - a1) * s;
                    }
                }
            }
            Gate::X(q) => {
                for b in 0..dim {
                    if b & (1 << q) == 0 {
                        state.swap(b, b | (1 << q));
                    }
                }
            }
            Gate::Cnot { control, target } => {
                for b in 0..dim {
                    if b & (1 << control) != 0 && b & (1 << target) == 0 {
                        state.swap(b, b | (1 << target));
                    }
                }
            }
            Gate::Rz { target, angle } => {
                let (m, p) = (
                    Complex::from_polar(1.0, -angle / 2.0),
                    Complex::from_polar(1.0, angle / 2.0),
                );
                for b in 0..dim {
                    state[b] *= if b & (1 << target) == 0 { m } else { p };
                }
            }
            // Rx(theta) = cos(theta/2) I - i sin(theta/2) X.
            Gate::RxM(q) | Gate::RxP(q) => {
                let sgn = if matches!(g, Gate::RxM(_)) { -1.0 } else { 1.0 };
                let (cth, sth) = ((std::f64::consts::FRAC_PI_4).cos(), (std::f64::consts::FRAC_PI_4).sin());
                let off = Complex::new(0.0, -sgn * sth);
                for b in 0..dim {
                    if b & (1 << q) == 0 {
                        let (a0, a1) = (state[b], state[b | (1 << q)]);
                        state[b] = a0 * cth + a1 * off;
                        state[b | (1 << q)] = a0 * off + a1 * cth;
                    }
                }
            }
            _ => panic!("measurement in a unitary-only test"),
        }
    }

    fn frobenius(a: &[Complex], b: &[Complex]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Aligns the global phase of `u` to `v` before comparing.
    fn phase_aligned_distance(u: &[Complex], v: &[Complex]) -> f64 {
        let dot: Complex = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
        if dot.norm() < 1e-14 {
            return f64::INFINITY;
        }
        let phase = dot / dot.norm();
        let rotated: Vec<Complex> = u.iter().map(|a| a * phase).collect();
        frobenius(&rotated, v)
    }

    fn exp_dense(c: f64, s: &PauliString, dt: f64) -> Vec<Complex> {
        // exp(-i theta P) = cos(theta) I - i sin(theta) P for P^2 = 1.
        let dim = 1usize << s.n_qubits();
        let p = s.to_dense().unwrap();
        let theta = c * dt;
        let mut u = vec![Complex::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            u[r * dim + r] = Complex::new(theta.cos(), 0.0);
            for col in 0..dim {
                u[r * dim + col] += Complex::new(0.0, -theta.sin()) * p[r * dim + col];
            }
        }
        u
    }

    #[test]
    fn single_letter_propagators_match_exact() {
        for (letters, c, dt) in [("Z", 0.7, 0.3), ("X", -1.2, 0.11), ("Y", 0.4, 0.9)] {
            let s: PauliString = letters.parse().unwrap();
            let circ = compile_propagator(c, &s, dt).unwrap();
            let d = phase_aligned_distance(&dense_unitary(&circ), &exp_dense(c, &s, dt));
            assert!(d < 1e-12, "{letters}: distance {d:.2e}");
        }
        // Structure: Z is bare RZ; X sandwiched in H; Y in RXM/RXP.
        let z: PauliString = "Z".parse().unwrap();
        let g = compile_propagator(1.0, &z, 0.1).unwrap();
        assert_eq!(g.len(), 1);
        assert!(matches!(g.gates()[0], Gate::Rz { .. }));
        let x: PauliString = "X".parse().unwrap();
        let g = compile_propagator(1.0, &x, 0.1).unwrap();
        assert!(matches!(g.gates()[0], Gate::H(0)));
        assert!(matches!(g.gates()[2], Gate::H(0)));
        let y: PauliString = "Y".parse().unwrap();
        let g = compile_propagator(1.0, &y, 0.1).unwrap();
        assert!(matches!(g.gates()[0], Gate::RxM(0)));
        assert!(matches!(g.gates()[2], Gate::RxP(0)));
    }

    #[test]
    fn zz_propagator_is_cnot_rz_cnot() {
        let s: PauliString = "ZZ".parse().unwrap();
        let circ = compile_propagator(0.5, &s, 0.2).unwrap();
        assert_eq!(circ.len(), 3);
        assert!(matches!(circ.gates()[0], Gate::Cnot { control: 0, target: 1 }));
        assert!(matches!(circ.gates()[1], Gate::Rz { target: 1, .. }));
        assert!(matches!(circ.gates()[2], Gate::Cnot { control: 0, target: 1 }));
        let d = phase_aligned_distance(&dense_unitary(&circ), &exp_dense(0.5, &s, 0.2));
        assert!(d < 1e-12);
    }

    #[test]
    fn random_propagators_match_exact_to_frobenius_tolerance() {
        let mut rng = StdRng::seed_from_u64(21);
        let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
        let mut checked = 0;
        while checked < 100 {
            let n = rng.gen_range(1..=6);
            let ls: Vec<Letter> =
                (0..n).map(|_| letters[rng.gen_range(0..4)]).collect();
            if ls.iter().all(|&l| l == Letter::I) {
                continue;
            }
            let s = PauliString::from_letters(&ls);
            let c = rng.gen_range(-2.0..2.0);
            let dt = rng.gen_range(0.01..0.5);
            let circ = compile_propagator(c, &s, dt).unwrap();
            let d = phase_aligned_distance(&dense_unitary(&circ), &exp_dense(c, &s, dt));
            assert!(d < 1e-12, "{s}: distance {d:.2e}");
            checked += 1;
        }
    }

    #[test]
    fn negative_phase_strings_fold_their_sign() {
        // -XY compiled with coefficient c must equal exp(-i(-c)dt XY).
        let s: PauliString = "-XY".parse().unwrap();
        let plain: PauliString = "XY".parse().unwrap();
        let circ = compile_propagator(0.8, &s, 0.25).unwrap();
        let d = phase_aligned_distance(&dense_unitary(&circ), &exp_dense(-0.8, &plain, 0.25));
        assert!(d < 1e-12);
    }

    #[test]
    fn identity_and_imaginary_phase_are_rejected() {
        let id = PauliString::identity(3);
        assert!(matches!(
            compile_propagator(1.0, &id, 0.1),
            Err(Error::IdentityPropagator)
        ));
        let mut s: PauliString = "X".parse().unwrap();
        s.mul_phase_exponent(1);
        assert!(matches!(compile_propagator(1.0, &s, 0.1), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn gate_set_is_closed_and_indices_in_range() {
        let spec = LatticeSpec::new(2, 2, true, false).unwrap();
        let e = Encoder::new(spec);
        let h = e.hamiltonian(1.0, 4.0).unwrap();
        let circ = trotter_step(&h, 0.05, 1.0).unwrap();
        assert!(!circ.is_empty());
        for g in circ.gates() {
            assert!(g.max_qubit() < circ.width());
            assert!(matches!(
                g,
                Gate::H(_) | Gate::X(_) | Gate::Cnot { .. } | Gate::Rz { .. }
                    | Gate::RxM(_) | Gate::RxP(_)
            ));
        }
        assert!(!circ.has_measurement());
    }

    #[test]
    fn trotter_step_on_single_term_equals_propagator() {
        let mut h = PauliSum::empty(3);
        let s: PauliString = "XZY".parse().unwrap();
        h.push_real(0.3, s.clone()).unwrap();
        let step = trotter_step(&h, 0.2, 1.0).unwrap();
        let direct = compile_propagator(0.3, &s, 0.2).unwrap();
        assert_eq!(step.gates(), direct.gates());
    }

    #[test]
    fn commuting_terms_have_no_trotter_error() {
        // Z0 + Z0 Z1 commute: one step is the exact exponential.
        let mut h = PauliSum::empty(2);
        h.push_real(0.9, "ZI".parse().unwrap()).unwrap();
        h.push_real(-0.4, "ZZ".parse().unwrap()).unwrap();
        let dt = 0.31;
        let step = trotter_step(&h, dt, 1.0).unwrap();
        let u = dense_unitary(&step);
        // Exact: product of the two commuting exponentials.
        let ua = exp_dense(0.9, &"ZI".parse().unwrap(), dt);
        let ub = exp_dense(-0.4, &"ZZ".parse().unwrap(), dt);
        let dim = 4;
        let mut exact = vec![Complex::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                for k in 0..dim {
                    exact[r * dim + c] += ub[r * dim + k] * ua[k * dim + c];
                }
            }
        }
        assert!(phase_aligned_distance(&u, &exact) < 1e-12);
    }

    #[test]
    fn first_order_trotter_error_scales_quadratically_per_step() {
        // Non-commuting toy pair on 2 qubits; per-step error ~ dt^2.
        let mut h = PauliSum::empty(2);
        h.push_real(0.8, "XI".parse().unwrap()).unwrap();
        h.push_real(0.6, "ZZ".parse().unwrap()).unwrap();
        let dense_h = h.to_dense().unwrap();
        let mut errs = Vec::new();
        let dts = [0.2, 0.1, 0.05, 0.025];
        for &dt in &dts {
            let u = dense_unitary(&trotter_step(&h, dt, 1.0).unwrap());
            // exp(-i dt H) via 2x2-blocks eigendecomposition is overkill;
            // Taylor to order 20 is machine-exact at these dt.
            let dim = 4;
            let mut exact = vec![Complex::new(0.0, 0.0); dim * dim];
            for i in 0..dim {
                exact[i * dim + i] = Complex::new(1.0, 0.0);
            }
            let mut term = exact.clone();
            for k in 1..=20 {
                let mut next = vec![Complex::new(0.0, 0.0); dim * dim];
                for r in 0..dim {
                    for c in 0..dim {
                        for j in 0..dim {
                            next[r * dim + c] += dense_h[r * dim + j] * term[j * dim + c];
                        }
                    }
                }
                let f = Complex::new(0.0, -dt) / k as f64;
                for (t, v) in term.iter_mut().zip(&next) {
                    *t = v * f;
                }
                for (e, t) in exact.iter_mut().zip(&term) {
                    *e += t;
                }
            }
            errs.push(phase_aligned_distance(&u, &exact));
        }
        // Log-log slope across the sweep.
        let slope = (errs[0] / errs[errs.len() - 1]).ln()
            / (dts[0] / dts[dts.len() - 1]).ln();
        assert!(slope > 1.8 && slope < 2.3, "slope {slope:.3}, errors {errs:?}");
    }

    #[test]
    fn backward_direction_negates_every_angle() {
        let spec = LatticeSpec::new(1, 2, true, false).unwrap();
        let e = Encoder::new(spec);
        let h = e.hamiltonian(0.7, 2.0).unwrap();
        let fwd = trotter_step(&h, 0.1, 1.0).unwrap();
        let bwd = trotter_step(&h, 0.1, -1.0).unwrap();
        assert_eq!(fwd.len(), bwd.len());
        for (f, b) in fwd.gates().iter().zip(bwd.gates()) {
            match (f, b) {
                (Gate::Rz { target: tf, angle: af }, Gate::Rz { target: tb, angle: ab }) => {
                    assert_eq!(tf, tb);
                    assert!((af + ab).abs() < 1e-15);
                }
                _ => assert_eq!(f, b),
            }
        }
    }

    #[test]
    fn stabilizer_circuit_shape_for_all_z() {
        // All-Z stabilizer: pure CNOT fan-in, no basis changes.
        let s: PauliString = "ZZIZ".parse().unwrap();
        let circ = stabilizer_measure_circuit(&s, 4, 0).unwrap();
        assert_eq!(circ.width(), 5);
        assert_eq!(circ.classical_bits(), 1);
        let kinds: Vec<&Gate> = circ.gates().iter().collect();
        assert!(matches!(kinds[0], Gate::Cnot { control: 0, target: 4 }));
        assert!(matches!(kinds[1], Gate::Cnot { control: 1, target: 4 }));
        assert!(matches!(kinds[2], Gate::Cnot { control: 3, target: 4 }));
        assert!(matches!(kinds[3], Gate::Measure { target: 4, bit: 0 }));
        assert!(matches!(kinds[4], Gate::Conditional { bit: 0, .. }));
        assert_eq!(kinds.len(), 5);
    }

    #[test]
    fn stabilizer_circuit_marks_negative_phase() {
        let s: PauliString = "-XYXY".parse().unwrap();
        let circ = stabilizer_measure_circuit(&s, 4, 2).unwrap();
        assert!(circ.gates().iter().any(|g| matches!(g, Gate::X(4))));
        assert_eq!(circ.classical_bits(), 3);
        let mut s2 = s.clone();
        s2.mul_phase_exponent(1);
        assert!(stabilizer_measure_circuit(&s2, 4, 0).is_err());
    }

    #[test]
    fn adiabatic_gate_count_and_endpoints() {
        let spec = LatticeSpec::new(1, 2, true, false).unwrap();
        let e = Encoder::new(spec);
        let h1 = e.hamiltonian(0.1, 1.0).unwrap();
        let h0 = e.onsite_sum(1.0).unwrap();
        let sched = AdiabaticSchedule { outer_steps: 4, inner_steps: 2, d_tau: 0.05 };
        let circ = adiabatic_circuit(&h0, &h1, &sched).unwrap();
        // One step of H(0) has only on-site rotations; H(1) adds hopping.
        let h0_step = trotter_step(&h0.clone().canonicalized(), 0.05, 1.0).unwrap().len();
        let h1_step = trotter_step(&h1.clone().canonicalized(), 0.05, 1.0).unwrap().len();
        assert_eq!(
            circ.len(),
            2 * h0_step + 2 * h1_step
                + 2 * 2 * trotter_step(
                    &h0.add(&h1.add(&h0.scale(Complex::new(-1.0, 0.0))).unwrap().scale(Complex::new(1.0 / 3.0, 0.0)))
                        .unwrap()
                        .canonicalized(),
                    0.05,
                    1.0
                )
                .unwrap()
                .len()
        );
        // Single-outer-step schedule jumps to beta = 1.
        let one = AdiabaticSchedule { outer_steps: 1, inner_steps: 1, d_tau: 0.05 };
        assert_eq!(one.beta_of(0), 1.0);
        let circ1 = adiabatic_circuit(&h0, &h1, &one).unwrap();
        let direct = trotter_step(&h1.canonicalized(), 0.05, 1.0).unwrap();
        assert_eq!(circ1.gates().len(), direct.gates().len());
    }

    #[test]
    fn schedule_ramp_is_monotone_with_fixed_endpoints() {
        let sched = AdiabaticSchedule::default();
        assert_eq!(sched.beta_of(0), 0.0);
        assert_eq!(sched.beta_of(sched.outer_steps - 1), 1.0);
        for k in 1..sched.outer_steps {
            assert!(sched.beta_of(k) > sched.beta_of(k - 1));
        }
        assert!(AdiabaticSchedule { outer_steps: 0, ..sched }.validate().is_err());
        assert!(AdiabaticSchedule { d_tau: -0.1, ..sched }.validate().is_err());
    }

    #[test]
    fn circuit_text_dump_is_stable() {
        let mut c = Circuit::new(3);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot { control: 0, target: 2 }).unwrap();
        c.push(Gate::Rz { target: 2, angle: 0.125 }).unwrap();
        c.push(Gate::Measure { target: 2, bit: 0 }).unwrap();
        c.push(Gate::Conditional { bit: 0, inner: Box::new(Gate::X(2)) }).unwrap();
        let dump = c.to_string();
        assert_eq!(
            dump,
            "H 0\nCNOT 0 2\nRZ 2 1.250000000000e-1\nMEASURE 2 0\nCONDITIONAL 0 X 2\n"
        );
    }

    #[test]
    fn circuit_validation_rejects_malformed_gates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::H(2)).is_err());
        assert!(c.push(Gate::Cnot { control: 1, target: 1 }).is_err());
        assert!(c.push(Gate::Rz { target: 0, angle: f64::NAN }).is_err());
        assert!(c
            .push(Gate::Conditional {
                bit: 0,
                inner: Box::new(Gate::Conditional { bit: 1, inner: Box::new(Gate::X(0)) })
            })
            .is_err());
        assert!(c.push(Gate::H(1)).is_ok());
        // Widening keeps gates; shrinking is refused.
        let w = c.widened(5).unwrap();
        assert_eq!(w.width(), 5);
        assert!(c.widened(1).is_err());
    }
}
