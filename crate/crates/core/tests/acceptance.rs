//! Release acceptance suite: one test per release criterion.
//!
//! Every test evaluates its criterion into a boolean, prints a single
//! `[PASS]`/`[FAIL]` line (visible under `--nocapture`; the harness
//! summary shows the same verdict as the test result), and asserts it.
//! Tolerances are pinned here and nowhere else.

use std::time::Instant;

use defermion::circuit::{compile_propagator, AdiabaticSchedule, Gate};
use defermion::emulator::StateVector;
use defermion::encoder::Encoder;
use defermion::lattice::{LatticeSpec, Link, LinkDir, Role, Site};
use defermion::oracle::fermionic::{free_fermion_ground_energy, FermionEd};
use defermion::oracle::full_space_ground;
use defermion::oracle::sector::SectorBasis;
use defermion::pauli::{Letter, MergeMap, PauliString, PauliSum};
use defermion::protocols::{
    self, evolve_and_record, fix_stabilizers, inject_excitation, prepare_initial_state,
    Excitation, OracleDynamics,
};
use defermion::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {id:02} — {name}: {detail}");
    assert!(ok, "criterion {id:02} ({name}) failed: {detail}");
}

fn spinful(lx: usize, ly: usize, with_extra: bool) -> Encoder {
    Encoder::new(LatticeSpec::new(lx, ly, true, with_extra).unwrap())
}

/// Nearest-neighbor bonds of an open `lx x ly` grid, site index `y*lx + x`.
fn open_bonds(lx: usize, ly: usize) -> Vec<(usize, usize)> {
    let mut bonds = Vec::new();
    for y in 0..ly {
        for x in 0..lx {
            let s = y * lx + x;
            if x + 1 < lx {
                bonds.push((s, s + 1));
            }
            if y + 1 < ly {
                bonds.push((s, s + lx));
            }
        }
    }
    bonds
}

/// `<v|P|v>` on a dense state, straight from the basis action.
fn expect_string(v: &[Complex], s: &PauliString) -> Complex {
    let mut acc = Complex::new(0.0, 0.0);
    for (b, amp) in v.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let (b2, phase) = s.apply_to_basis(b as u64);
        acc += v[b2 as usize].conj() * phase * amp;
    }
    acc
}

fn letter_char(l: Letter) -> char {
    match l {
        Letter::I => 'I',
        Letter::X => 'X',
        Letter::Y => 'Y',
        Letter::Z => 'Z',
    }
}

fn find_link(e: &Encoder, base: Site, dir: LinkDir) -> Link {
    e.spec()
        .links()
        .into_iter()
        .find(|l| l.base == base && l.dir == dir)
        .expect("link exists on this lattice")
}

// ---------------------------------------------------------------------------
// 1. Ground-energy agreement between the encoded model and fermionic ED.
// ---------------------------------------------------------------------------

/// Builds the full penalty-mode Hamiltonian: model terms plus stabilizer
/// and filling penalties, all weights 20.
fn penalty_hamiltonian(e: &Encoder, t: f64, u: f64, n_target: usize) -> PauliSum {
    e.hamiltonian(t, u)
        .unwrap()
        .add(&e.stabilizer_penalty(20.0, 20.0).unwrap())
        .unwrap()
        .add(&e.number_penalty(20.0, n_target).unwrap())
        .unwrap()
        .canonicalized()
}

#[test]
fn criterion_01_encoded_ground_energies_match_fermionic_diagonalization() {
    let start = Instant::now();
    let e = spinful(2, 2, false);
    let bonds = open_bonds(2, 2);
    let t = 1.0;
    let mut worst = 0.0f64;
    for rho in [0.5, 1.0, 1.5] {
        let n_target = (rho * 4.0_f64).round() as usize;
        for ratio in [0.0, 2.0, 4.0, 8.0, 10.0] {
            let u = ratio * t;
            // Number-resolved fermionic ED plus the same quadratic filling
            // penalty; particle number is conserved, so the penalty is a
            // per-sector constant.
            let ed = FermionEd::hubbard(4, &bonds, t, u).unwrap();
            let fermionic = (0..=8)
                .map(|n| {
                    ed.ground_energy(n).unwrap() + 20.0 * (n as f64 - n_target as f64).powi(2)
                })
                .fold(f64::INFINITY, f64::min);
            let (encoded, _) = full_space_ground(&penalty_hamiltonian(&e, t, u, n_target)).unwrap();
            // Relative to max(|E|, 1) so an accidental near-zero crossing of
            // the ground energy cannot inflate the metric.
            let rel = (encoded - fermionic).abs() / fermionic.abs().max(1.0);
            worst = worst.max(rel);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "encoded vs fermionic ground energies over 15 filling/interaction points",
        worst < 1e-10 && secs < 60.0,
        &format!("max relative difference {worst:.2e} ({secs:.1}s, budget 60s)"),
    );
}

// ---------------------------------------------------------------------------
// 2. Constraint satisfaction of the penalty-mode ground state, plus the two
//    analytic corners of the phase diagram.
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_penalty_ground_state_obeys_constraints_and_analytic_corners() {
    let e = spinful(2, 2, false);
    let bonds = open_bonds(2, 2);

    // Representative interacting point at half filling.
    let (_, vec) = full_space_ground(&penalty_hamiltonian(&e, 1.0, 8.0, 4)).unwrap();
    let mut stab_dev = 0.0f64;
    for s in e.stabilizers().unwrap() {
        let ev = expect_string(&vec, &s);
        stab_dev = stab_dev.max((ev.re - 1.0).abs().max(ev.im.abs()));
    }

    // Zero hopping at half filling: every site singly occupied, so the
    // plain interaction energy vanishes and the symmetrized energy per
    // site is exactly -u/4 after the particle-hole shift
    // `E_sym = E - (u/2) N + (u/4) n_sites`.
    let u0 = 4.0;
    let (e_t0, _) = full_space_ground(&penalty_hamiltonian(&e, 0.0, u0, 4)).unwrap();
    let eps_t0 = (e_t0 - (u0 / 2.0) * 4.0 + u0) / 4.0;
    let dev_t0 = (eps_t0 + u0 / 4.0).abs();

    // Free fermions at half filling: per-site energy -t, checked against
    // an independent single-particle diagonalization.
    let t = 1.0;
    let (e_u0, _) = full_space_ground(&penalty_hamiltonian(&e, t, 0.0, 4)).unwrap();
    let free = free_fermion_ground_energy(4, &bonds, t, 4, true);
    let dev_u0 = (e_u0 / 4.0 + t).abs().max((e_u0 - free).abs());

    report(
        2,
        "penalty-mode ground state: stabilizers at +1 and analytic corners",
        stab_dev < 1e-7 && dev_t0 < 1e-10 && dev_u0 < 1e-10,
        &format!(
            "max stabilizer deviation {stab_dev:.2e}, zero-hopping corner {dev_t0:.2e}, \
             free-fermion corner {dev_u0:.2e}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 3. Dimension of the joint +1 stabilizer eigenspace, and the qubit count
//    of the wide ladder with the extra rishon.
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_physical_subspace_dimension_and_register_width() {
    let e = spinful(2, 2, false);
    let stabs = e.stabilizers().unwrap();
    let n = e.layout().n_merged();
    let dim_full = (1u64 << n) as f64;

    // Rank of the joint projector prod_i (1 + S_i)/2 by brute force over
    // all 2^5 subset products: a Pauli string is traceless unless its
    // letters are all identity.
    let mut acc = Complex::new(0.0, 0.0);
    for mask in 0u32..(1 << stabs.len()) {
        let mut g = PauliString::identity(n);
        for (i, s) in stabs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g = g.multiply(s).unwrap();
            }
        }
        if g.is_identity_letters() {
            acc += g.phase() * dim_full;
        }
    }
    let rank = acc.re / (1u64 << stabs.len()) as f64;

    // Independent path: direct enumeration of the constrained basis.
    let enumerated = SectorBasis::build(&e).unwrap().dim();

    // 2^(2*x*y - 1) for the 2x2 lattice.
    let closed_form = 1u64 << (2 * 2 * 2 - 1);

    let wide = LatticeSpec::new(4, 2, true, true).unwrap();
    let qubits = wide.n_merged();

    let ok = (rank - closed_form as f64).abs() < 1e-9
        && acc.im.abs() < 1e-9
        && enumerated as u64 == closed_form
        && qubits == 27;
    report(
        3,
        "physical subspace dimension and wide-ladder register width",
        ok,
        &format!(
            "projector rank {rank:.1}, enumerated basis {enumerated}, closed form {closed_form}, \
             4x2-with-extra register {qubits} qubits"
        ),
    );
}

// ---------------------------------------------------------------------------
// 4. Operator letter tables: hopping product row, two-site strings, the
//    quarter-ZZ interaction, the all-Z vertex form, the plaquette row, and
//    the rishon-pair compression table against a matrix oracle.
// ---------------------------------------------------------------------------

/// Reads the letters of `s` at one site's modes in the given role order;
/// roles absent on this lattice read as identity columns.
fn block_letters(e: &Encoder, site: Site, order: &[Role], s: &PauliString) -> String {
    order
        .iter()
        .map(|&r| match e.layout().premerge_index(site, r) {
            Some(q) => letter_char(s.letter(q)),
            None => 'I',
        })
        .collect()
}

/// Places per-column `(site, role, letter, quarter-phase)` entries on the
/// pre-merge register. A quarter-phase of 1 encodes a `+i` column entry
/// (e.g. `iY`), 3 encodes `-i`.
fn place_columns(e: &Encoder, entries: &[(Site, Role, Letter, u8)]) -> PauliString {
    let mut s = PauliString::identity(e.layout().n_premerge());
    let mut quarters = 0u8;
    for &(site, role, letter, q) in entries {
        let idx = e.layout().premerge_index(site, role).expect("mode exists");
        s.set_letter(idx, letter).unwrap();
        quarters = (quarters + q) % 4;
    }
    s.mul_phase_exponent(quarters);
    s
}

const EVEN_ORDER: [Role; 6] = [Role::U, Role::D, Role::W, Role::S, Role::E, Role::N];
const ODD_ORDER: [Role; 6] = [Role::D, Role::U, Role::S, Role::W, Role::N, Role::E];

#[test]
fn criterion_04_operator_letter_tables_and_link_compression() {
    // --- (a) Hopping strings on a horizontal bond, even site on the left.
    // Column tables over the two six-mode site blocks; the up-flavor
    // product carries `+i` on the left site's east rishon column and `-i`
    // on the right site's west rishon column, which cancel when folded.
    let e3 = spinful(3, 3, false);
    let even = Site::new(1, 1);
    let odd = Site::new(2, 1);
    let link = find_link(&e3, even, LinkDir::E);

    let row = [
        (even, Role::U, Letter::X, 0u8),
        (even, Role::D, Letter::Z, 0),
        (even, Role::W, Letter::Z, 0),
        (even, Role::S, Letter::Z, 0),
        (even, Role::E, Letter::Y, 1), // +i Y
        (odd, Role::U, Letter::Y, 0),
        (odd, Role::S, Letter::Z, 0),
        (odd, Role::W, Letter::Y, 3), // -i Y
    ];
    let first = place_columns(&e3, &row);
    // The folded form drops the per-column phases (they multiply to +1).
    let folded = {
        let plain: Vec<_> = row.iter().map(|&(s, r, l, _)| (s, r, l, 0u8)).collect();
        place_columns(&e3, &plain)
    };
    let fold_ok = first == folded && first.phase_exponent() == 0;

    // Golden block letters, read back in table column order.
    let letters1 = format!(
        "{}{}",
        block_letters(&e3, even, &EVEN_ORDER, &first),
        block_letters(&e3, odd, &ODD_ORDER, &first)
    );
    let second = {
        let mut swapped = row;
        swapped[0] = (even, Role::U, Letter::Y, 0);
        swapped[5] = (odd, Role::U, Letter::X, 0);
        place_columns(&e3, &swapped)
    };
    let letters2 = format!(
        "{}{}",
        block_letters(&e3, even, &EVEN_ORDER, &second),
        block_letters(&e3, odd, &ODD_ORDER, &second)
    );
    let strings_ok = letters1 == "XZZZYIIYZYII" && letters2 == "YZZZYIIXZYII";

    // The encoder must reproduce both strings letter-for-letter (and in
    // sign) once the expected rows pass through rishon-pair compression.
    let map3 = e3.layout().merge_map();
    let (s1, s2) = e3.hopping_pair(link, Role::U).unwrap();
    let hop_ok = first.link_merge(&map3).unwrap().to_string() == s1.to_string()
        && second.link_merge(&map3).unwrap().to_string() == s2.to_string();

    // --- (b) Interaction letters: (n_up - 1/2)(n_dn - 1/2) = (1/4) ZZ.
    let two = |coeff: f64, s: &str| {
        let mut sum = PauliSum::empty(2);
        sum.push_real(coeff, s.parse().unwrap()).unwrap();
        sum
    };
    let shifted = |q: usize| {
        // n_q - 1/2 = -(1/2) Z_q
        let mut sum = PauliSum::empty(2);
        sum.push_real(0.5, PauliString::identity(2)).unwrap();
        sum.push_real(-0.5, PauliString::single(2, q, Letter::Z).unwrap()).unwrap();
        sum.add(&two(-0.5, "II")).unwrap()
    };
    let product = shifted(0).multiply(&shifted(1)).unwrap().canonicalized();
    let quarter_zz = product.terms().len() == 1
        && (product.terms()[0].0 - Complex::new(0.25, 0.0)).norm() < 1e-15
        && product.terms()[0].1.to_string() == "ZZ";
    // The encoder's onsite coupling carries the same ZZ coefficient u/4.
    let e2 = spinful(2, 2, false);
    let site0_zz = {
        let layout = e2.layout();
        let mut s = PauliString::identity(layout.n_merged());
        s.set_letter(layout.matter_qubit(Site::new(0, 0), Role::U), Letter::Z).unwrap();
        s.set_letter(layout.matter_qubit(Site::new(0, 0), Role::D), Letter::Z).unwrap();
        s
    };
    let u = 4.0;
    let onsite = e2.onsite_sum(u).unwrap();
    let zz_coeff = onsite
        .terms()
        .iter()
        .find(|(_, s)| s == &site0_zz)
        .map(|(c, _)| *c)
        .unwrap_or(Complex::new(0.0, 0.0));
    let onsite_ok = (zz_coeff - Complex::new(u / 4.0, 0.0)).norm() < 1e-15;

    // --- (c) Vertex stabilizers are all-Z over a site's matter and links.
    let mut vertex_ok = true;
    for e in [&e2, &e3] {
        let layout = e.layout();
        for site in e.spec().sites() {
            let mut expected = PauliString::identity(layout.n_merged());
            for &r in layout.site_modes(site) {
                if r.is_matter() {
                    expected.set_letter(layout.matter_qubit(site, r), Letter::Z).unwrap();
                }
            }
            for l in e.spec().links() {
                if l.base == site || l.far() == site {
                    expected.set_letter(layout.link_qubit(l), Letter::Z).unwrap();
                }
            }
            vertex_ok &= e.vertex_stabilizer(site).unwrap() == expected;
        }
    }
    // Frozen golden rendering on the 2x2 lattice.
    let goldens = ["ZZIIIIIIZZII", "IIZZIIIIZIZI", "IIIIZZIIIZIZ", "IIIIIIZZIIZZ"];
    for (site, golden) in e2.spec().sites().into_iter().zip(goldens) {
        vertex_ok &= e2.vertex_stabilizer(site).unwrap().to_string() == golden;
    }

    // --- (d) Plaquette stabilizer row over four interior six-mode blocks,
    // lower-left corner even. The four `+i` column entries multiply to +1.
    let e4 = spinful(4, 4, false);
    let (ll, ul, lr, ur) =
        (Site::new(1, 1), Site::new(1, 2), Site::new(2, 1), Site::new(2, 2));
    let plaquette_row = [
        (ll, Role::E, Letter::X, 0u8),
        (ll, Role::N, Letter::Y, 1),
        (ul, Role::S, Letter::X, 0),
        (ul, Role::W, Letter::Z, 0),
        (ul, Role::N, Letter::Z, 0),
        (ul, Role::E, Letter::Y, 1),
        (lr, Role::W, Letter::X, 0),
        (lr, Role::N, Letter::Y, 1),
        (ur, Role::W, Letter::X, 0),
        (ur, Role::S, Letter::Y, 1),
    ];
    let expected_plaq = place_columns(&e4, &plaquette_row);
    let blocks = format!(
        "{} {} {} {}",
        block_letters(&e4, ll, &EVEN_ORDER, &expected_plaq),
        block_letters(&e4, ul, &ODD_ORDER, &expected_plaq),
        block_letters(&e4, lr, &ODD_ORDER, &expected_plaq),
        block_letters(&e4, ur, &EVEN_ORDER, &expected_plaq)
    );
    let plaq_letters_ok = blocks == "IIIIXY IIXZZY IIIXYI IIXYII";
    let p = e4
        .spec()
        .plaquettes()
        .into_iter()
        .find(|p| p.lower_left() == ll)
        .expect("interior plaquette");
    let plaq_ok = expected_plaq
        .link_merge(&e4.layout().merge_map())
        .unwrap()
        .to_string()
        == e4.plaquette_stabilizer(p).unwrap().to_string();

    // --- (e) Rishon-pair compression on all 16 letter pairs against the
    // matrix oracle V^dag (P x Q) V with V|0> = |00>, V|1> = |11>.
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let map = MergeMap::new(2, 1, vec![(0, 1, 0)], vec![]).unwrap();
    let mut merge_ok = true;
    let mut merged_table = Vec::new();
    for a in letters {
        for b in letters {
            let mut s = PauliString::identity(2);
            s.set_letter(0, a).unwrap();
            s.set_letter(1, b).unwrap();
            let dense = s.to_dense().unwrap();
            // Rows/columns 0 and 3 of the two-qubit matrix are the
            // even-occupation block the isometry keeps.
            let oracle = [dense[0], dense[3], dense[12], dense[15]];
            match s.link_merge(&map) {
                Ok(m) => {
                    let md = m.to_dense().unwrap();
                    merge_ok &= md
                        .iter()
                        .zip(oracle.iter())
                        .all(|(x, y)| (x - y).norm() < 1e-15);
                    merged_table.push(format!(
                        "{}{}->{}",
                        letter_char(a),
                        letter_char(b),
                        m
                    ));
                }
                Err(_) => {
                    // Parity-violating pairs leave the kept block, so the
                    // compressed matrix must vanish identically.
                    merge_ok &= oracle.iter().all(|x| x.norm() == 0.0);
                }
            }
        }
    }
    let named_ok = merged_table.contains(&"ZZ->I".to_string())
        && merged_table.contains(&"XX->X".to_string())
        && merged_table.contains(&"YY->-X".to_string());

    let ok = fold_ok
        && strings_ok
        && hop_ok
        && quarter_zz
        && onsite_ok
        && vertex_ok
        && plaq_letters_ok
        && plaq_ok
        && merge_ok
        && named_ok;
    report(
        4,
        "operator letter tables and rishon-pair compression",
        ok,
        &format!(
            "hopping row fold {fold_ok}, strings {strings_ok}, encoder match {hop_ok}, \
             quarter-ZZ {}, vertex form {vertex_ok}, plaquette row {}, \
             16-pair compression {merge_ok} ({})",
            quarter_zz && onsite_ok,
            plaq_letters_ok && plaq_ok,
            merged_table.join(" ")
        ),
    );
}

// ---------------------------------------------------------------------------
// 5. Compiled propagators against the dense matrix exponential, plus the
//    structural cascade-and-rotation shape of the circuit.
// ---------------------------------------------------------------------------

/// Frobenius distance between two unitaries after aligning global phase at
/// the largest expected entry.
fn phase_aligned_distance(got: &[Complex], expected: &[Complex]) -> f64 {
    let pivot = expected
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let r = got[pivot] / expected[pivot];
    if r.norm() < 1e-6 {
        return f64::INFINITY;
    }
    let align = r / r.norm();
    got.iter()
        .zip(expected.iter())
        .map(|(g, e)| (g - align * e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[test]
fn criterion_05_compiled_propagators_match_dense_exponentials() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let mut ls: Vec<Letter> = (0..n)
            .map(|_| [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..4)])
            .collect();
        if ls.iter().all(|&l| l == Letter::I) {
            ls[rng.gen_range(0..n)] = Letter::Z;
        }
        let mut s = PauliString::from_letters(&ls);
        if rng.gen_bool(0.5) {
            s.mul_phase_exponent(2); // negative-signed Hermitian strings too
        }
        let c: f64 = rng.gen_range(-2.0..2.0);
        let dt: f64 = rng.gen_range(0.01..0.4);
        let circuit = compile_propagator(c, &s, dt).unwrap();

        let dim = 1usize << n;
        // Closed-form exponential of a Pauli string:
        // exp(-i theta P) = cos(theta) - i sin(theta) P, theta = c dt.
        let p = s.to_dense().unwrap();
        let (cos, sin) = ((c * dt).cos(), (c * dt).sin());
        let mut expected = vec![Complex::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            expected[r * dim + r] = Complex::new(cos, 0.0);
        }
        for (out, pin) in expected.iter_mut().zip(p.iter()) {
            *out += Complex::new(0.0, -sin) * pin;
        }

        let mut got = vec![Complex::new(0.0, 0.0); dim * dim];
        let mut sv = StateVector::new(n, 1).unwrap();
        for col in 0..dim {
            sv.reset_basis(col as u64).unwrap();
            sv.run(&circuit).unwrap();
            for (row, amp) in sv.amplitudes().iter().enumerate() {
                got[row * dim + col] = *amp;
            }
        }
        worst = worst.max(phase_aligned_distance(&got, &expected));
    }

    // Structural shape, all-Z case: bare CNOT cascade onto the last
    // support qubit, one Z rotation of angle 2 c dt, mirrored cascade.
    let zzz = compile_propagator(0.7, &"ZZZ".parse().unwrap(), 0.1).unwrap();
    let g = zzz.gates();
    let all_z_shape = g.len() == 5
        && matches!(g[0], Gate::Cnot { control: 0, target: 2 })
        && matches!(g[1], Gate::Cnot { control: 1, target: 2 })
        && matches!(g[2], Gate::Rz { target: 2, angle } if (angle - 2.0 * 0.7 * 0.1).abs() < 1e-15)
        && matches!(g[3], Gate::Cnot { control: 1, target: 2 })
        && matches!(g[4], Gate::Cnot { control: 0, target: 2 });

    // Mixed-letter case: Hadamard on the X column and the x-rotation pair
    // on the Y column bracket the same cascade; one Y letter flips the
    // rotation sign.
    let xzy = compile_propagator(0.7, &"XZY".parse().unwrap(), 0.1).unwrap();
    let g = xzy.gates();
    let mixed_shape = g.len() == 9
        && matches!(g[0], Gate::H(0))
        && matches!(g[1], Gate::RxM(2))
        && matches!(g[2], Gate::Cnot { control: 0, target: 2 })
        && matches!(g[3], Gate::Cnot { control: 1, target: 2 })
        && matches!(g[4], Gate::Rz { target: 2, angle } if (angle + 2.0 * 0.7 * 0.1).abs() < 1e-15)
        && matches!(g[5], Gate::Cnot { control: 1, target: 2 })
        && matches!(g[6], Gate::Cnot { control: 0, target: 2 })
        && matches!(g[7], Gate::RxP(2))
        && matches!(g[8], Gate::H(0));

    report(
        5,
        "compiled propagators vs dense exponentials",
        worst < 1e-12 && all_z_shape && mixed_shape,
        &format!(
            "max phase-aligned Frobenius distance {worst:.2e} over 100 random strings; \
             cascade shapes {all_z_shape}/{mixed_shape}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 6. First-order convergence of the forward-backward round trip.
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_round_trip_error_scales_linearly_in_the_step() {
    let start = Instant::now();
    let e = spinful(2, 2, false);
    let rows =
        protocols::trotter_convergence(&e, 0.1, 1.0, &[0.1, 0.05, 0.02, 0.01], 20.0, 11).unwrap();
    let decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    let slope = protocols::log_log_slope(&rows).unwrap_or(0.0);
    let secs = start.elapsed().as_secs_f64();
    let errors: Vec<String> = rows.iter().map(|(dt, e)| format!("{dt}:{e:.2e}")).collect();
    report(
        6,
        "round-trip double-occupancy error over shrinking steps",
        decreasing && slope >= 0.9 && secs < 600.0,
        &format!(
            "errors [{}], log-log slope {slope:.3} ({secs:.0}s, budget 600s)",
            errors.join(", ")
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. Circuit dynamics against the constraint-sector oracle.
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_circuit_dynamics_track_the_sector_oracle() {
    let e = spinful(2, 2, false);
    let (t, u, dt) = (0.1, 1.0, 0.01);
    let corner = Site::new(0, 0);

    let mut state = prepare_initial_state(&e, 23).unwrap();
    fix_stabilizers(&e, &mut state).unwrap();
    let p_circuit = inject_excitation(&e, &mut state, Excitation::Spin, corner).unwrap();
    let traj = evolve_and_record(&e, &mut state, t, u, dt, 20.0, 25).unwrap();

    let oracle = OracleDynamics::build(&e, t, u).unwrap();
    let mut coeffs = oracle.fixed_initial_state(&e).unwrap();
    let p_oracle = oracle.inject(&e, &mut coeffs, Excitation::Spin, corner).unwrap();
    let recs = oracle.evolve_recording(&mut coeffs, 0.25, 80).unwrap();

    let mut worst = 0.0f64;
    let aligned = traj.records.len() == recs.len();
    if aligned {
        for (rc, ro) in traj.records.iter().zip(recs.iter()) {
            assert!((rc.tau - ro.tau).abs() < 1e-9);
            for site in 0..4 {
                worst = worst
                    .max((rc.n[site] - ro.n[site]).abs())
                    .max((rc.sz[site] - ro.sz[site]).abs());
            }
        }
    }
    report(
        7,
        "spin-injected circuit trajectory vs sector oracle",
        aligned && worst < 5e-3 && (p_circuit - p_oracle).abs() < 1e-9,
        &format!(
            "max per-site deviation {worst:.2e} over tau <= 20 at dt = {dt}, \
             post-selection probabilities {p_circuit:.6}/{p_oracle:.6}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. Separation of charge and spin timescales.
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_timescale_separation_on_the_wide_ladder_oracle() {
    let start = Instant::now();
    let e = spinful(4, 2, true);
    let (t, u) = (0.1, 1.0);
    let oracle = OracleDynamics::build(&e, t, u).unwrap();
    // The protocol's initial state is the ramped preparation, not the
    // exact ground state: the published timescales carry the diabatic
    // spin content a superexchange-short ramp leaves behind (from the
    // exact ground state the first spin peak sits measurably later).
    let ground = oracle.adiabatic_initial_state(&e, &AdiabaticSchedule::default()).unwrap();

    // Hole dynamics: a charge excitation at the corner, watched through
    // the local charge at the injection site itself — its first revival
    // peak marks the hole timescale.
    let mut hole = ground.clone();
    oracle.inject(&e, &mut hole, Excitation::Charge, Site::new(0, 0)).unwrap();
    let hole_recs = oracle.evolve_recording(&mut hole, 0.25, 80).unwrap();
    let taus: Vec<f64> = hole_recs.iter().map(|r| r.tau).collect();
    let occupation: Vec<f64> = hole_recs.iter().map(|r| r.n[0]).collect();
    let tau_h = protocols::first_peak_time(&taus, &occupation).unwrap_or(f64::NAN);

    // Spin dynamics: a corner spin flip, watched through the same site's
    // magnetization; superexchange makes this slower by u/(2 t).
    let mut flipped = ground;
    oracle.inject(&e, &mut flipped, Excitation::Spin, Site::new(0, 0)).unwrap();
    let spin_recs = oracle.evolve_recording(&mut flipped, 1.0, 100).unwrap();
    let staus: Vec<f64> = spin_recs.iter().map(|r| r.tau).collect();
    let magnetization: Vec<f64> = spin_recs.iter().map(|r| r.sz[0]).collect();
    let tau_s = protocols::first_peak_time(&staus, &magnetization).unwrap_or(f64::NAN);

    let ratio = tau_s / tau_h;
    let secs = start.elapsed().as_secs_f64();
    let ok = (tau_h / (1.2 / t) - 1.0).abs() <= 0.25
        && (tau_s / (6.5 / t) - 1.0).abs() <= 0.25
        && (ratio / 5.4 - 1.0).abs() <= 0.25
        && secs < 1800.0;
    report(
        8,
        "charge vs spin timescales on the 4x2 ladder oracle",
        ok,
        &format!(
            "hole peak {tau_h:.1} (target 12±25%), spin peak {tau_s:.0} (target 65±25%), \
             ratio {ratio:.2} (target 5.4±25%) ({secs:.0}s, budget 1800s)"
        ),
    );
}

#[test]
#[ignore = "hours-scale dense circuit run; the wide-ladder oracle variant carries the release gate"]
fn criterion_08a_timescale_separation_on_the_tall_lattice_circuit() {
    let e = spinful(2, 3, true);
    let (t, u, dt) = (0.1, 1.0, 0.02);
    let corner = Site::new(0, 0);
    let schedule = AdiabaticSchedule::default();
    let (ground, _) = protocols::adiabatic_ground_state(&e, t, u, &schedule, 31).unwrap();

    let mut hole = ground.clone();
    inject_excitation(&e, &mut hole, Excitation::Charge, corner).unwrap();
    let hole_traj = evolve_and_record(&e, &mut hole, t, u, dt, 20.0, 25).unwrap();
    let tau_h =
        protocols::first_peak_time(&hole_traj.taus(), &hole_traj.site_n(0)).unwrap_or(f64::NAN);

    let mut flipped = ground;
    inject_excitation(&e, &mut flipped, Excitation::Spin, corner).unwrap();
    let spin_traj = evolve_and_record(&e, &mut flipped, t, u, dt, 100.0, 25).unwrap();
    let tau_s =
        protocols::first_peak_time(&spin_traj.taus(), &spin_traj.site_sz(0)).unwrap_or(f64::NAN);

    let ratio = tau_s / tau_h;
    report(
        8,
        "charge vs spin timescales on the 2x3 circuit",
        ratio > 3.0,
        &format!("hole peak {tau_h:.1}, spin peak {tau_s:.0}, ratio {ratio:.2}"),
    );
}

// ---------------------------------------------------------------------------
// 9. Symmetry audit: exact commutation of charges, stabilizers, and
//    injection operators, and conservation along evolutions.
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_symmetry_audit() {
    // Exact symbolic layer on the compact lattice and an extra-rishon one.
    let mut symbolic_ok = true;
    for with_extra in [false, true] {
        let e = spinful(2, 2, with_extra);
        let h = e.hamiltonian(0.7, 3.1).unwrap();
        let n_op = e.number_total().unwrap();
        let sz = e.sz_total().unwrap();
        let stabs = e.stabilizers().unwrap();
        symbolic_ok &= h.commutator(&n_op).unwrap().canonicalized().is_empty();
        symbolic_ok &= h.commutator(&sz).unwrap().canonicalized().is_empty();
        for s in &stabs {
            let mut single = PauliSum::empty(s.n_qubits());
            single.push_real(1.0, s.clone()).unwrap();
            symbolic_ok &= h.commutator(&single).unwrap().canonicalized().is_empty();
            for other in &stabs {
                symbolic_ok &= s.commutes(other).unwrap();
            }
            symbolic_ok &= e.spin_excitation(Site::new(0, 0)).unwrap().commutes(s).unwrap();
            if with_extra {
                symbolic_ok &= e.charge_excitation().unwrap().commutes(s).unwrap();
            }
        }
    }

    // Numeric layer, circuit side: stabilizer expectations stay pinned to
    // +1 through a spin-injected Trotter evolution (every propagator
    // commutes with every stabilizer string-by-string, so only float
    // noise can move them), and total charge and magnetization hold
    // because the state starts in a charge eigenspace — expectation
    // drift is second order in the per-step Trotter leakage.
    let e = spinful(2, 2, false);
    let (t, u, dt) = (0.1, 1.0, 0.01);
    let mut state = prepare_initial_state(&e, 29).unwrap();
    fix_stabilizers(&e, &mut state).unwrap();
    inject_excitation(&e, &mut state, Excitation::Spin, Site::new(0, 0)).unwrap();
    let traj = evolve_and_record(&e, &mut state, t, u, dt, 20.0, 100).unwrap();
    let mut stab_dev = 0.0f64;
    let mut circuit_charge_drift = 0.0f64;
    let first = &traj.records[0];
    let (n0, sz0): (f64, f64) = (first.n.iter().sum(), first.sz.iter().sum());
    for r in &traj.records {
        for s in &r.stabilizers {
            stab_dev = stab_dev.max((s - 1.0).abs());
        }
        let (ntot, sztot): (f64, f64) = (r.n.iter().sum(), r.sz.iter().sum());
        circuit_charge_drift =
            circuit_charge_drift.max((ntot - n0).abs()).max((sztot - sz0).abs());
    }

    // Numeric layer, oracle side: the exact propagator is a limit of
    // polynomials in the Hamiltonian, so total charge and magnetization
    // are conserved to float precision.
    let oracle = OracleDynamics::build(&e, t, u).unwrap();
    let mut coeffs = oracle.fixed_initial_state(&e).unwrap();
    oracle.inject(&e, &mut coeffs, Excitation::Spin, Site::new(0, 0)).unwrap();
    let recs = oracle.evolve_recording(&mut coeffs, 0.25, 8).unwrap();
    let (on0, osz0): (f64, f64) = (recs[0].n.iter().sum(), recs[0].sz.iter().sum());
    let mut oracle_drift = 0.0f64;
    for r in &recs {
        let (ntot, sztot): (f64, f64) = (r.n.iter().sum(), r.sz.iter().sum());
        oracle_drift = oracle_drift.max((ntot - on0).abs()).max((sztot - osz0).abs());
        oracle_drift = oracle_drift.max((r.norm - 1.0).abs());
    }

    report(
        9,
        "symmetry audit: commutation and conservation",
        symbolic_ok && stab_dev < 1e-8 && circuit_charge_drift < 1e-8 && oracle_drift < 1e-8,
        &format!(
            "symbolic commutators exact {symbolic_ok}, circuit stabilizer drift {stab_dev:.2e}, \
             circuit charge drift {circuit_charge_drift:.2e}, oracle charge drift {oracle_drift:.2e}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 10. Pauli weight report: flat, size-independent operator weights.
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_pauli_weight_report() {
    let max_hop = |e: &Encoder| {
        e.hopping_sum(1.0)
            .unwrap()
            .terms()
            .iter()
            .map(|(_, s)| s.weight())
            .max()
            .unwrap()
    };
    let max_stab = |e: &Encoder| {
        e.stabilizers().unwrap().iter().map(|s| s.weight()).max().unwrap()
    };

    let single3 = Encoder::new(LatticeSpec::new(3, 3, false, false).unwrap());
    let single4 = Encoder::new(LatticeSpec::new(4, 4, false, false).unwrap());
    let spin3 = spinful(3, 3, false);
    let spin4 = spinful(4, 4, false);

    let (sh3, sh4) = (max_hop(&single3), max_hop(&single4));
    let (fs3, fs4) = (max_hop(&spin3), max_hop(&spin4));
    let (st3, st4) = (max_stab(&single3), max_stab(&spin4));

    let ok = sh3 == 6
        && sh4 == 6
        && st3 <= 6
        && st4 <= 6
        && max_stab(&spin3) <= 6
        && fs3 == 7
        && fs4 == 7;
    report(
        10,
        "operator weight report",
        ok,
        &format!(
            "single-species hopping weight {sh3} (flat across sizes: {sh4}), \
             two-flavor hopping weight {fs3} snapshot (flat: {fs4}), stabilizer weights <= 6"
        ),
    );
}
