//! Gate-level program representation and the Grover iteration compiler.
//!
//! The compiler emits one Grover iteration over `n_tot = n_q + 1` qubits
//! (search register on wires `0..n_q`, ancilla on wire `n_q`), gate count
//! affine in `n_q`.
//!
//! Layout of one iteration:
//!
//! 1. oracle: an alignment layer mapping the searched state to `|1...1>`
//!    (X where the target bit is 0, a Z phase on the other wires so every
//!    target compiles to the same gate count; the Z phases commute with
//!    the control block and cancel against the un-alignment), then the
//!    query itself — one multi-controlled X onto the `|->` ancilla whose
//!    phase kickback flips the searched state. The query is kept atomic,
//!    the usual black-box convention for Grover oracles;
//! 2. inversion about the mean: Hadamards on the register, X on every
//!    register wire, a multi-controlled phase flip of `|1...1>`, and the
//!    two layers undone. This flip is the algorithm's own circuitry and is
//!    decomposed: a Hadamard-conjugated multi-controlled X rooted on
//!    register wire 0, with the controls split in two halves, each folded
//!    by a borrowed-wire Toffoli carry chain that uses the opposite half
//!    (and the ancilla) as scratch and restores it exactly.
//!
//! The count grows as `14 n_q - 29` once both carry chains are active
//! (`n_q >= 7`).
//!
//! Applied `t` times to the standard start state the program reproduces
//! the closed-form Grover rotation: the register probability of the
//! searched state equals `sin^2((2t+1) asin(2^(-n_q/2)))`, the ancilla
//! returns to `|->` and the dynamics stays in the searched-state /
//! uniform-remainder plane.

use crate::error::{Result, SimError};
use crate::state::{ElementaryGate, StateVector};
use std::f64::consts::PI;

/// Compiled Grover iteration.
#[derive(Clone, Debug)]
pub struct GateProgram {
    gates: Vec<ElementaryGate>,
    n_q: usize,
    target: usize,
}

impl GateProgram {
    pub fn gates(&self) -> &[ElementaryGate] {
        &self.gates
    }

    /// Gate count of one iteration.
    pub fn n_g(&self) -> usize {
        self.gates.len()
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn n_tot(&self) -> usize {
        self.n_q + 1
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Apply every gate of one iteration in order.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        for g in &self.gates {
            state.apply_gate(g)?;
        }
        Ok(())
    }

    /// Human-readable listing, one gate per line: `KIND q_i [q_j] [angle]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.dump_line());
            out.push('\n');
        }
        out
    }
}

/// Iteration schedule: optimal iteration count and simulated horizon.
#[derive(Clone, Copy, Debug)]
pub struct GroverSchedule {
    pub t_g: usize,
    pub t_max: usize,
}

impl GroverSchedule {
    /// Default horizon of three times the optimal iteration count.
    pub fn with_default_horizon(n_q: usize) -> Self {
        let t_g = ideal_t_g(n_q);
        GroverSchedule { t_g, t_max: 3 * t_g }
    }
}

/// Grover rotation half-angle `asin(2^(-n_q/2))`.
pub fn grover_theta(n_q: usize) -> f64 {
    (0.5f64.powi(n_q as i32)).sqrt().asin()
}

/// Ideal register probability of the searched state after `t` iterations.
pub fn ideal_success_probability(n_q: usize, t: usize) -> f64 {
    let theta = grover_theta(n_q);
    ((2 * t + 1) as f64 * theta).sin().powi(2)
}

/// Iteration count maximizing the ideal success probability on the first
/// rotation peak: `round(pi / (4 asin(2^(-n_q/2))) - 1/2)`, with the
/// integer argmax taken over the formula's neighbors to absorb rounding.
pub fn ideal_t_g(n_q: usize) -> usize {
    assert!(n_q >= 2, "need at least two search qubits");
    let theta = grover_theta(n_q);
    let guess = (PI / (4.0 * theta) - 0.5).round().max(1.0) as usize;
    let mut best = guess.max(2) - 1;
    for t in best..=guess + 1 {
        if ideal_success_probability(n_q, t) > ideal_success_probability(n_q, best) {
            best = t;
        }
    }
    best
}

/// Gates preparing the standard start state from `|0...0>`: the uniform
/// register superposition with the ancilla in `|->`.
pub fn preparation_gates(n_q: usize) -> Vec<ElementaryGate> {
    let mut gates: Vec<ElementaryGate> =
        (0..n_q).map(ElementaryGate::hadamard).collect();
    gates.push(ElementaryGate::pauli_x(n_q));
    gates.push(ElementaryGate::hadamard(n_q));
    gates
}

/// The prepared start state itself.
pub fn start_state(n_q: usize) -> StateVector {
    let mut st = StateVector::zero_state(n_q + 1);
    for g in preparation_gates(n_q) {
        st.apply_gate(&g).expect("preparation gates are in range");
    }
    st
}

/// Emit the borrowed-wire carry chain flipping `target` iff every control
/// is one: the classic double-pass Toffoli ladder, `4 (m - 2)` Toffolis
/// for `m >= 3` controls. The carries may hold arbitrary states; the
/// double pass restores them exactly.
fn emit_carry_chain(
    gates: &mut Vec<ElementaryGate>,
    controls: &[usize],
    target: usize,
    carries: &[usize],
) {
    let m = controls.len();
    match m {
        0 => panic!("carry chain needs controls"),
        1 => {
            gates.push(ElementaryGate::cnot(controls[0], target));
            return;
        }
        2 => {
            gates.push(ElementaryGate::mcx(controls, target));
            return;
        }
        _ => {}
    }
    assert!(carries.len() >= m - 2, "need {} scratch wires, have {}", m - 2, carries.len());
    let carries = &carries[..m - 2];
    // pieces: top computes c0 c1 into the first carry, link i folds
    // control i+1 into the next carry, the last link toggles the target.
    let top = ElementaryGate::mcx(&[controls[0], controls[1]], carries[0]);
    let link = |i: usize| ElementaryGate::mcx(&[controls[i + 1], carries[i - 1]], carries[i]);
    let last = ElementaryGate::mcx(&[controls[m - 1], carries[m - 3]], target);
    for _ in 0..2 {
        gates.push(last);
        for i in (1..=m - 3).rev() {
            gates.push(link(i));
        }
        gates.push(top);
        for i in 1..=m - 3 {
            gates.push(link(i));
        }
    }
}

/// Emit a phase flip of `|1...1>` over the first `n_q` wires: a
/// Hadamard-conjugated multi-controlled X rooted on wire 0, with the
/// controls split in two halves so each half's carry chain can borrow the
/// other half (plus the ancilla) as scratch.
fn emit_phase_flip(gates: &mut Vec<ElementaryGate>, n_q: usize, ancilla: usize) {
    let root = 0usize;
    let controls: Vec<usize> = (1..n_q).collect();
    gates.push(ElementaryGate::hadamard(root));
    let k = controls.len();
    let scratch_budget = 1; // the ancilla
    if k <= 2 || k - 2 <= scratch_budget {
        emit_carry_chain(gates, &controls, root, &[ancilla]);
    } else {
        // Balanced split: G2 G1 G2 G1 toggles the root by the product of
        // both halves for any initial ancilla state.
        let m1 = k / 2;
        let (c1, c2) = controls.split_at(m1);
        let mut g1 = Vec::new();
        let mut scratch1: Vec<usize> = c2.to_vec();
        scratch1.push(root);
        emit_carry_chain(&mut g1, c1, ancilla, &scratch1);
        let mut g2 = Vec::new();
        let mut c2_all: Vec<usize> = c2.to_vec();
        c2_all.push(ancilla);
        emit_carry_chain(&mut g2, &c2_all, root, c1);
        for _ in 0..2 {
            gates.extend_from_slice(&g2);
            gates.extend_from_slice(&g1);
        }
    }
    gates.push(ElementaryGate::hadamard(root));
}

/// Compile one Grover iteration for an `n_q`-qubit search register and the
/// given searched basis state.
pub fn compile_grover_iteration(n_q: usize, target: usize) -> Result<GateProgram> {
    if !(2..=20).contains(&n_q) {
        return Err(SimError::contract(format!(
            "register size {n_q} outside supported range 2..=20"
        )));
    }
    if target >= 1usize << n_q {
        return Err(SimError::contract(format!(
            "target {target} out of range for {n_q} qubits"
        )));
    }

    let ancilla = n_q;

    // Alignment mapping the searched state to |1...1>. The Z phases on the
    // already-one wires keep the gate count target-independent; they
    // commute with the control block and cancel against the un-alignment.
    let align = |gates: &mut Vec<ElementaryGate>, sign: f64| {
        for k in 0..n_q {
            if target >> k & 1 == 0 {
                gates.push(ElementaryGate::pauli_x(k));
            } else {
                gates.push(ElementaryGate::phase(k, sign * PI));
            }
        }
    };

    let mut gates = Vec::new();
    // Oracle: the atomic query kicks the phase of |target> back off the
    // |-> ancilla.
    align(&mut gates, 1.0);
    let register: Vec<usize> = (0..n_q).collect();
    gates.push(ElementaryGate::mcx(&register, ancilla));
    align(&mut gates, -1.0);
    // Inversion about the mean (up to a global sign): H X flip X H.
    for k in 0..n_q {
        gates.push(ElementaryGate::hadamard(k));
    }
    for k in 0..n_q {
        gates.push(ElementaryGate::pauli_x(k));
    }
    emit_phase_flip(&mut gates, n_q, ancilla);
    for k in 0..n_q {
        gates.push(ElementaryGate::pauli_x(k));
    }
    for k in 0..n_q {
        gates.push(ElementaryGate::hadamard(k));
    }

    Ok(GateProgram { gates, n_q, target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables;
    use num_complex::Complex64;

    fn register_probability(st: &StateVector, n_q: usize, x: usize) -> f64 {
        st.probability(x) + st.probability(x | 1 << n_q)
    }

    #[test]
    fn one_iteration_succeeds_exactly_for_two_qubits() {
        for target in 0..4 {
            let prog = compile_grover_iteration(2, target).unwrap();
            let mut st = start_state(2);
            prog.apply_to(&mut st).unwrap();
            let p = register_probability(&st, 2, target);
            assert!((p - 1.0).abs() < 1e-10, "target {target}: p = {p}");
        }
    }

    #[test]
    fn compiled_program_reproduces_grover_rotation() {
        // All register sizes up to 6, all targets.
        for n_q in 2..=6usize {
            let t_max = 3 * ideal_t_g(n_q);
            for target in 0..1usize << n_q {
                let prog = compile_grover_iteration(n_q, target).unwrap();
                let mut st = start_state(n_q);
                for t in 1..=t_max {
                    prog.apply_to(&mut st).unwrap();
                    let p = register_probability(&st, n_q, target);
                    let expect = ideal_success_probability(n_q, t);
                    assert!(
                        (p - expect).abs() < 1e-10,
                        "n_q={n_q} target={target} t={t}: {p} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn ancilla_is_restored_after_every_iteration() {
        let n_q = 5;
        let prog = compile_grover_iteration(n_q, 19).unwrap();
        let mut st = start_state(n_q);
        let anc = 1usize << n_q;
        for _ in 0..10 {
            prog.apply_to(&mut st).unwrap();
            // |-> ancilla: the |+> component sum_x |psi(x,0)+psi(x,1)|^2
            // must vanish.
            let plus_mass: f64 = (0..anc)
                .map(|x| (st.amps()[x] + st.amps()[x | anc]).norm_sqr())
                .sum();
            assert!(plus_mass < 1e-20, "ancilla leaked: {plus_mass}");
        }
    }

    #[test]
    fn ideal_dynamics_stays_in_the_four_state_subspace() {
        let n_q = 6;
        let target = 40;
        let prog = compile_grover_iteration(n_q, target).unwrap();
        let mut st = start_state(n_q);
        for _ in 0..3 * ideal_t_g(n_q) {
            prog.apply_to(&mut st).unwrap();
            let w4 = observables::w_4(&st, target, n_q).unwrap();
            assert!((w4 - 1.0).abs() < 1e-10, "w_4 = {w4}");
        }
    }

    #[test]
    fn start_state_is_uniform_register_with_minus_ancilla() {
        let n_q = 3;
        let st = start_state(n_q);
        let dim = 1usize << n_q;
        let amp = (1.0 / (2.0 * dim as f64)).sqrt();
        for x in 0..dim {
            let a0 = st.amps()[x];
            let a1 = st.amps()[x | dim];
            assert!((a0 - Complex64::new(amp, 0.0)).norm() < 1e-12);
            assert!((a1 - Complex64::new(-amp, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn gate_count_is_affine_in_register_size() {
        let n: Vec<usize> = (9..=12)
            .map(|n_q| compile_grover_iteration(n_q, 1).unwrap().n_g())
            .collect();
        assert_eq!(n[3] - n[2], n[2] - n[1]);
        assert_eq!(n[2] - n[1], n[1] - n[0]);
    }

    #[test]
    fn gate_count_is_target_independent() {
        for n_q in [3usize, 5, 8] {
            let counts: Vec<usize> = (0..1usize << n_q)
                .step_by(3)
                .map(|t| compile_grover_iteration(n_q, t).unwrap().n_g())
                .collect();
            assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
        }
    }

    #[test]
    fn ideal_t_g_values() {
        assert_eq!(ideal_t_g(2), 1);
        assert_eq!(ideal_t_g(4), 3);
        assert_eq!(ideal_t_g(11), 35);
        // brute-force argmax over the first rotation peak agrees
        for n_q in [3usize, 4, 7, 11] {
            let theta = grover_theta(n_q);
            let first_peak = (PI / (4.0 * theta)).ceil() as usize + 1;
            let brute = (1..=first_peak)
                .max_by(|&a, &b| {
                    ideal_success_probability(n_q, a)
                        .total_cmp(&ideal_success_probability(n_q, b))
                })
                .unwrap();
            assert_eq!(ideal_t_g(n_q), brute, "n_q = {n_q}");
        }
    }

    #[test]
    fn peak_success_is_high_for_eleven_qubits() {
        let p = ideal_success_probability(11, ideal_t_g(11));
        assert!(p >= 0.999, "{p}");
    }

    #[test]
    fn empty_program_counts_zero_gates() {
        let prog = GateProgram { gates: Vec::new(), n_q: 2, target: 0 };
        assert_eq!(prog.n_g(), 0);
    }

    #[test]
    fn out_of_range_target_is_rejected() {
        assert!(compile_grover_iteration(3, 8).is_err());
    }

    #[test]
    fn dump_lists_one_gate_per_line() {
        let prog = compile_grover_iteration(2, 3).unwrap();
        let dump = prog.dump();
        assert_eq!(dump.lines().count(), prog.n_g());
        for line in dump.lines() {
            let kind = line.split_whitespace().next().unwrap();
            assert!(["H", "X", "P", "CP", "CNOT", "MCX", "SWAP"].contains(&kind), "{line}");
        }
    }

    #[test]
    fn gate_count_matches_the_documented_form() {
        // 14 n_q - 29 once both diffusion carry chains are active
        for n_q in 7..=14 {
            let prog = compile_grover_iteration(n_q, 1).unwrap();
            assert_eq!(prog.n_g(), 14 * n_q - 29, "n_q = {n_q}");
        }
    }

    #[test]
    fn only_the_oracle_query_is_wider_than_three_wires() {
        let prog = compile_grover_iteration(11, 1000).unwrap();
        let wide: Vec<_> = prog.gates().iter().filter(|g| g.qubits().len() > 3).collect();
        assert_eq!(wide.len(), 1);
        assert!(matches!(wide[0], ElementaryGate::MultiControlledX { .. }));
    }
}
