//! Statevector storage and exact application of elementary gates and
//! imperfection exponentials.
//!
//! Basis convention: amplitude index `x` encodes qubit `k` as bit `k` of
//! `x`, with qubit 0 the least significant bit. A register of `n_q` search
//! qubits plus one ancilla therefore uses indices `0..2^(n_q+1)` with the
//! ancilla in the top bit.

use crate::error::{Result, SimError};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Elementary gate.
///
/// Fixed gates (`Hadamard`, `PauliX`, `ControlledNot`, `MultiControlledX`,
/// `Swap`) carry a `delta` rotation-angle offset so that gate-angle noise
/// can perturb them in their defining rotation: H is a pi rotation about
/// (x+z)/sqrt2, the X family are pi rotations about x (in the
/// all-controls-one subspace where controls exist), and Swap is its
/// three-CNOT equivalent with one offset per CNOT. `delta = 0` selects the
/// exact fixed-gate kernel, so unperturbed programs evolve bit-identically
/// to the textbook gates.
///
/// The multi-controlled X is kept atomic, in line with the generalized
/// Toffoli gates the quantum-algorithm stability literature counts as
/// elementary; its controls are stored as a wire bitmask.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementaryGate {
    Hadamard { q: usize, delta: f64 },
    PauliX { q: usize, delta: f64 },
    PhaseRotation { q: usize, angle: f64 },
    ControlledPhase { a: usize, b: usize, angle: f64 },
    ControlledNot { control: usize, target: usize, delta: f64 },
    MultiControlledX { controls: usize, target: usize, delta: f64 },
    Swap { a: usize, b: usize, deltas: [f64; 3] },
}

impl ElementaryGate {
    pub fn hadamard(q: usize) -> Self {
        ElementaryGate::Hadamard { q, delta: 0.0 }
    }

    pub fn pauli_x(q: usize) -> Self {
        ElementaryGate::PauliX { q, delta: 0.0 }
    }

    pub fn phase(q: usize, angle: f64) -> Self {
        debug_assert!(angle.is_finite());
        ElementaryGate::PhaseRotation { q, angle }
    }

    pub fn cphase(a: usize, b: usize, angle: f64) -> Self {
        assert_ne!(a, b, "controlled-phase targets must be distinct");
        debug_assert!(angle.is_finite());
        ElementaryGate::ControlledPhase { a, b, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT targets must be distinct");
        ElementaryGate::ControlledNot { control, target, delta: 0.0 }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "swap targets must be distinct");
        ElementaryGate::Swap { a, b, deltas: [0.0; 3] }
    }

    /// X on `target` controlled on every wire in `controls` being one.
    pub fn mcx(controls: &[usize], target: usize) -> Self {
        assert!(!controls.is_empty(), "multi-controlled X needs controls");
        let mut mask = 0usize;
        for &c in controls {
            assert_ne!(c, target, "control equals target");
            mask |= 1 << c;
        }
        ElementaryGate::MultiControlledX { controls: mask, target, delta: 0.0 }
    }

    /// Wires the gate acts on, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            ElementaryGate::Hadamard { q, .. }
            | ElementaryGate::PauliX { q, .. }
            | ElementaryGate::PhaseRotation { q, .. } => vec![q],
            ElementaryGate::ControlledPhase { a, b, .. }
            | ElementaryGate::Swap { a, b, .. } => vec![a, b],
            ElementaryGate::ControlledNot { control, target, .. } => vec![control, target],
            ElementaryGate::MultiControlledX { controls, target, .. } => {
                let mut v: Vec<usize> = (0..usize::BITS as usize)
                    .filter(|k| controls >> k & 1 == 1)
                    .collect();
                v.push(target);
                v
            }
        }
    }

    /// Same gate with every wire index remapped through `f`.
    pub fn remapped(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut g = *self;
        match &mut g {
            ElementaryGate::Hadamard { q, .. }
            | ElementaryGate::PauliX { q, .. }
            | ElementaryGate::PhaseRotation { q, .. } => *q = f(*q),
            ElementaryGate::ControlledPhase { a, b, .. }
            | ElementaryGate::Swap { a, b, .. } => {
                *a = f(*a);
                *b = f(*b);
            }
            ElementaryGate::ControlledNot { control, target, .. } => {
                *control = f(*control);
                *target = f(*target);
            }
            ElementaryGate::MultiControlledX { controls, target, .. } => {
                let mut mask = 0usize;
                for k in 0..usize::BITS as usize {
                    if *controls >> k & 1 == 1 {
                        mask |= 1 << f(k);
                    }
                }
                *controls = mask;
                *target = f(*target);
            }
        }
        g
    }

    /// One-line text form, `KIND wires... [angle]`.
    pub fn dump_line(&self) -> String {
        match *self {
            ElementaryGate::Hadamard { q, delta } if delta == 0.0 => format!("H {q}"),
            ElementaryGate::Hadamard { q, delta } => format!("H {q} {delta}"),
            ElementaryGate::PauliX { q, delta } if delta == 0.0 => format!("X {q}"),
            ElementaryGate::PauliX { q, delta } => format!("X {q} {delta}"),
            ElementaryGate::PhaseRotation { q, angle } => format!("P {q} {angle}"),
            ElementaryGate::ControlledPhase { a, b, angle } => format!("CP {a} {b} {angle}"),
            ElementaryGate::ControlledNot { control, target, delta } if delta == 0.0 => {
                format!("CNOT {control} {target}")
            }
            ElementaryGate::ControlledNot { control, target, delta } => {
                format!("CNOT {control} {target} {delta}")
            }
            ElementaryGate::MultiControlledX { target, delta, .. } => {
                let mut wires = self.qubits();
                wires.pop();
                let controls =
                    wires.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
                if delta == 0.0 {
                    format!("MCX {controls} {target}")
                } else {
                    format!("MCX {controls} {target} {delta}")
                }
            }
            ElementaryGate::Swap { a, b, deltas } if deltas == [0.0; 3] => format!("SWAP {a} {b}"),
            ElementaryGate::Swap { a, b, deltas } => {
                format!("SWAP {a} {b} {} {} {}", deltas[0], deltas[1], deltas[2])
            }
        }
    }
}

/// 2x2 matrix of the perturbed pi-rotation `e^{i(pi+delta)/2} R_axis(pi+delta)`
/// about the x axis. At `delta = 0` this is exactly Pauli X.
fn perturbed_x_matrix(delta: f64) -> [[Complex64; 2]; 2] {
    let half = (std::f64::consts::PI + delta) / 2.0;
    let phase = Complex64::new(half.cos(), half.sin());
    let c = Complex64::new(half.cos(), 0.0);
    let ms = Complex64::new(0.0, -half.sin());
    [[phase * c, phase * ms], [phase * ms, phase * c]]
}

/// Same construction about the (x+z)/sqrt2 axis; `delta = 0` gives Hadamard.
fn perturbed_h_matrix(delta: f64) -> [[Complex64; 2]; 2] {
    let half = (std::f64::consts::PI + delta) / 2.0;
    let phase = Complex64::new(half.cos(), half.sin());
    let c = Complex64::new(half.cos(), 0.0);
    let s = half.sin() * FRAC_1_SQRT_2;
    let ms = Complex64::new(0.0, -s);
    [[phase * (c + ms), phase * ms], [phase * ms, phase * (c - ms)]]
}

/// Dense statevector over `n_tot` qubits.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_tot: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `n_tot` qubits.
    pub fn zero_state(n_tot: usize) -> Self {
        assert!(n_tot >= 1 && n_tot <= 30, "unsupported qubit count {n_tot}");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_tot];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_tot, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(SimError::contract(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        Ok(StateVector { n_tot: len.trailing_zeros() as usize, amps })
    }

    pub fn n_tot(&self) -> usize {
        self.n_tot
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `| sum |amps|^2 - 1 |`, the unitarity drift.
    pub fn norm_error(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_tot {
            Err(SimError::TargetOutOfRange { index: q, n_tot: self.n_tot })
        } else {
            Ok(())
        }
    }

    /// `sum_x conj(self[x]) * other[x]`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_tot != other.n_tot {
            return Err(SimError::DimensionMismatch { left: self.n_tot, right: other.n_tot });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Apply an arbitrary 2x2 matrix to qubit `q`.
    fn apply_single(&mut self, q: usize, m: &[[Complex64; 2]; 2]) {
        let mask = 1usize << q;
        let dim = self.amps.len();
        let mut base = 0usize;
        while base < dim {
            for i in base..base + mask {
                let j = i | mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
            base += mask << 1;
        }
    }

    /// Apply a 2x2 matrix to qubit `t` in the subspace where every wire of
    /// `control_mask` is 1.
    fn apply_controlled_single(
        &mut self,
        control_mask: usize,
        t: usize,
        m: &[[Complex64; 2]; 2],
    ) {
        let tmask = 1usize << t;
        for i in 0..self.amps.len() {
            if i & control_mask == control_mask && i & tmask == 0 {
                let j = i | tmask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply_hadamard(&mut self, q: usize) {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mask = 1usize << q;
        let dim = self.amps.len();
        let mut base = 0usize;
        while base < dim {
            for i in base..base + mask {
                let j = i | mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = r * (a + b);
                self.amps[j] = r * (a - b);
            }
            base += mask << 1;
        }
    }

    fn apply_pauli_x(&mut self, q: usize) {
        let mask = 1usize << q;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                self.amps.swap(i, i | mask);
            }
        }
    }

    fn apply_phase(&mut self, q: usize, angle: f64) {
        let ph = Complex64::new(angle.cos(), angle.sin());
        let mask = 1usize << q;
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                self.amps[i] *= ph;
            }
        }
    }

    fn apply_cphase(&mut self, a: usize, b: usize, angle: f64) {
        let ph = Complex64::new(angle.cos(), angle.sin());
        let mask = (1usize << a) | (1usize << b);
        for i in 0..self.amps.len() {
            if i & mask == mask {
                self.amps[i] *= ph;
            }
        }
    }

    /// X on `t` wherever every wire of `control_mask` is 1 (CNOT and the
    /// multi-controlled X share this kernel).
    fn apply_controlled_x(&mut self, control_mask: usize, t: usize) {
        let tmask = 1usize << t;
        for i in 0..self.amps.len() {
            if i & control_mask == control_mask && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let amask = 1usize << a;
        let bmask = 1usize << b;
        for i in 0..self.amps.len() {
            if i & amask != 0 && i & bmask == 0 {
                self.amps.swap(i, i ^ amask ^ bmask);
            }
        }
    }

    fn check_two(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            Err(SimError::contract("gate with equal wire indices"))
        } else {
            Ok(())
        }
    }

    /// Apply one elementary gate in place.
    ///
    /// Unperturbed fixed gates take exact permutation/sign kernels; any
    /// nonzero `delta` falls back to the corresponding rotation matrix.
    pub fn apply_gate(&mut self, gate: &ElementaryGate) -> Result<()> {
        match *gate {
            ElementaryGate::Hadamard { q, delta } => {
                self.check_qubit(q)?;
                if delta == 0.0 {
                    self.apply_hadamard(q);
                } else {
                    self.apply_single(q, &perturbed_h_matrix(delta));
                }
            }
            ElementaryGate::PauliX { q, delta } => {
                self.check_qubit(q)?;
                if delta == 0.0 {
                    self.apply_pauli_x(q);
                } else {
                    self.apply_single(q, &perturbed_x_matrix(delta));
                }
            }
            ElementaryGate::PhaseRotation { q, angle } => {
                self.check_qubit(q)?;
                self.apply_phase(q, angle);
            }
            ElementaryGate::ControlledPhase { a, b, angle } => {
                self.check_two(a, b)?;
                self.apply_cphase(a, b, angle);
            }
            ElementaryGate::ControlledNot { control, target, delta } => {
                self.check_two(control, target)?;
                if delta == 0.0 {
                    self.apply_controlled_x(1 << control, target);
                } else {
                    self.apply_controlled_single(1 << control, target, &perturbed_x_matrix(delta));
                }
            }
            ElementaryGate::MultiControlledX { controls, target, delta } => {
                self.check_qubit(target)?;
                if controls == 0 {
                    return Err(SimError::contract("multi-controlled X without controls"));
                }
                if controls >> self.n_tot != 0 {
                    return Err(SimError::TargetOutOfRange {
                        index: (usize::BITS - 1 - controls.leading_zeros()) as usize,
                        n_tot: self.n_tot,
                    });
                }
                if controls & (1 << target) != 0 {
                    return Err(SimError::contract("multi-controlled X control equals target"));
                }
                if delta == 0.0 {
                    self.apply_controlled_x(controls, target);
                } else {
                    self.apply_controlled_single(controls, target, &perturbed_x_matrix(delta));
                }
            }
            ElementaryGate::Swap { a, b, deltas } => {
                self.check_two(a, b)?;
                if deltas == [0.0; 3] {
                    self.apply_swap(a, b);
                } else {
                    self.apply_controlled_single(1 << a, b, &perturbed_x_matrix(deltas[0]));
                    self.apply_controlled_single(1 << b, a, &perturbed_x_matrix(deltas[1]));
                    self.apply_controlled_single(1 << a, b, &perturbed_x_matrix(deltas[2]));
                }
            }
        }
        Ok(())
    }

    /// Multiply each amplitude by `exp(-i sum_i a_i s_i(x))` with
    /// `s_i(x) = +1` when bit `i` of `x` is 0 and `-1` when it is 1.
    pub fn apply_diagonal_z_field(&mut self, a: &[f64]) -> Result<()> {
        if a.len() != self.n_tot {
            return Err(SimError::contract(format!(
                "z-field needs {} coefficients, got {}",
                self.n_tot,
                a.len()
            )));
        }
        let total: f64 = a.iter().sum();
        // sum over set bits, built incrementally: x with lowest set bit l
        // extends x & (x-1).
        let mut set_sum = vec![0.0f64; self.amps.len()];
        for x in 1..self.amps.len() {
            set_sum[x] = set_sum[x & (x - 1)] + a[x.trailing_zeros() as usize];
        }
        for (x, amp) in self.amps.iter_mut().enumerate() {
            let phi = -(total - 2.0 * set_sum[x]);
            *amp *= Complex64::new(phi.cos(), phi.sin());
        }
        Ok(())
    }

    /// Apply `exp(-i sum_p b_p X_i X_j)` over the listed qubit pairs.
    ///
    /// The factors commute, so the product over pairs is the exact
    /// exponential of the sum.
    pub fn apply_xx_coupling(&mut self, b: &[f64], pairs: &[(usize, usize)]) -> Result<()> {
        if b.len() != pairs.len() {
            return Err(SimError::contract(format!(
                "xx coupling needs one coefficient per pair: {} vs {}",
                b.len(),
                pairs.len()
            )));
        }
        for (&coeff, &(i, j)) in b.iter().zip(pairs) {
            self.check_qubit(i)?;
            self.check_qubit(j)?;
            if i == j {
                return Err(SimError::contract("xx coupling pair with equal indices"));
            }
            let c = Complex64::new(coeff.cos(), 0.0);
            let ms = Complex64::new(0.0, -coeff.sin());
            let imask = 1usize << i;
            let flip = imask | (1usize << j);
            for x in 0..self.amps.len() {
                if x & imask == 0 {
                    let y = x ^ flip;
                    let ax = self.amps[x];
                    let ay = self.amps[y];
                    self.amps[x] = c * ax + ms * ay;
                    self.amps[y] = ms * ax + c * ay;
                }
            }
        }
        Ok(())
    }
}
