//! Shared dense-matrix oracle: every gate and imperfection exponential
//! rebuilt from its defining formula as a full 2^n x 2^n matrix, applied
//! by plain matrix-vector products. Test-only, independent of the
//! bit-kernel implementation path.
#![allow(dead_code)]

use gyqec_core::imperfections::{apply_imperfection_slice, CouplingTopology, DisorderRealization, ErrorModel};
use gyqec_core::state::{ElementaryGate, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub type Matrix = Vec<Vec<Complex64>>;

pub fn zeros(dim: usize) -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); dim]; dim]
}

pub fn identity(dim: usize) -> Matrix {
    let mut m = zeros(dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matvec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let dim = a.len();
    let mut out = zeros(dim);
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// exp(-i H) for a Hermitian matrix by scaling and squaring with a Taylor
/// series; plenty for the 16x16 cases used here.
pub fn expm_minus_i(h: &Matrix) -> Matrix {
    let dim = h.len();
    let norm: f64 = h
        .iter()
        .flat_map(|row| row.iter().map(|x| x.norm()))
        .fold(0.0, f64::max);
    let squarings = (norm.log2().ceil().max(0.0) as u32) + 4;
    let scale = 1.0 / f64::from(1u32 << squarings);

    let mut term = identity(dim);
    let mut sum = identity(dim);
    for k in 1..=24 {
        // term <- term * (-i H scale) / k
        let mut next = zeros(dim);
        for i in 0..dim {
            for l in 0..dim {
                let t = term[i][l];
                if t.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    next[i][j] += t * Complex64::new(0.0, -scale / k as f64) * h[l][j];
                }
            }
        }
        term = next;
        for i in 0..dim {
            for j in 0..dim {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Embed a single-qubit matrix on wire `q` of an `n`-wire register.
pub fn embed_single(n: usize, q: usize, u: [[Complex64; 2]; 2]) -> Matrix {
    let dim = 1usize << n;
    let mut m = zeros(dim);
    for x in 0..dim {
        let xb = x >> q & 1;
        for yb in 0..2 {
            let y = (x & !(1 << q)) | (yb << q);
            m[y][x] = u[yb][xb];
        }
    }
    m
}

/// Embed a single-qubit matrix on `t`, active only where all wires of
/// `control_mask` are one.
pub fn embed_controlled(n: usize, control_mask: usize, t: usize, u: [[Complex64; 2]; 2]) -> Matrix {
    let dim = 1usize << n;
    let mut m = zeros(dim);
    for x in 0..dim {
        if x & control_mask == control_mask {
            let xb = x >> t & 1;
            for yb in 0..2 {
                let y = (x & !(1 << t)) | (yb << t);
                m[y][x] += u[yb][xb];
            }
        } else {
            m[x][x] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

pub fn h_matrix() -> [[Complex64; 2]; 2] {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[r, r], [r, -r]]
}

pub fn x_matrix() -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    [[z, o], [o, z]]
}

/// Perturbed pi rotation about x: e^{i(pi+d)/2} (cos I - i sin X).
pub fn rx_pi_matrix(delta: f64) -> [[Complex64; 2]; 2] {
    let half = (PI + delta) / 2.0;
    let phase = Complex64::new(half.cos(), half.sin());
    let c = phase * half.cos();
    let s = phase * Complex64::new(0.0, -half.sin());
    [[c, s], [s, c]]
}

/// Perturbed pi rotation about (x+z)/sqrt2.
pub fn h_pi_matrix(delta: f64) -> [[Complex64; 2]; 2] {
    let half = (PI + delta) / 2.0;
    let phase = Complex64::new(half.cos(), half.sin());
    let c = phase * half.cos();
    let s = phase * Complex64::new(0.0, -half.sin() * FRAC_1_SQRT_2);
    [[c + s, s], [s, c - s]]
}

/// Dense matrix of a gate, straight from the definitions.
pub fn gate_matrix(n: usize, gate: &ElementaryGate) -> Matrix {
    let dim = 1usize << n;
    match *gate {
        ElementaryGate::Hadamard { q, delta } => {
            embed_single(n, q, if delta == 0.0 { h_matrix() } else { h_pi_matrix(delta) })
        }
        ElementaryGate::PauliX { q, delta } => {
            embed_single(n, q, if delta == 0.0 { x_matrix() } else { rx_pi_matrix(delta) })
        }
        ElementaryGate::PhaseRotation { q, angle } => {
            let mut m = zeros(dim);
            for x in 0..dim {
                m[x][x] = if x >> q & 1 == 1 {
                    Complex64::new(angle.cos(), angle.sin())
                } else {
                    Complex64::new(1.0, 0.0)
                };
            }
            m
        }
        ElementaryGate::ControlledPhase { a, b, angle } => {
            let mut m = zeros(dim);
            let mask = (1 << a) | (1 << b);
            for x in 0..dim {
                m[x][x] = if x & mask == mask {
                    Complex64::new(angle.cos(), angle.sin())
                } else {
                    Complex64::new(1.0, 0.0)
                };
            }
            m
        }
        ElementaryGate::ControlledNot { control, target, delta } => {
            embed_controlled(n, 1 << control, target, if delta == 0.0 {
                x_matrix()
            } else {
                rx_pi_matrix(delta)
            })
        }
        ElementaryGate::MultiControlledX { controls, target, delta } => {
            embed_controlled(n, controls, target, if delta == 0.0 {
                x_matrix()
            } else {
                rx_pi_matrix(delta)
            })
        }
        ElementaryGate::Swap { a, b, deltas } => {
            if deltas == [0.0; 3] {
                let mut m = zeros(dim);
                for x in 0..dim {
                    let ab = x >> a & 1;
                    let bb = x >> b & 1;
                    let y = (x & !(1 << a) & !(1 << b)) | (bb << a) | (ab << b);
                    m[y][x] = Complex64::new(1.0, 0.0);
                }
                m
            } else {
                let g1 = embed_controlled(n, 1 << a, b, rx_pi_matrix(deltas[0]));
                let g2 = embed_controlled(n, 1 << b, a, rx_pi_matrix(deltas[1]));
                let g3 = embed_controlled(n, 1 << a, b, rx_pi_matrix(deltas[2]));
                matmul(&g3, &matmul(&g2, &g1))
            }
        }
    }
}

/// Dense Hamiltonian sum a_i Z_i.
pub fn z_field_hamiltonian(n: usize, a: &[f64]) -> Matrix {
    let dim = 1usize << n;
    let mut h = zeros(dim);
    for x in 0..dim {
        let mut e = 0.0;
        for (i, &ai) in a.iter().enumerate() {
            e += if x >> i & 1 == 0 { ai } else { -ai };
        }
        h[x][x] = Complex64::new(e, 0.0);
    }
    h
}

/// Dense Hamiltonian sum b_p X_i X_j.
pub fn xx_hamiltonian(n: usize, b: &[f64], pairs: &[(usize, usize)]) -> Matrix {
    let dim = 1usize << n;
    let mut h = zeros(dim);
    for (&coeff, &(i, j)) in b.iter().zip(pairs) {
        let flip = (1usize << i) | (1usize << j);
        for x in 0..dim {
            h[x ^ flip][x] += Complex64::new(coeff, 0.0);
        }
    }
    h
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> ElementaryGate {
    let q = rng.gen_range(0..n);
    let mut p = rng.gen_range(0..n);
    while p == q {
        p = rng.gen_range(0..n);
    }
    match rng.gen_range(0..10) {
        0 => ElementaryGate::hadamard(q),
        1 => ElementaryGate::Hadamard { q, delta: rng.gen_range(-0.3..0.3) },
        2 => ElementaryGate::pauli_x(q),
        3 => ElementaryGate::PauliX { q, delta: rng.gen_range(-0.3..0.3) },
        4 => ElementaryGate::phase(q, rng.gen_range(-PI..PI)),
        5 => ElementaryGate::cphase(q, p, rng.gen_range(-PI..PI)),
        6 => ElementaryGate::ControlledNot { control: q, target: p, delta: rng.gen_range(-0.3..0.3) },
        7 => {
            let controls: Vec<usize> = (0..n).filter(|&k| k != q).collect();
            let mut g = ElementaryGate::mcx(&controls, q);
            if rng.gen_bool(0.5) {
                if let ElementaryGate::MultiControlledX { delta, .. } = &mut g {
                    *delta = rng.gen_range(-0.3..0.3);
                }
            }
            g
        }
        8 => ElementaryGate::swap(q, p),
        _ => ElementaryGate::Swap {
            a: q,
            b: p,
            deltas: [
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
            ],
        },
    }
}

pub fn assert_states_close(kernel: &StateVector, dense: &[Complex64], tol: f64, context: &str) {
    for (i, (a, b)) in kernel.amps().iter().zip(dense).enumerate() {
        assert!(
            (a - b).norm() <= tol,
            "{context}: amplitude {i}: kernel {a} vs dense {b}"
        );
    }
}
