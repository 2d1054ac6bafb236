//! Error models: frozen static disorder applied between gates, couplings
//! redrawn every gate, and random gate-angle noise.
//!
//! One imperfection slice acts after every elementary gate (including the
//! swap gates of relabeling events): a diagonal z field `exp(-i sum a_i
//! sigma_z^i)` followed by pair couplings `exp(-i sum b_p sigma_x sigma_x)`
//! on the configured topology. Static disorder freezes `a` and `b` for a
//! whole run; fluctuating couplings redraw them at every slice.

use crate::error::{Result, SimError};
use crate::state::{ElementaryGate, StateVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Which qubit pairs carry the two-body couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingTopology {
    /// Qubit `i` coupled to `(i+1) mod n_tot` (default).
    Ring,
    /// Open chain, `n_tot - 1` couplings.
    Chain,
    /// Every unordered pair.
    AllPairs,
}

impl CouplingTopology {
    pub fn pairs(&self, n_tot: usize) -> Vec<(usize, usize)> {
        match self {
            CouplingTopology::Ring => (0..n_tot).map(|i| (i, (i + 1) % n_tot)).collect(),
            CouplingTopology::Chain => (0..n_tot - 1).map(|i| (i, i + 1)).collect(),
            CouplingTopology::AllPairs => {
                let mut v = Vec::new();
                for i in 0..n_tot {
                    for j in i + 1..n_tot {
                        v.push((i, j));
                    }
                }
                v
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CouplingTopology::Ring => "ring",
            CouplingTopology::Chain => "chain",
            CouplingTopology::AllPairs => "all-pairs",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ring" => Ok(CouplingTopology::Ring),
            "chain" => Ok(CouplingTopology::Chain),
            "all-pairs" => Ok(CouplingTopology::AllPairs),
            other => Err(SimError::Config(format!("unknown topology {other:?}"))),
        }
    }
}

/// One frozen sample of the static-imperfection coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderRealization {
    pub n_tot: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub topology: CouplingTopology,
    /// One-qubit detunings, `a[i] in [-eps, eps]`.
    pub a: Vec<f64>,
    /// Pair couplings in topology order, `b[p] in [-eps, eps]`.
    pub b: Vec<f64>,
    pairs: Vec<(usize, usize)>,
}

impl DisorderRealization {
    /// Draw a realization on the default ring topology. Deterministic in
    /// `(n_tot, epsilon, seed)`.
    pub fn sample(n_tot: usize, epsilon: f64, seed: u64) -> Result<Self> {
        Self::sample_with_topology(n_tot, epsilon, seed, CouplingTopology::Ring)
    }

    pub fn sample_with_topology(
        n_tot: usize,
        epsilon: f64,
        seed: u64,
        topology: CouplingTopology,
    ) -> Result<Self> {
        if epsilon < 0.0 {
            return Err(SimError::contract("disorder strength must be non-negative"));
        }
        let pairs = topology.pairs(n_tot);
        let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| -> f64 {
            if epsilon == 0.0 {
                0.0
            } else {
                rng.gen_range(-epsilon..=epsilon)
            }
        };
        let a: Vec<f64> = (0..n_tot).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..pairs.len()).map(|_| draw(&mut rng)).collect();
        Ok(DisorderRealization { n_tot, epsilon, seed, topology, a, b, pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Same realization with negated coefficients (the inverse slice).
    pub fn negated(&self) -> Self {
        let mut r = self.clone();
        for x in r.a.iter_mut().chain(r.b.iter_mut()) {
            *x = -*x;
        }
        r
    }

    /// Text serialization: header lines then one coefficient per line
    /// (detunings first, couplings after).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n_tot {}\n", self.n_tot));
        out.push_str(&format!("epsilon {:.17e}\n", self.epsilon));
        out.push_str(&format!("seed {}\n", self.seed));
        out.push_str(&format!("topology {}\n", self.topology.name()));
        for x in self.a.iter().chain(self.b.iter()) {
            out.push_str(&format!("{x:.17e}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut header = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| SimError::Config(format!("missing header line {key}")))?;
            line.strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| SimError::Config(format!("expected header {key}, got {line:?}")))
        };
        let n_tot: usize = header("n_tot")?
            .parse()
            .map_err(|e| SimError::Config(format!("bad n_tot: {e}")))?;
        let epsilon: f64 = header("epsilon")?
            .parse()
            .map_err(|e| SimError::Config(format!("bad epsilon: {e}")))?;
        let seed: u64 = header("seed")?
            .parse()
            .map_err(|e| SimError::Config(format!("bad seed: {e}")))?;
        let topology = CouplingTopology::parse(&header("topology")?)?;
        let pairs = topology.pairs(n_tot);
        let values: Vec<f64> = lines
            .map(|l| l.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| SimError::Config(format!("bad coefficient: {e}")))?;
        if values.len() != n_tot + pairs.len() {
            return Err(SimError::Config(format!(
                "expected {} coefficients, found {}",
                n_tot + pairs.len(),
                values.len()
            )));
        }
        let (a, b) = values.split_at(n_tot);
        Ok(DisorderRealization {
            n_tot,
            epsilon,
            seed,
            topology,
            a: a.to_vec(),
            b: b.to_vec(),
            pairs,
        })
    }
}

/// The error model driving one run.
#[derive(Clone, Debug)]
pub enum ErrorModel {
    /// Ideal evolution.
    None,
    /// Frozen disorder applied after every gate.
    Static(DisorderRealization),
    /// Coefficients redrawn from `[-eps, eps]` at every slice.
    FluctuatingCouplings { epsilon: f64, pairs: Vec<(usize, usize)> },
    /// Every gate angle shifted by a uniform draw; no inter-gate slice.
    GateAngleNoise { epsilon: f64 },
}

impl ErrorModel {
    pub fn fluctuating(n_tot: usize, epsilon: f64, topology: CouplingTopology) -> Self {
        ErrorModel::FluctuatingCouplings { epsilon, pairs: topology.pairs(n_tot) }
    }

    pub fn epsilon(&self) -> f64 {
        match self {
            ErrorModel::None => 0.0,
            ErrorModel::Static(r) => r.epsilon,
            ErrorModel::FluctuatingCouplings { epsilon, .. }
            | ErrorModel::GateAngleNoise { epsilon } => *epsilon,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ErrorModel::None => "ideal",
            ErrorModel::Static(_) => "static",
            ErrorModel::FluctuatingCouplings { .. } => "fluctuating",
            ErrorModel::GateAngleNoise { .. } => "gate-noise",
        }
    }

    pub fn validate_for(&self, n_tot: usize) -> Result<()> {
        match self {
            ErrorModel::Static(r) if r.n_tot != n_tot => Err(SimError::contract(format!(
                "disorder realization is for {} qubits, run uses {}",
                r.n_tot, n_tot
            ))),
            _ => Ok(()),
        }
    }
}

/// Apply one imperfection slice.
///
/// Static and fluctuating modes apply the z field then the pair couplings;
/// the other modes leave the state untouched (gate-angle noise perturbs
/// the gates themselves in [`perturb_gate`]).
pub fn apply_imperfection_slice(
    state: &mut StateVector,
    model: &ErrorModel,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    match model {
        ErrorModel::None | ErrorModel::GateAngleNoise { .. } => Ok(()),
        ErrorModel::Static(r) => {
            state.apply_diagonal_z_field(&r.a)?;
            state.apply_xx_coupling(&r.b, &r.pairs)
        }
        ErrorModel::FluctuatingCouplings { epsilon, pairs } => {
            let n = state.n_tot();
            let draw = |rng: &mut ChaCha8Rng| -> f64 {
                if *epsilon == 0.0 {
                    0.0
                } else {
                    rng.gen_range(-*epsilon..=*epsilon)
                }
            };
            let a: Vec<f64> = (0..n).map(|_| draw(rng)).collect();
            let b: Vec<f64> = (0..pairs.len()).map(|_| draw(rng)).collect();
            state.apply_diagonal_z_field(&a)?;
            state.apply_xx_coupling(&b, pairs)
        }
    }
}

/// Shift every defining rotation angle of `gate` by an independent uniform
/// draw from `[-eps, eps]`. Fixed gates are perturbed through their `delta`
/// offset; a swap takes one draw per CNOT of its three-CNOT equivalent.
/// `eps = 0` returns the gate unchanged.
pub fn perturb_gate(gate: &ElementaryGate, epsilon: f64, rng: &mut ChaCha8Rng) -> ElementaryGate {
    if epsilon == 0.0 {
        return *gate;
    }
    let mut draw = || rng.gen_range(-epsilon..=epsilon);
    match *gate {
        ElementaryGate::Hadamard { q, delta } => {
            ElementaryGate::Hadamard { q, delta: delta + draw() }
        }
        ElementaryGate::PauliX { q, delta } => {
            ElementaryGate::PauliX { q, delta: delta + draw() }
        }
        ElementaryGate::PhaseRotation { q, angle } => {
            ElementaryGate::PhaseRotation { q, angle: angle + draw() }
        }
        ElementaryGate::ControlledPhase { a, b, angle } => {
            ElementaryGate::ControlledPhase { a, b, angle: angle + draw() }
        }
        ElementaryGate::ControlledNot { control, target, delta } => {
            ElementaryGate::ControlledNot { control, target, delta: delta + draw() }
        }
        ElementaryGate::MultiControlledX { controls, target, delta } => {
            ElementaryGate::MultiControlledX { controls, target, delta: delta + draw() }
        }
        ElementaryGate::Swap { a, b, deltas } => ElementaryGate::Swap {
            a,
            b,
            deltas: [deltas[0] + draw(), deltas[1] + draw(), deltas[2] + draw()],
        },
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a base seed.
///
/// Two splitmix64 finalizer rounds over `(base, index, stream)`; used for
/// per-realization and per-purpose RNG streams so parallel runs never
/// share a sequence.
pub fn derive_seed(base: u64, index: u64, stream: u64) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    let s = mix64(base.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))));
    mix64(s.wrapping_add(GOLDEN.wrapping_mul(stream.wrapping_add(3))))
}
