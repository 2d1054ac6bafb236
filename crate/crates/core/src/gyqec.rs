//! Gyroscopic relabeling: after every `l_g` algorithm gates, physical swap
//! gates permute random qubit pairs and the logical-to-physical map is
//! updated so the algorithm continues in the new numeration. Static
//! disorder stays pinned to the physical wires, so the relabeling converts
//! it into an effectively fluctuating perturbation of the logical
//! computation.
//!
//! This module also hosts the run loop shared by every mode: it executes
//! the compiled iteration under an error model, with or without
//! relabeling, and records per-iteration observables in the logical frame.

use crate::circuit::{ideal_t_g, start_state, GateProgram};
use crate::error::{Result, SimError};
use crate::imperfections::{apply_imperfection_slice, perturb_gate, ErrorModel};
use crate::observables::{self, ObservablePoint, ObservableSeries, SeriesMeta};
use crate::state::{ElementaryGate, StateVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Bijection from logical qubit index to physical wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitMap {
    perm: Vec<usize>,
}

impl QubitMap {
    pub fn identity(n_tot: usize) -> Self {
        QubitMap { perm: (0..n_tot).collect() }
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.perm[logical]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Record a physical swap of wires `p` and `q`: every logical qubit
    /// residing on one of them moves to the other.
    pub fn apply_transposition(&mut self, p: usize, q: usize) {
        for slot in &mut self.perm {
            if *slot == p {
                *slot = q;
            } else if *slot == q {
                *slot = p;
            }
        }
    }

    /// Rewrite a gate on logical targets to physical wires.
    pub fn map_gate(&self, gate: &ElementaryGate) -> ElementaryGate {
        gate.remapped(|q| self.perm[q])
    }
}

/// Rewrite a gate on logical targets to physical wires.
pub fn logical_gate_to_physical(gate: &ElementaryGate, map: &QubitMap) -> ElementaryGate {
    map.map_gate(gate)
}

/// Relabeling schedule.
#[derive(Clone, Copy, Debug)]
pub struct GyqecConfig {
    pub enabled: bool,
    /// Algorithm gates between relabeling events.
    pub l_g: usize,
    /// Transpositions per event; defaults to `floor(n_tot / 2)`.
    pub swaps_per_event: usize,
    /// Whether the swap gates themselves receive imperfection slices.
    ///
    /// Off by default: with slices attached to every swap, a dense
    /// relabeling schedule multiplies the noise exposure several-fold and
    /// consecutive slices see nearly identical permuted fields, adding
    /// coherently — the `l_g = 1` decay then far exceeds the fluctuating-
    /// couplings decay it is supposed to approach. Exposed as a knob for
    /// sensitivity checks.
    pub slice_after_swaps: bool,
}

impl GyqecConfig {
    pub fn disabled() -> Self {
        GyqecConfig { enabled: false, l_g: 1, swaps_per_event: 1, slice_after_swaps: false }
    }

    pub fn with_period(l_g: usize, n_tot: usize) -> Self {
        GyqecConfig {
            enabled: true,
            l_g,
            swaps_per_event: (n_tot / 2).max(1),
            slice_after_swaps: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.enabled && self.l_g == 0 {
            return Err(SimError::contract("relabeling period l_g must be >= 1"));
        }
        if self.enabled && self.swaps_per_event == 0 {
            return Err(SimError::contract("swaps_per_event must be >= 1 when enabled"));
        }
        Ok(())
    }
}

/// Audit record of one relabeling event.
#[derive(Clone, Debug)]
pub struct RelabelEventRecord {
    /// Algorithm-gate count at which the event fired.
    pub gate_step: usize,
    pub transpositions: Vec<(usize, usize)>,
    pub perm_after: Vec<usize>,
}

/// Perform one relabeling event: draw transpositions of random distinct
/// physical wires, apply each as a physical swap gate (followed by an
/// imperfection slice when configured), and fold it into the map.
pub fn relabel_event(
    state: &mut StateVector,
    map: &mut QubitMap,
    config: &GyqecConfig,
    model: &ErrorModel,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>> {
    let n_tot = state.n_tot();
    if n_tot < 2 {
        return Err(SimError::contract("relabeling needs at least two qubits"));
    }
    let mut transpositions = Vec::with_capacity(config.swaps_per_event);
    for _ in 0..config.swaps_per_event {
        let p = rng.gen_range(0..n_tot);
        let mut q = rng.gen_range(0..n_tot - 1);
        if q >= p {
            q += 1;
        }
        let mut swap = ElementaryGate::swap(p, q);
        if let ErrorModel::GateAngleNoise { epsilon } = model {
            swap = perturb_gate(&swap, *epsilon, rng);
        }
        state.apply_gate(&swap)?;
        if config.slice_after_swaps {
            apply_imperfection_slice(state, model, rng)?;
        }
        map.apply_transposition(p, q);
        transpositions.push((p, q));
    }
    Ok(transpositions)
}

/// Options for one run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub iterations: usize,
    pub gyqec: GyqecConfig,
    pub model: ErrorModel,
    pub seed: u64,
    pub collect_events: bool,
    /// Keep a copy of the logical-frame state after this iteration.
    pub capture_at: Option<usize>,
    /// Keep the logical-frame state after every iteration.
    pub capture_trajectory: bool,
    /// Stop early once the recorded fidelity falls below this value.
    pub stop_below_fidelity: Option<f64>,
}

impl RunOptions {
    pub fn new(iterations: usize, gyqec: GyqecConfig, model: ErrorModel, seed: u64) -> Self {
        RunOptions {
            iterations,
            gyqec,
            model,
            seed,
            collect_events: false,
            capture_at: None,
            capture_trajectory: false,
            stop_below_fidelity: None,
        }
    }
}

/// Run result: the observable series plus the optional relabeling log and
/// captured snapshots.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub series: ObservableSeries,
    pub events: Vec<RelabelEventRecord>,
    pub captured: Option<StateVector>,
    pub trajectory: Vec<StateVector>,
}

/// Copy `state` into `out` with basis indices un-permuted to the logical
/// frame: bit `L` of the logical index reads bit `perm[L]` of the physical
/// one.
fn unpermute_into(state: &StateVector, map: &QubitMap, out: &mut StateVector) {
    let n = state.n_tot();
    if map.is_identity() {
        out.amps_mut().copy_from_slice(state.amps());
        return;
    }
    let perm = map.perm();
    for y in 0..state.amps().len() {
        let mut x = 0usize;
        for l in 0..n {
            x |= ((y >> l) & 1) << perm[l];
        }
        out.amps_mut()[y] = state.amps()[x];
    }
}

/// Execute `iterations` repetitions of the compiled iteration under the
/// given error model and relabeling schedule, recording per-iteration
/// observables in the logical frame.
pub fn run(program: &GateProgram, options: &RunOptions) -> Result<RunOutput> {
    options.gyqec.validate()?;
    let n_q = program.n_q();
    let n_tot = program.n_tot();
    options.model.validate_for(n_tot)?;
    if options.iterations == 0 {
        return Err(SimError::contract("need at least one iteration"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut state = start_state(n_q);
    let ideal_needed =
        options.gyqec.enabled || !matches!(options.model, ErrorModel::None);
    let mut ideal = ideal_needed.then(|| state.clone());
    let mut map = QubitMap::identity(n_tot);
    let mut logical = state.clone();
    let mut events = Vec::new();
    let mut points = Vec::with_capacity(options.iterations);
    let mut captured = None;
    let mut trajectory = Vec::new();
    let mut algo_gates = 0usize;

    for t in 1..=options.iterations {
        for gate in program.gates() {
            let mut phys = map.map_gate(gate);
            if let ErrorModel::GateAngleNoise { epsilon } = &options.model {
                phys = perturb_gate(&phys, *epsilon, &mut rng);
            }
            state.apply_gate(&phys)?;
            apply_imperfection_slice(&mut state, &options.model, &mut rng)?;
            algo_gates += 1;
            if options.gyqec.enabled && algo_gates % options.gyqec.l_g == 0 {
                let swaps =
                    relabel_event(&mut state, &mut map, &options.gyqec, &options.model, &mut rng)?;
                if options.collect_events {
                    events.push(RelabelEventRecord {
                        gate_step: algo_gates,
                        transpositions: swaps,
                        perm_after: map.perm().to_vec(),
                    });
                }
            }
        }
        if let Some(ideal) = ideal.as_mut() {
            program.apply_to(ideal)?;
        }

        unpermute_into(&state, &map, &mut logical);
        let norm_error = logical.norm_error();
        if !norm_error.is_finite() {
            return Err(SimError::NumericFault(format!(
                "non-finite norm at iteration {t} (seed {})",
                options.seed
            )));
        }
        let w_g = observables::w_g(&logical, program.target(), n_q)?;
        let w_4 = observables::w_4(&logical, program.target(), n_q)?;
        let fidelity = match ideal.as_ref() {
            Some(ideal) => observables::fidelity(ideal, &logical)?,
            None => 1.0,
        };
        points.push(ObservablePoint { t, w_g, w_4, fidelity, norm_error });
        if options.capture_at == Some(t) {
            captured = Some(logical.clone());
        }
        if options.capture_trajectory {
            trajectory.push(logical.clone());
        }
        if let Some(threshold) = options.stop_below_fidelity {
            if fidelity < threshold {
                break;
            }
        }
    }

    let meta = SeriesMeta {
        n_q,
        epsilon: options.model.epsilon(),
        mode: options.model.name().to_string(),
        l_g: options.gyqec.enabled.then_some(options.gyqec.l_g),
        seed: options.seed,
        n_g: program.n_g(),
        t_g: ideal_t_g(n_q),
    };
    Ok(RunOutput { series: ObservableSeries { meta, points }, events, captured, trajectory })
}

/// Convenience wrapper returning only the series.
pub fn run_with_gyqec(
    program: &GateProgram,
    iterations: usize,
    config: GyqecConfig,
    model: ErrorModel,
    seed: u64,
) -> Result<ObservableSeries> {
    run(program, &RunOptions::new(iterations, config, model, seed)).map(|out| out.series)
}
