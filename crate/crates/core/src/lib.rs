//! Statevector simulation of Grover search under static inter-qubit
//! imperfections and random gate errors, with gyroscopic qubit-relabeling
//! error suppression.
//!
//! The crate is organized along the simulation pipeline:
//!
//! - [`state`]: dense statevector and exact gate/imperfection kernels,
//! - [`circuit`]: the Grover iteration compiler (gate count affine in the
//!   register size) and iteration schedules,
//! - [`imperfections`]: disorder realizations and the three error models,
//! - [`gyqec`]: logical-to-physical relabeling and the run loop,
//! - [`observables`]: searched-state and four-state probabilities,
//!   fidelity, Husimi distributions, decay fits, the gain factor and the
//!   chaos border estimate,
//! - [`harness`]: experiment configs, scans, disorder averaging and
//!   output files.

pub mod circuit;
pub mod error;
pub mod gyqec;
pub mod harness;
pub mod imperfections;
pub mod observables;
pub mod state;

pub use circuit::{
    compile_grover_iteration, grover_theta, ideal_success_probability, ideal_t_g,
    preparation_gates, start_state, GateProgram, GroverSchedule,
};
pub use error::{Result, SimError};
pub use gyqec::{
    logical_gate_to_physical, relabel_event, run, run_with_gyqec, GyqecConfig, QubitMap,
    RunOptions, RunOutput,
};
pub use imperfections::{
    apply_imperfection_slice, derive_seed, perturb_gate, CouplingTopology, DisorderRealization,
    ErrorModel,
};
pub use observables::{
    default_husimi_sigma, epsilon_c, fidelity, fit_decay, fit_log_linear, gain_factor, husimi,
    w_4, w_g, DecayField, DecayFit, HusimiGrid, ObservablePoint, ObservableSeries, SeriesMeta,
};
pub use state::{ElementaryGate, StateVector};
