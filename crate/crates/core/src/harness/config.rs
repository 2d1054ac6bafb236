//! Experiment configuration: validation, defaults, key=value files.

use crate::circuit::ideal_t_g;
use crate::error::{Result, SimError};
use crate::imperfections::CouplingTopology;
use crate::observables::default_husimi_sigma;
use std::path::{Path, PathBuf};

/// Simulation mode of one run. `Gyqec` is static disorder plus relabeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSpec {
    Ideal,
    Static,
    Fluctuating,
    GateNoise,
    Gyqec,
}

impl ModeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModeSpec::Ideal => "ideal",
            ModeSpec::Static => "static",
            ModeSpec::Fluctuating => "fluctuating",
            ModeSpec::GateNoise => "gate-noise",
            ModeSpec::Gyqec => "gyqec",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(ModeSpec::Ideal),
            "static" => Ok(ModeSpec::Static),
            "fluctuating" => Ok(ModeSpec::Fluctuating),
            "gate-noise" => Ok(ModeSpec::GateNoise),
            "gyqec" => Ok(ModeSpec::Gyqec),
            other => Err(SimError::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Husimi grid parameters.
#[derive(Clone, Copy, Debug)]
pub struct HusimiParams {
    pub n_theta: usize,
    pub n_x: usize,
    pub sigma: Option<f64>,
}

impl Default for HusimiParams {
    fn default() -> Self {
        HusimiParams { n_theta: 64, n_x: 128, sigma: None }
    }
}

/// User-facing experiment description. Optional fields resolve to
/// defaults in [`ExperimentConfig::resolve`].
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n_q: usize,
    pub target: usize,
    pub iterations: Option<usize>,
    pub epsilons: Vec<f64>,
    pub modes: Vec<ModeSpec>,
    pub l_gs: Vec<usize>,
    pub swaps_per_event: Option<usize>,
    pub slice_after_swaps: bool,
    pub realizations: usize,
    pub base_seed: Option<u64>,
    pub out_dir: PathBuf,
    pub husimi: HusimiParams,
    pub fit_window: Option<(usize, usize)>,
    pub topology: CouplingTopology,
    pub event_log: bool,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_q: 11,
            target: 1,
            iterations: None,
            epsilons: vec![0.002],
            modes: vec![ModeSpec::Ideal, ModeSpec::Fluctuating, ModeSpec::Gyqec, ModeSpec::Static],
            l_gs: vec![10],
            swaps_per_event: None,
            slice_after_swaps: false,
            realizations: 1,
            base_seed: None,
            out_dir: PathBuf::from("out"),
            husimi: HusimiParams::default(),
            fit_window: None,
            topology: CouplingTopology::Ring,
            event_log: false,
            threads: None,
        }
    }
}

/// Fully materialized configuration; every default filled in.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub n_q: usize,
    pub n_tot: usize,
    pub target: usize,
    pub t_g: usize,
    pub iterations: usize,
    pub epsilons: Vec<f64>,
    pub modes: Vec<ModeSpec>,
    pub l_gs: Vec<usize>,
    pub swaps_per_event: usize,
    pub slice_after_swaps: bool,
    pub realizations: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    pub n_theta: usize,
    pub n_x: usize,
    pub sigma: f64,
    pub fit_window: (usize, usize),
    pub topology: CouplingTopology,
    pub event_log: bool,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    /// Validate every field and materialize defaults.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if !(2..=20).contains(&self.n_q) {
            return Err(SimError::Config(format!("n_q {} outside 2..=20", self.n_q)));
        }
        if self.target >= 1usize << self.n_q {
            return Err(SimError::Config(format!(
                "target {} out of range for n_q {}",
                self.target, self.n_q
            )));
        }
        if self.epsilons.is_empty() {
            return Err(SimError::Config("epsilon list is empty".into()));
        }
        if self.epsilons.iter().any(|&e| e < 0.0 || !e.is_finite()) {
            return Err(SimError::Config("epsilon values must be finite and >= 0".into()));
        }
        if self.modes.is_empty() {
            return Err(SimError::Config("mode list is empty".into()));
        }
        if self.modes.contains(&ModeSpec::Gyqec) && self.l_gs.is_empty() {
            return Err(SimError::Config("gyqec mode needs at least one l_g".into()));
        }
        if self.l_gs.iter().any(|&l| l == 0) {
            return Err(SimError::Config("l_g must be >= 1".into()));
        }
        if self.realizations == 0 {
            return Err(SimError::Config("need at least one realization".into()));
        }
        let t_g = ideal_t_g(self.n_q);
        let iterations = self.iterations.unwrap_or(3 * t_g);
        if iterations == 0 {
            return Err(SimError::Config("iterations must be >= 1".into()));
        }
        let fit_window = self.fit_window.unwrap_or((t_g, (5 * t_g).min(iterations)));
        if fit_window.0 > fit_window.1 || fit_window.1 > iterations {
            return Err(SimError::Config(format!(
                "fit window {:?} outside 1..={}",
                fit_window, iterations
            )));
        }
        let n_tot = self.n_q + 1;
        let swaps = self.swaps_per_event.unwrap_or((n_tot / 2).max(1));
        if swaps == 0 {
            return Err(SimError::Config("swaps_per_event must be >= 1".into()));
        }
        if self.husimi.n_theta == 0 || self.husimi.n_x == 0 {
            return Err(SimError::Config("husimi grid must be non-empty".into()));
        }
        let sigma = self.husimi.sigma.unwrap_or_else(|| default_husimi_sigma(self.n_q));
        if sigma <= 0.0 {
            return Err(SimError::Config("husimi sigma must be positive".into()));
        }
        Ok(ResolvedConfig {
            n_q: self.n_q,
            n_tot,
            target: self.target,
            t_g,
            iterations,
            epsilons: self.epsilons.clone(),
            modes: self.modes.clone(),
            l_gs: self.l_gs.clone(),
            swaps_per_event: swaps,
            slice_after_swaps: self.slice_after_swaps,
            realizations: self.realizations,
            base_seed: self.base_seed.unwrap_or(0),
            out_dir: self.out_dir.clone(),
            n_theta: self.husimi.n_theta,
            n_x: self.husimi.n_x,
            sigma,
            fit_window,
            topology: self.topology,
            event_log: self.event_log,
            threads: self.threads,
        })
    }

    /// Load keys from a plain-text `key=value` file (one per line, `#`
    /// comments). Unknown keys are rejected.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            self.apply_key(key.trim(), value.trim())
                .map_err(|e| SimError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse::<T>()
                .map_err(|e| SimError::Config(format!("bad value for {key}: {e}")))
        }
        match key {
            "n_q" => self.n_q = parse(key, value)?,
            "target" => self.target = parse(key, value)?,
            "iterations" => self.iterations = Some(parse(key, value)?),
            "epsilon" => {
                self.epsilons = value
                    .split(',')
                    .map(|v| parse::<f64>(key, v.trim()))
                    .collect::<Result<_>>()?
            }
            "mode" => {
                self.modes = value
                    .split(',')
                    .map(|v| ModeSpec::parse(v.trim()))
                    .collect::<Result<_>>()?
            }
            "l_g" => {
                self.l_gs = value
                    .split(',')
                    .map(|v| parse::<usize>(key, v.trim()))
                    .collect::<Result<_>>()?
            }
            "swaps_per_event" => self.swaps_per_event = Some(parse(key, value)?),
            "slice_after_swaps" => self.slice_after_swaps = parse(key, value)?,
            "realizations" => self.realizations = parse(key, value)?,
            "seed" => self.base_seed = Some(parse(key, value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "n_theta" => self.husimi.n_theta = parse(key, value)?,
            "n_x" => self.husimi.n_x = parse(key, value)?,
            "sigma" => self.husimi.sigma = Some(parse(key, value)?),
            "fit_lo" => {
                let hi = self.fit_window.map(|w| w.1).unwrap_or(usize::MAX);
                self.fit_window = Some((parse(key, value)?, hi));
            }
            "fit_hi" => {
                let lo = self.fit_window.map(|w| w.0).unwrap_or(0);
                self.fit_window = Some((lo, parse(key, value)?));
            }
            "topology" => self.topology = CouplingTopology::parse(value)?,
            "event_log" => self.event_log = parse(key, value)?,
            "threads" => self.threads = Some(parse(key, value)?),
            other => return Err(SimError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }
}

impl ResolvedConfig {
    /// Canonical `key=value` echo of every resolved field; written into
    /// output headers and hashed into the manifest.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("n_q", self.n_q.to_string());
        kv("n_tot", self.n_tot.to_string());
        kv("target", self.target.to_string());
        kv("t_g", self.t_g.to_string());
        kv("iterations", self.iterations.to_string());
        kv("epsilon", join(&self.epsilons));
        kv("mode", self.modes.iter().map(|m| m.name()).collect::<Vec<_>>().join(","));
        kv("l_g", join(&self.l_gs));
        kv("swaps_per_event", self.swaps_per_event.to_string());
        kv("slice_after_swaps", self.slice_after_swaps.to_string());
        kv("realizations", self.realizations.to_string());
        kv("seed", self.base_seed.to_string());
        kv("n_theta", self.n_theta.to_string());
        kv("n_x", self.n_x.to_string());
        kv("sigma", format!("{:.17e}", self.sigma));
        kv("fit_lo", self.fit_window.0.to_string());
        kv("fit_hi", self.fit_window.1.to_string());
        kv("topology", self.topology.name().to_string());
        kv("event_log", self.event_log.to_string());
        out
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
