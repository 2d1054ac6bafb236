//! Observables: searched-state probability, four-state probability,
//! fidelity, Husimi phase-space distributions, decay-rate fits and the
//! relabeling gain factor.
//!
//! All probabilities are taken in the logical frame with the register on
//! wires `0..n_q` and the ancilla on wire `n_q`.

use crate::error::{Result, SimError};
use crate::state::StateVector;
use num_complex::Complex64;

/// Per-iteration record of one run.
#[derive(Clone, Copy, Debug)]
pub struct ObservablePoint {
    pub t: usize,
    pub w_g: f64,
    pub w_4: f64,
    pub fidelity: f64,
    pub norm_error: f64,
}

/// Run metadata carried alongside the series.
#[derive(Clone, Debug)]
pub struct SeriesMeta {
    pub n_q: usize,
    pub epsilon: f64,
    pub mode: String,
    pub l_g: Option<usize>,
    pub seed: u64,
    pub n_g: usize,
    pub t_g: usize,
}

/// Observables of one full run, one point per Grover iteration.
#[derive(Clone, Debug)]
pub struct ObservableSeries {
    pub meta: SeriesMeta,
    pub points: Vec<ObservablePoint>,
}

impl ObservableSeries {
    pub fn max_w_g(&self) -> f64 {
        self.points.iter().map(|p| p.w_g).fold(0.0, f64::max)
    }

    pub fn mean_w_4(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.iter().map(|p| p.w_4).sum::<f64>() / self.points.len() as f64
    }
}

/// Probability of the searched register state, ancilla traced out.
pub fn w_g(state: &StateVector, target: usize, n_q: usize) -> Result<f64> {
    check_frame(state, target, n_q)?;
    let anc = 1usize << n_q;
    Ok(state.probability(target) + state.probability(target | anc))
}

/// Total probability in the four states spanned by the searched register
/// state and the uniform superposition of all other register states, each
/// with either ancilla value.
pub fn w_4(state: &StateVector, target: usize, n_q: usize) -> Result<f64> {
    check_frame(state, target, n_q)?;
    let dim = 1usize << n_q;
    let m = (dim - 1) as f64;
    let mut total = 0.0;
    for a in 0..2usize {
        let base = a << n_q;
        let amp_tau = state.amps()[target | base];
        let sum: Complex64 = (0..dim).map(|x| state.amps()[x | base]).sum();
        let amp_eta = (sum - amp_tau) / m.sqrt();
        total += amp_tau.norm_sqr() + amp_eta.norm_sqr();
    }
    Ok(total)
}

/// Squared overlap of the ideal and perturbed states.
pub fn fidelity(ideal: &StateVector, perturbed: &StateVector) -> Result<f64> {
    Ok(ideal.overlap(perturbed)?.norm_sqr())
}

fn check_frame(state: &StateVector, target: usize, n_q: usize) -> Result<()> {
    if state.n_tot() != n_q + 1 {
        return Err(SimError::DimensionMismatch { left: state.n_tot(), right: n_q + 1 });
    }
    if target >= 1usize << n_q {
        return Err(SimError::contract(format!("target {target} out of range")));
    }
    Ok(())
}

/// Critical imperfection strength `1.7 / (n_g sqrt(n_tot))` separating the
/// regular phase from the chaotic one.
pub fn epsilon_c(n_g: usize, n_tot: usize) -> f64 {
    1.7 / (n_g as f64 * (n_tot as f64).sqrt())
}

/// Ratio of peak disorder-averaged searched-state probability with
/// relabeling to the value without it.
pub fn gain_factor(with_gyqec: f64, without: f64) -> Result<f64> {
    if without.abs() < 1e-12 {
        return Err(SimError::DegenerateBaseline);
    }
    Ok(with_gyqec / without)
}

/// Husimi quasi-probability density on the position-phase torus.
///
/// Row-major by position row: `values[m * n_theta + k]` is the density at
/// `(x_m, theta_k)` with `x_m = m N/n_x` and `theta_k = 2 pi k/n_theta`.
/// Normalized so that the cell sum times the cell area is one.
#[derive(Clone, Debug)]
pub struct HusimiGrid {
    pub n_theta: usize,
    pub n_x: usize,
    /// Register dimension `N = 2^n_q`.
    pub n_positions: usize,
    pub sigma: f64,
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn cell_area(&self) -> f64 {
        let dtheta = 2.0 * std::f64::consts::PI / self.n_theta as f64;
        let dx = self.n_positions as f64 / self.n_x as f64;
        dtheta * dx
    }

    pub fn value(&self, x_index: usize, theta_index: usize) -> f64 {
        self.values[x_index * self.n_theta + theta_index]
    }

    /// Probability mass in the position band within periodic distance
    /// `half_width` of `center` (all phases).
    pub fn band_mass(&self, center: f64, half_width: f64) -> f64 {
        let n = self.n_positions as f64;
        let dx = n / self.n_x as f64;
        let mut mass = 0.0;
        for m in 0..self.n_x {
            let x = m as f64 * dx;
            let d = periodic_distance(x, center, n);
            if d <= half_width {
                for k in 0..self.n_theta {
                    mass += self.value(m, k);
                }
            }
        }
        mass * self.cell_area()
    }
}

/// Default smoothing width `sqrt(N) / (2 sqrt(pi))`, balancing position
/// and phase resolution on the torus.
pub fn default_husimi_sigma(n_q: usize) -> f64 {
    ((1usize << n_q) as f64).sqrt() / (2.0 * std::f64::consts::PI.sqrt())
}

fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// Compute the Husimi distribution of the register (ancilla traced out by
/// summing the densities of both ancilla blocks).
pub fn husimi(
    state: &StateVector,
    n_q: usize,
    n_theta: usize,
    n_x: usize,
    sigma: f64,
) -> Result<HusimiGrid> {
    if sigma <= 0.0 {
        return Err(SimError::contract("husimi smoothing width must be positive"));
    }
    if state.n_tot() != n_q + 1 {
        return Err(SimError::DimensionMismatch { left: state.n_tot(), right: n_q + 1 });
    }
    if n_theta == 0 || n_x == 0 {
        return Err(SimError::contract("husimi grid must be non-empty"));
    }
    let dim = 1usize << n_q;
    let nf = dim as f64;
    // Gaussian support cutoff; the tail beyond 9 sigma is below 1e-17 in
    // amplitude.
    let radius = (9.0 * sigma).min(nf / 2.0);

    let mut values = vec![0.0f64; n_x * n_theta];
    let dx = nf / n_x as f64;
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;

    // Phase table e^{-i theta_k n}.
    let mut phases = vec![Complex64::new(0.0, 0.0); n_theta * dim];
    for k in 0..n_theta {
        let theta = dtheta * k as f64;
        for n in 0..dim {
            let arg = -theta * n as f64;
            phases[k * dim + n] = Complex64::new(arg.cos(), arg.sin());
        }
    }

    let mut windowed = vec![Complex64::new(0.0, 0.0); dim];
    for a in 0..2usize {
        let base = a << n_q;
        for m in 0..n_x {
            let x = m as f64 * dx;
            let mut support: Vec<usize> = Vec::new();
            for n in 0..dim {
                let d = periodic_distance(n as f64, x, nf);
                if d <= radius {
                    let g = (-d * d / (4.0 * sigma * sigma)).exp();
                    windowed[n] = state.amps()[n | base] * g;
                    support.push(n);
                }
            }
            for k in 0..n_theta {
                let row = &phases[k * dim..(k + 1) * dim];
                let mut acc = Complex64::new(0.0, 0.0);
                for &n in &support {
                    acc += windowed[n] * row[n];
                }
                values[m * n_theta + k] += acc.norm_sqr();
            }
        }
    }

    let total: f64 = values.iter().sum();
    if total > 0.0 {
        let norm = 1.0 / (total * dtheta * dx);
        for v in &mut values {
            *v *= norm;
        }
    }
    Ok(HusimiGrid { n_theta, n_x, n_positions: dim, sigma, values })
}

/// Which series field a decay fit reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayField {
    W4,
    Fidelity,
}

impl DecayField {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "w_4" | "w4" => Ok(DecayField::W4),
            "fidelity" => Ok(DecayField::Fidelity),
            other => Err(SimError::Config(format!("unknown decay field {other:?}"))),
        }
    }
}

/// Exponential decay rate from a log-linear least-squares fit.
#[derive(Clone, Copy, Debug)]
pub struct DecayFit {
    pub gamma: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
}

/// Fit `ln(value)` against `t` over the inclusive iteration window.
pub fn fit_decay(
    series: &ObservableSeries,
    field: DecayField,
    window: (usize, usize),
) -> Result<DecayFit> {
    let points: Vec<(f64, f64)> = series
        .points
        .iter()
        .filter(|p| p.t >= window.0 && p.t <= window.1)
        .map(|p| {
            let v = match field {
                DecayField::W4 => p.w_4,
                DecayField::Fidelity => p.fidelity,
            };
            (p.t as f64, v)
        })
        .collect();
    let fit = fit_log_linear(&points)?;
    Ok(DecayFit { window, ..fit })
}

/// Log-linear least squares over raw `(t, value)` pairs; `gamma` is the
/// negated slope. Values must be strictly positive.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 2 {
        return Err(SimError::FitDomain(format!(
            "need at least two points in the window, found {}",
            points.len()
        )));
    }
    if let Some((t, v)) = points.iter().find(|(_, v)| *v <= 0.0) {
        return Err(SimError::FitDomain(format!(
            "non-positive value {v} at t = {t}; shrink the window"
        )));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, v)| (t, v.ln())).collect();
    let st: f64 = logs.iter().map(|(t, _)| t).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let stt: f64 = logs.iter().map(|(t, _)| t * t).sum();
    let sty: f64 = logs.iter().map(|(t, y)| t * y).sum();
    let denom = n * stt - st * st;
    if denom.abs() < f64::EPSILON {
        return Err(SimError::FitDomain("degenerate time axis".into()));
    }
    let slope = (n * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / n;
    let mean = sy / n;
    let ss_tot: f64 = logs.iter().map(|(_, y)| (y - mean) * (y - mean)).sum();
    let ss_res: f64 =
        logs.iter().map(|(t, y)| (y - slope * t - intercept).powi(2)).sum();
    // a constant series has only rounding variance; report a perfect fit
    let r_squared = if ss_tot <= 1e-20 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(DecayFit { gamma: -slope, r_squared, window: (0, 0) })
}
