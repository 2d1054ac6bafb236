//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Thresholds and tolerances are pinned in the asserts.

#[path = "support/mod.rs"]
mod support;

use gyqec_core::harness::{render_husimi, ExperimentConfig, HusimiParams, ModeSpec};
use gyqec_core::imperfections::{
    apply_imperfection_slice, CouplingTopology, DisorderRealization, ErrorModel,
};
use gyqec_core::observables::{fit_log_linear, ObservablePoint, ObservableSeries};
use gyqec_core::state::StateVector;
use gyqec_core::{
    compile_grover_iteration, derive_seed, epsilon_c, grover_theta, ideal_t_g, run, start_state,
    w_g, GyqecConfig, RunOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

const BASE_SEED: u64 = 2026;

fn pass(n: usize, detail: &str) {
    println!("[criterion {n:>2}] PASS  {detail}");
}

/// Static-disorder model for realization `r`, paired across arms.
fn static_model(n_tot: usize, epsilon: f64, r: usize) -> ErrorModel {
    let seed = derive_seed(BASE_SEED, r as u64, 1);
    ErrorModel::Static(
        DisorderRealization::sample_with_topology(n_tot, epsilon, seed, CouplingTopology::Ring)
            .unwrap(),
    )
}

fn run_seed(cell: usize, r: usize) -> u64 {
    derive_seed(BASE_SEED, r as u64, 16 + cell as u64)
}

fn run_series(
    n_q: usize,
    target: usize,
    iterations: usize,
    model: ErrorModel,
    l_g: Option<usize>,
    cell: usize,
    r: usize,
) -> ObservableSeries {
    let program = compile_grover_iteration(n_q, target).unwrap();
    let gyqec = match l_g {
        Some(l_g) => GyqecConfig::with_period(l_g, n_q + 1),
        None => GyqecConfig::disabled(),
    };
    run(&program, &RunOptions::new(iterations, gyqec, model, run_seed(cell, r)))
        .unwrap()
        .series
}

fn mean_points(series: &[ObservableSeries]) -> Vec<ObservablePoint> {
    let n = series.len() as f64;
    let len = series[0].points.len();
    (0..len)
        .map(|i| {
            let mut p = ObservablePoint {
                t: series[0].points[i].t,
                w_g: 0.0,
                w_4: 0.0,
                fidelity: 0.0,
                norm_error: 0.0,
            };
            for s in series {
                p.w_g += s.points[i].w_g;
                p.w_4 += s.points[i].w_4;
                p.fidelity += s.points[i].fidelity;
                p.norm_error += s.points[i].norm_error;
            }
            p.w_g /= n;
            p.w_4 /= n;
            p.fidelity /= n;
            p.norm_error /= n;
            p
        })
        .collect()
}

fn max_w_g(points: &[ObservablePoint]) -> f64 {
    points.iter().map(|p| p.w_g).fold(0.0, f64::max)
}

/// Disorder-averaged run over `reals` realizations (parallel, ordered).
fn averaged(
    n_q: usize,
    target: usize,
    iterations: usize,
    epsilon: f64,
    l_g: Option<usize>,
    mode_fluctuating: bool,
    cell: usize,
    reals: usize,
) -> Vec<ObservablePoint> {
    let runs: Vec<ObservableSeries> = (0..reals)
        .into_par_iter()
        .map(|r| {
            let model = if mode_fluctuating {
                ErrorModel::fluctuating(n_q + 1, epsilon, CouplingTopology::Ring)
            } else {
                static_model(n_q + 1, epsilon, r)
            };
            run_series(n_q, target, iterations, model, l_g, cell, r)
        })
        .collect();
    mean_points(&runs)
}

#[test]
fn criterion_01_ideal_grover_matches_closed_form() {
    let mut slowest = 0.0f64;
    for n_q in 2..=12usize {
        let started = Instant::now();
        let target = (1usize << n_q) / 3;
        let program = compile_grover_iteration(n_q, target).unwrap();
        let theta = grover_theta(n_q);
        let mut st = start_state(n_q);
        let t_max = 3 * ideal_t_g(n_q);
        for t in 1..=t_max {
            program.apply_to(&mut st).unwrap();
            let p = w_g(&st, target, n_q).unwrap();
            let expect = (((2 * t + 1) as f64) * theta).sin().powi(2);
            assert!(
                (p - expect).abs() <= 1e-10,
                "[criterion  1] FAIL n_q={n_q} t={t}: |{p} - {expect}| > 1e-10"
            );
        }
        if n_q == 12 {
            slowest = started.elapsed().as_secs_f64();
            assert!(slowest < 60.0, "[criterion  1] FAIL runtime {slowest:.1}s >= 60s");
        }
    }
    pass(1, &format!("w_G matches sin^2((2t+1) theta) to 1e-10 for n_q=2..12; n_q=12 took {slowest:.2}s"));
}

#[test]
fn criterion_02_gate_budget_scales_inverse_square() {
    let n_q = 9;
    let target = 173;
    let program = compile_grover_iteration(n_q, target).unwrap();
    let n_g = program.n_g();
    let started = Instant::now();
    let budget = |epsilon: f64, seed_idx: usize, cell: usize| -> f64 {
        let cap = 40_000usize;
        let threshold = (-1.0f64).exp();
        let model = ErrorModel::GateAngleNoise { epsilon };
        let mut opts = RunOptions::new(
            cap,
            GyqecConfig::disabled(),
            model,
            run_seed(cell, seed_idx),
        );
        opts.stop_below_fidelity = Some(threshold);
        let series = run(&program, &opts).unwrap().series;
        let crossing = series
            .points
            .iter()
            .find(|p| p.fidelity < threshold)
            .unwrap_or_else(|| panic!("fidelity never crossed 1/e within {cap} iterations"));
        (crossing.t * n_g) as f64
    };
    let budgets: Vec<(f64, f64)> = [(0.004f64, 100usize), (0.008, 101)]
        .par_iter()
        .map(|&(eps, cell)| {
            let mean = (0..10)
                .into_par_iter()
                .map(|s| budget(eps, s, cell))
                .sum::<f64>()
                / 10.0;
            (eps, mean)
        })
        .collect();
    let ratio = budgets[0].1 / budgets[1].1;
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "[criterion  2] FAIL runtime {elapsed:.0}s >= 300s");
    assert!(
        (2.8..=5.2).contains(&ratio),
        "[criterion  2] FAIL budget ratio {ratio:.2} outside 4 +/- 30%"
    );
    pass(2, &format!(
        "1/e gate budgets {:.0} (eps=0.004) vs {:.0} (eps=0.008): ratio {ratio:.2} in [2.8, 5.2]; {elapsed:.0}s",
        budgets[0].1, budgets[1].1
    ));
}

#[test]
fn criterion_03_w4_decay_rate_quadruples_with_doubled_epsilon() {
    let n_q = 9; // n_tot = 10
    let target = 300;
    let t_g = ideal_t_g(n_q);
    let iterations = 6 * t_g;
    let window = (t_g, 5 * t_g);
    let started = Instant::now();
    let gamma = |fluct: bool, l_g: Option<usize>, epsilon: f64, cell: usize| -> f64 {
        let mean = averaged(n_q, target, iterations, epsilon, l_g, fluct, cell, 5);
        let pts: Vec<(f64, f64)> = mean
            .iter()
            .filter(|p| p.t >= window.0 && p.t <= window.1)
            .map(|p| (p.t as f64, p.w_4))
            .collect();
        fit_log_linear(&pts).unwrap().gamma
    };
    let fluct_ratio = gamma(true, None, 0.008, 111) / gamma(true, None, 0.004, 110);
    let gyqec_ratio =
        gamma(false, Some(1), 0.008, 113) / gamma(false, Some(1), 0.004, 112);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "[criterion  3] FAIL runtime {elapsed:.0}s >= 600s");
    for (name, ratio) in [("fluctuating", fluct_ratio), ("gyqec l_g=1", gyqec_ratio)] {
        assert!(
            (3.0..=5.0).contains(&ratio),
            "[criterion  3] FAIL {name} rate ratio {ratio:.2} outside 4 +/- 25%"
        );
    }
    pass(3, &format!(
        "Gamma(2eps)/Gamma(eps): fluctuating {fluct_ratio:.2}, gyqec(l_g=1) {gyqec_ratio:.2}, both in [3, 5]; {elapsed:.0}s"
    ));
}

#[test]
fn criterion_04_static_regular_phase_preserves_w4() {
    let n_q = 11;
    let target = 77;
    let iterations = 3 * ideal_t_g(n_q);
    let epsilon = 0.002;
    // static: time-averaged w_4 (averaged over 10 realizations)
    let static_mean = averaged(n_q, target, iterations, epsilon, None, false, 120, 10);
    let w4_avg =
        static_mean.iter().map(|p| p.w_4).sum::<f64>() / static_mean.len() as f64;
    assert!(
        w4_avg >= 0.9,
        "[criterion  4] FAIL static time-averaged w_4 = {w4_avg:.4} < 0.9"
    );
    // fluctuating couplings at the same epsilon decay visibly
    let fluct_mean = averaged(n_q, target, iterations, epsilon, None, true, 121, 10);
    let t_g = ideal_t_g(n_q);
    let pts: Vec<(f64, f64)> = fluct_mean
        .iter()
        .filter(|p| p.t >= t_g)
        .map(|p| (p.t as f64, p.w_4))
        .collect();
    let fit = fit_log_linear(&pts).unwrap();
    assert!(
        fit.gamma > 0.0 && fit.r_squared > 0.9,
        "[criterion  4] FAIL fluctuating decay Gamma={:.3e} r2={:.3}",
        fit.gamma,
        fit.r_squared
    );
    pass(4, &format!(
        "static <w_4> = {w4_avg:.4} >= 0.9; fluctuating Gamma = {:.2e} with r2 = {:.3}",
        fit.gamma, fit.r_squared
    ));
}

#[test]
fn criterion_05_chaos_border_location() {
    let n_q = 11;
    let target = 1500;
    let iterations = 3 * ideal_t_g(n_q);
    let n_g = compile_grover_iteration(n_q, target).unwrap().n_g();
    let eps_c = epsilon_c(n_g, n_q + 1);
    let points: Vec<f64> =
        (0..8).map(|k| eps_c / 10.0 * 100f64.powf(k as f64 / 7.0)).collect();
    let maxima: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            max_w_g(&averaged(n_q, target, iterations, eps, None, false, 130 + k, 5))
        })
        .collect();
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    for (&eps, &w) in points.iter().zip(&maxima) {
        if eps <= 0.3 * eps_c {
            assert!(
                w >= 0.3,
                "[criterion  5] FAIL max w_G = {w:.3} < 0.3 at eps = {eps:.2e} <= 0.3 eps_c"
            );
            lows.push(w);
        }
        if eps >= 3.0 * eps_c {
            assert!(
                w <= 0.05,
                "[criterion  5] FAIL max w_G = {w:.3} > 0.05 at eps = {eps:.2e} >= 3 eps_c"
            );
            highs.push(w);
        }
    }
    pass(5, &format!(
        "eps_c = {eps_c:.2e} (n_g = {n_g}); regular side minima {:.2} >= 0.3, chaotic side maxima {:.3} <= 0.05",
        lows.iter().cloned().fold(f64::INFINITY, f64::min),
        highs.iter().cloned().fold(0.0, f64::max)
    ));
}

#[test]
fn criterion_06_relabeling_benefit_is_monotone_in_period() {
    let n_q = 11;
    let target = 77;
    let iterations = 3 * ideal_t_g(n_q);
    let epsilon = 0.003;
    let baseline = max_w_g(&averaged(n_q, target, iterations, epsilon, None, false, 140, 10));
    let periods = [1usize, 5, 10, 20];
    let peaks: Vec<f64> = periods
        .iter()
        .enumerate()
        .map(|(k, &l_g)| {
            max_w_g(&averaged(n_q, target, iterations, epsilon, Some(l_g), false, 141 + k, 10))
        })
        .collect();
    for w in peaks.windows(2) {
        assert!(
            w[0] >= w[1],
            "[criterion  6] FAIL peaks not non-increasing in l_g: {peaks:?}"
        );
    }
    for (&l_g, &w) in periods.iter().zip(&peaks) {
        assert!(
            w > baseline,
            "[criterion  6] FAIL l_g={l_g} peak {w:.3} not above baseline {baseline:.3}"
        );
    }
    pass(6, &format!(
        "peak w_G over l_g {periods:?} = {:?} non-increasing, all above baseline {baseline:.3}",
        peaks.iter().map(|w| (w * 1000.0).round() / 1000.0).collect::<Vec<_>>()
    ));
}

#[test]
fn criterion_07_gain_factor_band_and_flatness() {
    let n_q = 11;
    let target = 77;
    let iterations = 3 * ideal_t_g(n_q);
    let epsilons = [0.002f64, 0.003, 0.004, 0.005];
    let gains: Vec<f64> = epsilons
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let baseline =
                max_w_g(&averaged(n_q, target, iterations, eps, None, false, 150 + k, 10));
            let with =
                max_w_g(&averaged(n_q, target, iterations, eps, Some(1), false, 160 + k, 10));
            with / baseline
        })
        .collect();
    for (&eps, &r) in epsilons.iter().zip(&gains) {
        assert!(
            (3.0..=12.0).contains(&r),
            "[criterion  7] FAIL R = {r:.2} outside [3, 12] at eps = {eps}"
        );
    }
    let spread = gains.iter().cloned().fold(0.0, f64::max)
        / gains.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        spread < 2.0,
        "[criterion  7] FAIL gain varies by {spread:.2}x >= 2x across eps: {gains:?}"
    );
    pass(7, &format!(
        "gains {:?} all in [3, 12], spread {spread:.2}x < 2x",
        gains.iter().map(|g| (g * 100.0).round() / 100.0).collect::<Vec<_>>()
    ));
}

#[test]
fn criterion_08_relabeling_is_exact_without_imperfections() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let cases: Vec<(usize, usize, usize, u64)> = (0..100)
        .map(|_| {
            let n_q = rng.gen_range(3..=8);
            let target = rng.gen_range(0..1usize << n_q);
            let l_g = rng.gen_range(1..=12);
            (n_q, target, l_g, rng.gen())
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|&(n_q, target, l_g, seed)| {
            let program = compile_grover_iteration(n_q, target).unwrap();
            let iterations = (2 * ideal_t_g(n_q)).min(24);
            let mut opts = RunOptions::new(
                iterations,
                GyqecConfig::with_period(l_g, n_q + 1),
                ErrorModel::None,
                seed,
            );
            opts.capture_trajectory = true;
            let relabeled = run(&program, &opts).unwrap();
            let mut ideal_opts =
                RunOptions::new(iterations, GyqecConfig::disabled(), ErrorModel::None, seed);
            ideal_opts.capture_trajectory = true;
            let ideal = run(&program, &ideal_opts).unwrap();
            let mut worst = 0.0f64;
            for (a, b) in relabeled.trajectory.iter().zip(&ideal.trajectory) {
                for (x, y) in a.amps().iter().zip(b.amps()) {
                    worst = worst.max((x.norm_sqr() - y.norm_sqr()).abs());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    assert!(
        worst <= 1e-10,
        "[criterion  8] FAIL max probability deviation {worst:.2e} > 1e-10"
    );
    pass(8, &format!(
        "100 random (n_q, l_g, seed) runs: max probability deviation {worst:.1e} <= 1e-10"
    ));
}

#[test]
fn criterion_09_kernels_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = 0.0f64;
    for sequence in 0..1000 {
        let n = 2 + sequence % 3;
        let mut st = support::random_state(n, &mut rng);
        let mut dense: Vec<num_complex::Complex64> = st.amps().to_vec();
        for _ in 0..8 {
            match rng.gen_range(0..4) {
                0 | 1 => {
                    let gate = support::random_gate(n, &mut rng);
                    st.apply_gate(&gate).unwrap();
                    dense = support::matvec(&support::gate_matrix(n, &gate), &dense);
                }
                2 => {
                    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.4..0.4)).collect();
                    st.apply_diagonal_z_field(&a).unwrap();
                    let u = support::expm_minus_i(&support::z_field_hamiltonian(n, &a));
                    dense = support::matvec(&u, &dense);
                }
                _ => {
                    let pairs = CouplingTopology::Ring.pairs(n);
                    let b: Vec<f64> =
                        (0..pairs.len()).map(|_| rng.gen_range(-0.4..0.4)).collect();
                    st.apply_xx_coupling(&b, &pairs).unwrap();
                    let u = support::expm_minus_i(&support::xx_hamiltonian(n, &b, &pairs));
                    dense = support::matvec(&u, &dense);
                }
            }
        }
        for (x, y) in st.amps().iter().zip(&dense) {
            worst = worst.max((x - y).norm());
        }
        assert!(
            worst <= 1e-10,
            "[criterion  9] FAIL sequence {sequence}: deviation {worst:.2e} > 1e-10"
        );
    }
    pass(9, &format!(
        "1000 random gate/slice sequences on <= 4 qubits: max elementwise deviation {worst:.1e}"
    ));
}

#[test]
fn criterion_10_husimi_concentration_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.n_q = 11;
    cfg.target = 77;
    cfg.epsilons = vec![0.002, 0.004, 0.008];
    cfg.modes = vec![ModeSpec::Ideal, ModeSpec::Gyqec, ModeSpec::Static];
    cfg.l_gs = vec![1];
    cfg.realizations = 1;
    cfg.base_seed = Some(BASE_SEED);
    cfg.out_dir = dir.path().to_path_buf();
    cfg.husimi = HusimiParams { n_theta: 48, n_x: 128, sigma: None };
    let (_, artifacts) = render_husimi(&cfg, None).unwrap();

    let ideal = artifacts.iter().find(|a| a.label == "ideal").unwrap();
    assert!(
        ideal.target_band_mass > 0.9,
        "[criterion 10] FAIL ideal band mass {:.3} <= 0.9",
        ideal.target_band_mass
    );
    let mut orderings = Vec::new();
    for &eps in &cfg.epsilons {
        let with = artifacts
            .iter()
            .find(|a| a.l_g.is_some() && a.epsilon == eps)
            .unwrap()
            .target_band_mass;
        let without = artifacts
            .iter()
            .find(|a| a.l_g.is_none() && a.label != "ideal" && a.epsilon == eps)
            .unwrap()
            .target_band_mass;
        assert!(
            with > without,
            "[criterion 10] FAIL at eps={eps}: relabeled band mass {with:.3} <= bare {without:.3}"
        );
        orderings.push((eps, with, without));
        if eps == 0.008 {
            assert!(
                without < 0.3,
                "[criterion 10] FAIL bare band mass {without:.3} >= 0.3 at eps=0.008"
            );
        }
    }
    let detail: Vec<String> = orderings
        .iter()
        .map(|(e, w, wo)| format!("eps={e}: {w:.2} > {wo:.2}"))
        .collect();
    pass(10, &format!(
        "ideal band mass {:.3} > 0.9; {}",
        ideal.target_band_mass,
        detail.join("; ")
    ));
}
