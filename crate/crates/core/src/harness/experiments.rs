//! Experiment drivers: single runs, (epsilon, l_g) scans with disorder
//! averaging, and Husimi snapshots.
//!
//! Seed discipline: realization `r` draws its disorder from
//! `derive_seed(base_seed, r, 1)` and its run stream from
//! `derive_seed(base_seed, r, 16 + cell_index)`, so no two runs share an
//! RNG sequence, disorder realizations are paired across cells at the same
//! epsilon, and results are independent of scheduling.

use crate::circuit::{compile_grover_iteration, GateProgram};
use crate::error::{Result, SimError};
use crate::gyqec::{run, GyqecConfig, RunOptions, RunOutput};
use crate::harness::config::{ExperimentConfig, ModeSpec, ResolvedConfig};
use crate::harness::output::{
    write_events, write_husimi_pgm, write_husimi_text, write_series, RunManifest,
};
use crate::imperfections::{derive_seed, DisorderRealization, ErrorModel};
use crate::observables::{fit_decay, gain_factor, husimi, DecayField, ObservableSeries};
use rayon::prelude::*;
use std::path::PathBuf;
use std::time::Instant;

const DISORDER_STREAM: u64 = 1;
const RUN_STREAM_BASE: u64 = 16;

fn run_seed(cfg: &ResolvedConfig, cell: usize, realization: usize) -> u64 {
    derive_seed(cfg.base_seed, realization as u64, RUN_STREAM_BASE + cell as u64)
}

fn disorder_seed(cfg: &ResolvedConfig, realization: usize) -> u64 {
    derive_seed(cfg.base_seed, realization as u64, DISORDER_STREAM)
}

/// Error model and relabeling schedule of one run.
fn build_arm(
    cfg: &ResolvedConfig,
    mode: ModeSpec,
    epsilon: f64,
    l_g: Option<usize>,
    realization: usize,
) -> Result<(ErrorModel, GyqecConfig)> {
    let model = match mode {
        ModeSpec::Ideal => ErrorModel::None,
        ModeSpec::Static | ModeSpec::Gyqec => {
            ErrorModel::Static(DisorderRealization::sample_with_topology(
                cfg.n_tot,
                epsilon,
                disorder_seed(cfg, realization),
                cfg.topology,
            )?)
        }
        ModeSpec::Fluctuating => ErrorModel::fluctuating(cfg.n_tot, epsilon, cfg.topology),
        ModeSpec::GateNoise => ErrorModel::GateAngleNoise { epsilon },
    };
    let gyqec = if mode == ModeSpec::Gyqec {
        let l_g = l_g.ok_or_else(|| SimError::Config("gyqec arm needs l_g".into()))?;
        GyqecConfig {
            enabled: true,
            l_g,
            swaps_per_event: cfg.swaps_per_event,
            slice_after_swaps: cfg.slice_after_swaps,
        }
    } else {
        GyqecConfig::disabled()
    };
    Ok((model, gyqec))
}

fn execute(
    program: &GateProgram,
    cfg: &ResolvedConfig,
    mode: ModeSpec,
    epsilon: f64,
    l_g: Option<usize>,
    cell: usize,
    realization: usize,
    capture_at: Option<usize>,
) -> Result<RunOutput> {
    let (model, gyqec) = build_arm(cfg, mode, epsilon, l_g, realization)?;
    let seed = run_seed(cfg, cell, realization);
    let options = RunOptions {
        iterations: cfg.iterations,
        gyqec,
        model,
        seed,
        collect_events: cfg.event_log,
        capture_at,
        capture_trajectory: false,
        stop_below_fidelity: None,
    };
    run(program, &options)
        .map_err(|e| SimError::contract(format!("run with seed {seed} failed: {e}")))
}

/// Pointwise mean of several series (identical lengths by construction).
fn mean_series(series: &[ObservableSeries], base_seed: u64) -> ObservableSeries {
    let n = series.len() as f64;
    let mut out = series[0].clone();
    out.meta.seed = base_seed;
    for p in &mut out.points {
        p.w_g = 0.0;
        p.w_4 = 0.0;
        p.fidelity = 0.0;
        p.norm_error = 0.0;
    }
    for s in series {
        for (acc, p) in out.points.iter_mut().zip(&s.points) {
            acc.w_g += p.w_g;
            acc.w_4 += p.w_4;
            acc.fidelity += p.fidelity;
            acc.norm_error += p.norm_error;
        }
    }
    for p in &mut out.points {
        p.w_g /= n;
        p.w_4 /= n;
        p.fidelity /= n;
        p.norm_error /= n;
    }
    out
}

fn eps_tag(e: f64) -> String {
    format!("{e}").replace('.', "p").replace('-', "m")
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Execute one run per configured mode (first epsilon, first l_g) and
/// write one series table per mode.
pub fn run_single(
    config: &ExperimentConfig,
) -> Result<(ResolvedConfig, Vec<(String, ObservableSeries)>)> {
    let cfg = config.resolve()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let program = compile_grover_iteration(cfg.n_q, cfg.target)?;
    let epsilon = cfg.epsilons[0];
    let started = Instant::now();
    let mut manifest = RunManifest::new(&cfg.echo());
    let mut results = Vec::new();

    for (cell, &mode) in cfg.modes.iter().enumerate() {
        let l_g = (mode == ModeSpec::Gyqec).then(|| cfg.l_gs[0]);
        let out = execute(&program, &cfg, mode, epsilon, l_g, cell, 0, None)?;
        let label = match l_g {
            Some(l) => format!("{}-lg{}", mode.name(), l),
            None => mode.name().to_string(),
        };
        let path = cfg.out_dir.join(format!("run_{label}.tsv"));
        write_series(&path, &out.series, &cfg.echo())?;
        manifest.seeds.push(out.series.meta.seed);
        manifest.files.push(path.file_name().unwrap().to_string_lossy().into_owned());
        if cfg.event_log && mode == ModeSpec::Gyqec {
            let ev_path = cfg.out_dir.join(format!("events_{label}.log"));
            write_events(&ev_path, &out.events)?;
            manifest.files.push(ev_path.file_name().unwrap().to_string_lossy().into_owned());
        }
        results.push((label, out.series));
    }

    manifest.wall_seconds = started.elapsed().as_secs_f64();
    manifest.write(&cfg.out_dir)?;
    Ok((cfg, results))
}

/// One summary row of a scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub mode: String,
    pub epsilon: f64,
    pub l_g: Option<usize>,
    pub max_mean_w_g: f64,
    /// Peak mean w_G relative to the static no-relabeling baseline at the
    /// same epsilon.
    pub gain: Option<f64>,
    pub gamma_w4: Option<f64>,
    pub r_squared: Option<f64>,
}

/// Scan cell descriptor: epsilon plus the arm.
#[derive(Clone, Copy, Debug)]
struct Cell {
    mode: ModeSpec,
    epsilon: f64,
    l_g: Option<usize>,
}

/// Run the (epsilon, l_g) grid with disorder averaging.
///
/// Every epsilon always gets a static no-relabeling baseline cell (it
/// anchors the gain factor); fluctuating and relabeling cells follow the
/// configured mode list. Emits one mean-series file per cell plus a
/// summary table, and returns the summary rows.
pub fn scan(config: &ExperimentConfig) -> Result<(ResolvedConfig, Vec<ScanRow>)> {
    let cfg = config.resolve()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let program = compile_grover_iteration(cfg.n_q, cfg.target)?;
    let started = Instant::now();

    let mut cells = Vec::new();
    for &epsilon in &cfg.epsilons {
        cells.push(Cell { mode: ModeSpec::Static, epsilon, l_g: None });
        if cfg.modes.contains(&ModeSpec::Fluctuating) {
            cells.push(Cell { mode: ModeSpec::Fluctuating, epsilon, l_g: None });
        }
        if cfg.modes.contains(&ModeSpec::GateNoise) {
            cells.push(Cell { mode: ModeSpec::GateNoise, epsilon, l_g: None });
        }
        if cfg.modes.contains(&ModeSpec::Gyqec) {
            for &l_g in &cfg.l_gs {
                cells.push(Cell { mode: ModeSpec::Gyqec, epsilon, l_g: Some(l_g) });
            }
        }
    }

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.realizations).map(move |r| (c, r)))
        .collect();
    let outputs: Vec<Result<ObservableSeries>> = with_pool(cfg.threads, || {
        jobs.par_iter()
            .map(|&(c, r)| {
                let cell = cells[c];
                execute(&program, &cfg, cell.mode, cell.epsilon, cell.l_g, c, r, None)
                    .map(|o| o.series)
            })
            .collect()
    });

    let mut per_cell: Vec<Vec<ObservableSeries>> = vec![Vec::new(); cells.len()];
    for ((c, _), out) in jobs.into_iter().zip(outputs) {
        per_cell[c].push(out?);
    }

    let mut manifest = RunManifest::new(&cfg.echo());
    for series in per_cell.iter().flatten() {
        manifest.seeds.push(series.meta.seed);
    }

    let mut rows = Vec::new();
    let mut baselines: Vec<(f64, f64)> = Vec::new(); // (epsilon, max mean w_g)
    for (cell, series) in cells.iter().zip(&per_cell) {
        let mean = mean_series(series, cfg.base_seed);
        let label = match cell.l_g {
            Some(l) => format!("{}_eps{}_lg{}", cell.mode.name(), eps_tag(cell.epsilon), l),
            None => format!("{}_eps{}", cell.mode.name(), eps_tag(cell.epsilon)),
        };
        let path = cfg.out_dir.join(format!("scan_{label}.tsv"));
        write_series(&path, &mean, &cfg.echo())?;
        manifest.files.push(path.file_name().unwrap().to_string_lossy().into_owned());

        let max_w_g = mean.max_w_g();
        if cell.mode == ModeSpec::Static {
            baselines.push((cell.epsilon, max_w_g));
        }
        let fit = fit_decay(&mean, DecayField::W4, cfg.fit_window).ok();
        rows.push(ScanRow {
            mode: cell.mode.name().to_string(),
            epsilon: cell.epsilon,
            l_g: cell.l_g,
            max_mean_w_g: max_w_g,
            gain: None,
            gamma_w4: fit.map(|f| f.gamma),
            r_squared: fit.map(|f| f.r_squared),
        });
    }
    for row in &mut rows {
        if row.mode != ModeSpec::Static.name() {
            let baseline = baselines
                .iter()
                .find(|(e, _)| *e == row.epsilon)
                .map(|(_, w)| *w)
                .expect("baseline exists for every epsilon");
            row.gain = gain_factor(row.max_mean_w_g, baseline).ok();
        }
    }

    let summary_path = cfg.out_dir.join("summary.tsv");
    let mut f = std::fs::File::create(&summary_path)?;
    use std::io::Write;
    for line in cfg.echo().lines() {
        writeln!(f, "# {line}")?;
    }
    writeln!(f, "mode\tepsilon\tl_g\tmax_mean_w_g\tgain\tgamma_w4\tr_squared")?;
    for r in &rows {
        writeln!(
            f,
            "{}\t{:.16e}\t{}\t{:.16e}\t{}\t{}\t{}",
            r.mode,
            r.epsilon,
            r.l_g.map_or("-".into(), |l| l.to_string()),
            r.max_mean_w_g,
            r.gain.map_or("-".into(), |g| format!("{g:.16e}")),
            r.gamma_w4.map_or("-".into(), |g| format!("{g:.16e}")),
            r.r_squared.map_or("-".into(), |g| format!("{g:.16e}")),
        )?;
    }
    manifest.files.push("summary.tsv".into());
    manifest.wall_seconds = started.elapsed().as_secs_f64();
    manifest.write(&cfg.out_dir)?;
    Ok((cfg, rows))
}

/// One rendered Husimi snapshot.
#[derive(Clone, Debug)]
pub struct HusimiArtifact {
    pub label: String,
    pub epsilon: f64,
    pub l_g: Option<usize>,
    pub snapshot_t: usize,
    /// Probability mass within 3 sigma of the searched position.
    pub target_band_mass: f64,
    pub text_path: PathBuf,
    pub pgm_path: PathBuf,
}

/// Render Husimi distributions at the probability peak (or a fixed
/// snapshot time) for each epsilon, with and without relabeling, plus an
/// ideal reference when the mode list includes it.
pub fn render_husimi(
    config: &ExperimentConfig,
    snapshot_t: Option<usize>,
) -> Result<(ResolvedConfig, Vec<HusimiArtifact>)> {
    let cfg = config.resolve()?;
    if let Some(t) = snapshot_t {
        if t == 0 || t > cfg.iterations {
            return Err(SimError::Config(format!(
                "snapshot time {t} outside 1..={}",
                cfg.iterations
            )));
        }
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let program = compile_grover_iteration(cfg.n_q, cfg.target)?;
    let started = Instant::now();
    let mut manifest = RunManifest::new(&cfg.echo());

    let mut arms: Vec<(ModeSpec, f64, Option<usize>)> = Vec::new();
    if cfg.modes.contains(&ModeSpec::Ideal) {
        arms.push((ModeSpec::Ideal, 0.0, None));
    }
    for &epsilon in &cfg.epsilons {
        arms.push((ModeSpec::Gyqec, epsilon, Some(cfg.l_gs[0])));
        arms.push((ModeSpec::Static, epsilon, None));
    }

    let mut artifacts = Vec::new();
    for (cell, &(mode, epsilon, l_g)) in arms.iter().enumerate() {
        // First pass locates the probability peak, second pass captures
        // the state there; both runs share one seed, hence one trajectory.
        let t_star = match snapshot_t {
            Some(t) => t,
            None => {
                let probe = execute(&program, &cfg, mode, epsilon, l_g, cell, 0, None)?;
                probe
                    .series
                    .points
                    .iter()
                    .max_by(|a, b| a.w_g.total_cmp(&b.w_g))
                    .map(|p| p.t)
                    .unwrap()
            }
        };
        let out = execute(&program, &cfg, mode, epsilon, l_g, cell, 0, Some(t_star))?;
        let state = out.captured.expect("capture_at within horizon");
        let grid = husimi(&state, cfg.n_q, cfg.n_theta, cfg.n_x, cfg.sigma)?;
        let band = grid.band_mass(cfg.target as f64, 3.0 * cfg.sigma);

        let label = match (mode, l_g) {
            (ModeSpec::Ideal, _) => "ideal".to_string(),
            (_, Some(l)) => format!("gyqec_eps{}_lg{}", eps_tag(epsilon), l),
            (_, None) => format!("static_eps{}", eps_tag(epsilon)),
        };
        let text_path = cfg.out_dir.join(format!("husimi_{label}.txt"));
        let pgm_path = cfg.out_dir.join(format!("husimi_{label}.pgm"));
        write_husimi_text(&text_path, &grid)?;
        write_husimi_pgm(&pgm_path, &grid)?;
        manifest.seeds.push(out.series.meta.seed);
        manifest.files.push(text_path.file_name().unwrap().to_string_lossy().into_owned());
        manifest.files.push(pgm_path.file_name().unwrap().to_string_lossy().into_owned());
        artifacts.push(HusimiArtifact {
            label,
            epsilon,
            l_g,
            snapshot_t: t_star,
            target_band_mass: band,
            text_path,
            pgm_path,
        });
    }

    manifest.wall_seconds = started.elapsed().as_secs_f64();
    manifest.write(&cfg.out_dir)?;
    Ok((cfg, artifacts))
}
