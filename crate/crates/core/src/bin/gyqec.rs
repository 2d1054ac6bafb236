//! Command-line driver: single runs, parameter scans, Husimi snapshots,
//! decay fits and program dumps.

use clap::{Args, Parser, Subcommand};
use gyqec_core::harness::{read_series_table, render_husimi, run_single, scan, ExperimentConfig, ModeSpec};
use gyqec_core::imperfections::CouplingTopology;
use gyqec_core::observables::fit_log_linear;
use gyqec_core::{compile_grover_iteration, epsilon_c, SimError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gyqec",
    about = "Grover search under static imperfections, with gyroscopic qubit relabeling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Plain-text key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Search register size.
    #[arg(long)]
    n_q: Option<usize>,
    /// Searched basis state.
    #[arg(long)]
    target: Option<usize>,
    /// Grover iterations (default 3 t_G).
    #[arg(long)]
    iterations: Option<usize>,
    /// Imperfection strengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    /// Modes: ideal, static, fluctuating, gate-noise, gyqec.
    #[arg(long, value_delimiter = ',')]
    mode: Vec<String>,
    /// Gates between relabeling events, comma separated.
    #[arg(long, value_delimiter = ',')]
    l_g: Vec<usize>,
    /// Transpositions per relabeling event (default n_tot / 2).
    #[arg(long)]
    swaps_per_event: Option<usize>,
    /// Apply imperfection slices after relabeling swaps (default true).
    #[arg(long)]
    slice_after_swaps: Option<bool>,
    /// Disorder realizations per cell.
    #[arg(long)]
    realizations: Option<usize>,
    /// Base seed for all derived RNG streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Coupling topology: ring, chain, all-pairs.
    #[arg(long)]
    topology: Option<String>,
    /// Write a relabeling event log per gyqec run.
    #[arg(long)]
    event_log: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Husimi grid phase bins.
    #[arg(long)]
    n_theta: Option<usize>,
    /// Husimi grid position bins.
    #[arg(long)]
    n_x: Option<usize>,
    /// Husimi smoothing width (default sqrt(2^n_q)/(2 sqrt(pi))).
    #[arg(long)]
    sigma: Option<f64>,
    /// Decay-fit window start (default t_G).
    #[arg(long)]
    fit_lo: Option<usize>,
    /// Decay-fit window end (default min(5 t_G, iterations)).
    #[arg(long)]
    fit_hi: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// One run per configured mode; writes one observable table each.
    Run(CommonOpts),
    /// Disorder-averaged (epsilon, l_g) grid with summary table.
    Scan(CommonOpts),
    /// Husimi snapshots at the probability peak, per epsilon with and
    /// without relabeling.
    Husimi {
        #[command(flatten)]
        common: CommonOpts,
        /// Fixed snapshot iteration (default: per-run w_G maximum).
        #[arg(long)]
        snapshot_t: Option<usize>,
    },
    /// Log-linear decay fit over a column of a series table.
    Fit {
        /// Series table produced by run or scan.
        #[arg(long)]
        input: PathBuf,
        /// Column to fit: w_4 or fidelity.
        #[arg(long, default_value = "w_4")]
        field: String,
        #[arg(long)]
        t_lo: usize,
        #[arg(long)]
        t_hi: usize,
    },
    /// Print the compiled iteration, one gate per line.
    Dump {
        #[arg(long)]
        n_q: usize,
        #[arg(long, default_value_t = 0)]
        target: usize,
    },
    /// Print the chaos border estimate for a gate count and qubit count.
    Border {
        #[arg(long)]
        n_q: usize,
    },
}

fn build_config(opts: &CommonOpts, seed_required: bool) -> Result<ExperimentConfig, SimError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &opts.config {
        cfg.apply_file(path)?;
    }
    if let Some(n_q) = opts.n_q {
        cfg.n_q = n_q;
    }
    if let Some(target) = opts.target {
        cfg.target = target;
    }
    if opts.iterations.is_some() {
        cfg.iterations = opts.iterations;
    }
    if !opts.epsilon.is_empty() {
        cfg.epsilons = opts.epsilon.clone();
    }
    if !opts.mode.is_empty() {
        cfg.modes = opts
            .mode
            .iter()
            .map(|m| ModeSpec::parse(m))
            .collect::<Result<_, _>>()?;
    }
    if !opts.l_g.is_empty() {
        cfg.l_gs = opts.l_g.clone();
    }
    if opts.swaps_per_event.is_some() {
        cfg.swaps_per_event = opts.swaps_per_event;
    }
    if let Some(s) = opts.slice_after_swaps {
        cfg.slice_after_swaps = s;
    }
    if let Some(r) = opts.realizations {
        cfg.realizations = r;
    }
    if opts.seed.is_some() {
        cfg.base_seed = opts.seed;
    }
    if let Some(dir) = &opts.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(t) = &opts.topology {
        cfg.topology = CouplingTopology::parse(t)?;
    }
    if opts.event_log {
        cfg.event_log = true;
    }
    if opts.threads.is_some() {
        cfg.threads = opts.threads;
    }
    if let Some(n) = opts.n_theta {
        cfg.husimi.n_theta = n;
    }
    if let Some(n) = opts.n_x {
        cfg.husimi.n_x = n;
    }
    if opts.sigma.is_some() {
        cfg.husimi.sigma = opts.sigma;
    }
    match (opts.fit_lo, opts.fit_hi) {
        (Some(lo), Some(hi)) => cfg.fit_window = Some((lo, hi)),
        (Some(lo), None) => {
            let hi = cfg.fit_window.map(|w| w.1).unwrap_or(usize::MAX);
            cfg.fit_window = Some((lo, hi));
        }
        (None, Some(hi)) => {
            let lo = cfg.fit_window.map(|w| w.0).unwrap_or(0);
            cfg.fit_window = Some((lo, hi));
        }
        (None, None) => {}
    }
    if seed_required && cfg.base_seed.is_none() {
        return Err(SimError::Config(
            "scan requires an explicit --seed (no silent nondeterminism)".into(),
        ));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Run(opts) => {
            let cfg = build_config(&opts, false)?;
            let (resolved, results) = run_single(&cfg)?;
            print!("{}", resolved.echo());
            for (label, series) in &results {
                println!(
                    "{label}: n_g={} max w_G={:.6} mean w_4={:.6}",
                    series.meta.n_g,
                    series.max_w_g(),
                    series.mean_w_4()
                );
            }
            println!("wrote {}", resolved.out_dir.display());
            Ok(())
        }
        Command::Scan(opts) => {
            let cfg = build_config(&opts, true)?;
            let (resolved, rows) = scan(&cfg)?;
            print!("{}", resolved.echo());
            for r in &rows {
                println!(
                    "{} eps={} l_g={} max w_G={:.6} gain={} gamma={}",
                    r.mode,
                    r.epsilon,
                    r.l_g.map_or("-".into(), |l| l.to_string()),
                    r.max_mean_w_g,
                    r.gain.map_or("-".into(), |g| format!("{g:.3}")),
                    r.gamma_w4.map_or("-".into(), |g| format!("{g:.3e}")),
                );
            }
            println!("wrote {}", resolved.out_dir.display());
            Ok(())
        }
        Command::Husimi { common, snapshot_t } => {
            let cfg = build_config(&common, false)?;
            let (resolved, artifacts) = render_husimi(&cfg, snapshot_t)?;
            for a in &artifacts {
                println!(
                    "{}: t*={} target-band mass={:.4} -> {}",
                    a.label,
                    a.snapshot_t,
                    a.target_band_mass,
                    a.pgm_path.display()
                );
            }
            println!("wrote {}", resolved.out_dir.display());
            Ok(())
        }
        Command::Fit { input, field, t_lo, t_hi } => {
            let (columns, rows) = read_series_table(&input)?;
            let col = columns
                .iter()
                .position(|c| c == &field)
                .ok_or_else(|| SimError::Config(format!("no column {field:?} in table")))?;
            let t_col = columns
                .iter()
                .position(|c| c == "t")
                .ok_or_else(|| SimError::Config("no t column in table".into()))?;
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r[t_col] >= t_lo as f64 && r[t_col] <= t_hi as f64)
                .map(|r| (r[t_col], r[col]))
                .collect();
            let fit = fit_log_linear(&points)?;
            println!("gamma={:.6e} r_squared={:.6} window=[{t_lo},{t_hi}]", fit.gamma, fit.r_squared);
            Ok(())
        }
        Command::Dump { n_q, target } => {
            let prog = compile_grover_iteration(n_q, target)?;
            print!("{}", prog.dump());
            eprintln!("n_g={}", prog.n_g());
            Ok(())
        }
        Command::Border { n_q } => {
            let prog = compile_grover_iteration(n_q, 0)?;
            println!(
                "n_q={} n_g={} epsilon_c={:.6e}",
                n_q,
                prog.n_g(),
                epsilon_c(prog.n_g(), n_q + 1)
            );
            Ok(())
        }
    }
}
