//! Output files: tab-delimited series tables with commented config
//! headers, scan summaries, Husimi grids (text and PGM) and run manifests.

use crate::error::{Result, SimError};
use crate::gyqec::RelabelEventRecord;
use crate::observables::{HusimiGrid, ObservableSeries};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Hex SHA-256 of the canonical resolved-config echo.
pub fn config_hash(echo: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(echo.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance record for one harness invocation.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub config_hash: String,
    pub version: String,
    pub seeds: Vec<u64>,
    pub wall_seconds: f64,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(echo: &str) -> Self {
        RunManifest {
            config_hash: config_hash(echo),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: Vec::new(),
            wall_seconds: 0.0,
            files: Vec::new(),
        }
    }

    /// Write `manifest.txt` into `dir`. Wall-clock is informational; all
    /// other outputs are bit-reproducible from config + seed.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.txt");
        let mut f = std::fs::File::create(&path)?;
        writeln!(f, "config_hash {}", self.config_hash)?;
        writeln!(f, "code_version {}", self.version)?;
        writeln!(f, "wall_seconds {:.3}", self.wall_seconds)?;
        writeln!(
            f,
            "seeds {}",
            self.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        )?;
        for file in &self.files {
            writeln!(f, "file {file}")?;
        }
        Ok(path)
    }
}

/// Write one observable series as a tab-delimited table with a commented
/// header block.
pub fn write_series(path: &Path, series: &ObservableSeries, config_echo: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    for line in config_echo.lines() {
        writeln!(f, "# {line}")?;
    }
    let m = &series.meta;
    writeln!(
        f,
        "# series mode={} epsilon={:.17e} l_g={} seed={} n_g={} t_g={}",
        m.mode,
        m.epsilon,
        m.l_g.map_or("-".to_string(), |l| l.to_string()),
        m.seed,
        m.n_g,
        m.t_g
    )?;
    writeln!(f, "t\tw_g\tw_4\tfidelity\tnorm_error")?;
    for p in &series.points {
        writeln!(
            f,
            "{}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}",
            p.t, p.w_g, p.w_4, p.fidelity, p.norm_error
        )?;
    }
    Ok(())
}

/// Read a tab-delimited series table back: column names plus numeric rows.
pub fn read_series_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if columns.is_empty() {
            columns = line.split('\t').map(|s| s.to_string()).collect();
            continue;
        }
        let row: Vec<f64> = line
            .split('\t')
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|e| SimError::Config(format!("bad number {v:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != columns.len() {
            return Err(SimError::Config(format!(
                "row width {} does not match {} columns",
                row.len(),
                columns.len()
            )));
        }
        rows.push(row);
    }
    if columns.is_empty() {
        return Err(SimError::Config("no table header found".into()));
    }
    Ok((columns, rows))
}

/// Husimi grid as text: three header lines (dimensions, domain, sigma)
/// then one row per position bin.
pub fn write_husimi_text(path: &Path, grid: &HusimiGrid) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "# dims n_x={} n_theta={}", grid.n_x, grid.n_theta)?;
    writeln!(f, "# domain x=[0,{}) theta=[0,2pi)", grid.n_positions)?;
    writeln!(f, "# sigma {:.17e}", grid.sigma)?;
    for m in 0..grid.n_x {
        let row: Vec<String> =
            (0..grid.n_theta).map(|k| format!("{:.9e}", grid.value(m, k))).collect();
        writeln!(f, "{}", row.join("\t"))?;
    }
    Ok(())
}

/// 8-bit grayscale PGM (binary P5), row 0 = position 0, intensity linear
/// in density scaled to the grid maximum.
pub fn write_husimi_pgm(path: &Path, grid: &HusimiGrid) -> Result<()> {
    let max = grid.values.iter().cloned().fold(0.0f64, f64::max);
    let mut bytes = Vec::with_capacity(grid.values.len());
    for m in 0..grid.n_x {
        for k in 0..grid.n_theta {
            let v = if max > 0.0 { grid.value(m, k) / max } else { 0.0 };
            bytes.push((v * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    let mut f = std::fs::File::create(path)?;
    write!(f, "P5\n{} {}\n255\n", grid.n_theta, grid.n_x)?;
    f.write_all(&bytes)?;
    Ok(())
}

/// Relabeling audit log, one line per event.
pub fn write_events(path: &Path, events: &[RelabelEventRecord]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    for e in events {
        let swaps: Vec<String> =
            e.transpositions.iter().map(|(p, q)| format!("({p},{q})")).collect();
        let perm: Vec<String> = e.perm_after.iter().map(|p| p.to_string()).collect();
        writeln!(f, "step={} swaps={} perm=[{}]", e.gate_step, swaps.join(""), perm.join(","))?;
    }
    Ok(())
}
