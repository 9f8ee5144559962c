//! Run artifacts and plot-ready exports.
//!
//! A run directory holds `modes.stsm`, `intensity.stsm`, optionally
//! `sweep.stsm`, plus `spectrum.csv`, `summary.json` and `sweep.csv`
//! rendered from them. Every file starts with (or carries) the SHA-256 of
//! the run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{Trend, SweepTable};
use crate::container::{Container, Record};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::schmidt::{Check, SchmidtResult};

pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const MODES: &str = "modes.stsm";
pub const INTENSITY: &str = "intensity.stsm";
pub const SUMMARY: &str = "summary.json";
pub const SWEEP: &str = "sweep.stsm";
pub const SWEEP_CSV: &str = "sweep.csv";

const HASH_KEY: &str = "config_sha256";
const SPECTRUM_COLS: usize = 7;

fn io_at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_at(path, e))
}

fn read_container(path: &Path) -> Result<Container> {
    if !path.exists() {
        return Err(Error::Lookup(format!("artifact {} does not exist", path.display())));
    }
    Container::read(path)
}

pub fn mode_name(l: usize, m: usize) -> String {
    format!("mode:l={l},m={m}")
}

fn axes(c: &mut Container, grid: &GridSpec) -> Result<()> {
    c.push(Record::real("q", &[grid.n_q], (0..grid.n_q).map(|i| grid.q(i)).collect())?);
    c.push(Record::real("omega", &[grid.n_omega], (0..grid.n_omega).map(|i| grid.omega(i)).collect())?);
    Ok(())
}

fn opt(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

/// Modes, spectrum table and axes. `nonsep[j]` belongs to `result.entries[j]`.
pub fn modes_container(result: &SchmidtResult, nonsep: &[f64], hash: &str) -> Result<Container> {
    if nonsep.len() != result.len() {
        return Err(Error::Config(format!("{} separability values for {} modes", nonsep.len(), result.len())));
    }
    let grid = &result.grid;
    let mut c = Container::new();
    c.push(Record::meta(HASH_KEY, hash));
    axes(&mut c, grid)?;
    let mut table = Vec::with_capacity(result.len() * SPECTRUM_COLS);
    for (e, s) in result.entries.iter().zip(nonsep) {
        table.extend([e.l as f64, e.m as f64, e.degeneracy as f64, e.lambda, opt(e.beta), opt(e.phase_residual), *s]);
    }
    c.push(Record::real("spectrum", &[result.len(), SPECTRUM_COLS], table)?);
    c.push(Record::real("schmidt_number", &[1], vec![result.k])?);
    for (e, u) in result.entries.iter().zip(&result.modes) {
        c.push(Record::complex(mode_name(e.l, e.m), &[grid.n_q, grid.n_omega], u)?);
    }
    Ok(c)
}

/// `I(q, omega)` and its mirror `I(q_x, omega)` over `q_x = -q ... q`.
pub fn intensity_container(intensity: &[f64], grid: &GridSpec, hash: &str) -> Result<Container> {
    if intensity.len() != grid.dim() {
        return Err(Error::Config(format!("intensity has {} samples, grid has {}", intensity.len(), grid.dim())));
    }
    let (nq, nw) = (grid.n_q, grid.n_omega);
    let mut c = Container::new();
    c.push(Record::meta(HASH_KEY, hash));
    axes(&mut c, grid)?;
    c.push(Record::real("intensity", &[nq, nw], intensity.to_vec())?);
    let qx: Vec<f64> = (0..nq).rev().map(|i| -grid.q(i)).chain((0..nq).map(|i| grid.q(i))).collect();
    let mut mirror = Vec::with_capacity(2 * nq * nw);
    for iq in (0..nq).rev().chain(0..nq) {
        mirror.extend((0..nw).map(|iw| intensity[grid.index(iq, iw)]));
    }
    c.push(Record::real("q_x", &[2 * nq], qx)?);
    c.push(Record::real("intensity_x", &[2 * nq, nw], mirror)?);
    Ok(c)
}

pub fn sweep_container(table: &SweepTable, hash: &str) -> Result<Container> {
    let mut c = Container::new();
    c.push(Record::meta(HASH_KEY, hash));
    c.push(Record::meta("axis", table.axis.name()));
    c.push(Record::meta("method", &format!("{:?}", table.method).to_lowercase()));
    c.push(Record::meta("trend", trend_name(table.trend)));
    let flat = table.rows.iter().flat_map(|r| [r.value, r.k, r.side]).collect();
    c.push(Record::real("sweep", &[table.rows.len(), 3], flat)?);
    Ok(c)
}

fn trend_name(t: Trend) -> &'static str {
    match t {
        Trend::Increasing => "increasing",
        Trend::Decreasing => "decreasing",
        Trend::NonMonotone => "non-monotone",
    }
}

fn csv_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

/// CSV rendering of the `spectrum` record.
pub fn spectrum_csv(c: &Container) -> Result<String> {
    let rec = c.get("spectrum")?;
    if rec.dims.len() != 2 || rec.dims[1] != SPECTRUM_COLS as u64 {
        return Err(Error::Lookup(format!("spectrum record has shape {:?}", rec.dims)));
    }
    let mut s = String::new();
    writeln!(s, "# {HASH_KEY}={}", c.meta(HASH_KEY).unwrap_or("")).unwrap();
    s.push_str("l,m,degeneracy,lambda,beta,phase_residual,nonseparability\n");
    for row in rec.data.chunks_exact(SPECTRUM_COLS) {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            row[0] as u64,
            row[1] as u64,
            row[2] as u64,
            csv_num(row[3]),
            csv_num(row[4]),
            csv_num(row[5]),
            csv_num(row[6])
        )
        .unwrap();
    }
    Ok(s)
}

pub fn sweep_csv(c: &Container) -> Result<String> {
    let rec = c.get("sweep")?;
    let axis = c.meta("axis").unwrap_or("value");
    let mut s = String::new();
    writeln!(s, "# {HASH_KEY}={}", c.meta(HASH_KEY).unwrap_or("")).unwrap();
    writeln!(s, "# method={} trend={}", c.meta("method").unwrap_or(""), c.meta("trend").unwrap_or("")).unwrap();
    writeln!(s, "{axis},k,side").unwrap();
    for row in rec.data.chunks_exact(3) {
        writeln!(s, "{},{},{}", csv_num(row[0]), csv_num(row[1]), csv_num(row[2])).unwrap();
    }
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config_sha256: String,
    pub regime: String,
    pub schmidt_number: f64,
    /// From the correlation integral, independent of truncation.
    pub schmidt_number_g1: f64,
    pub lambda_sum: f64,
    /// Weight retained by truncation before renormalization.
    pub captured: f64,
    pub retained_modes: usize,
    /// Largest window-edge marginal intensity relative to the peak.
    pub boundary_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrated_intensity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_error: Option<f64>,
    pub invariants: Vec<Check>,
    pub invariants_pass: bool,
}

pub struct RunArtifacts<'a> {
    pub hash: &'a str,
    pub result: &'a SchmidtResult,
    pub nonseparability: &'a [f64],
    pub intensity: &'a [f64],
    pub summary: &'a Summary,
}

/// Writes a decomposition run into `dir`; returns the files written.
pub fn write_run(dir: &Path, run: &RunArtifacts) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))?;
    let modes = modes_container(run.result, run.nonseparability, run.hash)?;
    let inten = intensity_container(run.intensity, &run.result.grid, run.hash)?;
    let files = [dir.join(MODES), dir.join(INTENSITY), dir.join(SPECTRUM_CSV), dir.join(SUMMARY)];
    modes.write(&files[0])?;
    inten.write(&files[1])?;
    write_text(&files[2], &spectrum_csv(&modes)?)?;
    let json = serde_json::to_string_pretty(run.summary).map_err(|e| Error::Numerical(format!("summary: {e}")))?;
    write_text(&files[3], &(json + "\n"))?;
    Ok(files.to_vec())
}

pub fn write_sweep(dir: &Path, table: &SweepTable, hash: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))?;
    let c = sweep_container(table, hash)?;
    let files = [dir.join(SWEEP), dir.join(SWEEP_CSV)];
    c.write(&files[0])?;
    write_text(&files[1], &sweep_csv(&c)?)?;
    Ok(files.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportWhat {
    Spectrum,
    Mode { l: usize, m: usize },
    Intensity,
    Sweep,
}

impl std::str::FromStr for ExportWhat {
    type Err = Error;

    /// `spectrum`, `intensity`, `sweep` or `mode:L,M`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown export target '{s}' (spectrum | intensity | sweep | mode:L,M)"));
        match s {
            "spectrum" => Ok(ExportWhat::Spectrum),
            "intensity" => Ok(ExportWhat::Intensity),
            "sweep" => Ok(ExportWhat::Sweep),
            _ => {
                let (l, m) = s.strip_prefix("mode:").and_then(|r| r.split_once(',')).ok_or_else(bad)?;
                Ok(ExportWhat::Mode { l: l.trim().parse().map_err(|_| bad())?, m: m.trim().parse().map_err(|_| bad())? })
            }
        }
    }
}

/// Extracts one product of run directory `run` into `out`.
pub fn export(run: &Path, what: ExportWhat, out: &Path) -> Result<()> {
    match what {
        ExportWhat::Spectrum => write_text(out, &spectrum_csv(&read_container(&run.join(MODES))?)?),
        ExportWhat::Sweep => write_text(out, &sweep_csv(&read_container(&run.join(SWEEP))?)?),
        ExportWhat::Intensity => read_container(&run.join(INTENSITY))?.write(out),
        ExportWhat::Mode { l, m } => {
            let src = read_container(&run.join(MODES))?;
            let mut c = Container::new();
            for name in ["q", "omega"] {
                c.push(src.get(name)?.clone());
            }
            if let Some(h) = src.meta(HASH_KEY) {
                c.records.insert(0, Record::meta(HASH_KEY, h));
            }
            c.push(src.get(&mode_name(l, m))?.clone());
            c.write(out)
        }
    }
}

/// Ridge of a signed intensity map `[q_x][omega]`: for each frequency
/// column, the `q_x >= 0` index of the maximum.
pub fn ridge(map: &[f64], n_qx: usize, n_omega: usize) -> Vec<usize> {
    let half = n_qx / 2;
    (0..n_omega)
        .map(|iw| {
            (half..n_qx).max_by(|&a, &b| map[a * n_omega + iw].total_cmp(&map[b * n_omega + iw])).unwrap_or(half) - half
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::{Regime, SchmidtEntry};
    use num_complex::Complex64 as C64;

    fn toy() -> SchmidtResult {
        let grid = GridSpec::new(2, 3, 4, 1e5, 2.6e15, 1e14).unwrap();
        let w = grid.weights();
        let mode = |k: usize| -> Vec<C64> {
            let raw: Vec<C64> = (0..grid.dim()).map(|mu| if mu == k { C64::new(0.0, 1.0) } else { C64::new(0.0, 0.0) }).collect();
            raw.iter().zip(&w).map(|(x, w)| x / w.sqrt()).collect()
        };
        SchmidtResult {
            regime: Regime::LowGain,
            grid: grid.clone(),
            entries: vec![
                SchmidtEntry { l: 0, m: 0, lambda: 0.6, degeneracy: 1, beta: Some(0.5), phase_residual: Some(1e-12) },
                SchmidtEntry { l: 1, m: 0, lambda: 0.2, degeneracy: 2, beta: None, phase_residual: None },
            ],
            modes: vec![mode(0), mode(4)],
            k: 1.0 / (0.36 + 0.08),
            captured: 1.0,
        }
    }

    #[test]
    fn spectrum_rows_match_entries() {
        let r = toy();
        let c = modes_container(&r, &[1.0, 1.5], "deadbeef").unwrap();
        let csv = spectrum_csv(&c).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# config_sha256=deadbeef");
        assert_eq!(lines.len(), 2 + r.len());
        assert!(lines[3].starts_with("1,0,2,2.0000000000000001e-1,,,"));
    }

    #[test]
    fn mode_export_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let r = toy();
        let c = modes_container(&r, &[1.0, 1.0], "h").unwrap();
        c.write(&dir.path().join(MODES)).unwrap();
        let out = dir.path().join("m.stsm");
        export(dir.path(), ExportWhat::Mode { l: 1, m: 0 }, &out).unwrap();
        let back = Container::read(&out).unwrap();
        let z = back.get(&mode_name(1, 0)).unwrap().complex_data().unwrap();
        assert_eq!(z, r.modes[1]);
        assert_eq!(back.meta(HASH_KEY), Some("h"));
        assert!(matches!(export(dir.path(), ExportWhat::Mode { l: 3, m: 0 }, &out), Err(Error::Lookup(_))));
        assert!(matches!(export(dir.path(), ExportWhat::Intensity, &out), Err(Error::Lookup(_))));
    }

    #[test]
    fn mirrored_intensity() {
        let grid = GridSpec::new(2, 3, 4, 1e5, 2.6e15, 1e14).unwrap();
        let i: Vec<f64> = (0..6).map(|x| x as f64).collect();
        let c = intensity_container(&i, &grid, "h").unwrap();
        let m = &c.get("intensity_x").unwrap().data;
        assert_eq!(m, &vec![3.0, 4.0, 5.0, 0.0, 1.0, 2.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(ridge(m, 4, 3), vec![1, 1, 1]);
    }

    #[test]
    fn export_targets_parse() {
        assert_eq!("mode:2,3".parse::<ExportWhat>().unwrap(), ExportWhat::Mode { l: 2, m: 3 });
        assert_eq!("spectrum".parse::<ExportWhat>().unwrap(), ExportWhat::Spectrum);
        assert!("mode:2".parse::<ExportWhat>().is_err());
        assert!("modes".parse::<ExportWhat>().is_err());
    }
}
