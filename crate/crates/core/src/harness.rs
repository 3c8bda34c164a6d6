//! Benchmark harness: best-of-r timings per backend laid out like the
//! published runtime tables, and cross-backend error rows.
//!
//! Ratios are relative to the fastest backend of each preset, the way the
//! published tables normalize to their fastest (GPU) row. Absolute times
//! are hardware-specific and not comparable to the published ones.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::params::{Backend, RunConfig};
use crate::preset::ExperimentPreset;
use crate::real::Precision;
use crate::stepper::{run, run_dual_with};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub preset: String,
    pub backend: Backend,
    pub steps: usize,
    pub wall_seconds: f64,
    pub steps_per_second: f64,
    /// `reference_seconds / wall_seconds`.
    pub speedup_vs_reference: f64,
    /// `wall_seconds / fastest_seconds` within the same preset.
    pub ratio_to_fastest: f64,
}

/// Fastest stepping-loop time over `reps` runs. Diagnostics are only taken
/// at the ends so the untimed work stays small.
pub fn time_backend(config: &RunConfig, backend: Backend, reps: usize) -> Result<f64> {
    if reps == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    let mut cfg = config.clone();
    cfg.backend = backend;
    cfg.diagnostics_stride = cfg.n_steps;
    cfg.snapshot_stride = None;
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let secs = match cfg.precision {
            Precision::F64 => run::<f64, _>(&cfg, |_| Ok(()))?.wall_seconds,
            Precision::F32 => run::<f32, _>(&cfg, |_| Ok(()))?.wall_seconds,
        };
        best = best.min(secs);
    }
    Ok(best)
}

/// Times every backend in `backends` on one configuration.
pub fn bench_config(
    name: &str,
    config: &RunConfig,
    backends: &[Backend],
    reps: usize,
) -> Result<Vec<BenchRecord>> {
    let mut times = Vec::with_capacity(backends.len());
    for &b in backends {
        times.push((b, time_backend(config, b, reps)?));
    }
    let fastest = times.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let reference = times
        .iter()
        .find(|t| t.0 == Backend::Reference)
        .map(|t| t.1);
    Ok(times
        .into_iter()
        .map(|(backend, secs)| BenchRecord {
            preset: name.to_string(),
            backend,
            steps: config.n_steps,
            wall_seconds: secs,
            steps_per_second: config.n_steps as f64 / secs,
            speedup_vs_reference: reference.map_or(f64::NAN, |r| r / secs),
            ratio_to_fastest: secs / fastest,
        })
        .collect())
}

pub fn bench_preset(
    preset: &ExperimentPreset,
    scale: usize,
    precision: Precision,
    backends: &[Backend],
    reps: usize,
) -> Result<Vec<BenchRecord>> {
    let mut cfg = preset.to_config(scale)?;
    cfg.precision = precision;
    bench_config(preset.name, &cfg, backends, reps)
}

/// Records grouped per preset, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct BenchTable {
    pub records: Vec<BenchRecord>,
}

impl BenchTable {
    fn presets(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.records {
            if !names.contains(&r.preset.as_str()) {
                names.push(&r.preset);
            }
        }
        names
    }

    fn backends(&self) -> Vec<Backend> {
        Backend::ALL
            .into_iter()
            .filter(|b| self.records.iter().any(|r| r.backend == *b))
            .collect()
    }

    fn find(&self, preset: &str, backend: Backend) -> Option<&BenchRecord> {
        self.records
            .iter()
            .find(|r| r.preset == preset && r.backend == backend)
    }

    /// Presets as columns, backends as rows, `seconds(ratio)` cells; the
    /// fastest backend's cell carries no ratio.
    pub fn render_text(&self) -> String {
        let presets = self.presets();
        let width = 18;
        let mut out = String::new();
        let _ = write!(out, "{:<16}", "");
        for p in &presets {
            let _ = write!(out, "{p:>width$}");
        }
        out.push('\n');
        let _ = write!(out, "{:<16}", "iterations");
        for p in &presets {
            let steps = self
                .records
                .iter()
                .find(|r| r.preset == *p)
                .map_or(0, |r| r.steps);
            let _ = write!(out, "{steps:>width$}");
        }
        out.push('\n');
        for b in self.backends() {
            let _ = write!(out, "{:<16}", b.as_str());
            for p in &presets {
                let cell = match self.find(p, b) {
                    Some(r) if r.ratio_to_fastest == 1.0 => format!("{:.3}", r.wall_seconds),
                    Some(r) => format!("{:.3}({:.2})", r.wall_seconds, r.ratio_to_fastest),
                    None => "-".into(),
                };
                let _ = write!(out, "{cell:>width$}");
            }
            out.push('\n');
        }
        out
    }

    /// One row per preset: seconds and ratio for each backend.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let backends = self.backends();
        let mut csv = csv::Writer::from_writer(w);
        let mut header = vec!["preset".to_string(), "iterations".to_string()];
        for b in &backends {
            header.push(format!("{}_seconds", b.as_str()));
            header.push(format!("{}_ratio", b.as_str()));
        }
        let io = |e: csv::Error| Error::Format(e.to_string());
        csv.write_record(&header).map_err(io)?;
        for p in self.presets() {
            let steps = self
                .records
                .iter()
                .find(|r| r.preset == p)
                .map_or(0, |r| r.steps);
            let mut row = vec![p.to_string(), steps.to_string()];
            for &b in &backends {
                match self.find(p, b) {
                    Some(r) => {
                        row.push(format!("{:.6}", r.wall_seconds));
                        row.push(format!("{:.4}", r.ratio_to_fastest));
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            csv.write_record(&row).map_err(io)?;
        }
        csv.flush().map_err(|e| Error::io("bench csv", e))
    }
}

/// Column order of the published error table.
pub const TABLE3_ORDER: [&str; 6] = ["separation", "dumbbell", "circle", "maze", "star", "torus"];

/// One dimension's row of cross-backend errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Table3Row {
    pub dim: usize,
    pub pair: (Precision, Precision),
    /// `(preset name, Err)` in [`TABLE3_ORDER`].
    pub errors: Vec<(String, f64)>,
}

fn table3_rank(p: &ExperimentPreset) -> usize {
    let family = p.init.name();
    let family = if family == "sphere" {
        "circle"
    } else if family == "random" {
        "separation"
    } else {
        family
    };
    TABLE3_ORDER
        .iter()
        .position(|f| *f == family)
        .unwrap_or(TABLE3_ORDER.len())
}

/// Reference backend in `pair.0` against stencil in `pair.1` for each
/// preset, accumulating the error every `err_stride` steps.
pub fn table3_row<'a>(
    presets: impl IntoIterator<Item = &'a ExperimentPreset>,
    scale: usize,
    pair: (Precision, Precision),
    err_stride: usize,
) -> Result<Table3Row> {
    let mut presets: Vec<&ExperimentPreset> = presets.into_iter().collect();
    presets.sort_by_key(|p| table3_rank(p));
    let dim = presets.first().map_or(0, |p| p.dim());
    let mut errors = Vec::new();
    for p in presets {
        let mut cfg = p.to_config(scale)?;
        cfg.diagnostics_stride = cfg.n_steps;
        let (a, b) = (Backend::Reference, Backend::Stencil);
        let err = match pair {
            (Precision::F64, Precision::F64) => {
                run_dual_with::<f64, f64>(&cfg, a, b, err_stride)?.err
            }
            (Precision::F64, Precision::F32) => {
                run_dual_with::<f64, f32>(&cfg, a, b, err_stride)?.err
            }
            (Precision::F32, Precision::F64) => {
                run_dual_with::<f32, f64>(&cfg, a, b, err_stride)?.err
            }
            (Precision::F32, Precision::F32) => {
                run_dual_with::<f32, f32>(&cfg, a, b, err_stride)?.err
            }
        };
        errors.push((p.name.to_string(), err));
    }
    Ok(Table3Row { dim, pair, errors })
}

impl Table3Row {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<12}", format!("{}/{}", self.pair.0, self.pair.1));
        for (name, _) in &self.errors {
            let _ = write!(out, "{name:>14}");
        }
        out.push('\n');
        let _ = write!(out, "{:<12}", format!("{}D", self.dim));
        for (_, err) in &self.errors {
            let _ = write!(out, "{:>14}", format!("{err:.3e}"));
        }
        out.push('\n');
        out
    }
}
