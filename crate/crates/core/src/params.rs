//! Scheme parameters: interface thickness, time step and the stability guard.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::init::InitialCondition;
use crate::real::Precision;

/// `atanh(0.9) = ln(19) / 2`, to full double precision.
pub const ATANH_0_9: f64 = 1.472_219_489_583_220_2;

/// Time step as a multiple of `h^2` used by every experiment.
pub const DT_PER_H2: f64 = 0.1;

/// Default interface cell count in 2D.
pub const DEFAULT_M_2D: u32 = 10;
/// Default interface cell count in 3D.
pub const DEFAULT_M_3D: u32 = 12;

pub fn default_m(dim: usize) -> u32 {
    if dim == 3 {
        DEFAULT_M_3D
    } else {
        DEFAULT_M_2D
    }
}

/// Interface thickness such that the `tanh` profile goes from -0.9 to 0.9
/// across `m` cells of size `h`.
pub fn epsilon_m(h: f64, m: u32) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!("h must be positive, got {h}")));
    }
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    Ok(h * m as f64 / (2.0 * std::f64::consts::SQRT_2 * ATANH_0_9))
}

/// Largest stable explicit time step, `h^2 / (2 dim)`.
pub fn max_stable_dt(h: f64, dim: usize) -> f64 {
    h * h / (2.0 * dim as f64)
}

/// Validated parameters of the explicit update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    eps: f64,
    m: u32,
    dt: f64,
    alpha: f64,
    h: f64,
    dim: usize,
}

impl SchemeParams {
    /// Parameters with a user-chosen time step. Fails if `dt` breaks the
    /// explicit diffusion limit.
    pub fn with_dt(spec: &GridSpec, m: u32, dt: f64) -> Result<Self> {
        let h = spec.h();
        let eps = epsilon_m(h, m)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
        }
        let limit = max_stable_dt(h, spec.dim());
        if dt > limit {
            return Err(Error::Config(format!(
                "dt = {dt:e} exceeds the explicit stability limit h^2/(2*{}) = {limit:e}",
                spec.dim()
            )));
        }
        Ok(SchemeParams {
            eps,
            m,
            dt,
            alpha: dt / (eps * eps),
            h,
            dim: spec.dim(),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    /// `dt / eps^2`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// `dt = 0.1 h^2`, `eps = epsilon_m(h, m)`.
pub fn default_params(spec: &GridSpec, m: u32) -> Result<SchemeParams> {
    SchemeParams::with_dt(spec, m, DT_PER_H2 * spec.h() * spec.h())
}

/// Which step implementation drives a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Per-cell loops over the interior; the oracle.
    Reference,
    /// Fused cross-stencil over a persistent ghost layer, parallel over rows.
    Stencil,
    /// Literal pad-then-convolve: a replicated copy is materialized each step.
    StencilPadcopy,
}

impl Backend {
    pub const ALL: [Backend; 3] = [
        Backend::Reference,
        Backend::StencilPadcopy,
        Backend::Stencil,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Reference => "reference",
            Backend::Stencil => "stencil",
            Backend::StencilPadcopy => "stencil-padcopy",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reference" => Ok(Backend::Reference),
            "stencil" => Ok(Backend::Stencil),
            "stencil-padcopy" | "padcopy" => Ok(Backend::StencilPadcopy),
            other => Err(format!(
                "unknown backend `{other}` (expected reference, stencil or stencil-padcopy)"
            )),
        }
    }
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub params: SchemeParams,
    pub init: InitialCondition,
    pub n_steps: usize,
    /// Emit a snapshot every this many steps; `None` disables snapshots.
    pub snapshot_stride: Option<usize>,
    pub diagnostics_stride: usize,
    pub backend: Backend,
    pub precision: Precision,
}

impl RunConfig {
    /// Config with `dt = 0.1 h^2`, stencil backend, f64, and a diagnostics
    /// stride of 1/100 of the run.
    pub fn new(grid: GridSpec, m: u32, init: InitialCondition, n_steps: usize) -> Result<Self> {
        let cfg = RunConfig {
            grid,
            params: default_params(&grid, m)?,
            init,
            n_steps,
            snapshot_stride: None,
            diagnostics_stride: (n_steps / 100).max(1),
            backend: Backend::Stencil,
            precision: Precision::F64,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if self.diagnostics_stride == 0 || self.snapshot_stride == Some(0) {
            return Err(Error::Config("strides must be at least 1".into()));
        }
        if self.params.dim() != self.grid.dim() || self.params.h() != self.grid.h() {
            return Err(Error::Config(
                "scheme parameters were derived for a different grid".into(),
            ));
        }
        self.init.check(&self.grid, &self.params)
    }

    /// Simulated end time `n_steps * dt`.
    pub fn final_time(&self) -> f64 {
        self.n_steps as f64 * self.params.dt()
    }
}
