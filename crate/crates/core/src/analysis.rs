//! Measurements on fields: interface radius, the exact shrinking-radius
//! law, cross-backend error, discrete energy and phase statistics.
//!
//! All reductions run sequentially in storage order so results are
//! identical from run to run.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::params::SchemeParams;
use crate::real::Real;

/// Threshold on `|phi|` above which a cell counts as a pure phase.
pub const SEPARATED_THRESHOLD: f64 = 0.9;

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub step: usize,
    pub t: f64,
    pub radius: Option<f64>,
    pub exact_radius: Option<f64>,
    pub energy: f64,
    pub min: f64,
    pub max: f64,
    pub separated_fraction: f64,
}

/// Extremes and pure-phase share of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseStats {
    pub min: f64,
    pub max: f64,
    pub separated_fraction: f64,
}

/// Distance from `center` to the first zero crossing of `phi` along the +x
/// ray through the nearest row of cell centers, linearly interpolated.
pub fn measure_radius<T: Real>(field: &ScalarField<T>, center: &[f64]) -> Result<f64> {
    let spec = field.spec();
    if center.len() != spec.dim() {
        return Err(Error::Dimension(format!(
            "center has {} coordinates, field is {}D",
            center.len(),
            spec.dim()
        )));
    }
    let mut idx = [0usize; 3];
    let mut offset2 = 0.0;
    for axis in 1..spec.dim() {
        idx[axis] = spec.nearest_index(axis, center[axis]);
        let d = spec.center(axis, idx[axis]) - center[axis];
        offset2 += d * d;
    }
    let start = spec.nearest_index(0, center[0]);
    let n0 = spec.n()[0];
    let value = |i: usize| {
        let mut e = idx;
        e[0] = i;
        field.at(&e[..spec.dim()]).as_f64()
    };
    let h = spec.h();
    for i in start..n0 - 1 {
        let (a, b) = (value(i), value(i + 1));
        let x = if a == 0.0 {
            spec.center(0, i)
        } else if a * b < 0.0 {
            spec.center(0, i) + a / (a - b) * h
        } else {
            continue;
        };
        let dx = x - center[0];
        return Ok((dx * dx + offset2).sqrt());
    }
    Err(Error::NoInterface)
}

/// Radius under motion by mean curvature, `sqrt(r0^2 + 2 (1 - dim) t)`.
pub fn exact_radius(r0: f64, dim: usize, t: f64) -> Result<f64> {
    let arg = r0 * r0 + 2.0 * (1.0 - dim as f64) * t;
    if arg <= 0.0 {
        return Err(Error::CircleVanished(arg));
    }
    Ok(arg.sqrt())
}

/// Root mean square of the interior difference of two fields.
pub fn rms_diff<A: Real, B: Real>(a: &ScalarField<A>, b: &ScalarField<B>) -> Result<f64> {
    if a.spec() != b.spec() {
        return Err(Error::Dimension("fields live on different grids".into()));
    }
    let mut sum = 0.0;
    for (x, y) in a.interior_values().zip(b.interior_values()) {
        let d = x.as_f64() - y.as_f64();
        sum += d * d;
    }
    Ok((sum / a.spec().interior_len() as f64).sqrt())
}

/// Mean over time of the per-step RMS difference between two trajectories.
pub fn err_metric<A: Real, B: Real>(
    series_a: &[ScalarField<A>],
    series_b: &[ScalarField<B>],
) -> Result<f64> {
    if series_a.len() != series_b.len() {
        return Err(Error::Dimension(format!(
            "series lengths differ: {} vs {}",
            series_a.len(),
            series_b.len()
        )));
    }
    if series_a.is_empty() {
        return Err(Error::Dimension(
            "series must hold at least one field".into(),
        ));
    }
    let mut acc = ErrAccumulator::default();
    for (a, b) in series_a.iter().zip(series_b) {
        acc.push(a, b)?;
    }
    Ok(acc.value().expect("non-empty"))
}

/// Streaming form of [`err_metric`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ErrAccumulator {
    sum: f64,
    count: usize,
}

impl ErrAccumulator {
    pub fn push<A: Real, B: Real>(&mut self, a: &ScalarField<A>, b: &ScalarField<B>) -> Result<()> {
        self.sum += rms_diff(a, b)?;
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn value(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }
}

/// Discrete Allen-Cahn energy
/// `sum_cells [ (phi^2 - 1)^2 / (4 eps^2) + |grad_h phi|^2 / 2 ] h^dim`
/// with forward differences; the ghost layer supplies the high-face
/// neighbor, so each interior face is counted once.
pub fn energy<T: Real>(field: &ScalarField<T>, params: &SchemeParams) -> f64 {
    let spec = field.spec();
    let data = field.as_slice();
    let s = spec.strides();
    let h = spec.h();
    let inv_eps2 = 1.0 / (params.eps() * params.eps());
    let inv_h2 = 1.0 / (h * h);
    let dim = spec.dim();
    let row = spec.n()[dim - 1];
    let mut total = 0.0;
    let mut starts = Vec::new();
    let n = spec.n();
    for i in 1..=n[0] {
        if dim == 2 {
            starts.push(i * s[0]);
        } else {
            for j in 1..=n[1] {
                starts.push(i * s[0] + j * s[1]);
            }
        }
    }
    for start in starts {
        for o in start + 1..start + 1 + row {
            let phi = data[o].as_f64();
            let w = phi * phi - 1.0;
            let mut grad2 = 0.0;
            for &stride in &s[..dim] {
                let d = data[o + stride].as_f64() - phi;
                grad2 += d * d;
            }
            total += 0.25 * w * w * inv_eps2 + 0.5 * grad2 * inv_h2;
        }
    }
    total * h.powi(dim as i32)
}

pub fn phase_stats<T: Real>(field: &ScalarField<T>) -> PhaseStats {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut separated = 0usize;
    let mut count = 0usize;
    for v in field.interior_values() {
        let v = v.as_f64();
        min = min.min(v);
        max = max.max(v);
        if v.abs() > SEPARATED_THRESHOLD {
            separated += 1;
        }
        count += 1;
    }
    PhaseStats {
        min,
        max,
        separated_fraction: separated as f64 / count as f64,
    }
}
