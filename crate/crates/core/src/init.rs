//! Initial order-parameter fields.
//!
//! Every generator is a pure function of its inputs and evaluates cells
//! independently, so the output does not depend on the worker count.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::params::SchemeParams;
use crate::real::Real;

/// Which half-plane test selects the `atan` branch of the 3D star angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StarBranch {
    /// `x > 0.5`, as the published formula reads.
    #[default]
    AsPrinted,
    /// `x > 0`, centered on the 3D domain's origin.
    Origin,
}

/// One of the initial shape families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Disk of radius `r0` centered at (0.5, 0.5). 2D only.
    Circle { r0: f64 },
    /// Ball of radius `r0` centered at (0.5, 0.5, 0.5). 3D only.
    Sphere { r0: f64 },
    /// Two lobes of radius `r0` at x = 0.3 and x = 1.7 joined by a bar.
    Dumbbell { r0: f64 },
    /// Six-pointed star.
    Star { branch: StarBranch },
    /// Annulus (2D) or torus (3D) with major radius `r1`, minor radius `r2`.
    Torus { r1: f64, r2: f64 },
    /// Rectilinear square spiral.
    Maze,
    /// Uniform noise in `[-amplitude, amplitude)`.
    Random { amplitude: f64, seed: u64 },
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            InitialCondition::Circle { .. } => "circle",
            InitialCondition::Sphere { .. } => "sphere",
            InitialCondition::Dumbbell { .. } => "dumbbell",
            InitialCondition::Star { .. } => "star",
            InitialCondition::Torus { .. } => "torus",
            InitialCondition::Maze => "maze",
            InitialCondition::Random { .. } => "random",
        }
    }

    pub fn supports(&self, dim: usize) -> bool {
        match self {
            InitialCondition::Circle { .. } => dim == 2,
            InitialCondition::Sphere { .. } => dim == 3,
            _ => dim == 2 || dim == 3,
        }
    }

    /// Center used for radius measurement, when the shape has one.
    pub fn center(&self) -> Option<Vec<f64>> {
        match self {
            InitialCondition::Circle { .. } => Some(vec![0.5, 0.5]),
            InitialCondition::Sphere { .. } => Some(vec![0.5, 0.5, 0.5]),
            _ => None,
        }
    }

    /// Initial radius for shapes that follow the shrinking-radius law.
    pub fn initial_radius(&self) -> Option<f64> {
        match *self {
            InitialCondition::Circle { r0 } | InitialCondition::Sphere { r0 } => Some(r0),
            _ => None,
        }
    }

    /// Validates the parameters against a grid without generating a field.
    pub fn check(&self, spec: &GridSpec, params: &SchemeParams) -> Result<()> {
        if !self.supports(spec.dim()) {
            return Err(Error::Dimension(format!(
                "{} initial condition does not support {}D grids",
                self.name(),
                spec.dim()
            )));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        match *self {
            InitialCondition::Circle { r0 }
            | InitialCondition::Sphere { r0 }
            | InitialCondition::Dumbbell { r0 } => positive("r0", r0),
            InitialCondition::Torus { r1, r2 } => {
                positive("r1", r1)?;
                positive("r2", r2)?;
                if spec.dim() == 2 && r2 >= r1 {
                    return Err(Error::Parameter(format!(
                        "2D torus needs r2 < r1, got r1={r1}, r2={r2}"
                    )));
                }
                Ok(())
            }
            InitialCondition::Random { amplitude, .. } => {
                if amplitude > 0.0 && amplitude <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!(
                        "amplitude must lie in (0, 1], got {amplitude}"
                    )))
                }
            }
            InitialCondition::Maze => SpiralLayout::for_grid(spec, params).map(|_| ()),
            InitialCondition::Star { .. } => Ok(()),
        }
    }

    /// Generates the field with ghosts filled.
    pub fn generate<T: Real>(
        &self,
        spec: &GridSpec,
        params: &SchemeParams,
    ) -> Result<ScalarField<T>> {
        self.check(spec, params)?;
        let eps = params.eps();
        match *self {
            InitialCondition::Circle { r0 } => init_circle(spec, eps, r0),
            InitialCondition::Sphere { r0 } => init_sphere(spec, eps, r0),
            InitialCondition::Dumbbell { r0 } => init_dumbbell(spec, eps, r0),
            InitialCondition::Star { branch } => init_star(spec, eps, branch),
            InitialCondition::Torus { r1, r2 } => init_torus(spec, eps, r1, r2),
            InitialCondition::Maze => init_maze(spec, params),
            InitialCondition::Random { amplitude, seed } => init_random(spec, amplitude, seed),
        }
    }
}

fn require_dim(spec: &GridSpec, dim: usize, what: &str) -> Result<()> {
    if spec.dim() == dim {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{what} needs a {dim}D grid, got {}D",
            spec.dim()
        )))
    }
}

/// Evaluates `f` at every interior cell center, in parallel over rows.
fn sample<T: Real, F>(spec: &GridSpec, f: F) -> ScalarField<T>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = spec.n();
    let row = n[n.len() - 1];
    let mid = if spec.dim() == 3 { n[1] } else { 1 };
    let mut interior = vec![T::zero(); spec.interior_len()];
    interior
        .par_chunks_mut(row)
        .enumerate()
        .for_each(|(r, out)| {
            let mut x = [0.0; 3];
            x[0] = spec.center(0, r / mid);
            if spec.dim() == 3 {
                x[1] = spec.center(1, r % mid);
            }
            let last = spec.dim() - 1;
            for (j, v) in out.iter_mut().enumerate() {
                x[last] = spec.center(last, j);
                *v = T::from_f64(f(&x[..spec.dim()]));
            }
        });
    ScalarField::from_interior(*spec, &interior).expect("interior sized from spec")
}

fn profile(signed_distance: f64, eps: f64) -> f64 {
    (signed_distance / (SQRT_2 * eps)).tanh()
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter()
        .zip(c)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `tanh((r0 - r) / (sqrt(2) eps))` around (0.5, 0.5).
pub fn init_circle<T: Real>(spec: &GridSpec, eps: f64, r0: f64) -> Result<ScalarField<T>> {
    require_dim(spec, 2, "circle")?;
    Ok(sample(spec, |x| profile(r0 - dist(x, &[0.5, 0.5]), eps)))
}

/// `tanh((r0 - r) / (sqrt(2) eps))` around (0.5, 0.5, 0.5).
pub fn init_sphere<T: Real>(spec: &GridSpec, eps: f64, r0: f64) -> Result<ScalarField<T>> {
    require_dim(spec, 3, "sphere")?;
    Ok(sample(spec, |x| {
        profile(r0 - dist(x, &[0.5, 0.5, 0.5]), eps)
    }))
}

/// Pointwise dumbbell value; exposed for tests.
pub fn dumbbell_value(x: &[f64], eps: f64, r0: f64) -> f64 {
    let in_bar = x[0] > 0.4 && x[0] < 1.6 && x[1..].iter().all(|&c| c > 0.4 && c < 0.6);
    if in_bar {
        return 1.0;
    }
    let cross: f64 = x[1..].iter().map(|c| (c - 0.5) * (c - 0.5)).sum();
    let d1 = ((x[0] - 0.3).powi(2) + cross).sqrt();
    let d2 = ((x[0] - 1.7).powi(2) + cross).sqrt();
    1.0 + profile(r0 - d1, eps) + profile(r0 - d2, eps)
}

pub fn init_dumbbell<T: Real>(spec: &GridSpec, eps: f64, r0: f64) -> Result<ScalarField<T>> {
    if !(spec.dim() == 2 || spec.dim() == 3) {
        return Err(Error::Dimension("dumbbell needs a 2D or 3D grid".into()));
    }
    Ok(sample(spec, |x| dumbbell_value(x, eps, r0)))
}

/// Angle used by the star profile: `atan(dy/dx)` on the positive branch,
/// shifted by pi otherwise.
fn star_angle(dy: f64, dx: f64, positive_branch: bool) -> f64 {
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    let a = (dy / dx).atan();
    if positive_branch {
        a
    } else {
        PI + a
    }
}

/// Pointwise star value; exposed for tests.
pub fn star_value(x: &[f64], eps: f64, branch: StarBranch) -> f64 {
    if x.len() == 2 {
        let (dx, dy) = (x[0] - 0.5, x[1] - 0.5);
        let theta = star_angle(dy, dx, x[0] > 0.5);
        let r = (dx * dx + dy * dy).sqrt();
        profile(0.25 + 0.1 * (6.0 * theta).cos() - r, eps)
    } else {
        let cut = match branch {
            StarBranch::AsPrinted => 0.5,
            StarBranch::Origin => 0.0,
        };
        let theta = star_angle(x[2], x[0], x[0] > cut);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        profile(0.7 + 0.2 * (6.0 * theta).cos() - r, eps)
    }
}

/// Star centered at (0.5, 0.5) in 2D and at the origin in 3D.
pub fn init_star<T: Real>(spec: &GridSpec, eps: f64, branch: StarBranch) -> Result<ScalarField<T>> {
    if !(spec.dim() == 2 || spec.dim() == 3) {
        return Err(Error::Dimension("star needs a 2D or 3D grid".into()));
    }
    Ok(sample(spec, |x| star_value(x, eps, branch)))
}

/// Pointwise torus value; exposed for tests.
pub fn torus_value(x: &[f64], eps: f64, r1: f64, r2: f64) -> f64 {
    if x.len() == 2 {
        let rho = dist(x, &[0.5, 0.5]);
        -1.0 + profile(r1 - rho, eps) - profile(r2 - rho, eps)
    } else {
        let ring = (x[0] * x[0] + x[1] * x[1]).sqrt() - r1;
        let s = (x[2] * x[2] + ring * ring).sqrt() - r2;
        -profile(s, eps)
    }
}

/// Annulus around (0.5, 0.5) in 2D; torus around the z axis through the
/// origin in 3D, with the tube as the +1 phase.
pub fn init_torus<T: Real>(spec: &GridSpec, eps: f64, r1: f64, r2: f64) -> Result<ScalarField<T>> {
    if !(spec.dim() == 2 || spec.dim() == 3) {
        return Err(Error::Dimension("torus needs a 2D or 3D grid".into()));
    }
    if spec.dim() == 2 && r2 >= r1 {
        return Err(Error::Parameter(format!(
            "2D torus needs r2 < r1, got r1={r1}, r2={r2}"
        )));
    }
    Ok(sample(spec, |x| torus_value(x, eps, r1, r2)))
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer (Steele, Lea and Flood).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform value in `[-1, 1)` for interior cell `index` under `seed`.
///
/// This is the `index`-th output of a SplitMix64 stream seeded with `seed`
/// (state `seed + (index + 1) * 0x9E3779B97F4A7C15`), mapped through the top
/// 53 bits. Evaluating it per cell keeps the field independent of iteration
/// order.
pub fn uniform_sym(seed: u64, index: u64) -> f64 {
    let bits = mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)));
    let unit = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    2.0 * unit - 1.0
}

/// `amplitude * u` with `u` uniform in `[-1, 1)`, one draw per interior cell
/// in row-major order.
pub fn init_random<T: Real>(spec: &GridSpec, amplitude: f64, seed: u64) -> Result<ScalarField<T>> {
    if !(amplitude > 0.0 && amplitude <= 1.0) {
        return Err(Error::Parameter(format!(
            "amplitude must lie in (0, 1], got {amplitude}"
        )));
    }
    let mut interior = vec![T::zero(); spec.interior_len()];
    interior
        .par_iter_mut()
        .enumerate()
        .for_each(|(i, v)| *v = T::from_f64(amplitude * uniform_sym(seed, i as u64)));
    ScalarField::from_interior(*spec, &interior)
}

/// Geometry of the square-spiral maze, in cells.
///
/// Walls are `stripe` cells wide and repeat every `pitch` cells, so the
/// corridors between them are `pitch - stripe` wide. The outermost wall is
/// inset from the domain edge by one corridor width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpiralLayout {
    pub stripe: usize,
    pub pitch: usize,
    pub margin: usize,
    pub rings: usize,
}

impl SpiralLayout {
    /// Stripe width is three interface thicknesses (floored to whole cells,
    /// at least 2), pitch is `8m/5` cells rounded.
    pub fn for_grid(spec: &GridSpec, params: &SchemeParams) -> Result<Self> {
        let eps_cells = params.eps() / spec.h();
        let stripe = ((3.0 * eps_cells).floor() as usize).max(2);
        let pitch = ((8.0 * params.m() as f64 / 5.0).round() as usize).max(stripe + 1);
        let gap = pitch - stripe;
        let margin = gap;
        let (nx, ny) = (spec.n()[0], spec.n()[1]);
        let mut rings = 0;
        loop {
            let inset = 2 * (margin + rings * pitch);
            if nx < inset || ny < inset {
                break;
            }
            let (wx, wy) = (nx - inset, ny - inset);
            if wx < 2 * stripe + gap || wy < 2 * stripe + gap {
                break;
            }
            rings += 1;
        }
        // Each ring contributes four 90-degree turns minus the final one.
        if rings == 0 {
            return Err(Error::Parameter(format!(
                "grid {:?} too small for a spiral with {stripe}-cell walls at {pitch}-cell pitch",
                spec.n()
            )));
        }
        Ok(SpiralLayout {
            stripe,
            pitch,
            margin,
            rings,
        })
    }

    /// Number of 90-degree turns along the wall.
    pub fn turns(&self) -> usize {
        4 * self.rings - 1
    }

    /// Wall cells over an `nx x ny` plane (x slow, y fast).
    pub fn mask(&self, nx: usize, ny: usize) -> Vec<bool> {
        let mut mask = vec![false; nx * ny];
        let mut rect = |x0: usize, x1: usize, y0: usize, y1: usize| {
            for x in x0..x1.min(nx) {
                for y in y0..y1.min(ny) {
                    mask[x * ny + y] = true;
                }
            }
        };
        let (w, p) = (self.stripe, self.pitch);
        for k in 0..self.rings {
            let (a, b) = (self.margin + k * p, nx - self.margin - k * p);
            let (c, d) = (self.margin + k * p, ny - self.margin - k * p);
            // top wall reaches back to the previous ring's left wall
            let start = if k == 0 { a } else { a - p };
            rect(start, b, d - w, d);
            rect(b - w, b, c, d);
            rect(a, b, c, c + w);
            rect(a, a + w, c, d - p);
        }
        mask
    }
}

/// Signed distance in cells from each cell center to the boundary of
/// `mask`, positive inside. Searches a window of `radius` cells and
/// saturates at `radius` beyond it.
fn signed_cell_distance(mask: &[bool], nx: usize, ny: usize, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let mut out = vec![0.0; nx * ny];
    out.par_chunks_mut(ny).enumerate().for_each(|(x, row)| {
        for (y, v) in row.iter_mut().enumerate() {
            let inside = mask[x * ny + y];
            let mut best = f64::INFINITY;
            for dx in -r..=r {
                let xx = x as isize + dx;
                if xx < 0 || xx >= nx as isize {
                    continue;
                }
                for dy in -r..=r {
                    let yy = y as isize + dy;
                    if yy < 0 || yy >= ny as isize {
                        continue;
                    }
                    if mask[xx as usize * ny + yy as usize] != inside {
                        let d = ((dx * dx + dy * dy) as f64).sqrt();
                        if d < best {
                            best = d;
                        }
                    }
                }
            }
            let d = if best.is_finite() {
                best - 0.5
            } else {
                radius as f64
            };
            *v = if inside { d } else { -d };
        }
    });
    out
}

/// Wall cells of the maze over the whole interior (before smoothing).
pub fn maze_mask(spec: &GridSpec, params: &SchemeParams) -> Result<Vec<bool>> {
    let layout = SpiralLayout::for_grid(spec, params)?;
    let n = spec.n();
    let plane = layout.mask(n[0], n[1]);
    if spec.dim() == 2 {
        return Ok(plane);
    }
    let nz = n[2];
    let (lo, hi) = (nz / 4, 3 * nz / 4);
    Ok(plane
        .iter()
        .flat_map(|&p| (0..nz).map(move |k| p && k >= lo && k < hi))
        .collect())
}

/// Square spiral of +1 walls on a -1 background, smoothed with
/// `tanh(2 sd / (sqrt(2) eps))` where `sd` is the signed distance to the
/// wall boundary. In 3D the plane pattern is extruded over the middle half
/// of the z axis.
pub fn init_maze<T: Real>(spec: &GridSpec, params: &SchemeParams) -> Result<ScalarField<T>> {
    let layout = SpiralLayout::for_grid(spec, params)?;
    let n = spec.n();
    let (nx, ny) = (n[0], n[1]);
    let h = spec.h();
    let eps = params.eps();
    // tanh saturates to 1.0 in f64 once its argument exceeds ~19.1
    let radius = (19.5 * SQRT_2 * eps / (2.0 * h)).ceil() as usize + 1;
    let plane = signed_cell_distance(&layout.mask(nx, ny), nx, ny, radius);
    let smooth = |sd_cells: f64| (2.0 * sd_cells * h / (SQRT_2 * eps)).tanh();
    let interior: Vec<T> = if spec.dim() == 2 {
        plane.iter().map(|&sd| T::from_f64(smooth(sd))).collect()
    } else {
        let nz = n[2];
        let (lo, hi) = ((nz / 4) as f64, (3 * nz / 4) as f64);
        plane
            .iter()
            .flat_map(|&sd_xy| {
                (0..nz).map(move |k| {
                    let zc = k as f64 + 0.5;
                    let sd_z = (zc - lo).min(hi - zc);
                    let sd = if sd_xy > 0.0 && sd_z > 0.0 {
                        sd_xy.min(sd_z)
                    } else if sd_xy < 0.0 && sd_z < 0.0 {
                        -(sd_xy * sd_xy + sd_z * sd_z).sqrt()
                    } else {
                        sd_xy.min(sd_z)
                    };
                    T::from_f64(smooth(sd))
                })
            })
            .collect()
    };
    ScalarField::from_interior(*spec, &interior)
}
