//! One explicit Allen-Cahn step,
//! `phi' = (1 + alpha) phi - alpha phi^3 + dt * lap_h(phi)`,
//! under three interchangeable backends, plus the time-loop driver.

mod driver;

pub use driver::{run, run_dual, run_dual_with, DualReport, RunReport, StepEvent, Stepper};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{fill_ghosts_slice, GridSpec, ScalarField};
use crate::params::SchemeParams;
use crate::real::Real;

/// Cross-shaped second-difference filter scaled by `dt / h^2`, so that
/// convolving it with `phi` yields `dt * lap_h(phi)` directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilKernel<T> {
    dim: usize,
    center: T,
    neighbor: T,
}

impl<T: Real> StencilKernel<T> {
    pub fn new(params: &SchemeParams) -> Self {
        let w = params.dt() / (params.h() * params.h());
        let neighbor = T::from_f64(w);
        let center = -(T::from_f64(2.0 * params.dim() as f64) * neighbor);
        StencilKernel {
            dim: params.dim(),
            center,
            neighbor,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> T {
        self.center
    }

    pub fn neighbor(&self) -> T {
        self.neighbor
    }

    /// Dense `3^dim` weight array (row-major), as a convolution library
    /// would receive it.
    pub fn weights(&self) -> Vec<T> {
        let side = 3usize;
        let len = side.pow(self.dim as u32);
        let mut w = vec![T::zero(); len];
        let mid = len / 2;
        w[mid] = self.center;
        let mut stride = 1;
        for _ in 0..self.dim {
            w[mid - stride] = self.neighbor;
            w[mid + stride] = self.neighbor;
            stride *= side;
        }
        w
    }
}

/// Pointwise coefficients shared by the optimized backends.
#[derive(Debug, Clone, Copy)]
struct Coeffs<T> {
    one_plus_alpha: T,
    alpha: T,
    kernel: StencilKernel<T>,
}

impl<T: Real> Coeffs<T> {
    fn new(params: &SchemeParams, kernel: StencilKernel<T>) -> Self {
        Coeffs {
            one_plus_alpha: T::from_f64(1.0 + params.alpha()),
            alpha: T::from_f64(params.alpha()),
            kernel,
        }
    }

    /// `conv = w * (sum of axis neighbors) + w_c * c`.
    #[inline(always)]
    fn conv(&self, c: T, neighbors: T) -> T {
        self.kernel.neighbor * neighbors + self.kernel.center * c
    }

    #[inline(always)]
    fn reaction(&self, c: T) -> T {
        self.one_plus_alpha * c - self.alpha * c * c * c
    }
}

/// `lap_h(phi)` on interior cells, computed cell by cell. Ghosts must be
/// current.
pub fn laplacian_ref<T: Real>(field: &ScalarField<T>) -> Vec<T> {
    let spec = field.spec();
    let n = spec.n();
    let h2 = T::from_f64(spec.h() * spec.h());
    let mut lap = Vec::with_capacity(spec.interior_len());
    if spec.dim() == 2 {
        let four = T::from_f64(4.0);
        for i in 1..=n[0] {
            for j in 1..=n[1] {
                let v = (field.get(&[i - 1, j])
                    + field.get(&[i + 1, j])
                    + field.get(&[i, j - 1])
                    + field.get(&[i, j + 1])
                    - four * field.get(&[i, j]))
                    / h2;
                lap.push(v);
            }
        }
    } else {
        let six = T::from_f64(6.0);
        for i in 1..=n[0] {
            for j in 1..=n[1] {
                for k in 1..=n[2] {
                    let v = (field.get(&[i - 1, j, k])
                        + field.get(&[i + 1, j, k])
                        + field.get(&[i, j - 1, k])
                        + field.get(&[i, j + 1, k])
                        + field.get(&[i, j, k - 1])
                        + field.get(&[i, j, k + 1])
                        - six * field.get(&[i, j, k]))
                        / h2;
                    lap.push(v);
                }
            }
        }
    }
    lap
}

fn check_finite<T: Real>(field: &ScalarField<T>, step: usize) -> Result<()> {
    match field.first_non_finite() {
        Some(index) => Err(Error::Divergence { step, index }),
        None => Ok(()),
    }
}

/// Reference update into `next`: Laplacian first, then a second per-cell
/// pass for the reaction term.
pub(crate) fn reference_into<T: Real>(
    cur: &ScalarField<T>,
    next: &mut ScalarField<T>,
    params: &SchemeParams,
) {
    let lap = laplacian_ref(cur);
    let alpha = T::from_f64(params.alpha());
    let dt = T::from_f64(params.dt());
    let one = T::one();
    let spec = *cur.spec();
    let n = spec.n();
    let mut idx = 0;
    if spec.dim() == 2 {
        for i in 1..=n[0] {
            for j in 1..=n[1] {
                let phi = cur.get(&[i, j]);
                let v = (one + alpha) * phi - alpha * phi * phi * phi + dt * lap[idx];
                next.set(&[i, j], v);
                idx += 1;
            }
        }
    } else {
        for i in 1..=n[0] {
            for j in 1..=n[1] {
                for k in 1..=n[2] {
                    let phi = cur.get(&[i, j, k]);
                    let v = (one + alpha) * phi - alpha * phi * phi * phi + dt * lap[idx];
                    next.set(&[i, j, k], v);
                    idx += 1;
                }
            }
        }
    }
    next.fill_ghosts();
}

/// One step of the naive per-cell backend.
pub fn step_reference<T: Real>(
    cur: &ScalarField<T>,
    params: &SchemeParams,
) -> Result<ScalarField<T>> {
    let mut next = ScalarField::zeros(*cur.spec());
    reference_into(cur, &mut next, params);
    check_finite(&next, 1)?;
    Ok(next)
}

#[inline(always)]
fn row_2d<T: Real>(out: &mut [T], up: &[T], mid: &[T], down: &[T], k: &Coeffs<T>) {
    let n = out.len();
    let up = &up[1..n + 1];
    let down = &down[1..n + 1];
    let left = &mid[..n];
    let centre = &mid[1..n + 1];
    let right = &mid[2..n + 2];
    for j in 0..n {
        let c = centre[j];
        let s = up[j] + down[j] + left[j] + right[j];
        out[j] = k.reaction(c) + k.conv(c, s);
    }
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn row_3d<T: Real>(
    out: &mut [T],
    xm: &[T],
    xp: &[T],
    ym: &[T],
    yp: &[T],
    mid: &[T],
    k: &Coeffs<T>,
) {
    let n = out.len();
    let xm = &xm[1..n + 1];
    let xp = &xp[1..n + 1];
    let ym = &ym[1..n + 1];
    let yp = &yp[1..n + 1];
    let zm = &mid[..n];
    let centre = &mid[1..n + 1];
    let zp = &mid[2..n + 2];
    for j in 0..n {
        let c = centre[j];
        let s = xm[j] + xp[j] + ym[j] + yp[j] + zm[j] + zp[j];
        out[j] = k.reaction(c) + k.conv(c, s);
    }
}

/// Fused stencil sweep over an extended buffer whose ghosts are current.
/// Output rows are independent, so the sweep runs in parallel over the
/// slowest axis; ghosts of `next` are left untouched.
fn stencil_sweep<T: Real>(spec: &GridSpec, cur: &[T], next: &mut [T], k: &Coeffs<T>) {
    let n = spec.n();
    let s = spec.strides();
    let ex = spec.ext(0);
    if spec.dim() == 2 {
        let row = s[0];
        next.par_chunks_mut(row)
            .enumerate()
            .with_min_len(4)
            .for_each(|(i, out)| {
                if i == 0 || i == ex - 1 {
                    return;
                }
                let up = &cur[(i - 1) * row..i * row];
                let mid = &cur[i * row..(i + 1) * row];
                let down = &cur[(i + 1) * row..(i + 2) * row];
                row_2d(&mut out[1..n[1] + 1], up, mid, down, k);
            });
    } else {
        let plane = s[0];
        let row = s[1];
        next.par_chunks_mut(plane).enumerate().for_each(|(i, out)| {
            if i == 0 || i == ex - 1 {
                return;
            }
            for j in 1..=n[1] {
                let at = |ii: usize, jj: usize| {
                    let o = ii * plane + jj * row;
                    &cur[o..o + row]
                };
                let dst = &mut out[j * row + 1..j * row + 1 + n[2]];
                row_3d(
                    dst,
                    at(i - 1, j),
                    at(i + 1, j),
                    at(i, j - 1),
                    at(i, j + 1),
                    at(i, j),
                    k,
                );
            }
        });
    }
}

pub(crate) fn stencil_into<T: Real>(
    cur: &ScalarField<T>,
    next: &mut ScalarField<T>,
    params: &SchemeParams,
    kernel: &StencilKernel<T>,
) {
    let spec = *cur.spec();
    let k = Coeffs::new(params, *kernel);
    stencil_sweep(&spec, cur.as_slice(), next.as_mut_slice(), &k);
    next.fill_ghosts();
}

/// One step of the fused pad+convolution backend. The persistent ghost
/// layer plays the role of the replication padding.
pub fn step_stencil<T: Real>(
    cur: &ScalarField<T>,
    params: &SchemeParams,
    kernel: &StencilKernel<T>,
) -> Result<ScalarField<T>> {
    let mut next = ScalarField::zeros(*cur.spec());
    stencil_into(cur, &mut next, params, kernel);
    check_finite(&next, 1)?;
    Ok(next)
}

/// Replication padding of a bare interior array into a freshly allocated
/// extended buffer.
pub fn pad_replicate<T: Real>(spec: &GridSpec, interior: &[T]) -> Vec<T> {
    let field = ScalarField::from_interior(*spec, interior).expect("interior sized from spec");
    let mut padded = field.as_slice().to_vec();
    fill_ghosts_slice(spec, &mut padded);
    padded
}

/// Valid cross-stencil convolution of a padded buffer; returns
/// `dt * lap_h` over the interior in row-major order.
pub fn conv_valid<T: Real>(spec: &GridSpec, padded: &[T], kernel: &StencilKernel<T>) -> Vec<T> {
    let n = spec.n();
    let s = spec.strides();
    let mut out = vec![T::zero(); spec.interior_len()];
    let last = n[spec.dim() - 1];
    let w = kernel.neighbor;
    let wc = kernel.center;
    if spec.dim() == 2 {
        out.par_chunks_mut(last).enumerate().for_each(|(r, dst)| {
            let i = r + 1;
            for (jj, v) in dst.iter_mut().enumerate() {
                let o = i * s[0] + jj + 1;
                let c = padded[o];
                let sum = padded[o - s[0]] + padded[o + s[0]] + padded[o - 1] + padded[o + 1];
                *v = w * sum + wc * c;
            }
        });
    } else {
        out.par_chunks_mut(last).enumerate().for_each(|(r, dst)| {
            let (i, j) = (r / n[1] + 1, r % n[1] + 1);
            for (kk, v) in dst.iter_mut().enumerate() {
                let o = i * s[0] + j * s[1] + kk + 1;
                let c = padded[o];
                let sum = padded[o - s[0]]
                    + padded[o + s[0]]
                    + padded[o - s[1]]
                    + padded[o + s[1]]
                    + padded[o - 1]
                    + padded[o + 1];
                *v = w * sum + wc * c;
            }
        });
    }
    out
}

pub(crate) fn padcopy_into<T: Real>(
    cur: &ScalarField<T>,
    next: &mut ScalarField<T>,
    params: &SchemeParams,
    kernel: &StencilKernel<T>,
) {
    let spec = *cur.spec();
    let k = Coeffs::new(params, *kernel);
    let phi = cur.interior();
    let padded = pad_replicate(&spec, &phi);
    let conv = conv_valid(&spec, &padded, kernel);
    let row = spec.n()[spec.dim() - 1];
    for ((dst, p), c) in next
        .interior_rows_mut()
        .zip(phi.chunks_exact(row))
        .zip(conv.chunks_exact(row))
    {
        for ((d, &p), &c) in dst.iter_mut().zip(p).zip(c) {
            *d = k.reaction(p) + c;
        }
    }
    next.fill_ghosts();
}

/// One step of the literal pad-then-convolve backend.
pub fn step_stencil_padcopy<T: Real>(
    cur: &ScalarField<T>,
    params: &SchemeParams,
    kernel: &StencilKernel<T>,
) -> Result<ScalarField<T>> {
    let mut next = ScalarField::zeros(*cur.spec());
    padcopy_into(cur, &mut next, params, kernel);
    check_finite(&next, 1)?;
    Ok(next)
}

#[cfg(test)]
mod tests;
