//! Uniform cell-centered grids and fields carrying a one-cell ghost layer.
//!
//! Indices are 0-based. Interior cell `i` on an axis with lower bound `a`
//! has its center at `a + (i + 0.5) h`; in the extended (ghosted) index
//! space the same cell sits at `i + 1`, and extended index `e` maps to
//! `a + (e - 0.5) h`.
//!
//! Storage is one contiguous buffer over the extended grid, row-major with
//! the last axis fastest, so `x` is the slowest axis.

use crate::error::{Error, Result};
use crate::real::Real;

const ISOTROPY_TOL: f64 = 1e-12;

/// Geometry of a uniform 2D or 3D grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    lower: [f64; 3],
    upper: [f64; 3],
    n: [usize; 3],
    h: f64,
}

impl GridSpec {
    /// Builds a grid from per-axis `(lower, upper)` bounds and interior cell
    /// counts. Spacing must be the same on every axis.
    pub fn new(bounds: &[(f64, f64)], n: &[usize]) -> Result<Self> {
        let dim = bounds.len();
        if !(dim == 2 || dim == 3) {
            return Err(Error::Dimension(format!(
                "grids are 2D or 3D, got {dim} axes"
            )));
        }
        if n.len() != dim {
            return Err(Error::Dimension(format!(
                "{} bounds but {} cell counts",
                dim,
                n.len()
            )));
        }
        let mut spec = GridSpec {
            dim,
            lower: [0.0; 3],
            upper: [0.0; 3],
            n: [1; 3],
            h: 0.0,
        };
        for (axis, (&(a, b), &count)) in bounds.iter().zip(n).enumerate() {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::Parameter(format!(
                    "axis {axis}: invalid interval ({a}, {b})"
                )));
            }
            if count < 3 {
                return Err(Error::Parameter(format!(
                    "axis {axis}: need at least 3 cells, got {count}"
                )));
            }
            spec.lower[axis] = a;
            spec.upper[axis] = b;
            spec.n[axis] = count;
        }
        let h = (spec.upper[0] - spec.lower[0]) / spec.n[0] as f64;
        for axis in 1..dim {
            let ha = (spec.upper[axis] - spec.lower[axis]) / spec.n[axis] as f64;
            if ((ha - h) / h).abs() > ISOTROPY_TOL {
                return Err(Error::Parameter(format!(
                    "anisotropic spacing: axis 0 has h={h}, axis {axis} has h={ha}"
                )));
            }
        }
        spec.h = h;
        Ok(spec)
    }

    /// Unit square `(0,1)^2` with `n x n` cells.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(&[(0.0, 1.0), (0.0, 1.0)], &[n, n])
    }

    /// Unit cube `(0,1)^3` with `n^3` cells.
    pub fn unit_cube(n: usize) -> Result<Self> {
        Self::new(&[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)], &[n, n, n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Interior cell counts, one per axis.
    pub fn n(&self) -> &[usize] {
        &self.n[..self.dim]
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower[..self.dim]
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper[..self.dim]
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.lower()
            .iter()
            .copied()
            .zip(self.upper().iter().copied())
            .collect()
    }

    /// Extended (ghosted) length along `axis`.
    pub fn ext(&self, axis: usize) -> usize {
        self.n[axis] + 2
    }

    pub fn interior_len(&self) -> usize {
        self.n().iter().product()
    }

    pub fn extended_len(&self) -> usize {
        (0..self.dim).map(|a| self.ext(a)).product()
    }

    /// Domain measure `|Omega|`.
    pub fn volume(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.upper[a] - self.lower[a])
            .product()
    }

    /// Center coordinate of interior cell `i` (0-based) on `axis`.
    #[inline]
    pub fn center(&self, axis: usize, i: usize) -> f64 {
        self.lower[axis] + (i as f64 + 0.5) * self.h
    }

    /// Coordinate of extended index `e` (0-based, ghost at 0) on `axis`.
    #[inline]
    pub fn extended_coord(&self, axis: usize, e: usize) -> f64 {
        self.lower[axis] + (e as f64 - 0.5) * self.h
    }

    /// Interior index whose center is nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, axis: usize, x: f64) -> usize {
        let f = ((x - self.lower[axis]) / self.h - 0.5).round();
        f.clamp(0.0, (self.n[axis] - 1) as f64) as usize
    }

    /// Strides of the extended buffer (last axis fastest).
    pub fn strides(&self) -> [usize; 3] {
        match self.dim {
            2 => [self.ext(1), 1, 0],
            _ => [self.ext(1) * self.ext(2), self.ext(2), 1],
        }
    }

    /// Linear offset of an extended multi-index.
    #[inline]
    pub fn offset(&self, ext_idx: &[usize]) -> usize {
        let s = self.strides();
        ext_idx.iter().zip(s.iter()).map(|(i, s)| i * s).sum()
    }

    /// Same grid with every cell count divided by `scale` (domain unchanged).
    pub fn coarsened(&self, scale: usize) -> Result<Self> {
        if scale == 0 {
            return Err(Error::Parameter("scale must be at least 1".into()));
        }
        let n: Vec<usize> = self.n().iter().map(|&c| c / scale).collect();
        for (&orig, &c) in self.n().iter().zip(&n) {
            if c * scale != orig {
                return Err(Error::Parameter(format!(
                    "cell count {orig} is not divisible by scale {scale}"
                )));
            }
        }
        GridSpec::new(&self.bounds(), &n)
    }
}

/// Interior cell-center coordinates, one vector per axis.
pub fn cell_centers(spec: &GridSpec) -> Vec<Vec<f64>> {
    (0..spec.dim())
        .map(|axis| (0..spec.n()[axis]).map(|i| spec.center(axis, i)).collect())
        .collect()
}

/// The order parameter on the extended grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    spec: GridSpec,
    data: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    /// Field of zeros, ghosts included.
    pub fn zeros(spec: GridSpec) -> Self {
        ScalarField {
            spec,
            data: vec![T::zero(); spec.extended_len()],
        }
    }

    /// Field filled with a constant everywhere, ghosts included.
    pub fn constant(spec: GridSpec, value: T) -> Self {
        ScalarField {
            spec,
            data: vec![value; spec.extended_len()],
        }
    }

    /// Copies `interior` (row-major, last axis fastest) into a new field and
    /// fills the ghost layer.
    pub fn from_interior(spec: GridSpec, interior: &[T]) -> Result<Self> {
        if interior.len() != spec.interior_len() {
            return Err(Error::Dimension(format!(
                "interior has {} values, grid {:?} needs {}",
                interior.len(),
                spec.n(),
                spec.interior_len()
            )));
        }
        let mut field = Self::zeros(spec);
        let row = spec.n()[spec.dim() - 1];
        for (dst, src) in field.interior_rows_mut().zip(interior.chunks_exact(row)) {
            dst.copy_from_slice(src);
        }
        field.fill_ghosts();
        Ok(field)
    }

    /// Wraps an extended buffer as-is. Ghosts are not refreshed.
    pub fn from_extended(spec: GridSpec, data: Vec<T>) -> Result<Self> {
        if data.len() != spec.extended_len() {
            return Err(Error::Dimension(format!(
                "extended buffer has {} values, grid needs {}",
                data.len(),
                spec.extended_len()
            )));
        }
        Ok(ScalarField { spec, data })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// The whole extended buffer.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Value at an extended multi-index.
    #[inline]
    pub fn get(&self, ext_idx: &[usize]) -> T {
        self.data[self.spec.offset(ext_idx)]
    }

    #[inline]
    pub fn set(&mut self, ext_idx: &[usize], v: T) {
        let o = self.spec.offset(ext_idx);
        self.data[o] = v;
    }

    /// Value at an interior multi-index (0-based interior coordinates).
    #[inline]
    pub fn at(&self, idx: &[usize]) -> T {
        let mut e = [0usize; 3];
        for (d, &i) in idx.iter().enumerate() {
            e[d] = i + 1;
        }
        self.get(&e[..self.spec.dim()])
    }

    /// Iterates the interior rows (runs along the last axis) in storage order.
    pub fn interior_rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        let row = self.spec.n()[self.spec.dim() - 1];
        interior_row_starts(&self.spec).map(move |start| &self.data[start + 1..start + 1 + row])
    }

    pub fn interior_rows_mut(&mut self) -> impl Iterator<Item = &mut [T]> + '_ {
        let spec = self.spec;
        let row = spec.n()[spec.dim() - 1];
        let last = spec.ext(spec.dim() - 1);
        let mut starts = interior_row_starts(&spec).peekable();
        self.data
            .chunks_exact_mut(last)
            .enumerate()
            .filter_map(move |(chunk_idx, chunk)| {
                let start = chunk_idx * last;
                if starts.peek() == Some(&start) {
                    starts.next();
                    Some(&mut chunk[1..1 + row])
                } else {
                    None
                }
            })
    }

    /// Interior values as a fresh row-major vector.
    pub fn interior(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.spec.interior_len());
        for row in self.interior_rows() {
            out.extend_from_slice(row);
        }
        out
    }

    /// Interior values in storage order.
    pub fn interior_values(&self) -> impl Iterator<Item = T> + '_ {
        self.interior_rows().flat_map(|r| r.iter().copied())
    }

    /// Converts the field to another precision.
    pub fn cast<U: Real>(&self) -> ScalarField<U> {
        ScalarField {
            spec: self.spec,
            data: self.data.iter().map(|v| U::from_f64(v.as_f64())).collect(),
        }
    }

    /// Zero-Neumann boundary: replicate the adjacent interior layer into
    /// every ghost cell, axis by axis (x, then y, then z). Each pass spans
    /// the full extended range of the other axes, so edge and corner ghosts
    /// end up equal to the nearest interior corner.
    pub fn fill_ghosts(&mut self) {
        fill_ghosts_slice(&self.spec, &mut self.data);
    }

    /// First interior cell holding a non-finite value, as an interior index.
    pub fn first_non_finite(&self) -> Option<Vec<usize>> {
        let n = self.spec.n();
        let row = n[n.len() - 1];
        for (r, values) in self.interior_rows().enumerate() {
            if let Some(j) = values.iter().position(|v| !v.is_finite()) {
                let mut idx = Vec::with_capacity(n.len());
                if n.len() == 3 {
                    idx.push(r / n[1]);
                    idx.push(r % n[1]);
                } else {
                    idx.push(r);
                }
                idx.push(j);
                debug_assert!(j < row);
                return Some(idx);
            }
        }
        None
    }
}

/// Offsets of the ghost cell preceding each interior row, in storage order.
fn interior_row_starts(spec: &GridSpec) -> impl Iterator<Item = usize> {
    let s = spec.strides();
    let n = spec.n().to_vec();
    let dim = spec.dim();
    let outer = n[0];
    let mid = if dim == 3 { n[1] } else { 1 };
    (0..outer).flat_map(move |i| {
        (0..mid).map(move |j| {
            if dim == 3 {
                (i + 1) * s[0] + (j + 1) * s[1]
            } else {
                (i + 1) * s[0]
            }
        })
    })
}

/// Ghost fill on a raw extended buffer laid out per `spec`.
pub(crate) fn fill_ghosts_slice<T: Copy>(spec: &GridSpec, data: &mut [T]) {
    let dim = spec.dim();
    let ext: Vec<usize> = (0..dim).map(|a| spec.ext(a)).collect();
    let strides = spec.strides();
    for axis in 0..dim {
        let stride = strides[axis];
        let len = ext[axis];
        // Blocks: product of extents before `axis`; inner run: stride.
        let outer: usize = ext[..axis].iter().product();
        let block = len * stride;
        for b in 0..outer {
            let base = b * block;
            // low face: layer 0 <- layer 1
            data.copy_within(base + stride..base + 2 * stride, base);
            // high face: layer len-1 <- layer len-2
            let hi = base + (len - 1) * stride;
            data.copy_within(hi - stride..hi, hi);
        }
    }
}
