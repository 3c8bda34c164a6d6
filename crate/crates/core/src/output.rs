//! Diagnostics CSV and grayscale snapshot images.
//!
//! Snapshots are binary PGM (`P5`): the header `P5\n<width> <height>\n255\n`
//! followed by one byte per pixel, row by row from the top. The image's
//! rows run along the first grid axis and its columns along the second, so
//! pixel (r, c) is interior cell (r, c). `phi = -1` maps to 0 (black),
//! `phi = +1` to 255 (white), linearly and clamped. 3D fields are sliced at
//! the middle index of the last axis.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::analysis::Diagnostics;
use crate::dump::{write_dump, DumpFormat};
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::real::Real;

/// Streams diagnostics rows to a CSV file.
pub struct DiagnosticsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl DiagnosticsWriter<File> {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(file))
    }
}

impl<W: Write> DiagnosticsWriter<W> {
    pub fn new(writer: W) -> Self {
        DiagnosticsWriter {
            inner: csv::Writer::from_writer(writer),
        }
    }

    pub fn write(&mut self, row: &Diagnostics) -> Result<()> {
        self.inner.serialize(row).map_err(csv_error)
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner
            .flush()
            .map_err(|e| Error::io("diagnostics csv", e))?;
        self.inner
            .into_inner()
            .map_err(|e| Error::io("diagnostics csv", e.into_error()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("diagnostics csv", io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// Writes all rows to `path` in one go.
pub fn write_diagnostics(path: &Path, rows: &[Diagnostics]) -> Result<()> {
    let mut w = DiagnosticsWriter::create(path)?;
    for row in rows {
        w.write(row)?;
    }
    w.finish().map(|_| ())
}

fn gray(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    ((v.clamp(-1.0, 1.0) + 1.0) * 127.5).round() as u8
}

/// Pixel rows of the image for `field` (the z-midplane in 3D).
pub fn snapshot_pixels<T: Real>(field: &ScalarField<T>) -> (usize, usize, Vec<u8>) {
    let spec = field.spec();
    let n = spec.n();
    let (rows, cols) = (n[0], n[1]);
    let mut pixels = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let v = if spec.dim() == 2 {
                field.at(&[i, j])
            } else {
                field.at(&[i, j, n[2] / 2])
            };
            pixels.push(gray(v.as_f64()));
        }
    }
    (cols, rows, pixels)
}

pub fn encode_pgm<T: Real>(field: &ScalarField<T>) -> Vec<u8> {
    let (width, height, pixels) = snapshot_pixels(field);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    out
}

pub fn write_snapshot<T: Real>(field: &ScalarField<T>, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_pgm(field))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Writes `<stem>.pgm` and the binary dump `<stem>.field` into `dir`.
pub fn write_snapshot_pair<T: Real>(field: &ScalarField<T>, dir: &Path, stem: &str) -> Result<()> {
    write_snapshot(field, &dir.join(format!("{stem}.pgm")))?;
    write_dump(
        field,
        &dir.join(format!("{stem}.field")),
        DumpFormat::Binary,
    )
}
