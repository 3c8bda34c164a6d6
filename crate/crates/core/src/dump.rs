//! Raw field dumps: a short text header followed by interior values.
//!
//! ```text
//! allencahn-field 1
//! dim 2
//! n 200 200
//! bounds 0 1 0 1
//! h 0.005
//! precision f64
//! format binary
//! end
//! <interior values, row-major, last axis fastest>
//! ```
//!
//! Binary payloads are little-endian in the stated precision; text payloads
//! hold one value per line in shortest round-trip decimal form. Both modes
//! reproduce the field bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::real::{Precision, Real};

const MAGIC: &str = "allencahn-field 1";

/// Payload encoding of a dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    Binary,
    Text,
}

impl DumpFormat {
    fn as_str(self) -> &'static str {
        match self {
            DumpFormat::Binary => "binary",
            DumpFormat::Text => "text",
        }
    }
}

fn header(spec: &GridSpec, precision: Precision, format: DumpFormat) -> String {
    let join = |v: Vec<String>| v.join(" ");
    let n = join(spec.n().iter().map(|c| c.to_string()).collect());
    let bounds = join(
        spec.bounds()
            .iter()
            .flat_map(|(a, b)| [format!("{a:?}"), format!("{b:?}")])
            .collect(),
    );
    format!(
        "{MAGIC}\ndim {}\nn {n}\nbounds {bounds}\nh {:?}\nprecision {precision}\nformat {}\nend\n",
        spec.dim(),
        spec.h(),
        format.as_str()
    )
}

/// Serializes the interior of `field`.
pub fn encode<T: Real>(field: &ScalarField<T>, format: DumpFormat) -> Vec<u8> {
    let mut out = header(field.spec(), T::PRECISION, format).into_bytes();
    match format {
        DumpFormat::Binary => {
            out.reserve(field.spec().interior_len() * T::PRECISION.byte_width());
            for v in field.interior_values() {
                v.extend_le_bytes(&mut out);
            }
        }
        DumpFormat::Text => {
            for v in field.interior_values() {
                // Debug formatting is the shortest string that round-trips.
                writeln!(out, "{v:?}").expect("writing to a Vec cannot fail");
            }
        }
    }
    out
}

/// Parsed dump header.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpHeader {
    pub spec: GridSpec,
    pub precision: Precision,
    pub format: DumpFormat,
}

fn parse_header(bytes: &[u8]) -> Result<(DumpHeader, usize)> {
    let mut pos = 0;
    let mut next_line = || -> Result<&str> {
        let rest = &bytes[pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Format("truncated header".into()))?;
        pos += end + 1;
        std::str::from_utf8(&rest[..end]).map_err(|_| Error::Format("header is not UTF-8".into()))
    };
    if next_line()? != MAGIC {
        return Err(Error::Format("missing magic line".into()));
    }
    let mut dim = None;
    let mut n: Option<Vec<usize>> = None;
    let mut bounds: Option<Vec<f64>> = None;
    let mut precision = None;
    let mut format = None;
    loop {
        let line = next_line()?;
        if line == "end" {
            break;
        }
        let (key, value) = line
            .split_once(' ')
            .ok_or_else(|| Error::Format(format!("bad header line `{line}`")))?;
        let bad = |what: &str| Error::Format(format!("bad {what} `{value}`"));
        match key {
            "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad("dim"))?),
            "n" => {
                n = Some(
                    value
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad("n"))?,
                )
            }
            "bounds" => {
                bounds = Some(
                    value
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad("bounds"))?,
                )
            }
            "h" => {
                value.parse::<f64>().map_err(|_| bad("h"))?;
            }
            "precision" => precision = Some(value.parse::<Precision>().map_err(Error::Format)?),
            "format" => {
                format = Some(match value {
                    "binary" => DumpFormat::Binary,
                    "text" => DumpFormat::Text,
                    _ => return Err(bad("format")),
                })
            }
            _ => return Err(Error::Format(format!("unknown header key `{key}`"))),
        }
    }
    let missing = |k: &str| Error::Format(format!("header lacks `{k}`"));
    let dim = dim.ok_or_else(|| missing("dim"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let flat = bounds.ok_or_else(|| missing("bounds"))?;
    if n.len() != dim || flat.len() != 2 * dim {
        return Err(Error::Format("header dimension mismatch".into()));
    }
    let pairs: Vec<(f64, f64)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
    let spec = GridSpec::new(&pairs, &n)?;
    Ok((
        DumpHeader {
            spec,
            precision: precision.ok_or_else(|| missing("precision"))?,
            format: format.ok_or_else(|| missing("format"))?,
        },
        pos,
    ))
}

/// Reads only the header of a dump.
pub fn decode_header(bytes: &[u8]) -> Result<DumpHeader> {
    parse_header(bytes).map(|(h, _)| h)
}

/// Deserializes a dump written in precision `T`; ghosts are refilled.
pub fn decode<T: Real>(bytes: &[u8]) -> Result<ScalarField<T>> {
    let (hdr, start) = parse_header(bytes)?;
    if hdr.precision != T::PRECISION {
        return Err(Error::Format(format!(
            "dump holds {} values, requested {}",
            hdr.precision,
            T::PRECISION
        )));
    }
    let payload = &bytes[start..];
    let count = hdr.spec.interior_len();
    let values: Vec<T> = match hdr.format {
        DumpFormat::Binary => {
            let w = T::PRECISION.byte_width();
            if payload.len() != count * w {
                return Err(Error::Format(format!(
                    "payload has {} bytes, expected {}",
                    payload.len(),
                    count * w
                )));
            }
            payload.chunks_exact(w).map(T::from_le_slice).collect()
        }
        DumpFormat::Text => {
            let text = std::str::from_utf8(payload)
                .map_err(|_| Error::Format("text payload is not UTF-8".into()))?;
            let values = text
                .lines()
                .map(|l| {
                    l.trim()
                        .parse::<T>()
                        .map_err(|_| Error::Format(format!("bad value `{l}`")))
                })
                .collect::<Result<Vec<T>>>()?;
            if values.len() != count {
                return Err(Error::Format(format!(
                    "payload has {} values, expected {count}",
                    values.len()
                )));
            }
            values
        }
    };
    ScalarField::from_interior(hdr.spec, &values)
}

pub fn write_dump<T: Real>(field: &ScalarField<T>, path: &Path, format: DumpFormat) -> Result<()> {
    fs::write(path, encode(field, format)).map_err(|e| Error::io(path, e))
}

pub fn read_dump<T: Real>(path: &Path) -> Result<ScalarField<T>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
