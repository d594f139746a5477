//! File formats for objects, frames and reconstructions.
//!
//! Three formats cover all artifacts:
//!
//! - 16-bit binary portable graymaps (magic `P5`, big-endian samples,
//!   maxval 65535) for quick-look images. The physical scale rides in two
//!   header comments, `# pitch_m <value>` and `# white_level <value>`:
//!   a sample of 65535 means `white_level` in physical units. Objects use
//!   white level 1.0, camera frames 2.0 (the brightest ideal value).
//! - CSV grids (RFC 4180: comma separators, CRLF record ends) holding
//!   full-precision values; numbers are written in Rust's shortest
//!   round-trip form, so writing is deterministic and reading is exact.
//! - Atomic file writes: content goes to a temporary file in the target
//!   directory which is renamed into place, so readers never observe a
//!   partially written file.

use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{CameraFrame, GridError, ObjectMap};

/// White level used when writing object magnitudes.
pub const OBJECT_WHITE_LEVEL: f64 = 1.0;
/// White level used when writing camera frames (the brightest ideal
/// frame value).
pub const FRAME_WHITE_LEVEL: f64 = 2.0;

const PGM_MAXVAL: u32 = 65535;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    File(#[from] std::io::Error),
    #[error("loaded grid is invalid: {0}")]
    Grid(#[from] GridError),
    #[error("graymap: {0}")]
    BadGraymap(String),
    #[error("csv record {line}: {reason}")]
    BadCsv { line: usize, reason: String },
    #[error("magnitude grid is {mag_rows}x{mag_cols} but phase grid is {phase_rows}x{phase_cols}")]
    CsvPairMismatch {
        mag_rows: usize,
        mag_cols: usize,
        phase_rows: usize,
        phase_cols: usize,
    },
    #[error("graymap carries no '# pitch_m' header comment")]
    MissingPitch,
    #[error("graymap values must be finite with positive pitch and white level")]
    BadLevels,
}

/// A decoded graymap: values in physical units plus the header metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Graymap {
    pub values: Array2<f64>,
    pub pitch_m: Option<f64>,
    pub white_level: f64,
}

/// Encodes a value grid as a 16-bit binary graymap. Values are scaled so
/// `white_level` maps to the maximum sample; out-of-range values clamp.
pub fn pgm_bytes(values: &Array2<f64>, pitch_m: f64, white_level: f64) -> Result<Vec<u8>, IoError> {
    if !(white_level.is_finite() && white_level > 0.0)
        || !(pitch_m.is_finite() && pitch_m > 0.0)
        || values.iter().any(|v| !v.is_finite())
    {
        return Err(IoError::BadLevels);
    }
    let (ny, nx) = values.dim();
    let mut out = Vec::with_capacity(96 + 2 * ny * nx);
    let header =
        format!("P5\n# pitch_m {pitch_m}\n# white_level {white_level}\n{nx} {ny}\n{PGM_MAXVAL}\n");
    out.extend_from_slice(header.as_bytes());
    let max = f64::from(PGM_MAXVAL);
    for v in values.iter() {
        let sample = (v / white_level * max).round().clamp(0.0, max) as u16;
        out.extend_from_slice(&sample.to_be_bytes());
    }
    Ok(out)
}

/// Pulls the next whitespace-separated header token, collecting `#`
/// comment lines along the way.
fn next_token<'a>(
    bytes: &'a [u8],
    pos: &mut usize,
    comments: &mut Vec<String>,
) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            let start = *pos + 1;
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            comments.push(
                String::from_utf8_lossy(&bytes[start..*pos])
                    .trim()
                    .to_string(),
            );
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn parse_header_number(token: &[u8], what: &str) -> Result<u32, IoError> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| IoError::BadGraymap(format!("bad {what}")))
}

/// Value of a `<key> <number>` comment, if present.
fn comment_value(comments: &[String], key: &str) -> Option<f64> {
    comments.iter().find_map(|c| {
        let rest = c.strip_prefix(key)?;
        rest.trim().parse::<f64>().ok()
    })
}

/// Decodes a 16-bit binary graymap written by [`pgm_bytes`] (or any
/// standard P5 file with maxval 65535).
pub fn parse_pgm(bytes: &[u8]) -> Result<Graymap, IoError> {
    let mut pos = 0;
    let mut comments = Vec::new();
    let magic = next_token(bytes, &mut pos, &mut comments)
        .ok_or_else(|| IoError::BadGraymap("missing magic number".into()))?;
    if magic != b"P5" {
        return Err(IoError::BadGraymap(format!(
            "expected magic P5, got {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = next_token(bytes, &mut pos, &mut comments)
        .ok_or_else(|| IoError::BadGraymap("missing width".into()))
        .and_then(|t| parse_header_number(t, "width"))?;
    let height = next_token(bytes, &mut pos, &mut comments)
        .ok_or_else(|| IoError::BadGraymap("missing height".into()))
        .and_then(|t| parse_header_number(t, "height"))?;
    let maxval = next_token(bytes, &mut pos, &mut comments)
        .ok_or_else(|| IoError::BadGraymap("missing maxval".into()))
        .and_then(|t| parse_header_number(t, "maxval"))?;
    if maxval != PGM_MAXVAL {
        return Err(IoError::BadGraymap(format!(
            "expected 16-bit maxval {PGM_MAXVAL}, got {maxval}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(IoError::BadGraymap("empty image".into()));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(IoError::BadGraymap("missing raster separator".into()));
    }
    pos += 1;

    let (nx, ny) = (width as usize, height as usize);
    let expected = 2 * nx * ny;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(IoError::BadGraymap(format!(
            "raster holds {} bytes, expected {expected}",
            raster.len()
        )));
    }
    let white_level = comment_value(&comments, "white_level").unwrap_or(1.0);
    if !(white_level.is_finite() && white_level > 0.0) {
        return Err(IoError::BadLevels);
    }
    let max = f64::from(PGM_MAXVAL);
    let values = Array2::from_shape_fn((ny, nx), |(row, col)| {
        let at = 2 * (row * nx + col);
        let sample = u16::from_be_bytes([raster[at], raster[at + 1]]);
        f64::from(sample) / max * white_level
    });
    Ok(Graymap {
        values,
        pitch_m: comment_value(&comments, "pitch_m"),
        white_level,
    })
}

/// Encodes a value grid as CSV with CRLF record ends. Numbers use the
/// shortest representation that round-trips exactly.
pub fn grid_to_csv(values: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in values.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
            first = false;
        }
        out.push_str("\r\n");
    }
    out
}

/// Decodes a rectangular CSV grid of numbers (CRLF or LF record ends).
pub fn grid_from_csv(text: &str) -> Result<Array2<f64>, IoError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let mut row = Vec::new();
        for field in line.split(',') {
            let value = field.trim().parse::<f64>().map_err(|_| IoError::BadCsv {
                line: index + 1,
                reason: format!("bad number {field:?}"),
            })?;
            row.push(value);
        }
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(IoError::BadCsv {
                    line: index + 1,
                    reason: format!("{} fields, expected {}", row.len(), prev.len()),
                });
            }
        }
        rows.push(row);
    }
    let ny = rows.len();
    if ny == 0 {
        return Err(IoError::BadCsv {
            line: 1,
            reason: "no records".into(),
        });
    }
    let nx = rows[0].len();
    Ok(Array2::from_shape_fn((ny, nx), |(r, c)| rows[r][c]))
}

/// Object magnitude as a graymap with white level 1.0.
pub fn object_to_pgm(object: &ObjectMap) -> Result<Vec<u8>, IoError> {
    let magnitude = object.data().map(|z| z.norm());
    pgm_bytes(&magnitude, object.pitch(), OBJECT_WHITE_LEVEL)
}

/// Loads an object from a graymap: sample values become transmittance
/// magnitudes, the phase is zero, and the pitch must be present in the
/// header.
pub fn object_from_pgm(bytes: &[u8]) -> Result<ObjectMap, IoError> {
    let gray = parse_pgm(bytes)?;
    let pitch = gray.pitch_m.ok_or(IoError::MissingPitch)?;
    let data = gray.values.map(|&m| Complex64::new(m, 0.0));
    Ok(ObjectMap::new(data, pitch)?)
}

/// Object transmittance as a (magnitude CSV, phase CSV) pair.
pub fn object_to_csv_pair(object: &ObjectMap) -> (String, String) {
    let magnitude = object.data().map(|z| z.norm());
    let phase = object
        .data()
        .map(|z| if z.norm() == 0.0 { 0.0 } else { z.arg() });
    (grid_to_csv(&magnitude), grid_to_csv(&phase))
}

/// Loads an object from a magnitude/phase CSV pair.
pub fn object_from_csv_pair(
    magnitude_csv: &str,
    phase_csv: &str,
    pitch_m: f64,
) -> Result<ObjectMap, IoError> {
    let magnitude = grid_from_csv(magnitude_csv)?;
    let phase = grid_from_csv(phase_csv)?;
    if magnitude.dim() != phase.dim() {
        return Err(IoError::CsvPairMismatch {
            mag_rows: magnitude.nrows(),
            mag_cols: magnitude.ncols(),
            phase_rows: phase.nrows(),
            phase_cols: phase.ncols(),
        });
    }
    let data = Array2::from_shape_fn(magnitude.dim(), |at| {
        Complex64::from_polar(magnitude[at], phase[at])
    });
    Ok(ObjectMap::new(data, pitch_m)?)
}

/// Camera frame as a graymap with white level 2.0.
pub fn frame_to_pgm(frame: &CameraFrame) -> Result<Vec<u8>, IoError> {
    pgm_bytes(frame.data(), frame.pitch(), FRAME_WHITE_LEVEL)
}

/// Camera frame as a full-precision CSV grid.
pub fn frame_to_csv(frame: &CameraFrame) -> String {
    grid_to_csv(frame.data())
}

/// Rebuilds a camera frame from its CSV grid plus the metadata that the
/// grid itself does not carry.
pub fn frame_from_csv(text: &str, pitch_m: f64, phase_rad: f64) -> Result<CameraFrame, IoError> {
    let data = grid_from_csv(text)?;
    Ok(CameraFrame::new(data, pitch_m, phase_rad)?)
}

/// Writes bytes to `path` atomically: the content lands in a temporary
/// file in the same directory and is renamed over the target, so a
/// failure never leaves a partial file behind.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| IoError::File(e.error))?;
    Ok(())
}
