//! DTED (Digital Terrain Elevation Data) tiles.
//!
//! A file is a fixed 80-byte User Header Label (`UHL1`), a 648-byte Data Set
//! Identification block, a 2700-byte Accuracy Description block, then one data
//! record per longitude line, west to east:
//!
//! | bytes      | content                                           |
//! |------------|---------------------------------------------------|
//! | 1          | sentinel `0xAA`                                   |
//! | 3          | block count, big-endian                           |
//! | 2          | longitude count, big-endian                       |
//! | 2          | latitude count, big-endian (always 0)             |
//! | 2 × points | elevations south to north, sign-magnitude i16 BE  |
//! | 4          | unsigned byte sum of everything above, BE         |
//!
//! The DSI and ACC blocks are written as space-filled placeholders and skipped
//! on read; only the UHL carries geometry.

use thiserror::Error;

use crate::raster::{ElevationGrid, GeoBounds, GridError, DEFAULT_NODATA};

pub const UHL_LEN: usize = 80;
pub const DSI_LEN: usize = 648;
pub const ACC_LEN: usize = 2700;
pub const HEADER_LEN: usize = UHL_LEN + DSI_LEN + ACC_LEN;
pub const RECORD_SENTINEL: u8 = 0xAA;

/// Tenths of an arc-second per degree.
const TENTHS_PER_DEGREE: f64 = 36_000.0;

/// DTED null elevation, `0xFFFF` on disk.
pub const DTED_NULL: i16 = -32767;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DtedError {
    #[error("DTED format error: {0}")]
    Format(String),
    #[error("DTED checksum mismatch in record {record}: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum {
        record: usize,
        stored: u32,
        computed: u32,
    },
    #[error("elevation {value} at row {row}, column {col} cannot be stored in DTED")]
    Range { row: usize, col: usize, value: f64 },
    #[error("cannot encode grid as DTED: {0}")]
    Unencodable(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Geometry fields of the User Header Label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtedHeader {
    /// Longitude of the south-west corner, degrees.
    pub origin_lon: f64,
    /// Latitude of the south-west corner, degrees.
    pub origin_lat: f64,
    /// Longitude interval in tenths of arc-seconds.
    pub lon_interval: u32,
    /// Latitude interval in tenths of arc-seconds.
    pub lat_interval: u32,
    /// Number of longitude lines (grid columns).
    pub lon_lines: usize,
    /// Number of latitude points per line (grid rows).
    pub lat_points: usize,
}

impl DtedHeader {
    pub fn record_len(&self) -> usize {
        record_len(self.lat_points)
    }

    pub fn file_len(&self) -> usize {
        HEADER_LEN + self.lon_lines * self.record_len()
    }

    pub fn bounds(&self) -> Result<GeoBounds, GridError> {
        let west = self.origin_lon;
        let south = self.origin_lat;
        let east = west + (self.lon_lines - 1) as f64 * self.lon_interval as f64 / TENTHS_PER_DEGREE;
        let north =
            south + (self.lat_points - 1) as f64 * self.lat_interval as f64 / TENTHS_PER_DEGREE;
        GeoBounds::new(west, east, south, north)
    }
}

fn record_len(lat_points: usize) -> usize {
    8 + 2 * lat_points + 4
}

/// What to do when a record checksum does not match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChecksumPolicy {
    #[default]
    Verify,
    /// Log a warning and keep the record.
    Warn,
}

pub fn decode_sign_magnitude(raw: u16) -> i16 {
    let magnitude = (raw & 0x7FFF) as i16;
    if raw & 0x8000 != 0 {
        -magnitude
    } else {
        magnitude
    }
}

pub fn encode_sign_magnitude(value: i16) -> u16 {
    debug_assert!(value != i16::MIN);
    if value < 0 {
        0x8000 | value.unsigned_abs()
    } else {
        value as u16
    }
}

/// Unsigned sum of `bytes`, wrapping at 32 bits.
pub fn record_checksum(bytes: &[u8]) -> u32 {
    bytes
        .iter()
        .fold(0u32, |acc, &b| acc.wrapping_add(u32::from(b)))
}

pub fn read_header(bytes: &[u8]) -> Result<DtedHeader, DtedError> {
    if bytes.len() < UHL_LEN {
        return Err(DtedError::Format(format!(
            "file is {} bytes, shorter than the {UHL_LEN}-byte header label",
            bytes.len()
        )));
    }
    let uhl = &bytes[..UHL_LEN];
    if &uhl[0..4] != b"UHL1" {
        return Err(DtedError::Format("missing UHL1 header label".into()));
    }
    let origin_lon = parse_angle(&uhl[4..12], b'E', b'W')?;
    let origin_lat = parse_angle(&uhl[12..20], b'N', b'S')?;
    let lon_interval = parse_count(&uhl[20..24], "longitude interval")?;
    let lat_interval = parse_count(&uhl[24..28], "latitude interval")?;
    let lon_lines = parse_count(&uhl[47..51], "longitude line count")?;
    let lat_points = parse_count(&uhl[51..55], "latitude point count")?;
    if lon_interval == 0 || lat_interval == 0 {
        return Err(DtedError::Format("zero data interval".into()));
    }
    if lon_lines < 2 || lat_points < 2 {
        return Err(DtedError::Format(format!(
            "tile must have at least 2 x 2 posts (got {lat_points} x {lon_lines})"
        )));
    }
    Ok(DtedHeader {
        origin_lon,
        origin_lat,
        lon_interval,
        lat_interval,
        lon_lines: lon_lines as usize,
        lat_points: lat_points as usize,
    })
}

fn ascii_field<'a>(field: &'a [u8], name: &str) -> Result<&'a str, DtedError> {
    std::str::from_utf8(field).map_err(|_| DtedError::Format(format!("{name} is not ASCII")))
}

fn parse_count(field: &[u8], name: &str) -> Result<u32, DtedError> {
    let text = ascii_field(field, name)?;
    if !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(DtedError::Format(format!("{name} {text:?} is not a number")));
    }
    text.parse()
        .map_err(|_| DtedError::Format(format!("{name} {text:?} is not a number")))
}

/// Parses a `DDDMMSSH` angle.
fn parse_angle(field: &[u8], positive: u8, negative: u8) -> Result<f64, DtedError> {
    let malformed = || DtedError::Format(format!("malformed origin {:?}", String::from_utf8_lossy(field)));
    let (digits, hemi) = field.split_at(7);
    if !digits.iter().all(u8::is_ascii_digit) {
        return Err(malformed());
    }
    let num = |r: std::ops::Range<usize>| {
        digits[r].iter().fold(0u32, |acc, &d| acc * 10 + u32::from(d - b'0'))
    };
    let (deg, min, sec) = (num(0..3), num(3..5), num(5..7));
    if min >= 60 || sec >= 60 {
        return Err(malformed());
    }
    let value = deg as f64 + min as f64 / 60.0 + sec as f64 / 3600.0;
    match hemi[0] {
        h if h == positive => Ok(value),
        h if h == negative => Ok(-value),
        _ => Err(malformed()),
    }
}

/// Decodes a DTED file, verifying every record checksum.
pub fn read_dted(bytes: &[u8]) -> Result<ElevationGrid, DtedError> {
    read_dted_with(bytes, ChecksumPolicy::Verify)
}

pub fn read_dted_with(bytes: &[u8], policy: ChecksumPolicy) -> Result<ElevationGrid, DtedError> {
    let header = read_header(bytes)?;
    let expected = header.file_len();
    if bytes.len() < expected {
        return Err(DtedError::Format(format!(
            "truncated file: {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    if bytes.len() > expected {
        return Err(DtedError::Format(format!(
            "{} trailing bytes after the last data record",
            bytes.len() - expected
        )));
    }

    let rows = header.lat_points;
    let cols = header.lon_lines;
    let rec_len = header.record_len();
    let mut values = vec![0.0; rows * cols];
    for (j, record) in bytes[HEADER_LEN..].chunks_exact(rec_len).enumerate() {
        if record[0] != RECORD_SENTINEL {
            return Err(DtedError::Format(format!(
                "record {j} starts with {:#04x}, expected {RECORD_SENTINEL:#04x}",
                record[0]
            )));
        }
        let body = &record[..rec_len - 4];
        let stored = u32::from_be_bytes(record[rec_len - 4..].try_into().unwrap());
        let computed = record_checksum(body);
        if stored != computed {
            match policy {
                ChecksumPolicy::Verify => {
                    return Err(DtedError::Checksum {
                        record: j,
                        stored,
                        computed,
                    })
                }
                ChecksumPolicy::Warn => log::warn!(
                    "DTED record {j}: checksum {stored:#010x} != computed {computed:#010x}"
                ),
            }
        }
        for (k, pair) in body[8..].chunks_exact(2).enumerate() {
            let raw = u16::from_be_bytes([pair[0], pair[1]]);
            values[(rows - 1 - k) * cols + j] = decode_sign_magnitude(raw) as f64;
        }
    }
    Ok(ElevationGrid::new(rows, cols, values, header.bounds()?)?)
}

fn write_angle(out: &mut Vec<u8>, value: f64, positive: u8, negative: u8) {
    let total_seconds = (value.abs() * 3600.0).round() as u64;
    let deg = total_seconds / 3600;
    let min = (total_seconds / 60) % 60;
    let sec = total_seconds % 60;
    out.extend_from_slice(format!("{deg:03}{min:02}{sec:02}").as_bytes());
    out.push(if value < 0.0 && total_seconds > 0 {
        negative
    } else {
        positive
    });
}

fn interval_tenths(spacing: f64, axis: &str) -> Result<u32, DtedError> {
    let tenths = (spacing * TENTHS_PER_DEGREE).round();
    if !(1.0..=9999.0).contains(&tenths) {
        return Err(DtedError::Unencodable(format!(
            "{axis} spacing of {spacing} degrees is outside the 0.1..999.9 arc-second range"
        )));
    }
    Ok(tenths as u32)
}

/// Encodes a grid as a DTED file.
///
/// The origin is stored to the nearest whole arc-second and the post spacing to
/// the nearest tenth of an arc-second. Elevations are rounded half away from zero
/// to integer meters; nodata becomes `0xFFFF`.
pub fn write_dted(grid: &ElevationGrid) -> Result<Vec<u8>, DtedError> {
    let (rows, cols) = grid.shape();
    if rows < 2 || cols < 2 {
        return Err(DtedError::Unencodable(format!(
            "tile must have at least 2 x 2 posts (got {rows} x {cols})"
        )));
    }
    if rows > 9999 || cols > 9999 {
        return Err(DtedError::Unencodable(format!(
            "{rows} x {cols} exceeds the 9999-post header limit"
        )));
    }
    let b = grid.bounds();
    let lon_interval = interval_tenths(grid.lon_spacing().unwrap(), "longitude")?;
    let lat_interval = interval_tenths(grid.lat_spacing().unwrap(), "latitude")?;

    // Encode elevations first so range errors surface before any output.
    let mut posts = vec![0u16; rows * cols];
    for (idx, &v) in grid.values().iter().enumerate() {
        posts[idx] = if grid.is_nodata(v) {
            encode_sign_magnitude(DTED_NULL)
        } else {
            let r = v.round();
            if !(-32767.0..=32767.0).contains(&r) || (r == DTED_NULL as f64 && grid.nodata() != DEFAULT_NODATA) {
                return Err(DtedError::Range {
                    row: idx / cols,
                    col: idx % cols,
                    value: v,
                });
            }
            encode_sign_magnitude(r as i16)
        };
    }

    let rec_len = record_len(rows);
    let mut out = Vec::with_capacity(HEADER_LEN + cols * rec_len);
    out.extend_from_slice(b"UHL1");
    write_angle(&mut out, b.west, b'E', b'W');
    write_angle(&mut out, b.south, b'N', b'S');
    out.extend_from_slice(format!("{lon_interval:04}{lat_interval:04}").as_bytes());
    out.extend_from_slice(b"NA  "); // absolute vertical accuracy
    out.extend_from_slice(b"U  "); // security code
    out.extend_from_slice(&[b' '; 12]); // unique reference
    out.extend_from_slice(format!("{cols:04}{rows:04}").as_bytes());
    out.push(b'0'); // multiple accuracy flag
    out.extend_from_slice(&[b' '; 24]);
    debug_assert_eq!(out.len(), UHL_LEN);

    let mut dsi = [b' '; DSI_LEN];
    dsi[..3].copy_from_slice(b"DSI");
    out.extend_from_slice(&dsi);
    let mut acc = [b' '; ACC_LEN];
    acc[..3].copy_from_slice(b"ACC");
    out.extend_from_slice(&acc);

    for j in 0..cols {
        let start = out.len();
        out.push(RECORD_SENTINEL);
        out.extend_from_slice(&(j as u32).to_be_bytes()[1..]);
        out.extend_from_slice(&(j as u16).to_be_bytes());
        out.extend_from_slice(&0u16.to_be_bytes());
        for k in 0..rows {
            out.extend_from_slice(&posts[(rows - 1 - k) * cols + j].to_be_bytes());
        }
        let sum = record_checksum(&out[start..]);
        out.extend_from_slice(&sum.to_be_bytes());
    }
    Ok(out)
}
