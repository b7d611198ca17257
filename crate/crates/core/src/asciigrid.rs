//! ESRI ASCII grid (`.asc`) text files.
//!
//! `xllcorner`/`yllcorner` are read as the south-west *node*, matching the
//! node registration used everywhere else in the crate, rather than ESRI's
//! outer cell corner. An axis with a single node spans one `cellsize`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::raster::{ElevationGrid, GeoBounds, GridError};

pub const DEFAULT_ASC_NODATA: f64 = -9999.0;

/// Largest allowed difference between the two node spacings, in degrees.
const SQUARE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsciiGridError {
    #[error("ASCII grid format error: {0}")]
    Format(String),
    #[error("ASCII grid row {row}: expected {expected} values, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("grid spacing is not square (lon {lon_spacing}, lat {lat_spacing}); write DTED instead")]
    Anisotropic { lon_spacing: f64, lat_spacing: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsciiGridHeader {
    pub ncols: usize,
    pub nrows: usize,
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
    pub nodata_value: f64,
}

impl AsciiGridHeader {
    pub fn bounds(&self) -> Result<GeoBounds, GridError> {
        let span = |n: usize| (n.max(2) - 1) as f64 * self.cellsize;
        GeoBounds::new(
            self.xllcorner,
            self.xllcorner + span(self.ncols),
            self.yllcorner,
            self.yllcorner + span(self.nrows),
        )
    }
}

fn format_err(msg: impl Into<String>) -> AsciiGridError {
    AsciiGridError::Format(msg.into())
}

pub fn read_asciigrid(text: &str) -> Result<ElevationGrid, AsciiGridError> {
    let mut ncols = None;
    let mut nrows = None;
    let mut xll = None;
    let mut yll = None;
    let mut cellsize = None;
    let mut nodata = None;

    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    while let Some(line) = lines.peek() {
        let mut tokens = line.split_whitespace();
        let key = tokens.next().unwrap_or_default();
        if !key.starts_with(|c: char| c.is_ascii_alphabetic()) {
            break;
        }
        let value = tokens
            .next()
            .ok_or_else(|| format_err(format!("header key {key} has no value")))?;
        if tokens.next().is_some() {
            return Err(format_err(format!("header line {line:?} has extra tokens")));
        }
        let number = || -> Result<f64, AsciiGridError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format_err(format!("header {key}: {value:?} is not a number")))
        };
        let count = || -> Result<usize, AsciiGridError> {
            value
                .parse::<usize>()
                .map_err(|_| format_err(format!("header {key}: {value:?} is not a count")))
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => ncols = Some(count()?),
            "nrows" => nrows = Some(count()?),
            "xllcorner" => xll = Some(number()?),
            "yllcorner" => yll = Some(number()?),
            "cellsize" => cellsize = Some(number()?),
            "nodata_value" => nodata = Some(number()?),
            other => return Err(format_err(format!("unknown header key {other:?}"))),
        }
        lines.next();
    }

    let missing = |k: &str| format_err(format!("missing header key {k}"));
    let header = AsciiGridHeader {
        ncols: ncols.ok_or_else(|| missing("ncols"))?,
        nrows: nrows.ok_or_else(|| missing("nrows"))?,
        xllcorner: xll.ok_or_else(|| missing("xllcorner"))?,
        yllcorner: yll.ok_or_else(|| missing("yllcorner"))?,
        cellsize: cellsize.ok_or_else(|| missing("cellsize"))?,
        nodata_value: nodata.unwrap_or(DEFAULT_ASC_NODATA),
    };
    if header.ncols == 0 || header.nrows == 0 {
        return Err(format_err("ncols and nrows must be at least 1"));
    }
    if header.cellsize <= 0.0 {
        return Err(format_err("cellsize must be positive"));
    }
    let total = header
        .ncols
        .checked_mul(header.nrows)
        .ok_or_else(|| format_err("grid dimensions overflow"))?;

    let mut values = Vec::with_capacity(total.min(1 << 24));
    let mut row = 0;
    for line in lines {
        if row == header.nrows {
            return Err(format_err(format!(
                "more than the declared {} data rows",
                header.nrows
            )));
        }
        let before = values.len();
        for token in line.split_whitespace() {
            let v: f64 = token
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| format_err(format!("row {row}: {token:?} is not a number")))?;
            values.push(v);
        }
        let found = values.len() - before;
        if found != header.ncols {
            return Err(AsciiGridError::RowLength {
                row,
                expected: header.ncols,
                found,
            });
        }
        row += 1;
    }
    if row != header.nrows {
        return Err(format_err(format!(
            "found {row} data rows, header declares {}",
            header.nrows
        )));
    }
    Ok(ElevationGrid::with_nodata(
        header.nrows,
        header.ncols,
        values,
        header.bounds()?,
        header.nodata_value,
    )?)
}

/// Writes the canonical text form: lowercase keys in fixed order and
/// shortest round-trip number formatting.
pub fn write_asciigrid(grid: &ElevationGrid) -> Result<String, AsciiGridError> {
    let b = grid.bounds();
    let cellsize = match (grid.lon_spacing(), grid.lat_spacing()) {
        (Some(dx), Some(dy)) => {
            if (dx - dy).abs() > SQUARE_TOLERANCE {
                return Err(AsciiGridError::Anisotropic {
                    lon_spacing: dx,
                    lat_spacing: dy,
                });
            }
            dx
        }
        (Some(dx), None) => dx,
        (None, Some(dy)) => dy,
        (None, None) => b.width(),
    };
    let (rows, cols) = grid.shape();
    let mut out = String::with_capacity(rows * cols * 6 + 128);
    let _ = writeln!(out, "ncols {cols}");
    let _ = writeln!(out, "nrows {rows}");
    let _ = writeln!(out, "xllcorner {}", b.west);
    let _ = writeln!(out, "yllcorner {}", b.south);
    let _ = writeln!(out, "cellsize {cellsize}");
    let _ = writeln!(out, "NODATA_value {}", grid.nodata());
    for i in 0..rows {
        for (j, v) in grid.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    Ok(out)
}
