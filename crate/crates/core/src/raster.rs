//! Node-registered elevation grids and their georeferencing.
//!
//! An [`ElevationGrid`] stores an `m × n` matrix of elevations in meters.
//! Row 0 is the northernmost row and column 0 the westernmost column. Values
//! sit on lattice nodes that include both edges of the [`GeoBounds`], so node
//! `(0, 0)` is exactly at `(west, north)` and node `(m - 1, n - 1)` exactly at
//! `(east, south)`. Adjacent tiles of the same survey therefore share one line
//! of samples along their common edge.

use std::fmt;

use thiserror::Error;

/// DTED null value, used as the default nodata sentinel.
pub const DEFAULT_NODATA: f64 = -32767.0;

/// Length of the international foot in meters.
pub const METERS_PER_FOOT: f64 = 0.3048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("grid must have at least one row and one column (got {rows} x {cols})")]
    Empty { rows: usize, cols: usize },
    #[error("value buffer holds {actual} elements, expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("value at row {row}, column {col} is not finite and not the nodata sentinel")]
    NonFinite { row: usize, col: usize },
    #[error("nodata sentinel must be finite")]
    BadNodata,
    #[error("node ({row}, {col}) is outside a {rows} x {cols} grid")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("spacing undefined for a {rows} x {cols} grid")]
    SpacingUndefined { rows: usize, cols: usize },
}

/// Geographic extent in decimal degrees.
///
/// `west`/`north` hold the upper-left corner and `east`/`south` the lower-right
/// corner of the grid's node lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoBounds {
    pub west: f64,
    pub east: f64,
    pub south: f64,
    pub north: f64,
}

impl GeoBounds {
    pub fn new(west: f64, east: f64, south: f64, north: f64) -> Result<Self, GridError> {
        let b = GeoBounds {
            west,
            east,
            south,
            north,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let GeoBounds {
            west,
            east,
            south,
            north,
        } = *self;
        if ![west, east, south, north].iter().all(|v| v.is_finite()) {
            return Err(GridError::InvalidBounds("non-finite coordinate".into()));
        }
        if west >= east {
            return Err(GridError::InvalidBounds(format!(
                "west {west} must be less than east {east}"
            )));
        }
        if south >= north {
            return Err(GridError::InvalidBounds(format!(
                "south {south} must be less than north {north}"
            )));
        }
        if south < -90.0 || north > 90.0 {
            return Err(GridError::InvalidBounds(format!(
                "latitude range [{south}, {north}] exceeds [-90, 90]"
            )));
        }
        if west < -180.0 || east >= 360.0 {
            return Err(GridError::InvalidBounds(format!(
                "longitude range [{west}, {east}] exceeds [-180, 360)"
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.east - self.west
    }

    pub fn height(&self) -> f64 {
        self.north - self.south
    }

    pub fn contains(&self, lon: f64, lat: f64) -> bool {
        lon >= self.west && lon <= self.east && lat >= self.south && lat <= self.north
    }

    pub fn intersects(&self, other: &GeoBounds) -> bool {
        self.west <= other.east
            && other.west <= self.east
            && self.south <= other.north
            && other.south <= self.north
    }

    /// Smallest bounds containing both.
    pub fn union(&self, other: &GeoBounds) -> GeoBounds {
        GeoBounds {
            west: self.west.min(other.west),
            east: self.east.max(other.east),
            south: self.south.min(other.south),
            north: self.north.max(other.north),
        }
    }
}

/// Hemisphere-tagged degrees/minutes/seconds, as printed in axis reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dms {
    pub degrees: u32,
    pub minutes: u32,
    pub seconds: f64,
    pub hemisphere: char,
}

impl Dms {
    /// Seconds are rounded to four decimals; a rounding carry propagates into
    /// minutes and degrees.
    pub fn from_longitude(lon: f64) -> Dms {
        Self::split(lon, if lon < 0.0 { 'W' } else { 'E' })
    }

    pub fn from_latitude(lat: f64) -> Dms {
        Self::split(lat, if lat < 0.0 { 'S' } else { 'N' })
    }

    fn split(value: f64, hemisphere: char) -> Dms {
        // Work in ten-thousandths of an arc-second so the carry is exact.
        let total = (value.abs() * 3600.0 * 10_000.0).round() as u64;
        let seconds_e4 = total % (60 * 10_000);
        let total_minutes = total / (60 * 10_000);
        Dms {
            degrees: (total_minutes / 60) as u32,
            minutes: (total_minutes % 60) as u32,
            seconds: seconds_e4 as f64 / 10_000.0,
            hemisphere,
        }
    }
}

impl fmt::Display for Dms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\u{b0} {}' {:.4}\" {}",
            self.degrees, self.minutes, self.seconds, self.hemisphere
        )
    }
}

/// Elevation matrix in meters with a nodata sentinel and geographic bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationGrid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    nodata: f64,
    bounds: GeoBounds,
}

impl ElevationGrid {
    /// Builds a grid from row-major values using the default nodata sentinel.
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        bounds: GeoBounds,
    ) -> Result<Self, GridError> {
        Self::with_nodata(rows, cols, values, bounds, DEFAULT_NODATA)
    }

    pub fn with_nodata(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        bounds: GeoBounds,
        nodata: f64,
    ) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::Empty { rows, cols });
        }
        let expected = rows.checked_mul(cols).ok_or(GridError::ShapeMismatch {
            expected: usize::MAX,
            actual: values.len(),
        })?;
        if values.len() != expected {
            return Err(GridError::ShapeMismatch {
                expected,
                actual: values.len(),
            });
        }
        if !nodata.is_finite() {
            return Err(GridError::BadNodata);
        }
        bounds.validate()?;
        if let Some(idx) = values.iter().position(|&v| !v.is_finite() && v != nodata) {
            return Err(GridError::NonFinite {
                row: idx / cols,
                col: idx % cols,
            });
        }
        Ok(ElevationGrid {
            rows,
            cols,
            values,
            nodata,
            bounds,
        })
    }

    /// Grid filled with a single value.
    pub fn filled(rows: usize, cols: usize, value: f64, bounds: GeoBounds) -> Result<Self, GridError> {
        Self::new(rows, cols, vec![value; rows.saturating_mul(cols)], bounds)
    }

    /// Builds a grid by evaluating `f(row, col)` at every node.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        bounds: GeoBounds,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, GridError> {
        let mut values = Vec::with_capacity(rows.saturating_mul(cols));
        for i in 0..rows {
            for j in 0..cols {
                values.push(f(i, j));
            }
        }
        Self::new(rows, cols, values, bounds)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    pub fn bounds(&self) -> &GeoBounds {
        &self.bounds
    }

    /// Row-major values, row 0 first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    /// Panics if the index is out of range.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "node ({i}, {j}) out of range");
        self.values[i * self.cols + j]
    }

    pub fn is_nodata(&self, value: f64) -> bool {
        value == self.nodata
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        !self.is_nodata(self.get(i, j))
    }

    /// Longitude step between adjacent columns.
    pub fn lon_spacing(&self) -> Option<f64> {
        (self.cols > 1).then(|| self.bounds.width() / (self.cols - 1) as f64)
    }

    /// Latitude step between adjacent rows.
    pub fn lat_spacing(&self) -> Option<f64> {
        (self.rows > 1).then(|| self.bounds.height() / (self.rows - 1) as f64)
    }

    /// Geographic position `(lon, lat)` of node `(i, j)`.
    pub fn node_position(&self, i: usize, j: usize) -> Result<(f64, f64), GridError> {
        if i >= self.rows || j >= self.cols {
            return Err(GridError::IndexOutOfRange {
                row: i,
                col: j,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows < 2 || self.cols < 2 {
            return Err(GridError::SpacingUndefined {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((self.node_lon(j), self.node_lat(i)))
    }

    /// Longitude of column `j`. A single-column grid places it at `west`.
    pub fn node_lon(&self, j: usize) -> f64 {
        if self.cols < 2 {
            return self.bounds.west;
        }
        let b = &self.bounds;
        b.west + j as f64 * (b.east - b.west) / (self.cols - 1) as f64
    }

    /// Latitude of row `i`. A single-row grid places it at `north`.
    pub fn node_lat(&self, i: usize) -> f64 {
        if self.rows < 2 {
            return self.bounds.north;
        }
        let b = &self.bounds;
        b.north - i as f64 * (b.north - b.south) / (self.rows - 1) as f64
    }

    pub fn stats(&self) -> GridStats {
        let mut valid_count = 0usize;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0f64;
        for &v in &self.values {
            if v == self.nodata {
                continue;
            }
            valid_count += 1;
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        let summary = (valid_count > 0).then(|| ElevationSummary {
            min,
            max,
            // Rounding in the running sum can push the mean an ulp outside.
            mean: (sum / valid_count as f64).clamp(min, max),
        });
        GridStats {
            valid_count,
            nodata_count: self.values.len() - valid_count,
            summary,
        }
    }

    /// Copy of the grid with every valid value passed through `f`.
    pub fn map_valid(&self, mut f: impl FnMut(f64) -> f64) -> Result<ElevationGrid, GridError> {
        let values = self
            .values
            .iter()
            .map(|&v| if v == self.nodata { v } else { f(v) })
            .collect();
        Self::with_nodata(self.rows, self.cols, values, self.bounds, self.nodata)
    }

    /// Copy of the grid using a different nodata sentinel.
    pub fn with_sentinel(&self, nodata: f64) -> Result<ElevationGrid, GridError> {
        let values = self
            .values
            .iter()
            .map(|&v| if v == self.nodata { nodata } else { v })
            .collect();
        Self::with_nodata(self.rows, self.cols, values, self.bounds, nodata)
    }
}

/// Min/max/mean over the valid nodes of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElevationSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStats {
    pub valid_count: usize,
    pub nodata_count: usize,
    /// `None` when the grid has no valid nodes.
    pub summary: Option<ElevationSummary>,
}

impl GridStats {
    pub fn is_empty(&self) -> bool {
        self.summary.is_none()
    }
}

pub fn meters_to_feet(z: f64) -> f64 {
    z / METERS_PER_FOOT
}

pub fn feet_to_meters(z: f64) -> f64 {
    z * METERS_PER_FOOT
}

/// [`meters_to_feet`] that leaves the nodata sentinel untouched.
pub fn meters_to_feet_or_nodata(z: f64, nodata: f64) -> f64 {
    if z == nodata {
        z
    } else {
        meters_to_feet(z)
    }
}
