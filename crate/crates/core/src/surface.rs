//! Parametric surface `(X, Y, Z)` over a grid and its color matrix.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::color::{ColorError, ColorRamp, RampKind, Rgb};
use crate::raster::{meters_to_feet, ElevationGrid, GeoBounds};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("surface needs at least 2 x 2 nodes (got {rows} x {cols})")]
    Degenerate { rows: usize, cols: usize },
    #[error("unknown {what} {value:?}")]
    Unknown { what: &'static str, value: String },
    #[error("surface has no valid nodes")]
    NoValidNodes,
    #[error(transparent)]
    Color(#[from] ColorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VerticalUnit {
    Meters,
    #[default]
    Feet,
}

impl VerticalUnit {
    pub fn from_meters(self, z: f64) -> f64 {
        match self {
            VerticalUnit::Meters => z,
            VerticalUnit::Feet => meters_to_feet(z),
        }
    }
}

impl FromStr for VerticalUnit {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m" | "meters" | "metres" => Ok(VerticalUnit::Meters),
            "ft" | "feet" => Ok(VerticalUnit::Feet),
            _ => Err(SurfaceError::Unknown {
                what: "unit",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for VerticalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerticalUnit::Meters => "meters",
            VerticalUnit::Feet => "feet",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShadingMode {
    /// One color per patch, taken from its top-left vertex.
    #[default]
    Flat,
    /// One color per vertex, blended across each triangle.
    Interpolated,
}

impl FromStr for ShadingMode {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "flat" | "faceted" => Ok(ShadingMode::Flat),
            "interp" | "interpolated" => Ok(ShadingMode::Interpolated),
            _ => Err(SurfaceError::Unknown {
                what: "shading",
                value: s.to_string(),
            }),
        }
    }
}

/// `X`, `Y` in degrees and `Z` in `unit`, all `rows × cols`, row-major.
/// Nodata nodes have `Z = 0` and `valid = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSurface {
    rows: usize,
    cols: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    valid: Vec<bool>,
    unit: VerticalUnit,
    bounds: GeoBounds,
}

pub fn build_surface(grid: &ElevationGrid, unit: VerticalUnit) -> Result<ParametricSurface, SurfaceError> {
    let (rows, cols) = grid.shape();
    if rows < 2 || cols < 2 {
        return Err(SurfaceError::Degenerate { rows, cols });
    }
    let lons: Vec<f64> = (0..cols).map(|j| grid.node_lon(j)).collect();
    let mut x = Vec::with_capacity(rows * cols);
    let mut y = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let lat = grid.node_lat(i);
        x.extend_from_slice(&lons);
        y.extend(std::iter::repeat_n(lat, cols));
    }
    let valid: Vec<bool> = grid.values().iter().map(|&v| !grid.is_nodata(v)).collect();
    let z = grid
        .values()
        .iter()
        .zip(&valid)
        .map(|(&v, &ok)| if ok { unit.from_meters(v) } else { 0.0 })
        .collect();
    Ok(ParametricSurface {
        rows,
        cols,
        x,
        y,
        z,
        valid,
        unit,
        bounds: *grid.bounds(),
    })
}

impl ParametricSurface {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn unit(&self) -> VerticalUnit {
        self.unit
    }

    pub fn bounds(&self) -> &GeoBounds {
        &self.bounds
    }

    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.cols + j]
    }

    pub fn y(&self, i: usize, j: usize) -> f64 {
        self.y[i * self.cols + j]
    }

    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.cols + j]
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[i * self.cols + j]
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    /// Min and max of `Z` over valid nodes.
    pub fn z_range(&self) -> Option<(f64, f64)> {
        self.z
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .fold(None, |acc, (&z, _)| match acc {
                None => Some((z, z)),
                Some((lo, hi)) => Some((lo.min(z), hi.max(z))),
            })
    }

    /// 0 to 3000 for feet; the data range otherwise. A flat surface gets a
    /// unit-wide range starting at its elevation.
    pub fn default_ramp(&self, kind: RampKind) -> Result<ColorRamp, SurfaceError> {
        match self.unit {
            VerticalUnit::Feet => Ok(ColorRamp::new(kind, 0.0, 3000.0)?),
            VerticalUnit::Meters => {
                let (lo, hi) = self.z_range().ok_or(SurfaceError::NoValidNodes)?;
                let hi = if hi > lo { hi } else { lo + 1.0 };
                Ok(ColorRamp::new(kind, lo, hi)?)
            }
        }
    }
}

/// The color matrix `C`: `rows × cols` equals the surface shape under
/// interpolated shading and is one smaller per axis under flat shading.
/// Entries for nodata nodes carry the ramp color of `Z = 0`; they are never
/// drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub mode: ShadingMode,
    pub rows: usize,
    pub cols: usize,
    pub colors: Vec<Rgb>,
}

impl Coloring {
    pub fn get(&self, i: usize, j: usize) -> Rgb {
        self.colors[i * self.cols + j]
    }
}

pub fn colorize(surface: &ParametricSurface, ramp: &ColorRamp, mode: ShadingMode) -> Coloring {
    let (rows, cols) = match mode {
        ShadingMode::Interpolated => (surface.rows, surface.cols),
        ShadingMode::Flat => (surface.rows - 1, surface.cols - 1),
    };
    let mut colors = vec![Rgb::BLACK; rows * cols];
    colors.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
        for (j, c) in row.iter_mut().enumerate() {
            *c = ramp.color(surface.z(i, j));
        }
    });
    Coloring {
        mode,
        rows,
        cols,
        colors,
    }
}
