//! Masking a grid to polygons.
//!
//! A node survives when its own coordinate lies inside any of the polygons
//! (edges count as inside). Every other node becomes nodata.

use rayon::prelude::*;

use crate::raster::{ElevationGrid, GeoBounds};
use crate::shapefile::{point_in_polygon, Polygon};

/// Boolean `rows × cols` matrix, row-major, `true` where a node survives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

pub fn mask(grid: &ElevationGrid, polys: &[Polygon]) -> Mask {
    let (rows, cols) = grid.shape();
    let lons: Vec<f64> = (0..cols).map(|j| grid.node_lon(j)).collect();
    let mut bits = vec![false; rows * cols];
    bits.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
        let lat = grid.node_lat(i);
        let candidates: Vec<&Polygon> = polys
            .iter()
            .filter(|p| lat >= p.bbox().south && lat <= p.bbox().north)
            .collect();
        if candidates.is_empty() {
            return;
        }
        for (bit, &lon) in row.iter_mut().zip(&lons) {
            *bit = candidates.iter().any(|p| point_in_polygon(p, (lon, lat)));
        }
    });
    Mask { rows, cols, bits }
}

/// Sets every node outside `polys` to nodata. With `trim`, rows and columns
/// lying entirely outside the polygons' combined bounding box are dropped
/// (never below two nodes per axis).
pub fn crop_to_polygon(grid: &ElevationGrid, polys: &[Polygon], trim: bool) -> ElevationGrid {
    let m = mask(grid, polys);
    let nodata = grid.nodata();
    let values: Vec<f64> = grid
        .values()
        .iter()
        .zip(m.as_slice())
        .map(|(&v, &keep)| if keep { v } else { nodata })
        .collect();
    let masked = ElevationGrid::with_nodata(grid.rows(), grid.cols(), values, *grid.bounds(), nodata)
        .expect("masking preserves grid invariants");
    if !trim {
        return masked;
    }
    match polys.iter().map(|p| *p.bbox()).reduce(|a, b| a.union(&b)) {
        Some(bbox) => trim_to(&masked, &bbox),
        None => masked,
    }
}

/// Inclusive index range of nodes whose coordinate lies in `[lo, hi]`, widened
/// to two nodes when it would otherwise hold one.
fn kept_range(coords: &[f64], lo: f64, hi: f64) -> Option<(usize, usize)> {
    let first = coords.iter().position(|&c| c >= lo && c <= hi)?;
    let last = coords.iter().rposition(|&c| c >= lo && c <= hi)?;
    if first < last || coords.len() < 2 {
        Some((first, last))
    } else if last + 1 < coords.len() {
        Some((first, last + 1))
    } else {
        Some((first - 1, last))
    }
}

fn trim_to(grid: &ElevationGrid, bbox: &GeoBounds) -> ElevationGrid {
    let lons: Vec<f64> = (0..grid.cols()).map(|j| grid.node_lon(j)).collect();
    let lats: Vec<f64> = (0..grid.rows()).map(|i| grid.node_lat(i)).collect();
    let (Some((j0, j1)), Some((i0, i1))) = (
        kept_range(&lons, bbox.west, bbox.east),
        kept_range(&lats, bbox.south, bbox.north),
    ) else {
        return grid.clone();
    };
    if (i0, i1, j0, j1) == (0, grid.rows() - 1, 0, grid.cols() - 1) {
        return grid.clone();
    }
    let cols = j1 - j0 + 1;
    let rows = i1 - i0 + 1;
    let mut values = Vec::with_capacity(rows * cols);
    for i in i0..=i1 {
        values.extend_from_slice(&grid.row(i)[j0..=j1]);
    }
    let b = grid.bounds();
    // Single-node axes keep their original extent.
    let bounds = GeoBounds {
        west: if grid.cols() > 1 { lons[j0] } else { b.west },
        east: if grid.cols() > 1 { lons[j1] } else { b.east },
        south: if grid.rows() > 1 { lats[i1] } else { b.south },
        north: if grid.rows() > 1 { lats[i0] } else { b.north },
    };
    ElevationGrid::with_nodata(rows, cols, values, bounds, grid.nodata())
        .expect("trimmed bounds come from existing node positions")
}
