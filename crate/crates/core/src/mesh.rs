//! Indexed triangle meshes built from a colored surface.
//!
//! Each quad patch `a=(i,j)`, `b=(i,j+1)`, `c=(i+1,j)`, `d=(i+1,j+1)` with all
//! four corners valid becomes the triangles `[a, c, d]` and `[a, d, b]`, both
//! counter-clockwise seen from `+z`. Vertices are shared and numbered in
//! row-major order of the nodes that are actually used.

use thiserror::Error;

use crate::color::Rgb;
use crate::raster::{GeoBounds, METERS_PER_FOOT};
use crate::surface::{Coloring, ParametricSurface, ShadingMode, VerticalUnit};

/// Meters per degree of latitude on the WGS84 equatorial radius.
pub const METERS_PER_DEGREE: f64 = 111_319.490_793_273_6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("surface has no patch with four valid corners")]
    Empty,
    #[error("color matrix is {found_rows} x {found_cols}, expected {rows} x {cols}")]
    ColoringShape {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("vertical exaggeration must be finite and positive (got {0})")]
    Exaggeration(f64),
    #[error("triangle {triangle} references vertex {index} of {count}")]
    IndexOutOfRange { triangle: usize, index: u32, count: usize },
    #[error("{found} colors for {expected} {what}")]
    ColorCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

pub type EmptyMeshError = MeshError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshVertex {
    /// Normalized model coordinates.
    pub position: [f64; 3],
    pub lon: f64,
    pub lat: f64,
    /// Elevation in the mesh's vertical unit.
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshColors {
    PerVertex(Vec<Rgb>),
    PerFace(Vec<Rgb>),
}

impl MeshColors {
    pub fn mode(&self) -> ShadingMode {
        match self {
            MeshColors::PerVertex(_) => ShadingMode::Interpolated,
            MeshColors::PerFace(_) => ShadingMode::Flat,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<MeshVertex>,
    triangles: Vec<[u32; 3]>,
    colors: MeshColors,
    bounds: GeoBounds,
    unit: VerticalUnit,
}

impl TriangleMesh {
    /// Assembles a mesh from parts, checking indices and color counts.
    pub fn from_parts(
        vertices: Vec<MeshVertex>,
        triangles: Vec<[u32; 3]>,
        colors: MeshColors,
        bounds: GeoBounds,
        unit: VerticalUnit,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&v| v as usize >= vertices.len()) {
                return Err(MeshError::IndexOutOfRange {
                    triangle: t,
                    index,
                    count: vertices.len(),
                });
            }
        }
        let (what, expected, found) = match &colors {
            MeshColors::PerVertex(c) => ("vertices", vertices.len(), c.len()),
            MeshColors::PerFace(c) => ("triangles", triangles.len(), c.len()),
        };
        if expected != found {
            return Err(MeshError::ColorCount {
                what,
                expected,
                found,
            });
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            colors,
            bounds,
            unit,
        })
    }

    pub fn vertices(&self) -> &[MeshVertex] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn colors(&self) -> &MeshColors {
        &self.colors
    }

    pub fn bounds(&self) -> &GeoBounds {
        &self.bounds
    }

    pub fn unit(&self) -> VerticalUnit {
        self.unit
    }

    pub fn shading(&self) -> ShadingMode {
        self.colors.mode()
    }

    /// Colors of the three corners of triangle `t`.
    pub fn triangle_colors(&self, t: usize) -> [Rgb; 3] {
        match &self.colors {
            MeshColors::PerFace(c) => [c[t]; 3],
            MeshColors::PerVertex(c) => self.triangles[t].map(|v| c[v as usize]),
        }
    }
}

/// Ground extent of `bounds` along longitude and latitude in `unit`.
pub fn ground_extents(bounds: &GeoBounds, unit: VerticalUnit) -> (f64, f64) {
    let mid_lat = 0.5 * (bounds.north + bounds.south);
    let to_unit = match unit {
        VerticalUnit::Meters => 1.0,
        VerticalUnit::Feet => 1.0 / METERS_PER_FOOT,
    };
    (
        bounds.width() * METERS_PER_DEGREE * mid_lat.to_radians().cos() * to_unit,
        bounds.height() * METERS_PER_DEGREE * to_unit,
    )
}

/// Triangulates the valid patches of `surface`. Model `x` and `y` span `[0, 1]`
/// over the bounds; model `z` is `ve · (Z − Z_min) / extent`, where `extent` is
/// the larger ground extent expressed in the surface's vertical unit.
pub fn triangulate(
    surface: &ParametricSurface,
    coloring: &Coloring,
    ve: f64,
) -> Result<TriangleMesh, MeshError> {
    let (rows, cols) = (surface.rows(), surface.cols());
    let (crows, ccols) = match coloring.mode {
        ShadingMode::Interpolated => (rows, cols),
        ShadingMode::Flat => (rows - 1, cols - 1),
    };
    if (coloring.rows, coloring.cols) != (crows, ccols) || coloring.colors.len() != crows * ccols {
        return Err(MeshError::ColoringShape {
            rows: crows,
            cols: ccols,
            found_rows: coloring.rows,
            found_cols: coloring.cols,
        });
    }
    if !(ve.is_finite() && ve > 0.0) {
        return Err(MeshError::Exaggeration(ve));
    }

    let patch_ok = |i: usize, j: usize| {
        surface.is_valid(i, j)
            && surface.is_valid(i, j + 1)
            && surface.is_valid(i + 1, j)
            && surface.is_valid(i + 1, j + 1)
    };
    let mut used = vec![false; rows * cols];
    let mut any = false;
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            if patch_ok(i, j) {
                any = true;
                for (di, dj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    used[(i + di) * cols + j + dj] = true;
                }
            }
        }
    }
    if !any {
        return Err(MeshError::Empty);
    }

    let (zmin, _) = surface.z_range().expect("a valid patch has valid nodes");
    let (gx, gy) = ground_extents(surface.bounds(), surface.unit());
    let z_scale = ve / gx.max(gy);
    let b = *surface.bounds();

    let mut index = vec![u32::MAX; rows * cols];
    let mut vertices = Vec::new();
    let mut vertex_colors = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if !used[i * cols + j] {
                continue;
            }
            index[i * cols + j] = vertices.len() as u32;
            let (lon, lat, z) = (surface.x(i, j), surface.y(i, j), surface.z(i, j));
            vertices.push(MeshVertex {
                position: [
                    (lon - b.west) / b.width(),
                    (lat - b.south) / b.height(),
                    (z - zmin) * z_scale,
                ],
                lon,
                lat,
                elevation: z,
            });
            if coloring.mode == ShadingMode::Interpolated {
                vertex_colors.push(coloring.get(i, j));
            }
        }
    }

    let mut triangles = Vec::new();
    let mut face_colors = Vec::new();
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            if !patch_ok(i, j) {
                continue;
            }
            let a = index[i * cols + j];
            let bb = index[i * cols + j + 1];
            let c = index[(i + 1) * cols + j];
            let d = index[(i + 1) * cols + j + 1];
            triangles.push([a, c, d]);
            triangles.push([a, d, bb]);
            if coloring.mode == ShadingMode::Flat {
                let color = coloring.get(i, j);
                face_colors.extend([color, color]);
            }
        }
    }

    let colors = match coloring.mode {
        ShadingMode::Interpolated => MeshColors::PerVertex(vertex_colors),
        ShadingMode::Flat => MeshColors::PerFace(face_colors),
    };
    TriangleMesh::from_parts(vertices, triangles, colors, b, surface.unit())
}
