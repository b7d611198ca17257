//! Azimuth/elevation orthographic camera.

use crate::color::Rgb;
use crate::mesh::TriangleMesh;

use super::RenderError;

type Vec3 = [f64; 3];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: Vec3) -> Vec3 {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Unit vector from the target towards the camera. Azimuth turns
/// counter-clockwise about `+z` starting from `-y`; elevation lifts towards
/// `+z`.
pub fn view_direction(azimuth: f64, elevation: f64) -> Vec3 {
    let az = azimuth.rem_euclid(360.0).to_radians();
    let el = elevation.to_radians();
    [az.sin() * el.cos(), -az.cos() * el.cos(), el.sin()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    azimuth: f64,
    elevation: f64,
    zoom: f64,
    target: Option<Vec3>,
}

impl Camera {
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self, RenderError> {
        if !azimuth.is_finite() || !(-90.0..=90.0).contains(&elevation) {
            return Err(RenderError::Camera(format!(
                "azimuth {azimuth} must be finite and elevation {elevation} within [-90, 90]"
            )));
        }
        Ok(Camera {
            azimuth,
            elevation,
            zoom: 1.0,
            target: None,
        })
    }

    pub fn with_zoom(mut self, zoom: f64) -> Result<Self, RenderError> {
        if !(zoom.is_finite() && zoom > 0.0) {
            return Err(RenderError::Camera(format!("zoom {zoom} must be positive")));
        }
        self.zoom = zoom;
        Ok(self)
    }

    /// Looks at `target` instead of the mesh's bounding-sphere center.
    pub fn with_target(mut self, target: Vec3) -> Self {
        self.target = Some(target);
        self
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    pub fn zoom(&self) -> f64 {
        self.zoom
    }

    /// Camera basis `(right, up, back)`, `back` pointing at the viewer.
    pub fn basis(&self) -> (Vec3, Vec3, Vec3) {
        let back = view_direction(self.azimuth, self.elevation);
        let mut right = cross([0.0, 0.0, 1.0], back);
        if dot(right, right) < 1e-18 {
            right = cross([0.0, 1.0, 0.0], back);
        }
        let right = normalize(right);
        let up = cross(back, right);
        (right, up, back)
    }
}

/// Center of the axis-aligned box around the vertices and the radius of the
/// sphere about it that encloses them all.
pub fn bounding_sphere(points: &[Vec3]) -> (Vec3, f64) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let center = [0, 1, 2].map(|k| 0.5 * (lo[k] + hi[k]));
    let radius = points
        .iter()
        .map(|&p| {
            let d = sub(p, center);
            dot(d, d)
        })
        .fold(0.0f64, f64::max)
        .sqrt();
    (center, radius)
}

/// A triangle in pixel space: `(x, y, depth)` per corner, smaller depth is
/// nearer the viewer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenTriangle {
    pub vertices: [[f64; 3]; 3],
    pub colors: [Rgb; 3],
}

/// Projects every triangle of `mesh` into a `width × height` viewport. At zoom
/// 1 the bounding sphere just fits the shorter image side.
pub fn project(mesh: &TriangleMesh, camera: &Camera, width: u32, height: u32) -> Vec<ScreenTriangle> {
    let positions: Vec<Vec3> = mesh.vertices().iter().map(|v| v.position).collect();
    let (center, radius) = bounding_sphere(&positions);
    let target = camera.target.unwrap_or(center);
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let scale = camera.zoom * 0.5 * width.min(height) as f64 / radius;
    let (right, up, back) = camera.basis();
    let (cx, cy) = (0.5 * width as f64, 0.5 * height as f64);
    let screen: Vec<[f64; 3]> = positions
        .iter()
        .map(|&p| {
            let d = sub(p, target);
            [cx + scale * dot(d, right), cy - scale * dot(d, up), -dot(d, back)]
        })
        .collect();
    mesh.triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| ScreenTriangle {
            vertices: tri.map(|v| screen[v as usize]),
            colors: mesh.triangle_colors(t),
        })
        .collect()
}
