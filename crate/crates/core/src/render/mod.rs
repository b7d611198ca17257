//! Software rendering of triangle meshes to PNG.

mod camera;
mod png;
mod raster;

use thiserror::Error;

use crate::color::Rgb;
use crate::mesh::TriangleMesh;

pub use camera::{bounding_sphere, project, view_direction, Camera, ScreenTriangle};
pub use png::{adler32, crc32, write_png, PNG_SIGNATURE};
pub use raster::{rasterize, Image, COORD_LIMIT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("image size {width} x {height} has a zero dimension")]
    ZeroSize { width: u32, height: u32 },
    #[error("invalid camera: {0}")]
    Camera(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    pub background: Rgb,
    /// Rasterize horizontal bands on the rayon pool. Output is identical.
    pub parallel: bool,
}

impl RenderOptions {
    pub fn new(width: u32, height: u32) -> Self {
        RenderOptions {
            width,
            height,
            background: Rgb::WHITE,
            parallel: true,
        }
    }
}

pub fn render_surface(mesh: &TriangleMesh, camera: &Camera, width: u32, height: u32) -> Result<Image, RenderError> {
    render_with(mesh, camera, &RenderOptions::new(width, height))
}

pub fn render_with(mesh: &TriangleMesh, camera: &Camera, opts: &RenderOptions) -> Result<Image, RenderError> {
    if opts.width == 0 || opts.height == 0 {
        return Err(RenderError::ZeroSize {
            width: opts.width,
            height: opts.height,
        });
    }
    let tris = project(mesh, camera, opts.width, opts.height);
    Ok(rasterize(
        &tris,
        opts.width,
        opts.height,
        opts.background,
        mesh.shading(),
        opts.parallel,
    ))
}
