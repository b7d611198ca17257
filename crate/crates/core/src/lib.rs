//! Terrain toolkit: read elevation tiles, stitch them, clip them to polygons,
//! turn them into colored triangle meshes and render those to PNG.
//!
//! ```
//! use geosurf::{ElevationGrid, GeoBounds};
//!
//! let bounds = GeoBounds::new(76.0, 77.0, 18.0, 19.0).unwrap();
//! let grid = ElevationGrid::from_fn(3, 3, bounds, |i, j| (i + j) as f64).unwrap();
//! assert_eq!(grid.node_position(1, 1).unwrap(), (76.5, 18.5));
//! ```

pub mod asciigrid;
pub mod color;
pub mod crop;
pub mod dted;
pub mod mesh;
pub mod mosaic;
pub mod ply;
pub mod raster;
pub mod render;
pub mod shapefile;
pub mod surface;
pub mod synthetic;

pub use asciigrid::{read_asciigrid, write_asciigrid, AsciiGridError};
pub use color::{hsv_to_rgb, normalize_z, ramp_color, ColorError, ColorRamp, RampKind, Rgb};
pub use crop::{crop_to_polygon, mask, Mask};
pub use dted::{read_dted, write_dted, DtedError};
pub use mesh::{triangulate, EmptyMeshError, MeshColors, MeshError, MeshVertex, TriangleMesh};
pub use mosaic::{horzcat, mosaic4, mosaic_tiles, vertcat, EdgePolicy, MosaicError};
pub use ply::{export_ply, read_ply, PlyError};
pub use raster::{Dms, ElevationGrid, GeoBounds, GridError, GridStats};
pub use render::{render_surface, write_png, Camera, Image, RenderError, RenderOptions};
pub use shapefile::{point_in_polygon, read_shp, write_shp, Polygon, Ring, ShapefileError};
pub use surface::{build_surface, colorize, Coloring, ParametricSurface, ShadingMode, SurfaceError, VerticalUnit};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/grids.md")]
    struct Grids;
    #[doc = include_str!("../../../book/src/formats.md")]
    struct Formats;
    #[doc = include_str!("../../../book/src/mosaic.md")]
    struct Mosaic;
    #[doc = include_str!("../../../book/src/crop.md")]
    struct Crop;
    #[doc = include_str!("../../../book/src/surface.md")]
    struct Surface;
    #[doc = include_str!("../../../book/src/render.md")]
    struct Render;
}
