//! `NAME=value` text reports.

use std::fmt::Write as _;

use geosurf::color::ColorRamp;
use geosurf::raster::{Dms, ElevationGrid, GeoBounds};
use geosurf::render::Camera;
use geosurf::shapefile::Polygon;
use geosurf::surface::ParametricSurface;

fn axis_lines(out: &mut String, b: &GeoBounds) {
    let _ = writeln!(out, "UPPER LEFT X={:.10}", b.west);
    let _ = writeln!(out, "UPPER LEFT Y={:.10}", b.north);
    let _ = writeln!(out, "LOWER RIGHT X={:.10}", b.east);
    let _ = writeln!(out, "LOWER RIGHT Y={:.10}", b.south);
    let _ = writeln!(out, "WEST LONGITUDE={}", Dms::from_longitude(b.west));
    let _ = writeln!(out, "NORTH LATITUDE={}", Dms::from_latitude(b.north));
    let _ = writeln!(out, "EAST LONGITUDE={}", Dms::from_longitude(b.east));
    let _ = writeln!(out, "SOUTH LATITUDE={}", Dms::from_latitude(b.south));
}

pub fn grid_info(name: &str, format: &str, grid: &ElevationGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "FILE={name}");
    let _ = writeln!(out, "FORMAT={format}");
    let _ = writeln!(out, "SIZE={} x {}", grid.rows(), grid.cols());
    axis_lines(&mut out, grid.bounds());
    if let (Some(dx), Some(dy)) = (grid.lon_spacing(), grid.lat_spacing()) {
        let _ = writeln!(out, "LONGITUDE SPACING={:.4} arc-seconds", dx * 3600.0);
        let _ = writeln!(out, "LATITUDE SPACING={:.4} arc-seconds", dy * 3600.0);
    }
    let stats = grid.stats();
    let _ = writeln!(out, "NODATA VALUE={}", grid.nodata());
    let _ = writeln!(out, "VALID NODES={}", stats.valid_count);
    let _ = writeln!(out, "NODATA NODES={}", stats.nodata_count);
    if let Some(s) = stats.summary {
        let _ = writeln!(out, "MIN ELEVATION={} m", s.min);
        let _ = writeln!(out, "MAX ELEVATION={} m", s.max);
        let _ = writeln!(out, "MEAN ELEVATION={:.3} m", s.mean);
    }
    out
}

pub fn shape_info(name: &str, polys: &[Polygon]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "FILE={name}");
    let _ = writeln!(out, "FORMAT=shapefile");
    let _ = writeln!(out, "POLYGONS={}", polys.len());
    let rings: usize = polys.iter().map(|p| p.rings().len()).sum();
    let _ = writeln!(out, "RINGS={rings}");
    if let Some(b) = polys.iter().map(|p| *p.bbox()).reduce(|a, b| a.union(&b)) {
        axis_lines(&mut out, &b);
    }
    out
}

/// Axis ranges of a rendered surface, written next to the image.
pub fn render_sidecar(surface: &ParametricSurface, ramp: &ColorRamp, camera: &Camera) -> String {
    let mut out = String::new();
    axis_lines(&mut out, surface.bounds());
    let _ = writeln!(out, "ELEVATION UNIT={}", surface.unit());
    if let Some((lo, hi)) = surface.z_range() {
        let _ = writeln!(out, "MIN ELEVATION={lo:.4}");
        let _ = writeln!(out, "MAX ELEVATION={hi:.4}");
    }
    let _ = writeln!(out, "COLOR RAMP={}", ramp.kind());
    let _ = writeln!(out, "COLOR MIN={}", ramp.z_min());
    let _ = writeln!(out, "COLOR MAX={}", ramp.z_max());
    let _ = writeln!(out, "AZIMUTH={}", camera.azimuth());
    let _ = writeln!(out, "ELEVATION ANGLE={}", camera.elevation());
    let _ = writeln!(out, "ZOOM={}", camera.zoom());
    out
}
