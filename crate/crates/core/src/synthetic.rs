//! Deterministic synthetic terrain for examples and tests.
//!
//! The tiles imitate a 2° × 2° plateau around 76°–78° E, 17°–19° N with
//! elevations of roughly 540–640 m. Every value is a whole meter so it
//! survives a DTED round trip unchanged.

use crate::raster::{ElevationGrid, GeoBounds};
use crate::shapefile::{Polygon, Ring};

pub const WEST: f64 = 76.0;
pub const NORTH: f64 = 19.0;

/// Elevation at global node `(gi, gj)` of a `(2 posts - 1)²` lattice.
fn plateau(gi: usize, gj: usize, posts: usize) -> f64 {
    let n = (2 * posts - 2) as f64;
    let (x, y) = (gj as f64 / n, gi as f64 / n);
    let ridge = (std::f64::consts::PI * (1.3 * x + 0.4 * y)).sin();
    let bowl = ((x - 0.45).powi(2) + (y - 0.55).powi(2)).sqrt();
    (590.0 + 35.0 * ridge - 60.0 * bowl + 6.0 * (23.0 * x).sin() * (17.0 * y).cos()).round()
}

/// Four `posts × posts` one-degree tiles in north-west, north-east,
/// south-west, south-east order. Neighbors share their common edge samples.
pub fn latur_tiles(posts: usize) -> [ElevationGrid; 4] {
    assert!(posts >= 2, "a tile needs at least two posts per side");
    [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(r, c)| {
        let west = WEST + c as f64;
        let north = NORTH - r as f64;
        let bounds = GeoBounds::new(west, west + 1.0, north - 1.0, north).expect("tile bounds are valid");
        let (oi, oj) = (r * (posts - 1), c * (posts - 1));
        ElevationGrid::from_fn(posts, posts, bounds, |i, j| plateau(oi + i, oj + j, posts))
            .expect("synthetic values are finite")
    })
}

/// Irregular district-like outline inside the four tiles.
pub fn latur_boundary() -> Polygon {
    let pts = vec![
        (76.21, 18.12),
        (76.48, 17.87),
        (76.95, 17.93),
        (77.29, 18.10),
        (77.18, 18.42),
        (77.27, 18.71),
        (76.92, 18.84),
        (76.63, 18.66),
        (76.40, 18.78),
        (76.25, 18.50),
    ];
    Polygon::new(vec![Ring::new(pts).expect("outline has enough points")]).expect("outline is valid")
}

/// Cone of height `height` meters centered in an `n × n` grid, zero outside
/// the inscribed circle.
pub fn cone_grid(n: usize, height: f64) -> ElevationGrid {
    let bounds = GeoBounds::new(WEST, WEST + 1.0, NORTH - 1.0, NORTH).expect("cone bounds are valid");
    let c = (n - 1) as f64 / 2.0;
    ElevationGrid::from_fn(n, n, bounds, |i, j| {
        let r = ((i as f64 - c).powi(2) + (j as f64 - c).powi(2)).sqrt();
        (height * (1.0 - r / c)).max(0.0)
    })
    .expect("cone values are finite")
}
