//! Polygon geometry from ESRI shapefile `.shp` main files, and point-in-polygon
//! queries used to crop grids.
//!
//! Only polygon (type 5) and null (type 0) records are understood. The `.shx`
//! index and `.dbf` attributes are not needed: records are walked sequentially.

use thiserror::Error;

use crate::raster::{GeoBounds, GridError};

pub const FILE_CODE: i32 = 9994;
pub const SHAPE_NULL: i32 = 0;
pub const SHAPE_POLYGON: i32 = 5;
const HEADER_LEN: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapefileError {
    #[error("shapefile format error: {0}")]
    Format(String),
    #[error("unsupported shape type {0} (only polygons are read)")]
    UnsupportedShapeType(i32),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Closed sequence of `(lon, lat)` vertices; the first point is repeated last.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    points: Vec<(f64, f64)>,
}

impl Ring {
    /// Builds a ring, appending the first point if the input is not closed.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Ring, ShapefileError> {
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(ShapefileError::InvalidRing("non-finite coordinate".into()));
        }
        if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
            if first != last {
                points.push(first);
            }
        }
        if points.len() < 4 {
            return Err(ShapefileError::InvalidRing(format!(
                "{} points including closure, need at least 4",
                points.len()
            )));
        }
        Ok(Ring { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.points.first() == self.points.last()
    }

    /// Consecutive vertex pairs, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Shoelace area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        ring_signed_area(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    rings: Vec<Ring>,
    bbox: GeoBounds,
}

impl Polygon {
    pub fn new(rings: Vec<Ring>) -> Result<Polygon, ShapefileError> {
        if rings.is_empty() {
            return Err(ShapefileError::InvalidRing("polygon has no rings".into()));
        }
        let (mut w, mut e, mut s, mut n) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in rings.iter().flat_map(|r| r.points()) {
            w = w.min(x);
            e = e.max(x);
            s = s.min(y);
            n = n.max(y);
        }
        // GeoBounds enforces geographic limits; a polygon only needs a box.
        if w >= e || s >= n {
            return Err(ShapefileError::InvalidRing("polygon has zero-area extent".into()));
        }
        let bbox = GeoBounds {
            west: w,
            east: e,
            south: s,
            north: n,
        };
        Ok(Polygon { rings, bbox })
    }

    /// Axis-aligned rectangle polygon.
    pub fn rectangle(west: f64, east: f64, south: f64, north: f64) -> Result<Polygon, ShapefileError> {
        Polygon::new(vec![Ring::new(vec![
            (west, south),
            (east, south),
            (east, north),
            (west, north),
        ])?])
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn bbox(&self) -> &GeoBounds {
        &self.bbox
    }

    pub fn contains(&self, lon: f64, lat: f64) -> bool {
        point_in_polygon(self, (lon, lat))
    }
}

pub fn ring_signed_area(ring: &Ring) -> f64 {
    0.5 * ring
        .edges()
        .map(|((x0, y0), (x1, y1))| x0 * y1 - x1 * y0)
        .sum::<f64>()
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    cross == 0.0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Even-odd test over all rings together, so holes drop out whatever their
/// winding. Points on an edge or vertex are inside.
pub fn point_in_polygon(poly: &Polygon, p: (f64, f64)) -> bool {
    let (px, py) = p;
    let b = &poly.bbox;
    if px < b.west || px > b.east || py < b.south || py > b.north {
        return false;
    }
    let mut inside = false;
    for ring in &poly.rings {
        for (a, c) in ring.edges() {
            if on_segment(p, a, c) {
                return true;
            }
            if (a.1 > py) != (c.1 > py) {
                // Crossing lies right of p iff p is left of the upward edge.
                let cross = (c.0 - a.0) * (py - a.1) - (c.1 - a.1) * (px - a.0);
                if (cross > 0.0) == (c.1 > a.1) {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

fn be_i32(bytes: &[u8], at: usize) -> i32 {
    i32::from_be_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn le_i32(bytes: &[u8], at: usize) -> i32 {
    i32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn le_f64(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

/// Parses every polygon record of a `.shp` file, skipping null records.
pub fn read_shp(bytes: &[u8]) -> Result<Vec<Polygon>, ShapefileError> {
    if bytes.len() < HEADER_LEN {
        return Err(ShapefileError::Format(format!(
            "file is {} bytes, shorter than the 100-byte header",
            bytes.len()
        )));
    }
    let code = be_i32(bytes, 0);
    if code != FILE_CODE {
        return Err(ShapefileError::Format(format!("file code {code}, expected {FILE_CODE}")));
    }
    let shape_type = le_i32(bytes, 32);
    if shape_type != SHAPE_POLYGON && shape_type != SHAPE_NULL {
        return Err(ShapefileError::UnsupportedShapeType(shape_type));
    }

    let mut polygons = Vec::new();
    let mut pos = HEADER_LEN;
    while pos < bytes.len() {
        if bytes.len() - pos < 8 {
            return Err(ShapefileError::Format(format!("truncated record header at byte {pos}")));
        }
        let number = be_i32(bytes, pos);
        let words = be_i32(bytes, pos + 4);
        if words < 2 {
            return Err(ShapefileError::Format(format!(
                "record {number}: content length {words} words is too short"
            )));
        }
        let len = words as usize * 2;
        let start = pos + 8;
        if bytes.len() - start < len {
            return Err(ShapefileError::Format(format!(
                "record {number}: truncated, {len} bytes declared"
            )));
        }
        if let Some(poly) = parse_record(number, &bytes[start..start + len])? {
            polygons.push(poly);
        }
        pos = start + len;
    }
    Ok(polygons)
}

fn parse_record(number: i32, rec: &[u8]) -> Result<Option<Polygon>, ShapefileError> {
    let shape_type = le_i32(rec, 0);
    match shape_type {
        SHAPE_NULL => return Ok(None),
        SHAPE_POLYGON => {}
        other => return Err(ShapefileError::UnsupportedShapeType(other)),
    }
    let truncated = || ShapefileError::Format(format!("record {number}: polygon content truncated"));
    if rec.len() < 44 {
        return Err(truncated());
    }
    let num_parts = le_i32(rec, 36);
    let num_points = le_i32(rec, 40);
    if num_parts < 1 || num_points < 1 {
        return Err(ShapefileError::Format(format!(
            "record {number}: {num_parts} parts, {num_points} points"
        )));
    }
    let (num_parts, num_points) = (num_parts as usize, num_points as usize);
    let parts_end = num_parts
        .checked_mul(4)
        .and_then(|n| n.checked_add(44))
        .ok_or_else(truncated)?;
    let points_end = num_points
        .checked_mul(16)
        .and_then(|n| n.checked_add(parts_end))
        .ok_or_else(truncated)?;
    if rec.len() < points_end {
        return Err(truncated());
    }
    let mut offsets: Vec<usize> = Vec::with_capacity(num_parts + 1);
    for k in 0..num_parts {
        let off = le_i32(rec, 44 + 4 * k);
        let prev = offsets.last().copied().unwrap_or(0);
        if off < 0 || off as usize >= num_points || (k > 0 && (off as usize) <= prev) || (k == 0 && off != 0) {
            return Err(ShapefileError::Format(format!(
                "record {number}: bad part offset {off}"
            )));
        }
        offsets.push(off as usize);
    }
    offsets.push(num_points);

    let point = |idx: usize| {
        let at = parts_end + 16 * idx;
        (le_f64(rec, at), le_f64(rec, at + 8))
    };
    let mut rings = Vec::with_capacity(num_parts);
    for w in offsets.windows(2) {
        let pts: Vec<(f64, f64)> = (w[0]..w[1]).map(point).collect();
        if pts.first() != pts.last() {
            log::warn!("record {number}: closing an unclosed ring of {} points", pts.len());
        }
        rings.push(Ring::new(pts)?);
    }
    Polygon::new(rings).map(Some)
}

fn put_bbox(out: &mut Vec<u8>, b: &GeoBounds) {
    for v in [b.west, b.south, b.east, b.north] {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Encodes polygons as a `.shp` main file, one record per polygon.
pub fn write_shp(polys: &[Polygon]) -> Vec<u8> {
    let mut body = Vec::new();
    for (idx, poly) in polys.iter().enumerate() {
        let mut rec = Vec::new();
        rec.extend_from_slice(&SHAPE_POLYGON.to_le_bytes());
        put_bbox(&mut rec, poly.bbox());
        rec.extend_from_slice(&(poly.rings().len() as i32).to_le_bytes());
        let n: usize = poly.rings().iter().map(|r| r.points().len()).sum();
        rec.extend_from_slice(&(n as i32).to_le_bytes());
        let mut offset = 0;
        for r in poly.rings() {
            rec.extend_from_slice(&(offset as i32).to_le_bytes());
            offset += r.points().len();
        }
        for &(x, y) in poly.rings().iter().flat_map(|r| r.points()) {
            rec.extend_from_slice(&x.to_le_bytes());
            rec.extend_from_slice(&y.to_le_bytes());
        }
        body.extend_from_slice(&(idx as i32 + 1).to_be_bytes());
        body.extend_from_slice(&((rec.len() / 2) as i32).to_be_bytes());
        body.extend_from_slice(&rec);
    }
    let mut out = Vec::with_capacity(100 + body.len());
    out.extend_from_slice(&FILE_CODE.to_be_bytes());
    out.extend_from_slice(&[0u8; 20]);
    out.extend_from_slice(&(((100 + body.len()) / 2) as i32).to_be_bytes());
    out.extend_from_slice(&1000i32.to_le_bytes());
    out.extend_from_slice(&SHAPE_POLYGON.to_le_bytes());
    match polys.iter().map(|p| *p.bbox()).reduce(|a, b| a.union(&b)) {
        Some(b) => put_bbox(&mut out, &b),
        None => out.extend_from_slice(&[0u8; 32]),
    }
    // Z and M ranges are unused for 2-D polygons.
    out.extend_from_slice(&[0u8; 32]);
    out.extend_from_slice(&body);
    out
}
