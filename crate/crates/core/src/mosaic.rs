//! Tile concatenation.
//!
//! Adjacent node-registered tiles either abut (the right tile starts one node
//! spacing past the left tile's east edge) or share their edge line, in which
//! case the duplicated line is reconciled with an [`EdgePolicy`]. Which case
//! applies is decided from the bounds alone.
//!
//! The 2 × 2 composition is
//!
//! ```text
//! H1 = horzcat(TL, TR)
//! H2 = horzcat(BL, BR)
//! H  = vertcat(H1, H2)
//! ```
//!
//! and [`mosaic_tiles`] generalises it to any dense `r × c` layout: each tile row
//! is concatenated left to right, then the strips top to bottom.

use thiserror::Error;

use crate::raster::{ElevationGrid, GeoBounds, GridError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Shared samples must agree where both are valid.
    #[default]
    Strict,
    /// Keep the left (or top) tile's sample, falling back to the other tile
    /// where it is nodata.
    PreferFirst,
    /// Mean of the two samples where both are valid.
    Average,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MosaicError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("tiles are not adjacent: {0}")]
    Adjacency(String),
    #[error("shared {axis} disagrees at {axis_index} {index}: {first} vs {second}")]
    Seam {
        /// `"column"` for horizontal seams, `"row"` for vertical ones.
        axis: &'static str,
        /// Row index of a vertical shared column, or column index of a shared row.
        index: usize,
        axis_index: &'static str,
        first: f64,
        second: f64,
    },
    #[error("layout error: {0}")]
    Layout(String),
    #[error("tiles {first} and {second}: {source}")]
    Tiles {
        first: usize,
        second: usize,
        source: Box<MosaicError>,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
}

impl MosaicError {
    /// Row (horizontal seam) or column (vertical seam) of the first mismatch.
    pub fn seam_index(&self) -> Option<usize> {
        match self {
            MosaicError::Seam { index, .. } => Some(*index),
            MosaicError::Tiles { source, .. } => source.seam_index(),
            _ => None,
        }
    }
}

fn spacings(g: &ElevationGrid) -> Result<(f64, f64), MosaicError> {
    match (g.lon_spacing(), g.lat_spacing()) {
        (Some(dx), Some(dy)) => Ok((dx, dy)),
        _ => Err(MosaicError::Shape(format!(
            "tiles need at least 2 x 2 nodes, got {} x {}",
            g.rows(),
            g.cols()
        ))),
    }
}

/// Whether spacing `b` stays within half of spacing `a` after `steps` nodes.
fn spacing_compatible(a: f64, b: f64, steps: usize) -> bool {
    (a - b).abs() * steps as f64 <= 0.5 * a
}

/// Number of shared lines (0 or 1) between an edge at `end` and a tile
/// starting at `start`, given node spacing `step`.
fn overlap(end: f64, start: f64, step: f64) -> Option<usize> {
    let gap = start - end;
    if gap.abs() <= 0.5 * step {
        Some(1)
    } else if (gap - step).abs() <= 0.5 * step {
        Some(0)
    } else {
        None
    }
}

fn reconcile(
    a: f64,
    b: f64,
    a_valid: bool,
    b_valid: bool,
    nodata: f64,
    policy: EdgePolicy,
) -> Result<f64, (f64, f64)> {
    Ok(match (a_valid, b_valid) {
        (true, true) => match policy {
            EdgePolicy::Strict if a != b => return Err((a, b)),
            EdgePolicy::Strict | EdgePolicy::PreferFirst => a,
            EdgePolicy::Average => 0.5 * (a + b),
        },
        (true, false) => a,
        (false, true) => b,
        (false, false) => nodata,
    })
}

/// Concatenates `right` to the east of `left`.
pub fn horzcat(
    left: &ElevationGrid,
    right: &ElevationGrid,
    policy: EdgePolicy,
) -> Result<ElevationGrid, MosaicError> {
    if left.rows() != right.rows() {
        return Err(MosaicError::Shape(format!(
            "horzcat needs equal row counts, got {} and {}",
            left.rows(),
            right.rows()
        )));
    }
    let (dx, dy) = spacings(left)?;
    let (rdx, rdy) = spacings(right)?;
    let (lb, rb) = (left.bounds(), right.bounds());
    if !spacing_compatible(dx, rdx, right.cols() - 1) || !spacing_compatible(dy, rdy, right.rows() - 1) {
        return Err(MosaicError::Adjacency(format!(
            "node spacing differs: ({dx}, {dy}) vs ({rdx}, {rdy})"
        )));
    }
    if (lb.north - rb.north).abs() > 0.5 * dy || (lb.south - rb.south).abs() > 0.5 * dy {
        return Err(MosaicError::Adjacency(format!(
            "latitude extents differ: [{}, {}] vs [{}, {}]",
            lb.south, lb.north, rb.south, rb.north
        )));
    }
    let shared = overlap(lb.east, rb.west, dx).ok_or_else(|| {
        MosaicError::Adjacency(format!(
            "left tile ends at {} but right tile starts at {} (spacing {dx})",
            lb.east, rb.west
        ))
    })?;

    let rows = left.rows();
    let (ln, rn) = (left.cols(), right.cols());
    let cols = ln + rn - shared;
    let nodata = left.nodata();
    let mut values = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let lrow = left.row(i);
        let rrow = right.row(i);
        values.extend_from_slice(&lrow[..ln - shared]);
        if shared == 1 {
            let (a, b) = (lrow[ln - 1], rrow[0]);
            let v = reconcile(a, b, !left.is_nodata(a), !right.is_nodata(b), nodata, policy).map_err(
                |(first, second)| MosaicError::Seam {
                    axis: "column",
                    axis_index: "row",
                    index: i,
                    first,
                    second,
                },
            )?;
            values.push(v);
        }
        values.extend(
            rrow[shared..]
                .iter()
                .map(|&v| if right.is_nodata(v) { nodata } else { v }),
        );
    }
    Ok(ElevationGrid::with_nodata(rows, cols, values, lb.union(rb), nodata)?)
}

/// Concatenates `bottom` to the south of `top`.
pub fn vertcat(
    top: &ElevationGrid,
    bottom: &ElevationGrid,
    policy: EdgePolicy,
) -> Result<ElevationGrid, MosaicError> {
    if top.cols() != bottom.cols() {
        return Err(MosaicError::Shape(format!(
            "vertcat needs equal column counts, got {} and {}",
            top.cols(),
            bottom.cols()
        )));
    }
    let (dx, dy) = spacings(top)?;
    let (bdx, bdy) = spacings(bottom)?;
    let (tb, bb) = (top.bounds(), bottom.bounds());
    if !spacing_compatible(dx, bdx, bottom.cols() - 1) || !spacing_compatible(dy, bdy, bottom.rows() - 1) {
        return Err(MosaicError::Adjacency(format!(
            "node spacing differs: ({dx}, {dy}) vs ({bdx}, {bdy})"
        )));
    }
    if (tb.west - bb.west).abs() > 0.5 * dx || (tb.east - bb.east).abs() > 0.5 * dx {
        return Err(MosaicError::Adjacency(format!(
            "longitude extents differ: [{}, {}] vs [{}, {}]",
            tb.west, tb.east, bb.west, bb.east
        )));
    }
    // Walking south: the top tile "ends" at its south edge.
    let shared = overlap(-tb.south, -bb.north, dy).ok_or_else(|| {
        MosaicError::Adjacency(format!(
            "top tile ends at {} but bottom tile starts at {} (spacing {dy})",
            tb.south, bb.north
        ))
    })?;

    let cols = top.cols();
    let rows = top.rows() + bottom.rows() - shared;
    let nodata = top.nodata();
    let mut values = Vec::with_capacity(rows * cols);
    values.extend_from_slice(&top.values()[..(top.rows() - shared) * cols]);
    if shared == 1 {
        let last = top.row(top.rows() - 1);
        let first = bottom.row(0);
        for j in 0..cols {
            let (a, b) = (last[j], first[j]);
            let v = reconcile(a, b, !top.is_nodata(a), !bottom.is_nodata(b), nodata, policy).map_err(
                |(first, second)| MosaicError::Seam {
                    axis: "row",
                    axis_index: "column",
                    index: j,
                    first,
                    second,
                },
            )?;
            values.push(v);
        }
    }
    values.extend(
        bottom.values()[shared * cols..]
            .iter()
            .map(|&v| if bottom.is_nodata(v) { nodata } else { v }),
    );
    Ok(ElevationGrid::with_nodata(rows, cols, values, tb.union(bb), nodata)?)
}

/// `vertcat(horzcat(tl, tr), horzcat(bl, br))`.
pub fn mosaic4(
    tl: &ElevationGrid,
    tr: &ElevationGrid,
    bl: &ElevationGrid,
    br: &ElevationGrid,
    policy: EdgePolicy,
) -> Result<ElevationGrid, MosaicError> {
    let h1 = horzcat(tl, tr, policy)?;
    let h2 = horzcat(bl, br, policy)?;
    vertcat(&h1, &h2, policy)
}

/// Dense `rows × cols` arrangement of input tiles, north row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileLayout {
    rows: usize,
    cols: usize,
    /// Row-major indices into the tile slice the layout was built from.
    order: Vec<usize>,
}

impl TileLayout {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Index of the input tile at layout position `(r, c)`.
    pub fn tile(&self, r: usize, c: usize) -> usize {
        self.order[r * self.cols + c]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Orders tiles by (north descending, west ascending) into a dense layout.
pub fn arrange_tiles(tiles: &[ElevationGrid]) -> Result<TileLayout, MosaicError> {
    let Some(first) = tiles.first() else {
        return Err(MosaicError::Layout("no tiles given".into()));
    };
    let (dx, dy) = spacings(first)?;
    for (k, t) in tiles.iter().enumerate() {
        let (tdx, tdy) = spacings(t)?;
        if !spacing_compatible(dx, tdx, t.cols() - 1) || !spacing_compatible(dy, tdy, t.rows() - 1) {
            return Err(MosaicError::Layout(format!(
                "tile {k} spacing ({tdx}, {tdy}) differs from tile 0 ({dx}, {dy})"
            )));
        }
    }

    let mut idx: Vec<usize> = (0..tiles.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ba, bb) = (tiles[a].bounds(), tiles[b].bounds());
        bb.north
            .total_cmp(&ba.north)
            .then(ba.west.total_cmp(&bb.west))
    });

    // Group into rows by north edge.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in idx {
        let north = tiles[k].bounds().north;
        match groups.last_mut() {
            Some(g) if (tiles[g[0]].bounds().north - north).abs() <= 0.5 * dy => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    for g in &mut groups {
        g.sort_by(|&a, &b| tiles[a].bounds().west.total_cmp(&tiles[b].bounds().west));
    }
    let cols = groups[0].len();
    if let Some(g) = groups.iter().find(|g| g.len() != cols) {
        return Err(MosaicError::Layout(format!(
            "ragged layout: tile rows hold {cols} and {} tiles",
            g.len()
        )));
    }

    let b = |k: usize| tiles[k].bounds();
    for (r, g) in groups.iter().enumerate() {
        for w in g.windows(2) {
            if (b(w[0]).south - b(w[1]).south).abs() > 0.5 * dy {
                return Err(MosaicError::Layout(format!(
                    "tiles {} and {} in row {r} have different south edges",
                    w[0], w[1]
                )));
            }
            if overlap(b(w[0]).east, b(w[1]).west, dx).is_none() {
                return Err(MosaicError::Layout(format!(
                    "tiles {} and {} in row {r} overlap or leave a gap",
                    w[0], w[1]
                )));
            }
        }
    }
    for pair in groups.windows(2) {
        for (&upper, &lower) in pair[0].iter().zip(&pair[1]) {
            if (b(upper).west - b(lower).west).abs() > 0.5 * dx
                || (b(upper).east - b(lower).east).abs() > 0.5 * dx
            {
                return Err(MosaicError::Layout(format!(
                    "tiles {upper} and {lower} are not aligned in a column"
                )));
            }
            if overlap(-b(upper).south, -b(lower).north, dy).is_none() {
                return Err(MosaicError::Layout(format!(
                    "tiles {upper} and {lower} overlap or leave a gap"
                )));
            }
        }
    }

    Ok(TileLayout {
        rows: groups.len(),
        cols,
        order: groups.into_iter().flatten().collect(),
    })
}

/// Arranges `tiles` and concatenates them: every tile row left to right, then
/// the resulting strips top to bottom. Errors name the offending input tiles.
pub fn mosaic_tiles(tiles: &[ElevationGrid], policy: EdgePolicy) -> Result<ElevationGrid, MosaicError> {
    let layout = arrange_tiles(tiles)?;
    mosaic_layout(tiles, &layout, policy)
}

pub fn mosaic_layout(
    tiles: &[ElevationGrid],
    layout: &TileLayout,
    policy: EdgePolicy,
) -> Result<ElevationGrid, MosaicError> {
    let wrap = |first: usize, second: usize| {
        move |e: MosaicError| MosaicError::Tiles {
            first,
            second,
            source: Box::new(e),
        }
    };
    let mut strips = Vec::with_capacity(layout.rows);
    // Column at which each tile starts within its strip, to map vertical seam
    // errors back to a tile pair.
    let mut starts = Vec::with_capacity(layout.rows);
    for r in 0..layout.rows {
        let mut strip = tiles[layout.tile(r, 0)].clone();
        let mut row_starts = vec![0];
        for c in 1..layout.cols {
            let (prev, next) = (layout.tile(r, c - 1), layout.tile(r, c));
            strip = horzcat(&strip, &tiles[next], policy).map_err(wrap(prev, next))?;
            row_starts.push(strip.cols() - tiles[next].cols());
        }
        strips.push(strip);
        starts.push(row_starts);
    }
    let mut strips = strips.into_iter();
    let mut out = strips.next().expect("layout has at least one row");
    for (r, strip) in strips.enumerate().map(|(k, s)| (k + 1, s)) {
        out = vertcat(&out, &strip, policy).map_err(|e| {
            let c = e
                .seam_index()
                .and_then(|col| starts[r].iter().rposition(|&s| s <= col))
                .unwrap_or(0);
            wrap(layout.tile(r - 1, c), layout.tile(r, c))(e)
        })?;
    }
    Ok(out)
}

/// Bounds covering every tile.
pub fn union_bounds(tiles: &[ElevationGrid]) -> Option<GeoBounds> {
    tiles.iter().map(|t| *t.bounds()).reduce(|a, b| a.union(&b))
}
