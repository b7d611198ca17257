//! Z-buffered triangle rasterization.
//!
//! Vertices are snapped to a fixed-point lattice with 8 sub-pixel bits and
//! coverage is decided with exact integer edge functions at pixel centers.
//! Shared edges follow the top-left rule, so a pixel center on an edge between
//! two triangles belongs to exactly one of them. Depth ties go to the lower
//! triangle index, which makes the result independent of submission order and
//! of how the image is split into bands.

use rayon::prelude::*;

use crate::color::Rgb;
use crate::surface::ShadingMode;

use super::camera::ScreenTriangle;

const SUBPIXEL_BITS: u32 = 8;
const ONE: i64 = 1 << SUBPIXEL_BITS;
const HALF: i64 = ONE / 2;
/// Triangles reaching beyond this many pixels from the origin are skipped.
pub const COORD_LIMIT: f64 = (1u64 << 21) as f64;
const BAND_ROWS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, background: Rgb) -> Image {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n * 3);
        for _ in 0..n {
            pixels.extend_from_slice(&background.to_array());
        }
        Image {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major RGB8.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let k = (y as usize * self.width as usize + x as usize) * 3;
        Rgb(self.pixels[k], self.pixels[k + 1], self.pixels[k + 2])
    }
}

/// Triangle prepared for scan conversion: counter-clockwise in fixed point.
struct Setup {
    index: u32,
    xs: [i64; 3],
    ys: [i64; 3],
    depth: [f64; 3],
    colors: [Rgb; 3],
    area: i64,
    /// Pixel rows and columns, inclusive, that may be touched.
    rows: (usize, usize),
    cols: (usize, usize),
}

fn to_fixed(v: f64) -> i64 {
    (v * ONE as f64).round() as i64
}

fn edge(ax: i64, ay: i64, bx: i64, by: i64, px: i64, py: i64) -> i64 {
    (bx - ax) * (py - ay) - (by - ay) * (px - ax)
}

fn is_top_left(ax: i64, ay: i64, bx: i64, by: i64) -> bool {
    let (dx, dy) = (bx - ax, by - ay);
    (dy == 0 && dx > 0) || dy < 0
}

fn setup(index: usize, tri: &ScreenTriangle, width: u32, height: u32) -> Option<Setup> {
    let v = &tri.vertices;
    if !v.iter().flatten().all(|c| c.is_finite()) {
        return None;
    }
    if v.iter().any(|p| p[0].abs() > COORD_LIMIT || p[1].abs() > COORD_LIMIT) {
        return None;
    }
    let mut xs = v.map(|p| to_fixed(p[0]));
    let mut ys = v.map(|p| to_fixed(p[1]));
    let mut depth = v.map(|p| p[2]);
    let mut colors = tri.colors;
    let mut area = edge(xs[0], ys[0], xs[1], ys[1], xs[2], ys[2]);
    if area < 0 {
        xs.swap(1, 2);
        ys.swap(1, 2);
        depth.swap(1, 2);
        colors.swap(1, 2);
        area = -area;
    }
    // Pixel (x, y) has its center at fixed-point (x * ONE + HALF, y * ONE + HALF).
    // Lines light the pixel containing them, so their range is by floor instead.
    let span = |lo: i64, hi: i64, n: u32| -> Option<(usize, usize)> {
        let (first, last) = if area == 0 {
            (lo.div_euclid(ONE), hi.div_euclid(ONE))
        } else {
            ((lo - HALF + ONE - 1).div_euclid(ONE), (hi - HALF).div_euclid(ONE))
        };
        let (first, last) = (first.max(0), last.min(n as i64 - 1));
        (first <= last).then_some((first as usize, last as usize))
    };
    let cols = span(*xs.iter().min()?, *xs.iter().max()?, width)?;
    let rows = span(*ys.iter().min()?, *ys.iter().max()?, height)?;
    Some(Setup {
        index: index as u32,
        xs,
        ys,
        depth,
        colors,
        area,
        rows,
        cols,
    })
}

struct Band<'a> {
    y0: usize,
    width: usize,
    pixels: &'a mut [u8],
    depth: Vec<f64>,
    owner: Vec<u32>,
}

impl Band<'_> {
    fn plot(&mut self, x: usize, y: usize, z: f64, index: u32, color: Rgb) {
        let k = (y - self.y0) * self.width + x;
        let (dz, di) = (self.depth[k], self.owner[k]);
        if z < dz || (z == dz && index < di) {
            self.depth[k] = z;
            self.owner[k] = index;
            self.pixels[k * 3..k * 3 + 3].copy_from_slice(&color.to_array());
        }
    }

    fn rows(&self) -> (usize, usize) {
        (self.y0, self.y0 + self.pixels.len() / (3 * self.width) - 1)
    }

    fn fill(&mut self, s: &Setup, mode: ShadingMode) {
        let (band_lo, band_hi) = self.rows();
        let (r0, r1) = (s.rows.0.max(band_lo), s.rows.1.min(band_hi));
        if r0 > r1 {
            return;
        }
        let [x0, x1, x2] = s.xs;
        let [y0, y1, y2] = s.ys;
        let bias = [
            if is_top_left(x1, y1, x2, y2) { 0 } else { -1 },
            if is_top_left(x2, y2, x0, y0) { 0 } else { -1 },
            if is_top_left(x0, y0, x1, y1) { 0 } else { -1 },
        ];
        let area = s.area as f64;
        for py in r0..=r1 {
            let cy = py as i64 * ONE + HALF;
            for px in s.cols.0..=s.cols.1 {
                let cx = px as i64 * ONE + HALF;
                let w0 = edge(x1, y1, x2, y2, cx, cy);
                let w1 = edge(x2, y2, x0, y0, cx, cy);
                let w2 = edge(x0, y0, x1, y1, cx, cy);
                if w0 + bias[0] < 0 || w1 + bias[1] < 0 || w2 + bias[2] < 0 {
                    continue;
                }
                let (b1, b2) = (w1 as f64 / area, w2 as f64 / area);
                let z = s.depth[0] + b1 * (s.depth[1] - s.depth[0]) + b2 * (s.depth[2] - s.depth[0]);
                let color = match mode {
                    ShadingMode::Flat => s.colors[0],
                    ShadingMode::Interpolated => blend(&s.colors, b1, b2),
                };
                self.plot(px, py, z, s.index, color);
            }
        }
    }

    /// Zero-area triangles collapse to their longest edge, drawn one pixel per
    /// column (or row, when steep).
    fn line(&mut self, s: &Setup) {
        let (band_lo, band_hi) = self.rows();
        let pairs = [(0, 1), (1, 2), (2, 0)];
        let len = |&(a, b): &(usize, usize)| {
            let (dx, dy) = (s.xs[b] - s.xs[a], s.ys[b] - s.ys[a]);
            dx.abs().max(dy.abs())
        };
        let &(a, b) = pairs.iter().max_by_key(|p| (len(p), std::cmp::Reverse(p.0))).unwrap();
        let (mut a, mut b) = (a, b);
        let steep = (s.ys[b] - s.ys[a]).abs() > (s.xs[b] - s.xs[a]).abs();
        let major = |k: usize| if steep { s.ys[k] } else { s.xs[k] };
        let minor = |k: usize| if steep { s.xs[k] } else { s.ys[k] };
        if major(a) > major(b) {
            std::mem::swap(&mut a, &mut b);
        }
        let (m0, m1) = (major(a), major(b));
        let (n0, n1) = (minor(a), minor(b));
        let limit = if steep { (band_lo, band_hi) } else { (0, self.width - 1) };
        // Pixels whose center satisfies m0 <= center <= m1 along the major axis.
        let first = (m0 - HALF + ONE - 1).div_euclid(ONE).max(limit.0 as i64);
        let last = (m1 - HALF).div_euclid(ONE).min(limit.1 as i64);
        for p in first..=last {
            let c = p * ONE + HALF;
            let f = if m1 > m0 { (c - m0) as f64 / (m1 - m0) as f64 } else { 0.0 };
            let n = n0 as f64 + f * (n1 - n0) as f64;
            let q = (n / ONE as f64).floor() as i64;
            let (px, py) = if steep { (q, p) } else { (p, q) };
            if px < 0 || px >= self.width as i64 || py < band_lo as i64 || py > band_hi as i64 {
                continue;
            }
            let z = s.depth[a] + f * (s.depth[b] - s.depth[a]);
            self.plot(px as usize, py as usize, z, s.index, s.colors[a]);
        }
    }
}

fn blend(c: &[Rgb; 3], b1: f64, b2: f64) -> Rgb {
    let ch = |a: u8, b: u8, d: u8| {
        let (a, b, d) = (a as f64, b as f64, d as f64);
        (a + b1 * (b - a) + b2 * (d - a)).round().clamp(0.0, 255.0) as u8
    };
    Rgb(
        ch(c[0].0, c[1].0, c[2].0),
        ch(c[0].1, c[1].1, c[2].1),
        ch(c[0].2, c[1].2, c[2].2),
    )
}

/// Draws `triangles` over a `background` canvas. `parallel` splits the image
/// into horizontal bands processed on the rayon pool; the output is identical
/// either way.
pub fn rasterize(
    triangles: &[ScreenTriangle],
    width: u32,
    height: u32,
    background: Rgb,
    mode: ShadingMode,
    parallel: bool,
) -> Image {
    let mut image = Image::new(width, height, background);
    if width == 0 || height == 0 {
        return image;
    }
    let setups: Vec<Setup> = triangles
        .iter()
        .enumerate()
        .filter_map(|(k, t)| setup(k, t, width, height))
        .collect();
    let w = width as usize;
    let run = |(b, pixels): (usize, &mut [u8])| {
        let y0 = b * BAND_ROWS;
        let n = pixels.len() / 3;
        let mut band = Band {
            y0,
            width: w,
            pixels,
            depth: vec![f64::INFINITY; n],
            owner: vec![u32::MAX; n],
        };
        let (lo, hi) = band.rows();
        let mine: Vec<&Setup> = setups.iter().filter(|s| s.rows.0 <= hi && s.rows.1 >= lo).collect();
        for s in mine {
            if s.area == 0 {
                band.line(s);
            } else {
                band.fill(s, mode);
            }
        }
    };
    let chunks = image.pixels.chunks_mut(BAND_ROWS * w * 3).enumerate();
    if parallel {
        chunks.par_bridge().for_each(run);
    } else {
        chunks.for_each(run);
    }
    image
}
