//! Elevation color ramps.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const WHITE: Rgb = Rgb(255, 255, 255);
    pub const BLACK: Rgb = Rgb(0, 0, 0);

    pub fn to_array(self) -> [u8; 3] {
        [self.0, self.1, self.2]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColorError {
    #[error("ramp position {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("color range needs z_min < z_max (got {z_min}, {z_max})")]
    EmptyRange { z_min: f64, z_max: f64 },
    #[error("unknown ramp {0:?} (expected gray, hsv or atlas)")]
    UnknownRamp(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampKind {
    #[default]
    Gray,
    /// Hue sweeps 240° (blue) at the bottom to 0° (red) at the top.
    Hsv,
    /// Hypsometric tint: green lowlands through khaki and brown to gray rock and
    /// white peaks.
    Atlas,
}

impl FromStr for RampKind {
    type Err = ColorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gray" | "grey" => Ok(RampKind::Gray),
            "hsv" => Ok(RampKind::Hsv),
            "atlas" => Ok(RampKind::Atlas),
            _ => Err(ColorError::UnknownRamp(s.to_string())),
        }
    }
}

impl fmt::Display for RampKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RampKind::Gray => "gray",
            RampKind::Hsv => "hsv",
            RampKind::Atlas => "atlas",
        })
    }
}

/// Control points of the atlas ramp.
pub const ATLAS_STOPS: [(f64, Rgb); 5] = [
    (0.00, Rgb(34, 139, 34)),
    (0.30, Rgb(240, 230, 140)),
    (0.60, Rgb(205, 133, 63)),
    (0.85, Rgb(139, 137, 137)),
    (1.00, Rgb(255, 255, 255)),
];

/// A ramp kind together with the elevation range it spans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorRamp {
    kind: RampKind,
    z_min: f64,
    z_max: f64,
}

impl ColorRamp {
    pub fn new(kind: RampKind, z_min: f64, z_max: f64) -> Result<Self, ColorError> {
        if !(z_min.is_finite() && z_max.is_finite() && z_min < z_max) {
            return Err(ColorError::EmptyRange { z_min, z_max });
        }
        Ok(ColorRamp { kind, z_min, z_max })
    }

    pub fn kind(&self) -> RampKind {
        self.kind
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn color(&self, z: f64) -> Rgb {
        ramp_color(normalize_z(z, self), self.kind).expect("normalized position is in range")
    }
}

/// Position of `z` within the ramp's range, clamped to `[0, 1]`.
pub fn normalize_z(z: f64, ramp: &ColorRamp) -> f64 {
    ((z - ramp.z_min) / (ramp.z_max - ramp.z_min)).clamp(0.0, 1.0)
}

fn channel(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn ramp_color(t: f64, kind: RampKind) -> Result<Rgb, ColorError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(ColorError::OutOfRange(t));
    }
    Ok(match kind {
        RampKind::Gray => {
            let g = channel(255.0 * t);
            Rgb(g, g, g)
        }
        RampKind::Hsv => hsv_to_rgb(240.0 * (1.0 - t), 1.0, 1.0),
        RampKind::Atlas => {
            let upper = ATLAS_STOPS
                .iter()
                .position(|&(s, _)| t <= s)
                .unwrap_or(ATLAS_STOPS.len() - 1)
                .max(1);
            let (t0, c0) = ATLAS_STOPS[upper - 1];
            let (t1, c1) = ATLAS_STOPS[upper];
            let f = (t - t0) / (t1 - t0);
            let lerp = |a: u8, b: u8| channel(a as f64 + (b as f64 - a as f64) * f);
            Rgb(lerp(c0.0, c1.0), lerp(c0.1, c1.1), lerp(c0.2, c1.2))
        }
    })
}

/// Hue in degrees, saturation and value in `[0, 1]`.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let h = h.rem_euclid(360.0);
    let c = v * s;
    let sector = h / 60.0;
    let x = c * (1.0 - (sector % 2.0 - 1.0).abs());
    let (r, g, b) = match sector as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    Rgb(
        channel(255.0 * (r + m)),
        channel(255.0 * (g + m)),
        channel(255.0 * (b + m)),
    )
}
