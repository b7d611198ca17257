//! ASCII PLY export of triangle meshes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::color::Rgb;
use crate::mesh::{MeshColors, TriangleMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlyError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("malformed PLY: {0}")]
    Format(String),
}

/// Serializes `mesh` as ASCII PLY. Flat meshes carry colors on the face
/// element, interpolated meshes on the vertex element.
pub fn export_ply(mesh: &TriangleMesh) -> Result<Vec<u8>, PlyError> {
    if mesh.triangles().is_empty() {
        return Err(PlyError::Empty);
    }
    let b = mesh.bounds();
    let (vertex_colors, face_colors) = match mesh.colors() {
        MeshColors::PerVertex(c) => (Some(c), None),
        MeshColors::PerFace(c) => (None, Some(c)),
    };
    let mut s = String::new();
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(
        s,
        "comment bounds west={} east={} south={} north={}",
        b.west, b.east, b.south, b.north
    );
    let _ = writeln!(s, "comment vertical_unit={}", mesh.unit());
    let _ = writeln!(s, "element vertex {}", mesh.vertices().len());
    s.push_str("property float x\nproperty float y\nproperty float z\n");
    if vertex_colors.is_some() {
        s.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    let _ = writeln!(s, "element face {}", mesh.triangles().len());
    s.push_str("property list uchar int vertex_indices\n");
    if face_colors.is_some() {
        s.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    s.push_str("end_header\n");

    for (k, v) in mesh.vertices().iter().enumerate() {
        let [x, y, z] = v.position.map(|c| c as f32);
        let _ = write!(s, "{x} {y} {z}");
        if let Some(c) = vertex_colors {
            let Rgb(r, g, bl) = c[k];
            let _ = write!(s, " {r} {g} {bl}");
        }
        s.push('\n');
    }
    for (k, t) in mesh.triangles().iter().enumerate() {
        let _ = write!(s, "3 {} {} {}", t[0], t[1], t[2]);
        if let Some(c) = face_colors {
            let Rgb(r, g, bl) = c[k];
            let _ = write!(s, " {r} {g} {bl}");
        }
        s.push('\n');
    }
    Ok(s.into_bytes())
}

/// What [`read_ply`] recovers from a file written by [`export_ply`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlyContents {
    pub vertices: Vec<[f32; 3]>,
    pub vertex_colors: Vec<Rgb>,
    pub faces: Vec<[u32; 3]>,
    pub face_colors: Vec<Rgb>,
    pub comments: Vec<String>,
}

/// Minimal reader for the ASCII subset produced by [`export_ply`].
pub fn read_ply(bytes: &[u8]) -> Result<PlyContents, PlyError> {
    let text = std::str::from_utf8(bytes).map_err(|_| PlyError::Format("not UTF-8".into()))?;
    let mut lines = text.lines();
    if lines.next() != Some("ply") || lines.next() != Some("format ascii 1.0") {
        return Err(PlyError::Format("missing ascii PLY preamble".into()));
    }
    let mut out = PlyContents::default();
    // (element name, count, property count)
    let mut elements: Vec<(String, usize, usize)> = Vec::new();
    loop {
        let line = lines.next().ok_or_else(|| PlyError::Format("header not terminated".into()))?;
        let mut words = line.split_whitespace();
        match words.next() {
            Some("end_header") => break,
            Some("comment") => out.comments.push(line["comment".len()..].trim().to_string()),
            Some("element") => {
                let name = words.next().unwrap_or_default().to_string();
                let count = words
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| PlyError::Format(format!("bad element line {line:?}")))?;
                elements.push((name, count, 0));
            }
            Some("property") => match elements.last_mut() {
                Some(e) => e.2 += 1,
                None => return Err(PlyError::Format("property before element".into())),
            },
            _ => return Err(PlyError::Format(format!("unexpected header line {line:?}"))),
        }
    }
    let parse_err = |line: &str| PlyError::Format(format!("bad body line {line:?}"));
    for (name, count, props) in elements {
        for _ in 0..count {
            let line = lines.next().ok_or_else(|| PlyError::Format(format!("{name} list truncated")))?;
            let w: Vec<&str> = line.split_whitespace().collect();
            let rgb = |k: usize| -> Result<Rgb, PlyError> {
                let c: Vec<u8> = w[k..k + 3]
                    .iter()
                    .map(|x| x.parse().map_err(|_| parse_err(line)))
                    .collect::<Result<_, _>>()?;
                Ok(Rgb(c[0], c[1], c[2]))
            };
            match name.as_str() {
                "vertex" => {
                    if w.len() != props {
                        return Err(parse_err(line));
                    }
                    let mut p = [0f32; 3];
                    for (dst, src) in p.iter_mut().zip(&w) {
                        *dst = src.parse().map_err(|_| parse_err(line))?;
                    }
                    out.vertices.push(p);
                    if props == 6 {
                        out.vertex_colors.push(rgb(3)?);
                    }
                }
                "face" => {
                    if w.len() != 3 + props || w[0] != "3" {
                        return Err(parse_err(line));
                    }
                    let mut f = [0u32; 3];
                    for (dst, src) in f.iter_mut().zip(&w[1..4]) {
                        *dst = src.parse().map_err(|_| parse_err(line))?;
                    }
                    out.faces.push(f);
                    if props == 4 {
                        out.face_colors.push(rgb(4)?);
                    }
                }
                _ => return Err(PlyError::Format(format!("unknown element {name}"))),
            }
        }
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(PlyError::Format("trailing data after last element".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::{ColorRamp, RampKind};
    use crate::mesh::triangulate;
    use crate::raster::{ElevationGrid, GeoBounds, DEFAULT_NODATA};
    use crate::surface::{build_surface, colorize, ShadingMode, VerticalUnit};
    use proptest::prelude::*;

    fn mesh(rows: usize, cols: usize, mode: ShadingMode, mut f: impl FnMut(usize, usize) -> f64) -> TriangleMesh {
        let b = GeoBounds::new(76.0, 77.0, 18.0, 19.0).unwrap();
        let g = ElevationGrid::from_fn(rows, cols, b, &mut f).unwrap();
        let s = build_surface(&g, VerticalUnit::Feet).unwrap();
        let ramp = ColorRamp::new(RampKind::Atlas, 0.0, 3000.0).unwrap();
        triangulate(&s, &colorize(&s, &ramp, mode), 1.0).unwrap()
    }

    fn text(m: &TriangleMesh) -> String {
        String::from_utf8(export_ply(m).unwrap()).unwrap()
    }

    #[test]
    fn header_counts() {
        let t = text(&mesh(2, 2, ShadingMode::Interpolated, |_, _| 600.0));
        assert!(t.contains("element vertex 4\n"));
        assert!(t.contains("element face 2\n"));
        assert!(t.contains("comment vertical_unit=feet\n"));
        assert!(t.contains("comment bounds west=76 east=77 south=18 north=19\n"));
    }

    #[test]
    fn color_placement_follows_shading() {
        let flat = text(&mesh(3, 3, ShadingMode::Flat, |i, j| (i * j) as f64));
        let (head, _) = flat.split_once("element face").unwrap();
        assert!(!head.contains("red"));
        assert!(flat.split_once("element face").unwrap().1.contains("property uchar red"));
        let interp = text(&mesh(3, 3, ShadingMode::Interpolated, |i, j| (i * j) as f64));
        let (head, tail) = interp.split_once("element face").unwrap();
        assert!(head.contains("property uchar red"));
        assert!(!tail.split_once("end_header").unwrap().0.contains("red"));
    }

    #[test]
    fn deterministic() {
        let a = export_ply(&mesh(9, 7, ShadingMode::Flat, |i, j| (i * 31 + j * 17) as f64)).unwrap();
        let b = export_ply(&mesh(9, 7, ShadingMode::Flat, |i, j| (i * 31 + j * 17) as f64)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reader_rejects_garbage() {
        assert!(read_ply(b"ply\nformat binary_little_endian 1.0\n").is_err());
        assert!(read_ply(b"ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn round_trip(rows in 2usize..9, cols in 2usize..9, seed in any::<u64>(), interp in any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mode = if interp { ShadingMode::Interpolated } else { ShadingMode::Flat };
            let values: Vec<f64> = (0..rows * cols)
                .map(|_| if rng.gen_bool(0.1) { DEFAULT_NODATA } else { rng.gen_range(0.0..900.0) })
                .collect();
            let b = GeoBounds::new(76.0, 77.0, 18.0, 19.0).unwrap();
            let g = ElevationGrid::new(rows, cols, values, b).unwrap();
            let s = build_surface(&g, VerticalUnit::Feet).unwrap();
            let ramp = ColorRamp::new(RampKind::Hsv, 0.0, 3000.0).unwrap();
            let Ok(m) = triangulate(&s, &colorize(&s, &ramp, mode), 1.0) else { return Ok(()) };
            let back = read_ply(&export_ply(&m).unwrap()).unwrap();
            prop_assert_eq!(back.faces.as_slice(), m.triangles());
            let pos: Vec<[f32; 3]> = m.vertices().iter().map(|v| v.position.map(|c| c as f32)).collect();
            prop_assert_eq!(back.vertices, pos);
            match m.colors() {
                MeshColors::PerVertex(c) => prop_assert_eq!(&back.vertex_colors, c),
                MeshColors::PerFace(c) => prop_assert_eq!(&back.face_colors, c),
            }
        }
    }
}
