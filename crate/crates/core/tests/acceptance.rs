//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use geosurf::color::{ramp_color, ColorRamp, RampKind, Rgb};
use geosurf::crop::{crop_to_polygon, mask};
use geosurf::dted::{read_dted, write_dted, DtedError};
use geosurf::mesh::{triangulate, MeshColors};
use geosurf::mosaic::{mosaic_tiles, EdgePolicy};
use geosurf::ply::{export_ply, read_ply};
use geosurf::raster::{meters_to_feet, ElevationGrid, GeoBounds, DEFAULT_NODATA};
use geosurf::render::{project, rasterize, render_surface, write_png, Camera, Image};
use geosurf::shapefile::{read_shp, write_shp, Polygon, Ring};
use geosurf::surface::{build_surface, colorize, ShadingMode, VerticalUnit};
use geosurf::synthetic::{cone_grid, latur_boundary, latur_tiles};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("mosaic law: four 1201x1201 tiles give 2401x2401, index oracle, < 5 s", mosaic_law),
        ("DTED round trip on 500 random grids, corruption always detected", dted_round_trip),
        ("crop mask agrees with a winding-number oracle on 50 polygons", crop_oracle),
        ("631 m converts to [2069.7, 2070.7] ft", feet_constant),
        ("shading matrix sizes for 20 random surfaces", shading_sizes),
        ("ramp endpoint colors are exact", ramp_endpoints),
        ("mesh counting law for m, n in [2, 32]", mesh_counts),
        ("renderer determinism, rings, CRCs and external decoding", renderer),
        ("end-to-end synthetic pipeline to PLY and PNG, < 30 s", end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({detail}; {secs:.2} s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn mosaic_law() -> Outcome {
    const N: usize = 1201;
    let tiles = latur_tiles(N);
    // Present the tiles out of order; arrangement is by position.
    let shuffled = vec![tiles[3].clone(), tiles[0].clone(), tiles[2].clone(), tiles[1].clone()];
    let started = Instant::now();
    let out = mosaic_tiles(&shuffled, EdgePolicy::Strict).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure!(out.shape() == (2 * N - 1, 2 * N - 1), "shape {:?}", out.shape());
    let mut checked = 0usize;
    for (k, tile) in tiles.iter().enumerate() {
        let (oi, oj) = ((k / 2) * (N - 1), (k % 2) * (N - 1));
        for i in 0..N {
            let (src, dst) = (tile.row(i), &out.row(oi + i)[oj..oj + N]);
            for j in 0..N {
                ensure!(
                    src[j].to_bits() == dst[j].to_bits(),
                    "tile {k} node ({i}, {j}) landed as {} not {}",
                    dst[j],
                    src[j]
                );
            }
            checked += N;
        }
    }
    let b = out.bounds();
    ensure!((b.west, b.east, b.south, b.north) == (76.0, 78.0, 17.0, 19.0), "bounds {b:?}");
    ensure!(elapsed < Duration::from_secs(5), "mosaic took {elapsed:?}");
    Ok(format!("{checked} cells checked, mosaic {:.3} s", elapsed.as_secs_f64()))
}

fn dted_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xD7ED);
    let mut corruptions = 0;
    for case in 0..500 {
        let rows = rng.gen_range(2..=64);
        let cols = rng.gen_range(2..=64);
        let west = rng.gen_range(-180..179) as f64;
        let south = rng.gen_range(-90..89) as f64;
        let (lon_t, lat_t) = (rng.gen_range(1..=300u32), rng.gen_range(1..=300u32));
        let east = west + (cols - 1) as f64 * lon_t as f64 / 36_000.0;
        let north = south + (rows - 1) as f64 * lat_t as f64 / 36_000.0;
        let b = GeoBounds::new(west, east, south, north).map_err(|e| e.to_string())?;
        let g = ElevationGrid::from_fn(rows, cols, b, |_, _| {
            if rng.gen_bool(0.05) {
                DEFAULT_NODATA
            } else {
                rng.gen_range(-32767..=32767) as f64
            }
        })
        .map_err(|e| e.to_string())?;
        let bytes = write_dted(&g).map_err(|e| format!("case {case}: {e}"))?;
        let back = read_dted(&bytes).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(back == g, "case {case}: {rows}x{cols} grid differs after round trip");

        // One corrupted byte somewhere in the data records.
        let mut bad = bytes.clone();
        let at = rng.gen_range(3428..bad.len());
        bad[at] ^= rng.gen_range(1..=255u8);
        match read_dted(&bad) {
            Err(DtedError::Checksum { .. }) | Err(DtedError::Format(_)) => corruptions += 1,
            other => return Err(format!("case {case}: corruption at byte {at} not detected: {other:?}")),
        }
    }
    Ok(format!("500 grids, {corruptions}/500 corruptions detected"))
}

/// Independent inside test: nonzero winding number over all rings.
fn winding_inside(poly: &Polygon, (x, y): (f64, f64)) -> bool {
    let mut wn = 0i32;
    for ring in poly.rings() {
        for w in ring.points().windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let side = (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0);
            if y0 <= y {
                if y1 > y && side > 0.0 {
                    wn += 1;
                }
            } else if y1 <= y && side < 0.0 {
                wn -= 1;
            }
        }
    }
    wn != 0
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Simple star-shaped polygon with 3 to 12 vertices.
fn random_polygon(rng: &mut StdRng) -> Polygon {
    let n = rng.gen_range(3..=12);
    let (cx, cy) = (rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8));
    let step = std::f64::consts::TAU / n as f64;
    let pts = (0..n)
        .map(|k| {
            let a = (k as f64 + rng.gen_range(0.0..0.45)) * step;
            let r = rng.gen_range(0.05..0.6);
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect();
    Polygon::new(vec![Ring::new(pts).expect("ring")]).expect("polygon")
}

fn crop_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xC80F);
    let b = GeoBounds::new(0.0, 1.0, 0.0, 1.0).unwrap();
    let grid = ElevationGrid::from_fn(64, 64, b, |i, j| (i * 64 + j) as f64).unwrap();
    let (mut compared, mut skipped) = (0, 0);
    for case in 0..50 {
        let poly = random_polygon(&mut rng);
        // Go through the shapefile codec as the pipeline does.
        let poly = read_shp(&write_shp(&[poly])).map_err(|e| e.to_string())?.remove(0);
        let m = mask(&grid, std::slice::from_ref(&poly));
        for i in 0..64 {
            for j in 0..64 {
                let p = (grid.node_lon(j), grid.node_lat(i));
                let near = poly
                    .rings()
                    .iter()
                    .flat_map(|r| r.points().windows(2))
                    .any(|w| segment_distance(p, w[0], w[1]) < 1e-9);
                if near {
                    skipped += 1;
                    continue;
                }
                compared += 1;
                ensure!(m.get(i, j) == winding_inside(&poly, p), "polygon {case}, node ({i}, {j}) disagrees");
            }
        }
        let cropped = crop_to_polygon(&grid, std::slice::from_ref(&poly), false);
        ensure!(cropped.stats().valid_count == m.count(), "polygon {case}: crop and mask counts differ");
    }
    Ok(format!("{compared} nodes agree, {skipped} boundary nodes skipped"))
}

fn feet_constant() -> Outcome {
    let ft = meters_to_feet(631.0);
    ensure!((2069.7..=2070.7).contains(&ft), "631 m = {ft} ft");
    Ok(format!("{ft:.4} ft"))
}

fn shading_sizes() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5AD5);
    let b = GeoBounds::new(76.0, 77.0, 18.0, 19.0).unwrap();
    for _ in 0..20 {
        let (m, n) = (rng.gen_range(2..=80), rng.gen_range(2..=80));
        let g = ElevationGrid::from_fn(m, n, b, |_, _| rng.gen_range(0.0..900.0)).unwrap();
        let s = build_surface(&g, VerticalUnit::Feet).map_err(|e| e.to_string())?;
        let ramp = ColorRamp::new(RampKind::Gray, 0.0, 3000.0).unwrap();
        let interp = colorize(&s, &ramp, ShadingMode::Interpolated);
        let flat = colorize(&s, &ramp, ShadingMode::Flat);
        ensure!((interp.rows, interp.cols) == (m, n), "interpolated {m}x{n} gave {}x{}", interp.rows, interp.cols);
        ensure!((flat.rows, flat.cols) == (m - 1, n - 1), "flat {m}x{n} gave {}x{}", flat.rows, flat.cols);
        ensure!(interp.colors.len() == m * n && flat.colors.len() == (m - 1) * (n - 1), "color buffer length");
    }
    Ok("20 sizes".into())
}

fn ramp_endpoints() -> Outcome {
    let cases = [
        (RampKind::Gray, 0.0, Rgb(0, 0, 0)),
        (RampKind::Gray, 1.0, Rgb(255, 255, 255)),
        (RampKind::Hsv, 1.0, Rgb(255, 0, 0)),
        (RampKind::Atlas, 0.0, Rgb(34, 139, 34)),
        (RampKind::Atlas, 1.0, Rgb(255, 255, 255)),
    ];
    for (kind, t, want) in cases {
        let got = ramp_color(t, kind).map_err(|e| e.to_string())?;
        ensure!(got == want, "{kind}({t}) = {got:?}, want {want:?}");
    }
    Ok("5 endpoints".into())
}

fn mesh_counts() -> Outcome {
    let b = GeoBounds::new(76.0, 77.0, 18.0, 19.0).unwrap();
    let ramp = ColorRamp::new(RampKind::Hsv, 0.0, 3000.0).unwrap();
    for m in 2..=32 {
        for n in 2..=32 {
            let g = ElevationGrid::from_fn(m, n, b, |i, j| ((i * 37 + j * 11) % 700) as f64).unwrap();
            let s = build_surface(&g, VerticalUnit::Feet).unwrap();
            let mesh = triangulate(&s, &colorize(&s, &ramp, ShadingMode::Flat), 1.0).map_err(|e| e.to_string())?;
            ensure!(mesh.vertices().len() == m * n, "{m}x{n}: {} vertices", mesh.vertices().len());
            ensure!(
                mesh.triangles().len() == 2 * (m - 1) * (n - 1),
                "{m}x{n}: {} triangles",
                mesh.triangles().len()
            );
        }
    }
    Ok("961 sizes".into())
}

fn check_chunks(png: &[u8]) -> Result<usize, String> {
    ensure!(png.starts_with(&[137, 80, 78, 71, 13, 10, 26, 10]), "bad signature");
    let (mut pos, mut chunks) = (8, 0);
    while pos < png.len() {
        let len = u32::from_be_bytes(png[pos..pos + 4].try_into().unwrap()) as usize;
        let body = &png[pos + 4..pos + 8 + len];
        let crc = u32::from_be_bytes(png[pos + 8 + len..pos + 12 + len].try_into().unwrap());
        ensure!(crc == crc32fast::hash(body), "chunk {chunks} CRC mismatch");
        pos += 12 + len;
        chunks += 1;
    }
    ensure!(png.ends_with(&[0xAE, 0x42, 0x60, 0x82]), "IEND CRC");
    Ok(chunks)
}

fn decode(png: &[u8]) -> Result<(u32, u32, Vec<u8>), String> {
    let mut reader = png::Decoder::new(std::io::Cursor::new(png)).read_info().map_err(|e| e.to_string())?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or("no buffer size")?];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    buf.truncate(info.buffer_size());
    Ok((info.width, info.height, buf))
}

fn rings_are_concentric(img: &Image) -> Result<(), String> {
    let (w, h) = (img.width() as f64, img.height() as f64);
    for k in 0..64 {
        let a = k as f64 * std::f64::consts::TAU / 64.0;
        let mut last = u8::MAX;
        for r in 0..(0.3 * w.min(h)) as usize {
            let x = (0.5 * w + r as f64 * a.cos()) as u32;
            let y = (0.5 * h + r as f64 * a.sin()) as u32;
            let g = img.pixel(x, y).0;
            ensure!(g <= last, "ray {k} brightens at radius {r}: {g} after {last}");
            last = g;
        }
    }
    Ok(())
}

fn renderer() -> Outcome {
    let g = cone_grid(61, 900.0);
    let s = build_surface(&g, VerticalUnit::Meters).unwrap();
    let ramp = s.default_ramp(RampKind::Gray).unwrap();
    let mesh = triangulate(&s, &colorize(&s, &ramp, ShadingMode::Flat), 1.0).unwrap();
    let top = Camera::new(0.0, 90.0).unwrap();
    let a = write_png(&render_surface(&mesh, &top, 256, 256).unwrap()).unwrap();
    let b = write_png(&render_surface(&mesh, &top, 256, 256).unwrap()).unwrap();
    ensure!(a == b, "two renders differ");

    for (az, el) in [(0.0, 70.0), (0.0, 45.0), (123.0, 20.0)] {
        let cam = Camera::new(az, el).unwrap();
        let tris = project(&mesh, &cam, 320, 200);
        let serial = rasterize(&tris, 320, 200, Rgb::WHITE, ShadingMode::Flat, false);
        let parallel = rasterize(&tris, 320, 200, Rgb::WHITE, ShadingMode::Flat, true);
        ensure!(
            write_png(&serial).unwrap() == write_png(&parallel).unwrap(),
            "serial and parallel differ at az {az} el {el}"
        );
    }

    let img = render_surface(&mesh, &top, 256, 256).unwrap();
    rings_are_concentric(&img)?;
    let chunks = check_chunks(&a)?;
    let (w, h, pixels) = decode(&a)?;
    ensure!((w, h) == (256, 256), "decoded size {w}x{h}");
    ensure!(pixels == img.pixels(), "decoded pixels differ");
    Ok(format!("{chunks} chunks verified, {} byte PNG", a.len()))
}

fn end_to_end() -> Outcome {
    let started = Instant::now();
    let tiles = latur_tiles(121);
    // Tiles pass through the DTED codec as they would from disk.
    let tiles: Vec<ElevationGrid> = tiles
        .iter()
        .map(|t| read_dted(&write_dted(t).unwrap()).unwrap())
        .collect();
    ensure!(tiles.iter().zip(latur_tiles(121).iter()).all(|(a, b)| a == b), "DTED changed a tile");
    let mosaic = mosaic_tiles(&tiles, EdgePolicy::Strict).map_err(|e| e.to_string())?;
    ensure!(mosaic.shape() == (241, 241), "mosaic shape {:?}", mosaic.shape());

    let boundary = read_shp(&write_shp(&[latur_boundary()])).map_err(|e| e.to_string())?;
    let cropped = crop_to_polygon(&mosaic, &boundary, true);
    let full = crop_to_polygon(&mosaic, &boundary, false);
    let m = mask(&mosaic, &boundary);
    for i in 0..241 {
        for j in 0..241 {
            ensure!(full.is_valid(i, j) == m.get(i, j), "crop/mask mismatch at ({i}, {j})");
            if m.get(i, j) {
                ensure!(full.get(i, j) == mosaic.get(i, j), "kept value changed at ({i}, {j})");
            }
        }
    }
    ensure!(cropped.stats().valid_count == m.count(), "trim dropped valid nodes");
    ensure!(cropped.rows() < 241 && cropped.cols() < 241, "trim kept full extent");

    let surface = build_surface(&cropped, VerticalUnit::Feet).map_err(|e| e.to_string())?;
    let stats = cropped.stats().summary.ok_or("empty crop")?;
    let (zlo, zhi) = surface.z_range().ok_or("no valid nodes")?;
    ensure!(
        (zlo - meters_to_feet(stats.min)).abs() < 1e-9 && (zhi - meters_to_feet(stats.max)).abs() < 1e-9,
        "feet range {zlo}..{zhi} vs meters {}..{}",
        stats.min,
        stats.max
    );
    let ramp = ColorRamp::new(RampKind::Atlas, 0.0, 3000.0).unwrap();
    let coloring = colorize(&surface, &ramp, ShadingMode::Flat);
    let mesh = triangulate(&surface, &coloring, 1.0).map_err(|e| e.to_string())?;
    ensure!(matches!(mesh.colors(), MeshColors::PerFace(_)), "flat mesh must carry face colors");

    let ply = export_ply(&mesh).map_err(|e| e.to_string())?;
    let parsed = read_ply(&ply).map_err(|e| e.to_string())?;
    ensure!(
        parsed.vertices.len() == mesh.vertices().len() && parsed.faces.as_slice() == mesh.triangles(),
        "PLY round trip differs"
    );

    let mut pngs = 0;
    for (az, el) in [(0.0, 70.0), (0.0, 45.0)] {
        let img = render_surface(&mesh, &Camera::new(az, el).unwrap(), 400, 300).map_err(|e| e.to_string())?;
        let png = write_png(&img).map_err(|e| e.to_string())?;
        check_chunks(&png)?;
        let (w, h, pixels) = decode(&png)?;
        ensure!((w, h) == (400, 300) && pixels == img.pixels(), "PNG decode mismatch at el {el}");
        ensure!(pixels.chunks(3).any(|p| p != [255, 255, 255]), "render at el {el} is blank");
        pngs += 1;
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "pipeline took {elapsed:?}");
    Ok(format!(
        "{} triangles, {} byte PLY, {pngs} PNGs",
        mesh.triangles().len(),
        ply.len()
    ))
}
