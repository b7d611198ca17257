use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use geosurf::color::{ColorRamp, RampKind};
use geosurf::crop::crop_to_polygon;
use geosurf::dted::{read_dted, write_dted};
use geosurf::mesh::triangulate;
use geosurf::mosaic::{mosaic_tiles, EdgePolicy};
use geosurf::ply::{export_ply, read_ply};
use geosurf::raster::{ElevationGrid, GeoBounds};
use geosurf::shapefile::{write_shp, Polygon};
use geosurf::surface::{build_surface, colorize, ShadingMode, VerticalUnit};
use geosurf::synthetic::{latur_boundary, latur_tiles};
use tempfile::TempDir;

const NAMES: [&str; 4] = ["n18e076.dt1", "n18e077.dt1", "n17e076.dt1", "n17e077.dt1"];

fn geosurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geosurf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_tiles(dir: &Path, posts: usize) -> Vec<PathBuf> {
    latur_tiles(posts)
        .iter()
        .zip(NAMES)
        .map(|(tile, name)| {
            let path = dir.join(name);
            std::fs::write(&path, write_dted(tile).unwrap()).unwrap();
            path
        })
        .collect()
}

fn write_boundary(dir: &Path, poly: &Polygon) -> PathBuf {
    let path = dir.join("boundary.shp");
    std::fs::write(&path, write_shp(std::slice::from_ref(poly))).unwrap();
    path
}

fn write_grid(dir: &Path, name: &str, grid: &ElevationGrid) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, write_dted(grid).unwrap()).unwrap();
    path
}

#[test]
fn info_reports_size_and_bounds() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 121);
    let out = geosurf(&["info", p(&tiles[0])]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("SIZE=121 x 121"), "{text}");
    assert!(text.contains("FORMAT=DTED"));
    assert!(text.contains("UPPER LEFT X=76.0000000000"));
    assert!(text.contains("LOWER RIGHT Y=18.0000000000"));
    assert!(text.contains("WEST LONGITUDE=76° 0' 0.0000\" E"), "{text}");
    assert!(text.contains("NORTH LATITUDE=19° 0' 0.0000\" N"), "{text}");
    assert!(text.contains("LONGITUDE SPACING=30.0000 arc-seconds"), "{text}");
}

#[test]
fn info_reads_shapefiles() {
    let dir = TempDir::new().unwrap();
    let shp = write_boundary(dir.path(), &latur_boundary());
    let out = geosurf(&["info", p(&shp)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("POLYGONS=1"));
    assert!(text.contains("UPPER LEFT X=76.2100000000"), "{text}");
}

#[test]
fn missing_and_unknown_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.dt1");
    assert_eq!(geosurf(&["info", p(&missing)]).status.code(), Some(2));
    let odd = dir.path().join("grid.xyz");
    std::fs::write(&odd, b"1 2 3").unwrap();
    assert_eq!(geosurf(&["info", p(&odd)]).status.code(), Some(2));
}

#[test]
fn garbage_dted_exits_3() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.dt1");
    std::fs::write(&bad, vec![0u8; 5000]).unwrap();
    let out = geosurf(&["info", p(&bad)]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn mosaic_of_four_tiles() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 61);
    let out_path = dir.path().join("all.dt1");
    let mut args = vec!["mosaic"];
    // Shuffled order: placement comes from the bounds.
    for i in [3, 1, 0, 2] {
        args.push(p(&tiles[i]));
    }
    args.extend(["-o", p(&out_path)]);
    let out = geosurf(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let grid = read_dted(&std::fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(grid.shape(), (121, 121));
    let expected = mosaic_tiles(&latur_tiles(61), EdgePolicy::Strict).unwrap();
    assert_eq!(grid, expected);
}

#[test]
fn mosaic_of_one_tile_copies_it() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 31);
    let out_path = dir.path().join("copy.dt1");
    let out = geosurf(&["mosaic", p(&tiles[0]), "-o", p(&out_path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(std::fs::read(&out_path).unwrap(), std::fs::read(&tiles[0]).unwrap());
}

#[test]
fn strict_seam_mismatch_exits_4_and_names_files() {
    let dir = TempDir::new().unwrap();
    let [nw, ne, ..] = latur_tiles(31);
    let bumped = ne.map_valid(|z| z + 5.0).unwrap();
    let a = write_grid(dir.path(), "west.dt1", &nw);
    let b = write_grid(dir.path(), "east.dt1", &bumped);
    let o = dir.path().join("o.dt1");
    let out = geosurf(&["mosaic", p(&a), p(&b), "-o", p(&o)]);
    assert_eq!(out.status.code(), Some(4));
    let err = stderr(&out);
    assert!(err.contains("west.dt1") && err.contains("east.dt1"), "{err}");
    assert!(!o.exists());

    let out = geosurf(&["mosaic", p(&a), p(&b), "--policy", "prefer-first", "-o", p(&o)]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn crop_full_cover_without_trim_is_identity() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 31);
    let cover = Polygon::rectangle(75.5, 77.5, 17.5, 19.5).unwrap();
    let shp = write_boundary(dir.path(), &cover);
    let o = dir.path().join("c.dt1");
    let out = geosurf(&["crop", p(&tiles[0]), "--shape", p(&shp), "--no-trim", "-o", p(&o)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(std::fs::read(&o).unwrap(), std::fs::read(&tiles[0]).unwrap());
}

#[test]
fn crop_disjoint_exits_5() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 31);
    let far = Polygon::rectangle(10.0, 11.0, 10.0, 11.0).unwrap();
    let shp = write_boundary(dir.path(), &far);
    let o = dir.path().join("c.dt1");
    let out = geosurf(&["crop", p(&tiles[0]), "--shape", p(&shp), "-o", p(&o)]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
    assert!(!o.exists());
}

#[test]
fn crop_writes_ascii_grid() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 31);
    let shp = write_boundary(dir.path(), &latur_boundary());
    let o = dir.path().join("c.asc");
    let out = geosurf(&["crop", p(&tiles[0]), "--shape", p(&shp), "-o", p(&o)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&o).unwrap();
    assert!(text.starts_with("ncols"), "{text}");
    let info = geosurf(&["info", p(&o)]);
    assert!(stdout(&info).contains("FORMAT=ASCII grid"));
}

#[test]
fn mesh_shading_selects_color_layout() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 11);
    let flat = dir.path().join("flat.ply");
    let interp = dir.path().join("interp.ply");
    assert!(geosurf(&["mesh", p(&tiles[0]), "-o", p(&flat)]).status.success());
    let out = geosurf(&["mesh", p(&tiles[0]), "--shading", "interp", "-o", p(&interp)]);
    assert!(out.status.success(), "{}", stderr(&out));

    let f = read_ply(&std::fs::read(&flat).unwrap()).unwrap();
    assert_eq!(f.vertices.len(), 121);
    assert_eq!(f.faces.len(), 200);
    assert_eq!(f.face_colors.len(), 200);
    assert!(f.vertex_colors.is_empty());
    assert!(f.comments.iter().any(|c| c.contains("vertical_unit=feet")));

    let v = read_ply(&std::fs::read(&interp).unwrap()).unwrap();
    assert_eq!(v.vertex_colors.len(), 121);
    assert!(v.face_colors.is_empty());
}

#[test]
fn explicit_color_range_is_honored() {
    let dir = TempDir::new().unwrap();
    let bounds = GeoBounds::new(76.0, 76.1, 18.0, 18.1).unwrap();
    let grid = ElevationGrid::filled(5, 5, 50.0, bounds).unwrap();
    let g = write_grid(dir.path(), "flat.dt1", &grid);
    let o = dir.path().join("m.ply");
    let out = geosurf(&[
        "mesh", p(&g), "--unit", "meters", "--ramp", "hsv", "--zmin", "0", "--zmax", "100", "-o", p(&o),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let ply = read_ply(&std::fs::read(&o).unwrap()).unwrap();
    let expected = ColorRamp::new(RampKind::Hsv, 0.0, 100.0).unwrap().color(50.0);
    let colors = ply.face_colors;
    assert!(colors.iter().all(|&c| c == expected), "{:?}", colors[0]);
}

#[test]
fn render_is_deterministic_and_writes_sidecar() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 41);
    let a = dir.path().join("a.png");
    let b = dir.path().join("b.png");
    for o in [&a, &b] {
        let out = geosurf(&[
            "render", p(&tiles[0]), "--ramp", "atlas", "--az", "30", "--el", "45", "--size", "160x120", "-o", p(o),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
    let sidecar = std::fs::read_to_string(dir.path().join("a.txt")).unwrap();
    assert!(sidecar.contains("WEST LONGITUDE=76° 0' 0.0000\" E"), "{sidecar}");
    assert!(sidecar.contains("ELEVATION UNIT=feet"));
    assert!(sidecar.contains("COLOR RAMP=atlas"));
}

#[test]
fn render_rejects_bad_arguments() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 11);
    let o = dir.path().join("r.png");
    let base = ["render", p(&tiles[0]), "-o", p(&o)];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        geosurf(&args).status.code()
    };
    assert_eq!(run(&["--az", "0", "--el", "45", "--size", "0x0"]), Some(2));
    assert_eq!(run(&["--az", "0", "--el", "95"]), Some(2));
    assert_eq!(run(&["--el", "45"]), Some(2));
    assert_eq!(run(&["--az", "0", "--el", "45", "--ve", "0"]), Some(2));
    let wrong = dir.path().join("r.jpg");
    let out = geosurf(&["render", p(&tiles[0]), "--az", "0", "--el", "45", "-o", p(&wrong)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn file_pipeline_matches_library() {
    let dir = TempDir::new().unwrap();
    let tiles = write_tiles(dir.path(), 31);
    let shp = write_boundary(dir.path(), &latur_boundary());
    let merged = dir.path().join("merged.dt1");
    let cropped = dir.path().join("cropped.dt1");
    let ply = dir.path().join("out.ply");
    let mut args = vec!["mosaic"];
    args.extend(tiles.iter().map(|t| p(t)));
    args.extend(["-o", p(&merged)]);
    assert!(geosurf(&args).status.success());
    assert!(geosurf(&["crop", p(&merged), "--shape", p(&shp), "-o", p(&cropped)])
        .status
        .success());
    let out = geosurf(&["mesh", p(&cropped), "--ramp", "atlas", "-o", p(&ply)]);
    assert!(out.status.success(), "{}", stderr(&out));

    let grid = mosaic_tiles(&latur_tiles(31), EdgePolicy::Strict).unwrap();
    let grid = crop_to_polygon(&grid, &[latur_boundary()], true);
    let surface = build_surface(&grid, VerticalUnit::Feet).unwrap();
    let ramp = surface.default_ramp(RampKind::Atlas).unwrap();
    let coloring = colorize(&surface, &ramp, ShadingMode::Flat);
    let mesh = triangulate(&surface, &coloring, 1.0).unwrap();
    assert_eq!(std::fs::read(&ply).unwrap(), export_ply(&mesh).unwrap());
}
