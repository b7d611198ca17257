//! `geosurf`: inspect, stitch, crop, mesh and render elevation tiles.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 usage error or
//! unreadable input, 3 parse error, 4 mosaic error, 5 empty result.

mod error;
mod io;
mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use geosurf::color::{ColorRamp, RampKind};
use geosurf::crop::crop_to_polygon;
use geosurf::mesh::{triangulate, MeshError, TriangleMesh};
use geosurf::mosaic::{mosaic_tiles, EdgePolicy, MosaicError};
use geosurf::ply::export_ply;
use geosurf::raster::ElevationGrid;
use geosurf::render::{render_surface, write_png, Camera};
use geosurf::surface::{build_surface, colorize, ParametricSurface, ShadingMode, VerticalUnit};

use crate::error::CliError;
use crate::io::Format;

#[derive(Parser)]
#[command(name = "geosurf", version, about = "Terrain surfaces from DEM tiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dimensions, bounds and statistics of a grid or shapefile
    Info { path: PathBuf },
    /// Stitch adjacent tiles into one grid
    Mosaic {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Seam handling; strict when every input is DTED, prefer-first otherwise
        #[arg(long, value_enum)]
        policy: Option<Policy>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Set nodes outside the polygons to nodata
    Crop {
        grid: PathBuf,
        #[arg(long)]
        shape: PathBuf,
        /// Keep the full extent instead of trimming to the polygons
        #[arg(long)]
        no_trim: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a colored triangle mesh as PLY
    Mesh {
        grid: PathBuf,
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Render the colored surface to PNG, with an axis report alongside
    Render {
        grid: PathBuf,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Camera azimuth in degrees, counter-clockwise from south
        #[arg(long, allow_negative_numbers = true)]
        az: f64,
        /// Camera elevation in degrees above the horizon
        #[arg(long, allow_negative_numbers = true)]
        el: f64,
        #[arg(long, default_value = "800x600", value_parser = parse_size)]
        size: (u32, u32),
        #[arg(long, default_value_t = 1.0)]
        zoom: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Strict,
    PreferFirst,
    Average,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ramp {
    Gray,
    Hsv,
    Atlas,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shading {
    Flat,
    Interp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Unit {
    Feet,
    Meters,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, value_enum, default_value = "gray")]
    ramp: Ramp,
    #[arg(long, value_enum, default_value = "flat")]
    shading: Shading,
    #[arg(long, value_enum, default_value = "feet")]
    unit: Unit,
    /// Bottom of the color range [default: 0 for feet, data minimum for meters]
    #[arg(long, allow_negative_numbers = true)]
    zmin: Option<f64>,
    /// Top of the color range [default: 3000 for feet, data maximum for meters]
    #[arg(long, allow_negative_numbers = true)]
    zmax: Option<f64>,
    /// Vertical exaggeration
    #[arg(long, default_value_t = 1.0)]
    ve: f64,
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w: u32 = w.trim().parse().map_err(|e| format!("bad width: {e}"))?;
    let h: u32 = h.trim().parse().map_err(|e| format!("bad height: {e}"))?;
    if w == 0 || h == 0 {
        return Err("width and height must be positive".into());
    }
    if w > 16_384 || h > 16_384 {
        return Err("width and height are limited to 16384".into());
    }
    Ok((w, h))
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_info(path: &Path) -> Result<(), CliError> {
    let name = display_name(path);
    let text = match Format::of(path) {
        Some(Format::Shapefile) => report::shape_info(&name, &io::read_polygons(path)?),
        _ => {
            let format = io::grid_format(path)?;
            report::grid_info(&name, format.name(), &io::read_grid(path)?)
        }
    };
    print!("{text}");
    Ok(())
}

fn cmd_mosaic(inputs: &[PathBuf], policy: Option<Policy>, output: &Path) -> Result<(), CliError> {
    io::expect_output(output, &[Format::Dted, Format::AsciiGrid])?;
    let tiles = inputs
        .iter()
        .map(|p| io::read_grid(p))
        .collect::<Result<Vec<_>, _>>()?;
    let policy = match policy {
        Some(Policy::Strict) => EdgePolicy::Strict,
        Some(Policy::PreferFirst) => EdgePolicy::PreferFirst,
        Some(Policy::Average) => EdgePolicy::Average,
        None if inputs.iter().all(|p| Format::of(p) == Some(Format::Dted)) => EdgePolicy::Strict,
        None => EdgePolicy::PreferFirst,
    };
    log::info!("mosaicking {} tiles with {policy:?} seams", tiles.len());
    let grid = mosaic_tiles(&tiles, policy).map_err(|e| match e {
        MosaicError::Tiles { first, second, source } => CliError::Mosaic(format!(
            "{} and {}: {source}",
            display_name(&inputs[first]),
            display_name(&inputs[second])
        )),
        other => CliError::Mosaic(other.to_string()),
    })?;
    io::write_file(output, &io::encode_grid(&grid, output)?)
}

fn cmd_crop(grid: &Path, shape: &Path, no_trim: bool, output: &Path) -> Result<(), CliError> {
    io::expect_output(output, &[Format::Dted, Format::AsciiGrid])?;
    let g = io::read_grid(grid)?;
    let polys = io::read_polygons(shape)?;
    let cropped = crop_to_polygon(&g, &polys, !no_trim);
    if cropped.stats().is_empty() {
        return Err(CliError::Empty(format!(
            "empty crop: no node of {} lies inside {}",
            display_name(grid),
            display_name(shape)
        )));
    }
    io::write_file(output, &io::encode_grid(&cropped, output)?)
}

struct Built {
    surface: ParametricSurface,
    ramp: ColorRamp,
    mesh: TriangleMesh,
}

fn build_mesh(grid: &ElevationGrid, args: &MeshArgs) -> Result<Built, CliError> {
    let unit = match args.unit {
        Unit::Feet => VerticalUnit::Feet,
        Unit::Meters => VerticalUnit::Meters,
    };
    let kind = match args.ramp {
        Ramp::Gray => RampKind::Gray,
        Ramp::Hsv => RampKind::Hsv,
        Ramp::Atlas => RampKind::Atlas,
    };
    let mode = match args.shading {
        Shading::Flat => ShadingMode::Flat,
        Shading::Interp => ShadingMode::Interpolated,
    };
    if !(args.ve.is_finite() && args.ve > 0.0) {
        return Err(CliError::Usage(format!("--ve must be positive (got {})", args.ve)));
    }
    let surface = build_surface(grid, unit).map_err(|e| CliError::Empty(e.to_string()))?;
    let default = surface.default_ramp(kind).map_err(|e| CliError::Empty(e.to_string()))?;
    let (lo, hi) = (
        args.zmin.unwrap_or(default.z_min()),
        args.zmax.unwrap_or(default.z_max()),
    );
    let ramp = ColorRamp::new(kind, lo, hi).map_err(|e| CliError::Usage(format!("--zmin/--zmax: {e}")))?;
    let coloring = colorize(&surface, &ramp, mode);
    let mesh = triangulate(&surface, &coloring, args.ve).map_err(|e| match e {
        MeshError::Empty => CliError::Empty(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;
    log::info!(
        "{} vertices, {} triangles",
        mesh.vertices().len(),
        mesh.triangles().len()
    );
    Ok(Built { surface, ramp, mesh })
}

fn cmd_mesh(grid: &Path, args: &MeshArgs, output: &Path) -> Result<(), CliError> {
    io::expect_output(output, &[Format::Ply])?;
    let built = build_mesh(&io::read_grid(grid)?, args)?;
    let bytes = export_ply(&built.mesh).map_err(|e| CliError::Empty(e.to_string()))?;
    io::write_file(output, &bytes)
}

fn cmd_render(
    grid: &Path,
    args: &MeshArgs,
    camera: Camera,
    (width, height): (u32, u32),
    output: &Path,
) -> Result<(), CliError> {
    io::expect_output(output, &[Format::Png])?;
    let built = build_mesh(&io::read_grid(grid)?, args)?;
    let image = render_surface(&built.mesh, &camera, width, height).map_err(|e| CliError::Usage(e.to_string()))?;
    let png = write_png(&image).map_err(|e| CliError::output(output, e))?;
    io::write_file(output, &png)?;
    let sidecar = output.with_extension("txt");
    io::write_file(
        &sidecar,
        report::render_sidecar(&built.surface, &built.ramp, &camera).as_bytes(),
    )
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Info { path } => cmd_info(&path),
        Command::Mosaic { inputs, policy, output } => cmd_mosaic(&inputs, policy, &output),
        Command::Crop {
            grid,
            shape,
            no_trim,
            output,
        } => cmd_crop(&grid, &shape, no_trim, &output),
        Command::Mesh { grid, mesh, output } => cmd_mesh(&grid, &mesh, &output),
        Command::Render {
            grid,
            mesh,
            az,
            el,
            size,
            zoom,
            output,
        } => {
            let camera = Camera::new(az, el)
                .and_then(|c| c.with_zoom(zoom))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            cmd_render(&grid, &mesh, camera, size, &output)
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("geosurf: {e}");
        std::process::exit(e.exit_code());
    }
}
