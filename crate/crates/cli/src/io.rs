//! File access with format chosen by extension.

use std::fs;
use std::path::Path;

use geosurf::asciigrid::{read_asciigrid, write_asciigrid};
use geosurf::dted::{read_dted, write_dted};
use geosurf::raster::ElevationGrid;
use geosurf::shapefile::{read_shp, Polygon};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dted,
    AsciiGrid,
    Shapefile,
    Ply,
    Png,
}

impl Format {
    pub fn of(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        Some(match ext.as_str() {
            "dt0" | "dt1" | "dt2" | "dted" => Format::Dted,
            "asc" => Format::AsciiGrid,
            "shp" => Format::Shapefile,
            "ply" => Format::Ply,
            "png" => Format::Png,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Dted => "DTED",
            Format::AsciiGrid => "ASCII grid",
            Format::Shapefile => "shapefile",
            Format::Ply => "PLY",
            Format::Png => "PNG",
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

pub fn grid_format(path: &Path) -> Result<Format, CliError> {
    match Format::of(path) {
        Some(f @ (Format::Dted | Format::AsciiGrid)) => Ok(f),
        _ => Err(CliError::Usage(format!(
            "{}: expected a .dt0/.dt1/.dt2/.dted or .asc grid",
            path.display()
        ))),
    }
}

pub fn read_grid(path: &Path) -> Result<ElevationGrid, CliError> {
    let format = grid_format(path)?;
    let bytes = read_bytes(path)?;
    log::debug!("read {} bytes from {}", bytes.len(), path.display());
    match format {
        Format::Dted => read_dted(&bytes).map_err(|e| CliError::parse(path, e)),
        _ => {
            let text = std::str::from_utf8(&bytes).map_err(|e| CliError::parse(path, e))?;
            read_asciigrid(text).map_err(|e| CliError::parse(path, e))
        }
    }
}

pub fn read_polygons(path: &Path) -> Result<Vec<Polygon>, CliError> {
    if Format::of(path) != Some(Format::Shapefile) {
        return Err(CliError::Usage(format!("{}: expected a .shp file", path.display())));
    }
    let bytes = read_bytes(path)?;
    read_shp(&bytes).map_err(|e| CliError::parse(path, e))
}

pub fn encode_grid(grid: &ElevationGrid, path: &Path) -> Result<Vec<u8>, CliError> {
    match grid_format(path)? {
        Format::Dted => write_dted(grid).map_err(|e| CliError::output(path, e)),
        _ => write_asciigrid(grid)
            .map(String::into_bytes)
            .map_err(|e| CliError::output(path, e)),
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::output(path, e))?;
    log::info!("wrote {} bytes to {}", bytes.len(), path.display());
    Ok(())
}

/// Checks an output path's extension before any work is done.
pub fn expect_output(path: &Path, allowed: &[Format]) -> Result<Format, CliError> {
    match Format::of(path) {
        Some(f) if allowed.contains(&f) => Ok(f),
        _ => {
            let names: Vec<&str> = allowed.iter().map(|f| f.name()).collect();
            Err(CliError::Usage(format!(
                "{}: output must be {}",
                path.display(),
                names.join(" or ")
            )))
        }
    }
}
