//! Writes four synthetic DTED tiles and a boundary shapefile.
//!
//! ```text
//! cargo run -p geosurf --example latur_analog -- out_dir [posts]
//! ```
//!
//! `posts` defaults to 1201 (level 1 spacing). The tiles cover 76°–78° E,
//! 17°–19° N and share their edge samples.

use std::path::PathBuf;

use geosurf::dted::write_dted;
use geosurf::shapefile::write_shp;
use geosurf::synthetic::{latur_boundary, latur_tiles};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "latur_analog".into()));
    let posts: usize = match args.next() {
        Some(p) => p.parse()?,
        None => 1201,
    };
    std::fs::create_dir_all(&dir)?;
    for (tile, name) in latur_tiles(posts).iter().zip(["n18e076", "n18e077", "n17e076", "n17e077"]) {
        let path = dir.join(format!("{name}.dt1"));
        std::fs::write(&path, write_dted(tile)?)?;
        println!("{} ({} x {})", path.display(), tile.rows(), tile.cols());
    }
    let shp = dir.join("boundary.shp");
    std::fs::write(&shp, write_shp(&[latur_boundary()]))?;
    println!("{}", shp.display());
    Ok(())
}
