//! 2D structure depiction: layout, SVG, and optional PNG.

mod font;
mod layout;
mod raster;
mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha1::{Digest, Sha1};
use thiserror::Error;

pub use layout::{compute_layout, Layout, Point, MIN_SEPARATION};
pub use raster::rasterize;
pub use svg::{render_svg, Style, StyleOverrides};

use crate::canon::canonicalize;
use crate::psmiles::{parse, MolecularGraph, SmilesError};

pub const DEFAULT_IMAGE_SIZE: u32 = 1120;

#[derive(Debug, Error)]
pub enum DepictError {
    #[error("layout left {} atom pairs closer than {MIN_SEPARATION} bond lengths", .0.overlaps.len())]
    LayoutOverflow(Layout),
    #[error("raster backend not compiled in")]
    RasterBackendUnavailable,
    #[error("malformed svg: {0}")]
    MalformedSvg(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Smiles(#[from] SmilesError),
}

/// Layout that fails when atoms could not be kept apart. The layout is still
/// carried in the error so callers may render it anyway.
pub fn layout_2d(graph: &MolecularGraph) -> Result<Layout, DepictError> {
    let layout = compute_layout(graph);
    if layout.overlaps.is_empty() {
        Ok(layout)
    } else {
        Err(DepictError::LayoutOverflow(layout))
    }
}

/// Hex sha1 of the canonical P-SMILES, used as the image file stem.
pub fn image_stem(canonical: &str) -> String {
    hex::encode(Sha1::digest(canonical.as_bytes()))
}

/// Result of depicting one P-SMILES.
#[derive(Debug, Clone)]
pub struct Depiction {
    pub canonical: String,
    pub layout: Layout,
    pub svg: String,
}

impl Depiction {
    pub fn stem(&self) -> String {
        image_stem(&self.canonical)
    }

    pub fn has_overlaps(&self) -> bool {
        !self.layout.overlaps.is_empty()
    }
}

/// Canonicalize, lay out the canonical graph, and render. Overlaps are kept
/// in the layout rather than failing.
pub fn depict(psmiles: &str, size: u32, style: &Style) -> Result<Depiction, DepictError> {
    let canonical = canonicalize(psmiles)?;
    let graph = parse(&canonical)?;
    let layout = compute_layout(&graph);
    let svg = render_svg(&graph, &layout.coordinates, size, style);
    Ok(Depiction { canonical, layout, svg })
}

/// Write `bytes` to `path` through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DepictError> {
    let io = |e: std::io::Error| DepictError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Files written for one depiction.
#[derive(Debug, Clone)]
pub struct WrittenImages {
    pub svg: PathBuf,
    pub png: Option<PathBuf>,
}

/// Write `<stem>.svg` and, when `png` is set, `<stem>.png` into `dir`. The PNG
/// is rendered fully in memory first so a failure leaves no file behind.
pub fn write_images(depiction: &Depiction, dir: &Path, size: u32, png: bool) -> Result<WrittenImages, DepictError> {
    let stem = depiction.stem();
    let png_bytes = if png { Some(rasterize(&depiction.svg, size)?) } else { None };
    let svg_path = dir.join(format!("{stem}.svg"));
    write_atomic(&svg_path, depiction.svg.as_bytes())?;
    let png_path = match png_bytes {
        Some(bytes) => {
            let p = dir.join(format!("{stem}.png"));
            write_atomic(&p, &bytes)?;
            Some(p)
        }
        None => None,
    };
    Ok(WrittenImages { svg: svg_path, png: png_path })
}
