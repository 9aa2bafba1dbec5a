//! PNG output through resvg.

use super::DepictError;

/// Rasterize an SVG document to a `size`×`size` PNG on a white background.
#[cfg(feature = "raster")]
pub fn rasterize(svg: &str, size: u32) -> Result<Vec<u8>, DepictError> {
    use resvg::{tiny_skia, usvg};

    let tree =
        usvg::Tree::from_str(svg, &usvg::Options::default()).map_err(|e| DepictError::MalformedSvg(e.to_string()))?;
    let mut pixmap =
        tiny_skia::Pixmap::new(size, size).ok_or_else(|| DepictError::MalformedSvg(format!("canvas size {size}")))?;
    pixmap.fill(tiny_skia::Color::WHITE);
    let view = tree.size();
    let transform = tiny_skia::Transform::from_scale(size as f32 / view.width(), size as f32 / view.height());
    resvg::render(&tree, transform, &mut pixmap.as_mut());
    pixmap.encode_png().map_err(|e| DepictError::Io(e.to_string()))
}

#[cfg(not(feature = "raster"))]
pub fn rasterize(_svg: &str, _size: u32) -> Result<Vec<u8>, DepictError> {
    Err(DepictError::RasterBackendUnavailable)
}
