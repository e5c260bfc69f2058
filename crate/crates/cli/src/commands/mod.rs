pub mod add_noise;
pub mod bench;
pub mod denoise;
pub mod estimate_noise;
pub mod sweep;

use std::path::Path;

use anyhow::{Context, Result};
use svgs_core::Image;

pub(crate) fn read_image(path: &Path) -> Result<Image> {
    svgs_core::load_pgm(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn write_image(img: &Image, path: &Path) -> Result<()> {
    svgs_core::save_pgm(img, path).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
