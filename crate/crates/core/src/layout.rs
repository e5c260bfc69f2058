//! Partition of an image into blocks with apron margins.

use crate::error::{Error, Result};
use crate::image::Region;

/// One block: the pixels it writes and the window it is fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub interior: Region,
    /// Interior dilated by the apron on every side, clipped to the image.
    pub extended: Region,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    pub block: usize,
    pub apron: usize,
    pub width: usize,
    pub height: usize,
    /// Raster order, row of blocks by row of blocks.
    pub blocks: Vec<Block>,
}

impl BlockLayout {
    /// Tiles a `width` x `height` image with `block` x `block` interiors;
    /// blocks on the right and bottom edges may be smaller.
    pub fn new(width: usize, height: usize, block: usize, apron: usize) -> Result<Self> {
        if block == 0 {
            return Err(Error::InvalidConfig("block size must be at least 1".into()));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height, len: 0 });
        }
        let mut blocks = Vec::with_capacity(width.div_ceil(block) * height.div_ceil(block));
        for y0 in (0..height).step_by(block) {
            for x0 in (0..width).step_by(block) {
                let interior = Region::new(x0, y0, block.min(width - x0), block.min(height - y0));
                blocks.push(Block {
                    interior,
                    extended: interior.dilate_clipped(apron, width, height),
                });
            }
        }
        Ok(Self {
            block,
            apron,
            width,
            height,
            blocks,
        })
    }

    /// Blocks per row.
    pub fn columns(&self) -> usize {
        self.width.div_ceil(self.block)
    }

    pub fn rows(&self) -> usize {
        self.height.div_ceil(self.block)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}
