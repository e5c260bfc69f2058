//! Local orientation from the gradient structure tensor.

use std::f64::consts::FRAC_PI_2;

use crate::conv::mirror_index;
use crate::error::{Error, Result};
use crate::image::{Image, Region};
use crate::kernel::wrap_half_turn;

/// Summed gradient outer products over a region.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StructureTensor {
    pub jxx: f64,
    pub jyy: f64,
    pub jxy: f64,
}

impl StructureTensor {
    /// Central differences inside `region`, reading neighbours from the full
    /// image with mirror extension at the image border.
    pub fn over(img: &Image, region: Region) -> Result<Self> {
        region.validate(img.width(), img.height())?;
        let (w, h) = (img.width(), img.height());
        let mut t = StructureTensor::default();
        for y in region.y0..region.y0 + region.h {
            let up = img.row(mirror_index(y as isize - 1, h));
            let down = img.row(mirror_index(y as isize + 1, h));
            let row = img.row(y);
            for x in region.x0..region.x0 + region.w {
                let gx = 0.5 * (row[mirror_index(x as isize + 1, w)] - row[mirror_index(x as isize - 1, w)]);
                let gy = 0.5 * (down[x] - up[x]);
                t.jxx += gx * gx;
                t.jyy += gy * gy;
                t.jxy += gx * gy;
            }
        }
        Ok(t)
    }

    pub fn trace(&self) -> f64 {
        self.jxx + self.jyy
    }

    /// Dominant gradient direction `0.5 * atan2(2 Jxy, Jxx - Jyy)`.
    pub fn gradient_angle(&self) -> f64 {
        0.5 * (2.0 * self.jxy).atan2(self.jxx - self.jyy)
    }
}

/// Kernel orientation for `region`: the axis perpendicular to the dominant
/// gradient, so that the kernel's x axis runs along edges. Wrapped to
/// `[-pi/2, pi/2)`. Flat regions (`tr J < 1e-9 |R|`) return 0.
pub fn estimate_orientation(noisy: &Image, region: Region) -> Result<f64> {
    if region.w < 3 || region.h < 3 {
        return Err(Error::DegenerateRegion(region.w, region.h));
    }
    let t = StructureTensor::over(noisy, region)?;
    if t.trace() < 1e-9 * region.len() as f64 {
        return Ok(0.0);
    }
    Ok(wrap_half_turn(t.gradient_angle() + FRAC_PI_2))
}
