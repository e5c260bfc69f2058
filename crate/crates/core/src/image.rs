//! Grayscale raster container and fidelity metrics.

use crate::error::{Error, Result};

/// Row-major grayscale image with `f64` samples.
///
/// Samples are nominally in `[0, 255]` but are never clamped during
/// processing; quantization happens only when writing PGM files.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || samples.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self { width, height, samples })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel count `N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    /// Region covering the whole image.
    pub fn full_region(&self) -> Region {
        Region::new(0, 0, self.width, self.height)
    }

    pub fn ensure_same_dims(&self, other: &Image) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    /// Left-right mirror image.
    pub fn flip_horizontal(&self) -> Image {
        let w = self.width;
        let samples = (0..self.height)
            .flat_map(|y| self.row(y).iter().rev().copied().collect::<Vec<_>>())
            .collect::<Vec<_>>();
        debug_assert_eq!(samples.len(), w * self.height);
        Image {
            width: w,
            height: self.height,
            samples,
        }
    }
}

/// Axis-aligned pixel window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Region {
    pub const fn new(x0: usize, y0: usize, w: usize, h: usize) -> Self {
        Self { x0, y0, w, h }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.w * self.h
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x0 + self.w && y >= self.y0 && y < self.y0 + self.h
    }

    /// Checks that the region is non-empty and lies inside a `width` x `height` image.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let fits = !self.is_empty()
            && self.x0.checked_add(self.w).is_some_and(|r| r <= width)
            && self.y0.checked_add(self.h).is_some_and(|b| b <= height);
        if fits {
            Ok(())
        } else {
            Err(Error::InvalidRegion {
                x0: self.x0,
                y0: self.y0,
                w: self.w,
                h: self.h,
                width,
                height,
            })
        }
    }

    /// Grows the region by `margin` pixels on every side, clipped to the image.
    pub fn dilate_clipped(&self, margin: usize, width: usize, height: usize) -> Region {
        let x0 = self.x0.saturating_sub(margin);
        let y0 = self.y0.saturating_sub(margin);
        let x1 = (self.x0 + self.w + margin).min(width);
        let y1 = (self.y0 + self.h + margin).min(height);
        Region::new(x0, y0, x1 - x0, y1 - y0)
    }
}

/// Sum of squared differences `sum_i (a_i - b_i)^2`.
///
/// This is the total squared error, not its mean; [`psnr`] divides by `N`.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    a.ensure_same_dims(b)?;
    Ok(a.samples.iter().zip(&b.samples).map(|(p, q)| (p - q) * (p - q)).sum())
}

/// Peak signal-to-noise ratio in dB for 8-bit data (peak 255).
///
/// Identical images yield `f64::INFINITY`.
pub fn psnr(reference: &Image, test: &Image) -> Result<f64> {
    let sse = mse(reference, test)?;
    if sse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let rmse = (sse / reference.len() as f64).sqrt();
    Ok(20.0 * (255.0 / rmse).log10())
}
