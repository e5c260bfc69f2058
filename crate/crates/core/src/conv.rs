//! Two-dimensional convolution with symmetric boundary extension.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{Image, Region};
use crate::kernel::Kernel;

/// How samples outside the image are synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Reflect about the edge pixel without repeating it: `... c b | a b c ... | y x y ...`.
    #[default]
    Mirror,
    /// Wrap around; makes the filter exactly circulant on the finite grid.
    Periodic,
}

impl Boundary {
    /// Maps a possibly out-of-range coordinate into `0..n`.
    ///
    /// For `Mirror`, `i` must lie in `[-(n - 1), 2(n - 1)]`.
    #[inline]
    pub fn index(self, i: isize, n: usize) -> usize {
        let n = n as isize;
        match self {
            Boundary::Mirror => {
                let r = if i < 0 {
                    -i
                } else if i >= n {
                    2 * (n - 1) - i
                } else {
                    i
                };
                debug_assert!((0..n).contains(&r), "mirror index {i} out of reach for n={n}");
                r as usize
            }
            Boundary::Periodic => i.rem_euclid(n) as usize,
        }
    }
}

#[inline]
pub fn mirror_index(i: isize, n: usize) -> usize {
    Boundary::Mirror.index(i, n)
}

pub(crate) fn check_kernel_fits(img: &Image, kernel: &Kernel) -> Result<()> {
    if kernel.side() % 2 == 0 {
        return Err(Error::EvenKernel(kernel.side()));
    }
    if kernel.side() > img.width().min(img.height()) {
        return Err(Error::KernelTooLarge {
            side: kernel.side(),
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

/// Copies `region` grown by `margin` pixels on each side, synthesizing samples
/// outside the image with `boundary`. The result is row-major with stride
/// `region.w + 2 * margin`.
pub fn extract_padded(img: &Image, region: Region, margin: usize, boundary: Boundary) -> Vec<f64> {
    let pw = region.w + 2 * margin;
    let ph = region.h + 2 * margin;
    let m = margin as isize;
    let cols: Vec<usize> = (0..pw as isize)
        .map(|i| boundary.index(region.x0 as isize + i - m, img.width()))
        .collect();
    let mut out = Vec::with_capacity(pw * ph);
    for j in 0..ph as isize {
        let row = img.row(boundary.index(region.y0 as isize + j - m, img.height()));
        out.extend(cols.iter().map(|&c| row[c]));
    }
    out
}

/// Convolves a padded window (stride `src_stride`, margin `kernel.half()`)
/// and writes `out_w` x `out_h` outputs into `out`.
///
/// `out(x, y) = sum_{dx,dy} k(dx, dy) * src(x - dx, y - dy)`.
#[inline]
pub(crate) fn convolve_padded(
    src: &[f64],
    src_stride: usize,
    kernel: &Kernel,
    out_w: usize,
    out_h: usize,
    out: &mut [f64],
) {
    let side = kernel.side();
    let taps = kernel.taps();
    for y in 0..out_h {
        let out_row = &mut out[y * out_w..(y + 1) * out_w];
        out_row.iter_mut().for_each(|v| *v = 0.0);
        for ky in 0..side {
            // tap row ky holds dy = ky - half, which reads source row y + half - dy
            let src_row = &src[(y + side - 1 - ky) * src_stride..];
            let tap_row = &taps[ky * side..(ky + 1) * side];
            for (kx, &t) in tap_row.iter().enumerate() {
                if t == 0.0 {
                    continue;
                }
                let s = &src_row[side - 1 - kx..side - 1 - kx + out_w];
                for (o, &v) in out_row.iter_mut().zip(s) {
                    *o += t * v;
                }
            }
        }
    }
}

/// Convolution with mirror boundary extension.
pub fn convolve(img: &Image, kernel: &Kernel) -> Result<Image> {
    convolve_with(img, kernel, Boundary::Mirror)
}

pub fn convolve_with(img: &Image, kernel: &Kernel, boundary: Boundary) -> Result<Image> {
    check_kernel_fits(img, kernel)?;
    let (w, h) = (img.width(), img.height());
    let half = kernel.half();
    let padded = extract_padded(img, img.full_region(), half, boundary);
    let stride = w + 2 * half;
    let side = kernel.side();
    let mut out = vec![0.0; w * h];
    const ROWS_PER_TASK: usize = 16;
    out.par_chunks_mut(w * ROWS_PER_TASK)
        .enumerate()
        .for_each(|(i, chunk)| {
            let y0 = i * ROWS_PER_TASK;
            let rows = chunk.len() / w;
            let src = &padded[y0 * stride..(y0 + rows + side - 1) * stride];
            convolve_padded(src, stride, kernel, w, rows, chunk);
        });
    Image::new(w, h, out)
}
