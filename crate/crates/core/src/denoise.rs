//! Spatially-varying Gaussian smoothing: every block gets its own oriented
//! Gaussian whose spreads minimize the estimated risk over the block and
//! its apron.

use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, Region};
use crate::kernel::{gaussian_taps, sigma_max, KernelParams, SIGMA_MIN};
use crate::layout::{Block, BlockLayout};
use crate::noise::{estimate_sigma, NoiseDistribution};
use crate::optimizer::{minimize, Bounds, OptimizerSettings};
use crate::orientation::estimate_orientation;
use crate::risk::{RegionFilter, RiskEstimate};

/// Smallest image `denoise` accepts in either dimension.
pub const MIN_IMAGE_SIDE: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseConfig {
    /// Odd kernel side `M`.
    pub kernel_side: usize,
    pub block: usize,
    pub apron: usize,
    /// Noise standard deviation; estimated from the image when `None`.
    pub sigma: Option<f64>,
    /// Selects the estimator divisor when `sigma` is `None`.
    pub noise_dist: NoiseDistribution,
    pub optimizer: OptimizerSettings,
    pub workers: usize,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            kernel_side: 9,
            block: 8,
            apron: 4,
            sigma: None,
            noise_dist: NoiseDistribution::Gaussian,
            optimizer: OptimizerSettings::default(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_side % 2 == 0 {
            return Err(Error::EvenKernel(self.kernel_side));
        }
        if self.kernel_side < 3 {
            return Err(Error::InvalidConfig("kernel side must be at least 3".into()));
        }
        if self.block == 0 {
            return Err(Error::InvalidConfig("block size must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("worker count must be at least 1".into()));
        }
        if let Some(s) = self.sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidSigma(s));
            }
        }
        self.optimizer.validate()
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(SIGMA_MIN, sigma_max(self.kernel_side)).expect("kernel side >= 3")
    }
}

/// Fitted filter for one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub block_x0: usize,
    pub block_y0: usize,
    pub w: usize,
    pub h: usize,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub theta: f64,
    pub risk: f64,
    pub iterations: usize,
}

impl BlockRecord {
    pub fn interior(&self) -> Region {
        Region::new(self.block_x0, self.block_y0, self.w, self.h)
    }

    pub fn params(&self) -> KernelParams {
        KernelParams {
            sigma_x: self.sigma_x,
            sigma_y: self.sigma_y,
            theta: self.theta,
        }
    }
}

/// Per-block parameters in layout (raster) order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockParamMap {
    pub records: Vec<BlockRecord>,
    /// Blocks per row of the layout.
    pub columns: usize,
}

impl BlockParamMap {
    /// CSV with header `block_x0,block_y0,w,h,sigma_x,sigma_y,theta,risk,iterations`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for r in &self.records {
            csv.serialize(r)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Vec<BlockRecord>> {
        let mut csv = csv::Reader::from_reader(reader);
        Ok(csv.deserialize().collect::<Result<Vec<BlockRecord>, _>>()?)
    }

    /// Mean squared difference of `(sigma_x, sigma_y)` between horizontally
    /// and vertically adjacent blocks. Large values indicate parameters that
    /// jump from block to block.
    pub fn neighbour_spread(&self) -> f64 {
        let cols = self.columns.max(1);
        let mut total = 0.0;
        let mut pairs = 0usize;
        for (i, r) in self.records.iter().enumerate() {
            let right = (i % cols + 1 < cols).then(|| self.records.get(i + 1)).flatten();
            let below = self.records.get(i + cols);
            for n in [right, below].into_iter().flatten() {
                total += (r.sigma_x - n.sigma_x).powi(2) + (r.sigma_y - n.sigma_y).powi(2);
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            total / (2 * pairs) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockFit {
    pub params: KernelParams,
    pub risk: RiskEstimate,
    pub iterations: usize,
}

/// Minimizes the estimated risk over `extended` with respect to the two
/// spreads, orientation held at `theta`.
pub fn optimize_block(
    noisy: &Image,
    extended: Region,
    sigma: f64,
    theta: f64,
    kernel_side: usize,
    settings: &OptimizerSettings,
) -> Result<BlockFit> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidSigma(sigma));
    }
    let filter = RegionFilter::new(noisy, extended, kernel_side)?;
    fit_prepared(&filter, sigma, theta, settings)
}

fn fit_prepared(filter: &RegionFilter, sigma: f64, theta: f64, settings: &OptimizerSettings) -> Result<BlockFit> {
    let side = filter.side();
    let bounds = Bounds::new(SIGMA_MIN, sigma_max(side))?;
    let objective = |p: [f64; 2]| filter.risk(&gaussian_taps(p[0], p[1], theta, side), sigma).value;
    let best = minimize(objective, bounds, settings)?;
    let params = KernelParams::new(best.point[0], best.point[1], theta);
    let risk = filter.risk(
        &gaussian_taps(params.sigma_x, params.sigma_y, params.theta, side),
        sigma,
    );
    Ok(BlockFit {
        params,
        risk,
        iterations: best.iterations,
    })
}

#[derive(Debug, Clone)]
pub struct DenoiseOutput {
    pub image: Image,
    pub blocks: BlockParamMap,
    /// Noise level the risk was evaluated with (given or estimated).
    pub sigma: f64,
}

fn process_block(noisy: &Image, block: &Block, sigma: f64, cfg: &DenoiseConfig) -> Result<(BlockRecord, Vec<f64>)> {
    let ext = block.extended;
    let theta = if ext.w >= 3 && ext.h >= 3 {
        estimate_orientation(noisy, ext)?
    } else {
        0.0
    };
    let filter = RegionFilter::new(noisy, ext, cfg.kernel_side)?;
    let fit = fit_prepared(&filter, sigma, theta, &cfg.optimizer)?;
    let kernel = gaussian_taps(
        fit.params.sigma_x,
        fit.params.sigma_y,
        fit.params.theta,
        cfg.kernel_side,
    );
    let filtered = filter.filtered(&kernel);
    let int = block.interior;
    let (dx, dy) = (int.x0 - ext.x0, int.y0 - ext.y0);
    let mut interior = Vec::with_capacity(int.len());
    for j in 0..int.h {
        let start = (dy + j) * ext.w + dx;
        interior.extend_from_slice(&filtered[start..start + int.w]);
    }
    let record = BlockRecord {
        block_x0: int.x0,
        block_y0: int.y0,
        w: int.w,
        h: int.h,
        sigma_x: fit.params.sigma_x,
        sigma_y: fit.params.sigma_y,
        theta: fit.params.theta,
        risk: fit.risk.value,
        iterations: fit.iterations,
    };
    Ok((record, interior))
}

/// Denoises `noisy` block by block on a pool of `cfg.workers` threads.
///
/// Each block estimates its orientation and fits its spreads on the
/// apron-extended window, then writes only its interior pixels. The result
/// does not depend on the worker count.
pub fn denoise(noisy: &Image, cfg: &DenoiseConfig) -> Result<DenoiseOutput> {
    cfg.validate()?;
    let min = MIN_IMAGE_SIDE.max(cfg.kernel_side);
    if noisy.width() < min || noisy.height() < min {
        return Err(Error::ImageTooSmall {
            width: noisy.width(),
            height: noisy.height(),
            min,
        });
    }
    let sigma = match cfg.sigma {
        Some(s) => s,
        None => estimate_sigma(noisy, cfg.noise_dist)?,
    };
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidSigma(sigma));
    }
    let layout = BlockLayout::new(noisy.width(), noisy.height(), cfg.block, cfg.apron)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let results: Vec<(BlockRecord, Vec<f64>)> = pool.install(|| {
        layout
            .blocks
            .par_iter()
            .map(|b| process_block(noisy, b, sigma, cfg))
            .collect::<Result<_>>()
    })?;

    let width = noisy.width();
    let mut out = vec![0.0; noisy.len()];
    let mut records = Vec::with_capacity(results.len());
    for (record, pixels) in results {
        for (j, row) in pixels.chunks_exact(record.w).enumerate() {
            let start = (record.block_y0 + j) * width + record.block_x0;
            out[start..start + record.w].copy_from_slice(row);
        }
        records.push(record);
    }
    Ok(DenoiseOutput {
        image: Image::new(width, noisy.height(), out)?,
        blocks: BlockParamMap {
            records,
            columns: layout.columns(),
        },
        sigma,
    })
}
