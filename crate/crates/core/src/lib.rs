//! Risk-driven Gaussian denoising.
//!
//! For a linear shift-invariant filter `H` applied to `y = x + w`, where `w`
//! is zero-mean white noise of variance `sigma^2` and *any* distribution,
//! `||H y - y||^2 + 2 sigma^2 N h0 - N sigma^2` is an unbiased estimate of
//! the squared error `||x - H y||^2`. This crate computes that estimate
//! ([`risk`]) and uses it to fit an oriented Gaussian smoother per block of
//! an image ([`denoise`]), along with the supporting pieces: PGM I/O,
//! mirror-boundary convolution, noise synthesis and estimation, and a
//! bounded conjugate-gradient minimizer.

pub mod conv;
pub mod denoise;
pub mod error;
pub mod image;
pub mod kernel;
pub mod layout;
pub mod noise;
pub mod optimizer;
pub mod orientation;
pub mod pgm;
pub mod risk;
pub mod sweep;

pub use conv::{convolve, convolve_with, Boundary};
pub use denoise::{denoise, optimize_block, BlockFit, BlockParamMap, BlockRecord, DenoiseConfig, DenoiseOutput};
pub use error::{Error, PgmError, Result};
pub use image::{mse, psnr, Image, Region};
pub use kernel::{make_kernel, Kernel, KernelParams};
pub use layout::{Block, BlockLayout};
pub use noise::{corrupt, estimate_sigma, sigma_for_psnr, NoiseDistribution, NoiseSpec};
pub use optimizer::{finite_diff_gradient, minimize, Bounds, Minimum, OptimizerSettings};
pub use orientation::{estimate_orientation, StructureTensor};
pub use pgm::{load_pgm, save_pgm};
pub use risk::{filter_trace, lsi_divergence, oracle_mse, stein_free_risk, RegionFilter, RiskEstimate};
pub use sweep::{risk_curve, SweepRange, SweepRow};
