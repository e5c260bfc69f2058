use std::path::PathBuf;

use anyhow::Result;
use svgs_core::{corrupt, pgm, psnr, NoiseDistribution, NoiseSpec};

use super::{read_image, write_image};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Clean input image (binary PGM)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Noisy output image (binary PGM)
    #[arg(long)]
    pub out: PathBuf,
    /// Noise distribution: gaussian or laplacian
    #[arg(long)]
    pub dist: NoiseDistribution,
    /// Noise standard deviation in gray levels
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub seed: u64,
}

pub fn run(args: Args) -> Result<()> {
    let clean = read_image(&args.input)?;
    let spec = NoiseSpec::new(args.dist, args.sigma, args.seed)?;
    let noisy = corrupt(&clean, &spec)?;
    write_image(&noisy, &args.out)?;
    // report what was written, i.e. after 8-bit quantization
    let stored = pgm::quantized(&noisy);
    println!("input PSNR: {:.2} dB", psnr(&clean, &stored)?);
    Ok(())
}
