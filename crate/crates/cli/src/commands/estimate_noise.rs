use std::path::PathBuf;

use anyhow::Result;
use svgs_core::{estimate_sigma, NoiseDistribution};

use super::read_image;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Selects the median divisor (0.6745 gaussian, 0.4901 laplacian)
    #[arg(long, default_value = "gaussian")]
    pub dist: NoiseDistribution,
}

pub fn run(args: Args) -> Result<()> {
    let img = read_image(&args.input)?;
    println!("{:.4}", estimate_sigma(&img, args.dist)?);
    Ok(())
}
