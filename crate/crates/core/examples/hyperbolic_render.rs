//! Two pictures in the Poincaré disk: a hyperbolic random geometric complex
//! and the complex of crossing hyperbolic lines, with its line process.
//!
//! cargo run --release --example hyperbolic_render -- [out_dir]

use std::path::PathBuf;

use rcm_simplicial::connect::{hyperbolic_line_system, hyperbolic_rgg_system};
use rcm_simplicial::render::{render_disk, render_line_process};
use rcm_simplicial::space::{RadialDensity, Space, Window};
use rcm_simplicial::{Model, SeedStream};

fn main() -> rcm_simplicial::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "render-out".into()));
    std::fs::create_dir_all(&out)?;
    let window = Window::new(Space::HyperbolicDisk { radius: 4.0, density: RadialDensity::Cosh })?;

    let rgg = Model::new(window.clone(), hyperbolic_rgg_system(0.4, 0.5)?, 30.0 / window.measure())?;
    let c = rgg.sample(SeedStream::new(1))?;
    std::fs::write(out.join("rgg.svg"), render_disk(&c))?;
    println!("rgg: counts {:?}", c.counts());

    let lines = Model::new(window.clone(), hyperbolic_line_system(0.5)?, 2.2)?;
    let c = lines.sample(SeedStream::new(2))?;
    std::fs::write(out.join("lines.svg"), render_line_process(&c))?;
    std::fs::write(out.join("line_complex.svg"), render_disk(&c))?;
    println!("lines: counts {:?}", c.counts());
    println!("wrote SVGs to {}", out.display());
    Ok(())
}
