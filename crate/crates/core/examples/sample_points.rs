//! Poisson samples in the three kinds of space.

use rcm_simplicial::space::{MarkDistribution, RadialDensity, Space, Window};
use rcm_simplicial::SeedStream;

fn main() -> rcm_simplicial::Result<()> {
    let spaces = [
        Space::unit_cube(2),
        Space::HyperbolicDisk { radius: 3.0, density: RadialDensity::Cosh },
        Space::MarkedStationary { bounds: vec![(0.0, 10.0)], marks: MarkDistribution::Discrete { weights: vec![1.0, 3.0] } },
    ];
    for (i, space) in spaces.into_iter().enumerate() {
        let window = Window::new(space)?;
        let beta = 20.0;
        let pts = window.sample_poisson(beta, &mut SeedStream::new(1).child(i as u64).rng())?;
        println!("{:?}: |W| = {:.4}, expected {:.1} points, got {}", window.space(), window.measure(), beta * window.measure(), pts.len());
        for p in pts.iter().take(3) {
            println!("  {:?} mark {:?} key {:.4}", p.location, p.mark, p.order_key);
        }
    }
    Ok(())
}
