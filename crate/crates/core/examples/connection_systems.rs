//! Evaluating connection functions on fixed points.

use rcm_simplicial::connect::{cech_system, hyperbolic_line_system, rips_system, Metric};
use rcm_simplicial::space::{Location, Mark, Point};

fn main() -> rcm_simplicial::Result<()> {
    // equilateral triangle with side 1
    let tri = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
    let pts: Vec<Point> = tri.iter().enumerate().map(|(i, c)| Point::euclidean(c, i as f64 / 4.0, i as u64)).collect();
    let refs: Vec<&Point> = pts.iter().collect();
    for r in [0.5, 0.55, 0.6] {
        let rips = rips_system(2, 2.0 * r, Metric::Euclidean)?;
        let cech = cech_system(2, r, Metric::Euclidean)?;
        println!("r = {r}: Rips φ_2 = {}, Čech φ_2 = {}", rips.phi(&refs), cech.phi(&refs));
    }

    let lines = hyperbolic_line_system(0.5)?;
    let disk = |x: f64, y: f64, i: u64| Point::new(Location::from_poincare([x, y]).unwrap(), Mark::None, i as f64 / 8.0, i);
    let pairs = [((0.3, 0.0), (0.0, 0.3)), ((0.3, 0.0), (-0.3, 0.0)), ((0.5, 0.0), (0.6, 0.1))];
    for ((ax, ay), (bx, by)) in pairs {
        let (a, b) = (disk(ax, ay, 1), disk(bx, by, 2));
        println!("lines through ({ax}, {ay}) and ({bx}, {by}) meet: {}", lines.phi(&[&a, &b]) == 1.0);
    }
    Ok(())
}
