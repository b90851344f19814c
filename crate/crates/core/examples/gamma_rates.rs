//! γ_1..γ_6 on a β ladder for a constant system, with log-log slopes.
//!
//! cargo run --release --example gamma_rates -- [p] [q] [area] [outer] [inner] [f4_replicates] [betas, comma separated]

use std::time::Instant;

use rcm_simplicial::connect::constant_system;
use rcm_simplicial::functional::CoefficientVector;
use rcm_simplicial::normapprox::{gamma_quantities, GammaConfig};
use rcm_simplicial::space::{Space, Window};
use rcm_simplicial::stats::log_log_slope;
use rcm_simplicial::{McBudget, Model, SeedStream};

fn main() -> rcm_simplicial::Result<()> {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let args: Vec<f64> = raw.iter().take(6).filter_map(|s| s.parse().ok()).collect();
    let arg = |i: usize, d: f64| args.get(i).copied().unwrap_or(d);
    let (p, q, area) = (arg(0, 1.0), arg(1, 1.0), arg(2, 6.0));
    let cfg = GammaConfig { outer: arg(3, 50.0) as usize, inner: arg(4, 100.0) as usize, fourth_moment_replicates: arg(5, 500.0) as usize };
    let window = Window::new(Space::EuclideanBox { bounds: vec![(0.0, area), (0.0, 1.0)] })?;
    let system = constant_system(&[p, q])?;
    let betas: Vec<f64> = match raw.get(6) {
        Some(s) => s.split(',').filter_map(|x| x.parse().ok()).collect(),
        None => vec![5.0, 20.0, 80.0],
    };
    let mut rows = Vec::new();
    for (i, &beta) in betas.iter().enumerate() {
        let t = Instant::now();
        let model = Model::new(window.clone(), system.clone(), beta)?;
        let g = gamma_quantities(&model, &CoefficientVector::euler(2), &cfg, &McBudget::default(), SeedStream::new(11).child(i as u64))?;
        let vals: Vec<String> = g.gamma.iter().map(|e| format!("{:.4e}±{:.1e}", e.value, e.standard_error)).collect();
        println!("beta {beta}: {} | E F^4 {:.3} | {:.1}s", vals.join(" "), g.fourth_moment.value, t.elapsed().as_secs_f64());
        rows.push(g);
    }
    for k in 0..6 {
        let y: Vec<f64> = rows.iter().map(|g| g.gamma[k].value).collect();
        println!("gamma{} slope {:.3}", k + 1, log_log_slope(&betas, &y).unwrap_or(f64::NAN));
    }
    Ok(())
}
