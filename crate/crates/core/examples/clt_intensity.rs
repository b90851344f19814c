//! Increasing-intensity ladder on the unit square with a constant system:
//! KS distance, γ estimates and their log-log slopes per rung.
//!
//! cargo run --release --example clt_intensity -- [p] [q] [outer] [inner]

use std::time::Instant;

use rcm_simplicial::connect::constant_system;
use rcm_simplicial::functional::CoefficientVector;
use rcm_simplicial::normapprox::{run_clt_experiment, CltExperiment, GammaConfig, Regime, Standardization};
use rcm_simplicial::space::{MarkDistribution, Space, Window};
use rcm_simplicial::{McBudget, Model, SeedStream};

fn main() -> rcm_simplicial::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let arg = |i: usize, d: f64| args.get(i).copied().unwrap_or(d);
    let (p, q) = (arg(0, 0.3), arg(1, 0.5));
    let outer = arg(2, 400.0) as usize;
    let inner = arg(3, 100.0) as usize;
    let window = Window::new(Space::unit_cube(2))?;
    let system = constant_system(&[p, q])?;
    let ladder = [5.0, 20.0, 80.0]
        .iter()
        .map(|&b| Model::new(window.clone(), system.clone(), b))
        .collect::<rcm_simplicial::Result<Vec<_>>>()?;
    let exp = CltExperiment {
        regime: Regime::IncreasingIntensity,
        ladder,
        replicates: 2000,
        a: CoefficientVector::euler(2),
        budget: McBudget::default(),
        standardization: Standardization::Formula,
        gamma: Some(GammaConfig { outer, inner, fourth_moment_replicates: 2000 }),
        marks: MarkDistribution::Single,
        mark_grid: 1,
    };
    let t = Instant::now();
    let report = run_clt_experiment(&exp, SeedStream::new(7))?;
    report.write_csv(std::io::stdout())?;
    for r in &report.rungs {
        eprintln!(
            "beta {}: mean {:.3} ({:.3}) vs {:.3} ({:.3}); var {:.3} ({:.3}) vs {:.3} ({:.3}); count ks {:?}",
            r.beta,
            r.formula_mean.value,
            r.formula_mean.standard_error,
            r.empirical_mean.value,
            r.empirical_mean.standard_error,
            r.formula_variance.value,
            r.formula_variance.standard_error,
            r.empirical_variance.value,
            r.empirical_variance.standard_error,
            r.count_ks
        );
    }
    eprintln!("elapsed {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
