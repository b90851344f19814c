//! Build one realization of a Rips complex on the unit square and print its
//! simplex counts and the first lines of its dump.

use rcm_simplicial::connect::{rips_system, Metric};
use rcm_simplicial::functional::{euler_characteristic, CoefficientVector};
use rcm_simplicial::space::{Space, Window};
use rcm_simplicial::{Model, SeedStream};

fn main() -> rcm_simplicial::Result<()> {
    let model = Model::new(Window::new(Space::unit_cube(2))?, rips_system(3, 0.15, Metric::Euclidean)?, 100.0)?;
    let c = model.sample(SeedStream::new(42))?;
    println!("counts f_0..f_3 = {:?}", c.counts());
    println!("classical Euler characteristic = {}", euler_characteristic(&c, &CoefficientVector::euler(3))?);
    println!("downward closed: {}", c.is_downward_closed());
    let mut dump = Vec::new();
    c.write_dump(&mut dump)?;
    for line in String::from_utf8_lossy(&dump).lines().take(5) {
        println!("{line}");
    }
    Ok(())
}
