//! Difference operators: `Λ^k χ_a` by the alternating sum over retained
//! subsets, by the closed form, and from a star table.

use rcm_simplicial::complex::{build_augmented, star_table, MarkKey};
use rcm_simplicial::connect::constant_system;
use rcm_simplicial::functional::{lambda_euler_closed_form, lambda_operator, CoefficientVector};
use rcm_simplicial::space::{Space, Window};
use rcm_simplicial::SeedStream;

fn main() -> rcm_simplicial::Result<()> {
    let window = Window::new(Space::unit_cube(2))?;
    let system = constant_system(&[0.6, 0.5])?;
    let mut rng = SeedStream::new(9).rng();
    let points = window.sample_poisson(12.0, &mut rng)?;
    let added: Vec<_> = (0..2).map(|i| window.sample_point(&mut rng, i)).collect();
    let key = MarkKey(2024);
    let a = CoefficientVector::euler(2);
    let aug = build_augmented(&points, &added, &[1, 2], &system, key)?;
    let table = star_table(&points, &added, &system, key)?;
    for k in 1..=2 {
        let alternating = lambda_operator(&aug, k, &a)?;
        let closed = lambda_euler_closed_form(&aug, k, &a)?;
        let mask = (1 << k) - 1;
        println!("k = {k}: alternating sum {alternating}, closed form {closed}, star table {}", table.weighted(mask, a.as_slice()));
    }
    Ok(())
}
