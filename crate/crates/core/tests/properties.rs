use proptest::prelude::*;
use rcm_simplicial::complex::{build_complex, MarkKey};
use rcm_simplicial::connect::{cech_system, constant_system, rips_system, Metric};
use rcm_simplicial::functional::{lambda_euler_closed_form, lambda_operator, CoefficientVector};
use rcm_simplicial::space::{Point, Space, Window};
use rcm_simplicial::{Model, SeedStream};

fn points(n: usize, seed: u64) -> Vec<Point> {
    let w = Window::new(Space::unit_cube(2)).unwrap();
    let mut rng = SeedStream::new(seed).rng();
    (0..n).map(|i| w.sample_point(&mut rng, i as u64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn complexes_are_downward_closed(n in 0usize..30, seed: u64, key: u64, alpha in 1usize..4, r in 0.05f64..0.6) {
        let pts = points(n, seed);
        for sys in [rips_system(alpha, r, Metric::Euclidean).unwrap(), cech_system(alpha, r, Metric::Euclidean).unwrap()] {
            let c = build_complex(&pts, &sys, MarkKey(key)).unwrap();
            prop_assert!(c.is_downward_closed());
            prop_assert_eq!(c.count(0), n);
        }
    }

    #[test]
    fn larger_probabilities_give_supercomplexes(n in 0usize..25, seed: u64, key: u64, p in 0.0f64..1.0, q in 0.0f64..1.0, dp in 0.0f64..0.5) {
        let pts = points(n, seed);
        let lo = build_complex(&pts, &constant_system(&[p, q]).unwrap(), MarkKey(key)).unwrap();
        let hi_sys = constant_system(&[(p + dp).min(1.0), (q + dp).min(1.0)]).unwrap();
        let hi = build_complex(&pts, &hi_sys, MarkKey(key)).unwrap();
        prop_assert!(lo.is_subcomplex_of(&hi));
    }

    #[test]
    fn cech_is_contained_in_rips_of_twice_the_radius(n in 0usize..25, seed: u64, r in 0.02f64..0.25) {
        let pts = points(n, seed);
        let cech = build_complex(&pts, &cech_system(3, r, Metric::Euclidean).unwrap(), MarkKey(0)).unwrap();
        let rips = build_complex(&pts, &rips_system(3, 2.0 * r, Metric::Euclidean).unwrap(), MarkKey(0)).unwrap();
        prop_assert!(cech.is_subcomplex_of(&rips));
        prop_assert_eq!(cech.count(1), rips.count(1));
    }

    #[test]
    fn point_order_does_not_matter(n in 2usize..20, seed: u64, key: u64) {
        let pts = points(n, seed);
        let mut rev = pts.clone();
        rev.reverse();
        let sys = constant_system(&[0.6, 0.5, 0.4]).unwrap();
        let a = build_complex(&pts, &sys, MarkKey(key)).unwrap();
        let b = build_complex(&rev, &sys, MarkKey(key)).unwrap();
        prop_assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn realizations_are_reproducible(seed: u64, beta in 1.0f64..40.0) {
        let model = Model::new(Window::new(Space::unit_cube(2)).unwrap(), rips_system(2, 0.2, Metric::Euclidean).unwrap(), beta).unwrap();
        let s = SeedStream::new(seed);
        prop_assert_eq!(model.sample(s).unwrap().canonical(), model.sample(s).unwrap().canonical());
    }

    #[test]
    fn lambda_identity_for_euler_coefficients(n in 0usize..20, seed: u64, key: u64, k in 1usize..3) {
        let pts = points(n, seed);
        let added = points(k, seed ^ 1);
        let sys = rips_system(2, 0.4, Metric::Euclidean).unwrap();
        let retained: Vec<usize> = (1..=k).collect();
        let aug = rcm_simplicial::complex::build_augmented(&pts, &added, &retained, &sys, MarkKey(key)).unwrap();
        let a = CoefficientVector::euler(2);
        prop_assert_eq!(lambda_operator(&aug, k, &a).unwrap(), lambda_euler_closed_form(&aug, k, &a).unwrap());
    }
}
