//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rcm_simplicial::complex::{build_augmented, build_complex, MarkKey};
use rcm_simplicial::connect::{
    cech_system, constant_system, hyperbolic_rgg_system, rips_system, stationary_marked_system, ConnectionSystem, MarkRadius,
    Metric,
};
use rcm_simplicial::functional::{lambda_euler_closed_form, lambda_operator, CoefficientVector};
use rcm_simplicial::moments::{empirical_moments, euler_moments, replicate_counts, zeta, MomentReport};
use rcm_simplicial::normapprox::{
    gamma_quantities, run_clt_experiment, CltExperiment, GammaConfig, LadderReport, Regime, Standardization,
};
use rcm_simplicial::runner::{run, Overrides};
use rcm_simplicial::space::{MarkDistribution, Point, Space, Window};
use rcm_simplicial::stats::{chi_square_test, log_log_slope};
use rcm_simplicial::{McBudget, Model, MonteCarloEstimate as Est, SeedStream};

const SEED: u64 = 20240917;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn square() -> Window {
    Window::new(Space::unit_cube(2)).unwrap()
}

fn within(a: &Est, b: &Est, k: f64) -> bool {
    a.z_distance(b) <= k
}

fn exact(v: f64) -> Est {
    Est { value: v, standard_error: 0.0, samples: 1 }
}

// 1: Λ^k χ_a by the alternating sum equals Σ a_i f_i^{x_1..x_k}.
fn criterion1() -> Outcome {
    let mut rng = SeedStream::new(SEED).named("c1").rng();
    let mut mismatches = 0;
    for trial in 0..200u64 {
        let alpha = rng.random_range(1..=3usize);
        let sys = match trial % 3 {
            0 => constant_system(&(0..alpha).map(|_| rng.random_range(0.1..0.9)).collect::<Vec<_>>()).unwrap(),
            1 => rips_system(alpha, rng.random_range(0.15..0.5), Metric::Euclidean).unwrap(),
            _ => cech_system(alpha, rng.random_range(0.1..0.4), Metric::Euclidean).unwrap(),
        };
        let k = 1 + (trial as usize / 3) % 2;
        let l = k + rng.random_range(0..=2usize);
        let n = rng.random_range(0..=50 - l);
        let w = square();
        let pts: Vec<Point> = (0..n).map(|i| w.sample_point(&mut rng, i as u64)).collect();
        let added: Vec<Point> = (0..l).map(|i| w.sample_point(&mut rng, i as u64)).collect();
        let a = CoefficientVector((0..=alpha).map(|_| rng.random_range(-3..=3) as f64).collect());
        let key = MarkKey(rng.random());
        let retained: Vec<usize> = (1..=l).collect();
        let aug = build_augmented(&pts, &added, &retained, &sys, key).unwrap();
        if lambda_operator(&aug, k, &a).unwrap() != lambda_euler_closed_form(&aug, k, &a).unwrap() {
            mismatches += 1;
        }
    }
    Outcome::new(mismatches == 0, format!("{mismatches} mismatches in 200 configurations"))
}

// 2: moment formulas for the constant system on the unit square.
fn criterion2() -> (Outcome, MomentReport) {
    let model = Model::new(square(), constant_system(&[0.3, 0.5]).unwrap(), 10.0).unwrap();
    let a = CoefficientVector::euler(2);
    let stream = SeedStream::new(SEED).named("c2");
    let mut rep = euler_moments(&a, &model, &McBudget::default(), stream.named("moments")).unwrap();
    let counts = replicate_counts(&model, 20_000, stream.named("replicates")).unwrap();
    let emp = empirical_moments(&counts, &a).unwrap();
    let derived = [10.0, 15.0, 2.25];
    let mut pass = true;
    let mut detail = Vec::new();
    for j in 0..3 {
        let e = emp.count_means[j];
        let ok = within(&e, &exact(derived[j]), 4.0) && within(&e, &rep.expected_counts[j], 4.0);
        pass &= ok;
        detail.push(format!("E f{j} {:.4}±{:.4} vs {}", e.value, e.standard_error, derived[j]));
    }
    let ok = within(&emp.euler_variance, &rep.euler_variance, 4.0);
    pass &= ok;
    detail.push(format!(
        "Var chi {:.3}±{:.3} vs {:.3}",
        emp.euler_variance.value, emp.euler_variance.standard_error, rep.euler_variance.value
    ));
    rep.empirical = Some(emp);
    (Outcome::new(pass, detail.join("; ")), rep)
}

// 3: law of (f_1, f_2) on 6 fixed points against exhaustive enumeration.
fn criterion3() -> Outcome {
    let (p, q) = (0.5, 1.0 / 3.0);
    let sys = constant_system(&[p, q]).unwrap();
    let w = square();
    let mut rng = SeedStream::new(SEED).named("c3-points").rng();
    let pts: Vec<Point> = (0..6).map(|i| w.sample_point(&mut rng, i as u64)).collect();

    let pairs: Vec<(usize, usize)> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect();
    let triples: Vec<[usize; 3]> =
        (0..6).flat_map(|i| (i + 1..6).flat_map(move |j| (j + 1..6).map(move |k| [i, j, k]))).collect();
    let edge_index = |i: usize, j: usize| pairs.iter().position(|&e| e == (i, j)).unwrap();
    let cells = |e: usize, t: usize| e * 21 + t;
    let mut prob = vec![0.0; 16 * 21];
    for pattern in 0u32..(1 << 15) {
        let e = pattern.count_ones() as usize;
        let pe = p.powi(e as i32) * (1.0 - p).powi(15 - e as i32);
        let tri = triples
            .iter()
            .filter(|t| {
                [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])].iter().all(|&(i, j)| pattern & (1 << edge_index(i, j)) != 0)
            })
            .count();
        let mut binom = 1.0;
        for t in 0..=tri {
            prob[cells(e, t)] += pe * binom * q.powi(t as i32) * (1.0 - q).powi((tri - t) as i32);
            binom = binom * (tri - t) as f64 / (t + 1) as f64;
        }
    }
    let n = 100_000u64;
    let stream = SeedStream::new(SEED).named("c3-marks");
    let mut observed = vec![0u64; prob.len()];
    for s in 0..n {
        let c = build_complex(&pts, &sys, Model::mark_key(stream.child(s))).unwrap();
        observed[cells(c.count(1), c.count(2))] += 1;
    }
    let expected: Vec<f64> = prob.iter().map(|pr| pr * n as f64).collect();
    let (stat, dof, q99) = chi_square_test(&observed, &expected);
    Outcome::new(stat <= q99, format!("chi2 {stat:.2} on {dof} dof, 99% quantile {q99:.2}"))
}

fn zeta_identities(window: &Window, sys: &ConnectionSystem, stream: SeedStream, tag: &str) -> (bool, Vec<String>) {
    let budget = McBudget::default();
    let z = |m: usize, l: usize, r: usize, s: &str| zeta(m, l, r, window, sys, &budget, stream.named(s)).unwrap();
    let top = sys.alpha() + 1;
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut check = |a: Est, b: Est| {
        let d = a.z_distance(&b);
        worst = worst.max(if d.is_finite() { d } else { f64::INFINITY });
        pass &= d <= 3.0;
        count += 1;
    };
    let vol = window.measure();
    check(z(1, 1, 1, "pair"), exact(vol));
    check(z(1, 1, 2, "pair"), exact(vol * vol));
    for m in 1..=top {
        for l in m..=top {
            if m < l {
                for r in l..=m + l {
                    check(z(m, l, r, "swap-a"), z(l, m, r, "swap-b"));
                }
                check(z(m, l, l, "face-a"), z(l, l, l, "face-b"));
            }
            check(z(m, l, m + l, "product-a"), Est::product(z(m, m, m, "product-b"), z(l, l, l, "product-c")));
        }
    }
    (pass, vec![format!("{tag}: {count} identities, worst {worst:.2} SE")])
}

// 4: ζ identities on a Rips and a hyperbolic geometric system.
fn criterion4() -> Outcome {
    let stream = SeedStream::new(SEED).named("c4");
    let rect = Window::new(Space::EuclideanBox { bounds: vec![(0.0, 2.0), (0.0, 3.0)] }).unwrap();
    let (p1, d1) = zeta_identities(&rect, &rips_system(2, 0.4, Metric::Euclidean).unwrap(), stream.named("rips"), "rips");
    let disk = Window::new(Space::hyperbolic(3.0)).unwrap();
    let (p2, d2) = zeta_identities(&disk, &hyperbolic_rgg_system(1.5, 0.5).unwrap(), stream.named("hyp"), "hyperbolic");
    Outcome::new(p1 && p2, [d1, d2].concat().join("; "))
}

// 5: Var χ_a ≥ a_α² E f_α on every configuration with a moment report.
fn criterion5(reports: &[(&str, &MomentReport)]) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, r) in reports {
        let lb = r.lower_bound;
        let se = r.euler_variance.standard_error.hypot(lb.standard_error);
        let ok = r.euler_variance.value >= lb.value - 3.0 * se;
        pass &= ok;
        detail.push(format!("{name}: {:.3} >= {:.3}", r.euler_variance.value, lb.value));
    }
    Outcome::new(pass, detail.join("; "))
}

// 6: empirical KS ≤ γ_1 + … + γ_6 + 3 SE.
fn criterion6() -> (Outcome, Vec<MomentReport>) {
    let sys = constant_system(&[0.3, 0.5]).unwrap();
    let ladder: Vec<Model> = [5.0, 20.0].iter().map(|&b| Model::new(square(), sys.clone(), b).unwrap()).collect();
    let stream = SeedStream::new(SEED).named("c6");
    let exp = CltExperiment {
        regime: Regime::IncreasingIntensity,
        ladder: ladder.clone(),
        replicates: 10_000,
        a: CoefficientVector::euler(2),
        budget: McBudget::default(),
        standardization: Standardization::Formula,
        gamma: Some(GammaConfig { outer: 200, inner: 100, fourth_moment_replicates: 2000 }),
        marks: MarkDistribution::Single,
        mark_grid: 1,
    };
    let rep = run_clt_experiment(&exp, stream).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for r in &rep.rungs {
        let g = r.gamma.as_ref().unwrap();
        let sum = Est::linear(&g.gamma.iter().map(|e| (1.0, *e)).collect::<Vec<_>>());
        let ok = r.ks <= sum.value + 3.0 * sum.standard_error;
        pass &= ok;
        detail.push(format!("beta {}: KS {:.4} vs sum gamma {:.3}±{:.3}", r.beta, r.ks, sum.value, sum.standard_error));
    }
    let reports = ladder
        .iter()
        .enumerate()
        .map(|(i, m)| euler_moments(&exp.a, m, &exp.budget, stream.named("lower").child(i as u64)).unwrap())
        .collect();
    (Outcome::new(pass, detail.join("; ")), reports)
}

// 7: log-log slopes of γ over β ∈ {5, 20, 80}.
fn criterion7() -> Outcome {
    // Constant-system γ's depend on β only through β|W|; a window of area 6
    // puts the ladder far enough into the asymptotic range.
    let window = Window::new(Space::EuclideanBox { bounds: vec![(0.0, 6.0), (0.0, 1.0)] }).unwrap();
    let sys = constant_system(&[1.0, 1.0]).unwrap();
    let cfg = GammaConfig { outer: 15, inner: 100, fourth_moment_replicates: 300 };
    let betas = [5.0, 20.0, 80.0];
    let stream = SeedStream::new(SEED).named("c7");
    let reports: Vec<_> = betas
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let model = Model::new(window.clone(), sys.clone(), b).unwrap();
            gamma_quantities(&model, &CoefficientVector::euler(2), &cfg, &McBudget::default(), stream.child(i as u64)).unwrap()
        })
        .collect();
    let bands = [(-0.8, -0.2), (-1.9, -1.1), (-0.8, -0.2), (-0.8, -0.2), (-0.8, -0.2), (-1.4, -0.6)];
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, (lo, hi)) in bands.iter().enumerate() {
        let y: Vec<f64> = reports.iter().map(|g| g.gamma[k].value).collect();
        let s = log_log_slope(&betas, &y).unwrap_or(f64::NAN);
        pass &= s > *lo && s < *hi;
        detail.push(format!("gamma{} {s:.3}", k + 1));
    }
    Outcome::new(pass, detail.join(", "))
}

fn window_ladder() -> CltExperiment {
    let sys = stationary_marked_system(2, MarkRadius::Fixed(0.1)).unwrap();
    let ladder = [10.0, 40.0, 160.0]
        .iter()
        .map(|&len| Model::new(Window::new(Space::interval(len, MarkDistribution::Single)).unwrap(), sys.clone(), 50.0).unwrap())
        .collect();
    CltExperiment {
        regime: Regime::MultivariateStationary,
        ladder,
        replicates: WINDOW_REPLICATES,
        a: CoefficientVector::euler(2),
        budget: McBudget::default(),
        // the formula mean carries Monte Carlo error of order |W|, larger than
        // the KS resolution on the top rung
        standardization: Standardization::Empirical,
        gamma: None,
        marks: MarkDistribution::Single,
        mark_grid: 1,
    }
}

const WINDOW_REPLICATES: usize = 20_000;

// 8: increasing windows, KS decreasing with final KS < 0.05, ν = 2 r_0.
fn criterion8(rep: &LadderReport) -> Outcome {
    let ks: Vec<f64> = rep.rungs.iter().map(|r| r.ks).collect();
    let nu = rep.nu.as_ref().unwrap().nu;
    let nu_ok = within(&nu, &exact(0.2), 2.0);
    let last = *ks.last().unwrap();
    let pass = rep.ks_decreasing && last < 0.05 && nu_ok;
    let ks_s: Vec<String> = ks.iter().map(|k| format!("{k:.4}")).collect();
    Outcome::new(pass, format!("KS [{}], nu {:.4}±{:.1e}", ks_s.join(", "), nu.value, nu.standard_error))
}

// 9: covariance of the counts against Σ, and Σ positive definite.
fn criterion9(rep: &LadderReport) -> Outcome {
    let cov = rep.covariance.as_ref().unwrap();
    let st = rep.stationary.as_ref().unwrap();
    let pass = cov.max_z <= 4.0 && st.min_eigenvalue_shrunk > 0.0;
    Outcome::new(pass, format!("max z {:.2}, min eigenvalue after shrinkage {:.4}", cov.max_z, st.min_eigenvalue_shrunk))
}

fn moments_csv(threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let model = Model::new(square(), rips_system(2, 0.2, Metric::Euclidean).unwrap(), 20.0).unwrap();
        let a = CoefficientVector::euler(2);
        let stream = SeedStream::new(SEED).named("c10");
        let mut rep = euler_moments(&a, &model, &McBudget::default(), stream).unwrap();
        rep.empirical = Some(empirical_moments(&replicate_counts(&model, 500, stream.named("r")).unwrap(), &a).unwrap());
        let mut out = Vec::new();
        rep.write_csv(&mut out).unwrap();
        out
    })
}

const RUN_CONFIG: &str = r#"
task = "moments"
seed = 99
beta = 15.0

[replicates]
count = 200

[space]
kind = "euclidean_box"
bounds = [[0.0, 1.0], [0.0, 1.0]]

[system]
name = "rips"
alpha = 2
radius = 0.25
"#;

// 10: a repeated run with the same seed gives identical bytes.
fn criterion10(first: &MomentReport) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();

    let same = moments_csv(1) == moments_csv(1) && moments_csv(1) == moments_csv(3);
    pass &= same;
    detail.push(format!("moments csv identical across runs and thread counts: {same}"));

    let (_, again) = criterion2();
    let mut a = Vec::new();
    let mut b = Vec::new();
    first.write_csv(&mut a).unwrap();
    again.write_csv(&mut b).unwrap();
    pass &= a == b;
    detail.push(format!("criterion 2 csv identical: {}", a == b));

    let cfg = rcm_simplicial::config::RunConfig::from_toml(RUN_CONFIG).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = ["moments.csv", "moments.json", "manifest.txt"];
    let mut outputs = Vec::new();
    for (i, threads) in [1usize, 2].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let ov = Overrides { out: Some(out.clone()), threads: Some(*threads), ..Default::default() };
        run(&cfg, RUN_CONFIG, &ov).unwrap();
        outputs.push(files.iter().map(|f| std::fs::read(out.join(f)).unwrap()).collect::<Vec<_>>());
    }
    let runner_same = outputs[0] == outputs[1];
    pass &= runner_same;
    detail.push(format!("runner outputs identical: {runner_same}"));
    Outcome::new(pass, detail.join("; "))
}

/// Runs every criterion, or only those given as numeric arguments.
fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |n: usize| wanted.is_empty() || wanted.contains(&n);
    let mut failed = Vec::new();
    let mut report = |n: usize, t: Instant, o: Outcome| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {verdict} ({:.1}s) {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed.push(n);
        }
    };

    if want(1) {
        report(1, Instant::now(), criterion1());
    }
    let mut rep2 = None;
    if want(2) || want(5) || want(10) {
        let t = Instant::now();
        let (o, r) = criterion2();
        if want(2) {
            report(2, t, o);
        }
        rep2 = Some(r);
    }
    if want(3) {
        report(3, Instant::now(), criterion3());
    }
    if want(4) {
        report(4, Instant::now(), criterion4());
    }
    if want(5) || want(6) {
        let t = Instant::now();
        let (o6, rep6) = criterion6();
        if want(5) {
            let rep2 = rep2.as_ref().unwrap();
            let lower = [("p=0.3 q=0.5 beta=10", rep2), ("p=0.3 q=0.5 beta=5", &rep6[0]), ("p=0.3 q=0.5 beta=20", &rep6[1])];
            report(5, Instant::now(), criterion5(&lower));
        }
        if want(6) {
            report(6, t, o6);
        }
    }
    if want(7) {
        report(7, Instant::now(), criterion7());
    }
    if want(8) || want(9) {
        let t = Instant::now();
        match run_clt_experiment(&window_ladder(), SeedStream::new(SEED).named("c8")) {
            Ok(rep) => {
                if want(8) {
                    report(8, t, criterion8(&rep));
                }
                if want(9) {
                    report(9, t, criterion9(&rep));
                }
            }
            Err(e) => {
                for n in [8, 9].into_iter().filter(|&n| want(n)) {
                    report(n, t, Outcome::new(false, format!("error: {e}")));
                }
            }
        }
    }
    if want(10) {
        report(10, Instant::now(), criterion10(rep2.as_ref().unwrap()));
    }

    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
