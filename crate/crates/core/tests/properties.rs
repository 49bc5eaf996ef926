//! Invariants checked over random inputs.

use fracbubble::bubble::{bubble_eval, norm_estimate, Bubble, CutoffEta};
use fracbubble::cli::commands::gradient_consistency;
use fracbubble::cli::config::RunConfig;
use fracbubble::energy::{compute_constants, find_critical_point};
use fracbubble::integrals::interaction_integral_mc;
use fracbubble::lattice::{generate_points, lattice_sum_exact, CylinderConfig, Side};
use fracbubble::mc::{mc_integrate, McSpec, MixtureProposal};
use fracbubble::params::{admissible_s_window, make_params};
use fracbubble::potential::PotentialModel;
use fracbubble::special::{beta, gamma};
use proptest::prelude::*;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn admissible() -> impl Strategy<Value = (usize, f64)> {
    (5usize..=8, 0.05f64..0.95).prop_map(|(n, t)| {
        let (lo, hi) = admissible_s_window(n).unwrap();
        (n, lo + t * (hi - lo))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta_is_symmetric_and_matches_gamma(a in 0.1f64..20.0, b in 0.1f64..20.0) {
        let ab = beta(a, b).unwrap();
        prop_assert!((ab / beta(b, a).unwrap() - 1.0).abs() < 1e-13);
        let g = gamma(a).unwrap() * gamma(b).unwrap() / gamma(a + b).unwrap();
        prop_assert!((ab / g - 1.0).abs() < 1e-11);
    }

    #[test]
    fn bubble_scale_covariance(
        (n, s) in admissible(),
        lambda in 0.1f64..100.0,
        x in prop::collection::vec(-2.0f64..2.0, 8),
        y in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        let p = make_params(n, s).unwrap();
        let (x, y) = (&x[..n], &y[..n]);
        let b = Bubble::new(x.to_vec(), lambda).unwrap();
        let z: Vec<f64> = y.iter().zip(x).map(|(yi, xi)| lambda * (yi - xi)).collect();
        let lhs = bubble_eval(&p, &b, y);
        let rhs = lambda.powf(p.half_decay()) * bubble_eval(&p, &Bubble::standard(n), &z);
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_sums_match_enumeration_from_any_point(
        k in 2usize..60,
        h in 0.0f64..0.95,
        r in 0.3f64..3.0,
        j0 in 0usize..60,
        gam in 2.5f64..6.0,
    ) {
        let cfg = CylinderConfig::new(k, r, h, vec![0.1, -0.2, 0.3]).unwrap();
        let pts = generate_points(&cfg);
        let j0 = j0 % k;
        // The rotation by 2π/k and the reflection y3 -> -y3 permute the points,
        // so the sums seen from x_j0 equal those seen from x_1.
        let mut same = 0.0;
        let mut cross = 0.0;
        for (j, x) in pts.iter().enumerate() {
            if j == j0 {
                continue;
            }
            let t = dist(x, &pts[j0]).powf(-gam);
            if j < k { same += t } else { cross += t }
        }
        let es = lattice_sum_exact(&cfg, gam, Side::SameSide).unwrap();
        prop_assert!((same / es - 1.0).abs() < 1e-11);
        if h > 0.0 {
            let ec = lattice_sum_exact(&cfg, gam, Side::CrossSide).unwrap();
            prop_assert!((cross / ec - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn norm_estimate_grows_with_samples(
        pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..20),
        extra in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..10),
    ) {
        let u = |y: &[f64]| (y[0] - y[1]).sin() + y[2] * y[3];
        let w = |y: &[f64]| 1.0 + y.iter().map(|v| v * v).sum::<f64>();
        let base = norm_estimate(u, w, &pts).unwrap();
        let mut all = pts.clone();
        all.extend(extra);
        prop_assert!(norm_estimate(u, w, &all).unwrap() >= base);
    }

    #[test]
    fn cutoff_is_a_monotone_ramp(d1 in 0.0f64..1.0, d2 in 0.0f64..1.0, sigma in 0.05f64..0.4) {
        let eta = CutoffEta::new(1.0, vec![0.0; 3], sigma).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (a, b) = (eta.of_distance(lo), eta.of_distance(hi));
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(a >= b);
        if lo <= sigma { prop_assert_eq!(a, 1.0); }
        if hi >= 2.0 * sigma { prop_assert_eq!(b, 0.0); }
    }

    #[test]
    fn potential_gradient_matches_differences(
        r in 0.3f64..3.0,
        y in prop::collection::vec(-1.5f64..1.5, 3),
        which in 0usize..2,
    ) {
        let v = if which == 0 {
            PotentialModel::GaussianBump { a: 0.3, b: 1.2, r_c: 1.1, y_c: vec![0.1, 0.0, -0.2], w: 0.8 }
        } else {
            PotentialModel::Saddle { r_c: 1.0, w_r: 0.7, c0: 1.0, c1: 0.5, y_c: vec![0.0; 3], w_y: 1.3 }
        };
        let (gr, gy) = v.gradient(r, &y);
        let h = 1e-5;
        let fr = (v.value(r + h, &y) - v.value(r - h, &y)) / (2.0 * h);
        prop_assert!((gr - fr).abs() < 1e-8 * (1.0 + gr.abs()));
        for i in 0..3 {
            let (mut yp, mut ym) = (y.clone(), y.clone());
            yp[i] += h;
            ym[i] -= h;
            let fy = (v.value(r, &yp) - v.value(r, &ym)) / (2.0 * h);
            prop_assert!((gy[i] - fy).abs() < 1e-8 * (1.0 + gy[i].abs()));
        }
    }

    #[test]
    fn config_round_trips(
        (n, s) in admissible(),
        seed in any::<u64>(),
        n_samples in 2_000u64..5_000_000,
        sigma_frac in 0.01f64..0.49,
    ) {
        let mut cfg = RunConfig {
            n,
            s,
            potential: PotentialModel::default_bump(n),
            initial: (1.0, vec![0.0; n - 3]),
            sigma_frac,
            ..RunConfig::default()
        };
        cfg.mc.seed = seed;
        cfg.mc.n_samples = n_samples;
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back.hash(), cfg.hash());
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn critical_point_ignores_potential_scale(c in 0.2f64..20.0, w in 0.5f64..2.0) {
        let p = make_params(6, 0.9).unwrap();
        let v = PotentialModel::GaussianBump { a: 0.0, b: 1.0, r_c: 1.0, y_c: vec![0.0; 3], w };
        let y0 = vec![0.1, -0.1, 0.05];
        let a = find_critical_point(&p, &v, (1.2, &y0)).unwrap();
        let b = find_critical_point(&p, &v.scaled(c), (1.2, &y0)).unwrap();
        prop_assert!((a.r_star - b.r_star).abs() < 1e-9);
        let exact = 0.5 * (1.0 + (1.0 + 4.0 * 0.9 * w).sqrt());
        prop_assert!((a.r_star - exact).abs() < 1e-9);
        for (u, v) in a.y2_star.iter().zip(&b.y2_star) {
            prop_assert!(u.abs() < 1e-9 && v.abs() < 1e-9);
        }
    }

    #[test]
    fn expansion_gradients_match_differences(seed in any::<u64>(), v_val in 0.1f64..3.0) {
        let p = make_params(6, 0.9).unwrap();
        let c = compute_constants(&p, 1.2).unwrap();
        let m = gradient_consistency(&c, &RunConfig::default(), v_val, 10, seed).unwrap();
        prop_assert!(m.lambda_scaled < 1e-8 && m.h_scaled < 1e-8, "{m:?}");
    }
}

#[test]
fn mc_is_independent_of_worker_count() {
    let p = make_params(6, 0.9).unwrap();
    let b1 = Bubble::new(vec![0.0; 6], 5.0).unwrap();
    let mut x2 = vec![0.0; 6];
    x2[1] = 2.0;
    let b2 = Bubble::new(x2, 5.0).unwrap();
    let spec = McSpec { n_samples: 100_000, seed: 7, ..McSpec::default() };
    let run = |workers: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap();
        pool.install(|| interaction_integral_mc(&p, &b1, &b2, &spec).unwrap())
    };
    let one = run(1);
    for w in [2, 8] {
        let other = run(w);
        assert_eq!(one.estimate.to_bits(), other.estimate.to_bits());
        assert_eq!(one.stderr.to_bits(), other.stderr.to_bits());
    }
}

#[test]
fn stderr_scales_as_inverse_root_of_samples() {
    let prop = MixtureProposal::student(4, 3.0, 1.0, vec![vec![0.0; 4]], vec![1.0]).unwrap();
    let f = |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp() * (1.0 + x[0]);
    let exact = std::f64::consts::PI.powi(2);
    let mut ratios = Vec::new();
    for seed in 1..=4u64 {
        let lo = mc_integrate(&McSpec { n_samples: 20_000, seed, ..McSpec::default() }, &prop, f).unwrap();
        let hi = mc_integrate(&McSpec { n_samples: 320_000, seed, ..McSpec::default() }, &prop, f).unwrap();
        assert!((hi.estimate - exact).abs() < 4.0 * hi.stderr);
        ratios.push(lo.stderr / hi.stderr);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((3.0..5.0).contains(&mean), "16x samples gave stderr ratios {ratios:?}");
}
