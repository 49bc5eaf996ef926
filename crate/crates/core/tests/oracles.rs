//! Independent deterministic routes and exact invariances for the Monte
//! Carlo integrals, the energy oracle, the residual and the Pohozaev terms.

use fracbubble::bubble::{ApproxSolution, Bubble, CutoffEta};
use fracbubble::energy::{compute_constants, energy_direct_oracle, interaction_from_lattice};
use fracbubble::fraclap::PvQuadratureSpec;
use fracbubble::integrals::{
    interaction_gradient_mc, interaction_integral_mc, potential_mass_integral, radial_bubble_integral,
};
use fracbubble::lattice::CylinderConfig;
use fracbubble::mc::McSpec;
use fracbubble::params::{make_params, PhysicalParams};
use fracbubble::pohozaev::{concentration_integral, pohozaev_volume, BallSpec, PohozaevMode};
use fracbubble::potential::PotentialModel;
use fracbubble::quadrature::{adaptive, adaptive_semi_infinite};
use fracbubble::residual::lk_eval;
use fracbubble::special::sphere_area;

const PAIRS: [(usize, f64); 2] = [(6, 0.9), (5, 0.8)];

fn spec(n_samples: u64, seed: u64) -> McSpec {
    McSpec { n_samples, seed, ..McSpec::default() }
}

/// C^{2*} |S^{N-2}| ∫∫ w(t) (1+t²+ρ²)^{-e1} (1+(t-D)²+ρ²)^{-a} ρ^{N-2} dρ dt,
/// cylindrical coordinates around the axis through both centres.
fn bipolar(p: &PhysicalParams, dist: f64, e1: f64, w: impl Fn(f64) -> f64) -> f64 {
    let n = p.n;
    let a = p.half_decay();
    let inner = |t: f64| {
        adaptive_semi_infinite(
            |r: f64| {
                let r2 = r * r;
                (1.0 + t * t + r2).powf(-e1) * (1.0 + (t - dist) * (t - dist) + r2).powf(-a) * r.powi(n as i32 - 2)
            },
            0.0,
            1e-300,
            1e-11,
        )
        .unwrap()
        .value
            * w(t)
    };
    let mid = adaptive(inner, 0.0, dist.max(1e-12), 1e-300, 1e-10).unwrap().value;
    let right = adaptive_semi_infinite(|t| inner(dist + t), 0.0, 1e-300, 1e-10).unwrap().value;
    let left = adaptive_semi_infinite(|t| inner(-t), 0.0, 1e-300, 1e-10).unwrap().value;
    p.c_n.powf(p.two_s_star) * sphere_area(n - 2) * (left + mid + right)
}

fn pair(p: &PhysicalParams, lambda: f64, d: f64) -> (Bubble, Bubble) {
    let mut x2 = vec![0.0; p.n];
    x2[0] = d;
    (Bubble::new(vec![0.0; p.n], lambda).unwrap(), Bubble::new(x2, lambda).unwrap())
}

#[test]
fn interaction_matches_bipolar_quadrature() {
    for (n, s) in PAIRS {
        let p = make_params(n, s).unwrap();
        for ld in [2.0, 50.0] {
            let (b1, b2) = pair(&p, 10.0, ld / 10.0);
            let mc = interaction_integral_mc(&p, &b1, &b2, &spec(400_000, 11)).unwrap();
            let q = bipolar(&p, ld, p.half_decay() * p.p, |_| 1.0);
            let dev = (mc.estimate - q).abs();
            assert!(dev < 4.0 * mc.stderr + 1e-9 * q, "N={n} λd={ld}: mc {} ± {} vs quadrature {q}", mc.estimate, mc.stderr);

            let g = interaction_gradient_mc(&p, &b1, &b2, 0, &spec(400_000, 12)).unwrap();
            let qg = -2.0 * p.half_decay() * 10.0 * bipolar(&p, ld, p.half_decay() * p.p + 1.0, |t| t);
            let dev = (g.estimate - qg).abs();
            assert!(dev < 4.0 * g.stderr + 1e-9 * qg.abs(), "N={n} λd={ld}: gradient mc {} ± {} vs {qg}", g.estimate, g.stderr);
        }
    }
}

#[test]
fn coincident_centres_reduce_to_single_bubble_integral() {
    for (n, s) in PAIRS {
        let p = make_params(n, s).unwrap();
        let (b1, _) = pair(&p, 3.0, 0.0);
        let b2 = b1.clone();
        let mc = interaction_integral_mc(&p, &b1, &b2, &spec(200_000, 21)).unwrap();
        let exact = radial_bubble_integral(&p, p.two_s_star).unwrap();
        assert!((mc.estimate - exact).abs() < 4.0 * mc.stderr, "{} ± {} vs {exact}", mc.estimate, mc.stderr);
        for axis in [0, 3] {
            let g = interaction_gradient_mc(&p, &b1, &b2, axis, &spec(200_000, 22)).unwrap();
            assert!(g.estimate.abs() <= 4.0 * g.stderr, "axis {axis}: {} ± {}", g.estimate, g.stderr);
        }
    }
}

#[test]
fn interaction_depends_only_on_scaled_separation() {
    let p = make_params(6, 0.9).unwrap();
    let (a1, a2) = pair(&p, 4.0, 3.0);
    let (c1, c2) = pair(&p, 8.0, 1.5);
    let sp = spec(50_000, 31);
    let e1 = interaction_integral_mc(&p, &a1, &a2, &sp).unwrap();
    let e2 = interaction_integral_mc(&p, &c1, &c2, &sp).unwrap();
    assert!((e1.estimate - e2.estimate).abs() <= 1e-12 * e1.estimate.abs());
    // The gradient carries one factor of λ.
    let g1 = interaction_gradient_mc(&p, &a1, &a2, 0, &sp).unwrap();
    let g2 = interaction_gradient_mc(&p, &c1, &c2, 0, &sp).unwrap();
    assert!((2.0 * g1.estimate - g2.estimate).abs() <= 1e-12 * g2.estimate.abs());
}

#[test]
fn potential_mass_concentrates_at_the_centre() {
    for (n, s) in PAIRS {
        let p = make_params(n, s).unwrap();
        let v = PotentialModel::default_bump(n);
        let mut x = vec![0.0; n];
        x[0] = 1.3;
        x[3] = 0.2;
        let lambda = 1e3;
        let b = Bubble::new(x.clone(), lambda).unwrap();
        let est = potential_mass_integral(&p, &v, &b, &spec(200_000, 41)).unwrap();
        let target = v.at(&x) * radial_bubble_integral(&p, 2.0).unwrap() * lambda.powf(-2.0 * s);
        assert!((est.estimate / target - 1.0).abs() < 0.02, "N={n}: {} vs {target}", est.estimate);
        let c = potential_mass_integral(&p, &PotentialModel::Constant { c: 2.5 }, &b, &spec(200_000, 42)).unwrap();
        let exact = 2.5 * radial_bubble_integral(&p, 2.0).unwrap() * lambda.powf(-2.0 * s);
        assert!((c.estimate - exact).abs() < 4.0 * c.stderr + 1e-12 * exact);
    }
}

#[test]
fn direct_energy_of_one_pair_matches_the_expansion() {
    for (n, s) in PAIRS {
        let p = make_params(n, s).unwrap();
        let config = CylinderConfig::new(1, 1.0, 0.5, vec![0.0; n - 3]).unwrap();
        let lambda = 50.0;
        let zero = PotentialModel::Constant { c: 0.0 };
        let d = energy_direct_oracle(&p, &config, lambda, &zero, &spec(400_000, 51)).unwrap();
        let c = compute_constants(&p, 1.0).unwrap();
        // Bulk is (s/N)∫U^{2*} per bubble, i.e. B0 for the two bubbles.
        assert!((d.bulk - c.b0).abs() < 1e-12 * c.b0);
        assert_eq!(d.potential.estimate, 0.0);
        let assembled = interaction_from_lattice(&c, &config, lambda).unwrap();
        let dev = (d.interaction.estimate / assembled - 1.0).abs();
        assert!(dev < 0.05 + 3.0 * d.interaction.stderr / assembled.abs(), "N={n}: {} vs {assembled}", d.interaction.estimate);
    }
}

fn far_cutoff_solution(p: &PhysicalParams, k: usize, lambda: f64) -> ApproxSolution {
    let n = p.n;
    let config = CylinderConfig::new(k, 1.0, 0.4, vec![0.0; n - 3]).unwrap();
    let cutoff = CutoffEta::new(1.0, vec![0.0; n - 3], 0.3).unwrap();
    ApproxSolution::new(p.clone(), config, lambda, Some(cutoff)).unwrap()
}

#[test]
fn residual_is_linear_in_the_potential() {
    let p = make_params(6, 0.9).unwrap();
    let sol = far_cutoff_solution(&p, 4, 40.0);
    let mut y = sol.points()[0].clone();
    y[0] += 0.5 / sol.lambda;
    let v = PotentialModel::default_bump(6);
    let quad = PvQuadratureSpec::default();
    let l1 = lk_eval(&sol, &v, &y, &quad).unwrap();
    let l2 = lk_eval(&sol, &v.scaled(2.0), &y, &quad).unwrap();
    assert!((l2.j2 - 2.0 * l1.j2).abs() <= 1e-14 * l1.j2.abs());
    assert_eq!(l1.j1, l2.j1);
    assert_eq!(l1.j3, l2.j3);
    let l0 = lk_eval(&sol, &PotentialModel::Constant { c: 0.0 }, &y, &quad).unwrap();
    assert_eq!(l0.j2, 0.0);
    // Inside the plateau η = 1 and J1 is the superadditive excess of the power.
    assert!(l0.j1 > 0.0);
}

#[test]
fn pohozaev_terms_for_constant_potential() {
    let p = make_params(6, 0.9).unwrap();
    let sol = far_cutoff_solution(&p, 4, 200.0);
    let ball = BallSpec::for_solution(&sol, 3.5).unwrap();
    let sp = spec(100_000, 61);
    let c = 1.7;
    let v = PotentialModel::Constant { c };
    let radial = pohozaev_volume(&sol, &v, &ball, PohozaevMode::Radial, &sp).unwrap();
    let mass = concentration_integral(&sol, |_, _| 1.0, &ball, &sp).unwrap();
    assert!((radial.estimate - p.s * c * mass.estimate.estimate).abs() <= 1e-12 * radial.estimate.abs());
    for i in 3..6 {
        let axis = pohozaev_volume(&sol, &v, &ball, PohozaevMode::Axis(i), &sp).unwrap();
        assert_eq!(axis.estimate, 0.0);
    }
    let zero = concentration_integral(&sol, |_, _| 0.0, &ball, &sp).unwrap();
    assert_eq!(zero.estimate.estimate, 0.0);
    assert!(pohozaev_volume(&sol, &v, &ball, PohozaevMode::Axis(2), &sp).is_err());
}
