//! Two-bubble interaction integrals at λ|x₁ - x₂| = 50 against their
//! far-field asymptotics.
use fracbubble::bubble::Bubble;
use fracbubble::integrals::{interaction_gradient_mc, interaction_integral_mc, radial_bubble_integral};
use fracbubble::mc::McSpec;
use fracbubble::params::make_params;

fn main() -> fracbubble::Result<()> {
    for (n, s) in [(6usize, 0.9), (5, 0.8)] {
        let p = make_params(n, s)?;
        let gamma = p.decay();
        let a5 = p.c_n * radial_bubble_integral(&p, p.p)?;
        let a6 = gamma * gamma / (n as f64 + 2.0 * s) * a5;
        let lambda = 10.0;
        let mut c2 = vec![0.0; n];
        c2[0] = 5.0;
        let b1 = Bubble::new(vec![0.0; n], lambda)?;
        let b2 = Bubble::new(c2, lambda)?;
        let spec = McSpec::default();
        let t = std::time::Instant::now();
        let e = interaction_integral_mc(&p, &b1, &b2, &spec)?;
        let target = a5 / 50f64.powf(gamma);
        println!(
            "N={n} s={s}: interaction {:.6e} ± {:.2e}, far field {:.6e}, rel err {:.3}",
            e.estimate,
            e.stderr,
            target,
            e.estimate / target - 1.0
        );
        let g = interaction_gradient_mc(&p, &b1, &b2, 0, &spec)?;
        let gt = -a6 * lambda * 50.0 / 50f64.powf(gamma + 2.0);
        println!(
            "           gradient {:.6e} ± {:.2e}, far field {:.6e}, rel err {:.3} ({:.1?})",
            g.estimate,
            g.stderr,
            gt,
            g.estimate / gt - 1.0,
            t.elapsed()
        );
    }
    Ok(())
}
