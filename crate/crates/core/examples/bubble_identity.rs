//! (-Δ)^s U_{0,1} against U^{2*_s - 1} at sample radii, via the radial
//! quadrature route.
use fracbubble::bubble::{bubble_eval, Bubble};
use fracbubble::fraclap::{frac_laplacian_pv, identity_samples, BubbleField, PvQuadratureSpec};
use fracbubble::params::make_params;

fn main() -> fracbubble::Result<()> {
    for (n, s) in [(6usize, 0.9), (5, 0.8)] {
        let p = make_params(n, s)?;
        let b = Bubble::standard(n);
        let field = BubbleField { params: &p, bubble: &b };
        let spec = PvQuadratureSpec::radial_default();
        println!("N={n} s={s}");
        for y in identity_samples(n) {
            let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let lhs = frac_laplacian_pv(&p, &field, &y, &spec)?;
            let rhs = bubble_eval(&p, &b, &y).powf(p.p);
            println!(
                "  |y| = {r:.3}  (-Δ)^s U = {:.12e} ± {:.1e}  U^p = {rhs:.12e}  rel {:.2e}",
                lhs.value,
                lhs.error,
                (lhs.value / rhs - 1.0).abs()
            );
        }
    }
    Ok(())
}
