use fracbubble::bubble::{bubble_eval, Bubble};
use fracbubble::fraclap::{frac_laplacian_pv, BubbleField, Field, PvQuadratureSpec, Symmetry, Unstructured};
use fracbubble::params::make_params;
use std::time::Instant;

struct TransverseBubble<'a>(BubbleField<'a>);

impl Field for TransverseBubble<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x)
    }
    fn symmetry(&self) -> Symmetry {
        Symmetry::Transverse { center: self.0.bubble.center[3..].to_vec() }
    }
    fn length_scale(&self) -> f64 {
        self.0.length_scale()
    }
}

#[test]
fn routes_agree_on_standard_bubble() {
    for (n, s) in [(6usize, 0.9), (5, 0.8)] {
        let p = make_params(n, s).unwrap();
        let b = Bubble::standard(n);
        let f = BubbleField { params: &p, bubble: &b };
        let mut y = vec![0.0; n];
        y[0] = 0.3;
        let target = bubble_eval(&p, &b, &y).powf(p.p);
        let t0 = Instant::now();
        let radial = frac_laplacian_pv(&p, &f, &y, &PvQuadratureSpec::radial_default()).unwrap();
        let t1 = Instant::now();
        let spec = PvQuadratureSpec { angular_nodes: 8, ..Default::default() };
        let trans = frac_laplacian_pv(&p, &TransverseBubble(BubbleField { params: &p, bubble: &b }), &y, &spec).unwrap();
        let t2 = Instant::now();
        let full = frac_laplacian_pv(&p, &Unstructured(&f), &y, &PvQuadratureSpec { angular_nodes: 6, ..Default::default() }).unwrap();
        let t3 = Instant::now();
        println!(
            "N={n}: target {target:.10e} radial {:.10e} ({:?}) trans {:.10e} err {:.1e} ({:?}) full {:.10e} err {:.1e} ({:?})",
            radial.value, t1 - t0, trans.value, trans.error, t2 - t1, full.value, full.error, t3 - t2
        );
        assert!((radial.value / target - 1.0).abs() < 1e-3);
        assert!((trans.value / target - 1.0).abs() < 1e-3);
        assert!((full.value / target - 1.0).abs() < 1e-3);
    }
}
