//! Weighted norm of the residual l_k along the regime k = 8, 16, 32, 64.
//! Optional arguments: N and s (default 6 and 0.9).
use fracbubble::fraclap::PvQuadratureSpec;
use fracbubble::params::make_params;
use fracbubble::potential::PotentialModel;
use fracbubble::residual::{residual_norm_trend, RegimeOptions};

fn main() -> fracbubble::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map_or(6, |v| v.parse().expect("N is an integer"));
    let s = args.next().map_or(0.9, |v| v.parse().expect("s is a number"));
    let params = make_params(n, s)?;
    let t = std::time::Instant::now();
    let trend = residual_norm_trend(
        &params,
        &PotentialModel::default_bump(params.n),
        &[8, 16, 32, 64],
        &RegimeOptions::default(),
        &PvQuadratureSpec::default(),
    )?;
    for r in &trend.rows {
        println!(
            "k = {:3}  lambda = {:10.3}  h = {:.4}  |l|** = {:.4e}  (J1 {:.3e}, J2 {:.3e}, J3 {:.3e})",
            r.k, r.lambda, r.h_bar, r.norms.total, r.norms.j1, r.norms.j2, r.norms.j3
        );
    }
    println!(
        "slope {:.4} vs threshold {:.4}: {} ({:.1?})",
        trend.slope,
        trend.threshold,
        if trend.pass { "pass" } else { "fail" },
        t.elapsed()
    );
    Ok(())
}
