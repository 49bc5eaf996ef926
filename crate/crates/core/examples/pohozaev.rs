//! Pohozaev volume integrals at the critical point of r^{2s}V and off it,
//! and the concentration of ∫u² at λ = 10³, k = 8.
use fracbubble::mc::McSpec;
use fracbubble::params::make_params;
use fracbubble::pohozaev::{concentration_integral, normalized, pohozaev_volume, BallSpec, PohozaevMode};
use fracbubble::potential::PotentialModel;
use fracbubble::residual::RegimeOptions;

fn main() -> fracbubble::Result<()> {
    let params = make_params(6, 0.9)?;
    let v = PotentialModel::default_bump(6);
    let opts = RegimeOptions { lambda_const: Some(1e3 / 8f64.powf(1.75)), ..Default::default() };
    let (r, y) = opts.anchor(&params, &v)?;
    let spec = McSpec::default();
    let at = opts.point_at(&params, &v, 8, r, y.clone())?.solution;
    let ball = BallSpec::for_solution(&at, 3.5)?;
    let c = concentration_integral(&at, |_, _| 1.0, &ball, &spec)?;
    println!(
        "concentration: {:.6e} ± {:.1e} vs {:.6e}, rel err {:.2e}",
        c.estimate.estimate, c.estimate.stderr, c.target, c.relative_error
    );
    let off_r = opts.point_at(&params, &v, 8, r + 0.2, y.clone())?.solution;
    let mut y_off = y.clone();
    y_off[0] += 0.2;
    let off_y = opts.point_at(&params, &v, 8, r, y_off)?.solution;
    for (mode, off) in [(PohozaevMode::Radial, &off_r), (PohozaevMode::Axis(3), &off_y)] {
        let e0 = pohozaev_volume(&at, &v, &ball, mode, &spec)?;
        let e1 = pohozaev_volume(off, &v, &BallSpec::for_solution(off, 3.5)?, mode, &spec)?;
        println!(
            "{mode:?}: at critical {:.4e}, off-critical {:.4e}, ratio {:.2e}",
            normalized(&at, &e0),
            normalized(off, &e1),
            (normalized(&at, &e0) / normalized(off, &e1)).abs()
        );
    }
    Ok(())
}
