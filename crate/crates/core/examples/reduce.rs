//! Critical point of r^{2s}V for a Gaussian bump and a saddle potential,
//! the reduced system at that point, and the regime scalings.
use fracbubble::energy::{compute_constants, find_critical_point, reduced_newton, solve_reduced_system, sweep_scaling};
use fracbubble::params::make_params;
use fracbubble::potential::PotentialModel;

fn main() -> fracbubble::Result<()> {
    let p = make_params(6, 0.9)?;
    let potentials = [
        ("bump", PotentialModel::default_bump(6)),
        ("saddle", PotentialModel::Saddle { r_c: 1.0, w_r: 1.0, c0: 1.0, c1: 0.5, y_c: vec![0.0; 3], w_y: 1.0 }),
    ];
    for (name, v) in potentials {
        let cp = find_critical_point(&p, &v, (1.0, &[0.1, 0.0, -0.1]))?;
        println!(
            "{name}: r* = {:.12}  y''* = {:?}  det sign {}  ({} Newton steps)",
            cp.r_star, cp.y2_star, cp.jac_det_sign, cp.iterations
        );
        let v_star = v.value(cp.r_star, &cp.y2_star);
        let c = compute_constants(&p, cp.r_star)?;
        let (t1, t2) = solve_reduced_system(&c, v_star)?;
        let (n1, n2) = reduced_newton(&c, v_star)?;
        println!("  t1 = {t1:.15} (Newton {n1:.15})  t2 = {t2:.15} (Newton {n2:.15})");
        let sweep = sweep_scaling(&c, v_star, &[8, 16, 32, 64, 128])?;
        println!(
            "  slopes: h_bar {:.12} (expected {:.12}), lambda {:.12} (expected {:.12})",
            sweep.slope_h, sweep.expected_slope_h, sweep.slope_lambda, sweep.expected_slope_lambda
        );
    }
    println!("bump analytic r* = {:.12}", 0.5 * (1.0 + (1.0 + 4.0 * 0.9f64).sqrt()));
    Ok(())
}
