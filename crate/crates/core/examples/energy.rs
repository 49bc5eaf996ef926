//! Reduced energy at k = 8 in regime scaling: the expansion's terms, the
//! direct Monte Carlo evaluation of I(Z*), and the derivative formulas
//! against central differences.
use fracbubble::energy::{
    compute_constants, energy_direct_oracle, energy_expansion, grad_h, grad_lambda, interaction_from_lattice,
};
use fracbubble::lattice::CylinderConfig;
use fracbubble::mc::McSpec;
use fracbubble::params::make_params;
use fracbubble::potential::PotentialModel;

fn main() -> fracbubble::Result<()> {
    let params = make_params(6, 0.9)?;
    let c = compute_constants(&params, 1.0)?;
    let k = 8usize;
    let kf = k as f64;
    let (t1, _) = fracbubble::energy::solve_reduced_system(&c, 1.0)?;
    let lambda = 2.0 * kf.powf(c.lambda_exponent());
    let h = t1 * kf.powf(c.h_exponent());
    let terms = energy_expansion(&c, 1.0, k, lambda, h)?;
    println!("k = {k}, lambda = {lambda:.4}, h_bar = {h:.5}, in regime: {}", terms.in_regime);
    println!(
        "expansion: bulk {:.6e}  potential {:.6e}  same-side {:.6e}  cross {:.6e}  ({})",
        terms.bulk, terms.potential, terms.same_side, terms.cross_side, terms.order
    );
    let config = CylinderConfig::new(k, 1.0, h, vec![0.0; 3])?;
    let assembled = interaction_from_lattice(&c, &config, lambda)?;
    let t = std::time::Instant::now();
    let direct = energy_direct_oracle(&params, &config, lambda, &PotentialModel::Constant { c: 1.0 }, &McSpec::default())?;
    println!(
        "interaction: direct MC {:.6e} ± {:.1e}, lattice-assembled {:.6e}, expansion {:.6e} ({:.1?})",
        direct.interaction.estimate,
        direct.interaction.stderr,
        assembled,
        terms.interaction(),
        t.elapsed()
    );
    println!(
        "potential part: MC {:.6e} ± {:.1e}, expansion {:.6e}",
        direct.potential.estimate, direct.potential.stderr, terms.potential
    );
    let e = |l: f64, hh: f64| energy_expansion(&c, 1.0, k, l, hh).map(|t| t.total);
    let (dl, dh) = (1e-4 * lambda, 1e-6);
    let fd_l = (e(lambda + dl, h)? - e(lambda - dl, h)?) / (2.0 * dl);
    let fd_h = (e(lambda, h + dh)? - e(lambda, h - dh)?) / (2.0 * dh);
    println!("grad_lambda {:.10e} vs FD {:.10e}", grad_lambda(&c, 1.0, k, lambda, h)?, fd_l);
    println!("grad_h      {:.10e} vs FD {:.10e}", grad_h(&c, 1.0, k, lambda, h)?, fd_h);
    Ok(())
}
