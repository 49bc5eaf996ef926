//! Exact lattice sums over the doubled polygon against their leading-order
//! forms as k grows.
use fracbubble::energy::{compute_constants, solve_reduced_system};
use fracbubble::lattice::{lattice_report, CylinderConfig, LatticeConstants, LatticeForm};
use fracbubble::params::make_params;

fn main() -> fracbubble::Result<()> {
    let p = make_params(6, 0.9)?;
    let lat = LatticeConstants::new(&p)?;
    let c = compute_constants(&p, 1.0)?;
    let (t1, _) = solve_reduced_system(&c, 1.0)?;
    println!("{:>5} {:>8} {:>14} {:>14}", "k", "h_bar", "same side", "cross side");
    for k in [16usize, 32, 64, 128, 256, 512, 1024] {
        let h = t1 * (k as f64).powf(c.h_exponent());
        let cfg = CylinderConfig::new(k, 1.0, h, vec![0.0; 3])?;
        let same = lattice_report(&lat, &cfg, LatticeForm::SameSide)?;
        let cross = lattice_report(&lat, &cfg, LatticeForm::Cross)?;
        println!("{k:>5} {h:>8.4} {:>14.3e} {:>14.3e}", same.relative_error, cross.relative_error);
    }
    let cfg = CylinderConfig::new(400, 1.0, 0.05, vec![0.0; 3])?;
    let cross = lattice_report(&lat, &cfg, LatticeForm::Cross)?;
    println!("k = 400, h_bar = 0.05 (k h_bar = 20): cross-side relative error {:.3e}", cross.relative_error);
    Ok(())
}
