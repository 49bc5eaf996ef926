//! Exponents and constants for the default pair (N=6, s=0.9) and (N=5, s=0.8).
use fracbubble::energy::compute_constants;
use fracbubble::lattice::LatticeConstants;
use fracbubble::params::{admissible_s_window, make_params};

fn main() -> fracbubble::Result<()> {
    for (n, s) in [(6usize, 0.9), (5, 0.8)] {
        let p = make_params(n, s)?;
        let (lo, hi) = admissible_s_window(n)?;
        println!("N={n} s={s}  admissible s in ({lo:.4}, {hi:.4})");
        println!("  2*_s = {:.12}  p = {:.12}  C_N = {:.12e}  c_Ns = {:.12e}", p.two_s_star, p.p, p.c_n, p.c_ns);
        let lat = LatticeConstants::new(&p)?;
        println!("  {}", lat.resolution_note());
        let c = compute_constants(&p, 1.0)?;
        println!("  A1..A6 = {:.10e} {:.10e} {:.10e} {:.10e} {:.10e} {:.10e}", c.a1, c.a2, c.a3, c.a4, c.a5, c.a6);
        println!("  B0..B3 = {:.10e} {:.10e} {:.10e} {:.10e}  (r_bar = 1)", c.b0, c.b1, c.b2, c.b3);
        println!("  D1 = {:.10e}  D2 = {:.10e}", c.d1, c.d2);
    }
    Ok(())
}
