//! Dimension, fractional order and the derived exponents and constants.

use crate::error::{Error, Result};
use crate::special::{gamma, sphere_area};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Open interval (lo, hi) of admissible fractional orders for dimension `n`.
///
/// For N = 5 both ends are roots of quadratics; for N = 6, 7, 8 the upper end is 1.
pub fn admissible_s_window(n: usize) -> Result<(f64, f64)> {
    let nf = n as f64;
    match n {
        5 => {
            let d = (nf * nf - 2.0 * nf + 9.0).sqrt();
            Ok(((nf + 3.0 - d) / 4.0, (3.0 * (nf - 1.0) - d) / 8.0))
        }
        6..=8 => {
            let lo = nf * ((8.0 * nf - 11.0).sqrt() - 1.0) / (8.0 * nf - 12.0);
            Ok((lo, 1.0))
        }
        _ => Err(Error::Domain(format!("dimension N = {n} outside 5..=8"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub n: usize,
    pub s: f64,
    /// Critical exponent 2N/(N-2s).
    pub two_s_star: f64,
    /// Nonlinearity exponent 2N/(N-2s) - 1 = (N+2s)/(N-2s).
    pub p: f64,
    pub tau: f64,
    pub gamma0: f64,
    pub c_n: f64,
    /// Normalisation of the singular integral defining (-Δ)^s.
    pub c_ns: f64,
    pub omega_nm1: f64,
}

impl PhysicalParams {
    /// Bubble decay exponent N - 2s.
    pub fn decay(&self) -> f64 {
        self.n as f64 - 2.0 * self.s
    }

    /// Half decay exponent (N - 2s)/2, the power of λ in a bubble's peak.
    pub fn half_decay(&self) -> f64 {
        0.5 * self.decay()
    }

    /// Returns a copy whose (-Δ)^s normalisation is multiplied by `factor`.
    pub fn with_scaled_c_ns(mut self, factor: f64) -> Self {
        self.c_ns *= factor;
        self
    }

    /// The three exponents whose minimum must exceed (2s+1)/2 for the
    /// correction-term estimate, and whether it does.
    pub fn remark_condition(&self) -> (f64, bool) {
        let nf = self.n as f64;
        let s = self.s;
        let t = self.tau;
        let m = ((nf - 2.0 * s) / 2.0 - t)
            .min(2.0 * s - t)
            .min(2.0 * s / (nf - 2.0 * s) * ((nf + 2.0 * s) / 2.0 - t));
        (m, m > (2.0 * s + 1.0) / 2.0)
    }
}

/// Standard normalisation s 4^s Γ((N+2s)/2) / (π^{N/2} Γ(1-s)).
pub fn frac_laplacian_constant(n: usize, s: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(s * 4f64.powf(s) * gamma((nf + 2.0 * s) / 2.0)? / (PI.powf(nf / 2.0) * gamma(1.0 - s)?))
}

/// Builds the parameter set; `s` must lie strictly inside the admissible window.
pub fn make_params(n: usize, s: f64) -> Result<PhysicalParams> {
    let (lo, hi) = admissible_s_window(n)?;
    if !(s > lo && s < hi) {
        return Err(Error::Admissibility { n, s, lo, hi });
    }
    let nf = n as f64;
    let gamma0 = gamma((nf + 2.0 * s) / 2.0)? / gamma((nf - 2.0 * s) / 2.0)?;
    Ok(PhysicalParams {
        n,
        s,
        two_s_star: 2.0 * nf / (nf - 2.0 * s),
        p: (nf + 2.0 * s) / (nf - 2.0 * s),
        tau: (nf - 4.0 * s) / (2.0 * (nf - 2.0 * s)),
        gamma0,
        c_n: (4f64.powf(s) * gamma0).powf((nf - 2.0 * s) / (4.0 * s)),
        c_ns: frac_laplacian_constant(n, s)?,
        omega_nm1: sphere_area(n - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        let (lo, hi) = admissible_s_window(5).unwrap();
        assert!((lo - (8.0 - 24f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((hi - (12.0 - 24f64.sqrt()) / 8.0).abs() < 1e-15);
        assert!((lo - 0.775_255_128_608_410_9).abs() < 1e-12);
        assert!((hi - 0.887_627_564_304_205_5).abs() < 1e-12);
        let (lo6, hi6) = admissible_s_window(6).unwrap();
        assert!((lo6 - 6.0 * (37f64.sqrt() - 1.0) / 36.0).abs() < 1e-15);
        assert_eq!(hi6, 1.0);
        assert!(admissible_s_window(4).is_err());
        assert!(admissible_s_window(9).is_err());
    }

    #[test]
    fn window_endpoints_solve_their_polynomials() {
        let (lo, hi) = admissible_s_window(5).unwrap();
        assert!((2.0 * lo * lo - 8.0 * lo + 5.0).abs() < 1e-12);
        assert!((8.0 * hi * hi - 24.0 * hi + 15.0).abs() < 1e-12);
        for n in 6..=8 {
            let nf = n as f64;
            let (lo, _) = admissible_s_window(n).unwrap();
            let lhs = ((8.0 * nf - 12.0) * lo / nf + 1.0).powi(2);
            assert!((lhs - (8.0 * nf - 11.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn derived_exponents() {
        let p = make_params(6, 0.9).unwrap();
        assert!((p.two_s_star - 20.0 / 7.0).abs() < 1e-14);
        assert!((p.tau - 2.0 / 7.0).abs() < 1e-15);
        assert!((p.two_s_star - 2.0 - 4.0 * p.s / (6.0 - 1.8)).abs() < 1e-14);
        // Γ(3.9)/Γ(2.1) and the constants below from a 30-digit reference
        assert!((p.gamma0 / 5.063_928_718_905_324 - 1.0).abs() < 1e-13);
        assert!((p.c_n / 28.448_879_909_997_06 - 1.0).abs() < 1e-12);
        assert!((p.c_ns / 0.056_302_431_714_028_08 - 1.0).abs() < 1e-12);
        let q = make_params(5, 0.8).unwrap();
        assert!((q.c_n / 10.267_033_430_877_096 - 1.0).abs() < 1e-12);
        assert!((q.c_ns / 0.081_033_063_067_385_06 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_outside_rejected() {
        let (lo, _) = admissible_s_window(6).unwrap();
        assert!(matches!(make_params(6, lo), Err(Error::Admissibility { .. })));
        assert!(matches!(make_params(6, 1.0), Err(Error::Admissibility { .. })));
        assert!(matches!(make_params(5, 0.9), Err(Error::Admissibility { .. })));
        assert!(make_params(4, 0.9).is_err());
    }

    #[test]
    fn remark_condition_reported() {
        let p = make_params(6, 0.9).unwrap();
        let (m, ok) = p.remark_condition();
        assert!((m - 1.514_285_714_285_714).abs() < 1e-12);
        assert!(ok);
    }
}
