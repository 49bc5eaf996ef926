//! The 2k concentration points on two horizontal circles of a cylinder, and
//! exact versus leading-order lattice sums over them.

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quadrature;
use crate::special::{beta, zeta};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Geometry of the doubled ring configuration.
///
/// The points are x_j^± = (r̄√(1-h̄²) cos θ_j, r̄√(1-h̄²) sin θ_j, ±r̄h̄, ȳ'') with
/// θ_j = 2(j-1)π/k, so every point sits at distance r̄ from the y''-axis plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderConfig {
    pub k: usize,
    pub r_bar: f64,
    pub h_bar: f64,
    /// Transverse coordinates (length N - 3).
    pub y2_bar: Vec<f64>,
}

impl CylinderConfig {
    pub fn new(k: usize, r_bar: f64, h_bar: f64, y2_bar: Vec<f64>) -> Result<Self> {
        let c = CylinderConfig { k, r_bar, h_bar, y2_bar };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        if !(self.r_bar > 0.0 && self.r_bar.is_finite()) {
            return Err(Error::Domain(format!("r_bar must be positive, got {}", self.r_bar)));
        }
        if !(0.0..1.0).contains(&self.h_bar) {
            return Err(Error::Domain(format!("h_bar must lie in [0, 1), got {}", self.h_bar)));
        }
        if self.y2_bar.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("y2_bar must be finite".into()));
        }
        Ok(())
    }

    /// Ambient dimension N = 3 + len(y2_bar).
    pub fn dim(&self) -> usize {
        3 + self.y2_bar.len()
    }

    fn ring_radius(&self) -> f64 {
        self.r_bar * (1.0 - self.h_bar * self.h_bar).sqrt()
    }
}

/// The 2k points: x_1^+, ..., x_k^+ followed by x_1^-, ..., x_k^-.
pub fn generate_points(config: &CylinderConfig) -> Vec<Vec<f64>> {
    let n = config.dim();
    let rho = config.ring_radius();
    let z = config.r_bar * config.h_bar;
    let mut pts = Vec::with_capacity(2 * config.k);
    for sign in [1.0, -1.0] {
        for j in 0..config.k {
            let th = 2.0 * PI * j as f64 / config.k as f64;
            let mut x = vec![0.0; n];
            x[0] = rho * th.cos();
            x[1] = rho * th.sin();
            x[2] = sign * z;
            x[3..].copy_from_slice(&config.y2_bar);
            pts.push(x);
        }
    }
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Σ_{j≥2} |x_j^+ - x_1^+|^{-γ}
    SameSide,
    /// Σ_{j≥1} |x_j^- - x_1^+|^{-γ}
    CrossSide,
}

/// Neumaier-compensated sum.
#[derive(Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Distance |x_j^± - x_1^+| from the closed forms, j = 1..k.
fn pair_distance(config: &CylinderConfig, j: usize, side: Side) -> f64 {
    let sn = (PI * (j - 1) as f64 / config.k as f64).sin();
    let h2 = config.h_bar * config.h_bar;
    match side {
        Side::SameSide => 2.0 * config.r_bar * (1.0 - h2).sqrt() * sn.abs(),
        Side::CrossSide => 2.0 * config.r_bar * ((1.0 - h2) * sn * sn + h2).sqrt(),
    }
}

/// Exact Σ |x_j - x_1^+|^{-γ} by enumeration (compensated summation).
pub fn lattice_sum_exact(config: &CylinderConfig, gamma: f64, side: Side) -> Result<f64> {
    lattice_sum_weighted(config, gamma, side, |_| 1.0)
}

/// Exact Σ sin²((j-1)π/k) |x_j^- - x_1^+|^{-γ}.
pub fn lattice_sum_cross_sin2(config: &CylinderConfig, gamma: f64) -> Result<f64> {
    let k = config.k as f64;
    lattice_sum_weighted(config, gamma, Side::CrossSide, |j| {
        (PI * (j - 1) as f64 / k).sin().powi(2)
    })
}

fn lattice_sum_weighted<W: Fn(usize) -> f64>(
    config: &CylinderConfig,
    gamma: f64,
    side: Side,
    weight: W,
) -> Result<f64> {
    config.validate()?;
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("lattice power must be positive, got {gamma}")));
    }
    let first = match side {
        Side::SameSide => 2,
        Side::CrossSide => 1,
    };
    let mut acc = Compensated::default();
    for j in first..=config.k {
        let d = pair_distance(config, j, side);
        if d == 0.0 {
            return Err(Error::Domain("coincident points in lattice sum".into()));
        }
        acc.add(weight(j) * d.powf(-gamma));
    }
    Ok(acc.value())
}

/// Half-line integral ∫_0^∞ (1+t²)^{-γ/2} dt by adaptive quadrature.
pub fn half_line_integral(gamma: f64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(Error::Divergence(format!(
            "∫(1+t²)^(-γ/2) diverges for γ = {gamma} <= 1"
        )));
    }
    Ok(quadrature::adaptive_semi_infinite(
        |t| (1.0 + t * t).powf(-0.5 * gamma),
        0.0,
        1e-15,
        1e-14,
    )?
    .value)
}

/// Lattice constants A1..A4 for γ = N - 2s, with the half-line integral
/// cross-checked against the Beta-function closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConstants {
    pub gamma: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// ∫_0^∞ (1+t²)^{-γ/2} dt from quadrature.
    pub half_line_quadrature: f64,
    /// ½ B(½, (γ-1)/2), the correct closed form.
    pub half_line_beta: f64,
    /// Γ(½)Γ((γ-1)/2)/Γ(γ/2) without the factor ½; twice the true value.
    pub half_line_unhalved: f64,
}

impl LatticeConstants {
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        let g = params.decay();
        let quad = half_line_integral(g)?;
        let full_beta = beta(0.5, 0.5 * (g - 1.0))?;
        let a1 = 2.0 * zeta(g)? / (2.0 * PI).powf(g);
        let a2 = 2.0 / (2f64.powf(g) * PI) * quad;
        Ok(LatticeConstants {
            gamma: g,
            a1,
            a2,
            a3: (g - 1.0) / (4.0 * g) * a2,
            a4: a2 / (4.0 * g),
            half_line_quadrature: quad,
            half_line_beta: 0.5 * full_beta,
            half_line_unhalved: full_beta,
        })
    }

    /// Relative disagreement between quadrature and ½B(½,(γ-1)/2).
    pub fn beta_identity_mismatch(&self) -> f64 {
        ((self.half_line_quadrature - self.half_line_beta) / self.half_line_beta).abs()
    }

    /// One-line description of how the half-line integral was resolved.
    pub fn resolution_note(&self) -> String {
        format!(
            "half-line integral {:.16e} from quadrature; 0.5*B(1/2,(g-1)/2) = {:.16e} \
             (rel. diff {:.1e}); the unhalved Gamma ratio {:.16e} is off by a factor 2",
            self.half_line_quadrature,
            self.half_line_beta,
            self.beta_identity_mismatch(),
            self.half_line_unhalved
        )
    }
}

/// Which leading-order formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeForm {
    /// Order-of-magnitude scale for a general power γ (no constant).
    OrderScale { gamma: f64, side: Side },
    /// Σ_{j≥2}|x_j^+ - x_1^+|^{-(N-2s)} ≈ A1 k^γ / (r̄√(1-h̄²))^γ.
    SameSide,
    /// Σ_{j≥1}|x_j^- - x_1^+|^{-(N-2s)} ≈ A2 k / (r̄^γ h̄^{γ-1} √(1-h̄²)).
    Cross,
    /// Σ_{j≥1}|x_j^- - x_1^+|^{-(N-2s+2)} ≈ A3 k / (r̄^{γ+2} h̄^{γ+1} √(1-h̄²)).
    CrossShifted,
    /// Σ_{j≥1} sin²((j-1)π/k)|x_j^- - x_1^+|^{-(N-2s+2)} ≈ A4 k / (r̄^{γ+2} h̄^{γ-1} (1-h̄²)^{3/2}).
    CrossSin2,
}

/// Leading-order value of a lattice sum; refuses configurations where the
/// expansion parameter is not small.
pub fn lattice_sum_asymptotic(
    constants: &LatticeConstants,
    config: &CylinderConfig,
    form: LatticeForm,
) -> Result<f64> {
    config.validate()?;
    let k = config.k as f64;
    let r = config.r_bar;
    let h = config.h_bar;
    let c = (1.0 - h * h).sqrt();
    let g = constants.gamma;
    let cross_regime = || -> Result<()> {
        if h <= 0.0 || k * h <= 1.0 {
            return Err(Error::Regime(format!(
                "cross-side expansion needs k*h_bar > 1, got k = {k}, h_bar = {h}"
            )));
        }
        Ok(())
    };
    if config.k < 2 {
        return Err(Error::Regime("lattice asymptotics need k >= 2".into()));
    }
    match form {
        LatticeForm::OrderScale { gamma, side } => match side {
            Side::SameSide => Ok(if gamma > 1.0 {
                k.powf(gamma) / (r * c).powf(gamma)
            } else if gamma == 1.0 {
                k * k.ln() / (r * c)
            } else {
                k / (r * c).powf(gamma)
            }),
            Side::CrossSide => {
                cross_regime()?;
                if gamma <= 1.0 {
                    return Err(Error::Regime("cross-side order needs γ > 1".into()));
                }
                Ok(k * h / (r * h).powf(gamma))
            }
        },
        LatticeForm::SameSide => Ok(constants.a1 * k.powf(g) / (r * c).powf(g)),
        LatticeForm::Cross => {
            cross_regime()?;
            Ok(constants.a2 * k / (r.powf(g) * h.powf(g - 1.0) * c))
        }
        LatticeForm::CrossShifted => {
            cross_regime()?;
            Ok(constants.a3 * k / (r.powf(g + 2.0) * h.powf(g + 1.0) * c))
        }
        LatticeForm::CrossSin2 => {
            cross_regime()?;
            Ok(constants.a4 * k / (r.powf(g + 2.0) * h.powf(g - 1.0) * c.powi(3)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSumReport {
    pub exact: f64,
    pub asymptotic: f64,
    pub relative_error: f64,
    pub side: Side,
    pub power: f64,
}

/// Exact sum next to its leading-order formula.
pub fn lattice_report(
    constants: &LatticeConstants,
    config: &CylinderConfig,
    form: LatticeForm,
) -> Result<LatticeSumReport> {
    let g = constants.gamma;
    let (exact, side, power) = match form {
        LatticeForm::OrderScale { gamma, side } => {
            (lattice_sum_exact(config, gamma, side)?, side, gamma)
        }
        LatticeForm::SameSide => (lattice_sum_exact(config, g, Side::SameSide)?, Side::SameSide, g),
        LatticeForm::Cross => (lattice_sum_exact(config, g, Side::CrossSide)?, Side::CrossSide, g),
        LatticeForm::CrossShifted => (
            lattice_sum_exact(config, g + 2.0, Side::CrossSide)?,
            Side::CrossSide,
            g + 2.0,
        ),
        LatticeForm::CrossSin2 => (
            lattice_sum_cross_sin2(config, g + 2.0)?,
            Side::CrossSide,
            g + 2.0,
        ),
    };
    let asymptotic = lattice_sum_asymptotic(constants, config, form)?;
    Ok(LatticeSumReport {
        exact,
        asymptotic,
        relative_error: ((exact - asymptotic) / exact).abs(),
        side,
        power,
    })
}

/// d0 = min(|x_2^+ - x_1^+|, |x_1^- - x_1^+|)/4.
pub fn min_gap_d0(config: &CylinderConfig) -> Result<f64> {
    if config.k < 2 {
        return Err(Error::Domain("min_gap_d0 needs k >= 2".into()));
    }
    config.validate()?;
    let same = pair_distance(config, 2, Side::SameSide);
    let cross = pair_distance(config, 1, Side::CrossSide);
    Ok(0.25 * same.min(cross))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn closed_form_distances() {
        let c = CylinderConfig::new(7, 1.3, 0.4, vec![0.2, -0.1, 0.5]).unwrap();
        let pts = generate_points(&c);
        assert_eq!(pts.len(), 14);
        for j in 1..=7 {
            let sn = (PI * (j - 1) as f64 / 7.0).sin();
            let same = 2.0 * 1.3 * (1.0 - 0.16f64).sqrt() * sn;
            assert!((dist(&pts[j - 1], &pts[0]) - same).abs() < 1e-13);
            let cross2 = 4.0 * 1.69 * ((1.0 - 0.16) * sn * sn + 0.16);
            assert!((dist(&pts[7 + j - 1], &pts[0]).powi(2) - cross2).abs() < 1e-13);
        }
    }

    #[test]
    fn square_configuration() {
        let c = CylinderConfig::new(4, 1.0, 0.0, vec![0.0; 3]).unwrap();
        let pts = generate_points(&c);
        let expect = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (i, (x, y)) in expect.iter().enumerate() {
            for half in [0, 4] {
                assert!((pts[half + i][0] - x).abs() < 1e-15);
                assert!((pts[half + i][1] - y).abs() < 1e-15);
                assert_eq!(pts[half + i][2], 0.0);
            }
        }
        assert!((lattice_sum_exact(&c, 2.0, Side::SameSide).unwrap() - 1.25).abs() < 1e-14);
    }

    #[test]
    fn enumerated_sums() {
        let c = CylinderConfig::new(2, 1.5, 0.3, vec![0.0; 3]).unwrap();
        let g = 4.2;
        let expect = (2.0 * 1.5 * (1.0 - 0.09f64).sqrt()).powf(-g);
        assert!((lattice_sum_exact(&c, g, Side::SameSide).unwrap() / expect - 1.0).abs() < 1e-14);
        let c1 = CylinderConfig::new(1, 1.0, 0.3, vec![0.0; 3]).unwrap();
        assert_eq!(lattice_sum_exact(&c1, g, Side::SameSide).unwrap(), 0.0);
        // nearest cross pair dominates as h_bar shrinks
        for h in [1e-2, 1e-3, 1e-4] {
            let c = CylinderConfig::new(6, 1.0, h, vec![0.0; 3]).unwrap();
            let v = lattice_sum_exact(&c, g, Side::CrossSide).unwrap();
            assert!((v * (2.0 * h).powf(g) - 1.0).abs() < 100.0 * h.powf(g) + 1e-12);
        }
    }

    #[test]
    fn d0_examples() {
        let c = CylinderConfig::new(4, 1.0, 0.5, vec![0.0; 3]).unwrap();
        assert!((min_gap_d0(&c).unwrap() - 0.25).abs() < 1e-15);
        let c2 = CylinderConfig::new(4, 2.0, 0.5, vec![0.0; 3]).unwrap();
        assert!((min_gap_d0(&c2).unwrap() - 0.5).abs() < 1e-15);
        let c3 = CylinderConfig::new(4, 1.0, 1e-6, vec![0.0; 3]).unwrap();
        assert!(min_gap_d0(&c3).unwrap() < 1e-6);
    }

    #[test]
    fn constants_against_reference() {
        let lc = LatticeConstants::new(&make_params(6, 0.9).unwrap()).unwrap();
        assert!((lc.a1 / 9.505_116_483_588_706_6e-4 - 1.0).abs() < 1e-12);
        assert!((lc.a2 / 0.026_210_043_407_179_934 - 1.0).abs() < 1e-12);
        assert!((lc.half_line_quadrature / 0.756_682_341_404_742_4 - 1.0).abs() < 1e-12);
        assert!(lc.beta_identity_mismatch() < 1e-12);
        assert!((lc.a3 / lc.a2 - 3.2 / 16.8).abs() < 1e-15);
        assert!((lc.a4 - lc.a2 / 16.8).abs() < 1e-18);
        assert!((lc.half_line_unhalved / lc.half_line_quadrature - 2.0).abs() < 1e-12);
    }

    #[test]
    fn regime_guard() {
        let lc = LatticeConstants::new(&make_params(6, 0.9).unwrap()).unwrap();
        let c = CylinderConfig::new(4, 1.0, 0.1, vec![0.0; 3]).unwrap();
        assert!(matches!(
            lattice_sum_asymptotic(&lc, &c, LatticeForm::Cross),
            Err(Error::Regime(_))
        ));
    }
}
