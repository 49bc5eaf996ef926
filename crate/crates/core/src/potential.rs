//! Potentials V(r, y'') with r = |y'| (y' = first three coordinates) and
//! y'' the remaining N - 3 coordinates.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialModel {
    /// V ≡ c.
    Constant { c: f64 },
    /// V = a + b·exp(-((r - r_c)² + |y'' - y_c|²)/w).
    GaussianBump { a: f64, b: f64, r_c: f64, y_c: Vec<f64>, w: f64 },
    /// V = exp(-(r - r_c)²/w_r)·(c0 + c1(1 - exp(-|y'' - y_c|²/w_y))):
    /// a bump in r times a well in y''.
    Saddle { r_c: f64, w_r: f64, c0: f64, c1: f64, y_c: Vec<f64>, w_y: f64 },
}

impl PotentialModel {
    /// The Gaussian bump exp(-(r-1)² - |y''|²) in dimension n.
    pub fn default_bump(n: usize) -> Self {
        PotentialModel::GaussianBump { a: 0.0, b: 1.0, r_c: 1.0, y_c: vec![0.0; n - 3], w: 1.0 }
    }

    pub fn family(&self) -> &'static str {
        match self {
            PotentialModel::Constant { .. } => "constant",
            PotentialModel::GaussianBump { .. } => "gaussian_bump",
            PotentialModel::Saddle { .. } => "saddle",
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let check_len = |y: &Vec<f64>| {
            if y.len() != n - 3 {
                Err(Error::Domain(format!(
                    "potential center has {} transverse coordinates, expected {}",
                    y.len(),
                    n - 3
                )))
            } else {
                Ok(())
            }
        };
        match self {
            PotentialModel::Constant { c } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::Domain(format!("constant potential must be >= 0, got {c}")));
                }
            }
            PotentialModel::GaussianBump { a, b, w, y_c, .. } => {
                check_len(y_c)?;
                if !(*w > 0.0) || *a < 0.0 || a + b.min(0.0) < 0.0 {
                    return Err(Error::Domain("gaussian bump needs w > 0 and V >= 0".into()));
                }
            }
            PotentialModel::Saddle { w_r, w_y, c0, c1, y_c, .. } => {
                check_len(y_c)?;
                if !(*w_r > 0.0 && *w_y > 0.0 && *c0 > 0.0 && *c1 >= 0.0) {
                    return Err(Error::Domain("saddle needs w_r, w_y, c0 > 0 and c1 >= 0".into()));
                }
            }
        }
        Ok(())
    }

    /// V ↦ cV.
    pub fn scaled(&self, c: f64) -> Self {
        match self.clone() {
            PotentialModel::Constant { c: v } => PotentialModel::Constant { c: c * v },
            PotentialModel::GaussianBump { a, b, r_c, y_c, w } => {
                PotentialModel::GaussianBump { a: c * a, b: c * b, r_c, y_c, w }
            }
            PotentialModel::Saddle { r_c, w_r, c0, c1, y_c, w_y } => {
                PotentialModel::Saddle { r_c, w_r, c0: c * c0, c1: c * c1, y_c, w_y }
            }
        }
    }

    pub fn value(&self, r: f64, y2: &[f64]) -> f64 {
        match self {
            PotentialModel::Constant { c } => *c,
            PotentialModel::GaussianBump { a, b, r_c, y_c, w } => {
                let q = (r - r_c).powi(2) + dist2(y2, y_c);
                a + b * (-q / w).exp()
            }
            PotentialModel::Saddle { r_c, w_r, c0, c1, y_c, w_y } => {
                let bump = (-(r - r_c).powi(2) / w_r).exp();
                bump * (c0 + c1 * (1.0 - (-dist2(y2, y_c) / w_y).exp()))
            }
        }
    }

    /// (∂V/∂r, ∇_{y''}V).
    pub fn gradient(&self, r: f64, y2: &[f64]) -> (f64, Vec<f64>) {
        match self {
            PotentialModel::Constant { .. } => (0.0, vec![0.0; y2.len()]),
            PotentialModel::GaussianBump { b, r_c, y_c, w, .. } => {
                let e = b * (-((r - r_c).powi(2) + dist2(y2, y_c)) / w).exp();
                let dr = -2.0 * (r - r_c) / w * e;
                let dy = y2.iter().zip(y_c).map(|(v, c)| -2.0 * (v - c) / w * e).collect();
                (dr, dy)
            }
            PotentialModel::Saddle { r_c, w_r, c0, c1, y_c, w_y } => {
                let bump = (-(r - r_c).powi(2) / w_r).exp();
                let ey = (-dist2(y2, y_c) / w_y).exp();
                let well = c0 + c1 * (1.0 - ey);
                let dr = -2.0 * (r - r_c) / w_r * bump * well;
                let dy = y2
                    .iter()
                    .zip(y_c)
                    .map(|(v, c)| bump * c1 * ey * 2.0 * (v - c) / w_y)
                    .collect();
                (dr, dy)
            }
        }
    }

    /// V at a point of R^N.
    pub fn at(&self, x: &[f64]) -> f64 {
        self.value(radius3(x), &x[3..])
    }

    /// ⟨∇V(x), x⟩ = r ∂V/∂r + y''·∇_{y''}V.
    pub fn radial_derivative_at(&self, x: &[f64]) -> f64 {
        let r = radius3(x);
        let (dr, dy) = self.gradient(r, &x[3..]);
        r * dr + x[3..].iter().zip(&dy).map(|(a, b)| a * b).sum::<f64>()
    }

    /// ∂V/∂x_i for a transverse axis i >= 3 (0-based).
    pub fn transverse_derivative_at(&self, x: &[f64], i: usize) -> f64 {
        let (_, dy) = self.gradient(radius3(x), &x[3..]);
        dy[i - 3]
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn radius3(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(v: &PotentialModel, r: f64, y: &[f64]) {
        let (dr, dy) = v.gradient(r, y);
        let h = 1e-6;
        let fdr = (v.value(r + h, y) - v.value(r - h, y)) / (2.0 * h);
        assert!((dr - fdr).abs() <= 1e-5 * dr.abs().max(1e-8));
        for i in 0..y.len() {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[i] += h;
            ym[i] -= h;
            let f = (v.value(r, &yp) - v.value(r, &ym)) / (2.0 * h);
            assert!((dy[i] - f).abs() <= 1e-5 * dy[i].abs().max(1e-8));
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let y = [0.2, -0.3, 0.15];
        fd_check(&PotentialModel::default_bump(6), 1.3, &y);
        fd_check(
            &PotentialModel::GaussianBump { a: 0.5, b: 2.0, r_c: 1.2, y_c: vec![0.1, 0.0, 0.0], w: 0.7 },
            0.9,
            &y,
        );
        fd_check(
            &PotentialModel::Saddle { r_c: 1.0, w_r: 1.0, c0: 1.0, c1: 0.5, y_c: vec![0.0; 3], w_y: 1.0 },
            1.4,
            &y,
        );
    }

    #[test]
    fn scaling_and_validation() {
        let v = PotentialModel::default_bump(6);
        assert!((v.scaled(3.0).value(1.2, &[0.1, 0.0, 0.0]) - 3.0 * v.value(1.2, &[0.1, 0.0, 0.0])).abs() < 1e-15);
        assert!(v.validate(6).is_ok());
        assert!(v.validate(5).is_err());
        assert!(PotentialModel::Constant { c: -1.0 }.validate(6).is_err());
    }
}
