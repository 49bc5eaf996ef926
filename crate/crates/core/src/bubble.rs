//! Bubbles U_{x,λ}, the cutoff η, approximate solutions Z = ηΣU and
//! Z* = ΣU, and the weighted sup-norm estimators.

use crate::error::{Error, Result};
use crate::lattice::{generate_points, CylinderConfig};
use crate::params::PhysicalParams;
use serde::{Deserialize, Serialize};

/// U_{x,λ}(y) = C_N λ^{(N-2s)/2} (1 + λ²|y-x|²)^{-(N-2s)/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bubble {
    pub center: Vec<f64>,
    pub lambda: f64,
}

impl Bubble {
    pub fn new(center: Vec<f64>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("bubble scale must be positive, got {lambda}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("bubble center must be finite".into()));
        }
        Ok(Bubble { center, lambda })
    }

    /// Standard bubble U_{0,1} in dimension n.
    pub fn standard(n: usize) -> Self {
        Bubble { center: vec![0.0; n], lambda: 1.0 }
    }

    pub fn dist2(&self, y: &[f64]) -> f64 {
        self.center.iter().zip(y).map(|(c, v)| (v - c) * (v - c)).sum()
    }
}

pub fn bubble_eval(params: &PhysicalParams, b: &Bubble, y: &[f64]) -> f64 {
    let a = params.half_decay();
    params.c_n * b.lambda.powf(a) * (1.0 + b.lambda * b.lambda * b.dist2(y)).powf(-a)
}

/// Radial profile of U_{0,1}: C_N (1+r²)^{-(N-2s)/2}.
pub fn standard_profile(params: &PhysicalParams, r: f64) -> f64 {
    params.c_n * (1.0 + r * r).powf(-params.half_decay())
}

/// ∂U_{x,λ}/∂λ.
pub fn bubble_dlambda(params: &PhysicalParams, b: &Bubble, y: &[f64]) -> f64 {
    let a = params.half_decay();
    let l = b.lambda;
    let q = l * l * b.dist2(y);
    // d/dλ [λ^a (1+λ²d²)^{-a}] = a λ^{a-1}(1+q)^{-a-1}(1 - q)
    params.c_n * a * l.powf(a - 1.0) * (1.0 - q) * (1.0 + q).powf(-a - 1.0)
}

/// ∂U/∂y_i.
pub fn bubble_dy(params: &PhysicalParams, b: &Bubble, y: &[f64], i: usize) -> f64 {
    let a = params.half_decay();
    let l = b.lambda;
    let q = l * l * b.dist2(y);
    -2.0 * a * params.c_n * l.powf(a + 2.0) * (y[i] - b.center[i]) * (1.0 + q).powf(-a - 1.0)
}

/// ∂U/∂x_i = -∂U/∂y_i.
pub fn bubble_dcenter(params: &PhysicalParams, b: &Bubble, y: &[f64], i: usize) -> f64 {
    -bubble_dy(params, b, y, i)
}

/// Smooth ramp used by the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RampProfile {
    /// 1 - (6t⁵ - 15t⁴ + 10t³), t = d/σ - 1 on [σ, 2σ]; C², |η'| ≤ 15/(8σ).
    #[default]
    QuinticSmoothstep,
    /// 1 - (3t² - 2t³), C¹, |η'| ≤ 3/(2σ).
    CubicSmoothstep,
}

impl RampProfile {
    pub fn id(&self) -> &'static str {
        match self {
            RampProfile::QuinticSmoothstep => "quintic_smoothstep_c2",
            RampProfile::CubicSmoothstep => "cubic_smoothstep_c1",
        }
    }

    /// Bound C in |dη/dd| ≤ C/σ.
    pub fn slope_bound(&self) -> f64 {
        match self {
            RampProfile::QuinticSmoothstep => 15.0 / 8.0,
            RampProfile::CubicSmoothstep => 1.5,
        }
    }
}

/// η(y) depending on y only through d = |(|y'|, y'') - (r0, y0'')|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffEta {
    pub r0: f64,
    pub y0: Vec<f64>,
    pub sigma: f64,
    #[serde(default)]
    pub profile: RampProfile,
}

impl CutoffEta {
    pub fn new(r0: f64, y0: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("cutoff radius must be positive, got {sigma}")));
        }
        Ok(CutoffEta { r0, y0, sigma, profile: RampProfile::QuinticSmoothstep })
    }

    pub fn with_profile(self, profile: RampProfile) -> Self {
        CutoffEta { profile, ..self }
    }

    /// Distance of (|y'|, y'') from the anchor (r0, y0'').
    pub fn distance(&self, y: &[f64]) -> f64 {
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        let mut d2 = (r - self.r0) * (r - self.r0);
        for (v, c) in y[3..].iter().zip(&self.y0) {
            d2 += (v - c) * (v - c);
        }
        d2.sqrt()
    }

    pub fn of_distance(&self, d: f64) -> f64 {
        let t = d / self.sigma - 1.0;
        if t <= 0.0 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            match self.profile {
                RampProfile::QuinticSmoothstep => 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
                RampProfile::CubicSmoothstep => 1.0 - t * t * (3.0 - 2.0 * t),
            }
        }
    }

    /// dη/dd.
    pub fn derivative_of_distance(&self, d: f64) -> f64 {
        let t = d / self.sigma - 1.0;
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            match self.profile {
                RampProfile::QuinticSmoothstep => -30.0 * t * t * (1.0 - t) * (1.0 - t) / self.sigma,
                RampProfile::CubicSmoothstep => -6.0 * t * (1.0 - t) / self.sigma,
            }
        }
    }
}

pub fn eta_eval(cutoff: &CutoffEta, y: &[f64]) -> f64 {
    cutoff.of_distance(cutoff.distance(y))
}

/// Sum of 2k equal-scale bubbles on a cylinder configuration, optionally
/// multiplied by the cutoff (Z = ηZ*).
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub params: PhysicalParams,
    pub config: CylinderConfig,
    pub lambda: f64,
    pub cutoff: Option<CutoffEta>,
    points: Vec<Vec<f64>>,
    amp: f64,
}

impl ApproxSolution {
    pub fn new(
        params: PhysicalParams,
        config: CylinderConfig,
        lambda: f64,
        cutoff: Option<CutoffEta>,
    ) -> Result<Self> {
        config.validate()?;
        if config.dim() != params.n {
            return Err(Error::Domain(format!(
                "configuration dimension {} does not match N = {}",
                config.dim(),
                params.n
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("scale must be positive, got {lambda}")));
        }
        let points = generate_points(&config);
        let amp = params.c_n * lambda.powf(params.half_decay());
        Ok(ApproxSolution { params, config, lambda, cutoff, points, amp })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn bubbles(&self) -> Vec<Bubble> {
        self.points
            .iter()
            .map(|c| Bubble { center: c.clone(), lambda: self.lambda })
            .collect()
    }

    /// Individual bubble values U_j(y) in point order.
    pub fn bubble_values(&self, y: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let a = self.params.half_decay();
        let l2 = self.lambda * self.lambda;
        for x in &self.points {
            let d2: f64 = x.iter().zip(y).map(|(c, v)| (v - c) * (v - c)).sum();
            out.push(self.amp * (1.0 + l2 * d2).powf(-a));
        }
    }

    /// Z*(y) = Σ U_j(y), without cutoff.
    pub fn star_sum(&self, y: &[f64]) -> f64 {
        let a = self.params.half_decay();
        let l2 = self.lambda * self.lambda;
        let mut s = 0.0;
        for x in &self.points {
            let d2: f64 = x.iter().zip(y).map(|(c, v)| (v - c) * (v - c)).sum();
            s += (1.0 + l2 * d2).powf(-a);
        }
        self.amp * s
    }

    pub fn eta(&self, y: &[f64]) -> f64 {
        self.cutoff.as_ref().map_or(1.0, |c| eta_eval(c, y))
    }
}

/// Z(y) = η(y)ΣU_j(y), or Z*(y) when no cutoff is set.
pub fn approx_eval(sol: &ApproxSolution, y: &[f64]) -> f64 {
    let eta = sol.eta(y);
    if eta == 0.0 {
        return 0.0;
    }
    eta * sol.star_sum(y)
}

fn weight_sum(points: &[Vec<f64>], lambda: f64, y: &[f64], amp_power: f64, decay: f64) -> f64 {
    let mut s = 0.0;
    for x in points {
        let d: f64 = x.iter().zip(y).map(|(c, v)| (v - c) * (v - c)).sum::<f64>().sqrt();
        s += (1.0 + lambda * d).powf(-decay);
    }
    lambda.powf(amp_power) * s
}

/// Σ_j λ^{(N-2s)/2} / (1 + λ|y - x_j|)^{(N-2s)/2 + τ}, the weight of ‖·‖_*.
pub fn star_weight(params: &PhysicalParams, config: &CylinderConfig, lambda: f64, y: &[f64]) -> f64 {
    let a = params.half_decay();
    weight_sum(&generate_points(config), lambda, y, a, a + params.tau)
}

/// Σ_j λ^{(N+2s)/2} / (1 + λ|y - x_j|)^{(N+2s)/2 + τ}, the weight of ‖·‖_**.
pub fn dstar_weight(params: &PhysicalParams, config: &CylinderConfig, lambda: f64, y: &[f64]) -> f64 {
    let b = 0.5 * (params.n as f64 + 2.0 * params.s);
    weight_sum(&generate_points(config), lambda, y, b, b + params.tau)
}

/// Precomputed weight for repeated evaluation over many samples.
#[derive(Debug, Clone)]
pub struct Weight {
    points: Vec<Vec<f64>>,
    lambda: f64,
    amp_power: f64,
    decay: f64,
}

impl Weight {
    pub fn star(params: &PhysicalParams, config: &CylinderConfig, lambda: f64) -> Self {
        let a = params.half_decay();
        Weight { points: generate_points(config), lambda, amp_power: a, decay: a + params.tau }
    }

    pub fn dstar(params: &PhysicalParams, config: &CylinderConfig, lambda: f64) -> Self {
        let b = 0.5 * (params.n as f64 + 2.0 * params.s);
        Weight { points: generate_points(config), lambda, amp_power: b, decay: b + params.tau }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        weight_sum(&self.points, self.lambda, y, self.amp_power, self.decay)
    }
}

/// sup over samples of |u(y)|/weight(y); a lower bound for the weighted norm.
pub fn norm_estimate<U, W>(u: U, weight: W, samples: &[Vec<f64>]) -> Result<f64>
where
    U: Fn(&[f64]) -> f64,
    W: Fn(&[f64]) -> f64,
{
    if samples.is_empty() {
        return Err(Error::Usage("norm estimate needs at least one sample".into()));
    }
    let mut best = 0.0f64;
    for y in samples {
        let w = weight(y);
        if !(w > 0.0) {
            return Err(Error::Numeric("non-positive weight at a sample".into()));
        }
        best = best.max(u(y).abs() / w);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    fn p6() -> PhysicalParams {
        make_params(6, 0.9).unwrap()
    }

    #[test]
    fn bubble_values() {
        let p = p6();
        let b = Bubble::standard(6);
        assert!((bubble_eval(&p, &b, &[0.0; 6]) - p.c_n).abs() < 1e-13);
        let b2 = Bubble::new(vec![0.3, 0.1, 0.0, -0.2, 0.0, 1.0], 7.5).unwrap();
        let peak = bubble_eval(&p, &b2, &b2.center.clone());
        assert!((peak / (p.c_n * 7.5f64.powf(2.1)) - 1.0).abs() < 1e-14);
        let y = [1e3, 0.0, 0.0, 0.0, 0.0, 0.0];
        let tail = 1e3f64.powf(4.2) * bubble_eval(&p, &b, &y);
        assert!((tail / p.c_n - 1.0).abs() < 1e-4);
        assert!(Bubble::new(vec![0.0; 6], 0.0).is_err());
    }

    #[test]
    fn dlambda_at_center() {
        let p = p6();
        let b = Bubble::standard(6);
        let z0 = bubble_dlambda(&p, &b, &[0.0; 6]);
        assert!((z0 - 2.1 * p.c_n).abs() < 1e-12);
    }

    #[test]
    fn dcenter_is_odd() {
        let p = p6();
        let b = Bubble::new(vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0], 2.0).unwrap();
        let y1 = [0.7, 0.2, 0.1, 0.0, 0.3, 0.0];
        let mut y2 = y1;
        y2[0] = 2.0 * b.center[0] - y1[0];
        let d1 = bubble_dcenter(&p, &b, &y1, 0);
        let d2 = bubble_dcenter(&p, &b, &y2, 0);
        assert!((d1 + d2).abs() < 1e-13 * d1.abs());
    }

    #[test]
    fn cutoff_plateaus() {
        let c = CutoffEta::new(1.5, vec![0.0; 3], 0.2).unwrap();
        let at = |d: f64| {
            let y = [1.5 + d, 0.0, 0.0, 0.0, 0.0, 0.0];
            eta_eval(&c, &y)
        };
        assert_eq!(at(0.1), 1.0);
        assert_eq!(at(0.6), 0.0);
        let mid = at(0.3);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((mid - 0.5).abs() < 1e-12);
        for profile in [RampProfile::QuinticSmoothstep, RampProfile::CubicSmoothstep] {
            let c = c.clone().with_profile(profile);
            assert!((c.of_distance(0.3) - 0.5).abs() < 1e-12);
            // The steepest point of both ramps is the midpoint.
            let slope = c.derivative_of_distance(0.3).abs();
            assert!((slope - profile.slope_bound() / 0.2).abs() < 1e-9);
            let h = 1e-6;
            let fd = (c.of_distance(0.35 + h) - c.of_distance(0.35 - h)) / (2.0 * h);
            assert!((fd - c.derivative_of_distance(0.35)).abs() < 1e-6);
        }
    }

    #[test]
    fn weights_and_norms() {
        let p = p6();
        let cfg = CylinderConfig::new(4, 1.0, 0.3, vec![0.0; 3]).unwrap();
        let w = Weight::star(&p, &cfg, 5.0);
        let samples: Vec<Vec<f64>> =
            (0..7).map(|i| vec![0.3 * i as f64, 0.1, -0.2, 0.0, 0.5, 0.0]).collect();
        let est = norm_estimate(|y| w.eval(y), |y| star_weight(&p, &cfg, 5.0, y), &samples).unwrap();
        assert!((est - 1.0).abs() < 1e-14);
        let dw = Weight::dstar(&p, &cfg, 5.0);
        let est2 = norm_estimate(|y| 2.0 * dw.eval(y), |y| dw.eval(y), &samples).unwrap();
        assert!((est2 - 2.0).abs() < 1e-14);
        assert!(norm_estimate(|_| 1.0, |_| 1.0, &[]).is_err());
    }

    #[test]
    fn own_bubble_dominates_at_large_scale() {
        let p = p6();
        let cfg = CylinderConfig::new(8, 1.0, 0.4, vec![0.0; 3]).unwrap();
        let sol = ApproxSolution::new(p, cfg, 1e4, None).unwrap();
        let x1 = sol.points()[0].clone();
        let own = bubble_eval(&p, &Bubble::new(x1.clone(), 1e4).unwrap(), &x1);
        assert!(own / approx_eval(&sol, &x1) > 0.99);
    }
}
