//! The residual l_k = Z^{2*-1} - VZ - (-Δ)^sZ of the cut-off bubble sum
//! Z = ηΣU_j, split as J1 + J2 + J3, and the decay of its weighted norm
//! along the regime λ ~ k^{(N-2s)/(N-4s)}.

use crate::bubble::{ApproxSolution, CutoffEta, RampProfile, Weight};
use crate::energy::{compute_constants, find_critical_point, solve_reduced_system, EnergyConstants, RegimeBounds};
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::fraclap::{cutoff_commutator, PvQuadratureSpec};
use crate::lattice::CylinderConfig;
use crate::params::PhysicalParams;
use crate::potential::PotentialModel;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LkValue {
    /// Z^{2*-1} - ηΣU_j^{2*-1}.
    pub j1: f64,
    /// -VZ.
    pub j2: f64,
    /// Minus the cutoff commutator.
    pub j3: f64,
    pub j3_error: f64,
    pub total: f64,
}

/// (ΣU_j)^p - ΣU_j^p, expanded around the largest term.
fn power_excess(vals: &[f64], p: f64) -> f64 {
    let (imax, umax) = vals
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |b, (i, v)| if *v > b.1 { (i, *v) } else { b });
    if umax == 0.0 {
        return 0.0;
    }
    let mut rest = 0.0;
    let mut rest_p = 0.0;
    for (i, v) in vals.iter().enumerate() {
        if i != imax {
            rest += v;
            rest_p += v.powf(p);
        }
    }
    umax.powf(p) * (p * (rest / umax).ln_1p()).exp_m1() - rest_p
}

/// (J1, J2) at y; both are pointwise algebraic.
fn lk_local(sol: &ApproxSolution, potential: &PotentialModel, y: &[f64]) -> (f64, f64) {
    let p = sol.params.p;
    let eta = sol.eta(y);
    if eta == 0.0 {
        return (0.0, 0.0);
    }
    let mut vals = Vec::new();
    sol.bubble_values(y, &mut vals);
    let star: f64 = vals.iter().sum();
    let sum_p: f64 = vals.iter().map(|u| u.powf(p)).sum();
    let j1 = eta.powf(p) * power_excess(&vals, p) + (eta.powf(p) - eta) * sum_p;
    (j1, -potential.at(y) * eta * star)
}

pub fn lk_eval(sol: &ApproxSolution, potential: &PotentialModel, y: &[f64], spec: &PvQuadratureSpec) -> Result<LkValue> {
    if sol.cutoff.is_none() {
        return Err(Error::Usage("residual evaluation needs a cutoff".into()));
    }
    let (j1, j2) = lk_local(sol, potential, y);
    let k = cutoff_commutator(sol, y, spec)?;
    let j3 = -k.value;
    Ok(LkValue { j1, j2, j3, j3_error: k.error, total: j1 + j2 + j3 })
}

/// Sample points for the sup-norm estimate, all in the slice y'' = ȳ'':
/// rays from x_1^+ at bubble-scaled and cutoff-scaled distances, midpoints to
/// the nearest neighbours, and a coarse grid over the fundamental sector.
pub fn residual_samples(sol: &ApproxSolution) -> Result<Vec<Vec<f64>>> {
    let cutoff = sol.cutoff.as_ref().ok_or_else(|| Error::Usage("residual samples need a cutoff".into()))?;
    let n = sol.params.n;
    let pts = sol.points();
    let x1 = &pts[0];
    let cfg = &sol.config;
    let lam = sol.lambda;
    let sigma = cutoff.sigma;
    let unit = |v: [f64; 3]| {
        let mut e = vec![0.0; n];
        e[..3].copy_from_slice(&v);
        e
    };
    let rn = (x1[0] * x1[0] + x1[1] * x1[1] + x1[2] * x1[2]).sqrt();
    let e_r = unit([x1[0] / rn, x1[1] / rn, x1[2] / rn]);
    let dirs = [e_r.clone(), unit([0.0, 1.0, 0.0]), unit([0.0, 0.0, 1.0])];
    let shift = |base: &[f64], e: &[f64], t: f64| -> Vec<f64> { base.iter().zip(e).map(|(b, d)| b + t * d).collect() };
    let mut out = vec![x1.clone()];
    for e in &dirs {
        for t in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            out.push(shift(x1, e, t / lam));
        }
    }
    for f in [0.5, 1.2, 1.5, 1.8, 2.5, 3.0] {
        out.push(shift(x1, &e_r, f * sigma));
    }
    for f in [0.5, 1.5] {
        out.push(shift(x1, &e_r, -f * sigma));
    }
    if cfg.k >= 2 {
        out.push(x1.iter().zip(&pts[1]).map(|(a, b)| 0.5 * (a + b)).collect());
    }
    out.push(x1.iter().zip(&pts[cfg.k]).map(|(a, b)| 0.5 * (a + b)).collect());
    let th = PI / cfg.k as f64;
    let phi1 = cfg.h_bar.asin();
    for rho in [0.5 * cfg.r_bar, cfg.r_bar, cfg.r_bar + 1.5 * sigma, 2.0 * cfg.r_bar] {
        for phi in [0.0, phi1, PI / 3.0] {
            let mut y = vec![0.0; n];
            y[0] = rho * phi.cos() * th.cos();
            y[1] = rho * phi.cos() * th.sin();
            y[2] = rho * phi.sin();
            y[3..].copy_from_slice(&cfg.y2_bar);
            out.push(y);
        }
    }
    Ok(out)
}

/// sup over samples of |l_k|/w_** for the total and each component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub total: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub samples: usize,
}

/// The quadrature in J3 only has to resolve each value to a fraction of the
/// norm being estimated: every point is evaluated once, then each coarse/fine
/// difference is checked against target_tol·max(|J3(y)|, w_**(y)·‖l_k‖).
pub fn residual_norms(sol: &ApproxSolution, potential: &PotentialModel, samples: &[Vec<f64>], spec: &PvQuadratureSpec) -> Result<ResidualNorms> {
    if samples.is_empty() {
        return Err(Error::Usage("residual norm needs at least one sample".into()));
    }
    let w = Weight::dstar(&sol.params, &sol.config, sol.lambda);
    let ungated = PvQuadratureSpec { target_tol: f64::INFINITY, ..*spec };
    let mut out = ResidualNorms { total: 0.0, j1: 0.0, j2: 0.0, j3: 0.0, samples: samples.len() };
    let mut evaluated = Vec::with_capacity(samples.len());
    for y in samples {
        let v = lk_eval(sol, potential, y, &ungated)?;
        let wy = w.eval(y);
        out.total = out.total.max(v.total.abs() / wy);
        out.j1 = out.j1.max(v.j1.abs() / wy);
        out.j2 = out.j2.max(v.j2.abs() / wy);
        out.j3 = out.j3.max(v.j3.abs() / wy);
        evaluated.push((v, wy));
    }
    for (v, wy) in evaluated {
        let allowed = spec.target_tol * v.j3.abs().max(wy * out.total) + spec.abs_tol;
        if v.j3_error > allowed {
            return Err(Error::Accuracy {
                context: "cutoff commutator in the residual norm".into(),
                coarse: v.j3 - v.j3_error,
                fine: v.j3,
            });
        }
    }
    Ok(out)
}

/// Where the regime points sit: λ_k = lambda_const·k^{(N-2s)/(N-4s)},
/// h̄_k = t1·k^{-(N-2s-1)/(N-2s+1)}, cutoff width σ = sigma_frac·r̄.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeOptions {
    /// Defaults to L1 of the regime window.
    pub lambda_const: Option<f64>,
    pub sigma_frac: f64,
    /// (r̄, ȳ''); defaults to the critical point of r^{2s}V found from (1, 0).
    pub anchor: Option<(f64, Vec<f64>)>,
    pub bounds: RegimeBounds,
    #[serde(default)]
    pub profile: RampProfile,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        RegimeOptions {
            lambda_const: None,
            sigma_frac: 0.1,
            anchor: None,
            bounds: RegimeBounds::default(),
            profile: RampProfile::default(),
        }
    }
}

/// A fully specified point of the regime for one k.
#[derive(Debug, Clone)]
pub struct RegimePoint {
    pub k: usize,
    pub lambda: f64,
    pub solution: ApproxSolution,
    pub constants: EnergyConstants,
}

impl RegimeOptions {
    pub fn anchor(&self, params: &PhysicalParams, potential: &PotentialModel) -> Result<(f64, Vec<f64>)> {
        match &self.anchor {
            Some(a) => Ok(a.clone()),
            None => {
                let cp = find_critical_point(params, potential, (1.0, &vec![0.0; params.n - 3]))?;
                Ok((cp.r_star, cp.y2_star))
            }
        }
    }

    pub fn point(&self, params: &PhysicalParams, potential: &PotentialModel, k: usize) -> Result<RegimePoint> {
        let (r_bar, y2) = self.anchor(params, potential)?;
        self.point_at(params, potential, k, r_bar, y2)
    }

    pub fn point_at(&self, params: &PhysicalParams, potential: &PotentialModel, k: usize, r_bar: f64, y2: Vec<f64>) -> Result<RegimePoint> {
        self.bounds.validate()?;
        if !(self.sigma_frac > 0.0) {
            return Err(Error::Usage("sigma_frac must be positive".into()));
        }
        let c = compute_constants(params, r_bar)?;
        let v = potential.value(r_bar, &y2);
        // t1 does not depend on V; a nonpositive V only rules out t2.
        let (t1, _) = solve_reduced_system(&c, if v > 0.0 { v } else { 1.0 })?;
        let kf = k as f64;
        let lambda = self.lambda_const.unwrap_or(self.bounds.l1) * kf.powf(c.lambda_exponent());
        let h_bar = t1 * kf.powf(c.h_exponent());
        if !(h_bar < 1.0) {
            return Err(Error::Regime(format!("h_bar = {h_bar} >= 1 at k = {k}")));
        }
        let config = CylinderConfig::new(k, r_bar, h_bar, y2.clone())?;
        let cutoff = CutoffEta::new(r_bar, y2, self.sigma_frac * r_bar)?.with_profile(self.profile);
        let solution = ApproxSolution::new(params.clone(), config, lambda, Some(cutoff))?;
        Ok(RegimePoint { k, lambda, solution, constants: c })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub k: usize,
    pub lambda: f64,
    pub h_bar: f64,
    pub norms: ResidualNorms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualTrend {
    pub rows: Vec<ResidualRow>,
    /// Fitted slope of log ‖l_k‖_** against log λ_k.
    pub slope: f64,
    /// -(2s+1)/2 + 0.1.
    pub threshold: f64,
    pub pass: bool,
}

pub fn residual_norm_trend(
    params: &PhysicalParams,
    potential: &PotentialModel,
    k_list: &[usize],
    opts: &RegimeOptions,
    spec: &PvQuadratureSpec,
) -> Result<ResidualTrend> {
    if k_list.len() < 2 || k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("k list must be increasing with at least 2 entries".into()));
    }
    potential.validate(params.n)?;
    let (r_bar, y2) = opts.anchor(params, potential)?;
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let pt = opts.point_at(params, potential, k, r_bar, y2.clone())?;
        let samples = residual_samples(&pt.solution)?;
        let norms = residual_norms(&pt.solution, potential, &samples, spec)?;
        rows.push(ResidualRow { k, lambda: pt.lambda, h_bar: pt.solution.config.h_bar, norms });
    }
    let ls: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let ns: Vec<f64> = rows.iter().map(|r| r.norms.total).collect();
    let slope = loglog_slope(&ls, &ns)?;
    let threshold = -(2.0 * params.s + 1.0) / 2.0 + 0.1;
    Ok(ResidualTrend { rows, slope, threshold, pass: slope <= threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    #[test]
    fn power_excess_is_exact_difference() {
        let v = [3.0, 0.5, 0.01];
        let p = 20.0 / 7.0 - 1.0;
        let direct = (3.51f64).powf(p) - v.iter().map(|x: &f64| x.powf(p)).sum::<f64>();
        assert!((power_excess(&v, p) / direct - 1.0).abs() < 1e-13);
        assert_eq!(power_excess(&[2.0], p), 0.0);
    }

    #[test]
    fn sample_set_stays_in_transverse_slice() {
        let p = make_params(6, 0.9).unwrap();
        let pt = RegimeOptions::default().point(&p, &PotentialModel::default_bump(6), 8).unwrap();
        let s = residual_samples(&pt.solution).unwrap();
        assert!(s.len() > 30);
        assert!(s.iter().all(|y| y[3..].iter().all(|v| *v == 0.0)));
    }
}
