//! The reduced energy of the multi-bubble ansatz: its constants, the
//! leading-order expansion in (λ, h̄), derivatives, the reduced algebraic
//! system and the critical points of r^{2s}V.

use crate::bubble::Bubble;
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::integrals::{interaction_integral_mc, radial_bubble_integral};
use crate::lattice::{generate_points, lattice_sum_exact, CylinderConfig, LatticeConstants, Side};
use crate::mc::{mc_integrate, McEstimate, McSpec, MixtureProposal, ProposalKind};
use crate::params::PhysicalParams;
use crate::potential::PotentialModel;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Size of the error terms dropped by the expansion and its derivatives.
pub const EXPANSION_ORDER: &str = "k*O(lambda^(-2s-eps))";
pub const GRADIENT_ORDER: &str = "k*O(lambda^(-2s-1-eps))";

/// Constants L0 ≤ λ/k^{(N-2s)/(N-4s)} ≤ L1 and M0 ≤ h̄ k^{(N-2s-1)/(N-2s+1)} ≤ M1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeBounds {
    pub l0: f64,
    pub l1: f64,
    pub m0: f64,
    pub m1: f64,
}

impl Default for RegimeBounds {
    fn default() -> Self {
        RegimeBounds { l0: 0.5, l1: 2.0, m0: 0.5, m1: 2.0 }
    }
}

impl RegimeBounds {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.l0 && self.l0 < self.l1 && 0.0 < self.m0 && self.m0 < self.m1) {
            return Err(Error::Usage("regime bounds need 0 < L0 < L1 and 0 < M0 < M1".into()));
        }
        Ok(())
    }

    pub fn contains(&self, c: &EnergyConstants, k: usize, lambda: f64, h_bar: f64) -> bool {
        let kf = k as f64;
        let l = lambda / kf.powf(c.lambda_exponent());
        let m = h_bar / kf.powf(c.h_exponent());
        (self.l0..=self.l1).contains(&l) && (self.m0..=self.m1).contains(&m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyConstants {
    pub n: usize,
    pub s: f64,
    pub gamma: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub d1: f64,
    pub d2: f64,
    pub r_bar_used: f64,
}

impl EnergyConstants {
    /// (N-2s)/(N-4s): growth of λ in k.
    pub fn lambda_exponent(&self) -> f64 {
        self.gamma / (self.n as f64 - 4.0 * self.s)
    }

    /// -(N-2s-1)/(N-2s+1): decay of h̄ in k.
    pub fn h_exponent(&self) -> f64 {
        -(self.gamma - 1.0) / (self.gamma + 1.0)
    }
}

pub fn compute_constants(params: &PhysicalParams, r_bar: f64) -> Result<EnergyConstants> {
    if !(r_bar > 0.0 && r_bar.is_finite()) {
        return Err(Error::Domain(format!("r_bar must be positive, got {r_bar}")));
    }
    let nf = params.n as f64;
    let s = params.s;
    let g = params.decay();
    let lat = LatticeConstants::new(params)?;
    let a5 = params.c_n * radial_bubble_integral(params, params.p)?;
    let b0 = 2.0 * s / nf * radial_bubble_integral(params, params.two_s_star)?;
    let b1 = radial_bubble_integral(params, 2.0)?;
    let b2 = lat.a1 * a5 / r_bar.powf(g);
    let b3 = lat.a2 / lat.a1 * b2;
    Ok(EnergyConstants {
        n: params.n,
        s,
        gamma: g,
        a1: lat.a1,
        a2: lat.a2,
        a3: lat.a3,
        a4: lat.a4,
        a5,
        a6: g * g / (nf + 2.0 * s) * a5,
        b0,
        b1,
        b2,
        b3,
        d1: (g - 1.0) * b3 / (g * b2),
        d2: g * b2 / (2.0 * s * b1),
        r_bar_used: r_bar,
    })
}

/// The expansion k(B0 + B1V/λ^{2s} - B2 k^γ/(λ c)^γ - B3 k/(λ^γ h̄^{γ-1} c)),
/// c = √(1-h̄²), with its four terms kept apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub bulk: f64,
    pub potential: f64,
    pub same_side: f64,
    pub cross_side: f64,
    pub total: f64,
    /// Whether (λ, h̄) lies inside the default regime window.
    pub in_regime: bool,
    pub order: &'static str,
}

impl EnergyTerms {
    pub fn interaction(&self) -> f64 {
        self.same_side + self.cross_side
    }
}

fn check_point(lambda: f64, h_bar: f64) -> Result<()> {
    if !(h_bar > 0.0 && h_bar < 1.0) {
        return Err(Error::Domain(format!("h_bar must lie in (0, 1), got {h_bar}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

pub fn energy_expansion(c: &EnergyConstants, v_val: f64, k: usize, lambda: f64, h_bar: f64) -> Result<EnergyTerms> {
    check_point(lambda, h_bar)?;
    let kf = k as f64;
    let g = c.gamma;
    let root = (1.0 - h_bar * h_bar).sqrt();
    let lg = lambda.powf(-g);
    let bulk = kf * c.b0;
    let potential = kf * c.b1 * v_val * lambda.powf(-2.0 * c.s);
    let same_side = -kf * c.b2 * kf.powf(g) * lg * root.powf(-g);
    let cross_side = -kf * c.b3 * kf * lg * h_bar.powf(1.0 - g) / root;
    Ok(EnergyTerms {
        bulk,
        potential,
        same_side,
        cross_side,
        total: bulk + potential + same_side + cross_side,
        in_regime: RegimeBounds::default().contains(c, k, lambda, h_bar),
        order: EXPANSION_ORDER,
    })
}

/// ∂/∂λ of the retained expansion terms.
pub fn grad_lambda(c: &EnergyConstants, v_val: f64, k: usize, lambda: f64, h_bar: f64) -> Result<f64> {
    check_point(lambda, h_bar)?;
    let kf = k as f64;
    let g = c.gamma;
    let s = c.s;
    let root = (1.0 - h_bar * h_bar).sqrt();
    let lg1 = lambda.powf(-g - 1.0);
    Ok(kf
        * (-2.0 * s * c.b1 * v_val * lambda.powf(-2.0 * s - 1.0)
            + g * c.b2 * kf.powf(g) * lg1 * root.powf(-g)
            + g * c.b3 * kf * lg1 * h_bar.powf(1.0 - g) / root))
}

/// Exact ∂/∂h̄ of the retained expansion terms. Besides the two leading
/// pieces it carries -B3 k² h̄^{2-γ}/(λ^γ(1-h̄²)^{3/2}), which is smaller by h̄².
pub fn grad_h(c: &EnergyConstants, v_val: f64, k: usize, lambda: f64, h_bar: f64) -> Result<f64> {
    let lead = grad_h_leading(c, v_val, k, lambda, h_bar)?;
    let kf = k as f64;
    let root2 = 1.0 - h_bar * h_bar;
    Ok(lead - c.b3 * kf * kf * lambda.powf(-c.gamma) * h_bar.powf(2.0 - c.gamma) * root2.powf(-1.5))
}

/// The two dominant terms of ∂/∂h̄:
/// -γB2 h̄ k^{γ+1}/(λ^γ c^{γ+2}) + (γ-1)B3 k²/(λ^γ h̄^γ c).
pub fn grad_h_leading(c: &EnergyConstants, _v_val: f64, k: usize, lambda: f64, h_bar: f64) -> Result<f64> {
    check_point(lambda, h_bar)?;
    let kf = k as f64;
    let g = c.gamma;
    let root = (1.0 - h_bar * h_bar).sqrt();
    let lg = lambda.powf(-g);
    Ok(-g * c.b2 * h_bar * kf.powf(g + 1.0) * lg * root.powf(-g - 2.0)
        + (g - 1.0) * c.b3 * kf * kf * lg * h_bar.powf(-g) / root)
}

fn interaction_sums(config: &CylinderConfig, gamma: f64) -> Result<f64> {
    let same = if config.k >= 2 { lattice_sum_exact(config, gamma, Side::SameSide)? } else { 0.0 };
    let cross = if config.h_bar > 0.0 { lattice_sum_exact(config, gamma, Side::CrossSide)? } else { 0.0 };
    Ok(same + cross)
}

/// ∂/∂r̄ of k(B1V(r̄,ȳ'')/λ^{2s} - A5 λ^{-γ} Σ_{j≠1}|x_j - x_1|^{-γ}) with the
/// lattice sums evaluated exactly. Every distance is proportional to r̄, so the
/// interaction contributes γA5/(r̄λ^γ)·Σ.
pub fn grad_r(c: &EnergyConstants, potential: &PotentialModel, config: &CylinderConfig, lambda: f64) -> Result<f64> {
    config.validate()?;
    check_point(lambda, config.h_bar.max(f64::MIN_POSITIVE))?;
    let kf = config.k as f64;
    let (dr, _) = potential.gradient(config.r_bar, &config.y2_bar);
    let sums = interaction_sums(config, c.gamma)?;
    Ok(kf
        * (c.b1 * dr * lambda.powf(-2.0 * c.s)
            + c.gamma * c.a5 / (config.r_bar * lambda.powf(c.gamma)) * sums))
}

/// ∂/∂ȳ''_j: k B1 ∂_jV/λ^{2s}; the interaction does not depend on ȳ''.
pub fn grad_y(
    c: &EnergyConstants,
    potential: &PotentialModel,
    config: &CylinderConfig,
    lambda: f64,
    axis: usize,
) -> Result<f64> {
    config.validate()?;
    if axis >= config.y2_bar.len() {
        return Err(Error::Domain(format!("transverse axis {axis} out of range")));
    }
    let (_, dy) = potential.gradient(config.r_bar, &config.y2_bar);
    Ok(config.k as f64 * c.b1 * dy[axis] * lambda.powf(-2.0 * c.s))
}

/// -k A5 λ^{-γ} Σ_{j≠1}|x_j - x_1|^{-γ}: the interaction energy assembled
/// from exact lattice sums instead of their asymptotic forms.
pub fn interaction_from_lattice(c: &EnergyConstants, config: &CylinderConfig, lambda: f64) -> Result<f64> {
    let sums = interaction_sums(config, c.gamma)?;
    Ok(-(config.k as f64) * c.a5 * lambda.powf(-c.gamma) * sums)
}

/// Residuals of the reduced equations in the rescaled unknowns:
/// -t1 + D1/t1^γ and D2/t2^{N-4s} - V.
pub fn reduced_residuals(c: &EnergyConstants, v_val: f64, t1: f64, t2: f64) -> (f64, f64) {
    let q = c.n as f64 - 4.0 * c.s;
    (-t1 + c.d1 * t1.powf(-c.gamma), c.d2 * t2.powf(-q) - v_val)
}

/// Root of a decreasing function on (0, ∞): Newton steps inside a bracket
/// that is kept by bisection whenever Newton leaves it.
fn decreasing_root<F: Fn(f64) -> (f64, f64)>(f: F) -> Result<f64> {
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut guard = 0;
    while f(lo).0 < 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::Search("could not bracket reduced root from below".into()));
        }
    }
    while f(hi).0 > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 4000 {
            return Err(Error::Search("could not bracket reduced root from above".into()));
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, dv) = f(t);
        if v == 0.0 {
            return Ok(t);
        }
        if v > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - v / dv;
        let next = if dv < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - t).abs() <= 1e-15 * t {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::Search("reduced root iteration did not settle".into()))
}

/// Safeguarded Newton solution of the reduced residual equations.
pub fn reduced_newton(c: &EnergyConstants, v_val: f64) -> Result<(f64, f64)> {
    if !(v_val > 0.0 && v_val.is_finite()) {
        return Err(Error::Domain(format!("reduced system needs V > 0, got {v_val}")));
    }
    let g = c.gamma;
    let q = c.n as f64 - 4.0 * c.s;
    let n1 = decreasing_root(|t| (-t + c.d1 * t.powf(-g), -1.0 - g * c.d1 * t.powf(-g - 1.0)))?;
    let n2 = decreasing_root(|t| (c.d2 * t.powf(-q) - v_val, -q * c.d2 * t.powf(-q - 1.0)))?;
    Ok((n1, n2))
}

/// (t1, t2) = (D1^{1/(γ+1)}, (D2/V)^{1/(N-4s)}), each confirmed by an
/// independent safeguarded Newton solve to 1e-10 relative.
pub fn solve_reduced_system(c: &EnergyConstants, v_val: f64) -> Result<(f64, f64)> {
    if !(v_val > 0.0 && v_val.is_finite()) {
        return Err(Error::Domain(format!("reduced system needs V > 0, got {v_val}")));
    }
    let g = c.gamma;
    let q = c.n as f64 - 4.0 * c.s;
    let t1 = c.d1.powf(1.0 / (g + 1.0));
    let t2 = (c.d2 / v_val).powf(1.0 / q);
    let (n1, n2) = reduced_newton(c, v_val)?;
    for (closed, newton, name) in [(t1, n1, "t1"), (t2, n2, "t2")] {
        if ((closed - newton) / closed).abs() > 1e-10 {
            return Err(Error::Accuracy { context: format!("reduced {name}"), coarse: newton, fine: closed });
        }
    }
    Ok((t1, t2))
}

/// A zero of ∇(r^{2s}V(r, y'')).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub r_star: f64,
    pub y2_star: Vec<f64>,
    pub nondegenerate: bool,
    pub jac_det_sign: i32,
    pub jac_det: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// ∇(r^{2s}V) in the variables (r, y'').
pub fn weighted_gradient(s: f64, potential: &PotentialModel, x: &[f64]) -> Vec<f64> {
    let r = x[0];
    let v = potential.value(r, &x[1..]);
    let (dr, dy) = potential.gradient(r, &x[1..]);
    let w = r.powf(2.0 * s);
    let mut g = Vec::with_capacity(x.len());
    g.push(2.0 * s * r.powf(2.0 * s - 1.0) * v + w * dr);
    g.extend(dy.iter().map(|d| w * d));
    g
}

fn fd_jacobian(s: f64, potential: &PotentialModel, x: &[f64]) -> DMatrix<f64> {
    let m = x.len();
    let mut jac = DMatrix::zeros(m, m);
    for j in 0..m {
        let h = 1e-5 * x[j].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let gp = weighted_gradient(s, potential, &xp);
        let gm = weighted_gradient(s, potential, &xm);
        for i in 0..m {
            jac[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    jac
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton on ∇(r^{2s}V) with a finite-difference Jacobian, steps
/// shortened to keep r > 0. Nondegeneracy of the Jacobian at the zero gives
/// local degree ±1.
pub fn find_critical_point(params: &PhysicalParams, potential: &PotentialModel, initial: (f64, &[f64])) -> Result<CriticalPoint> {
    potential.validate(params.n)?;
    let (r0, y0) = initial;
    if !(r0 > 0.0) {
        return Err(Error::Domain(format!("initial r must be positive, got {r0}")));
    }
    if y0.len() != params.n - 3 {
        return Err(Error::Domain(format!("initial y'' needs {} coordinates", params.n - 3)));
    }
    let s = params.s;
    let mut x: Vec<f64> = std::iter::once(r0).chain(y0.iter().copied()).collect();
    let mut g = weighted_gradient(s, potential, &x);
    let finish = |x: Vec<f64>, g: &[f64], it: usize| {
        let jac = fd_jacobian(s, potential, &x);
        let det = jac.determinant();
        let jscale = jac.iter().fold(0.0f64, |a, v| a.max(v.abs())).powi(x.len() as i32);
        CriticalPoint {
            r_star: x[0],
            y2_star: x[1..].to_vec(),
            nondegenerate: jscale > 0.0 && det.abs() > 1e-8 * jscale,
            jac_det_sign: if det >= 0.0 { 1 } else { -1 },
            jac_det: det,
            iterations: it,
            gradient_norm: norm(g),
        }
    };
    for it in 0..200 {
        if norm(&g) == 0.0 {
            return Ok(finish(x, &g, it));
        }
        let jac = fd_jacobian(s, potential, &x);
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&g))
            .filter(|d| d.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::Search("singular Jacobian of the weighted gradient".into()))?;
        let len = step.norm();
        // Trust region: Newton may not jump into the flat tails of V.
        let radius = 0.25 * x[0].max(1.0);
        let mut t = if len > radius { radius / len } else { 1.0 };
        if step[0] > 0.0 && x[0] - t * step[0] <= 0.0 {
            t = 0.5 * x[0] / step[0];
        }
        let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a - t * d).collect();
        if trial[0] <= 1e-12 {
            return Err(Error::Domain("critical-point search ran into r <= 0".into()));
        }
        g = weighted_gradient(s, potential, &trial);
        x = trial;
        if t == 1.0 && len <= 1e-13 * (1.0 + norm(&x)) {
            return Ok(finish(x, &g, it + 1));
        }
    }
    Err(Error::Search("critical-point search hit the iteration limit".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedSolution {
    pub t1: f64,
    pub t2: f64,
    pub r_star: f64,
    pub y2_star: Vec<f64>,
    pub v_star: f64,
    pub nondegenerate: bool,
    pub jac_det_sign: i32,
}

/// Critical point of r^{2s}V, then the reduced system with r̄ = r*.
pub fn reduce(params: &PhysicalParams, potential: &PotentialModel, initial: (f64, &[f64])) -> Result<(ReducedSolution, EnergyConstants)> {
    let cp = find_critical_point(params, potential, initial)?;
    let v_star = potential.value(cp.r_star, &cp.y2_star);
    let c = compute_constants(params, cp.r_star)?;
    let (t1, t2) = solve_reduced_system(&c, v_star)?;
    Ok((
        ReducedSolution {
            t1,
            t2,
            r_star: cp.r_star,
            y2_star: cp.y2_star,
            v_star,
            nondegenerate: cp.nondegenerate,
            jac_det_sign: cp.jac_det_sign,
        },
        c,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub k: usize,
    pub t1: f64,
    pub t2: f64,
    pub h_bar: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSweep {
    pub rows: Vec<ScalingRow>,
    pub slope_h: f64,
    pub slope_lambda: f64,
    pub expected_slope_h: f64,
    pub expected_slope_lambda: f64,
}

/// h̄_k = t1 k^{-(γ-1)/(γ+1)}, λ_k = t2 k^{γ/(N-4s)} and their fitted
/// log-log slopes.
pub fn sweep_scaling(c: &EnergyConstants, v_val: f64, k_list: &[usize]) -> Result<ScalingSweep> {
    if k_list.len() < 4 || k_list.windows(2).any(|w| w[0] >= w[1]) || k_list[0] == 0 {
        return Err(Error::Usage("k list must be increasing with at least 4 positive entries".into()));
    }
    let (t1, t2) = solve_reduced_system(c, v_val)?;
    let rows: Vec<ScalingRow> = k_list
        .iter()
        .map(|&k| {
            let kf = k as f64;
            ScalingRow { k, t1, t2, h_bar: t1 * kf.powf(c.h_exponent()), lambda: t2 * kf.powf(c.lambda_exponent()) }
        })
        .collect();
    let ks: Vec<f64> = k_list.iter().map(|&k| k as f64).collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.h_bar).collect();
    let ls: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    Ok(ScalingSweep {
        slope_h: loglog_slope(&ks, &hs)?,
        slope_lambda: loglog_slope(&ks, &ls)?,
        expected_slope_h: c.h_exponent(),
        expected_slope_lambda: c.lambda_exponent(),
        rows,
    })
}

/// Monte Carlo evaluation of I(Z*) for Z* = Σ_j U_{x_j,λ} over the 2k points.
///
/// Each bubble solves the critical equation, so ½∫|(-Δ)^{s/2}Z*|² is
/// ½Σ_{i,j}∫U_i^{2*-1}U_j exactly. By the dihedral symmetry of the points,
/// Σ_{i≠j} = 2k Σ_{j≠1} I_{1j}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectEnergy {
    /// k·B0, the single-bubble part (closed form).
    pub bulk: f64,
    /// ½∫V Z*².
    pub potential: McEstimate,
    /// k Σ_{j≠1} ∫U_1^{2*-1}U_j.
    pub pair_sum: McEstimate,
    /// ∫(Z*^{2*} - Σ_j U_j^{2*}).
    pub nonlinear_excess: McEstimate,
    /// pair_sum - nonlinear_excess/2*.
    pub interaction: McEstimate,
    pub total: McEstimate,
}

pub fn energy_direct_oracle(
    params: &PhysicalParams,
    config: &CylinderConfig,
    lambda: f64,
    potential: &PotentialModel,
    spec: &McSpec,
) -> Result<DirectEnergy> {
    config.validate()?;
    potential.validate(params.n)?;
    spec.validate()?;
    if config.dim() != params.n {
        return Err(Error::Domain("configuration dimension differs from N".into()));
    }
    if config.k > 64 {
        return Err(Error::Usage("direct energy oracle is limited to k <= 64".into()));
    }
    let n = params.n;
    let kf = config.k as f64;
    let pts = generate_points(config);
    let a = params.half_decay();
    let amp = params.c_n * lambda.powf(a);
    let l2 = lambda * lambda;
    let bubbles_at = move |x: &[f64], out: &mut [f64]| {
        for (o, c) in out.iter_mut().zip(&pts) {
            let d2: f64 = c.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum();
            *o = amp * (1.0 + l2 * d2).powf(-a);
        }
    };
    let pts = generate_points(config);
    let m = pts.len();
    let even = vec![1.0; m];

    let bulk = kf * 2.0 * params.s / n as f64 * radial_bubble_integral(params, params.two_s_star)?;

    // Pair interactions with the first bubble.
    let b1 = Bubble::new(pts[0].clone(), lambda)?;
    let mut pair_terms = Vec::with_capacity(m - 1);
    for (j, x) in pts.iter().enumerate().skip(1) {
        let bj = Bubble::new(x.clone(), lambda)?;
        pair_terms.push((kf, interaction_integral_mc(params, &b1, &bj, &spec.derived(1000 + j as u64))?));
    }
    let pair_sum = McEstimate::combine(&pair_terms);

    let proposal = |nu: f64| -> Result<MixtureProposal> {
        match spec.proposal {
            ProposalKind::BubbleRadial => MixtureProposal::student(n, nu, lambda, pts.clone(), even.clone()),
            ProposalKind::UniformBall => MixtureProposal::uniform_ball(n, 30.0, lambda, pts.clone(), even.clone()),
        }
    };

    let two_star = params.two_s_star;
    let excess = mc_integrate(&spec.derived(1), &proposal(2.0 * params.s)?, |x| {
        let mut u = [0.0; 128];
        let u = &mut u[..m];
        bubbles_at(x, u);
        let (imax, umax) = u.iter().enumerate().fold((0, 0.0), |b, (i, v)| if *v > b.1 { (i, *v) } else { b });
        let rest: f64 = u.iter().enumerate().filter(|(i, _)| *i != imax).map(|(_, v)| v).sum();
        let others: f64 = u.iter().enumerate().filter(|(i, _)| *i != imax).map(|(_, v)| v.powf(two_star)).sum();
        // (U+R)^{2*} - U^{2*} without cancellation
        umax.powf(two_star) * (two_star * (rest / umax).ln_1p()).exp_m1() - others
    })?;

    let pot = if matches!(potential, PotentialModel::Constant { c } if *c == 0.0) {
        McEstimate::zero(spec.n_samples)
    } else {
        let e = mc_integrate(&spec.derived(2), &proposal(n as f64 - 4.0 * params.s)?, |x| {
            let mut u = [0.0; 128];
            let u = &mut u[..m];
            bubbles_at(x, u);
            let z: f64 = u.iter().sum();
            potential.at(x) * z * z
        })?;
        McEstimate::combine(&[(0.5, e)])
    };

    let interaction = McEstimate::combine(&[(1.0, pair_sum), (-1.0 / two_star, excess)]);
    let total = McEstimate::combine(&[(1.0, interaction), (1.0, pot)]);
    Ok(DirectEnergy {
        bulk,
        potential: pot,
        pair_sum,
        nonlinear_excess: excess,
        interaction,
        total: McEstimate { estimate: total.estimate + bulk, ..total },
    })
}
