//! Principal-value evaluation of the fractional Laplacian
//!
//! (-Δ)^s u(y) = c_{N,s} ∫ (u(y) - ½(u(y+z) + u(y-z))) |z|^{-N-2s} dz
//!
//! in polar coordinates z = ρω. For each direction ω the radial integral is
//! split into
//!
//! | range            | treatment                                              |
//! |------------------|--------------------------------------------------------|
//! | [0, ρ₀]          | fit D(ρ) = aρ² + bρ⁴ through D(ρ₀), D(ρ₀/2), integrate |
//! | [ρ₀, 64R]        | Gauss–Legendre in log ρ on factor-4 panels             |
//! | [64R, ∞)         | ρ = 64R·v^{-1/(2s)}, Gauss–Legendre in v on [0, 1]     |
//!
//! where R is the inner radius and ρ₀ = 10⁻³R. The tail substitution turns
//! the power weight into a constant, so constants are annihilated exactly.
//!
//! Angular integration has three routes, picked from the field's symmetry:
//! radial fields reduce to one polar angle; fields depending on y'' only
//! through |y'' - c''| (evaluated on the slice y'' = c'') reduce to one tilt
//! angle times S²; anything else uses a product rule on S^{N-1}. Every
//! evaluation runs at two resolutions and the difference is the error bound.

use crate::bubble::{bubble_eval, ApproxSolution, Bubble};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::quadrature::{gauss_jacobi, GaussLegendre};
use crate::special::sphere_area;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Symmetry information used to reduce the angular integral.
#[derive(Debug, Clone, PartialEq)]
pub enum Symmetry {
    None,
    /// u(x) = f(|x - center|).
    Radial { center: Vec<f64> },
    /// u depends on x[3..] only through |x[3..] - center|.
    Transverse { center: Vec<f64> },
}

/// A pointwise-evaluable function on R^N with bubble-class decay.
pub trait Field: Sync {
    fn eval(&self, x: &[f64]) -> f64;

    fn symmetry(&self) -> Symmetry {
        Symmetry::None
    }

    /// Typical length scale near the evaluation point; the default inner radius.
    fn length_scale(&self) -> f64 {
        1.0
    }
}

/// Adapts a closure into a [`Field`] with no declared symmetry.
pub struct FnField<F> {
    pub f: F,
    pub scale: f64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnField<F> {
    pub fn new(f: F) -> Self {
        FnField { f, scale: 1.0 }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for FnField<F> {
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn length_scale(&self) -> f64 {
        self.scale
    }
}

/// A single bubble as a radially symmetric field.
pub struct BubbleField<'a> {
    pub params: &'a PhysicalParams,
    pub bubble: &'a Bubble,
}

impl Field for BubbleField<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        bubble_eval(self.params, self.bubble, x)
    }

    fn symmetry(&self) -> Symmetry {
        Symmetry::Radial { center: self.bubble.center.clone() }
    }

    fn length_scale(&self) -> f64 {
        1.0 / self.bubble.lambda
    }
}

/// Wraps a field and hides its symmetry, forcing the general product rule.
pub struct Unstructured<'a, F: Field + ?Sized>(pub &'a F);

impl<F: Field + ?Sized> Field for Unstructured<'_, F> {
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x)
    }

    fn length_scale(&self) -> f64 {
        self.0.length_scale()
    }
}

/// Resolution and tolerance of the principal-value quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvQuadratureSpec {
    /// Inner radius R; `None` uses the field's length scale.
    pub inner_radius: Option<f64>,
    /// Gauss–Legendre nodes per logarithmic radial panel.
    pub radial_nodes: usize,
    /// Nodes per angular coordinate.
    pub angular_nodes: usize,
    /// Gauss–Legendre nodes for the transformed outer tail.
    pub tail_nodes: usize,
    /// Relative tolerance on the coarse/fine difference.
    pub target_tol: f64,
    /// Absolute floor for the coarse/fine difference.
    pub abs_tol: f64,
}

impl Default for PvQuadratureSpec {
    fn default() -> Self {
        PvQuadratureSpec {
            inner_radius: None,
            radial_nodes: 16,
            angular_nodes: 10,
            tail_nodes: 16,
            target_tol: 1e-3,
            abs_tol: 1e-12,
        }
    }
}

impl PvQuadratureSpec {
    /// Settings for radially symmetric fields, where angular work is cheap.
    pub fn radial_default() -> Self {
        PvQuadratureSpec {
            radial_nodes: 24,
            angular_nodes: 48,
            tail_nodes: 24,
            target_tol: 1e-6,
            abs_tol: 1e-14,
            ..Default::default()
        }
    }

    fn refined(&self) -> Self {
        PvQuadratureSpec {
            radial_nodes: self.radial_nodes + self.radial_nodes / 2,
            angular_nodes: self.angular_nodes + 2.max(self.angular_nodes / 4),
            tail_nodes: self.tail_nodes + self.tail_nodes / 2,
            ..*self
        }
    }
}

/// Value with a coarse/fine error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvEstimate {
    pub value: f64,
    pub error: f64,
}

struct RadialRule {
    s: f64,
    rho0: f64,
    panels: Vec<Vec<(f64, f64)>>,
    tail_start: f64,
    tail: Vec<(f64, f64)>,
}

impl RadialRule {
    fn new(s: f64, r_in: f64, n_r: usize, n_t: usize) -> Self {
        let rho0 = 1e-3 * r_in;
        let gl = GaussLegendre::new(n_r);
        let edges = [rho0, r_in / 16.0, r_in / 4.0, r_in, 4.0 * r_in, 16.0 * r_in, 64.0 * r_in];
        let panels = edges
            .windows(2)
            .map(|w| {
                gl.mapped(w[0].ln(), w[1].ln())
                    .into_iter()
                    .map(|(x, wt)| {
                        let rho = x.exp();
                        // dρ ρ^{-1-2s} = ρ^{-2s} d(ln ρ)
                        (rho, wt * rho.powf(-2.0 * s))
                    })
                    .collect()
            })
            .collect();
        let tail_start = 64.0 * r_in;
        let tail = GaussLegendre::new(n_t)
            .mapped(0.0, 1.0)
            .into_iter()
            .map(|(v, wt)| {
                (tail_start * v.powf(-1.0 / (2.0 * s)), wt * tail_start.powf(-2.0 * s) / (2.0 * s))
            })
            .collect();
        RadialRule { s, rho0, panels, tail_start, tail }
    }

    /// ∫_0^∞ (u0 - g(ρ)) ρ^{-1-2s} dρ.
    fn integrate<G: FnMut(f64) -> f64>(&self, u0: f64, mut g: G) -> f64 {
        let s = self.s;
        let r0 = self.rho0;
        let d1 = u0 - g(r0);
        let d2 = u0 - g(0.5 * r0);
        let b = 4.0 * (d1 - 4.0 * d2) / (3.0 * r0.powi(4));
        let a = (d1 - b * r0.powi(4)) / (r0 * r0);
        let mut total = a * r0.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
            + b * r0.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s);
        for panel in &self.panels {
            for &(rho, w) in panel {
                total += w * (u0 - g(rho));
            }
        }
        debug_assert!(self.tail_start > 0.0);
        for &(rho, w) in &self.tail {
            total += w * (u0 - g(rho));
        }
        total
    }
}

/// Nodes θ ∈ [0, π] and weights for ∫ f(θ) sin^p θ dθ: Gauss–Jacobi in
/// u = cos θ, where the weight becomes (1-u²)^{(p-1)/2}.
fn polar_rule(m: usize, p: i32) -> Vec<(f64, f64)> {
    let a = 0.5 * (p as f64 - 1.0);
    gauss_jacobi(m, a, a)
        .expect("valid Jacobi parameters")
        .into_iter()
        .map(|(u, w)| (u.clamp(-1.0, 1.0).acos(), w))
        .collect()
}

/// Unit directions and weights for S^{N-1}; weights sum to ω_{N-1}.
fn full_directions(n: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    let polar: Vec<Vec<(f64, f64)>> =
        (1..=n - 2).map(|i| polar_rule(m, (n - 1 - i) as i32)).collect();
    let m_phi = 2 * m;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n - 2];
    loop {
        let mut w = 1.0;
        let mut sin_prod = 1.0;
        let mut dir = vec![0.0; n];
        for (i, &k) in idx.iter().enumerate() {
            let (t, wt) = polar[i][k];
            dir[i] = sin_prod * t.cos();
            sin_prod *= t.sin();
            w *= wt;
        }
        for j in 0..m_phi {
            let phi = 2.0 * PI * j as f64 / m_phi as f64;
            let mut d = dir.clone();
            d[n - 2] = sin_prod * phi.cos();
            d[n - 1] = sin_prod * phi.sin();
            out.push((d, w * 2.0 * PI / m_phi as f64));
        }
        // odometer over the polar indices
        let mut pos = 0;
        loop {
            if pos == n - 2 {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Directions for fields depending on y'' only through its distance to a
/// center: ω = (c ω', √(1-c²) ω''), with ω' on the upper half of S² and the
/// ω'' integral done exactly. Returns (c, √(1-c²), ω', weight); weights sum
/// to ω_{N-1}. The tilt uses Gauss–Jacobi in v = c², where a symmetrised
/// integrand is smooth.
fn transverse_directions(n: usize, m: usize) -> Vec<(f64, f64, [f64; 3], f64)> {
    // c²(1-c²)^{(N-5)/2} dc on [0,1] = ½ v^{1/2}(1-v)^{(N-5)/2} dv; with
    // v = (1+x)/2 this is a Jacobi weight in x times 2^{-(N-2)/2}/2.
    let alpha = 0.5 * (n as f64 - 5.0);
    let scale = 0.5 * 2f64.powf(-0.5 * (n as f64 - 2.0));
    let tilt: Vec<(f64, f64)> = gauss_jacobi(m, alpha, 0.5)
        .expect("valid Jacobi parameters")
        .into_iter()
        .map(|(x, w)| ((0.5 * (1.0 + x)).sqrt(), w * scale))
        .collect();
    let us = GaussLegendre::new(m).mapped(0.0, 1.0);
    let m_phi = 2 * m;
    // both hemispheres of ω' give the same symmetrised value
    let area = 2.0 * sphere_area(n - 4);
    let mut out = Vec::with_capacity(tilt.len() * us.len() * m_phi);
    for &(c, wc) in &tilt {
        let sc = (1.0 - c * c).max(0.0).sqrt();
        for &(u, wu) in &us {
            let st = (1.0 - u * u).sqrt();
            for j in 0..m_phi {
                let phi = 2.0 * PI * j as f64 / m_phi as f64;
                let w = wc * wu * 2.0 * PI / m_phi as f64 * area;
                out.push((c, sc, [st * phi.cos(), st * phi.sin(), u], w));
            }
        }
    }
    out
}

fn evaluate_once<F: Field + ?Sized>(
    params: &PhysicalParams,
    u: &F,
    y: &[f64],
    spec: &PvQuadratureSpec,
) -> Result<f64> {
    let n = params.n;
    if y.len() != n {
        return Err(Error::Domain(format!("point has dimension {}, expected {n}", y.len())));
    }
    let r_in = spec.inner_radius.unwrap_or_else(|| u.length_scale());
    if !(r_in > 0.0 && r_in.is_finite()) {
        return Err(Error::Domain(format!("inner radius must be positive, got {r_in}")));
    }
    let rule = RadialRule::new(params.s, r_in, spec.radial_nodes, spec.tail_nodes);
    let u0 = u.eval(y);
    let mut x = vec![0.0; n];
    let total = match u.symmetry() {
        Symmetry::Radial { center } => {
            let b: f64 = y.iter().zip(&center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
            let thetas: Vec<(f64, f64)> = polar_rule(spec.angular_nodes, n as i32 - 2)
                .into_iter()
                .map(|(t, w)| (t.cos(), w))
                .collect();
            let norm = sphere_area(n - 2) / params.omega_nm1;
            let mut probe = center.clone();
            let mut profile = |r: f64| {
                probe.copy_from_slice(&center);
                probe[0] += r;
                u.eval(&probe)
            };
            let avg = |rho: f64| {
                if b == 0.0 {
                    return profile(rho);
                }
                let mut acc = 0.0;
                for &(c, w) in &thetas {
                    let r2 = (b * b + rho * rho + 2.0 * b * rho * c).max(0.0);
                    acc += w * profile(r2.sqrt());
                }
                norm * acc
            };
            params.omega_nm1 * rule.integrate(u0, avg)
        }
        Symmetry::Transverse { center }
            if y[3..].iter().zip(&center).all(|(a, c)| (a - c).abs() <= 1e-14 * (1.0 + c.abs())) =>
        {
            let mut acc = 0.0;
            for (cp, sp, w3, w) in transverse_directions(n, spec.angular_nodes) {
                let val = rule.integrate(u0, |rho| {
                    let mut v = 0.0;
                    for sign in [1.0, -1.0] {
                        for i in 0..3 {
                            x[i] = y[i] + sign * rho * cp * w3[i];
                        }
                        x[3..].copy_from_slice(&center);
                        x[3] += rho * sp;
                        v += u.eval(&x);
                    }
                    0.5 * v
                });
                acc += w * val;
            }
            acc
        }
        _ => {
            let mut acc = 0.0;
            for (dir, w) in full_directions(n, spec.angular_nodes) {
                let val = rule.integrate(u0, |rho| {
                    let mut v = 0.0;
                    for sign in [1.0, -1.0] {
                        for i in 0..n {
                            x[i] = y[i] + sign * rho * dir[i];
                        }
                        v += u.eval(&x);
                    }
                    0.5 * v
                });
                acc += w * val;
            }
            acc
        }
    };
    let v = params.c_ns * total;
    if !v.is_finite() {
        return Err(Error::Numeric("non-finite fractional Laplacian value".into()));
    }
    Ok(v)
}

/// (-Δ)^s u(y) with a coarse/fine error bound.
pub fn frac_laplacian_pv<F: Field + ?Sized>(
    params: &PhysicalParams,
    u: &F,
    y: &[f64],
    spec: &PvQuadratureSpec,
) -> Result<PvEstimate> {
    if !(spec.target_tol > 0.0 && spec.abs_tol >= 0.0) {
        return Err(Error::Usage("tolerances must be positive".into()));
    }
    if spec.radial_nodes < 2 || spec.angular_nodes < 2 || spec.tail_nodes < 2 {
        return Err(Error::Usage("quadrature orders must be at least 2".into()));
    }
    let coarse = evaluate_once(params, u, y, spec)?;
    let fine = evaluate_once(params, u, y, &spec.refined())?;
    let error = (fine - coarse).abs();
    if error > spec.target_tol * fine.abs() + spec.abs_tol {
        return Err(Error::Accuracy {
            context: "fractional Laplacian quadrature".into(),
            coarse,
            fine,
        });
    }
    Ok(PvEstimate { value: fine, error })
}

/// Ten fixed points with |y| ≤ 3 spread over radii and directions.
pub fn identity_samples(n: usize) -> Vec<Vec<f64>> {
    let radii = [0.0, 0.2, 0.5, 0.8, 1.0, 1.4, 1.9, 2.3, 2.7, 3.0];
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut d: Vec<f64> = (0..n).map(|j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.5 * (j == i % n) as u8 as f64).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter_mut().for_each(|v| *v *= r / norm);
            d
        })
        .collect()
}

/// Max over samples of |(-Δ)^s U_{0,1} - U_{0,1}^p| / U_{0,1}^p.
pub fn bubble_pde_residual(
    params: &PhysicalParams,
    samples: &[Vec<f64>],
    spec: &PvQuadratureSpec,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Usage("bubble residual needs at least one sample".into()));
    }
    let b = Bubble::standard(params.n);
    let field = BubbleField { params, bubble: &b };
    let mut worst = 0.0f64;
    for y in samples {
        let lhs = frac_laplacian_pv(params, &field, y, spec)?.value;
        let rhs = bubble_eval(params, &b, y).powf(params.p);
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    Ok(worst)
}

/// G = (1 - η)Z*: the part of the bubble sum removed by the cutoff.
struct CutoffComplement<'a> {
    sol: &'a ApproxSolution,
}

impl Field for CutoffComplement<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        let eta = self.sol.eta(x);
        if eta == 1.0 {
            return 0.0;
        }
        (1.0 - eta) * self.sol.star_sum(x)
    }

    fn symmetry(&self) -> Symmetry {
        match &self.sol.cutoff {
            Some(c) if c.y0 == self.sol.config.y2_bar => {
                Symmetry::Transverse { center: c.y0.clone() }
            }
            _ => Symmetry::None,
        }
    }

    fn length_scale(&self) -> f64 {
        self.sol.cutoff.as_ref().map_or(1.0, |c| c.sigma)
    }
}

/// Cutoff commutator c_{N,s} P.V.∫ (η(y) - η(x)) Σ_j U_j(x) |x - y|^{-N-2s} dx.
///
/// Evaluated through (-Δ)^s(ηZ*) = η(-Δ)^sZ* + commutator and (-Δ)^sU_j = U_j^p:
/// the commutator equals (1 - η(y))ΣU_j(y)^p - (-Δ)^s[(1-η)Z*](y), and the
/// second term is a smooth field that vanishes near every bubble.
pub fn cutoff_commutator(
    sol: &ApproxSolution,
    y: &[f64],
    spec: &PvQuadratureSpec,
) -> Result<PvEstimate> {
    let params = &sol.params;
    if sol.cutoff.is_none() {
        return Ok(PvEstimate { value: 0.0, error: 0.0 });
    }
    let eta_y = sol.eta(y);
    let mut local = 0.0;
    if eta_y < 1.0 {
        let mut vals = Vec::new();
        sol.bubble_values(y, &mut vals);
        local = (1.0 - eta_y) * vals.iter().map(|u| u.powf(params.p)).sum::<f64>();
    }
    let g = CutoffComplement { sol };
    let nonlocal = frac_laplacian_pv(params, &g, y, spec)?;
    Ok(PvEstimate { value: local - nonlocal.value, error: nonlocal.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    #[test]
    fn direction_weights_cover_sphere() {
        for n in 5..=8 {
            let area = sphere_area(n - 1);
            let w: f64 = full_directions(n, 7).iter().map(|d| d.1).sum();
            assert!((w / area - 1.0).abs() < 1e-8, "n={n} {}", w / area);
            let wt: f64 = transverse_directions(n, 7).iter().map(|d| d.3).sum();
            assert!((wt / area - 1.0).abs() < 1e-8, "t n={n} {}", wt / area);
            for (d, _) in full_directions(n, 3) {
                let norm: f64 = d.iter().map(|v| v * v).sum();
                assert!((norm - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_is_annihilated() {
        let p = make_params(6, 0.9).unwrap();
        let f = FnField::new(|_: &[f64]| 3.7);
        let spec = PvQuadratureSpec { angular_nodes: 4, ..Default::default() };
        let v = frac_laplacian_pv(&p, &f, &[0.1, 0.2, 0.0, 0.0, -0.3, 0.0], &spec).unwrap();
        assert!(v.value.abs() < 1e-8);
    }

    #[test]
    fn bubble_identity_radial_route() {
        let p = make_params(6, 0.9).unwrap();
        let samples = vec![vec![0.0; 6], vec![0.3, 0.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 2.0, 1.0, 0.0, 0.0, 1.9]];
        let r = bubble_pde_residual(&p, &samples, &PvQuadratureSpec::radial_default()).unwrap();
        assert!(r < 1e-3, "residual {r}");
        let wrong = p.with_scaled_c_ns(2.0);
        let r2 = bubble_pde_residual(&wrong, &samples, &PvQuadratureSpec::radial_default()).unwrap();
        assert!((r2 - 1.0).abs() < 1e-2);
    }
}
