//! Volume forms of the local Pohozaev identities and the concentration of
//! ∫ g u² on the bubble ring, with u = Z (the correction φ is dropped; it is
//! below the identities' own error budget).

use crate::bubble::ApproxSolution;
use crate::error::{Error, Result};
use crate::integrals::radial_bubble_integral;
use crate::mc::{mc_integrate, McEstimate, McSpec, MixtureProposal, ProposalKind};
use crate::potential::PotentialModel;
use serde::{Deserialize, Serialize};

/// The region {y : |(|y'|, y'') - (r0, y0'')| ≤ ρ}, a tube around the sphere
/// carrying the bubbles, with 2σ < ρ < 5σ so that it contains the support of
/// the cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub r0: f64,
    pub y0: Vec<f64>,
    pub rho: f64,
}

impl BallSpec {
    /// Centered on the cutoff anchor with ρ = factor·σ.
    pub fn for_solution(sol: &ApproxSolution, factor: f64) -> Result<Self> {
        let c = sol.cutoff.as_ref().ok_or_else(|| Error::Usage("ball needs a cutoff".into()))?;
        let b = BallSpec { r0: c.r0, y0: c.y0.clone(), rho: factor * c.sigma };
        b.validate(c.sigma)?;
        Ok(b)
    }

    pub fn validate(&self, sigma: f64) -> Result<()> {
        if !(self.rho > 2.0 * sigma && self.rho < 5.0 * sigma) {
            return Err(Error::Domain(format!("radius {} must lie in (2σ, 5σ) with σ = {sigma}", self.rho)));
        }
        Ok(())
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        let mut d2 = (r - self.r0) * (r - self.r0);
        for (v, c) in y[3..].iter().zip(&self.y0) {
            d2 += (v - c) * (v - c);
        }
        d2 <= self.rho * self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PohozaevMode {
    /// ∫(sV + ½⟨∇V, y⟩)u².
    Radial,
    /// ½∫ ∂V/∂y_i u², i a 0-based transverse index (3 ≤ i < N).
    Axis(usize),
}

/// ∫_{B_ρ} g(y) Z(y)² by importance sampling around every bubble.
fn weighted_mass<G>(sol: &ApproxSolution, ball: &BallSpec, spec: &McSpec, g: G) -> Result<McEstimate>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let n = sol.params.n;
    let pts = sol.points().to_vec();
    let even = vec![1.0; pts.len()];
    let prop = match spec.proposal {
        ProposalKind::BubbleRadial => {
            MixtureProposal::student(n, n as f64 - 4.0 * sol.params.s, sol.lambda, pts, even)?
        }
        ProposalKind::UniformBall => MixtureProposal::uniform_ball(n, 30.0, sol.lambda, pts, even)?,
    };
    mc_integrate(spec, &prop, |y| {
        if !ball.contains(y) {
            return 0.0;
        }
        let eta = sol.eta(y);
        if eta == 0.0 {
            return 0.0;
        }
        let z = eta * sol.star_sum(y);
        g(y) * z * z
    })
}

pub fn pohozaev_volume(
    sol: &ApproxSolution,
    potential: &PotentialModel,
    ball: &BallSpec,
    mode: PohozaevMode,
    spec: &McSpec,
) -> Result<McEstimate> {
    let n = sol.params.n;
    let s = sol.params.s;
    match mode {
        PohozaevMode::Radial => weighted_mass(sol, ball, spec, |y| {
            s * potential.at(y) + 0.5 * potential.radial_derivative_at(y)
        }),
        PohozaevMode::Axis(i) => {
            if !(3..n).contains(&i) {
                return Err(Error::Domain(format!("axis {i} is not a transverse coordinate")));
            }
            weighted_mass(sol, ball, spec, |y| 0.5 * potential.transverse_derivative_at(y, i))
        }
    }
}

/// λ^{2s}·estimate/k, the quantity that stays O(1) along the regime.
pub fn normalized(sol: &ApproxSolution, e: &McEstimate) -> f64 {
    sol.lambda.powf(2.0 * sol.params.s) * e.estimate / sol.config.k as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub estimate: McEstimate,
    /// 2k λ^{-2s} g(r̄, ȳ'') ∫U².
    pub target: f64,
    pub relative_error: f64,
}

/// ∫_{B_ρ} g(|y'|, y'') u² against its concentration limit.
pub fn concentration_integral<G>(sol: &ApproxSolution, g: G, ball: &BallSpec, spec: &McSpec) -> Result<Concentration>
where
    G: Fn(f64, &[f64]) -> f64 + Sync,
{
    let p = &sol.params;
    let cfg = &sol.config;
    let target = 2.0 * cfg.k as f64 * sol.lambda.powf(-2.0 * p.s) * g(cfg.r_bar, &cfg.y2_bar) * radial_bubble_integral(p, 2.0)?;
    let estimate = weighted_mass(sol, ball, spec, |y| {
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        g(r, &y[3..])
    })?;
    let relative_error = if target == 0.0 {
        if estimate.estimate == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        ((estimate.estimate - target) / target).abs()
    };
    Ok(Concentration { estimate, target, relative_error })
}
