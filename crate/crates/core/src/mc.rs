//! Seeded, sharded importance sampling.
//!
//! Proposals are mixtures of heavy-tailed radial kernels centred at bubble
//! centres. Each draw is paired with its reflection through the chosen
//! centre (antithetic pair); pair averages are the i.i.d. units whose sample
//! variance gives the standard error. Shards draw from independent ChaCha8
//! streams seeded by a hash of (seed, shard index) and are merged in index
//! order, so results do not depend on how shards are scheduled.

use crate::error::{Error, Result};
use crate::special::gamma;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProposalKind {
    /// Mixture of radial kernels (1+|z|²)^{-(N+ν)/2} at the bubble centres.
    #[default]
    BubbleRadial,
    /// Uniform draws in a ball around the primary centre. The integral is
    /// truncated to that ball; intended for comparisons only.
    UniformBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub n_samples: u64,
    pub seed: u64,
    pub shards: usize,
    #[serde(default)]
    pub proposal: ProposalKind,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec { n_samples: 1_000_000, seed: 20_240_901, shards: 16, proposal: ProposalKind::BubbleRadial }
    }
}

impl McSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(Error::Usage(format!("n_samples must be >= 1000, got {}", self.n_samples)));
        }
        if self.shards == 0 || self.shards as u64 > self.n_samples / 2 {
            return Err(Error::Usage(format!("shards must lie in 1..=n_samples/2, got {}", self.shards)));
        }
        Ok(())
    }

    /// Same settings with a seed derived from this one and a stream label.
    pub fn derived(&self, label: u64) -> Self {
        McSpec { seed: mix64(self.seed ^ mix64(label.wrapping_add(0x5851_f42d_4c95_7f2d))), ..*self }
    }

    pub fn with_samples(&self, n_samples: u64) -> Self {
        McSpec { n_samples, ..*self }
    }
}

/// Estimate with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

impl McEstimate {
    pub fn zero(n_samples: u64) -> Self {
        McEstimate { estimate: 0.0, stderr: 0.0, n_samples }
    }

    /// Linear combination of independent estimates.
    pub fn combine(terms: &[(f64, McEstimate)]) -> Self {
        let estimate = terms.iter().map(|(c, e)| c * e.estimate).sum();
        let var: f64 = terms.iter().map(|(c, e)| (c * e.stderr).powi(2)).sum();
        let n_samples = terms.iter().map(|(_, e)| e.n_samples).sum();
        McEstimate { estimate, stderr: var.sqrt(), n_samples }
    }
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn shard_seed(seed: u64, shard: usize) -> u64 {
    mix64(seed ^ mix64(shard as u64 + 1))
}

#[derive(Debug, Clone)]
enum Kernel {
    Student { nu: f64, norm: f64, gamma: Gamma<f64> },
    Ball { radius: f64, norm: f64 },
}

/// Mixture of equal-scale radial kernels x = c + z/scale.
#[derive(Debug, Clone)]
pub struct MixtureProposal {
    dim: usize,
    scale: f64,
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    kernel: Kernel,
}

impl MixtureProposal {
    /// Kernel ∝ (1+|z|²)^{-(N+ν)/2}, sampled exactly as g/√W with g standard
    /// normal in R^N and W ~ χ²_ν.
    pub fn student(dim: usize, nu: f64, scale: f64, centers: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Domain(format!("kernel tail index must be positive, got {nu}")));
        }
        let nf = dim as f64;
        let norm = gamma(0.5 * (nf + nu))? / (PI.powf(0.5 * nf) * gamma(0.5 * nu)?);
        let gamma = Gamma::new(0.5 * nu, 2.0).map_err(|e| Error::Numeric(e.to_string()))?;
        Self::build(dim, scale, centers, weights, Kernel::Student { nu, norm, gamma })
    }

    /// Uniform in a ball of the given radius (in local units) around each centre.
    pub fn uniform_ball(dim: usize, radius: f64, scale: f64, centers: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let nf = dim as f64;
        let vol = PI.powf(0.5 * nf) / gamma(0.5 * nf + 1.0)? * radius.powf(nf);
        Self::build(dim, scale, centers, weights, Kernel::Ball { radius, norm: 1.0 / vol })
    }

    fn build(dim: usize, scale: f64, centers: Vec<Vec<f64>>, weights: Vec<f64>, kernel: Kernel) -> Result<Self> {
        if centers.is_empty() || centers.len() != weights.len() {
            return Err(Error::Usage("mixture needs matching non-empty centres and weights".into()));
        }
        if centers.iter().any(|c| c.len() != dim) {
            return Err(Error::Usage("mixture centre of wrong dimension".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Numeric(format!("degenerate proposal scale {scale}")));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::Usage("mixture weights must be non-negative with positive sum".into()));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(MixtureProposal { dim, scale, centers, weights, cumulative, kernel })
    }

    fn kernel_density(&self, r2: f64) -> f64 {
        match &self.kernel {
            Kernel::Student { nu, norm, .. } => norm * (1.0 + r2).powf(-0.5 * (self.dim as f64 + nu)),
            Kernel::Ball { radius, norm } => {
                if r2 <= radius * radius {
                    *norm
                } else {
                    0.0
                }
            }
        }
    }

    /// Proposal density at x.
    pub fn density(&self, x: &[f64]) -> f64 {
        let l2 = self.scale * self.scale;
        let mut q = 0.0;
        for (c, w) in self.centers.iter().zip(&self.weights) {
            let d2: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            q += w * self.kernel_density(l2 * d2);
        }
        q * self.scale.powi(self.dim as i32)
    }

    fn draw<R: Rng>(&self, rng: &mut R, z: &mut [f64]) -> usize {
        let u: f64 = rng.random();
        let comp = self.cumulative.partition_point(|c| *c < u).min(self.centers.len() - 1);
        match &self.kernel {
            Kernel::Student { gamma, .. } => {
                let w: f64 = gamma.sample(rng);
                let inv = 1.0 / w.sqrt();
                for v in z.iter_mut() {
                    let g: f64 = StandardNormal.sample(rng);
                    *v = g * inv;
                }
            }
            Kernel::Ball { radius, .. } => loop {
                let mut r2 = 0.0;
                for v in z.iter_mut() {
                    *v = (2.0 * rng.random::<f64>() - 1.0) * radius;
                    r2 += *v * *v;
                }
                if r2 <= radius * radius {
                    break;
                }
            },
        }
        comp
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }
}

/// ∫ f(x) dx ≈ mean of ½(f(x)/q(x) + f(x̃)/q(x̃)) over antithetic pairs.
pub fn mc_integrate<F>(spec: &McSpec, proposal: &MixtureProposal, f: F) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    let pairs = spec.n_samples / 2;
    let shards = spec.shards as u64;
    let per = pairs / shards;
    let extra = pairs % shards;
    let dim = proposal.dim;
    let results: Vec<Result<Moments>> = (0..spec.shards)
        .into_par_iter()
        .map(|i| {
            let count = per + u64::from((i as u64) < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(shard_seed(spec.seed, i));
            let mut z = vec![0.0; dim];
            let mut x = vec![0.0; dim];
            let mut m = Moments::default();
            let inv = 1.0 / proposal.scale;
            for _ in 0..count {
                let c = &proposal.centers[proposal.draw(&mut rng, &mut z)];
                let mut acc = 0.0;
                for sign in [1.0, -1.0] {
                    for j in 0..dim {
                        x[j] = c[j] + sign * z[j] * inv;
                    }
                    let q = proposal.density(&x);
                    let v = f(&x);
                    if v != 0.0 {
                        if !(q > 0.0) {
                            return Err(Error::Numeric("proposal density vanished at a sample".into()));
                        }
                        acc += v / q;
                    }
                }
                let val = 0.5 * acc;
                if !val.is_finite() {
                    return Err(Error::Numeric("non-finite importance weight".into()));
                }
                m.push(val);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for r in results {
        total = total.merge(r?);
    }
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    Ok(McEstimate {
        estimate: total.mean,
        stderr: (var / total.n as f64).sqrt(),
        n_samples: 2 * total.n,
    })
}
