//! One-dimensional quadrature: Gauss–Legendre rules and a globally adaptive
//! Gauss–Kronrod (7/15) integrator.

use crate::error::{Error, Result};

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (c + h * x, h * w))
            .collect()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule on [-1, 1] for the weight (1-x)^α (1+x)^β, α, β > -1,
/// from the eigen-decomposition of the Jacobi matrix (Golub–Welsch).
pub fn gauss_jacobi(m: usize, alpha: f64, beta: f64) -> Result<Vec<(f64, f64)>> {
    if m == 0 || !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!(
            "Gauss-Jacobi needs m >= 1 and α, β > -1, got ({m}, {alpha}, {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut jm = nalgebra::DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        jm[(k, k)] = if denom.abs() < 1e-300 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / denom
        };
        if k >= 1 {
            let t = 2.0 * kf + ab;
            let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
            let den = t * t * (t + 1.0) * (t - 1.0);
            let b = if k == 1 && (ab + 1.0).abs() < 1e-14 {
                // limit of the general formula when α + β = -1
                (4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt()
            } else {
                (num / den).sqrt()
            };
            jm[(k, k - 1)] = b;
            jm[(k - 1, k)] = b;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * crate::special::gamma(alpha + 1.0)?
        * crate::special::gamma(beta + 1.0)?
        / crate::special::gamma(ab + 2.0)?;
    let eig = nalgebra::SymmetricEigen::new(jm);
    let mut rule: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(rule)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let val = kron * h;
    let err = ((kron - gauss) * h).abs();
    (val, err)
}

/// Result of an adaptive integration: value and error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod integration of f over [a, b].
///
/// Bisects the interval with the largest error estimate until
/// error <= max(abs_tol, rel_tol * |value|) or the interval budget runs out.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Accuracy {
                context: format!("adaptive quadrature on [{a}, {b}]"),
                coarse: total - err,
                fine: total,
            });
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.3 > acc.1 {
                    (i, p.3)
                } else {
                    acc
                }
            });
        let (l, r, pv, pe) = parts.swap_remove(idx);
        let m = 0.5 * (l + r);
        let (v1, e1) = gk15(&mut f, l, m);
        let (v2, e2) = gk15(&mut f, m, r);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        parts.push((l, m, v1, e1));
        parts.push((m, r, v2, e2));
        if !total.is_finite() {
            return Err(Error::Numeric("non-finite integrand value".into()));
        }
    }
    // re-sum to remove drift from incremental updates
    let value: f64 = parts.iter().map(|p| p.2).sum();
    let error: f64 = parts.iter().map(|p| p.3).sum();
    Ok(QuadResult { value, error })
}

/// Adaptive integration of f over [a, ∞) through x = a + t/(1 - t).
pub fn adaptive_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    adaptive(
        |t| {
            let u = 1.0 - t;
            f(a + t / u) / (u * u)
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 33, 96] {
            let g = GaussLegendre::new(n);
            let wsum: f64 = g.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let v = g.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - exact).abs() < 1e-13, "n={n}");
            let v2 = g.integrate(0.0, 1.0, |x| x.powi(2 * (n as i32) - 2));
            assert!((v2 - 1.0 / (2.0 * n as f64 - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn gauss_jacobi_moments() {
        // ∫(1-x)^α(1+x)^β x^j for small j against Beta-function closed forms
        let (a, b) = (1.5, 0.5);
        let rule = gauss_jacobi(6, a, b).unwrap();
        let mu0: f64 = rule.iter().map(|r| r.1).sum();
        let exact0 = 2f64.powf(a + b + 1.0) * crate::special::beta(a + 1.0, b + 1.0).unwrap();
        assert!((mu0 / exact0 - 1.0).abs() < 1e-13);
        // first moment: μ0 (β - α)/(α + β + 2)
        let m1: f64 = rule.iter().map(|r| r.0 * r.1).sum();
        assert!((m1 - exact0 * (b - a) / (a + b + 2.0)).abs() < 1e-13);
        // Legendre case reproduces Gauss-Legendre
        let gl = GaussLegendre::new(7);
        let gj = gauss_jacobi(7, 0.0, 0.0).unwrap();
        for (i, (x, w)) in gj.iter().enumerate() {
            assert!((x - gl.nodes[i]).abs() < 1e-13 && (w - gl.weights[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = adaptive(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_arctan() {
        let r = adaptive_semi_infinite(|x| 1.0 / (1.0 + x * x), 0.0, 1e-14, 1e-13).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
