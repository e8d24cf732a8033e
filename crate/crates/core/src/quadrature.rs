//! Numerical integration rules: adaptive Gauss–Kronrod, Gauss–Legendre and
//! Gauss–Hermite (probabilists' normalization, `E[f(Z)]` for `Z ~ N(0, 1)`).

use crate::error::{Error, Result};
use std::f64::consts::PI;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
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

/// Absolute and relative error targets for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals.max(1);
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    /// The target, floored at the rounding level `50 ε ∫|f|` below which the
    /// Gauss–Kronrod error estimate carries no information.
    fn attainable(&self, value: f64, resabs: f64) -> f64 {
        self.target(value).max(50.0 * f64::EPSILON * resabs)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        let pair = lo + hi;
        kronrod += WGK[j] * pair;
        resabs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment {
        a,
        b,
        value,
        error,
        resabs: resabs * half.abs(),
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
    /// Estimate before the final refinement step.
    pub previous: f64,
}

/// Globally adaptive 15-point Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Integral {
    adaptive_from(&f, a, b, 1, tol)
}

/// As [`adaptive`], starting from `panels` equal subintervals.
pub fn adaptive_from<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
    tol: &Tolerance,
) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
            intervals: 0,
            converged: true,
            previous: 0.0,
        };
    }
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut segments: Vec<Segment> = (0..panels)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == panels { b } else { lo + width };
            kronrod15(f, lo, hi)
        })
        .collect();
    let limit = tol.max_intervals.max(panels + 1);
    let resum = |segments: &[Segment]| {
        let mut ordered = segments.to_vec();
        ordered.sort_by(|x, y| x.a.total_cmp(&y.a));
        (
            ordered.iter().map(|s| s.value).sum::<f64>(),
            ordered.iter().map(|s| s.error).sum::<f64>(),
            ordered.iter().map(|s| s.resabs).sum::<f64>(),
        )
    };
    let (mut value, mut error, mut resabs) = resum(&segments);
    let mut previous = value;
    let mut splittable = true;
    while splittable && error > tol.attainable(value, resabs) && segments.len() < limit {
        while error > tol.attainable(value, resabs) && segments.len() < limit {
            let (worst, _) = segments
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
                .expect("non-empty segment list");
            let seg = segments.swap_remove(worst);
            let mid = 0.5 * (seg.a + seg.b);
            if mid <= seg.a || mid >= seg.b {
                // interval cannot be split further in floating point
                segments.push(seg);
                splittable = false;
                break;
            }
            let left = kronrod15(f, seg.a, mid);
            let right = kronrod15(f, mid, seg.b);
            previous = value;
            value += left.value + right.value - seg.value;
            error += left.error + right.error - seg.error;
            resabs += left.resabs + right.resabs - seg.resabs;
            segments.push(left);
            segments.push(right);
        }
        // The incremental sums drift; decide convergence on exact re-sums.
        (value, error, resabs) = resum(&segments);
    }
    Integral {
        value,
        error,
        intervals: segments.len(),
        converged: error <= tol.attainable(value, resabs),
        previous,
    }
}

/// Integrate and fail with a diagnostic carrying the last two estimates when
/// the requested tolerance is not met.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<f64> {
    let res = adaptive(f, a, b, tol);
    check(res, tol)
}

pub(crate) fn check(res: Integral, tol: &Tolerance) -> Result<f64> {
    if res.converged {
        Ok(res.value)
    } else {
        Err(Error::Quadrature {
            previous: res.previous,
            current: res.value,
            delta: res.error,
            tolerance: tol.target(res.value),
        })
    }
}

/// Integrate over `[a, ∞)` via `x = a + u / (1 - u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: &Tolerance) -> Result<f64> {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - u;
        let x = a + u / one_minus;
        let v = f(x) / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Hermite rule normalized for the standard normal density:
/// `Σ wᵢ f(xᵢ) ≈ E[f(Z)]`, with `Σ wᵢ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        // Physicists' rule by Newton iteration on orthonormal Hermite functions.
        const PIM4: f64 = 0.751_125_544_464_942_5;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let nf = n as f64;
        let m = n.div_ceil(2);
        let mut z = 0.0;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..200 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let scale = 1.0 / PI.sqrt();
        let mut nodes: Vec<f64> = x.iter().map(|v| v * std::f64::consts::SQRT_2).collect();
        let mut weights: Vec<f64> = w.iter().map(|v| v * scale).collect();
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E[f(Z)]` for a standard normal `Z`.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }

    /// `E[f(Z)]` for a standard normal vector of dimension `dim`, by tensor product.
    pub fn expect_tensor<F: FnMut(&[f64]) -> f64>(&self, dim: usize, mut f: F) -> f64 {
        let n = self.len();
        let mut idx = vec![0usize; dim];
        let mut point = vec![0.0; dim];
        let mut total = 0.0;
        loop {
            let mut weight = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                point[k] = self.nodes[i];
                weight *= self.weights[i];
            }
            total += weight * f(&point);
            // odometer increment
            let mut k = 0;
            loop {
                if k == dim {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// `E[f(Z)]`, `Z ~ N(0, 1)`, by adaptive quadrature over `[-12, 12]`.
pub fn normal_expectation_adaptive<F: Fn(f64) -> f64>(f: F, tol: &Tolerance) -> Result<f64> {
    let g = |z: f64| f(z) * standard_normal_pdf(z);
    let res = adaptive_from(&g, -NORMAL_CUTOFF, NORMAL_CUTOFF, 4, tol);
    check(res, tol)
}

/// Truncation point for Gaussian integrals: `e^{-z²/2}` is below 1e-31 beyond it.
pub const NORMAL_CUTOFF: f64 = 12.0;

pub fn standard_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}
