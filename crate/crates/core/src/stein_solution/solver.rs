use super::function::{composed_partial, SmoothFunction};
use super::{CovarianceSpec, InnerRule, QuadratureConfig};
use crate::error::{Error, Result};
use crate::quadrature::{self, adaptive_from, GaussHermite, Tolerance, NORMAL_CUTOFF};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::cell::RefCell;

/// Upper limit of `s` in the substitution `t = e^{-s}`.
const S_MAX: f64 = 40.0;
const MAX_DIM: usize = 4;

/// Inner Gaussian expectations `E k(a + b Σ^{1/2} Z)` with failure capture,
/// so that closures handed to the outer integrator can stay infallible.
struct Engine {
    dim: usize,
    root: DMatrix<f64>,
    /// Tensor rule and its cross-check rule with a quarter more nodes.
    gh: Option<(GaussHermite, GaussHermite)>,
    gh_tol: Tolerance,
    inner_tol: Tolerance,
    outer_tol: Tolerance,
    failure: RefCell<Option<Error>>,
}

impl Engine {
    fn new(sigma: &CovarianceSpec, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let dim = sigma.dim();
        if dim > MAX_DIM {
            return Err(Error::Unsupported(format!(
                "dimension {dim} exceeds the tensor quadrature limit of {MAX_DIM}"
            )));
        }
        let use_gh = match cfg.inner {
            InnerRule::Auto => dim > 1,
            InnerRule::GaussHermite => true,
            InnerRule::Adaptive => false,
        };
        Ok(Self {
            dim,
            root: sigma.sqrt(),
            gh: use_gh.then(|| {
                let n = cfg.gauss_hermite_nodes;
                (GaussHermite::new(n), GaussHermite::new(n + n / 4))
            }),
            gh_tol: Tolerance::new(cfg.tolerance, cfg.tolerance),
            inner_tol: Tolerance::new(1e-6 * cfg.tolerance, 1e-4 * cfg.tolerance)
                .with_max_intervals(1000),
            outer_tol: Tolerance::new(1e-4 * cfg.tolerance, 1e-2 * cfg.tolerance)
                .with_max_intervals(cfg.t_panels),
            failure: RefCell::new(None),
        })
    }

    fn record(&self, e: Error) {
        let mut slot = self.failure.borrow_mut();
        if slot.is_none() {
            *slot = Some(e);
        }
    }

    fn take_failure(&self) -> Result<()> {
        match self.failure.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// `E k(a + b Σ^{1/2} Z)`.
    fn expect(&self, a: &[f64], b: f64, k: &dyn Fn(&[f64]) -> Result<f64>) -> f64 {
        let eval = |x: &[f64]| match k(x) {
            Ok(v) => v,
            Err(e) => {
                self.record(e);
                f64::NAN
            }
        };
        if let Some((coarse_rule, fine_rule)) = &self.gh {
            let tensor = |rule: &GaussHermite| {
                let mut point = vec![0.0; self.dim];
                rule.expect_tensor(self.dim, |z| {
                    for (i, p) in point.iter_mut().enumerate() {
                        let mut acc = a[i];
                        for (j, zj) in z.iter().enumerate() {
                            acc += b * self.root[(i, j)] * zj;
                        }
                        *p = acc;
                    }
                    eval(&point)
                })
            };
            // The finer value is returned; the difference bounds the coarser error.
            let (coarse, value) = (tensor(coarse_rule), tensor(fine_rule));
            let tolerance = self.gh_tol.abs.max(self.gh_tol.rel * value.abs());
            if (value - coarse).abs() > tolerance {
                self.record(Error::Quadrature {
                    previous: coarse,
                    current: value,
                    delta: (value - coarse).abs(),
                    tolerance,
                });
            }
            return value;
        }
        if b == 0.0 {
            return eval(a);
        }
        self.iterated(a, b, &[], &eval)
    }

    /// Iterated adaptive integration over `z_1, …, z_d`, innermost last.
    fn iterated(&self, a: &[f64], b: f64, prefix: &[f64], eval: &dyn Fn(&[f64]) -> f64) -> f64 {
        let level = prefix.len();
        let integrand = |z: f64| {
            let mut zs = prefix.to_vec();
            zs.push(z);
            let inner = if level + 1 == self.dim {
                let point: Vec<f64> = (0..self.dim)
                    .map(|i| a[i] + b * (0..self.dim).map(|j| self.root[(i, j)] * zs[j]).sum::<f64>())
                    .collect();
                eval(&point)
            } else {
                self.iterated(a, b, &zs, eval)
            };
            inner * quadrature::standard_normal_pdf(z)
        };
        // Outer levels integrate the noise of the inner ones: loosen by 10 per level.
        let loosen = 10f64.powi((self.dim - 1 - level) as i32);
        let tol = Tolerance::new(self.inner_tol.abs * loosen, self.inner_tol.rel * loosen)
            .with_max_intervals(self.inner_tol.max_intervals);
        let res = adaptive_from(&integrand, -NORMAL_CUTOFF, NORMAL_CUTOFF, 4, &tol);
        if !res.converged {
            self.record(Error::Quadrature {
                previous: res.previous,
                current: res.value,
                delta: res.error,
                tolerance: tol.abs.max(tol.rel * res.value.abs()),
            });
        }
        res.value
    }

    fn outer(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> Result<f64> {
        let res = adaptive_from(&f, a, b, panels, &self.outer_tol);
        self.take_failure()?;
        let v = quadrature::check(res, &self.outer_tol)?;
        if !v.is_finite() {
            return Err(Error::Invalid("non-finite value in Stein solution integrand".into()));
        }
        Ok(v)
    }
}

fn check_shapes(h: &SmoothFunction, g: &SmoothFunction, sigma: &CovarianceSpec, w: &[f64]) -> Result<()> {
    if h.dim() != 1 {
        return Err(Error::Invalid("h must be one-dimensional".into()));
    }
    if g.dim() != sigma.dim() || w.len() != g.dim() {
        return Err(Error::Invalid(format!(
            "dimension mismatch: g has {}, covariance {}, point {}",
            g.dim(),
            sigma.dim(),
            w.len()
        )));
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("evaluation point must be finite, got {w:?}")));
    }
    Ok(())
}

fn shifted(w: &[f64], t: f64) -> Vec<f64> {
    w.iter().map(|x| t * x).collect()
}

/// `f_h(w) = −∫₀¹ t^{-1}{E h(g(tw + √(1−t²)Σ^{1/2}Z)) − E h(g(Σ^{1/2}Z))} dt`,
/// integrated in `s = −ln t` over `[0, 40]`.
pub fn solve_f(
    h: &SmoothFunction,
    g: &SmoothFunction,
    sigma: &CovarianceSpec,
    w: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_shapes(h, g, sigma, w)?;
    let engine = Engine::new(sigma, cfg)?;
    let k = |x: &[f64]| Ok(h.value1(g.value(x)));
    let zero = vec![0.0; w.len()];
    let centre = engine.expect(&zero, 1.0, &k);
    engine.take_failure()?;
    let integrand = |s: f64| {
        let t = (-s).exp();
        let b = (1.0 - t * t).max(0.0).sqrt();
        engine.expect(&shifted(w, t), b, &k) - centre
    };
    Ok(-engine.outer(integrand, 0.0, S_MAX, 8)?)
}

/// `∂ⁿf_h/∂w_{i_1}…∂w_{i_n} = −∫₀¹ t^{n−1} E[∂ⁿ(h∘g)(tw + √(1−t²)Σ^{1/2}Z)] dt`.
pub fn f_derivative(
    h: &SmoothFunction,
    g: &SmoothFunction,
    sigma: &CovarianceSpec,
    w: &[f64],
    indices: &[usize],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_shapes(h, g, sigma, w)?;
    if indices.is_empty() {
        return solve_f(h, g, sigma, w, cfg);
    }
    if let Some(i) = indices.iter().find(|i| **i >= w.len()) {
        return Err(Error::Invalid(format!("derivative index {i} out of range")));
    }
    // Surface missing derivatives before integrating.
    composed_partial(h, g, indices, w)?;
    let engine = Engine::new(sigma, cfg)?;
    let n = indices.len() as i32;
    let k = |x: &[f64]| composed_partial(h, g, indices, x);
    let integrand = |t: f64| {
        let b = (1.0 - t * t).max(0.0).sqrt();
        t.powi(n - 1) * engine.expect(&shifted(w, t), b, &k)
    };
    Ok(-engine.outer(integrand, 0.0, 1.0, 4)?)
}

/// `ψ_m^{(n)}(w)` for `d = 1`, `Σ = 1`, where `ψ_m` solves
/// `ψ'' − wψ' = f_h^{(m)}(w) − E f_h^{(m)}(Z)`.
///
/// The double integral `∫∫ t^{m+n−1} s^{n−1} E k^{(m+n)}(stw + √(1−s²t²)Z) ds dt`
/// collapses under `u = st` to
/// `(1/m) ∫₀¹ u^{n−1}(1 − u^m) E k^{(m+n)}(uw + √(1−u²)Z) du`.
pub fn psi_derivative(
    h: &SmoothFunction,
    g: &SmoothFunction,
    m: usize,
    w: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Invalid(format!("psi derivative needs m, n >= 1, got m = {m}, n = {n}")));
    }
    let sigma = CovarianceSpec::identity(1);
    check_shapes(h, g, &sigma, &[w])?;
    let order = vec![0usize; m + n];
    composed_partial(h, g, &order, &[w])?;
    let engine = Engine::new(&sigma, cfg)?;
    let k = |x: &[f64]| composed_partial(h, g, &order, x);
    let (mi, ni) = (m as i32, n as i32);
    let integrand = |u: f64| {
        let b = (1.0 - u * u).max(0.0).sqrt();
        u.powi(ni - 1) * (1.0 - u.powi(mi)) * engine.expect(&[u * w], b, &k)
    };
    Ok(engine.outer(integrand, 0.0, 1.0, 4)? / m as f64)
}

/// Maximum over the grid of `|∇ᵀΣ∇f − wᵀ∇f − h(g(w)) + E h(g(Σ^{1/2}Z))|`.
pub fn stein_residual(
    h: &SmoothFunction,
    g: &SmoothFunction,
    sigma: &CovarianceSpec,
    grid: &[Vec<f64>],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let d = sigma.dim();
    let zero = vec![0.0; d];
    check_shapes(h, g, sigma, &zero)?;
    let engine = Engine::new(sigma, cfg)?;
    let centre = engine.expect(&zero, 1.0, &|x: &[f64]| Ok(h.value1(g.value(x))));
    engine.take_failure()?;
    let cov = sigma.matrix();
    let residuals: Vec<Result<f64>> = grid
        .par_iter()
        .map(|w| {
            let mut lap = 0.0;
            for i in 0..d {
                for j in i..d {
                    let s = cov[(i, j)];
                    if s != 0.0 {
                        let mult = if i == j { 1.0 } else { 2.0 };
                        lap += mult * s * f_derivative(h, g, sigma, w, &[i, j], cfg)?;
                    }
                }
            }
            let mut drift = 0.0;
            for (i, wi) in w.iter().enumerate() {
                if *wi != 0.0 {
                    drift += wi * f_derivative(h, g, sigma, w, &[i], cfg)?;
                }
            }
            Ok((lap - drift - h.value1(g.value(w)) + centre).abs())
        })
        .collect();
    let mut max = 0.0f64;
    for r in residuals {
        max = max.max(r?);
    }
    Ok(max)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PsiResidual {
    pub max_residual: f64,
    pub argmax: f64,
    /// `E f_h^{(m)}(Z) = −E k^{(m)}(Z)/m`.
    pub centering: f64,
    /// Whether the uncentered equation (no `E f^{(m)}(Z)` term) would also hold.
    pub centered: bool,
}

/// Residual of `ψ'' − wψ' = f^{(m)}(w) − E f^{(m)}(Z)` on a one-dimensional grid.
pub fn psi_residual(
    h: &SmoothFunction,
    g: &SmoothFunction,
    m: usize,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<PsiResidual> {
    let sigma = CovarianceSpec::identity(1);
    let engine = Engine::new(&sigma, cfg)?;
    let order = vec![0usize; m];
    let mean_k = engine.expect(&[0.0], 1.0, &|x: &[f64]| composed_partial(h, g, &order, x));
    engine.take_failure()?;
    let centering = -mean_k / m as f64;
    let rows: Vec<Result<(f64, f64)>> = grid
        .par_iter()
        .map(|&w| {
            let d1 = psi_derivative(h, g, m, w, 1, cfg)?;
            let d2 = psi_derivative(h, g, m, w, 2, cfg)?;
            let fm = f_derivative(h, g, &sigma, &[w], &order, cfg)?;
            Ok(((d2 - w * d1 - (fm - centering)).abs(), w))
        })
        .collect();
    let mut best = (0.0f64, f64::NAN);
    for r in rows {
        let (v, w) = r?;
        if !(v <= best.0) {
            best = (v, w);
        }
    }
    Ok(PsiResidual {
        max_residual: best.0,
        argmax: best.1,
        centering,
        centered: centering.abs() <= 10.0 * cfg.tolerance,
    })
}

/// `|f^{(n)}(w)| / |w|^{q−n}` for `g(w) = |w|^q`, used to compare the
/// solution's polynomial growth with its asymptotic constant.
pub fn growth_ratio(
    h: &SmoothFunction,
    g: &SmoothFunction,
    q: f64,
    n: usize,
    w: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if w == 0.0 {
        return Err(Error::Invalid("growth ratio needs w != 0".into()));
    }
    let v = f_derivative(h, g, &CovarianceSpec::identity(1), &[w], &vec![0; n], cfg)?;
    Ok(v.abs() / w.abs().powf(q - n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stein_solution::function::Parity;
    use approx::assert_relative_eq;

    fn monomial(q: i32) -> SmoothFunction {
        SmoothFunction::univariate(
            format!("w^{q}"),
            move |x| x.powi(q),
            move |k, x| {
                let k = k as i32;
                if k > q {
                    return 0.0;
                }
                let c: f64 = ((q - k + 1)..=q).map(f64::from).product();
                c * x.powi(q - k)
            },
            64,
        )
    }

    fn sin() -> SmoothFunction {
        SmoothFunction::univariate(
            "sin",
            f64::sin,
            |k, x| match k % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            },
            64,
        )
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn closed_form_solutions() {
        let id = SmoothFunction::identity();
        let s1 = CovarianceSpec::identity(1);
        for w in [-2.0, -0.3, 0.0, 1.7] {
            let f = solve_f(&id, &monomial(1), &s1, &[w], &cfg()).unwrap();
            assert_relative_eq!(f, -w, epsilon = 1e-9);
            let f = solve_f(&id, &monomial(2), &s1, &[w], &cfg()).unwrap();
            assert_relative_eq!(f, -(w * w - 1.0) / 2.0, epsilon = 1e-9);
            let d = f_derivative(&id, &monomial(2), &s1, &[w], &[0, 0], &cfg()).unwrap();
            assert_relative_eq!(d, -1.0, epsilon = 1e-10);
            let d = f_derivative(&id, &monomial(1), &s1, &[w], &[0], &cfg()).unwrap();
            assert_relative_eq!(d, -1.0, epsilon = 1e-10);
        }
        let constant = SmoothFunction::univariate("c", |_| 3.0, |_, _| 0.0, 8);
        assert_eq!(solve_f(&constant, &monomial(2), &s1, &[1.0], &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences_of_solution() {
        let s1 = CovarianceSpec::identity(1);
        let (h, g) = (sin(), monomial(1));
        let w = 0.8;
        let step = 1e-3;
        let f = |x: f64| solve_f(&h, &g, &s1, &[x], &cfg()).unwrap();
        let fd1 = (f(w + step) - f(w - step)) / (2.0 * step);
        let fd2 = (f(w + step) - 2.0 * f(w) + f(w - step)) / (step * step);
        let d1 = f_derivative(&h, &g, &s1, &[w], &[0], &cfg()).unwrap();
        let d2 = f_derivative(&h, &g, &s1, &[w], &[0, 0], &cfg()).unwrap();
        assert!((d1 - fd1).abs() <= 1e-4f64.max(1e-3 * d1.abs()));
        assert!((d2 - fd2).abs() <= 1e-4f64.max(1e-3 * d2.abs()));
        // g(w) = w⁴, h = id at w = 0: f''(0) = −∫ t E[12 (√(1−t²)Z)²] dt = −3.
        let id = SmoothFunction::identity();
        let d = f_derivative(&id, &monomial(4), &s1, &[0.0], &[0, 0], &cfg()).unwrap();
        let f4 = |x: f64| solve_f(&id, &monomial(4), &s1, &[x], &cfg()).unwrap();
        let fd = (f4(step) - 2.0 * f4(0.0) + f4(-step)) / (step * step);
        assert_relative_eq!(d, -3.0, epsilon = 1e-9);
        assert!((d - fd).abs() <= 1e-3 * d.abs());
    }

    #[test]
    fn sine_residual_and_parity() {
        let s1 = CovarianceSpec::identity(1);
        let grid: Vec<Vec<f64>> = (-6..=6).map(|i| vec![i as f64 * 0.5]).collect();
        let r = stein_residual(&sin(), &monomial(1), &s1, &grid, &cfg()).unwrap();
        assert!(r <= 1e-6, "residual {r}");
        let cos = SmoothFunction::univariate("cos", f64::cos, |k, x| match k % 4 {
            0 => x.cos(),
            1 => -x.sin(),
            2 => -x.cos(),
            _ => x.sin(),
        }, 64);
        let g = monomial(2).with_parity(Parity::Even);
        for w in [0.4, 1.3, 2.9] {
            let a = solve_f(&cos, &g, &s1, &[w], &cfg()).unwrap();
            let b = solve_f(&cos, &g, &s1, &[-w], &cfg()).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn scaled_variance() {
        // d = 1, Σ = 4, g = w², h = id: 4f'' − wf' = w² − 4 has f = −w²/2.
        let s = CovarianceSpec::diagonal(vec![4.0]).unwrap();
        let id = SmoothFunction::identity();
        let f = solve_f(&id, &monomial(2), &s, &[1.5], &cfg()).unwrap();
        let f0 = solve_f(&id, &monomial(2), &s, &[0.0], &cfg()).unwrap();
        assert_relative_eq!(f - f0, -1.125, epsilon = 1e-8);
        let r = stein_residual(&id, &monomial(2), &s, &[vec![0.5], vec![2.0]], &cfg()).unwrap();
        assert!(r <= 1e-7);
    }

    #[test]
    fn tensor_cross_check_flags_oscillation() {
        let sigma = CovarianceSpec::general(vec![vec![1.0, 0.3], vec![0.3, 2.0]]).unwrap();
        let g = crate::battery::quadratic2d();
        let cos = crate::battery::lookup_h("cos").unwrap();
        let r = solve_f(&cos, &g, &sigma, &[1.0, 0.75], &cfg());
        assert!(matches!(r, Err(Error::Quadrature { .. })), "{r:?}");
    }

    #[test]
    fn iterated_adaptive_in_two_dimensions() {
        // |w|² with h = id solves tr(Σ∇²f) − w·∇f = |w|² − tr Σ via f = −|w|²/2.
        let sigma = CovarianceSpec::general(vec![vec![1.0, 0.3], vec![0.3, 2.0]]).unwrap();
        let g = crate::battery::quadratic2d();
        let id = SmoothFunction::identity();
        let cfg = QuadratureConfig { inner: InnerRule::Adaptive, tolerance: 1e-6, ..cfg() };
        let f0 = solve_f(&id, &g, &sigma, &[0.0, 0.0], &cfg).unwrap();
        let f = solve_f(&id, &g, &sigma, &[1.0, -0.5], &cfg).unwrap();
        assert_relative_eq!(f - f0, -0.625, epsilon = 1e-6);
        let d = f_derivative(&id, &g, &sigma, &[1.0, -0.5], &[1], &cfg).unwrap();
        assert_relative_eq!(d, 0.5, epsilon = 1e-6);
    }

    fn psi_nested(h: &SmoothFunction, g: &SmoothFunction, m: usize, w: f64, n: usize) -> f64 {
        // Direct double integral over (s, t), independent of the u = st collapse.
        let order = vec![0usize; m + n];
        let tol = Tolerance::new(1e-11, 1e-9);
        let inner_tol = Tolerance::new(1e-13, 1e-11);
        quadrature::integrate(
            |t: f64| {
                quadrature::integrate(
                    |s: f64| {
                        let u = s * t;
                        let b = (1.0 - u * u).max(0.0).sqrt();
                        let e = quadrature::normal_expectation_adaptive(
                            |z| composed_partial(h, g, &order, &[u * w + b * z]).unwrap(),
                            &inner_tol,
                        )
                        .unwrap();
                        t.powi((m + n) as i32 - 1) * s.powi(n as i32 - 1) * e
                    },
                    0.0,
                    1.0,
                    &tol,
                )
                .unwrap()
            },
            0.0,
            1.0,
            &tol,
        )
        .unwrap()
    }

    #[test]
    fn psi_collapse_matches_nested_integral() {
        let (h, g) = (sin(), monomial(2));
        for (m, n, w) in [(1, 1, 0.7), (2, 1, -0.4), (1, 2, 1.1)] {
            let a = psi_derivative(&h, &g, m, w, n, &cfg()).unwrap();
            let b = psi_nested(&h, &g, m, w, n);
            assert_relative_eq!(a, b, epsilon = 1e-8, max_relative = 1e-7);
        }
    }

    #[test]
    fn psi_trivial_and_residual() {
        let id = SmoothFunction::identity();
        let v = psi_derivative(&id, &monomial(2), 2, 0.5, 1, &cfg()).unwrap();
        assert_eq!(v, 0.0);
        // k = w³, m = 1: ψ = w²/2.
        let v = psi_derivative(&id, &monomial(3), 1, 0.8, 1, &cfg()).unwrap();
        assert_relative_eq!(v, 0.8, epsilon = 1e-10);
        let r = psi_residual(&id, &monomial(4), 3, &[0.5, -1.0, 2.0], &cfg()).unwrap();
        assert!(r.max_residual <= 1e-6, "{r:?}");
        assert!(r.centered);
        let r = psi_residual(&sin(), &monomial(2), 1, &[0.5, -1.0], &cfg()).unwrap();
        assert!(r.max_residual <= 1e-6, "{r:?}");
    }

    #[test]
    fn missing_derivative_is_reported() {
        let g = SmoothFunction::univariate("sq", |x| x * x, |k, x| if k == 1 { 2.0 * x } else { 2.0 }, 2);
        let e = f_derivative(&SmoothFunction::identity(), &g, &CovarianceSpec::identity(1), &[0.0], &[0, 0, 0], &cfg());
        assert!(matches!(e, Err(Error::MissingDerivative { .. })));
    }

    #[test]
    fn two_dimensional_residual() {
        let g = SmoothFunction::multivariate(
            "norm2",
            2,
            |w| w[0] * w[0] + w[1] * w[1],
            |idx, w| {
                Some(match idx {
                    [i] => 2.0 * w[*i],
                    [i, j] if i == j => 2.0,
                    _ => 0.0,
                })
            },
            8,
        );
        let h = SmoothFunction::univariate(
            "exp_neg",
            |x| (-x).exp(),
            |k, x| if k % 2 == 0 { (-x).exp() } else { -(-x).exp() },
            16,
        );
        let grid = vec![vec![0.0, 0.0], vec![0.5, -0.5], vec![1.0, 0.3]];
        let r = stein_residual(&h, &g, &CovarianceSpec::identity(2), &grid, &cfg()).unwrap();
        assert!(r <= 1e-5, "residual {r}");
    }
}
