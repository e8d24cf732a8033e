use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Symmetry declared for a function, checked numerically on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    None,
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Analytic partial derivative for a multiset of coordinate indices; `None`
/// requests the finite-difference fallback.
type PartialFn = Arc<dyn Fn(&[usize], &[f64]) -> Option<f64> + Send + Sync>;

/// A function `ℝ^d → ℝ` with derivatives up to `max_order`.
#[derive(Clone)]
pub struct SmoothFunction {
    name: String,
    dim: usize,
    value: ValueFn,
    partial: Option<PartialFn>,
    max_order: usize,
    parity: Parity,
    identity: bool,
    sup_norms: Option<Vec<f64>>,
    fd_step: f64,
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("max_order", &self.max_order)
            .field("parity", &self.parity)
            .finish()
    }
}

impl SmoothFunction {
    /// One-dimensional function with analytic derivatives `derivative(k, x)`, `k ≥ 1`.
    pub fn univariate(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
        max_order: usize,
    ) -> Self {
        Self {
            name: name.into(),
            dim: 1,
            value: Arc::new(move |w: &[f64]| value(w[0])),
            partial: Some(Arc::new(move |idx: &[usize], w: &[f64]| {
                Some(derivative(idx.len(), w[0]))
            })),
            max_order,
            parity: Parity::None,
            identity: false,
            sup_norms: None,
            fd_step: 1e-4,
        }
    }

    /// One-dimensional function known only through its values; all
    /// derivatives up to `max_order` come from central differences.
    pub fn univariate_values(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        max_order: usize,
    ) -> Self {
        Self {
            name: name.into(),
            dim: 1,
            value: Arc::new(move |w: &[f64]| value(w[0])),
            partial: None,
            max_order,
            parity: Parity::None,
            identity: false,
            sup_norms: None,
            fd_step: 1e-4,
        }
    }

    pub fn multivariate(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        partial: impl Fn(&[usize], &[f64]) -> Option<f64> + Send + Sync + 'static,
        max_order: usize,
    ) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            name: name.into(),
            dim,
            value: Arc::new(value),
            partial: Some(Arc::new(partial)),
            max_order,
            parity: Parity::None,
            identity: false,
            sup_norms: None,
            fd_step: 1e-4,
        }
    }

    /// `h(w) = w`, for which the weaker derivative classes apply.
    pub fn identity() -> Self {
        let mut f = Self::univariate(
            "identity",
            |x| x,
            |k, _| if k == 1 { 1.0 } else { 0.0 },
            usize::MAX,
        );
        f.identity = true;
        f.parity = Parity::Odd;
        f.sup_norms = Some(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        f
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    /// Supremum norms `‖h'‖, ‖h''‖, …` over the range where `h` is evaluated.
    pub fn with_sup_norms(mut self, norms: Vec<f64>) -> Self {
        self.sup_norms = Some(norms);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn sup_norms(&self) -> Option<&[f64]> {
        self.sup_norms.as_deref()
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        (self.value)(w)
    }

    pub fn value1(&self, x: f64) -> f64 {
        (self.value)(&[x])
    }

    /// Partial derivative `∂^k / ∂w_{i_1} … ∂w_{i_k}` (empty `indices` is the value).
    pub fn partial(&self, indices: &[usize], w: &[f64]) -> Result<f64> {
        let order = indices.len();
        if order == 0 {
            return Ok(self.value(w));
        }
        if order > self.max_order {
            return Err(Error::MissingDerivative {
                order,
                max_order: self.max_order,
            });
        }
        if let Some(p) = &self.partial {
            if let Some(v) = p(indices, w) {
                return Ok(v);
            }
        }
        self.finite_difference(indices, w)
    }

    /// `k`-th derivative of a one-dimensional function.
    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        debug_assert_eq!(self.dim, 1);
        const ZEROS: [usize; 16] = [0; 16];
        if k <= ZEROS.len() {
            self.partial(&ZEROS[..k], &[x])
        } else {
            self.partial(&vec![0; k], &[x])
        }
    }

    /// Central difference of the order-(k−1) derivative along the last index.
    fn finite_difference(&self, indices: &[usize], w: &[f64]) -> Result<f64> {
        let (last, rest) = indices.split_last().expect("order >= 1");
        let h = self.fd_step * w[*last].abs().max(1.0);
        let mut up = w.to_vec();
        let mut down = w.to_vec();
        up[*last] += h;
        down[*last] -= h;
        let fu = self.partial_lower(rest, &up)?;
        let fd = self.partial_lower(rest, &down)?;
        Ok((fu - fd) / (2.0 * h))
    }

    fn partial_lower(&self, indices: &[usize], w: &[f64]) -> Result<f64> {
        if indices.is_empty() {
            return Ok(self.value(w));
        }
        if let Some(p) = &self.partial {
            if let Some(v) = p(indices, w) {
                return Ok(v);
            }
        }
        self.finite_difference(indices, w)
    }

    /// Compare each analytic derivative with a central difference of the
    /// derivative one order below; fails beyond 1e-4 relative.
    pub fn check_derivatives(&self, probe: &[Vec<f64>], up_to: usize) -> Result<()> {
        let Some(p) = &self.partial else {
            return Ok(());
        };
        let up_to = up_to.min(self.max_order);
        for w in probe {
            for order in 1..=up_to {
                for indices in index_multisets(self.dim, order) {
                    let Some(analytic) = p(&indices, w) else {
                        continue;
                    };
                    let (last, rest) = indices.split_last().expect("order >= 1");
                    let h = 1e-5 * w[*last].abs().max(1.0);
                    let mut up = w.clone();
                    let mut down = w.clone();
                    up[*last] += h;
                    down[*last] -= h;
                    let fd = (self.partial_lower(rest, &up)? - self.partial_lower(rest, &down)?)
                        / (2.0 * h);
                    let scale = analytic.abs().max(fd.abs()).max(1.0);
                    if (analytic - fd).abs() > 1e-4 * scale {
                        return Err(Error::Invalid(format!(
                            "{}: analytic derivative {indices:?} = {analytic} disagrees with finite difference {fd} at {w:?}",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Check the declared parity on a probe grid.
    pub fn check_parity(&self, probe: &[Vec<f64>]) -> Result<()> {
        let sign = match self.parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::None => return Ok(()),
        };
        for w in probe {
            let neg: Vec<f64> = w.iter().map(|v| -v).collect();
            let a = self.value(w);
            let b = sign * self.value(&neg);
            if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::Invalid(format!(
                    "{}: declared {:?} parity violated at {w:?}",
                    self.name, self.parity
                )));
            }
        }
        Ok(())
    }
}

/// All nondecreasing index tuples of length `order` over `0..dim`
/// (one representative per mixed partial).
pub fn index_multisets(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(order);
    fn rec(dim: usize, order: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == order {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, order, i, cur, out);
            cur.pop();
        }
    }
    rec(dim, order, 0, &mut current, &mut out);
    out
}

/// Partial Bell polynomials `B_{n,k}(x_1, …, x_{n-k+1})` for all `k ≤ n`,
/// where `x[j-1]` holds the j-th derivative.
fn partial_bell(n: usize, x: &[f64]) -> Vec<f64> {
    // table[m][k] = B_{m,k}
    let mut table = vec![vec![0.0; n + 1]; n + 1];
    table[0][0] = 1.0;
    for m in 1..=n {
        for k in 1..=m {
            let mut s = 0.0;
            let mut binom = 1.0; // C(m-1, i-1)
            for i in 1..=(m - k + 1) {
                s += binom * x[i - 1] * table[m - i][k - 1];
                binom = binom * (m - i) as f64 / i as f64;
            }
            table[m][k] = s;
        }
    }
    table.swap_remove(n)
}

/// Partial derivative of the composition `h ∘ g`.
///
/// For `d = 1` any order is assembled with Faà di Bruno's formula. For
/// `d > 1` only `h = id` (any order) or orders `≤ 2` are available.
pub fn composed_partial(
    h: &SmoothFunction,
    g: &SmoothFunction,
    indices: &[usize],
    w: &[f64],
) -> Result<f64> {
    let n = indices.len();
    if n == 0 {
        return Ok(h.value1(g.value(w)));
    }
    if h.is_identity() {
        return g.partial(indices, w);
    }
    if g.dim() == 1 {
        let x = w[0];
        let mut dg = Vec::with_capacity(n);
        for j in 1..=n {
            dg.push(g.derivative(j, x)?);
        }
        let bell = partial_bell(n, &dg);
        let gx = g.value(w);
        let mut total = 0.0;
        for (k, b) in bell.iter().enumerate().skip(1) {
            if *b != 0.0 {
                total += h.derivative(k, gx)? * b;
            }
        }
        return Ok(total);
    }
    let gx = g.value(w);
    match n {
        1 => Ok(h.derivative(1, gx)? * g.partial(indices, w)?),
        2 => {
            let gi = g.partial(&indices[..1], w)?;
            let gj = g.partial(&indices[1..], w)?;
            let gij = g.partial(indices, w)?;
            Ok(h.derivative(2, gx)? * gi * gj + h.derivative(1, gx)? * gij)
        }
        _ => Err(Error::Unsupported(format!(
            "order-{n} derivatives of h∘g in dimension {} need h = id",
            g.dim()
        ))),
    }
}
