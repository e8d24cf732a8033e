//! Built-in inequality suites and constant reproductions, run by
//! `stein-audit selfcheck`.

use crate::limit_bounds::{
    collect_coefficients, make_moment_oracle, univariate_expansion, MomentFamily, TheoremPart,
};
use crate::power_divergence::{bound_pearson, chain_constants, w2_generic_bounds, MultinomialModel, StatMetric};
use crate::special_functions::{half_gamma_ratio, ij_constants, t_r, upper_incomplete_gamma, IjKind};
use crate::stein_solution::DominatingPolynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Random cases per inequality suite.
pub const CASES: usize = 10_000;

const SEED: u64 = 0x5e1f_c4ec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub cases: usize,
    pub detail: String,
}

pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    run: fn() -> SuiteOutcome,
}

impl Suite {
    pub fn run(&self) -> SuiteOutcome {
        (self.run)()
    }
}

pub fn suites() -> &'static [Suite] {
    &SUITES
}

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

static SUITES: [Suite; 8] = [
    Suite {
        name: "lemma-axby",
        description: "(ax+by)^r <= (a+b)^r (x^r+y^r) and the three-term analogue",
        run: lemma_axby,
    },
    Suite {
        name: "t-r-bounds",
        description: "T_r(w) <= w^r for r in [0,1], <= 2w^r for r > 1, w > r-1",
        run: t_r_bounds,
    },
    Suite {
        name: "incgamma",
        description: "Gamma(a,x) <= x^(a-1)e^-x for a <= 1, <= 2x^(a-1)e^-x for a > 1, x > 2(a-1)",
        run: incgamma,
    },
    Suite {
        name: "ij-caps",
        description: "I and J constants stay below 2^(r/2) and 3^(r/2)",
        run: ij_caps,
    },
    Suite {
        name: "gamma-ratio",
        description: "sqrt(2/n) < Gamma(n/2)/Gamma((n+1)/2) < sqrt(2/(n-1/2))",
        run: gamma_ratio,
    },
    Suite {
        name: "constants-24-17",
        description: "univariate Wasserstein constants (24, 17) from (A, B, r, p) = (0, 2, 1, 2)",
        run: constants_24_17,
    },
    Suite {
        name: "constants-187-131-704-468",
        description: "even-g constants within 1 of (187, 131, 704, 468) from (2, 4, 2, 2)",
        run: constants_187,
    },
    Suite {
        name: "chain-2976",
        description: "intermediate constants of the 2976 chain and 24 + 17/17 = 25",
        run: chain_2976,
    },
];

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

/// Run `check` on `CASES` draws and report the first counterexample. An
/// error from the function under test counts as a failure.
fn random_suite(
    name: &'static str,
    salt: u64,
    mut check: impl FnMut(&mut ChaCha8Rng) -> crate::Result<Option<String>>,
) -> SuiteOutcome {
    let mut r = rng(salt);
    let mut failures = 0usize;
    let mut first = None;
    for _ in 0..CASES {
        if let Some(msg) = check(&mut r).unwrap_or_else(|e| Some(e.to_string())) {
            failures += 1;
            first.get_or_insert(msg);
        }
    }
    SuiteOutcome {
        name,
        pass: failures == 0,
        cases: CASES,
        detail: match first {
            None => format!("{CASES} cases, zero failures"),
            Some(m) => format!("{failures} failures; first: {m}"),
        },
    }
}

fn fixed(name: &'static str, pass: bool, detail: String) -> SuiteOutcome {
    SuiteOutcome { name, pass, cases: 1, detail }
}

fn lemma_axby() -> SuiteOutcome {
    random_suite("lemma-axby", 1, |r| {
        let [a, b, c, x, y, z] = std::array::from_fn(|_| r.random_range(0.0..10.0f64));
        let p = r.random_range(0.0..6.0f64);
        let two = ((a * x + b * y).powf(p), (a + b).powf(p) * (x.powf(p) + y.powf(p)));
        let three = (
            (a * x + b * y + c * z).powf(p),
            (a + b + c).powf(p) * (x.powf(p) + y.powf(p) + z.powf(p)),
        );
        Ok([two, three]
            .iter()
            .find(|(l, rhs)| *l > rhs * (1.0 + 1e-12) + 1e-300)
            .map(|(l, rhs)| format!("r = {p}: {l} > {rhs}")))
    })
}

fn t_r_bounds() -> SuiteOutcome {
    random_suite("t-r-bounds", 2, |rg| {
        let small = rg.random_range(0.0..=1.0f64);
        let w = rg.random_range(1e-6..50.0f64);
        let t = t_r(small, w)?;
        if t > w.powf(small) * (1.0 + 1e-12) {
            return Ok(Some(format!("T_{small}({w}) = {t}")));
        }
        let r = rg.random_range(1.0..10.0f64);
        let w = r - 1.0 + rg.random_range(0.0..50.0f64) + 1e-9;
        let t = t_r(r, w)?;
        Ok((t > 2.0 * w.powf(r) * (1.0 + 1e-12)).then(|| format!("T_{r}({w}) = {t}")))
    })
}

fn incgamma() -> SuiteOutcome {
    random_suite("incgamma", 3, |rg| {
        let a = rg.random_range(1e-6..=1.0f64);
        let x = rg.random_range(1e-6..200.0f64);
        let g = upper_incomplete_gamma(a, x)?;
        let b = ((a - 1.0) * x.ln() - x).exp();
        if g > b * (1.0 + 1e-12) + 1e-300 {
            return Ok(Some(format!("Gamma({a}, {x}) = {g} > {b}")));
        }
        let a = rg.random_range(1.0..20.0f64);
        let x = 2.0 * (a - 1.0) + rg.random_range(0.0..200.0f64) + 1e-9;
        let g = upper_incomplete_gamma(a, x)?;
        let b = 2.0 * ((a - 1.0) * x.ln() - x).exp();
        Ok((g > b * (1.0 + 1e-12) + 1e-300).then(|| format!("Gamma({a}, {x}) = {g} > {b}")))
    })
}

fn ij_caps() -> SuiteOutcome {
    random_suite("ij-caps", 4, |rg| {
        let m = rg.random_range(1..=6u32);
        let n = rg.random_range(1..=6u32);
        let r = rg.random_range(0.0..=6.0f64);
        let (kind, m) = match rg.random_range(0..4) {
            0 => (IjKind::Inr, None),
            1 => (IjKind::Jnr, None),
            2 => (IjKind::Imnr, Some(m)),
            _ => (IjKind::Jmnr, Some(m)),
        };
        let v = ij_constants(kind, m, n, r)?;
        Ok((v > kind.cap(r) * (1.0 + 1e-10)).then(|| format!("{kind:?} m = {m:?} n = {n} r = {r}: {v} > {}", kind.cap(r))))
    })
}

fn gamma_ratio() -> SuiteOutcome {
    let holds = |n: f64| {
        let g = half_gamma_ratio(n);
        2f64.sqrt() / n.sqrt() < g && g < 2f64.sqrt() / (n - 0.5).sqrt()
    };
    let mut out = random_suite("gamma-ratio", 5, |rg| {
        let n = rg.random_range(1.0..200.0f64);
        Ok((!holds(n)).then(|| format!("n = {n}")))
    });
    if let Some(n) = (1..=40u32).find(|&n| !holds(f64::from(n))) {
        out.pass = false;
        out.detail = format!("{}; integer grid fails at n = {n}", out.detail);
    }
    out
}

fn constants_24_17() -> SuiteOutcome {
    let name = "constants-24-17";
    let run = || -> crate::Result<(f64, f64)> {
        let poly = DominatingPolynomial::univariate(0.0, 2.0, 1.0)?;
        let terms = univariate_expansion(TheoremPart::Ii, &poly, 1.0, 2)?;
        let coefs = collect_coefficients(&terms, |_| 1.0);
        let find = |e: f64, s: f64| {
            coefs
                .iter()
                .filter(|(k, _)| k.n_exponent == e && k.abs_orders == [s] && k.signed_orders.is_empty())
                .map(|(_, v)| *v)
                .sum::<f64>()
        };
        Ok((find(-0.5, 3.0), find(-1.0, 4.0)))
    };
    match run() {
        Ok((c3, c4)) => {
            let e3 = 12.0 * 2f64.sqrt() + 12.0 / PI.sqrt();
            let e4 = 12.0 * 2f64.sqrt();
            let pass = (c3 - e3).abs() <= 1e-9 && (c4 - e4).abs() <= 1e-9 && c3.ceil() == 24.0 && c4.ceil() == 17.0;
            fixed(name, pass, format!("({c3:.12}, {c4:.12}) -> ({}, {})", c3.ceil(), c4.ceil()))
        }
        Err(e) => fixed(name, false, e.to_string()),
    }
}

fn constants_187() -> SuiteOutcome {
    let name = "constants-187-131-704-468";
    let run = || -> crate::Result<Vec<f64>> {
        let poly = DominatingPolynomial::univariate(2.0, 4.0, 2.0)?;
        let terms = univariate_expansion(TheoremPart::Iv, &poly, 1.0, 2)?;
        let coefs = collect_coefficients(&terms, |_| 1.0);
        let find = |e: f64, abs: &[f64], signed: &[u32]| {
            coefs
                .iter()
                .filter(|(k, _)| k.n_exponent == e && k.abs_orders == abs && k.signed_orders == signed)
                .map(|(_, v)| *v)
                .sum::<f64>()
        };
        Ok(vec![
            find(-1.0, &[4.0], &[]),
            find(-2.0, &[6.0], &[]),
            find(-1.0, &[3.0], &[3]),
            find(-2.0, &[5.0], &[3]),
        ])
    };
    match run() {
        Ok(got) => {
            let pass = got.iter().zip([187.0, 131.0, 704.0, 468.0]).all(|(g, p)| (g - p).abs() <= 1.0);
            let shown: Vec<String> = got.iter().map(|v| format!("{v:.4}")).collect();
            fixed(name, pass, format!("exact ({})", shown.join(", ")))
        }
        Err(e) => fixed(name, false, e.to_string()),
    }
}

fn chain_2976() -> SuiteOutcome {
    let name = "chain-2976";
    let run = || -> crate::Result<(bool, String)> {
        let c = chain_constants()?;
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-9;
        let mut ok = near(c.alpha_a, 10.5)
            && near(c.c_beta, 72.0)
            && near(c.gamma, 40.0 * (2.0 / PI).sqrt())
            && c.h1[0].ceil() == 2247.0
            && near(c.h1[1], 648.0)
            && near(c.h1[2], 648.0)
            && c.h2[0].ceil() == 2975.0
            && near(c.h2[1], 864.0)
            && near(c.h2[2], 864.0);
        let model = MultinomialModel::new(1156, 0.5)?;
        let bern = make_moment_oracle(MomentFamily::BernoulliStandardized { p1: 0.5 })?;
        let generic = w2_generic_bounds(StatMetric::Wasserstein, &bern, 1156, None)?.value;
        let pearson = bound_pearson(StatMetric::Wasserstein, &model, None)?.value;
        ok &= generic <= 25.0 / 17.0 * (1.0 + 1e-12) && near(pearson, 25.0 / 17.0);
        Ok((
            ok,
            format!(
                "h' row ({:.4}, {}, {}), h'' row ({:.4}, {}, {}), bound at sqrt(npp) = 17: {generic:.12}",
                c.h1[0], c.h1[1], c.h1[2], c.h2[0], c.h2[1], c.h2[2]
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => fixed(name, pass, detail),
        Err(e) => fixed(name, false, e.to_string()),
    }
}
