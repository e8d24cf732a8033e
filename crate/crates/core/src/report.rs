//! The labeled result type returned by every bound calculator.

use serde::{Deserialize, Serialize};

/// Which distance (or derivative quantity) a bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Wasserstein distance (Lipschitz test functions).
    Wasserstein,
    /// Smooth Wasserstein distance of order p.
    SmoothP,
    /// A fixed smooth test function with known derivative norms.
    SmoothH,
    /// Kolmogorov distance.
    Kolmogorov,
    /// Sup-norm bound on a derivative of a Stein solution.
    SolutionDerivative,
}

impl Metric {
    pub fn tag(self) -> &'static str {
        match self {
            Metric::Wasserstein => "d_W",
            Metric::SmoothP => "d_p",
            Metric::SmoothH => "smooth-h",
            Metric::Kolmogorov => "d_K",
            Metric::SolutionDerivative => "derivative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionStatus {
    /// Verified by the calculator.
    Checked,
    /// Taken on the caller's word (e.g. parity of `g`).
    UserAsserted,
    /// Evaluated and found not to hold; the report is not certified.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumption {
    pub clause: String,
    pub status: AssumptionStatus,
}

/// How the reported value is assembled from `terms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combination {
    /// `value = factor · Σ terms`.
    Sum { factor: f64 },
    /// `value = min(factor · Σ terms, cap)`.
    CappedSum { factor: f64, cap: f64 },
    /// `value = min over terms`.
    Min,
    /// `value` is the first term; later terms are diagnostics.
    First,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub metric: Metric,
    pub provenance: String,
    pub combination: Combination,
    pub terms: Vec<Term>,
    /// Extra quantities that do not enter `value` (exact constants, optimizers).
    pub diagnostics: Vec<Term>,
    pub assumptions: Vec<Assumption>,
    pub certified: bool,
    pub cap_binding: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(metric: Metric, provenance: impl Into<String>, combination: Combination) -> Self {
        Self {
            value: f64::NAN,
            metric,
            provenance: provenance.into(),
            combination,
            terms: Vec::new(),
            diagnostics: Vec::new(),
            assumptions: Vec::new(),
            certified: true,
            cap_binding: false,
            notes: Vec::new(),
        }
    }

    pub fn term(&mut self, label: impl Into<String>, value: f64) -> &mut Self {
        self.terms.push(Term {
            label: label.into(),
            value,
        });
        self
    }

    pub fn diagnostic(&mut self, label: impl Into<String>, value: f64) -> &mut Self {
        self.diagnostics.push(Term {
            label: label.into(),
            value,
        });
        self
    }

    pub fn assume(&mut self, clause: impl Into<String>, status: AssumptionStatus) -> &mut Self {
        self.assumptions.push(Assumption {
            clause: clause.into(),
            status,
        });
        self
    }

    pub fn check(&mut self, clause: impl Into<String>, holds: bool) -> &mut Self {
        let status = if holds {
            AssumptionStatus::Checked
        } else {
            AssumptionStatus::Failed
        };
        self.assume(clause, status)
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn diagnostic_value(&self, label: &str) -> Option<f64> {
        self.diagnostics
            .iter()
            .chain(self.terms.iter())
            .find(|t| t.label == label)
            .map(|t| t.value)
    }

    /// Recompute `value`, `cap_binding` and `certified` from the terms.
    ///
    /// A binding cap is a trivially valid bound, so it certifies the report
    /// regardless of failed assumptions.
    pub fn finish(mut self) -> Self {
        let sum: f64 = self.terms.iter().map(|t| t.value).sum();
        self.value = match self.combination {
            Combination::Sum { factor } => factor * sum,
            Combination::CappedSum { factor, cap } => {
                let raw = factor * sum;
                self.cap_binding = raw >= cap;
                raw.min(cap)
            }
            Combination::Min => self
                .terms
                .iter()
                .map(|t| t.value)
                .fold(f64::INFINITY, f64::min),
            Combination::First => self.terms.first().map_or(f64::NAN, |t| t.value),
        };
        let failed = self
            .assumptions
            .iter()
            .any(|a| a.status == AssumptionStatus::Failed);
        self.certified = self.certified && (!failed || self.cap_binding);
        self
    }

    /// Mark the value as not certified (caller-supplied constants, Monte Carlo inputs).
    pub fn uncertified(mut self, reason: impl Into<String>) -> Self {
        self.certified = false;
        self.notes.push(reason.into());
        self
    }
}
