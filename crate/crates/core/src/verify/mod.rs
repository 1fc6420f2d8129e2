//! The inequality catalog.
//!
//! Checks come in two layers. Exact checks are identities or inequalities
//! with constant one; they are asserted and any failure means an arithmetic
//! bug. Asymptotic checks carry unknown constants and log factors; they
//! only record a ratio, and their meaning comes from trend fits across a
//! family of sets.

mod analysis;
mod asymptotic;
mod chain;
mod exact;
mod fit;
mod suite;

use serde::Serialize;

pub use analysis::SetAnalysis;
pub use asymptotic::check_asymptotic;
pub use chain::check_spectral_chain;
pub use exact::{check_exact, RAYLEIGH_SLACK};
pub use fit::{fit_exponent, trend_fit, ExponentFit};
pub use suite::{config_hash, generate_corpus, run_suite, set_id, CorpusEntry, SetSummary, SuiteConfig, SuiteReport, SummaryRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    Exact,
    Asymptotic,
}

/// How `lhs` is meant to compare with `rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "eq")]
    Equal,
    /// `lhs <= rhs`, or `lhs ≪ rhs` in the asymptotic layer.
    #[serde(rename = "le")]
    AtMost,
    /// `lhs ≫ rhs`.
    #[serde(rename = "ge")]
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Evaluated,
    /// The set is outside the statement's hypothesis.
    NotApplicable,
    /// A required enumeration exceeds the configured budget.
    SkippedBudget,
    /// No dyadic band lies in the statement's range.
    EmptyRange,
}

/// Popularity levels and ranks a record was evaluated at.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

impl Params {
    pub fn tau(tau: u64) -> Self {
        Self { tau: Some(tau), ..Self::default() }
    }

    pub fn delta(delta: u64) -> Self {
        Self { delta: Some(delta), ..Self::default() }
    }
}

/// One evaluated (or explicitly skipped) statement on one set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: &'static str,
    pub set_id: String,
    pub layer: Layer,
    pub relation: Relation,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// Exact layer only: the integers actually compared.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_exact: Option<String>,
    pub pass: bool,
    pub params: Params,
    /// Spectral chain: the record with the smallest right side in its scan.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub tightest: bool,
    /// Spectral chain: `Δ` is the pigeonhole (heaviest) band of the range.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub heaviest: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub config_hash: String,
}

impl CheckResult {
    fn base(check_id: &'static str, set_id: &str, layer: Layer, relation: Relation, status: Status) -> Self {
        Self {
            check_id,
            set_id: set_id.to_string(),
            layer,
            relation,
            status,
            lhs: None,
            rhs: None,
            ratio: None,
            lhs_exact: None,
            rhs_exact: None,
            pass: true,
            params: Params::default(),
            tightest: false,
            heaviest: false,
            note: None,
            config_hash: String::new(),
        }
    }

    /// An asymptotic ratio record; always passes.
    pub(crate) fn ratio(check_id: &'static str, set_id: &str, relation: Relation, lhs: f64, rhs: f64) -> Self {
        let mut r = Self::base(check_id, set_id, Layer::Asymptotic, relation, Status::Evaluated);
        r.lhs = Some(lhs);
        r.rhs = Some(rhs);
        r.ratio = Some(lhs / rhs);
        r
    }

    /// An exact integer comparison.
    pub(crate) fn exact(check_id: &'static str, set_id: &str, relation: Relation, lhs: u128, rhs: u128) -> Self {
        let mut r = Self::base(check_id, set_id, Layer::Exact, relation, Status::Evaluated);
        r.lhs = Some(lhs as f64);
        r.rhs = Some(rhs as f64);
        r.ratio = Some(lhs as f64 / rhs as f64);
        r.lhs_exact = Some(lhs.to_string());
        r.rhs_exact = Some(rhs.to_string());
        r.pass = match relation {
            Relation::Equal => lhs == rhs,
            Relation::AtMost => lhs <= rhs,
            Relation::AtLeast => lhs >= rhs,
        };
        r
    }

    pub(crate) fn skipped(
        check_id: &'static str,
        set_id: &str,
        layer: Layer,
        relation: Relation,
        status: Status,
        note: impl Into<String>,
    ) -> Self {
        let mut r = Self::base(check_id, set_id, layer, relation, status);
        r.note = Some(note.into());
        r
    }

    pub(crate) fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn is_evaluated(&self) -> bool {
        self.status == Status::Evaluated
    }

    pub fn is_exact_failure(&self) -> bool {
        self.layer == Layer::Exact && !self.pass
    }
}

/// Records the outcome of a budgeted computation as a skip marker.
pub(crate) fn budget_note(err: &crate::Error) -> Option<String> {
    match err {
        crate::Error::BudgetExceeded { needed, budget } => {
            Some(format!("needs {needed} operations, budget {budget}"))
        }
        _ => None,
    }
}
