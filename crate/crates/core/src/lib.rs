//! Desk-scale laboratory for sumsets of convex integer sets.
//!
//! The crate builds finite convex sets with prescribed signs of their higher
//! discrete derivatives, computes representation functions and additive
//! energies exactly, slices them into dyadic popularity bands, estimates the
//! principal eigenvalue of the associated convolution operators, and
//! evaluates a catalog of inequalities over seeded corpora.
//!
//! With the default `parallel` feature the per-set sweep, operator
//! mat-vecs, brute-force oracles and annealing chains run on the ambient
//! rayon pool; without it every loop runs sequentially and produces
//! identical output.

pub mod energy;
pub mod error;
pub mod generators;
mod par;
pub mod search;
pub mod set;
pub mod spectral;
pub mod verify;
mod wire;

pub use energy::{EnergyProfile, EnergyValue, RepFunction, RepKind};
pub use error::{Error, Result};
pub use generators::{Family, GeneratorParams, GeneratorSpec, Manifest, Profile};
pub use set::{DerivativeSignature, OrderedIntSet, Sign};
pub use spectral::{DecayProfile, OperatorMatrix, PopularitySlice};
pub use verify::{CheckResult, ExponentFit, SuiteConfig, SuiteReport};

use serde::{Deserialize, Serialize};

/// Default cap on pair or tuple enumerations per operation.
pub const DEFAULT_PAIR_BUDGET: u64 = 100_000_000;
/// Default cap on dense operator entries.
pub const DEFAULT_MATRIX_BUDGET: u64 = 10_000_000;
/// Largest set for which fourth T-energies are computed by default.
pub const DEFAULT_T4_MAX_N: usize = 128;

/// Work limits shared by every enumeration in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub pairs: u64,
    pub matrix: u64,
    pub t4_max_n: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { pairs: DEFAULT_PAIR_BUDGET, matrix: DEFAULT_MATRIX_BUDGET, t4_max_n: DEFAULT_T4_MAX_N }
    }
}

pub(crate) fn within_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}
