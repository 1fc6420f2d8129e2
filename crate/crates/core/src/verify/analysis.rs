use std::collections::HashMap;
use std::sync::Mutex;

use crate::energy::{cross_energy_sorted, difference_rep_within, energy_exact, sum_rep_within, t_energy_within, RepFunction};
use crate::error::{Error, Result};
use crate::set::OrderedIntSet;
use crate::Budgets;

/// Memoized `E(A, S)` per support; budget failures keep `(needed, budget)`.
type CrossCache = Mutex<HashMap<Vec<i64>, Result<u128, (u128, u64)>>>;

/// Everything the checks share about one set.
///
/// Fields are public so tests can substitute a corrupted representation
/// function and watch the exact layer catch it. Energies are always
/// recomputed from the stored reps, never cached separately.
#[derive(Debug)]
pub struct SetAnalysis {
    pub set_id: String,
    pub set: OrderedIntSet,
    pub budgets: Budgets,
    /// `A∘A`.
    pub diff: RepFunction,
    /// `A∗A`.
    pub sum: RepFunction,
    /// `T_4(A)`; `None` above the size cap or budget.
    pub t4: Option<u128>,
    cross: CrossCache,
}

impl SetAnalysis {
    pub fn new(set_id: impl Into<String>, set: OrderedIntSet, budgets: Budgets) -> Result<Self> {
        let diff = difference_rep_within(&set, &set, budgets.pairs)?;
        let sum = sum_rep_within(&set, &set, budgets.pairs)?;
        let t4 = if set.len() <= budgets.t4_max_n {
            match t_energy_within(&set, 4, budgets.pairs) {
                Ok(v) => Some(v),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        Ok(Self { set_id: set_id.into(), set, budgets, diff, sum, t4, cross: Mutex::default() })
    }

    pub fn n(&self) -> usize {
        self.set.len()
    }

    /// `E(A)` from `A∘A`.
    pub fn energy(&self) -> Result<u128> {
        energy_exact(&self.diff, 2)
    }

    pub fn energy3(&self) -> Result<u128> {
        energy_exact(&self.diff, 3)
    }

    /// `T_2(A)` from `A∗A`; shares no data with [`Self::energy`].
    pub fn t2(&self) -> Result<u128> {
        energy_exact(&self.sum, 2)
    }

    pub fn sumset_size(&self) -> usize {
        self.sum.len()
    }

    pub fn diffset_size(&self) -> usize {
        self.diff.len()
    }

    /// `E(A, S)` for a support `S`, memoized; budget failures are memoized too.
    pub fn cross_energy(&self, support: &[i64]) -> Result<u128> {
        if let Some(hit) = self.cross.lock().expect("cache poisoned").get(support) {
            return hit.map_err(|(needed, budget)| Error::BudgetExceeded { needed, budget });
        }
        let value = cross_energy_sorted(self.set.elements(), support, 2, self.budgets.pairs);
        let stored = match &value {
            Ok(v) => Ok(*v),
            Err(Error::BudgetExceeded { needed, budget }) => Err((*needed, *budget)),
            Err(_) => return value,
        };
        self.cross.lock().expect("cache poisoned").insert(support.to_vec(), stored);
        value
    }
}
