//! Representation functions and additive energies.
//!
//! `A∘B(x)` counts pairs with `a - b = x`, `A∗B(x)` counts pairs with
//! `a + b = x`. Every table is built by a sorted k-way merge of shifted
//! copies of one operand, so supports stay sparse even when elements are
//! near `2^61`. Integer energies accumulate in `u128` with overflow checks.

mod merge;
pub mod oracle;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::set::OrderedIntSet;
use crate::wire::{self, wide_u128, wide_u128_opt};
use crate::{within_budget, Budgets, DEFAULT_PAIR_BUDGET};

pub(crate) use merge::ShiftMerge;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepKind {
    Difference,
    Sum,
    IteratedSum(u32),
}

/// Sparse count table keyed by integer value. Absent keys mean zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepFunction {
    kind: RepKind,
    keys: Vec<i64>,
    counts: Vec<u64>,
    total_mass: u128,
    operand_sizes: Vec<usize>,
}

impl RepFunction {
    /// Builds a table from arbitrary `(value, count)` pairs. Repeated values
    /// are summed and zero counts dropped. `operand_sizes` records the
    /// cardinalities the table claims to come from.
    pub fn from_pairs(
        kind: RepKind,
        operand_sizes: Vec<usize>,
        pairs: impl IntoIterator<Item = (i64, u64)>,
    ) -> Result<Self> {
        let mut pairs: Vec<(i64, u64)> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        pairs.sort_unstable_by_key(|p| p.0);
        let mut keys = Vec::with_capacity(pairs.len());
        let mut counts: Vec<u64> = Vec::with_capacity(pairs.len());
        for (k, c) in pairs {
            if keys.last() == Some(&k) {
                let last = counts.last_mut().expect("parallel vectors");
                *last = last.checked_add(c).ok_or(Error::Overflow("multiplicity"))?;
            } else {
                keys.push(k);
                counts.push(c);
            }
        }
        Ok(Self::from_parts(kind, operand_sizes, keys, counts))
    }

    fn from_parts(kind: RepKind, operand_sizes: Vec<usize>, keys: Vec<i64>, counts: Vec<u64>) -> Self {
        let total_mass = counts.iter().map(|&c| c as u128).sum();
        Self { kind, keys, counts, total_mass, operand_sizes }
    }

    fn collect(kind: RepKind, operand_sizes: Vec<usize>, merge: ShiftMerge<'_>) -> Self {
        let (keys, counts) = merge.unzip();
        Self::from_parts(kind, operand_sizes, keys, counts)
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    /// Value at `x`, zero off the support.
    pub fn get(&self, x: i64) -> u64 {
        self.keys.binary_search(&x).map_or(0, |i| self.counts[i])
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[i64] {
        &self.keys
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.keys.iter().copied().zip(self.counts.iter().copied())
    }

    /// Sum of all multiplicities.
    pub fn total_mass(&self) -> u128 {
        self.total_mass
    }

    /// Cardinalities of the operands the table was built from.
    pub fn operand_sizes(&self) -> &[usize] {
        &self.operand_sizes
    }

    /// Product of the operand cardinalities; equals the total mass of every
    /// correctly built table.
    pub fn expected_mass(&self) -> u128 {
        self.operand_sizes.iter().map(|&n| n as u128).product()
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// The support as a set (the sumset or difference set).
    pub fn support_set(&self) -> Result<OrderedIntSet> {
        OrderedIntSet::new(self.keys.clone())
    }

    /// Copy with the count at `x` replaced (removed when `count == 0`).
    pub fn with_count(&self, x: i64, count: u64) -> Result<RepFunction> {
        let pairs = self.iter().filter(|&(k, _)| k != x).chain(std::iter::once((x, count)));
        Self::from_pairs(self.kind, self.operand_sizes.clone(), pairs)
    }
}

impl Serialize for RepFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Count(u64);
        impl Serialize for Count {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                wire::ser_u128(self.0 as u128, s)
            }
        }
        let mut map = s.serialize_map(Some(self.keys.len()))?;
        for (k, c) in self.iter() {
            map.serialize_entry(&k.to_string(), &Count(c))?;
        }
        map.end()
    }
}

fn negated(set: &OrderedIntSet) -> Vec<i64> {
    set.elements().iter().map(|&b| -b).collect()
}

pub fn difference_rep(a: &OrderedIntSet, b: &OrderedIntSet) -> Result<RepFunction> {
    difference_rep_within(a, b, DEFAULT_PAIR_BUDGET)
}

/// `A∘B(x) = #{(a, b) : a - b = x}`.
pub fn difference_rep_within(a: &OrderedIntSet, b: &OrderedIntSet, budget: u64) -> Result<RepFunction> {
    within_budget(a.len() as u128 * b.len() as u128, budget)?;
    let merge = ShiftMerge::new(a.elements(), None, negated(b))?;
    Ok(RepFunction::collect(RepKind::Difference, vec![a.len(), b.len()], merge))
}

pub fn sum_rep(a: &OrderedIntSet, b: &OrderedIntSet) -> Result<RepFunction> {
    sum_rep_within(a, b, DEFAULT_PAIR_BUDGET)
}

/// `A∗B(x) = #{(a, b) : a + b = x}`.
pub fn sum_rep_within(a: &OrderedIntSet, b: &OrderedIntSet, budget: u64) -> Result<RepFunction> {
    within_budget(a.len() as u128 * b.len() as u128, budget)?;
    let merge = ShiftMerge::new(a.elements(), None, b.elements().to_vec())?;
    Ok(RepFunction::collect(RepKind::Sum, vec![a.len(), b.len()], merge))
}

pub fn iterated_sum_rep(a: &OrderedIntSet, k: u32) -> Result<RepFunction> {
    iterated_sum_rep_within(a, k, DEFAULT_PAIR_BUDGET)
}

/// The `k`-fold convolution `A∗⋯∗A`, for `k` in `2..=4`. The budget bounds
/// the total number of merged entries over all steps.
pub fn iterated_sum_rep_within(a: &OrderedIntSet, k: u32, budget: u64) -> Result<RepFunction> {
    check_t_order(k)?;
    let (acc, _) = accumulate(a, k, budget, 0)?;
    Ok(RepFunction { kind: RepKind::IteratedSum(k), ..acc })
}

fn check_t_order(k: u32) -> Result<()> {
    if (2..=4).contains(&k) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("iterated convolution order {k} outside 2..=4")))
    }
}

/// Builds the `k`-fold table, returning it with the number of merged entries.
fn accumulate(a: &OrderedIntSet, k: u32, budget: u64, spent: u128) -> Result<(RepFunction, u128)> {
    let n = a.len() as u128;
    let mut spent = spent + n * n;
    within_budget(spent, budget)?;
    let mut acc = sum_rep_within(a, a, u64::MAX)?;
    for step in 3..=k {
        spent += acc.len() as u128 * n;
        within_budget(spent, budget)?;
        let merge = ShiftMerge::new(&acc.keys, Some(&acc.counts), a.elements().to_vec())?;
        acc = RepFunction::collect(RepKind::IteratedSum(step), vec![a.len(); step as usize], merge);
    }
    Ok((acc, spent))
}

fn checked_pow(c: u64, k: u32) -> Result<u128> {
    (c as u128).checked_pow(k).ok_or(Error::Overflow("energy term"))
}

fn fold_power(mut values: impl Iterator<Item = u64>, k: u32) -> Result<u128> {
    values.try_fold(0u128, |acc, c| {
        acc.checked_add(checked_pow(c, k)?).ok_or(Error::Overflow("energy sum"))
    })
}

/// Either an exact integer moment or a floating approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnergyValue {
    Exact(u128),
    Real(f64),
}

impl EnergyValue {
    pub fn as_f64(self) -> f64 {
        match self {
            EnergyValue::Exact(v) => v as f64,
            EnergyValue::Real(v) => v,
        }
    }

    pub fn exact(self) -> Option<u128> {
        match self {
            EnergyValue::Exact(v) => Some(v),
            EnergyValue::Real(_) => None,
        }
    }
}

/// `Σ_x rep(x)^k`. Integer `k` takes the exact path.
pub fn energy(rep: &RepFunction, k: f64) -> Result<EnergyValue> {
    if !k.is_finite() || k < 1.0 {
        return Err(Error::Precondition(format!("energy order {k} must be a finite real >= 1")));
    }
    if k.fract() == 0.0 && k <= u32::MAX as f64 {
        energy_exact(rep, k as u32).map(EnergyValue::Exact)
    } else {
        Ok(EnergyValue::Real(energy_real(rep, k)))
    }
}

pub fn energy_exact(rep: &RepFunction, k: u32) -> Result<u128> {
    fold_power(rep.counts.iter().copied(), k)
}

/// Compensated (Neumaier) summation of `rep(x)^k`.
pub fn energy_real(rep: &RepFunction, k: f64) -> f64 {
    neumaier(rep.counts.iter().map(|&c| (c as f64).powf(k)))
}

pub(crate) fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

pub fn t_energy(a: &OrderedIntSet, k: u32) -> Result<u128> {
    t_energy_within(a, k, DEFAULT_PAIR_BUDGET)
}

/// `T_k(A) = Σ_x (A∗⋯∗A)(x)^2`. The last convolution step is streamed and
/// never stored.
pub fn t_energy_within(a: &OrderedIntSet, k: u32, budget: u64) -> Result<u128> {
    check_t_order(k)?;
    let n = a.len() as u128;
    if k == 2 {
        within_budget(n * n, budget)?;
        let merge = ShiftMerge::new(a.elements(), None, a.elements().to_vec())?;
        return fold_power(merge.map(|(_, c)| c), 2);
    }
    let (acc, spent) = accumulate(a, k - 1, budget, 0)?;
    within_budget(spent + acc.len() as u128 * n, budget)?;
    let merge = ShiftMerge::new(&acc.keys, Some(&acc.counts), a.elements().to_vec())?;
    fold_power(merge.map(|(_, c)| c), 2)
}

/// `E_k(A, B) = Σ_x (A∘B)(x)^k`.
pub fn cross_energy(a: &OrderedIntSet, b: &OrderedIntSet, k: f64) -> Result<EnergyValue> {
    energy(&difference_rep(a, b)?, k)
}

/// Integer-order cross energy streamed without materializing `A∘B`.
pub fn cross_energy_exact(a: &OrderedIntSet, b: &OrderedIntSet, k: u32, budget: u64) -> Result<u128> {
    cross_energy_sorted(a.elements(), b.elements(), k, budget)
}

/// Same as [`cross_energy_exact`] on raw strictly increasing slices; lets
/// callers pass supports that may be empty.
pub fn cross_energy_sorted(a: &[i64], b: &[i64], k: u32, budget: u64) -> Result<u128> {
    within_budget(a.len() as u128 * b.len() as u128, budget)?;
    let merge = ShiftMerge::new(a, None, b.iter().map(|&x| -x).collect())?;
    fold_power(merge.map(|(_, c)| c), k)
}

/// `E_3(A, A, S) = Σ_x (A∘A)(x)^2 (S∘S)(x)`, given `A∘A`.
pub fn triple_energy_weighted_with(diff: &RepFunction, s: &[i64], budget: u64) -> Result<u128> {
    within_budget(s.len() as u128 * s.len() as u128, budget)?;
    let merge = ShiftMerge::new(s, None, s.iter().map(|&x| -x).collect())?;
    let mut i = 0;
    let mut total: u128 = 0;
    for (x, c) in merge {
        while i < diff.keys.len() && diff.keys[i] < x {
            i += 1;
        }
        if i == diff.keys.len() {
            break;
        }
        if diff.keys[i] == x {
            let w = checked_pow(diff.counts[i], 2)?;
            let term = w.checked_mul(c as u128).ok_or(Error::Overflow("triple energy"))?;
            total = total.checked_add(term).ok_or(Error::Overflow("triple energy"))?;
        }
    }
    Ok(total)
}

pub fn triple_energy_weighted(a: &OrderedIntSet, s: &OrderedIntSet) -> Result<u128> {
    let diff = difference_rep(a, a)?;
    triple_energy_weighted_with(&diff, s.elements(), DEFAULT_PAIR_BUDGET)
}

/// One fractional moment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalEnergy {
    pub k: f64,
    pub value: f64,
}

/// Exponents evaluated on the floating path of every profile.
pub const FRACTIONAL_ORDERS: [f64; 3] = [2.0, 8.0 / 3.0, 3.0];

/// Energies of one set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    pub n: usize,
    /// `|A - A|`.
    pub support: usize,
    #[serde(with = "wide_u128")]
    pub e2: u128,
    #[serde(with = "wide_u128")]
    pub e3: u128,
    pub e_fractional: Vec<FractionalEnergy>,
    #[serde(with = "wide_u128")]
    pub t2: u128,
    /// Absent when the set is larger than the configured cap or budget.
    #[serde(with = "wide_u128_opt", default, skip_serializing_if = "Option::is_none")]
    pub t4: Option<u128>,
}

/// Relative agreement required between the floating and exact paths.
pub const FRACTIONAL_TOLERANCE: f64 = 1e-12;

impl EnergyProfile {
    pub fn compute(a: &OrderedIntSet, budgets: &Budgets) -> Result<Self> {
        let diff = difference_rep_within(a, a, budgets.pairs)?;
        Self::from_rep(a, &diff, budgets)
    }

    /// Reuses an existing `A∘A`.
    pub fn from_rep(a: &OrderedIntSet, diff: &RepFunction, budgets: &Budgets) -> Result<Self> {
        let e_fractional = FRACTIONAL_ORDERS
            .iter()
            .map(|&k| FractionalEnergy { k, value: energy_real(diff, k) })
            .collect();
        let t4 = if a.len() <= budgets.t4_max_n {
            match t_energy_within(a, 4, budgets.pairs) {
                Ok(v) => Some(v),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let profile = Self {
            n: a.len(),
            support: diff.len(),
            e2: energy_exact(diff, 2)?,
            e3: energy_exact(diff, 3)?,
            e_fractional,
            t2: t_energy_within(a, 2, budgets.pairs)?,
            t4,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn fractional(&self, k: f64) -> Option<f64> {
        self.e_fractional.iter().find(|f| f.k == k).map(|f| f.value)
    }

    /// Checks the identities every correct profile satisfies.
    pub fn validate(&self) -> Result<()> {
        if self.e2 != self.t2 {
            return Err(Error::Invariant(format!("E = {} but T_2 = {}", self.e2, self.t2)));
        }
        // Hölder: (Σ r^2)^2 <= Σ r · Σ r^3, and Σ r = n^2.
        let n2 = (self.n as u128) * (self.n as u128);
        let lhs = self.e3.checked_mul(n2).ok_or(Error::Overflow("power mean"))?;
        let rhs = self.e2.checked_mul(self.e2).ok_or(Error::Overflow("power mean"))?;
        if lhs < rhs {
            return Err(Error::Invariant(format!("E_3 * n^2 = {lhs} < E^2 = {rhs}")));
        }
        for (k, exact) in [(2.0, self.e2), (3.0, self.e3)] {
            if let Some(v) = self.fractional(k) {
                let exact = exact as f64;
                if (v - exact).abs() > FRACTIONAL_TOLERANCE * exact {
                    return Err(Error::Invariant(format!("E_{k} floating {v} vs exact {exact}")));
                }
            }
        }
        Ok(())
    }
}
