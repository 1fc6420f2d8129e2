//! Popularity sets, dyadic band decompositions, convolution operators on
//! `A × B` and their principal eigenvalues, and sorted-count decay profiles.

use serde::Serialize;
use std::fmt::Write as _;

use crate::energy::{RepFunction, RepKind};
use crate::error::{Error, Result};
use crate::par;
use crate::set::OrderedIntSet;
use crate::wire::wide_u128;
use crate::{within_budget, DEFAULT_MATRIX_BUDGET};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_DECAY_EXPONENT: f64 = 3.0 / 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SliceMode {
    /// `{x : rep(x) >= τ}`.
    Threshold,
    /// `{x : Δ <= rep(x) < 2Δ}`.
    DyadicBand,
}

/// A popularity set or dyadic band of a representation function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PopularitySlice {
    pub mode: SliceMode,
    /// `τ` in threshold mode, `Δ` in band mode.
    pub level: u64,
    /// Ascending; may be empty.
    pub support: Vec<i64>,
    /// `Σ rep(x)^2` over the support.
    #[serde(with = "wide_u128")]
    pub mass: u128,
    pub source_kind: RepKind,
}

impl PopularitySlice {
    fn from_filter(rep: &RepFunction, mode: SliceMode, level: u64, keep: impl Fn(u64) -> bool) -> Self {
        let mut support = Vec::new();
        let mut mass = 0u128;
        for (x, c) in rep.iter().filter(|&(_, c)| keep(c)) {
            support.push(x);
            mass += c as u128 * c as u128;
        }
        Self { mode, level, support, mass, source_kind: rep.kind() }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// The support as a set; fails when empty.
    pub fn as_set(&self) -> Result<OrderedIntSet> {
        OrderedIntSet::new(self.support.clone())
    }

    /// Checks the defining membership condition and the mass against `rep`.
    pub fn is_consistent_with(&self, rep: &RepFunction) -> bool {
        let mut mass = 0u128;
        for &x in &self.support {
            let c = rep.get(x);
            let inside = match self.mode {
                SliceMode::Threshold => c >= self.level,
                SliceMode::DyadicBand => c >= self.level && c < 2 * self.level,
            };
            if !inside {
                return false;
            }
            mass += c as u128 * c as u128;
        }
        mass == self.mass
    }
}

/// `S_τ = {x : rep(x) >= τ}`.
pub fn popularity_set(rep: &RepFunction, tau: u64) -> Result<PopularitySlice> {
    if tau == 0 {
        return Err(Error::Precondition("popularity threshold must be at least 1".into()));
    }
    Ok(PopularitySlice::from_filter(rep, SliceMode::Threshold, tau, |c| c >= tau))
}

/// Thresholds `1, 2, 4, …` up to the largest count.
pub fn dyadic_levels(rep: &RepFunction) -> Vec<u64> {
    let max = rep.max_count();
    let mut levels = Vec::new();
    let mut t = 1u64;
    while t <= max {
        levels.push(t);
        match t.checked_mul(2) {
            Some(next) => t = next,
            None => break,
        }
    }
    levels
}

/// Non-empty bands `[2^t, 2^{t+1})` partitioning the support by count.
pub fn dyadic_slices(rep: &RepFunction) -> Vec<PopularitySlice> {
    let levels = dyadic_levels(rep);
    let mut buckets: Vec<(Vec<i64>, u128)> = vec![(Vec::new(), 0); levels.len()];
    for (x, c) in rep.iter() {
        let t = (63 - c.leading_zeros()) as usize;
        buckets[t].0.push(x);
        buckets[t].1 += c as u128 * c as u128;
    }
    levels
        .into_iter()
        .zip(buckets)
        .filter(|(_, (support, _))| !support.is_empty())
        .map(|(level, (support, mass))| PopularitySlice {
            mode: SliceMode::DyadicBand,
            level,
            support,
            mass,
            source_kind: rep.kind(),
        })
        .collect()
}

/// The band of largest mass among those anchored at `Δ ∈ [lower, upper]`.
/// Ties go to the smaller `Δ`.
pub fn heaviest_slice(rep: &RepFunction, lower: f64, upper: f64) -> Result<PopularitySlice> {
    if lower.is_nan() || upper.is_nan() || lower > upper {
        return Err(Error::Precondition(format!("empty interval [{lower}, {upper}]")));
    }
    dyadic_slices(rep)
        .into_iter()
        .filter(|s| (s.level as f64) >= lower && (s.level as f64) <= upper)
        .fold(None::<PopularitySlice>, |best, s| match best {
            Some(b) if b.mass >= s.mass => Some(b),
            _ => Some(s),
        })
        .ok_or(Error::EmptyRange { lower, upper })
}

/// Weight function of an operator.
#[derive(Clone, Copy, Debug)]
pub enum Weight<'a> {
    Rep(&'a RepFunction),
    Indicator(&'a OrderedIntSet),
}

impl Weight<'_> {
    pub fn at(&self, x: i64) -> u64 {
        match self {
            Weight::Rep(r) => r.get(x),
            Weight::Indicator(s) => s.contains(x) as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorMode {
    /// Entry `g(a - b)`.
    Difference,
    /// Entry `g(a + b)`.
    Sum,
}

/// Dense `|A| × |B|` operator, rows and columns in ascending element order.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    rows: Vec<i64>,
    cols: Vec<i64>,
    mode: OperatorMode,
    data: Vec<f64>,
}

impl OperatorMatrix {
    pub fn dims(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn mode(&self) -> OperatorMode {
        self.mode
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.cols.len();
        &self.data[i * m..(i + 1) * m]
    }

    pub fn is_symmetric(&self) -> bool {
        let (r, c) = self.dims();
        r == c && (0..r).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    /// `1ᵀ M 1`.
    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        par::fill(out, |i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum());
    }

    fn mul_transpose_vec(&self, x: &[f64], out: &mut [f64]) {
        let r = self.rows.len();
        par::fill(out, |j| (0..r).map(|i| self.entry(i, j) * x[i]).sum());
    }

    /// Dense CSV: a header of column elements, then one row per element of A.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for c in &self.cols {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(out, "{r}");
            for v in self.row(i) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn operator_matrix(a: &OrderedIntSet, b: &OrderedIntSet, g: Weight<'_>, mode: OperatorMode) -> Result<OperatorMatrix> {
    operator_matrix_within(a, b, g, mode, DEFAULT_MATRIX_BUDGET)
}

/// `T(x, y) = A(x) B(y) g(x ∓ y)` restricted to `A × B`.
pub fn operator_matrix_within(
    a: &OrderedIntSet,
    b: &OrderedIntSet,
    g: Weight<'_>,
    mode: OperatorMode,
    budget: u64,
) -> Result<OperatorMatrix> {
    within_budget(a.len() as u128 * b.len() as u128, budget)?;
    let cols = b.elements().to_vec();
    let m = cols.len();
    let mut data = vec![0.0; a.len() * m];
    let rows = a.elements();
    par::fill(&mut data, |idx| {
        let (x, y) = (rows[idx / m], cols[idx % m]);
        let key = match mode {
            OperatorMode::Difference => x - y,
            OperatorMode::Sum => x + y,
        };
        g.at(key) as f64
    });
    Ok(OperatorMatrix { rows: rows.to_vec(), cols, mode, data })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrincipalEigen {
    pub value: f64,
    pub iterations: usize,
    /// Relative change of the last Rayleigh quotient.
    pub gap: f64,
    /// False when the value came from `MᵀM` (largest singular value).
    pub symmetric: bool,
}

/// Dominant eigenvalue by power iteration from the all-ones vector.
///
/// Converged once successive Rayleigh quotients differ by less than `tol`
/// relatively. A non-symmetric input is replaced by `MᵀM` and the square
/// root of its dominant eigenvalue (the top singular value) is returned.
pub fn principal_eigenvalue(m: &OperatorMatrix, tol: f64, max_iter: usize) -> Result<PrincipalEigen> {
    let symmetric = m.is_symmetric();
    let dim = m.dims().1;
    if dim == 0 || m.dims().0 == 0 {
        return Err(Error::Precondition("empty operator".into()));
    }
    let mut x = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut y = vec![0.0; dim];
    let mut tmp = vec![0.0; m.dims().0];
    let mut prev = f64::NAN;
    let mut gap = f64::INFINITY;
    for iter in 1..=max_iter {
        if symmetric {
            m.mul_vec(&x, &mut y);
        } else {
            m.mul_vec(&x, &mut tmp);
            m.mul_transpose_vec(&tmp, &mut y);
        }
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(PrincipalEigen { value: 0.0, iterations: iter, gap: 0.0, symmetric });
        }
        if prev.is_finite() {
            gap = (rq - prev).abs() / rq.abs().max(f64::MIN_POSITIVE);
            if gap < tol {
                let value = if symmetric { rq } else { rq.sqrt() };
                return Ok(PrincipalEigen { value, iterations: iter, gap, symmetric });
            }
        }
        prev = rq;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(Error::NonConvergence { iterations: max_iter, last: prev, gap })
}

/// Counts sorted descending, with the largest value of
/// `counts[j] · j^exponent / n` over 1-based ranks `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    pub sorted_counts: Vec<u64>,
    pub exponent: f64,
    pub n: usize,
    pub sup_constant: f64,
    /// 1-based rank attaining the supremum.
    pub argmax: usize,
}

/// Decay profile against `n = |A|`, the first operand's size.
pub fn decay_profile(rep: &RepFunction) -> DecayProfile {
    decay_profile_with(rep, DEFAULT_DECAY_EXPONENT)
}

pub fn decay_profile_with(rep: &RepFunction, exponent: f64) -> DecayProfile {
    let n = rep.operand_sizes().first().copied().unwrap_or(1).max(1);
    let mut sorted_counts = rep.counts().to_vec();
    sorted_counts.sort_unstable_by(|a, b| b.cmp(a));
    let mut sup_constant = 0.0;
    let mut argmax = 0;
    // Within a run of equal counts the score grows with j, so only run ends
    // can attain the supremum.
    for (i, &c) in sorted_counts.iter().enumerate() {
        let run_end = sorted_counts.get(i + 1).is_none_or(|&next| next != c);
        if run_end {
            let j = i + 1;
            let v = c as f64 * (j as f64).powf(exponent) / n as f64;
            if v > sup_constant {
                sup_constant = v;
                argmax = j;
            }
        }
    }
    DecayProfile { sorted_counts, exponent, n, sup_constant, argmax }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{difference_rep, energy_exact, sum_rep};

    fn set(v: &[i64]) -> OrderedIntSet {
        OrderedIntSet::new(v.to_vec()).unwrap()
    }

    fn diff(v: &[i64]) -> RepFunction {
        let a = set(v);
        difference_rep(&a, &a).unwrap()
    }

    #[test]
    fn popularity_sets() {
        let rep = diff(&[0, 1, 4, 8]);
        let s2 = popularity_set(&rep, 2).unwrap();
        assert_eq!(s2.support, vec![-4, 0, 4]);
        assert_eq!(s2.mass, 24);
        assert!(s2.is_consistent_with(&rep));
        assert_eq!(popularity_set(&rep, 1).unwrap().len(), 11);
        assert!(popularity_set(&rep, 5).unwrap().is_empty());
        assert!(popularity_set(&rep, 0).is_err());
    }

    #[test]
    fn dyadic_bands() {
        let rep = diff(&[0, 1, 4, 8]);
        let bands = dyadic_slices(&rep);
        let summary: Vec<_> = bands.iter().map(|b| (b.level, b.len(), b.mass)).collect();
        assert_eq!(summary, vec![(1, 8, 8), (2, 2, 8), (4, 1, 16)]);
        assert!(bands.iter().all(|b| b.is_consistent_with(&rep)));

        let ap = dyadic_slices(&diff(&[0, 1, 2]));
        let summary: Vec<_> = ap.iter().map(|b| (b.level, b.mass)).collect();
        assert_eq!(summary, vec![(1, 2), (2, 17)]);

        let single = dyadic_slices(&diff(&[0]));
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].mass, 1);
    }

    #[test]
    fn heaviest_band() {
        let rep = diff(&[0, 1, 4, 8]);
        let h = heaviest_slice(&rep, 1.0, 16.0).unwrap();
        assert_eq!((h.level, h.mass), (4, 16));
        assert!(h.mass * 3 >= 32);
        let h = heaviest_slice(&rep, 2.0, 2.0).unwrap();
        assert_eq!((h.level, h.mass), (2, 8));
        assert!(matches!(heaviest_slice(&rep, 100.0, 200.0), Err(Error::EmptyRange { .. })));
    }

    #[test]
    fn operators() {
        let a = set(&[0, 1]);
        let rep = diff(&[0, 1]);
        let m = operator_matrix(&a, &a, Weight::Rep(&rep), OperatorMode::Difference).unwrap();
        assert_eq!(m.to_csv(), "row,0,1\n0,2,1\n1,1,2\n");
        let e = principal_eigenvalue(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert!((e.value - 3.0).abs() < 1e-9);

        let b = set(&[0, 1, 4, 8]);
        let rep = diff(&[0, 1, 4, 8]);
        let m = operator_matrix(&b, &b, Weight::Rep(&rep), OperatorMode::Difference).unwrap();
        assert!(m.is_symmetric());
        assert_eq!(m.entry(0, 2), 2.0);
        assert!((0..4).all(|i| m.entry(i, i) == 4.0));

        let zero = set(&[0]);
        let id = operator_matrix(&b, &b, Weight::Indicator(&zero), OperatorMode::Difference).unwrap();
        let e = principal_eigenvalue(&id, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_matches_dense_solver() {
        let a = set(&[0, 1, 4, 8]);
        let rep = diff(&[0, 1, 4, 8]);
        let m = operator_matrix(&a, &a, Weight::Rep(&rep), OperatorMode::Difference).unwrap();
        let dense = nalgebra::DMatrix::from_fn(4, 4, |i, j| m.entry(i, j));
        let oracle = dense.symmetric_eigen().eigenvalues.max();
        let got = principal_eigenvalue(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap().value;
        assert!((got - oracle).abs() < 1e-8 * oracle);
        assert!(got >= energy_exact(&rep, 2).unwrap() as f64 / 4.0);
    }

    #[test]
    fn rectangular_operator_uses_singular_value() {
        let a = set(&[0, 1, 4]);
        let b = set(&[0, 2]);
        let rep = sum_rep(&a, &b).unwrap();
        let m = operator_matrix(&a, &b, Weight::Rep(&rep), OperatorMode::Sum).unwrap();
        let dense = nalgebra::DMatrix::from_fn(3, 2, |i, j| m.entry(i, j));
        let oracle = dense.singular_values().max();
        let got = principal_eigenvalue(&m, 1e-14, DEFAULT_MAX_ITER).unwrap();
        assert!(!got.symmetric);
        assert!((got.value - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let a = set(&(0..6).map(|i| i * i).collect::<Vec<_>>());
        let rep = diff(a.elements());
        let m = operator_matrix(&a, &a, Weight::Rep(&rep), OperatorMode::Difference).unwrap();
        assert!(matches!(principal_eigenvalue(&m, 0.0, 3), Err(Error::NonConvergence { iterations: 3, .. })));
    }

    #[test]
    fn decay_profiles() {
        let d = decay_profile(&diff(&[0, 1, 4, 8]));
        assert_eq!(&d.sorted_counts[..4], &[4, 2, 2, 1]);
        assert_eq!(d.sup_constant, 1.0);
        assert_eq!(d.argmax, 1);
        assert_eq!(decay_profile(&diff(&[0])).sup_constant, 1.0);

        let a = set(&[0, 1, 4, 8]);
        let s = decay_profile(&sum_rep(&a, &a).unwrap());
        assert_eq!(s.sorted_counts, vec![3, 2, 2, 2, 2, 2, 1, 1, 1]);
        // Oracle: evaluate every rank.
        let oracle = s
            .sorted_counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * ((i + 1) as f64).powf(0.375) / 4.0)
            .fold(0.0, f64::max);
        assert_eq!(s.sup_constant, oracle);
        assert_eq!(s.argmax, 6);
    }
}
