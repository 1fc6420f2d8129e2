//! Finite ordered integer sets and their discrete derivatives.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::energy::{difference_rep_within, sum_rep_within};
use crate::error::{Error, Result};
use crate::wire::{self, WideInt};
use crate::DEFAULT_PAIR_BUDGET;

/// Largest element magnitude accepted. Pairwise sums and differences of
/// admissible elements stay inside `i64`.
pub const MAX_MAGNITUDE: i64 = 1 << 61;

/// Number of derivative levels classified when a set is built.
pub const CACHED_DEPTH: usize = 4;

/// Sign pattern of one derivative level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    StrictlyPositive,
    StrictlyNegative,
    NonNegative,
    NonPositive,
    Zero,
    Mixed,
}

impl Sign {
    pub fn classify(values: &[i128]) -> Sign {
        let pos = values.iter().any(|&v| v > 0);
        let neg = values.iter().any(|&v| v < 0);
        let zero = values.contains(&0);
        match (pos, neg, zero) {
            (true, true, _) => Sign::Mixed,
            (true, false, false) => Sign::StrictlyPositive,
            (true, false, true) => Sign::NonNegative,
            (false, true, false) => Sign::StrictlyNegative,
            (false, true, true) => Sign::NonPositive,
            (false, false, _) => Sign::Zero,
        }
    }

    /// Every entry is `>= 0`.
    pub fn is_nonnegative(self) -> bool {
        matches!(self, Sign::StrictlyPositive | Sign::NonNegative | Sign::Zero)
    }

    /// Every entry is `<= 0`.
    pub fn is_nonpositive(self) -> bool {
        matches!(self, Sign::StrictlyNegative | Sign::NonPositive | Sign::Zero)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::StrictlyPositive => "+",
            Sign::StrictlyNegative => "-",
            Sign::NonNegative => ">=0",
            Sign::NonPositive => "<=0",
            Sign::Zero => "0",
            Sign::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

/// Sign classification of derivative levels `1..=depth`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct DerivativeSignature {
    levels: Vec<Sign>,
}

impl DerivativeSignature {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Sign of level `k` (1-based), if it was computed.
    pub fn level(&self, k: usize) -> Option<Sign> {
        k.checked_sub(1).and_then(|i| self.levels.get(i)).copied()
    }

    pub fn levels(&self) -> &[Sign] {
        &self.levels
    }

    /// Strictly increasing gaps.
    pub fn is_convex(&self) -> bool {
        self.level(2) == Some(Sign::StrictlyPositive)
    }

    /// Convex with strictly negative third derivative.
    pub fn is_convex_negative_third(&self) -> bool {
        self.is_convex() && self.level(3) == Some(Sign::StrictlyNegative)
    }

    /// Convex with non-positive third derivative.
    pub fn is_convex_nonpositive_third(&self) -> bool {
        self.is_convex() && self.level(3).is_some_and(Sign::is_nonpositive)
    }

    /// Convex, strictly negative third and non-positive fourth derivative.
    pub fn is_convex_negative_third_nonpositive_fourth(&self) -> bool {
        self.is_convex_negative_third() && self.level(4).is_some_and(Sign::is_nonpositive)
    }
}

/// A finite, strictly increasing sequence of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedIntSet {
    elements: Vec<i64>,
    signature: DerivativeSignature,
}

impl OrderedIntSet {
    /// Sorts `values` and rejects duplicates and out-of-range magnitudes.
    pub fn new(values: impl Into<Vec<i64>>) -> Result<Self> {
        let mut elements = values.into();
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(&v) = elements.iter().find(|v| v.unsigned_abs() > MAX_MAGNITUDE as u64) {
            return Err(Error::OverflowRisk { value: v as i128 });
        }
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0]));
        }
        Ok(Self::from_sorted(elements))
    }

    /// Builds from a sequence already known to be strictly increasing and in range.
    pub(crate) fn from_sorted(elements: Vec<i64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        let depth = CACHED_DEPTH.min(elements.len() - 1);
        let signature = signature_of(&elements, depth).expect("cached depth is always in range");
        Self { elements, signature }
    }

    /// Same as [`OrderedIntSet::new`] but accepts wide values, as produced by
    /// integrating derivative profiles.
    pub fn from_wide(values: &[i128]) -> Result<Self> {
        let narrowed = values
            .iter()
            .map(|&v| {
                if v.unsigned_abs() > MAX_MAGNITUDE as u128 {
                    Err(Error::OverflowRisk { value: v })
                } else {
                    Ok(v as i64)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(narrowed)
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn min(&self) -> i64 {
        self.elements[0]
    }

    pub fn max(&self) -> i64 {
        self.elements[self.elements.len() - 1]
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Signature of levels `1..=min(4, n-1)`, computed at construction.
    pub fn cached_signature(&self) -> &DerivativeSignature {
        &self.signature
    }

    /// `k`-fold forward difference, of length `n - k`.
    pub fn derivative(&self, k: usize) -> Result<Vec<i128>> {
        derivative_of(&self.elements, k)
    }

    pub fn signature(&self, depth: usize) -> Result<DerivativeSignature> {
        if depth <= self.signature.depth() && depth >= 1 {
            return Ok(DerivativeSignature { levels: self.signature.levels[..depth].to_vec() });
        }
        signature_of(&self.elements, depth)
    }

    /// True iff all second differences are pairwise distinct.
    pub fn second_differences_distinct(&self) -> Result<bool> {
        let mut d2 = self.derivative(2)?;
        d2.sort_unstable();
        Ok(d2.windows(2).all(|w| w[0] != w[1]))
    }

    pub fn sumset(&self, other: &OrderedIntSet) -> Result<OrderedIntSet> {
        sum_rep_within(self, other, DEFAULT_PAIR_BUDGET)?.support_set()
    }

    pub fn difference_set(&self, other: &OrderedIntSet) -> Result<OrderedIntSet> {
        difference_rep_within(self, other, DEFAULT_PAIR_BUDGET)?.support_set()
    }

    /// `A + c`.
    pub fn translate(&self, c: i64) -> Result<OrderedIntSet> {
        let wide: Vec<i128> = self.elements.iter().map(|&a| a as i128 + c as i128).collect();
        Self::from_wide(&wide)
    }

    /// `d * A` for `d >= 1`.
    pub fn dilate(&self, d: i64) -> Result<OrderedIntSet> {
        if d < 1 {
            return Err(Error::Precondition(format!("dilation factor {d} must be positive")));
        }
        let wide: Vec<i128> = self.elements.iter().map(|&a| a as i128 * d as i128).collect();
        Self::from_wide(&wide)
    }
}

fn derivative_of(elements: &[i64], k: usize) -> Result<Vec<i128>> {
    let n = elements.len();
    if k == 0 {
        return Err(Error::Precondition("derivative order must be positive".into()));
    }
    if k >= n {
        return Err(Error::OrderTooHigh { k, n });
    }
    let mut level: Vec<i128> = elements.iter().map(|&a| a as i128).collect();
    for _ in 0..k {
        level = level
            .windows(2)
            .map(|w| w[1].checked_sub(w[0]).ok_or(Error::Overflow("derivative")))
            .collect::<Result<_>>()?;
    }
    Ok(level)
}

fn signature_of(elements: &[i64], depth: usize) -> Result<DerivativeSignature> {
    let n = elements.len();
    if depth >= n {
        return Err(Error::OrderTooHigh { k: depth, n });
    }
    let mut levels = Vec::with_capacity(depth);
    let mut level: Vec<i128> = elements.iter().map(|&a| a as i128).collect();
    for _ in 0..depth {
        level = level
            .windows(2)
            .map(|w| w[1].checked_sub(w[0]).ok_or(Error::Overflow("derivative")))
            .collect::<Result<_>>()?;
        levels.push(Sign::classify(&level));
    }
    Ok(DerivativeSignature { levels })
}

impl Serialize for OrderedIntSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.elements.len()))?;
        for &v in &self.elements {
            seq.serialize_element(&JsonI64(v))?;
        }
        seq.end()
    }
}

struct JsonI64(i64);

impl Serialize for JsonI64 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        wire::ser_i64(self.0, s)
    }
}

impl<'de> Deserialize<'de> for OrderedIntSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<WideInt> = Vec::deserialize(d)?;
        let wide: Vec<i128> = raw.into_iter().map(|w| w.0).collect();
        OrderedIntSet::from_wide(&wide).map_err(serde::de::Error::custom)
    }
}

/// Serializes any `i64` slice in the same wire form as a set.
pub fn ints_to_json(values: &[i64]) -> String {
    let wrapped: Vec<JsonI64> = values.iter().map(|&v| JsonI64(v)).collect();
    serde_json::to_string(&wrapped).expect("integers always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::*;

    fn set(v: &[i64]) -> OrderedIntSet {
        OrderedIntSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn construction_sorts_and_rejects_duplicates() {
        assert_eq!(set(&[0, 1, 3]).elements(), &[0, 1, 3]);
        assert_eq!(set(&[8, 0, 4, 1]).elements(), &[0, 1, 4, 8]);
        assert!(matches!(OrderedIntSet::new(vec![0, 0, 1]), Err(Error::DuplicateElement(0))));
        assert!(matches!(OrderedIntSet::new(Vec::new()), Err(Error::EmptySet)));
        assert!(matches!(
            OrderedIntSet::new(vec![0, MAX_MAGNITUDE + 1]),
            Err(Error::OverflowRisk { .. })
        ));
        assert!(OrderedIntSet::new(vec![-MAX_MAGNITUDE, MAX_MAGNITUDE]).is_ok());
    }

    #[test]
    fn derivatives() {
        let a = set(&[0, 1, 4, 8]);
        assert_eq!(a.derivative(1).unwrap(), vec![1, 3, 4]);
        assert_eq!(a.derivative(2).unwrap(), vec![2, 1]);
        assert_eq!(a.derivative(3).unwrap(), vec![-1]);
        assert!(matches!(a.derivative(4), Err(Error::OrderTooHigh { k: 4, n: 4 })));
    }

    #[test]
    fn signatures() {
        let a = set(&[0, 1, 4, 8]);
        assert_eq!(a.signature(3).unwrap().levels(), &[StrictlyPositive, StrictlyPositive, StrictlyNegative]);
        assert!(a.cached_signature().is_convex_negative_third());

        let ap = set(&[0, 1, 2]);
        assert_eq!(ap.signature(2).unwrap().levels(), &[StrictlyPositive, Zero]);
        assert!(!ap.cached_signature().is_convex());

        let b = set(&[0, 2, 3]);
        assert_eq!(b.signature(2).unwrap().levels(), &[StrictlyPositive, StrictlyNegative]);
        assert!(!b.cached_signature().is_convex());

        assert!(matches!(b.signature(3), Err(Error::OrderTooHigh { .. })));
        assert_eq!(set(&[5]).cached_signature().depth(), 0);
    }

    #[test]
    fn sign_classes() {
        assert_eq!(Sign::classify(&[0, 1]), NonNegative);
        assert_eq!(Sign::classify(&[0, -1]), NonPositive);
        assert_eq!(Sign::classify(&[1, -1]), Mixed);
        assert_eq!(Sign::classify(&[0, 0]), Zero);
        assert!(Zero.is_nonpositive() && Zero.is_nonnegative());
    }

    #[test]
    fn distinct_second_differences() {
        assert!(set(&[0, 1, 4, 8]).second_differences_distinct().unwrap());
        assert!(!set(&[0, 1, 3, 6]).second_differences_distinct().unwrap());
        assert!(matches!(set(&[0, 1]).second_differences_distinct(), Err(Error::OrderTooHigh { .. })));
    }

    #[test]
    fn sums_and_differences() {
        let a = set(&[0, 1, 3]);
        assert_eq!(a.sumset(&set(&[0])).unwrap(), a);
        assert_eq!(a.sumset(&a).unwrap().elements(), &[0, 1, 2, 3, 4, 6]);

        let b = set(&[0, 1, 4, 8]);
        assert_eq!(b.sumset(&b).unwrap().len(), 9);
        assert_eq!(
            b.difference_set(&b).unwrap().elements(),
            &[-8, -7, -4, -3, -1, 0, 1, 3, 4, 7, 8]
        );
        assert_eq!(set(&[0]).difference_set(&set(&[0])).unwrap().elements(), &[0]);
        assert_eq!(set(&[0, 1]).difference_set(&set(&[5])).unwrap().elements(), &[-5, -4]);
    }

    #[test]
    fn json_round_trip_keeps_large_values() {
        let a = set(&[-(1 << 60), 3, 1 << 55]);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, "[\"-1152921504606846976\",3,\"36028797018963968\"]");
        let back: OrderedIntSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<OrderedIntSet>("[1,1]").is_err());
    }
}
