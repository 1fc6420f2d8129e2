//! Seeded constructions of convex sets with prescribed derivative signs.
//!
//! Every generator integrates a derivative profile back down to elements and
//! verifies the resulting signature before returning.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::OrderedIntSet;

/// Scale doublings attempted by [`power_law`] before giving up.
pub const POWER_LAW_RETRIES: u32 = 10;
/// Default bound on the magnitude of sampled deepest-level entries.
pub const DEFAULT_MAX_STEP: i64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    FromSecondDifferences,
    PowerLaw,
    RandomProfile,
    MinimalProfile,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::FromSecondDifferences => "from-second-differences",
            Family::PowerLaw => "power-law",
            Family::RandomProfile => "random-profile",
            Family::MinimalProfile => "minimal-profile",
        }
    }
}

/// Derivative-sign class requested from [`random_profile`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    /// Second derivative strictly positive.
    #[serde(rename = "d2+")]
    Convex,
    /// Second strictly positive, third strictly negative.
    #[serde(rename = "d2+d3-")]
    NegativeThird,
    /// As above with a non-positive fourth derivative.
    #[serde(rename = "d2+d3-d4<=0")]
    NegativeThirdNonpositiveFourth,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Convex => "d2+",
            Profile::NegativeThird => "d2+d3-",
            Profile::NegativeThirdNonpositiveFourth => "d2+d3-d4<=0",
        }
    }

    fn min_len(self) -> usize {
        match self {
            Profile::Convex => 3,
            Profile::NegativeThird => 4,
            Profile::NegativeThirdNonpositiveFourth => 5,
        }
    }

    fn admits(self, set: &OrderedIntSet) -> bool {
        let sig = set.cached_signature();
        match self {
            Profile::Convex => sig.is_convex(),
            Profile::NegativeThird => sig.is_convex_negative_third(),
            Profile::NegativeThirdNonpositiveFourth => sig.is_convex_negative_third_nonpositive_fourth(),
        }
    }
}

/// Family-specific knobs; unused fields are ignored by other families.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d0: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_differences: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: GeneratorParams,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self { family, n, seed: None, params: GeneratorParams::default() }
    }

    pub fn power_law(n: usize, alpha: f64) -> Self {
        let mut spec = Self::new(Family::PowerLaw, n);
        spec.params.alpha = Some(alpha);
        spec
    }

    pub fn random(n: usize, profile: Profile, seed: u64) -> Self {
        let mut spec = Self::new(Family::RandomProfile, n);
        spec.seed = Some(seed);
        spec.params.profile = Some(profile);
        spec
    }

    /// Family name with shape parameters; sets sharing a label form one
    /// family for exponent fits.
    pub fn label(&self) -> String {
        match self.family {
            Family::PowerLaw => format!("power-law(alpha={})", self.params.alpha.unwrap_or(1.5)),
            Family::RandomProfile => {
                format!("random-profile({})", self.params.profile.unwrap_or(Profile::NegativeThird).name())
            }
            f => f.name().to_string(),
        }
    }

    /// Builds the set. `fallback_seed` is used when the spec carries none.
    pub fn generate(&self, fallback_seed: u64) -> Result<OrderedIntSet> {
        let p = &self.params;
        match self.family {
            Family::MinimalProfile => minimal_profile(self.n),
            Family::PowerLaw => {
                let alpha = p.alpha.unwrap_or(1.5);
                let scale = p.scale.unwrap_or_else(|| default_power_law_scale(self.n, alpha));
                power_law(self.n, alpha, scale)
            }
            Family::FromSecondDifferences => {
                let g = p.second_differences.as_deref().ok_or_else(|| {
                    Error::Precondition("from-second-differences needs params.second_differences".into())
                })?;
                if g.len() + 2 != self.n {
                    return Err(Error::Precondition(format!(
                        "{} second differences give {} elements, spec asks for {}",
                        g.len(),
                        g.len() + 2,
                        self.n
                    )));
                }
                from_second_differences(g, p.a0.unwrap_or(0), p.d0.unwrap_or(1))
            }
            Family::RandomProfile => {
                let mut rng = stream_rng(self.seed.unwrap_or(fallback_seed), 0);
                random_profile(
                    p.profile.unwrap_or(Profile::NegativeThird),
                    self.n,
                    p.a0.unwrap_or(0),
                    p.d0,
                    p.max_step.unwrap_or(DEFAULT_MAX_STEP),
                    &mut rng,
                )
            }
        }
    }
}

/// A corpus: generator specs in evaluation order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest(pub Vec<GeneratorSpec>);

/// Sizes of the default corpus.
pub const DEFAULT_CORPUS_SIZES: [usize; 8] = [16, 32, 64, 128, 256, 512, 1024, 2048];

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Minimal profiles and power laws with exponent 1.5 over the default sizes.
    pub fn default_corpus() -> Self {
        Self::families(&DEFAULT_CORPUS_SIZES)
    }

    pub fn families(sizes: &[usize]) -> Self {
        let mut specs = Vec::new();
        for &n in sizes {
            specs.push(GeneratorSpec::new(Family::MinimalProfile, n));
        }
        for &n in sizes {
            specs.push(GeneratorSpec::power_law(n, 1.5));
        }
        Manifest(specs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// ChaCha8 seeded from `seed`, positioned on an independent `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer; derives per-item seeds from a run seed.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Prefix sums of `diffs` starting from `start`; the output is one longer.
fn integrate(start: i128, diffs: &[i128]) -> Result<Vec<i128>> {
    let mut out = Vec::with_capacity(diffs.len() + 1);
    let mut acc = start;
    out.push(acc);
    for &d in diffs {
        acc = acc.checked_add(d).ok_or(Error::Overflow("integration"))?;
        out.push(acc);
    }
    Ok(out)
}

/// Integrates a profile down to a set, mapping magnitude failures to
/// profile violations.
fn integrate_set(a0: i64, gaps: &[i128]) -> Result<OrderedIntSet> {
    let elements = integrate(a0 as i128, gaps)?;
    OrderedIntSet::from_wide(&elements).map_err(|e| match e {
        Error::OverflowRisk { value } => {
            Error::ProfileViolation(format!("element {value} exceeds the magnitude headroom"))
        }
        other => other,
    })
}

/// The set with second differences `g`, first gap `d0` and first element `a0`.
pub fn from_second_differences(g: &[i64], a0: i64, d0: i64) -> Result<OrderedIntSet> {
    if g.is_empty() {
        return Err(Error::Precondition("need at least one second difference".into()));
    }
    if d0 < 1 {
        return Err(Error::Precondition(format!("first gap {d0} must be positive")));
    }
    if g.iter().any(|&x| x <= 0) || g.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ProfileViolation(format!("second differences {g:?} are not strictly decreasing and positive")));
    }
    let g: Vec<i128> = g.iter().map(|&x| x as i128).collect();
    let gaps = integrate(d0 as i128, &g)?;
    let set = integrate_set(a0, &gaps)?;
    let required = if g.len() >= 2 { Profile::NegativeThird } else { Profile::Convex };
    if !required.admits(&set) {
        return Err(Error::ProfileViolation("integrated set fails its signature".into()));
    }
    Ok(set)
}

/// Second differences `n-2, …, 1` from `0` with first gap `1`: the slowest
/// growing member of the strictly-negative-third class over the integers.
pub fn minimal_profile(n: usize) -> Result<OrderedIntSet> {
    if n < 4 {
        return Err(Error::Precondition(format!("minimal profile needs n >= 4, got {n}")));
    }
    let g: Vec<i64> = (1..=(n as i64 - 2)).rev().collect();
    from_second_differences(&g, 0, 1)
}

/// Starting scale for power laws: `n^(3 - alpha)` makes the smallest third
/// difference of the unrounded sequence of order one, so the doubling
/// repair has room to finish.
pub fn default_power_law_scale(n: usize, alpha: f64) -> f64 {
    (n as f64).powf(3.0 - alpha)
}

/// `round(scale * i^alpha)` for `i = 1..=n`, doubling the scale until the
/// rounded sequence has strictly positive second and strictly negative
/// third differences.
pub fn power_law(n: usize, alpha: f64, scale: f64) -> Result<OrderedIntSet> {
    if n < 4 {
        return Err(Error::Precondition(format!("power law needs n >= 4, got {n}")));
    }
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Precondition(format!("alpha {alpha} outside (1, 2)")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Precondition(format!("scale {scale} must be positive")));
    }
    for attempt in 0..=POWER_LAW_RETRIES {
        let s = scale * f64::powi(2.0, attempt as i32);
        let values: Vec<f64> = (1..=n).map(|i| (s * (i as f64).powf(alpha)).round()).collect();
        if values.iter().any(|v| v.abs() > crate::set::MAX_MAGNITUDE as f64) {
            break;
        }
        let values: Vec<i64> = values.into_iter().map(|v| v as i64).collect();
        if let Ok(set) = OrderedIntSet::new(values) {
            if Profile::NegativeThird.admits(&set) {
                return Ok(set);
            }
        }
    }
    Err(Error::RepairFailed { retries: POWER_LAW_RETRIES })
}

/// Samples the deepest constrained derivative level and integrates down.
///
/// * `Convex`: second differences uniform in `1..=max_step`.
/// * `NegativeThird`: third differences uniform in `-max_step..=-1`.
/// * `NegativeThirdNonpositiveFourth`: fourth differences uniform in
///   `-max_step..=0`, first third difference in `-max_step..=-1`.
///
/// Each integration constant above the second level is lifted just enough
/// to keep the second differences positive, plus a sampled slack in
/// `0..max_step`. The first gap is `d0` when given, else sampled.
pub fn random_profile(
    profile: Profile,
    n: usize,
    a0: i64,
    d0: Option<i64>,
    max_step: i64,
    rng: &mut ChaCha8Rng,
) -> Result<OrderedIntSet> {
    if n < profile.min_len() {
        return Err(Error::Precondition(format!(
            "profile {} needs n >= {}, got {n}",
            profile.name(),
            profile.min_len()
        )));
    }
    if max_step < 1 {
        return Err(Error::Precondition(format!("max_step {max_step} must be positive")));
    }
    let k = max_step as i128;
    let mut sample = |lo: i128, hi: i128| rng.random_range(lo..=hi);

    let second: Vec<i128> = match profile {
        Profile::Convex => (0..n - 2).map(|_| sample(1, k)).collect(),
        Profile::NegativeThird | Profile::NegativeThirdNonpositiveFourth => {
            let third: Vec<i128> = if profile == Profile::NegativeThird {
                (0..n - 3).map(|_| sample(-k, -1)).collect()
            } else {
                let start = sample(-k, -1);
                let fourth: Vec<i128> = (0..n - 4).map(|_| sample(-k, 0)).collect();
                integrate(start, &fourth)?
            };
            let drop: i128 = third.iter().map(|t| -t).sum();
            let start = 1 + drop + sample(0, k - 1);
            integrate(start, &third)?
        }
    };
    let first_gap = match d0 {
        Some(d) if d >= 1 => d as i128,
        Some(d) => return Err(Error::Precondition(format!("first gap {d} must be positive"))),
        None => sample(1, k),
    };
    let gaps = integrate(first_gap, &second)?;
    let set = integrate_set(a0, &gaps)?;
    if !profile.admits(&set) {
        return Err(Error::ProfileViolation(format!("sampled set does not satisfy {}", profile.name())));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elems(s: &OrderedIntSet) -> Vec<i64> {
        s.elements().to_vec()
    }

    /// Independent integration by explicit gap accumulation.
    fn integrate_oracle(a0: i64, d0: i64, second: &[i64]) -> Vec<i64> {
        let mut out = vec![a0];
        let mut gap = d0;
        out.push(a0 + gap);
        for &g in second {
            gap += g;
            out.push(out.last().unwrap() + gap);
        }
        out
    }

    #[test]
    fn second_difference_integration() {
        assert_eq!(elems(&from_second_differences(&[2, 1], 0, 1).unwrap()), vec![0, 1, 4, 8]);
        assert_eq!(elems(&from_second_differences(&[1], 0, 1).unwrap()), vec![0, 1, 3]);
        assert!(matches!(from_second_differences(&[1, 1], 0, 1), Err(Error::ProfileViolation(_))));
        assert!(matches!(from_second_differences(&[2, 0], 0, 1), Err(Error::ProfileViolation(_))));
        assert!(from_second_differences(&[2, 1], 0, 0).is_err());
        assert_eq!(
            elems(&from_second_differences(&[9, 5, 2], 7, 3).unwrap()),
            integrate_oracle(7, 3, &[9, 5, 2])
        );
    }

    #[test]
    fn minimal_profiles() {
        assert_eq!(elems(&minimal_profile(4).unwrap()), vec![0, 1, 4, 8]);
        assert_eq!(elems(&minimal_profile(5).unwrap()), vec![0, 1, 5, 11, 18]);
        assert!(minimal_profile(3).is_err());
        let big = minimal_profile(2048).unwrap();
        assert!(big.cached_signature().is_convex_negative_third());
    }

    #[test]
    fn power_law_repair() {
        // Unit scale rounds to {1,3,5,8}, whose second differences are [0,1].
        let raw: Vec<i64> = (1..=4).map(|i| (i as f64).powf(1.5).round() as i64).collect();
        assert_eq!(raw, vec![1, 3, 5, 8]);
        let repaired = power_law(4, 1.5, 1.0).unwrap();
        assert_eq!(elems(&repaired), vec![4, 11, 21, 32]);
        assert_eq!(elems(&power_law(4, 1.5, 4.0).unwrap()), vec![4, 11, 21, 32]);
        assert_eq!(repaired.derivative(2).unwrap(), vec![3, 1]);
        assert_eq!(repaired.derivative(3).unwrap(), vec![-2]);
        assert!(matches!(power_law(3, 1.5, 1.0), Err(Error::Precondition(_))));
        assert!(matches!(power_law(8, 2.5, 1.0), Err(Error::Precondition(_))));
        assert!(matches!(power_law(512, 1.5, 1.0), Err(Error::RepairFailed { retries: 10 })));
    }

    #[test]
    fn default_power_law_scale_reaches_large_n() {
        for n in [64, 1024, 4096] {
            let set = GeneratorSpec::power_law(n, 1.5).generate(0).unwrap();
            assert_eq!(set.len(), n);
            assert!(set.cached_signature().is_convex_negative_third());
        }
    }

    #[test]
    fn random_profiles_satisfy_their_class() {
        for seed in 0..20 {
            for (profile, n) in [
                (Profile::Convex, 3),
                (Profile::NegativeThird, 4),
                (Profile::NegativeThird, 40),
                (Profile::NegativeThirdNonpositiveFourth, 5),
                (Profile::NegativeThirdNonpositiveFourth, 60),
            ] {
                let set = GeneratorSpec::random(n, profile, seed).generate(0).unwrap();
                assert!(profile.admits(&set), "{profile:?} seed {seed}");
                assert_eq!(set.len(), n);
            }
        }
        assert!(GeneratorSpec::random(4, Profile::NegativeThirdNonpositiveFourth, 1).generate(0).is_err());
    }

    #[test]
    fn random_profile_is_deterministic() {
        let spec = GeneratorSpec::random(30, Profile::NegativeThirdNonpositiveFourth, 99);
        let a = serde_json::to_string(&spec.generate(0).unwrap()).unwrap();
        let b = serde_json::to_string(&spec.generate(7).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = GeneratorSpec::random(30, Profile::NegativeThirdNonpositiveFourth, 100);
        assert_ne!(a, serde_json::to_string(&other.generate(0).unwrap()).unwrap());
    }

    #[test]
    fn triple_integration_example() {
        // Third differences [-1,-2], second differences start at 6, first gap 1.
        let third = [-1i128, -2];
        let second = integrate(6, &third).unwrap();
        assert_eq!(second, vec![6, 5, 3]);
        let set = integrate_set(0, &integrate(1, &second).unwrap()).unwrap();
        assert_eq!(elems(&set), integrate_oracle(0, 1, &[6, 5, 3]));
        assert_eq!(elems(&set), vec![0, 1, 8, 20, 35]);
        assert_eq!(set.derivative(4).unwrap(), vec![-1]);
        assert!(Profile::NegativeThirdNonpositiveFourth.admits(&set));
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"[{"family":"power-law","n":64,"params":{"alpha":1.5}},
                      {"family":"random-profile","n":9,"seed":3,"params":{"profile":"d2+d3-d4<=0"}},
                      {"family":"from-second-differences","n":3,"params":{"second_differences":[1]}}]"#;
        let m = Manifest::from_json(text).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.0[1].params.profile, Some(Profile::NegativeThirdNonpositiveFourth));
        assert_eq!(elems(&m.0[2].generate(0).unwrap()), vec![0, 1, 3]);
        let again = Manifest::from_json(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(again, m);
        assert!(Manifest::from_json(r#"[{"family":"nope","n":3}]"#).is_err());
    }

    #[test]
    fn seeds_mix() {
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_eq!(mix_seed(5, 3), mix_seed(5, 3));
    }
}
