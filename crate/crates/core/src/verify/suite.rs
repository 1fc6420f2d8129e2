use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{check_asymptotic, check_exact, check_spectral_chain, trend_fit, fit_exponent};
use super::{CheckResult, ExponentFit, Relation, SetAnalysis};
use crate::error::{Error, Result};
use crate::generators::{mix_seed, GeneratorSpec, Manifest};
use crate::set::OrderedIntSet;
use crate::par;
use crate::spectral::{decay_profile, dyadic_slices};
use crate::wire::{wide_u128, wide_u128_opt};
use crate::Budgets;

/// First 16 hex digits of the SHA-256 of `value`'s JSON form.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))[..16].to_string()
}

/// Everything that determines a suite's output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub manifest: Manifest,
    pub seed: u64,
    pub budgets: Budgets,
    /// Power of `ln n` absorbed before trend fits of asymptotic ratios.
    pub log_power: f64,
}

impl SuiteConfig {
    pub fn new(manifest: Manifest, seed: u64) -> Self {
        Self { manifest, seed, budgets: Budgets::default(), log_power: 1.0 }
    }

    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

/// Per-set quantities feeding the summary table and the fits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetSummary {
    pub set_id: String,
    pub family: String,
    pub n: usize,
    pub sumset: usize,
    pub diffset: usize,
    #[serde(with = "wide_u128")]
    pub energy: u128,
    #[serde(with = "wide_u128")]
    pub energy3: u128,
    #[serde(with = "wide_u128_opt")]
    pub t4: Option<u128>,
    pub signature: Vec<String>,
    pub decay_difference: f64,
    pub decay_sum: f64,
    /// Largest `Σ rep^2` over the dyadic bands of `A∘A`.
    #[serde(with = "wide_u128")]
    pub heaviest_band_mass: u128,
    pub band_count: usize,
}

impl SetSummary {
    fn new(an: &SetAnalysis, family: String) -> Result<Self> {
        let bands = dyadic_slices(&an.diff);
        Ok(Self {
            set_id: an.set_id.clone(),
            family,
            n: an.n(),
            sumset: an.sumset_size(),
            diffset: an.diffset_size(),
            energy: an.energy()?,
            energy3: an.energy3()?,
            t4: an.t4,
            signature: an.set.cached_signature().levels().iter().map(|s| s.symbol().to_string()).collect(),
            decay_difference: decay_profile(&an.diff).sup_constant,
            decay_sum: decay_profile(&an.sum).sup_constant,
            heaviest_band_mass: bands.iter().map(|b| b.mass).max().unwrap_or(0),
            band_count: bands.len(),
        })
    }

    /// `(quantity, value)` pairs in summary-table order.
    pub fn quantities(&self) -> Vec<(&'static str, f64)> {
        let mut q = vec![
            ("sumset", self.sumset as f64),
            ("diffset", self.diffset as f64),
            ("energy", self.energy as f64),
            ("energy3", self.energy3 as f64),
        ];
        if let Some(t4) = self.t4 {
            q.push(("t4", t4 as f64));
        }
        q.push(("decay-difference", self.decay_difference));
        q.push(("decay-sum", self.decay_sum));
        q
    }
}

/// One row of the summary CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub family: String,
    pub n: usize,
    pub quantity: String,
    pub value: f64,
    pub set_id: String,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config_hash: String,
    pub records: Vec<CheckResult>,
    pub summaries: Vec<SetSummary>,
    pub fits: Vec<ExponentFit>,
}

/// Quantities fitted against `n` within each family.
const FITTED: [&str; 5] = ["sumset", "energy", "energy3", "decay-difference", "decay-sum"];

impl SuiteReport {
    pub fn exact_failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.records.iter().filter(|r| r.is_exact_failure())
    }

    pub fn has_exact_failure(&self) -> bool {
        self.exact_failures().next().is_some()
    }

    /// One JSON object per record, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for s in &self.summaries {
            for (quantity, value) in s.quantities() {
                rows.push(SummaryRow {
                    family: s.family.clone(),
                    n: s.n,
                    quantity: quantity.to_string(),
                    value,
                    set_id: s.set_id.clone(),
                    config_hash: self.config_hash.clone(),
                });
            }
        }
        rows
    }

    pub fn fit(&self, quantity_id: &str) -> Option<&ExponentFit> {
        self.fits.iter().find(|f| f.quantity_id == quantity_id)
    }
}

/// Stable identifier of the `index`-th manifest entry.
pub fn set_id(index: usize, spec: &GeneratorSpec) -> String {
    format!("{index:04}:{}:n{}", spec.label(), spec.n)
}

/// One generated corpus member.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub set_id: String,
    pub family: String,
    pub set: OrderedIntSet,
}

fn generate_entry(manifest: &Manifest, seed: u64, i: usize) -> Result<CorpusEntry> {
    let spec = &manifest.0[i];
    let id = set_id(i, spec);
    let set = spec
        .generate(mix_seed(seed, i as u64))
        .map_err(|e| Error::Precondition(format!("{id}: {e}")))?;
    Ok(CorpusEntry { set_id: id, family: spec.label(), set })
}

/// Builds every set of the manifest; entry `i` without its own seed uses
/// one derived from `seed` and `i`.
pub fn generate_corpus(manifest: &Manifest, seed: u64) -> Result<Vec<CorpusEntry>> {
    par::map_range(manifest.len(), |i| generate_entry(manifest, seed, i)).into_iter().collect()
}

/// Generates the corpus, runs all three layers on every set in parallel
/// and assembles the report in manifest order.
///
/// Exact-layer failures do not stop the run; they are reported through
/// [`SuiteReport::exact_failures`] so the caller sees every failing record.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let hash = config.hash();
    let per_set = par::map_range(config.manifest.len(), |i| -> Result<_> {
        let entry = generate_entry(&config.manifest, config.seed, i)?;
        let id = entry.set_id;
        let label = entry.family;
        let with_context = |e: Error| Error::Precondition(format!("{id}: {e}"));
        let an = SetAnalysis::new(id.clone(), entry.set, config.budgets).map_err(with_context)?;
        let mut records = check_exact(&an).map_err(with_context)?;
        records.extend(check_asymptotic(&an).map_err(with_context)?);
        records.extend(check_spectral_chain(&an).map_err(with_context)?);
        for r in &mut records {
            r.config_hash = hash.clone();
        }
        Ok((records, SetSummary::new(&an, label).map_err(with_context)?))
    });

    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for item in per_set {
        let (r, s) = item?;
        records.extend(r);
        summaries.push(s);
    }
    let fits = family_fits(&summaries, &records, config.log_power);
    Ok(SuiteReport { config_hash: hash, records, summaries, fits })
}

/// Exponent fits per family and quantity, then trend fits of every
/// asymptotic ratio's per-set worst case. Families with fewer than three
/// distinct sizes are skipped.
fn family_fits(summaries: &[SetSummary], records: &[CheckResult], log_power: f64) -> Vec<ExponentFit> {
    let mut families: Vec<&str> = Vec::new();
    for s in summaries {
        if !families.contains(&s.family.as_str()) {
            families.push(&s.family);
        }
    }
    let mut fits = Vec::new();
    for family in families {
        let members: Vec<&SetSummary> = summaries.iter().filter(|s| s.family == family).collect();
        for quantity in FITTED {
            let points: Vec<(usize, f64)> = members
                .iter()
                .filter_map(|s| s.quantities().into_iter().find(|q| q.0 == quantity).map(|q| (s.n, q.1)))
                .collect();
            if let Ok(f) = fit_exponent(&points) {
                fits.push(f.named(format!("{family}/{quantity}")));
            }
        }

        let mut check_ids: Vec<&'static str> = Vec::new();
        for r in records {
            if r.layer == super::Layer::Asymptotic && !r.check_id.starts_with("chain.") && !check_ids.contains(&r.check_id) {
                check_ids.push(r.check_id);
            }
        }
        for check_id in check_ids {
            let mut points = Vec::new();
            let mut upper = true;
            for s in &members {
                let worst = records
                    .iter()
                    .filter(|r| r.set_id == s.set_id && r.check_id == check_id && r.is_evaluated())
                    .filter_map(|r| r.ratio.map(|v| (v, r.relation)))
                    .next();
                if let Some((v, relation)) = worst {
                    upper = relation != Relation::AtLeast;
                    points.push((s.n, v));
                }
            }
            if let Ok(f) = trend_fit(&points, log_power, upper) {
                fits.push(f.named(format!("{family}/trend:{check_id}")));
            }
        }
    }
    fits
}
