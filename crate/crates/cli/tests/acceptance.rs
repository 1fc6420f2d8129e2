//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 2, 3 and 6 share one run of the default corpus. The exit code is
//! nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use convexlab_core::energy::oracle::{brute_force_energy, brute_force_t};
use convexlab_core::energy::{cross_energy_exact, difference_rep, energy_exact, sum_rep, t_energy};
use convexlab_core::generators::{mix_seed, stream_rng, GeneratorSpec, Profile};
use convexlab_core::search::{anneal, exhaustive_min_sumset, SearchParams, SearchState};
use convexlab_core::spectral::{decay_profile, dyadic_slices};
use convexlab_core::verify::{
    check_exact, fit_exponent, generate_corpus, run_suite, Layer, SetAnalysis, Status, SuiteConfig, SuiteReport,
};
use convexlab_core::{Budgets, Family, Manifest, OrderedIntSet};
use rand::Rng;

/// Slope tolerance for "does not grow" trends.
const FLAT_SLOPE: f64 = 0.05;
const CLASSICAL_SUMSET_EXPONENT: f64 = 1.5;
const CLASSICAL_SUMSET_SLACK: f64 = 0.03;
const SUMSET_EXPONENT: f64 = 221.0 / 137.0;
const ENERGY_EXPONENT: f64 = 328.0 / 137.0;
const ORACLE_SECONDS: u64 = 60;
const SUITE_SECONDS: u64 = 300;
const TREND_SIZES: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn random_set(rng: &mut impl Rng, max_len: usize) -> OrderedIntSet {
    let len = rng.random_range(1..=max_len);
    let mut v: Vec<i64> = Vec::new();
    while v.len() < len {
        let x = rng.random_range(-60..60);
        if !v.contains(&x) {
            v.push(x);
        }
    }
    OrderedIntSet::new(v).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(2024, 0);
    let mut mismatches = 0;
    for _ in 0..100 {
        let a = random_set(&mut rng, 10);
        let b = random_set(&mut rng, 10);
        let diff = difference_rep(&a, &a).unwrap();
        for k in [2, 3] {
            if energy_exact(&diff, k).unwrap() != brute_force_energy(&a, &a, k).unwrap() {
                mismatches += 1;
            }
        }
        if cross_energy_exact(&a, &b, 2, u64::MAX).unwrap() != brute_force_energy(&a, &b, 2).unwrap() {
            mismatches += 1;
        }
    }
    for _ in 0..30 {
        let a = random_set(&mut rng, 6);
        if t_energy(&a, 4).unwrap() != brute_force_t(&a, 4).unwrap() {
            mismatches += 1;
        }
    }
    let pair = OrderedIntSet::new(vec![0, 1]).unwrap();
    let t4_pair = t_energy(&pair, 4).unwrap();
    let elapsed = start.elapsed();
    Outcome::new(
        mismatches == 0 && t4_pair == 70 && elapsed <= Duration::from_secs(ORACLE_SECONDS),
        format!("{mismatches} mismatches over 130 sets, T_4({{0,1}}) = {t4_pair}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn exact_layer(report: &SuiteReport) -> Outcome {
    let exact: Vec<_> = report.records.iter().filter(|r| r.layer == Layer::Exact).collect();
    let failures = exact.iter().filter(|r| !r.pass).count();
    let evaluated = exact.iter().filter(|r| r.is_evaluated()).count();
    let skipped = exact.iter().filter(|r| r.status == Status::SkippedBudget).count();
    let t4_evaluated = exact.iter().filter(|r| r.check_id == "exact.popular-energy-t4" && r.is_evaluated()).count();

    // One corrupted count in A∘A must trip at least one exact check.
    let set = GeneratorSpec::new(Family::MinimalProfile, 16).generate(0).unwrap();
    let mut an = SetAnalysis::new("mutant", set, Budgets::default()).unwrap();
    let c = an.diff.get(1);
    an.diff = an.diff.with_count(1, c + 1).unwrap();
    let caught = check_exact(&an).unwrap().iter().filter(|r| !r.pass).count();

    Outcome::new(
        failures == 0 && evaluated > 0 && caught >= 1,
        format!(
            "{evaluated} evaluated, {failures} failures, {skipped} budget skips, {t4_evaluated} T_4 sub-checks; mutation caught by {caught}"
        ),
    )
}

fn pigeonhole(manifest: &Manifest) -> Outcome {
    let corpus = generate_corpus(manifest, 0).unwrap();
    let mut bad = Vec::new();
    for entry in &corpus {
        let rep = difference_rep(&entry.set, &entry.set).unwrap();
        let e = energy_exact(&rep, 2).unwrap();
        let levels = rep.max_count().next_power_of_two().trailing_zeros() as u128 + 1;
        let heaviest = dyadic_slices(&rep).iter().map(|b| b.mass).max().unwrap_or(0);
        if heaviest * levels < e {
            bad.push(entry.set_id.clone());
        }
    }
    Outcome::new(bad.is_empty(), format!("{} sets, violations: {bad:?}", corpus.len()))
}

struct TrendData {
    sumset: Vec<(usize, f64)>,
    energy: Vec<(usize, f64)>,
    decay_difference: Vec<(usize, f64)>,
    decay_sum: Vec<(usize, f64)>,
}

fn trend_data() -> TrendData {
    let mut d = TrendData { sumset: vec![], energy: vec![], decay_difference: vec![], decay_sum: vec![] };
    for (i, &n) in TREND_SIZES.iter().enumerate() {
        let a = GeneratorSpec::power_law(n, 1.5).generate(mix_seed(0, i as u64)).unwrap();
        let diff = difference_rep(&a, &a).unwrap();
        let sum = sum_rep(&a, &a).unwrap();
        d.sumset.push((n, sum.len() as f64));
        d.energy.push((n, energy_exact(&diff, 2).unwrap() as f64));
        d.decay_difference.push((n, decay_profile(&diff).sup_constant));
        d.decay_sum.push((n, decay_profile(&sum).sup_constant));
    }
    d
}

fn slope(points: &[(usize, f64)]) -> f64 {
    fit_exponent(points).unwrap().slope
}

fn decay_boundedness(d: &TrendData) -> Outcome {
    let diff = slope(&d.decay_difference);
    let sum = slope(&d.decay_sum);
    Outcome::new(
        diff <= FLAT_SLOPE && sum <= FLAT_SLOPE,
        format!("sup-constant slopes: difference {diff:.4}, sum {sum:.4} (limit {FLAT_SLOPE})"),
    )
}

fn exponent_sanity(d: &TrendData) -> Outcome {
    let sumset = slope(&d.sumset);
    let ratio: Vec<_> = d.sumset.iter().map(|&(n, v)| (n, v / (n as f64).powf(SUMSET_EXPONENT))).collect();
    let ratio_slope = slope(&ratio);
    let energy = slope(&d.energy);
    Outcome::new(
        sumset >= CLASSICAL_SUMSET_EXPONENT - CLASSICAL_SUMSET_SLACK && ratio_slope >= -FLAT_SLOPE && energy <= ENERGY_EXPONENT + FLAT_SLOPE,
        format!("|A+A| slope {sumset:.4}, |A+A|/n^(221/137) slope {ratio_slope:.4}, E slope {energy:.4}"),
    )
}

fn chain_well_defined(report: &SuiteReport) -> Outcome {
    let mut evaluated = 0;
    let mut empty = 0;
    let mut bad = Vec::new();
    let mut skipped: Vec<(String, &str)> = Vec::new();
    let sizes: std::collections::HashMap<_, _> = report.summaries.iter().map(|s| (s.set_id.as_str(), s.n)).collect();
    for r in report.records.iter().filter(|r| r.check_id.starts_with("chain.")) {
        if sizes[r.set_id.as_str()] < 16 {
            continue;
        }
        match r.status {
            Status::Evaluated => {
                let ok = [r.lhs, r.rhs, r.ratio].iter().all(|v| v.is_some_and(|v| v.is_finite() && v > 0.0));
                if ok {
                    evaluated += 1;
                } else {
                    bad.push(format!("{} {}", r.set_id, r.check_id));
                }
            }
            Status::EmptyRange if r.note.is_some() => empty += 1,
            Status::SkippedBudget => {
                if !skipped.iter().any(|(s, c)| *s == r.set_id && *c == r.check_id) {
                    skipped.push((r.set_id.clone(), r.check_id));
                }
            }
            _ => bad.push(format!("{} {} {:?}", r.set_id, r.check_id, r.status)),
        }
    }
    let skip_records = report
        .records
        .iter()
        .filter(|r| r.check_id.starts_with("chain.") && r.status == Status::SkippedBudget)
        .count();
    let smallest_skipped = skipped
        .iter()
        .filter_map(|(s, _)| sizes.get(s.as_str()))
        .min()
        .map_or("none".to_string(), |n| n.to_string());
    Outcome::new(
        bad.is_empty() && skip_records == 0,
        format!(
            "{evaluated} finite positive ratios, {empty} empty-range markers, {} malformed, \
             {skip_records} records skipped over the pair budget in {} (set, check) cells, smallest such n = {smallest_skipped}",
            bad.len(),
            skipped.len()
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = Manifest::families(&[16, 32, 64, 128, 256]);
    manifest.0.push(GeneratorSpec::random(48, Profile::NegativeThirdNonpositiveFourth, 3));
    let path = dir.path().join("manifest.json");
    std::fs::write(&path, serde_json::to_string(&manifest).unwrap()).unwrap();

    let run = |jobs: &str| {
        let out = dir.path().join(format!("jobs{jobs}.jsonl"));
        let status = Command::new(env!("CARGO_BIN_EXE_convexlab"))
            .args(["--seed", "0", "--jobs", jobs, "verify", "--manifest"])
            .arg(&path)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        (status.code(), std::fs::read(&out).unwrap_or_default())
    };
    let (code1, one) = run("1");
    let (code8, eight) = run("8");
    Outcome::new(
        code1 == Some(0) && code8 == Some(0) && !one.is_empty() && one == eight,
        format!("exit codes {code1:?}/{code8:?}, {} vs {} bytes, identical: {}", one.len(), eight.len(), one == eight),
    )
}

fn search_cross_check() -> Outcome {
    let (best, g, d0) = exhaustive_min_sumset(4, 10).unwrap();
    let params = SearchParams { ceiling: 10, ..SearchParams::default() };
    let mut found = 0;
    for seed in 0..10 {
        let start = SearchState::new(vec![7, 3], 5, params.initial_temperature, seed, 0).unwrap();
        if anneal(start, 1000, &params).unwrap().sumset_size().unwrap() == best {
            found += 1;
        }
    }
    Outcome::new(
        best == 9 && found == 10,
        format!("exhaustive minimum {best} at g = {g:?}, d0 = {d0}; annealing reached it for {found}/10 seeds"),
    )
}

/// Runs `f`, adding its wall time to `spent`.
fn timed<T>(spent: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let value = f();
    *spent += start.elapsed();
    value
}

fn main() {
    let mut lines: Vec<(usize, Outcome)> = Vec::new();
    let mut spent = Duration::ZERO;

    lines.push((1, timed(&mut spent, oracle_equivalence)));

    let manifest = Manifest::default_corpus();
    let start = Instant::now();
    let report = run_suite(&SuiteConfig::new(manifest.clone(), 0)).unwrap();
    let suite_time = start.elapsed();
    spent += suite_time;

    lines.push((2, timed(&mut spent, || exact_layer(&report))));
    lines.push((3, timed(&mut spent, || pigeonhole(&manifest))));
    let trends = timed(&mut spent, trend_data);
    lines.push((4, decay_boundedness(&trends)));
    lines.push((5, exponent_sanity(&trends)));
    lines.push((6, chain_well_defined(&report)));
    lines.push((
        8,
        Outcome::new(
            spent <= Duration::from_secs(SUITE_SECONDS),
            format!(
                "criteria 1-6 took {:.1}s (default suite {:.1}s) on {} worker thread(s)",
                spent.as_secs_f64(),
                suite_time.as_secs_f64(),
                std::thread::available_parallelism().map_or(1, |n| n.get())
            ),
        ),
    ));
    lines.push((7, determinism()));
    lines.push((9, search_cross_check()));
    lines.sort_by_key(|(i, _)| *i);

    let mut failed = 0;
    for (i, o) in &lines {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {i}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
