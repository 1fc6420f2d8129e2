//! `convexlab`: generate convex sets, compute their energies and spectra,
//! run the inequality suite, fit exponents and search for small doubling.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use convexlab_core::energy::{difference_rep_within, energy, sum_rep_within, EnergyProfile};
use convexlab_core::generators::{GeneratorSpec, Manifest, Profile};
use convexlab_core::search::{best_chain, resume, run_chains, Chain, SearchParams};
use convexlab_core::spectral::{
    dyadic_slices, operator_matrix_within, popularity_set, principal_eigenvalue, OperatorMode, Weight,
    DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use convexlab_core::verify::{config_hash, fit_exponent, generate_corpus, run_suite, CorpusEntry, SuiteConfig};
use convexlab_core::{Budgets, Family, OrderedIntSet, DEFAULT_MATRIX_BUDGET, DEFAULT_PAIR_BUDGET, DEFAULT_T4_MAX_N};

/// Seed used when neither `--seed` nor `CONVEXLAB_SEED` is given.
const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(name = "convexlab", version, about = "Sumsets and additive energies of convex integer sets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// Run seed; per-set seeds are derived from it.
    #[arg(long, global = true, env = "CONVEXLAB_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    jobs: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Cap on pair and tuple enumerations per operation.
    #[arg(long, global = true, default_value_t = DEFAULT_PAIR_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget_pairs: u64,
    /// Cap on dense operator entries.
    #[arg(long, global = true, default_value_t = DEFAULT_MATRIX_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget_matrix: u64,
    /// Largest set for which fourth T-energies are computed.
    #[arg(long, global = true, default_value_t = DEFAULT_T4_MAX_N)]
    t4_max_n: usize,
}

impl Global {
    fn budgets(&self) -> Budgets {
        Budgets { pairs: self.budget_pairs, matrix: self.budget_matrix, t4_max_n: self.t4_max_n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Jsonl,
    Csv,
}

/// Where the sets come from.
#[derive(Args, Debug, Serialize)]
struct Input {
    /// Corpus manifest (JSON array of generator specs).
    #[arg(long, conflicts_with_all = ["set", "family"])]
    manifest: Option<PathBuf>,
    /// A literal set, e.g. '[0,1,4,8]'.
    #[arg(long, conflicts_with = "family")]
    set: Option<String>,
    /// Generator family: minimal, power-law, random, second-differences.
    #[arg(long, requires = "n")]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Power-law exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Random-profile class: d2+, d2+d3-, d2+d3-d4<=0.
    #[arg(long)]
    profile: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print generated sets as JSON.
    Gen(Input),
    /// Energies, |A±A| and derivative signature per set.
    Stats {
        #[command(flatten)]
        input: Input,
        /// Extra energy order to report (may be fractional).
        #[arg(long)]
        k: Option<f64>,
    },
    /// Run the inequality suite; exits 1 on any exact-layer failure.
    Verify {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Summary CSV (family, n, quantity, value, set_id, config_hash).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Exponent and trend fits as JSON.
        #[arg(long)]
        fits: Option<PathBuf>,
        /// Power of ln n absorbed before trend fits.
        #[arg(long, default_value_t = 1.0)]
        log_power: f64,
    },
    /// Dyadic band and popularity tables.
    Scan {
        #[command(flatten)]
        input: Input,
        /// Also list the popularity set of A∘A at this threshold.
        #[arg(long)]
        tau: Option<u64>,
    },
    /// Log-log exponent fits per family and quantity.
    Fit {
        #[command(flatten)]
        input: Input,
        /// Fit rows of a summary CSV written by `verify` instead.
        #[arg(long, conflicts_with_all = ["manifest", "set", "family"])]
        summary: Option<PathBuf>,
    },
    /// Principal eigenvalues of the convolution operators on A × A.
    Eigen {
        #[command(flatten)]
        input: Input,
        /// Dense operator CSV, one file per set and mode, in this directory.
        #[arg(long)]
        matrix_dir: Option<PathBuf>,
    },
    /// Anneal toward small doubling within the Δ²>0, Δ³<0 class.
    Search {
        /// Set size; taken from the checkpoint when resuming.
        #[arg(long, required_unless_present = "resume")]
        n: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, default_value_t = 8)]
        chains: usize,
        #[arg(long, default_value_t = SearchParams::default().ceiling)]
        ceiling: i64,
        #[arg(long, default_value_t = SearchParams::default().initial_temperature)]
        temperature: f64,
        #[arg(long, default_value_t = SearchParams::default().cooling)]
        cooling: f64,
        /// Write the chains here after the run.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue chains from a checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
}

/// Failure classes mapped to exit codes: an exact-layer failure exits 1,
/// anything else (bad configuration, budget or arithmetic errors) exits 2.
enum Failure {
    Exact,
    Config(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn config<T>(r: Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Config)
}

fn parse_family(name: &str) -> Result<Family> {
    Ok(match name {
        "minimal" | "minimal-profile" => Family::MinimalProfile,
        "power" | "power-law" => Family::PowerLaw,
        "random" | "random-profile" => Family::RandomProfile,
        "second-differences" | "from-second-differences" => Family::FromSecondDifferences,
        other => bail!("unknown family {other:?}"),
    })
}

fn parse_profile(name: &str) -> Result<Profile> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| anyhow!("unknown profile {name:?}; expected d2+, d2+d3- or d2+d3-d4<=0"))
}

fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Manifest::from_json(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

impl Input {
    /// Resolves to a manifest, or to one literal set.
    fn resolve(&self) -> Result<Source> {
        if let Some(path) = &self.manifest {
            return Ok(Source::Manifest(read_manifest(path)?));
        }
        if let Some(text) = &self.set {
            let set: OrderedIntSet = serde_json::from_str(text).with_context(|| format!("parsing set {text}"))?;
            return Ok(Source::Literal(set));
        }
        if let Some(name) = &self.family {
            let n = self.n.ok_or_else(|| anyhow!("--family needs --n"))?;
            let mut spec = GeneratorSpec::new(parse_family(name)?, n);
            spec.params.alpha = self.alpha;
            spec.params.profile = self.profile.as_deref().map(parse_profile).transpose()?;
            return Ok(Source::Manifest(Manifest(vec![spec])));
        }
        bail!("give one of --manifest, --set or --family with --n")
    }
}

enum Source {
    Manifest(Manifest),
    Literal(OrderedIntSet),
}

impl Source {
    fn entries(&self, seed: u64) -> Result<Vec<CorpusEntry>> {
        match self {
            Source::Manifest(m) => Ok(generate_corpus(m, seed)?),
            Source::Literal(set) => {
                Ok(vec![CorpusEntry { set_id: "input".into(), family: "input".into(), set: set.clone() }])
            }
        }
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            Source::Manifest(m) => serde_json::to_value(m).expect("manifest serializes"),
            Source::Literal(s) => serde_json::to_value(s).expect("set serializes"),
        }
    }
}

/// Serializes rows in the requested format.
fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows)?;
            s.push('\n');
            s
        }
        Format::Jsonl => {
            let mut s = String::new();
            for r in rows {
                s.push_str(&serde_json::to_string(r)?);
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?
        }
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct GenRow {
    set_id: String,
    family: String,
    n: usize,
    elements: OrderedIntSet,
}

#[derive(Serialize)]
struct StatsRow {
    set_id: String,
    n: usize,
    #[serde(rename = "E2")]
    e2: String,
    #[serde(rename = "E3")]
    e3: String,
    #[serde(rename = "T2")]
    t2: String,
    #[serde(rename = "T4", skip_serializing_if = "Option::is_none")]
    t4: Option<String>,
    #[serde(rename = "E8/3")]
    e_8_3: f64,
    #[serde(rename = "Ek", skip_serializing_if = "Option::is_none")]
    ek: Option<f64>,
    sumset: usize,
    diffset: usize,
    signature: String,
    config_hash: String,
}

#[derive(Serialize)]
struct BandRow {
    set_id: String,
    rep: &'static str,
    mode: &'static str,
    level: u64,
    size: usize,
    mass: String,
    config_hash: String,
}

#[derive(Serialize)]
struct EigenRow {
    set_id: String,
    mode: &'static str,
    n: usize,
    mu1: f64,
    rayleigh_lower: f64,
    iterations: usize,
    symmetric: bool,
    config_hash: String,
}

#[derive(Serialize)]
struct FitRow {
    quantity_id: String,
    points: usize,
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

#[derive(Serialize)]
struct LeaderRow {
    chain: usize,
    n: usize,
    best_score: f64,
    sumset: usize,
    d0: i64,
    g: String,
    config_hash: String,
}

fn signature_text(set: &OrderedIntSet) -> String {
    set.cached_signature().levels().iter().map(|s| s.symbol()).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let budgets = g.budgets();
    match &cli.command {
        Command::Gen(input) => {
            let source = config(input.resolve())?;
            let entries = source.entries(g.seed)?;
            let format = g.format.unwrap_or(Format::Json);
            if format == Format::Csv {
                return Err(Failure::Config(anyhow!("gen writes JSON or JSONL")));
            }
            let text = if format == Format::Json && entries.len() == 1 {
                format!("{}\n", serde_json::to_string(&entries[0].set).map_err(anyhow::Error::from)?)
            } else {
                let rows: Vec<GenRow> = entries
                    .into_iter()
                    .map(|e| GenRow { n: e.set.len(), set_id: e.set_id, family: e.family, elements: e.set })
                    .collect();
                render(&rows, format)?
            };
            emit(&g.out, &text)?;
        }
        Command::Stats { input, k } => {
            let source = config(input.resolve())?;
            let hash = config_hash(&("stats", source.describe(), g.seed, budgets, k));
            let mut rows = Vec::new();
            for e in source.entries(g.seed)? {
                let ctx = |err| anyhow!("{}: {err}", e.set_id);
                let diff = difference_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
                let profile = EnergyProfile::from_rep(&e.set, &diff, &budgets).map_err(ctx)?;
                let sum = sum_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
                let ek = match k {
                    Some(k) => Some(energy(&diff, *k).map_err(ctx)?.as_f64()),
                    None => None,
                };
                rows.push(StatsRow {
                    set_id: e.set_id.clone(),
                    n: e.set.len(),
                    e2: profile.e2.to_string(),
                    e3: profile.e3.to_string(),
                    t2: profile.t2.to_string(),
                    t4: profile.t4.map(|v| v.to_string()),
                    e_8_3: profile.fractional(8.0 / 3.0).unwrap_or(f64::NAN),
                    ek,
                    sumset: sum.len(),
                    diffset: diff.len(),
                    signature: signature_text(&e.set),
                    config_hash: hash.clone(),
                });
            }
            let format = g.format.unwrap_or(Format::Json);
            let text = if format == Format::Json && rows.len() == 1 {
                stats_json(&rows[0])?
            } else {
                render(&rows, format)?
            };
            emit(&g.out, &text)?;
        }
        Command::Verify { manifest, summary, fits, log_power } => {
            let manifest = match manifest {
                Some(path) => config(read_manifest(path))?,
                None => Manifest::default_corpus(),
            };
            let suite = SuiteConfig { manifest, seed: g.seed, budgets, log_power: *log_power };
            let report = run_suite(&suite).map_err(anyhow::Error::from)?;
            let text = match g.format.unwrap_or(Format::Jsonl) {
                Format::Jsonl => report.to_jsonl(),
                f => render(&report.records, f)?,
            };
            emit(&g.out, &text)?;
            if let Some(path) = summary {
                emit(&Some(path.clone()), &render(&report.summary_rows(), Format::Csv)?)?;
            }
            if let Some(path) = fits {
                emit(&Some(path.clone()), &render(&report.fits, Format::Json)?)?;
            }
            let failures: Vec<_> = report.exact_failures().collect();
            if !failures.is_empty() {
                for f in &failures {
                    eprintln!("exact check failed: {}", serde_json::to_string(f).map_err(anyhow::Error::from)?);
                }
                return Err(Failure::Exact);
            }
        }
        Command::Scan { input, tau } => {
            let source = config(input.resolve())?;
            let hash = config_hash(&("scan", source.describe(), g.seed, budgets, tau));
            let mut rows = Vec::new();
            for e in source.entries(g.seed)? {
                let ctx = |err| anyhow!("{}: {err}", e.set_id);
                let diff = difference_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
                let sum = sum_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
                for (name, rep) in [("difference", &diff), ("sum", &sum)] {
                    for b in dyadic_slices(rep) {
                        rows.push(BandRow {
                            set_id: e.set_id.clone(),
                            rep: name,
                            mode: "band",
                            level: b.level,
                            size: b.len(),
                            mass: b.mass.to_string(),
                            config_hash: hash.clone(),
                        });
                    }
                }
                if let Some(t) = tau {
                    let s = popularity_set(&diff, *t).map_err(|err| Failure::Config(anyhow!("{err}")))?;
                    rows.push(BandRow {
                        set_id: e.set_id.clone(),
                        rep: "difference",
                        mode: "threshold",
                        level: s.level,
                        size: s.len(),
                        mass: s.mass.to_string(),
                        config_hash: hash.clone(),
                    });
                }
            }
            emit(&g.out, &render(&rows, g.format.unwrap_or(Format::Csv))?)?;
        }
        Command::Fit { input, summary } => {
            let groups = match summary {
                Some(path) => config(summary_points(path))?,
                None => {
                    let source = config(input.resolve())?;
                    corpus_points(&source.entries(g.seed)?, budgets)?
                }
            };
            let mut rows = Vec::new();
            for (quantity_id, points) in groups {
                match fit_exponent(&points) {
                    Ok(f) => rows.push(FitRow {
                        quantity_id,
                        points: f.points.len(),
                        slope: f.slope,
                        intercept: f.intercept,
                        r_squared: f.r_squared,
                    }),
                    Err(e) => eprintln!("skipping {quantity_id}: {e}"),
                }
            }
            emit(&g.out, &render(&rows, g.format.unwrap_or(Format::Csv))?)?;
        }
        Command::Eigen { input, matrix_dir } => {
            let source = config(input.resolve())?;
            let hash = config_hash(&("eigen", source.describe(), g.seed, budgets));
            let mut rows = Vec::new();
            for e in source.entries(g.seed)? {
                let ctx = |err| anyhow!("{}: {err}", e.set_id);
                let diff = difference_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
                let sum = sum_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
                let e2 = convexlab_core::energy::energy_exact(&diff, 2).map_err(ctx)?;
                for (name, rep, mode) in
                    [("difference", &diff, OperatorMode::Difference), ("sum", &sum, OperatorMode::Sum)]
                {
                    let m = operator_matrix_within(&e.set, &e.set, Weight::Rep(rep), mode, budgets.matrix)
                        .map_err(ctx)?;
                    if let Some(dir) = matrix_dir {
                        let file = dir.join(format!("{}-{name}.csv", e.set_id.replace([':', '(', ')', '='], "_")));
                        emit(&Some(file), &m.to_csv())?;
                    }
                    let mu = principal_eigenvalue(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).map_err(ctx)?;
                    rows.push(EigenRow {
                        set_id: e.set_id.clone(),
                        mode: name,
                        n: e.set.len(),
                        mu1: mu.value,
                        rayleigh_lower: e2 as f64 / e.set.len() as f64,
                        iterations: mu.iterations,
                        symmetric: mu.symmetric,
                        config_hash: hash.clone(),
                    });
                }
            }
            emit(&g.out, &render(&rows, g.format.unwrap_or(Format::Csv))?)?;
        }
        Command::Search { n, steps, chains, ceiling, temperature, cooling, checkpoint, resume: from } => {
            let params = SearchParams { initial_temperature: *temperature, cooling: *cooling, ceiling: *ceiling };
            if *chains == 0 {
                return Err(Failure::Config(anyhow!("--chains must be positive")));
            }
            let hash = config_hash(&("search", n, steps, chains, params, g.seed));
            let result = match from {
                Some(path) => {
                    let text = config(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
                    let loaded: Vec<Chain> = config(serde_json::from_str(&text).context("parsing checkpoint"))?;
                    resume(loaded, *steps, &params).map_err(anyhow::Error::from)?
                }
                None => {
                    let n = n.expect("clap requires --n without --resume");
                    run_chains(n, *chains, *steps, g.seed, &params).map_err(anyhow::Error::from)?
                }
            };
            if let Some(path) = checkpoint {
                emit(&Some(path.clone()), &serde_json::to_string_pretty(&result).map_err(anyhow::Error::from)?)?;
            }
            let mut order: Vec<usize> = (0..result.len()).collect();
            order.sort_by(|&i, &j| result[i].best.score.total_cmp(&result[j].best.score).then(i.cmp(&j)));
            debug_assert_eq!(order.first().copied(), best_chain(&result));
            let mut rows = Vec::new();
            for i in order {
                let best = &result[i].best;
                rows.push(LeaderRow {
                    chain: i,
                    n: best.n(),
                    best_score: best.score,
                    sumset: best.sumset_size().map_err(anyhow::Error::from)?,
                    d0: best.d0,
                    g: best.g.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
                    config_hash: hash.clone(),
                });
            }
            emit(&g.out, &render(&rows, g.format.unwrap_or(Format::Csv))?)?;
        }
    }
    Ok(())
}

/// Compact single-set stats with the signature as a list.
fn stats_json(row: &StatsRow) -> Result<String> {
    let mut v = serde_json::to_value(row)?;
    let sig: Vec<&str> = row.signature.split(',').filter(|s| !s.is_empty()).collect();
    v["signature"] = serde_json::to_value(sig)?;
    for key in ["E2", "E3", "T2", "T4"] {
        if let Some(s) = v.get(key).and_then(|x| x.as_str()).map(str::to_string) {
            if let Ok(small) = s.parse::<u64>() {
                if small < (1u64 << 53) {
                    v[key] = small.into();
                }
            }
        }
    }
    Ok(format!("{}\n", serde_json::to_string(&v)?))
}

type Groups = Vec<(String, Vec<(usize, f64)>)>;

fn push_point(groups: &mut Groups, key: String, point: (usize, f64)) {
    match groups.iter_mut().find(|(k, _)| *k == key) {
        Some((_, pts)) => pts.push(point),
        None => groups.push((key, vec![point])),
    }
}

fn corpus_points(entries: &[CorpusEntry], budgets: Budgets) -> Result<Groups> {
    let mut groups = Groups::new();
    for e in entries {
        let ctx = |err| anyhow!("{}: {err}", e.set_id);
        let diff = difference_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
        let sum = sum_rep_within(&e.set, &e.set, budgets.pairs).map_err(ctx)?;
        let n = e.set.len();
        let quantities = [
            ("sumset", sum.len() as f64),
            ("energy", convexlab_core::energy::energy_exact(&diff, 2).map_err(ctx)? as f64),
            ("energy3", convexlab_core::energy::energy_exact(&diff, 3).map_err(ctx)? as f64),
            ("decay-difference", convexlab_core::spectral::decay_profile(&diff).sup_constant),
            ("decay-sum", convexlab_core::spectral::decay_profile(&sum).sup_constant),
        ];
        for (q, v) in quantities {
            push_point(&mut groups, format!("{}/{q}", e.family), (n, v));
        }
    }
    Ok(groups)
}

#[derive(serde::Deserialize)]
struct SummaryIn {
    family: String,
    n: usize,
    quantity: String,
    value: f64,
}

fn summary_points(path: &Path) -> Result<Groups> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut groups = Groups::new();
    for row in reader.deserialize() {
        let row: SummaryIn = row.context("parsing summary row")?;
        push_point(&mut groups, format!("{}/{}", row.family, row.quantity), (row.n, row.value));
    }
    Ok(groups)
}

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    Ok(builder.build()?.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_pool<R: Send>(_jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    Ok(f())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.jobs == Some(0) {
        eprintln!("error: --jobs must be positive");
        return ExitCode::from(2);
    }
    let jobs = cli.global.jobs;
    let outcome = match with_pool(jobs, move || run(cli)) {
        Ok(r) => r,
        Err(e) => Err(Failure::Config(e)),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Exact) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
