use super::{budget_note, CheckResult, Layer, Params, Relation, SetAnalysis, Status};
use crate::energy::{triple_energy_weighted_with, RepFunction};
use crate::error::{Error, Result};
use crate::spectral::{dyadic_levels, dyadic_slices, heaviest_slice, popularity_set, PopularitySlice};

const EQ4: &str = "chain.sumset-triple-energy";
const EQ11: &str = "chain.energy-popular-bands";
const EQ13: &str = "chain.sumset-popular-bands";

fn marker(id: &'static str, an: &SetAnalysis, status: Status, note: impl Into<String>) -> CheckResult {
    CheckResult::skipped(id, &an.set_id, Layer::Asymptotic, Relation::AtMost, status, note)
}

/// Bands of `rep` whose level lies in `[lower, upper]`, plus the level of
/// the heaviest one.
fn bands_in(rep: &RepFunction, lower: f64, upper: f64) -> (Vec<PopularitySlice>, Option<u64>) {
    let bands: Vec<_> = dyadic_slices(rep)
        .into_iter()
        .filter(|b| (b.level as f64) >= lower && (b.level as f64) <= upper)
        .collect();
    let heaviest = heaviest_slice(rep, lower, upper).ok().map(|s| s.level);
    (bands, heaviest)
}

/// Turns a budgeted value into a skip marker, passing other errors through.
fn budgeted<T>(value: Result<T>, id: &'static str, an: &SetAnalysis, params: Params) -> Result<Result<T, CheckResult>> {
    match value {
        Ok(v) => Ok(Ok(v)),
        Err(e) => match budget_note(&e) {
            Some(note) => Ok(Err(marker(id, an, Status::SkippedBudget, note).with_params(params))),
            None => Err(e),
        },
    }
}

fn flag_tightest(records: &mut [CheckResult]) {
    let best = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_evaluated())
        .min_by(|(i, a), (j, b)| a.rhs.partial_cmp(&b.rhs).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(j)))
        .map(|(i, _)| i);
    if let Some(i) = best {
        records[i].tightest = true;
    }
}

/// Ratio records for the three dyadic-pigeonhole inequalities of the
/// sumset argument, scanned over every band in range and every dyadic
/// popularity threshold of `A∘A`.
pub fn check_spectral_chain(an: &SetAnalysis) -> Result<Vec<CheckResult>> {
    if an.n() < 2 {
        return Ok([EQ4, EQ11, EQ13]
            .into_iter()
            .map(|id| marker(id, an, Status::NotApplicable, "needs at least two elements"))
            .collect());
    }
    let n = an.n() as f64;
    let sumset = an.sumset_size() as f64;
    let e2 = an.energy()? as f64;
    let e3 = an.energy3()? as f64;
    let sumset_lhs = n.powi(10) / (sumset * sumset);
    let sumset_lower = n * n / sumset;

    let mut out = Vec::new();

    // |A|^10 / |A+A|^2 against E_3(A) E_3(A, A, S) over bands S of A∗A.
    let (bands, heaviest) = bands_in(&an.sum, sumset_lower, an.sum.max_count() as f64);
    let mut records = Vec::new();
    for band in &bands {
        let params = Params::delta(band.level);
        let weighted = triple_energy_weighted_with(&an.diff, &band.support, an.budgets.pairs);
        let mut r = match budgeted(weighted, EQ4, an, params)? {
            Ok(w) => CheckResult::ratio(EQ4, &an.set_id, Relation::AtMost, sumset_lhs, e3 * w as f64).with_params(params),
            Err(skip) => skip,
        };
        r.heaviest = heaviest == Some(band.level);
        records.push(r);
    }
    push_scan(&mut out, records, EQ4, an, sumset_lower, an.sum.max_count() as f64);

    let thresholds: Vec<PopularitySlice> =
        dyadic_levels(&an.diff).into_iter().map(|t| popularity_set(&an.diff, t)).collect::<Result<_>>()?;

    // E^6 / |A|^6 against E_3 Δ^3 τ^2 E(A, S_Δ)^{1/2} E(A, S_τ)^{1/2}.
    let lower = e2 / (n * n);
    let upper = n.powi(4) / e2.powf(1.5);
    let (bands, heaviest) = bands_in(&an.diff, lower, upper);
    let lhs = (e2 / n).powi(6);
    let records = pair_scan(an, EQ11, &bands, heaviest, &thresholds, |delta, tau, e_delta, e_tau| {
        (lhs, e3 * delta.powi(3) * tau * tau * (e_delta * e_tau).sqrt())
    })?;
    push_scan(&mut out, records, EQ11, an, lower, upper);

    // |A|^10 / |A+A|^2 against E_3 τ^2 Δ^{-1} E(A, S_Δ)^{1/2} E(A, S_τ)^{1/2}.
    let upper = n.powf(0.4);
    let (bands, heaviest) = bands_in(&an.sum, sumset_lower, upper);
    let records = pair_scan(an, EQ13, &bands, heaviest, &thresholds, |delta, tau, e_delta, e_tau| {
        (sumset_lhs, e3 * tau * tau / delta * (e_delta * e_tau).sqrt())
    })?;
    push_scan(&mut out, records, EQ13, an, sumset_lower, upper);
    Ok(out)
}

fn push_scan(out: &mut Vec<CheckResult>, mut records: Vec<CheckResult>, id: &'static str, an: &SetAnalysis, lower: f64, upper: f64) {
    if records.is_empty() {
        out.push(marker(id, an, Status::EmptyRange, Error::EmptyRange { lower, upper }.to_string()));
    } else {
        flag_tightest(&mut records);
        out.extend(records);
    }
}

fn pair_scan(
    an: &SetAnalysis,
    id: &'static str,
    bands: &[PopularitySlice],
    heaviest: Option<u64>,
    thresholds: &[PopularitySlice],
    sides: impl Fn(f64, f64, f64, f64) -> (f64, f64),
) -> Result<Vec<CheckResult>> {
    let mut records = Vec::new();
    for band in bands {
        for threshold in thresholds {
            let params = Params { tau: Some(threshold.level), delta: Some(band.level), rank: None };
            let both = an.cross_energy(&band.support).and_then(|d| an.cross_energy(&threshold.support).map(|t| (d, t)));
            let mut r = match budgeted(both, id, an, params)? {
                Ok((d, t)) => {
                    let (lhs, rhs) = sides(band.level as f64, threshold.level as f64, d as f64, t as f64);
                    CheckResult::ratio(id, &an.set_id, Relation::AtMost, lhs, rhs).with_params(params)
                }
                Err(skip) => skip,
            };
            r.heaviest = heaviest == Some(band.level);
            records.push(r);
        }
    }
    Ok(records)
}
