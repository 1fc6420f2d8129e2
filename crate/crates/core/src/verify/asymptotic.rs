use super::{budget_note, CheckResult, Layer, Params, Relation, SetAnalysis, Status};
use crate::error::Result;
use crate::spectral::{decay_profile, dyadic_levels, popularity_set};

/// Which derivative-sign class a statement assumes.
#[derive(Clone, Copy)]
enum Class {
    Convex,
    NonPositiveThird,
    NegativeThird,
    NegativeThirdNonPositiveFourth,
}

impl Class {
    fn holds(self, an: &SetAnalysis) -> bool {
        let sig = an.set.cached_signature();
        match self {
            Class::Convex => sig.is_convex(),
            Class::NonPositiveThird => sig.is_convex_nonpositive_third(),
            Class::NegativeThird => sig.is_convex_negative_third(),
            Class::NegativeThirdNonPositiveFourth => sig.is_convex_negative_third_nonpositive_fourth(),
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Class::Convex => "requires second differences > 0",
            Class::NonPositiveThird => "requires second differences > 0, third <= 0",
            Class::NegativeThird => "requires second differences > 0, third < 0",
            Class::NegativeThirdNonPositiveFourth => "requires second differences > 0, third < 0, fourth <= 0",
        }
    }
}

fn not_applicable(id: &'static str, an: &SetAnalysis, relation: Relation, why: &str) -> CheckResult {
    CheckResult::skipped(id, &an.set_id, Layer::Asymptotic, relation, Status::NotApplicable, why)
}

/// Keeps the worst record: largest ratio for upper bounds, smallest for
/// lower bounds. Earlier records win ties.
fn worst(records: Vec<CheckResult>) -> Option<CheckResult> {
    records.into_iter().reduce(|best, r| {
        let (b, c) = (best.ratio.unwrap_or(f64::NAN), r.ratio.unwrap_or(f64::NAN));
        let better = match r.relation {
            Relation::AtLeast => c < b,
            _ => c > b,
        };
        if better {
            r
        } else {
            best
        }
    })
}

/// Scans the dyadic popularity sets of `A∘A` and keeps the worst ratio.
fn scan_tau(
    id: &'static str,
    an: &SetAnalysis,
    rhs: impl Fn(u64, usize) -> f64,
) -> Result<CheckResult> {
    let mut evaluated = Vec::new();
    let mut skipped = Vec::new();
    for tau in dyadic_levels(&an.diff) {
        let slice = popularity_set(&an.diff, tau)?;
        match an.cross_energy(&slice.support) {
            Ok(e) => evaluated.push(
                CheckResult::ratio(id, &an.set_id, Relation::AtMost, e as f64, rhs(tau, slice.len()))
                    .with_params(Params::tau(tau)),
            ),
            Err(err) => match budget_note(&err) {
                Some(_) => skipped.push(tau),
                None => return Err(err),
            },
        }
    }
    let note = (!skipped.is_empty()).then(|| format!("levels {skipped:?} over budget"));
    Ok(match worst(evaluated) {
        Some(mut r) => {
            r.note = note;
            r
        }
        None => CheckResult::skipped(
            id,
            &an.set_id,
            Layer::Asymptotic,
            Relation::AtMost,
            Status::SkippedBudget,
            note.unwrap_or_default(),
        ),
    })
}

const T4_ID: &str = "t4-energy";

/// `T_4 ≪ n³T_2 + n⁴T_2^{3/4}`; needs distinct second differences.
fn t4_ratio(an: &SetAnalysis) -> Result<CheckResult> {
    if !an.set.second_differences_distinct()? {
        return Ok(not_applicable(T4_ID, an, Relation::AtMost, "requires distinct second differences"));
    }
    let Some(t4) = an.t4 else {
        return Ok(CheckResult::skipped(
            T4_ID,
            &an.set_id,
            Layer::Asymptotic,
            Relation::AtMost,
            Status::SkippedBudget,
            format!("T_4 not computed for n = {}", an.n()),
        ));
    };
    let n = an.n() as f64;
    let t2 = an.t2()? as f64;
    let rhs = n.powi(3) * t2 + n.powi(4) * t2.powf(0.75);
    Ok(CheckResult::ratio(T4_ID, &an.set_id, Relation::AtMost, t4 as f64, rhs))
}

/// Ratio records for the statements with unknown constants. Each record
/// is gated on its hypothesis; nothing here is asserted.
pub fn check_asymptotic(an: &SetAnalysis) -> Result<Vec<CheckResult>> {
    let n = an.n() as f64;
    let sumset = an.sumset_size() as f64;
    let e2 = an.energy()? as f64;
    let mut out = Vec::new();

    let mut gated = |id: &'static str, class: Class, relation: Relation, make: &dyn Fn() -> Result<CheckResult>| {
        let r = if class.holds(an) { make()? } else { not_applicable(id, an, relation, class.describe()) };
        out.push(r);
        Ok::<_, crate::Error>(())
    };

    gated("sumset-exponent-3/2", Class::Convex, Relation::AtLeast, &|| {
        Ok(CheckResult::ratio("sumset-exponent-3/2", &an.set_id, Relation::AtLeast, sumset, n.powf(1.5)))
    })?;

    gated("cross-energy-popular", Class::Convex, Relation::AtMost, &|| {
        scan_tau("cross-energy-popular", an, |_, size| n * (size as f64).powf(1.5))
    })?;

    gated(T4_ID, Class::Convex, Relation::AtMost, &|| t4_ratio(an))?;

    gated("popular-cross-energy-decay", Class::NegativeThird, Relation::AtMost, &|| {
        scan_tau("popular-cross-energy-decay", an, |tau, _| n * n * e2.powf(0.875) / (tau as f64).powi(2))
    })?;

    gated("energy-exponent-328/137", Class::NegativeThird, Relation::AtMost, &|| {
        Ok(CheckResult::ratio("energy-exponent-328/137", &an.set_id, Relation::AtMost, e2, n.powf(328.0 / 137.0)))
    })?;
    gated("energy-exponent-12/5", Class::NonPositiveThird, Relation::AtMost, &|| {
        Ok(CheckResult::ratio("energy-exponent-12/5", &an.set_id, Relation::AtMost, e2, n.powf(2.4)))
    })?;
    gated("sumset-exponent-221/137", Class::NegativeThird, Relation::AtLeast, &|| {
        Ok(CheckResult::ratio("sumset-exponent-221/137", &an.set_id, Relation::AtLeast, sumset, n.powf(221.0 / 137.0)))
    })?;
    gated("sumset-exponent-8/5", Class::NonPositiveThird, Relation::AtLeast, &|| {
        Ok(CheckResult::ratio("sumset-exponent-8/5", &an.set_id, Relation::AtLeast, sumset, n.powf(1.6)))
    })?;
    gated("sumset-exponent-5/3", Class::NegativeThirdNonPositiveFourth, Relation::AtLeast, &|| {
        Ok(CheckResult::ratio("sumset-exponent-5/3", &an.set_id, Relation::AtLeast, sumset, n.powf(5.0 / 3.0)))
    })?;

    for (id, rep) in [("decay-difference", &an.diff), ("decay-sum", &an.sum)] {
        gated(id, Class::NonPositiveThird, Relation::AtMost, &|| {
            let d = decay_profile(rep);
            let j = d.argmax.max(1);
            let count = d.sorted_counts.get(j - 1).copied().unwrap_or(0) as f64;
            let rhs = n * (j as f64).powf(-d.exponent);
            let mut r = CheckResult::ratio(id, &an.set_id, Relation::AtMost, count, rhs);
            r.ratio = Some(d.sup_constant);
            r.params.rank = Some(j);
            Ok(r)
        })?;
    }
    Ok(out)
}
