use super::{budget_note, CheckResult, Layer, Params, Relation, SetAnalysis, Status};
use crate::energy::cross_energy_sorted;
use crate::error::{Error, Result};
use crate::spectral::{dyadic_levels, operator_matrix_within, popularity_set, principal_eigenvalue, OperatorMode, Weight};
use crate::spectral::{DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};

/// Relative slack allowed on the floating Rayleigh-quotient comparison.
pub const RAYLEIGH_SLACK: f64 = 1e-9;

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or(Error::Overflow("exact check"))
}

fn skip(id: &'static str, set_id: &str, err: Error, params: Params) -> Result<CheckResult> {
    match budget_note(&err) {
        Some(note) => Ok(CheckResult::skipped(id, set_id, Layer::Exact, Relation::AtMost, Status::SkippedBudget, note)
            .with_params(params)),
        None => Err(err),
    }
}

/// Identities and constant-one inequalities; every item must pass.
pub fn check_exact(an: &SetAnalysis) -> Result<Vec<CheckResult>> {
    let id = an.set_id.as_str();
    let n = an.n() as u128;
    let e2 = an.energy()?;
    let e3 = an.energy3()?;
    let mut out = vec![
        CheckResult::exact("exact.energy-equals-t2", id, Relation::Equal, e2, an.t2()?),
        CheckResult::exact("exact.mass-conservation", id, Relation::Equal, an.diff.total_mass(), n * n),
    ];

    for tau in dyadic_levels(&an.diff) {
        let slice = popularity_set(&an.diff, tau)?;
        let size = slice.len() as u128;
        let t = tau as u128;
        let params = Params::tau(tau);
        out.push(
            CheckResult::exact("exact.popularity-e2", id, Relation::AtMost, mul(t * t, size)?, e2).with_params(params),
        );
        out.push(
            CheckResult::exact("exact.popularity-e3", id, Relation::AtMost, mul(t * t * t, size)?, e3)
                .with_params(params),
        );

        let self_energy = cross_energy_sorted(&slice.support, &slice.support, 2, an.budgets.pairs);

        const T4_ID: &str = "exact.popular-energy-t4";
        match (an.t4, &self_energy) {
            (None, _) => out.push(
                CheckResult::skipped(
                    T4_ID,
                    id,
                    Layer::Exact,
                    Relation::AtMost,
                    Status::SkippedBudget,
                    format!("T_4 not computed for n = {} (cap {})", n, an.budgets.t4_max_n),
                )
                .with_params(params),
            ),
            (Some(_), Err(e)) => out.push(skip(T4_ID, id, copy_error(e), params)?),
            (Some(t4), Ok(es)) => {
                let scaled = mul(t.pow(4), *es)?;
                let mut r = CheckResult::exact(T4_ID, id, Relation::AtMost, scaled, t4).with_params(params);
                r.lhs = Some(*es as f64);
                r.rhs = Some(t4 as f64 / (t as f64).powi(4));
                out.push(r);
            }
        }

        const CS_ID: &str = "exact.cauchy-schwarz";
        let cross = an.cross_energy(&slice.support);
        match (cross, &self_energy) {
            (Err(e), _) => out.push(skip(CS_ID, id, e, params)?),
            (_, Err(e)) => out.push(skip(CS_ID, id, copy_error(e), params)?),
            (Ok(c), Ok(es)) => {
                out.push(CheckResult::exact(CS_ID, id, Relation::AtMost, mul(c, c)?, mul(e2, *es)?).with_params(params))
            }
        }
    }

    out.push(rayleigh(an, e2)?);
    Ok(out)
}

/// `μ₁(A∘A on A × A) >= E(A)/|A|`, the all-ones Rayleigh quotient.
fn rayleigh(an: &SetAnalysis, e2: u128) -> Result<CheckResult> {
    const ID: &str = "exact.rayleigh";
    let id = an.set_id.as_str();
    let m = match operator_matrix_within(&an.set, &an.set, Weight::Rep(&an.diff), OperatorMode::Difference, an.budgets.matrix) {
        Ok(m) => m,
        Err(e) => return skip(ID, id, e, Params::default()),
    };
    let mu = principal_eigenvalue(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?.value;
    let quotient = e2 as f64 / an.n() as f64;
    let mut r = CheckResult::ratio(ID, id, Relation::AtMost, quotient, mu);
    r.layer = Layer::Exact;
    r.pass = quotient <= mu * (1.0 + RAYLEIGH_SLACK);
    Ok(r)
}

/// Shared results hold errors by reference; budget errors are rebuilt so
/// they can still become skip markers.
fn copy_error(err: &Error) -> Error {
    match err {
        Error::BudgetExceeded { needed, budget } => Error::BudgetExceeded { needed: *needed, budget: *budget },
        other => Error::Invariant(other.to_string()),
    }
}
