//! Direct tuple enumeration. Slow on purpose: these counts share no code
//! with the convolution path and serve as its reference.

use crate::error::{Error, Result};
use crate::par;
use crate::set::OrderedIntSet;
use crate::within_budget;

/// Default tuple budget for the oracles.
pub const ORACLE_BUDGET: u64 = 100_000_000;

fn tuple_count(base: usize, k: u32) -> u128 {
    (base as u128).checked_pow(k).unwrap_or(u128::MAX)
}

/// Advances a mixed-radix counter; false once it wraps around.
fn odometer(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// `#{(a_1, b_1, …, a_k, b_k) : a_1 - b_1 = ⋯ = a_k - b_k}`.
pub fn brute_force_energy(a: &OrderedIntSet, b: &OrderedIntSet, k: u32) -> Result<u128> {
    if k == 0 {
        return Err(Error::Precondition("tuple order must be positive".into()));
    }
    let pairs: Vec<(i64, i64)> = a
        .elements()
        .iter()
        .flat_map(|&x| b.elements().iter().map(move |&y| (x, y)))
        .collect();
    within_budget(tuple_count(pairs.len(), k), ORACLE_BUDGET)?;
    let rest = (k - 1) as usize;
    Ok(par::sum_u128(pairs.len(), |first| {
        let (a1, b1) = pairs[first];
        let mut digits = vec![0usize; rest];
        let mut count = 0u128;
        loop {
            if digits.iter().all(|&d| pairs[d].0 - pairs[d].1 == a1 - b1) {
                count += 1;
            }
            if !odometer(&mut digits, pairs.len()) {
                break;
            }
        }
        count
    }))
}

/// `#{(a_1, …, a_k, a'_1, …, a'_k) : a_1 + ⋯ + a_k = a'_1 + ⋯ + a'_k}`.
pub fn brute_force_t(a: &OrderedIntSet, k: u32) -> Result<u128> {
    if k == 0 {
        return Err(Error::Precondition("tuple order must be positive".into()));
    }
    let n = a.len();
    within_budget(tuple_count(n, 2 * k), ORACLE_BUDGET)?;
    let el = a.elements();
    let rest = (2 * k - 1) as usize;
    let k = k as usize;
    Ok(par::sum_u128(n, |first| {
        let mut digits = vec![0usize; rest];
        let mut count = 0u128;
        loop {
            let mut left = el[first] as i128;
            for &d in &digits[..k - 1] {
                left += el[d] as i128;
            }
            let right: i128 = digits[k - 1..].iter().map(|&d| el[d] as i128).sum();
            if left == right {
                count += 1;
            }
            if !odometer(&mut digits, n) {
                break;
            }
        }
        count
    }))
}
