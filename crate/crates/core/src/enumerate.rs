//! Lexicographic walks over integer boxes `∏ [0, u_j]` that keep a set of
//! linear forms up to date incrementally instead of re-evaluating them at
//! every point.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Number of points in `∏ [0, u_j]`.
pub fn box_size(bounds: &[BigInt]) -> BigInt {
    bounds.iter().map(|u| u + 1u32).product()
}

/// Errors with [`Error::BudgetExceeded`] when the box holds more than
/// `budget` points.
pub fn check_budget(bounds: &[BigInt], budget: u64) -> Result<()> {
    let required = box_size(bounds);
    if required > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            required,
            budget: BigInt::from(budget),
        });
    }
    Ok(())
}

/// Visits every point of the box in lexicographic order (last coordinate
/// fastest). `forms[f]` is a coefficient vector; `visit` receives the point
/// and the current value `forms[f] · x` of every form.
pub fn walk_box<F>(bounds: &[BigInt], forms: &[Vec<BigInt>], mut visit: F)
where
    F: FnMut(&[BigInt], &[BigInt]),
{
    let n = bounds.len();
    let mut x = vec![BigInt::zero(); n];
    let mut values = vec![BigInt::zero(); forms.len()];
    if n == 0 {
        visit(&x, &values);
        return;
    }
    // Counts fit in u64 whenever the caller has checked a budget.
    let limits: Vec<u64> = bounds
        .iter()
        .map(|u| u.to_u64().expect("box bound exceeds u64"))
        .collect();
    let mut counters = vec![0u64; n];
    loop {
        visit(&x, &values);
        let Some(pos) = (0..n).rev().find(|&j| counters[j] < limits[j]) else {
            return;
        };
        for p in pos + 1..n {
            if counters[p] > 0 {
                for (value, form) in values.iter_mut().zip(forms) {
                    *value -= &form[p] * &x[p];
                }
                counters[p] = 0;
                x[p] = BigInt::zero();
            }
        }
        counters[pos] += 1;
        x[pos] += 1u32;
        for (value, form) in values.iter_mut().zip(forms) {
            *value += &form[pos];
        }
    }
}
