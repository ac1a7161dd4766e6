//! Aggregation of an equality ILP with upper bounds into one knapsack
//! equation.
//!
//! The system `A x = b, 0 <= x <= u` is first extended with one slack per
//! variable (`x_j + s_j = u_j`) and an overall bound row
//! `Σ (x_j + s_j) + s_{n+1} = U` with `U = Σ u_j`. Row `i` of the extended
//! system is then multiplied by `M^(i-1)` and all rows are summed, where
//!
//! ```text
//! M = Δ·U + max(‖b‖∞, ‖u‖∞) + Δ + 2,    Δ = ‖A‖∞.
//! ```
//!
//! Over the non-negative integers the single resulting equation has exactly
//! the solutions of the extended system. The argument is positional: writing
//! `T_i = M^(i-1)·(row_i·x - rhs_i)`, a non-zero term can never be cancelled
//! by the terms below it. [`term_decompose`] exposes those terms so the claim
//! can be checked directly.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::enumerate::{check_budget, walk_box};
use crate::error::{Error, Result};
use crate::model::{max_abs, EqualityIlp, KnapsackEquality, SolutionVector};

/// Everything produced by [`aggregate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationContext {
    pub original: EqualityIlp,
    pub extended: EqualityIlp,
    pub big_m: BigInt,
    /// `U = Σ u_j` over the original variables.
    pub total_bound: BigInt,
    pub aggregated: KnapsackEquality,
}

/// Appends the per-variable bound rows and the overall bound row.
///
/// The result has `d + n + 1` rows and `2n + 1` variables ordered
/// `x_1..x_n, s_1..s_n, s_{n+1}`.
pub fn extend_with_slacks(ilp: &EqualityIlp) -> EqualityIlp {
    let n = ilp.num_vars();
    let width = 2 * n + 1;
    let total: BigInt = ilp.upper().iter().sum();

    let mut matrix = Vec::with_capacity(ilp.num_constraints() + n + 1);
    for row in ilp.matrix() {
        let mut padded = row.clone();
        padded.resize(width, BigInt::zero());
        matrix.push(padded);
    }
    for j in 0..n {
        let mut row = vec![BigInt::zero(); width];
        row[j] = BigInt::one();
        row[n + j] = BigInt::one();
        matrix.push(row);
    }
    matrix.push(vec![BigInt::one(); width]);

    let mut rhs = ilp.rhs().to_vec();
    rhs.extend(ilp.upper().iter().cloned());
    rhs.push(total.clone());

    let mut upper = ilp.upper().to_vec();
    upper.extend(ilp.upper().iter().cloned());
    upper.push(total);

    let mut names = ilp.var_names().to_vec();
    names.extend((1..=n + 1).map(|j| format!("s{j}")));

    EqualityIlp::new(matrix, rhs, upper)
        .and_then(|e| e.with_var_names(names))
        .expect("extension preserves dimensions")
}

/// `Δ·U + max(‖b‖∞, ‖u‖∞) + Δ + 2`. An ILP without coefficients has `Δ = 0`.
pub fn compute_big_m(ilp: &EqualityIlp) -> BigInt {
    let delta = ilp
        .matrix()
        .iter()
        .map(|row| max_abs(row))
        .max()
        .unwrap_or_else(BigInt::zero);
    let total: BigInt = ilp.upper().iter().sum();
    let largest = max_abs(ilp.rhs()).max(max_abs(ilp.upper()));
    &delta * &total + largest + &delta + 2u32
}

/// Sums the rows of `system` weighted by `1, base, base², ...` in row order.
/// The right-hand side receives the same weighting.
pub fn power_weighted_sum(system: &EqualityIlp, base: &BigInt) -> KnapsackEquality {
    let mut weights = vec![BigInt::zero(); system.num_vars()];
    let mut rhs = BigInt::zero();
    let mut power = BigInt::one();
    for (row, b) in system.matrix().iter().zip(system.rhs()) {
        for (w, a) in weights.iter_mut().zip(row) {
            if !a.is_zero() {
                *w += a * &power;
            }
        }
        rhs += b * &power;
        power *= base;
    }
    KnapsackEquality::new(weights, rhs)
        .with_var_names(system.var_names().to_vec())
        .expect("one weight per variable")
}

/// `T_i = base^(i-1) · (row_i · x - rhs_i)` for every row of `system`.
pub fn power_terms(system: &EqualityIlp, base: &BigInt, x: &[BigInt]) -> Result<Vec<BigInt>> {
    if x.len() != system.num_vars() {
        return Err(Error::DimensionMismatch(format!(
            "vector has {} entries, system has {} variables",
            x.len(),
            system.num_vars()
        )));
    }
    let mut power = BigInt::one();
    let mut terms = Vec::with_capacity(system.num_constraints());
    for i in 0..system.num_constraints() {
        terms.push(&power * system.residual(i, x));
        power *= base;
    }
    Ok(terms)
}

/// Whether the highest non-zero term strictly dominates the sum of all terms
/// below it. Vacuously true when every term is zero.
pub fn top_term_dominates(terms: &[BigInt]) -> bool {
    match terms.iter().rposition(|t| !t.is_zero()) {
        None => true,
        Some(i) => {
            let below: BigInt = terms[..i].iter().sum();
            below.abs() < terms[i].abs()
        }
    }
}

/// Builds the extended system, `M`, and the aggregated equation.
pub fn aggregate(ilp: &EqualityIlp) -> AggregationContext {
    aggregate_with_modulus(ilp, compute_big_m(ilp))
}

/// Same as [`aggregate`] but with a caller-chosen modulus. Equivalence is
/// only guaranteed for the modulus returned by [`compute_big_m`].
pub fn aggregate_with_modulus(ilp: &EqualityIlp, big_m: BigInt) -> AggregationContext {
    let extended = extend_with_slacks(ilp);
    let aggregated = power_weighted_sum(&extended, &big_m);
    AggregationContext {
        original: ilp.clone(),
        total_bound: ilp.upper().iter().sum(),
        extended,
        big_m,
        aggregated,
    }
}

/// The terms `T_1..T_{d+n+1}` of `x` against the extended system.
pub fn term_decompose(ctx: &AggregationContext, x: &SolutionVector) -> Result<Vec<BigInt>> {
    power_terms(&ctx.extended, &ctx.big_m, x.values())
}

/// Outcome of comparing the extended system against its aggregate over the
/// whole box of the extended system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Solutions of the extended system, lexicographically sorted.
    pub extended_solutions: Vec<SolutionVector>,
    /// Solutions of the aggregated equation, lexicographically sorted.
    pub aggregate_solutions: Vec<SolutionVector>,
    pub identical: bool,
    /// Smallest vector in exactly one of the two sets, if any.
    pub witness: Option<SolutionVector>,
}

/// Enumerates the box `∏ [0, u'_j]` of the extended system and compares both
/// solution sets. A mismatch is reported, not raised.
pub fn verify_equivalence(ctx: &AggregationContext, box_limit: u64) -> Result<EquivalenceReport> {
    let extended = &ctx.extended;
    check_budget(extended.upper(), box_limit)?;

    let mut forms = extended.matrix().to_vec();
    forms.push(ctx.aggregated.weights().to_vec());
    let rows = extended.num_constraints();

    let mut extended_solutions = Vec::new();
    let mut aggregate_solutions = Vec::new();
    walk_box(extended.upper(), &forms, |x, values| {
        let feasible = values[..rows]
            .iter()
            .zip(extended.rhs())
            .all(|(v, b)| v == b);
        let aggregated = &values[rows] == ctx.aggregated.rhs();
        if feasible || aggregated {
            let point = SolutionVector::new(x.to_vec()).expect("box points are non-negative");
            if feasible {
                extended_solutions.push(point.clone());
            }
            if aggregated {
                aggregate_solutions.push(point);
            }
        }
    });

    let identical = extended_solutions == aggregate_solutions;
    let witness = if identical {
        None
    } else {
        extended_solutions
            .iter()
            .filter(|s| aggregate_solutions.binary_search(s).is_err())
            .chain(
                aggregate_solutions
                    .iter()
                    .filter(|s| extended_solutions.binary_search(s).is_err()),
            )
            .min()
            .cloned()
    };
    Ok(EquivalenceReport {
        extended_solutions,
        aggregate_solutions,
        identical,
        witness,
    })
}

/// Checks `Σ_{i=1}^{m} M^(i-1)(M-1) = M^m - 1`.
pub fn geometric_identity_holds(big_m: &BigInt, m: u32) -> bool {
    let mut sum = BigInt::zero();
    let mut power = BigInt::one();
    for _ in 0..m {
        sum += &power * (big_m - 1u32);
        power *= big_m;
    }
    sum == power - 1u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_solution;

    fn ints(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    fn tiny() -> EqualityIlp {
        EqualityIlp::new(vec![ints(&[1])], ints(&[2]), ints(&[3])).unwrap()
    }

    #[test]
    fn extension_of_tiny_instance() {
        let ext = extend_with_slacks(&tiny());
        assert_eq!(ext.num_constraints(), 3);
        assert_eq!(ext.num_vars(), 3);
        assert_eq!(
            ext.matrix(),
            &[ints(&[1, 0, 0]), ints(&[1, 1, 0]), ints(&[1, 1, 1])]
        );
        assert_eq!(ext.rhs(), ints(&[2, 3, 3]).as_slice());
        assert_eq!(ext.upper(), ints(&[3, 3, 3]).as_slice());
        assert_eq!(ext.var_names(), ["x1", "s1", "s2"]);
    }

    #[test]
    fn overall_row_uses_sum_of_bounds() {
        let ilp = EqualityIlp::new(vec![ints(&[1, 1])], ints(&[1]), ints(&[1, 1])).unwrap();
        let ext = extend_with_slacks(&ilp);
        assert_eq!(ext.rhs().last(), Some(&BigInt::from(2)));
    }

    #[test]
    fn extension_of_identity_system_matches_brute_force() {
        let ilp = EqualityIlp::new(
            vec![ints(&[1, 0]), ints(&[0, 1])],
            ints(&[1, 1]),
            ints(&[2, 2]),
        )
        .unwrap();
        let ext = extend_with_slacks(&ilp);
        assert_eq!((ext.num_constraints(), ext.num_vars()), (5, 5));
        assert_eq!(ext.rhs().last(), Some(&BigInt::from(4)));

        // Every feasible x in the original box extends uniquely; nothing else
        // in the extended box is feasible.
        let mut feasible = Vec::new();
        for a in 0..=2u64 {
            for b in 0..=2u64 {
                for c in 0..=2u64 {
                    for d in 0..=2u64 {
                        for e in 0..=4u64 {
                            let x = SolutionVector::from_u64s(&[a, b, c, d, e]);
                            if check_solution(&ext, &x).unwrap() {
                                feasible.push(x);
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(feasible, vec![SolutionVector::from_u64s(&[1, 1, 1, 1, 0])]);
    }

    #[test]
    fn big_m_examples() {
        assert_eq!(compute_big_m(&tiny()), BigInt::from(9));
        let zero = EqualityIlp::new(vec![ints(&[0])], ints(&[0]), ints(&[0])).unwrap();
        assert_eq!(compute_big_m(&zero), BigInt::from(2));
        // Δ = 3, U = 6, max(‖b‖, ‖u‖) = 5: 18 + 5 + 3 + 2.
        let ilp = EqualityIlp::new(
            vec![ints(&[3, -1]), ints(&[0, 2])],
            ints(&[-5, 4]),
            ints(&[2, 4]),
        )
        .unwrap();
        assert_eq!(compute_big_m(&ilp), BigInt::from(28));
    }

    #[test]
    fn aggregate_of_tiny_instance() {
        let ctx = aggregate(&tiny());
        assert_eq!(ctx.big_m, BigInt::from(9));
        assert_eq!(ctx.total_bound, BigInt::from(3));
        assert_eq!(ctx.aggregated.weights(), ints(&[91, 90, 81]).as_slice());
        assert_eq!(ctx.aggregated.rhs(), &BigInt::from(272));

        // Independent enumeration of 91a + 90b + 81c = 272 over all
        // non-negative integers (each variable is capped by 272 / weight).
        let mut solutions = Vec::new();
        for a in 0..=272 / 91 {
            for b in 0..=272 / 90 {
                for c in 0..=272 / 81 {
                    if 91 * a + 90 * b + 81 * c == 272 {
                        solutions.push((a, b, c));
                    }
                }
            }
        }
        assert_eq!(solutions, vec![(2, 1, 0)]);
    }

    #[test]
    fn term_decomposition_examples() {
        let ctx = aggregate(&tiny());
        let t = term_decompose(&ctx, &SolutionVector::from_u64s(&[2, 1, 0])).unwrap();
        assert_eq!(t, ints(&[0, 0, 0]));
        let t = term_decompose(&ctx, &SolutionVector::from_u64s(&[3, 0, 0])).unwrap();
        assert_eq!(t, ints(&[1, 0, 0]));
        assert!(term_decompose(&ctx, &SolutionVector::from_u64s(&[1])).is_err());
    }

    #[test]
    fn equivalence_report_on_tiny_instance() {
        let report = verify_equivalence(&aggregate(&tiny()), 1_000).unwrap();
        assert!(report.identical);
        assert_eq!(
            report.extended_solutions,
            vec![SolutionVector::from_u64s(&[2, 1, 0])]
        );
        assert_eq!(report.witness, None);
    }

    #[test]
    fn infeasible_system_gives_identical_empty_sets() {
        let ilp = EqualityIlp::new(vec![ints(&[2])], ints(&[3]), ints(&[3])).unwrap();
        let report = verify_equivalence(&aggregate(&ilp), 1_000).unwrap();
        assert!(report.identical);
        assert!(report.extended_solutions.is_empty());
        assert!(report.aggregate_solutions.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let err = verify_equivalence(&aggregate(&tiny()), 63).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                required: BigInt::from(64),
                budget: BigInt::from(63)
            }
        );
    }

    #[test]
    fn undersized_modulus_produces_a_witness() {
        let ctx = aggregate_with_modulus(&tiny(), BigInt::from(2));
        // 7x + 6s1 + 4s2 = 20 admits (0, 2, 2), which violates x1 = 2.
        let report = verify_equivalence(&ctx, 1_000).unwrap();
        assert!(!report.identical);
        assert_eq!(report.witness, Some(SolutionVector::from_u64s(&[0, 2, 2])));
    }

    #[test]
    fn modulus_one_below_still_reports_consistently() {
        let ctx = aggregate_with_modulus(&tiny(), BigInt::from(8));
        let report = verify_equivalence(&ctx, 1_000).unwrap();
        assert_eq!(report.identical, report.witness.is_none());
    }

    #[test]
    fn dominance_helper() {
        assert!(top_term_dominates(&ints(&[0, 0])));
        assert!(top_term_dominates(&ints(&[3, -9, 27])));
        assert!(!top_term_dominates(&ints(&[9, -9])));
    }

    #[test]
    fn geometric_identity() {
        for m in [2i64, 9, 28, 1_000_003] {
            for k in 0..12 {
                assert!(geometric_identity_holds(&BigInt::from(m), k));
            }
        }
    }
}
