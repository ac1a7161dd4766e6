use std::collections::BTreeSet;

use knapagg::aggregation::{compute_big_m, power_terms};
use knapagg::gadget::{
    build_equality_system, build_knapsack_equation, build_simplified_system,
    decimal_to_binary_trace, enumerate_gadget_solutions, enumerate_simplified_solutions,
    gadget_big_m, simplified_values, total_bound, EnumerationMode, GadgetParams,
};
use knapagg::model::{check_solution, check_values, EqualityIlp};
use knapagg::verifier::reject_random_nonsolutions;
use knapagg::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

const GRID: [(usize, i64); 7] = [(1, 2), (1, 3), (1, 5), (2, 2), (2, 3), (2, 5), (3, 2)];

fn params(d: usize, gamma: i64) -> GadgetParams {
    GadgetParams::new(d, BigInt::from(gamma)).unwrap()
}

fn pow(base: i64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

#[test]
fn exhaustive_enumeration_finds_exactly_the_powers() {
    for (d, gamma) in GRID {
        let p = params(d, gamma);
        let found = enumerate_gadget_solutions(&p, EnumerationMode::Exhaustive).unwrap();
        let k = (1u32 << d) - 1;
        assert_eq!(found.len(), k as usize, "d={d} gamma={gamma}");
        for (idx, a) in found.iter().enumerate() {
            let i = idx as u32 + 1;
            assert_eq!(a.r()[d], pow(gamma, i));
            let bits: u32 = a
                .xbin()
                .iter()
                .enumerate()
                .map(|(l, b)| if b.is_zero() { 0 } else { 1 << l })
                .sum();
            assert_eq!(bits, i);
        }
        let structural = enumerate_gadget_solutions(&p, EnumerationMode::Structural).unwrap();
        assert_eq!(found, structural);
    }
}

#[test]
fn traces_are_feasible_and_y_equals_z() {
    for (d, gamma) in GRID.iter().copied().chain([(3, 5), (4, 2), (4, 3)]) {
        let p = params(d, gamma);
        let system = build_equality_system(&p);
        for i in 1..(1u32 << d) {
            let a = decimal_to_binary_trace(&p, &BigInt::from(i)).unwrap();
            assert!(check_solution(&system, &a.to_solution_vector().unwrap()).unwrap());
            assert_eq!(a.exponent(), BigInt::from(i));
            assert_eq!(a.y(), a.z(), "d={d} gamma={gamma} i={i}");
        }
    }
}

#[test]
fn knapsack_weights_lie_in_capacity_range() {
    for (d, gamma) in GRID.iter().copied().chain([(3, 5), (2, 12), (3, 28)]) {
        let kp = build_knapsack_equation(&params(d, gamma)).unwrap();
        assert_eq!(kp.num_vars(), 12 * d + 4);
        for w in kp.weights() {
            assert!(w.is_positive() && w <= kp.rhs());
        }
    }
}

#[test]
fn gadget_solutions_decompose_into_zero_terms() {
    for (d, gamma) in GRID {
        let p = params(d, gamma);
        let system = build_equality_system(&p);
        let big_m = gadget_big_m(&p, &total_bound(&p));
        let kp = build_knapsack_equation(&p).unwrap();
        for a in enumerate_gadget_solutions(&p, EnumerationMode::Exhaustive).unwrap() {
            let terms = power_terms(&system, &big_m, a.values()).unwrap();
            assert!(terms.iter().all(Zero::is_zero));
            assert!(kp.is_satisfied(a.values()).unwrap());
        }
    }
}

#[test]
fn random_in_box_vectors_miss_the_knapsack_equation() {
    for (d, gamma) in GRID {
        let p = params(d, gamma);
        let kp = build_knapsack_equation(&p).unwrap();
        let bounds = build_equality_system(&p).upper().to_vec();
        let known: BTreeSet<_> = enumerate_gadget_solutions(&p, EnumerationMode::Structural)
            .unwrap()
            .iter()
            .map(|a| a.to_solution_vector().unwrap())
            .collect();
        let report = reject_random_nonsolutions(&kp, &bounds, 1000, 0x5eed + d as u64).unwrap();
        for hit in &report.satisfying {
            assert!(known.contains(hit), "unexpected knapsack solution {hit}");
        }
    }
}

#[test]
fn simplified_system_contains_every_full_solution() {
    for (d, gamma) in GRID {
        let p = params(d, gamma);
        let simplified = build_simplified_system(&p);
        let accepted = enumerate_simplified_solutions(&p).unwrap();
        for a in enumerate_gadget_solutions(&p, EnumerationMode::Exhaustive).unwrap() {
            let values = simplified_values(&p, a.xbin(), a.y(), a.r()).unwrap();
            assert!(check_values(&simplified, &values).unwrap());
            assert!(accepted.contains(&values));
        }
    }
}

#[test]
fn counterexample_at_two_digits_base_five() {
    let p = params(2, 5);
    let simplified = build_simplified_system(&p);
    let values = simplified_values(
        &p,
        &[BigInt::from(1), BigInt::from(1)],
        &[BigInt::from(1), BigInt::from(1)],
        &[BigInt::from(1), BigInt::from(5), BigInt::from(29)],
    )
    .unwrap();
    assert!(check_values(&simplified, &values).unwrap());

    let tops: Vec<BigInt> = enumerate_gadget_solutions(&p, EnumerationMode::Exhaustive)
        .unwrap()
        .iter()
        .map(|a| a.r()[2].clone())
        .collect();
    assert_eq!(tops, vec![pow(5, 1), pow(5, 2), pow(5, 3)]);
}

proptest! {
    /// The interval for `y` has length `1 - 1/(g(g+1))`, cross-multiplied by
    /// `g(g+1)`: it is shorter than one and at least `1 - 1/g`.
    #[test]
    fn y_interval_length(r in 0u64..1_000_000, g in 2u64..10_000) {
        let (r, g) = (BigInt::from(r), BigInt::from(g));
        let den = &g * (&g + 1u32);
        let lo = (&r - &g + 1u32) * (&g + 1u32);
        let hi = &r * (&g + 1u32) + &g;
        let len = &hi - &lo;
        prop_assert!(len < den);
        prop_assert!(&len * &g >= &den * (&g - 1u32));

        // Exactly one integer lies in [lo, hi] / den, namely floor(r / g).
        let y = &r / &g;
        prop_assert!(&y * &den >= lo && &y * &den <= hi);
        prop_assert!((&y + 1u32) * &den > hi);
        prop_assert!(y.is_zero() || (&y - 1u32) * &den < lo);
    }
}

/// The gadget modulus is at least the generic modulus of the system without
/// its final `v` row.
#[test]
fn gadget_modulus_covers_the_generic_bound() {
    for (d, gamma) in GRID.iter().copied().chain([(3, 5), (2, 12), (3, 28)]) {
        let p = params(d, gamma);
        let system = build_equality_system(&p);
        let rows = system.num_constraints() - 1;
        let mut upper = system.upper().to_vec();
        *upper.last_mut().unwrap() = BigInt::zero();
        let without_v = EqualityIlp::new(
            system.matrix()[..rows].to_vec(),
            system.rhs()[..rows].to_vec(),
            upper,
        )
        .unwrap();
        let gadget = gadget_big_m(&p, &total_bound(&p));
        assert!(gadget >= compute_big_m(&without_v), "d={d} gamma={gamma}");
    }
}
