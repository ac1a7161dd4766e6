use std::collections::BTreeSet;

use knapagg::format::{
    parse_bin_packing, parse_configurations, write_bin_packing, write_configurations,
};
use knapagg::gadget::EnumerationMode;
use knapagg::hard_instance::{build_bp_instance, point_set, project, target_vector};
use knapagg::verifier::{conic_combinations, min_support_packing};
use knapagg::BigInt;
use num_traits::{One, Signed};

#[test]
fn projection_of_configurations_is_the_point_set() {
    for dprime in 1..=3 {
        let hi = build_bp_instance(dprime).unwrap();
        let projected: BTreeSet<Vec<BigInt>> = hi
            .equality_configs
            .iter()
            .map(|c| project(c, &hi.params).unwrap())
            .collect();
        let points: BTreeSet<Vec<BigInt>> = point_set(dprime)
            .unwrap()
            .nonzero_points()
            .iter()
            .cloned()
            .collect();
        assert_eq!(projected, points, "d'={dprime}");
    }
}

#[test]
fn mass_balance_and_exact_fill() {
    for dprime in 1..=3 {
        let hi = build_bp_instance(dprime).unwrap();
        let bp = &hi.instance;
        let k = hi.k();
        assert_eq!(bp.num_item_types(), 12 * dprime + 4);
        assert_eq!(hi.equality_configs.len() as u64, k);
        let total: BigInt = bp
            .sizes()
            .iter()
            .zip(bp.multiplicities())
            .map(|(s, y)| s * y)
            .sum();
        assert_eq!(total, bp.capacity() * BigInt::from(k));
        for s in bp.sizes() {
            assert!(s.is_positive() && s <= bp.capacity());
        }
        for config in &hi.equality_configs {
            let size: BigInt = bp
                .sizes()
                .iter()
                .zip(config.values())
                .map(|(s, x)| s * x)
                .sum();
            assert_eq!(&size, bp.capacity());
        }
    }
}

#[test]
fn conic_search_finds_only_all_ones() {
    for dprime in 1..=3 {
        let ps = point_set(dprime).unwrap();
        let t = target_vector(&ps);
        let cap = t.iter().max().unwrap().clone();
        let res = conic_combinations(&ps, &t, &cap).unwrap();
        let k = ps.nonzero_points().len();
        assert_eq!(res.solutions, vec![vec![BigInt::one(); k]]);
        let half = BigInt::from(1u64 << (dprime - 1));
        assert!(res.search_bounds.iter().all(|b| *b <= half));
        assert!(res.solutions.iter().flatten().all(|m| *m <= half));
    }
}

#[test]
fn support_modes_agree() {
    for dprime in 1..=2 {
        let hi = build_bp_instance(dprime).unwrap();
        let s = min_support_packing(&hi, EnumerationMode::Structural).unwrap();
        let e = min_support_packing(&hi, EnumerationMode::Exhaustive).unwrap();
        assert_eq!(s.min_support, e.min_support);
        assert_eq!(s.witness, e.witness);
        assert_eq!(s.min_support as u64, hi.k());
    }
    let hi = build_bp_instance(3).unwrap();
    let s = min_support_packing(&hi, EnumerationMode::Structural).unwrap();
    assert_eq!(s.min_support, 7);
    assert!(min_support_packing(&hi, EnumerationMode::Exhaustive).is_err());
}

#[test]
fn instance_files_round_trip() {
    for dprime in 1..=3 {
        let hi = build_bp_instance(dprime).unwrap();
        let text = write_bin_packing(&hi.instance);
        assert_eq!(parse_bin_packing(&text).unwrap(), hi.instance);
        assert_eq!(write_bin_packing(&parse_bin_packing(&text).unwrap()), text);
        let configs = write_configurations(&hi.equality_configs);
        assert_eq!(parse_configurations(&configs).unwrap(), hi.equality_configs);
    }
}
