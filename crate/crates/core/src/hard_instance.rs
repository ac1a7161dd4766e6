//! Bin packing instances whose only optimal packing uses `2^d' - 1`
//! distinct configurations.
//!
//! With `k = 2^d' - 1`, the point set
//!
//! ```text
//! X = {0} ∪ { (bits of i, (4k)^i) : i = 1..k }
//! ```
//!
//! has the property that `t = Σ a_i` is reached by exactly one conic integer
//! combination of its non-zero points, namely each point once. The gadget with
//! `d = d'` and `γ = 4k` has exactly `k` solutions, and projecting solution
//! `i` onto `(xbin(0..d'), r(d'))` gives point `a_i`. Aggregating the gadget
//! into one knapsack equation turns its variables into item types: the
//! weights become item sizes, the right-hand side becomes the bin capacity,
//! and the sum of all `k` solutions becomes the item multiplicities.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gadget::{
    build_knapsack_equation, enumerate_gadget_solutions, EnumerationMode, GadgetParams,
};
use crate::model::{max_abs, BinPackingInstance, SolutionVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub dprime: usize,
    /// `2^d' - 1`.
    pub k: u64,
    /// `4k`.
    pub gamma: BigInt,
    /// `a_0 = 0` followed by `a_1..a_k`, where `a_i` carries the bits of `i`
    /// and then `(4k)^i`. Sorted so that `‖a_i‖∞ = (4k)^i`.
    pub points: Vec<Vec<BigInt>>,
}

impl PointSet {
    /// `a_1..a_k`.
    pub fn nonzero_points(&self) -> &[Vec<BigInt>] {
        &self.points[1..]
    }
}

fn check_dprime(dprime: usize) -> Result<()> {
    if dprime < 1 {
        return Err(Error::InvalidArgument("d' must be at least 1".into()));
    }
    if dprime > 20 {
        return Err(Error::InvalidArgument(format!(
            "d' = {dprime} is far beyond desk scale"
        )));
    }
    Ok(())
}

pub fn point_set(dprime: usize) -> Result<PointSet> {
    check_dprime(dprime)?;
    let k = (1u64 << dprime) - 1;
    let gamma = BigInt::from(4 * k);
    let mut points = vec![vec![BigInt::zero(); dprime + 1]];
    let mut power = gamma.clone();
    for i in 1..=k {
        let mut point: Vec<BigInt> = (0..dprime).map(|b| BigInt::from((i >> b) & 1)).collect();
        point.push(power.clone());
        points.push(point);
        power *= &gamma;
    }
    Ok(PointSet {
        dprime,
        k,
        gamma,
        points,
    })
}

/// `t = Σ_{i=0}^{k} a_i`.
pub fn target_vector(ps: &PointSet) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); ps.dprime + 1];
    for p in &ps.points {
        for (acc, v) in t.iter_mut().zip(p) {
            *acc += v;
        }
    }
    t
}

/// `(xbin(0..d'), r(d'))` of a configuration in canonical gadget order.
pub fn project(config: &SolutionVector, params: &GadgetParams) -> Result<Vec<BigInt>> {
    if config.len() != params.num_vars() {
        return Err(Error::DimensionMismatch(format!(
            "configuration has {} entries, the gadget has {} variables",
            config.len(),
            params.num_vars()
        )));
    }
    let values = config.values();
    let d = params.digits();
    let mut out: Vec<BigInt> = (0..d)
        .map(|l| values[params.xbin_index(l)].clone())
        .collect();
    out.push(values[params.r_index(d)].clone());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardInstance {
    /// `d = d'`, `γ = 4k`.
    pub params: GadgetParams,
    /// `12d' + 4` item types, capacity `C`, bin budget `k`.
    pub instance: BinPackingInstance,
    /// The `k` configurations that fill a bin exactly, sorted by `r(d')`.
    pub equality_configs: Vec<SolutionVector>,
    /// Sum of all equality configurations.
    pub target_multiplicities: Vec<BigInt>,
}

impl HardInstance {
    pub fn dprime(&self) -> usize {
        self.params.digits()
    }

    /// `2^d' - 1`.
    pub fn k(&self) -> u64 {
        self.params.max_exponent()
    }
}

/// Exhaustive gadget enumeration is used while it stays within its budget
/// (`d' <= 2`), structural enumeration beyond.
pub fn build_bp_instance(dprime: usize) -> Result<HardInstance> {
    check_dprime(dprime)?;
    let k = (1u64 << dprime) - 1;
    let params = GadgetParams::new(dprime, BigInt::from(4 * k))?;
    let kp = build_knapsack_equation(&params)?;
    let mode = if dprime <= 2 {
        EnumerationMode::Exhaustive
    } else {
        EnumerationMode::Structural
    };
    let equality_configs = enumerate_gadget_solutions(&params, mode)?
        .iter()
        .map(|a| a.to_solution_vector())
        .collect::<Result<Vec<_>>>()?;

    let mut multiplicities = vec![BigInt::zero(); params.num_vars()];
    for config in &equality_configs {
        for (acc, v) in multiplicities.iter_mut().zip(config.values()) {
            *acc += v;
        }
    }
    let instance = BinPackingInstance::new(
        kp.weights().to_vec(),
        multiplicities.clone(),
        kp.rhs().clone(),
        Some(k),
    )?;
    if instance.total_size() != instance.capacity() * k {
        return Err(Error::MassBalance);
    }
    Ok(HardInstance {
        params,
        instance,
        equality_configs,
        target_multiplicities: multiplicities,
    })
}

/// Number of decimal digits of the largest item size.
pub fn largest_size_digits(hi: &HardInstance) -> usize {
    max_abs(hi.instance.sizes()).to_string().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::decimal_to_binary_trace;
    use std::collections::BTreeSet;

    fn ints(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn point_set_for_two_digits() {
        let ps = point_set(2).unwrap();
        assert_eq!(ps.k, 3);
        assert_eq!(ps.gamma, BigInt::from(12));
        assert_eq!(
            ps.points,
            vec![
                ints(&[0, 0, 0]),
                ints(&[1, 0, 12]),
                ints(&[0, 1, 144]),
                ints(&[1, 1, 1728])
            ]
        );
    }

    #[test]
    fn point_set_for_one_digit() {
        let ps = point_set(1).unwrap();
        assert_eq!(ps.points, vec![ints(&[0, 0]), ints(&[1, 4])]);
        assert!(point_set(0).is_err());
    }

    #[test]
    fn points_are_sorted_by_norm() {
        for dprime in 1..=4 {
            let ps = point_set(dprime).unwrap();
            assert_eq!(max_abs(&ps.points[0]), BigInt::zero());
            for (i, p) in ps.points.iter().enumerate().skip(1) {
                assert_eq!(max_abs(p), num_traits::pow(ps.gamma.clone(), i));
            }
        }
    }

    #[test]
    fn target_vectors() {
        assert_eq!(target_vector(&point_set(2).unwrap()), ints(&[2, 2, 1884]));
        assert_eq!(target_vector(&point_set(1).unwrap()), ints(&[1, 4]));
        for dprime in 1..=5 {
            let t = target_vector(&point_set(dprime).unwrap());
            let half = BigInt::from(1u64 << (dprime - 1));
            assert!(t[..dprime].iter().all(|v| *v == half));
        }
    }

    #[test]
    fn projections_of_traces() {
        let params = GadgetParams::new(2, BigInt::from(12)).unwrap();
        let proj = |i: i64| {
            let a = decimal_to_binary_trace(&params, &BigInt::from(i)).unwrap();
            project(&a.to_solution_vector().unwrap(), &params).unwrap()
        };
        assert_eq!(proj(3), ints(&[1, 1, 1728]));
        assert_eq!(proj(1), ints(&[1, 0, 12]));
        assert!(project(&SolutionVector::from_u64s(&[1, 2]), &params).is_err());
    }

    #[test]
    fn smoke_instance_with_one_configuration() {
        let hi = build_bp_instance(1).unwrap();
        assert_eq!(hi.instance.num_item_types(), 16);
        assert_eq!(hi.k(), 1);
        assert_eq!(hi.instance.bin_budget(), Some(1));
        let trace = decimal_to_binary_trace(&hi.params, &BigInt::from(1)).unwrap();
        assert_eq!(
            hi.equality_configs,
            vec![trace.to_solution_vector().unwrap()]
        );
        assert_eq!(hi.target_multiplicities, trace.values());
    }

    #[test]
    fn two_digit_instance() {
        let hi = build_bp_instance(2).unwrap();
        assert_eq!(hi.instance.num_item_types(), 28);
        assert_eq!(hi.instance.bin_budget(), Some(3));
        assert_eq!(hi.equality_configs.len(), 3);
        assert_eq!(
            hi.instance.total_size(),
            hi.instance.capacity() * BigInt::from(3)
        );
        for config in &hi.equality_configs {
            assert_eq!(
                &hi.instance.configuration_size(config).unwrap(),
                hi.instance.capacity()
            );
        }
        let projected: BTreeSet<Vec<BigInt>> = hi
            .equality_configs
            .iter()
            .map(|c| project(c, &hi.params).unwrap())
            .collect();
        let expected: BTreeSet<Vec<BigInt>> = point_set(2)
            .unwrap()
            .nonzero_points()
            .iter()
            .cloned()
            .collect();
        assert_eq!(projected, expected);
    }
}
