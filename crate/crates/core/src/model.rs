//! Exact-arithmetic data model: equality ILPs with upper bounds, single
//! knapsack equations, solution vectors and high-multiplicity bin packing
//! instances.
//!
//! Every number is a [`BigInt`]. Nothing in this crate ever rounds.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Largest absolute value among `values`, or zero for an empty slice.
pub fn max_abs(values: &[BigInt]) -> BigInt {
    values
        .iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

/// `‖A‖∞` in the entrywise sense: the largest absolute coefficient.
pub fn infinity_norm(matrix: &[Vec<BigInt>]) -> Result<BigInt> {
    if matrix.iter().all(|row| row.is_empty()) {
        return Err(Error::EmptyMatrix);
    }
    Ok(matrix
        .iter()
        .map(|row| max_abs(row))
        .max()
        .unwrap_or_else(BigInt::zero))
}

pub(crate) fn dot(coeffs: &[BigInt], x: &[BigInt]) -> BigInt {
    coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("x{j}")).collect()
}

/// An integer program `A x = b, 0 <= x <= u` over non-negative integers,
/// with an optional (unused by every construction here) cost vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityIlp {
    matrix: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
    upper: Vec<BigInt>,
    cost: Option<Vec<BigInt>>,
    var_names: Vec<String>,
}

impl EqualityIlp {
    /// The number of variables is `upper.len()`; every row of `matrix` must
    /// have that many entries. Variables are named `x1..xn`.
    pub fn new(matrix: Vec<Vec<BigInt>>, rhs: Vec<BigInt>, upper: Vec<BigInt>) -> Result<Self> {
        let n = upper.len();
        if matrix.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} right-hand sides",
                matrix.len(),
                rhs.len()
            )));
        }
        if let Some((i, row)) = matrix.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        if let Some(j) = upper.iter().position(|u| u.is_negative()) {
            return Err(Error::InvalidModel(format!(
                "upper bound of variable {} is negative",
                j + 1
            )));
        }
        Ok(Self {
            matrix,
            rhs,
            upper,
            cost: None,
            var_names: default_names(n),
        })
    }

    pub fn with_cost(mut self, cost: Vec<BigInt>) -> Result<Self> {
        if cost.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "cost has {} entries, expected {}",
                cost.len(),
                self.num_vars()
            )));
        }
        self.cost = Some(cost);
        Ok(self)
    }

    pub fn with_var_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "{} variable names for {} variables",
                names.len(),
                self.num_vars()
            )));
        }
        self.var_names = names;
        Ok(self)
    }

    pub fn num_constraints(&self) -> usize {
        self.matrix.len()
    }

    pub fn num_vars(&self) -> usize {
        self.upper.len()
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.rhs
    }

    pub fn upper(&self) -> &[BigInt] {
        &self.upper
    }

    pub fn cost(&self) -> Option<&[BigInt]> {
        self.cost.as_deref()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// `row_i · x - b_i`.
    pub fn residual(&self, row: usize, x: &[BigInt]) -> BigInt {
        dot(&self.matrix[row], x) - &self.rhs[row]
    }

    /// Number of points in the box `∏ [0, u_j]`.
    pub fn box_size(&self) -> BigInt {
        self.upper.iter().map(|u| u + 1u32).product()
    }
}

/// A single equation `w · x = C` over non-negative integers. Weights may be
/// negative when the equation is an intermediate aggregate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackEquality {
    weights: Vec<BigInt>,
    rhs: BigInt,
    var_names: Vec<String>,
}

impl KnapsackEquality {
    pub fn new(weights: Vec<BigInt>, rhs: BigInt) -> Self {
        let var_names = default_names(weights.len());
        Self {
            weights,
            rhs,
            var_names,
        }
    }

    pub fn with_var_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} variable names for {} weights",
                names.len(),
                self.weights.len()
            )));
        }
        self.var_names = names;
        Ok(self)
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn rhs(&self) -> &BigInt {
        &self.rhs
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    /// `w · x`.
    pub fn evaluate(&self, x: &[BigInt]) -> Result<BigInt> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries, equation has {} variables",
                x.len(),
                self.weights.len()
            )));
        }
        Ok(dot(&self.weights, x))
    }

    pub fn is_satisfied(&self, x: &[BigInt]) -> Result<bool> {
        Ok(self.evaluate(x)? == self.rhs)
    }
}

/// A vector of non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionVector(Vec<BigInt>);

impl SolutionVector {
    pub fn new(values: Vec<BigInt>) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::InvalidModel(format!(
                "entry {} of a solution vector is negative",
                j + 1
            )));
        }
        Ok(Self(values))
    }

    pub fn from_u64s(values: &[u64]) -> Self {
        Self(values.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn values(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_values(self) -> Vec<BigInt> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> usize {
        evaluate_support(self)
    }
}

impl fmt::Display for SolutionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, v) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Number of non-zero entries.
pub fn evaluate_support(x: &SolutionVector) -> usize {
    x.values().iter().filter(|v| !v.is_zero()).count()
}

/// `A x = b` and `0 <= x <= u`.
pub fn check_solution(ilp: &EqualityIlp, x: &SolutionVector) -> Result<bool> {
    check_values(ilp, x.values())
}

/// Same as [`check_solution`] for a raw (possibly negative) vector.
pub fn check_values(ilp: &EqualityIlp, x: &[BigInt]) -> Result<bool> {
    if x.len() != ilp.num_vars() {
        return Err(Error::DimensionMismatch(format!(
            "vector has {} entries, system has {} variables",
            x.len(),
            ilp.num_vars()
        )));
    }
    let in_bounds = x
        .iter()
        .zip(ilp.upper())
        .all(|(v, u)| !v.is_negative() && v <= u);
    Ok(in_bounds && (0..ilp.num_constraints()).all(|i| ilp.residual(i, x).is_zero()))
}

/// High-multiplicity bin packing: `multiplicities[i]` items of size
/// `sizes[i]`, bins of size `capacity`, optionally at most `bin_budget` bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinPackingInstance {
    sizes: Vec<BigInt>,
    multiplicities: Vec<BigInt>,
    capacity: BigInt,
    bin_budget: Option<u64>,
}

impl BinPackingInstance {
    pub fn new(
        sizes: Vec<BigInt>,
        multiplicities: Vec<BigInt>,
        capacity: BigInt,
        bin_budget: Option<u64>,
    ) -> Result<Self> {
        if sizes.len() != multiplicities.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} sizes but {} multiplicities",
                sizes.len(),
                multiplicities.len()
            )));
        }
        for (i, s) in sizes.iter().enumerate() {
            if !s.is_positive() {
                return Err(Error::NonPositiveItemSize {
                    variable: format!("item {}", i + 1),
                });
            }
            if s > &capacity {
                return Err(Error::ItemSizeExceedsCapacity {
                    variable: format!("item {}", i + 1),
                });
            }
        }
        if let Some(i) = multiplicities.iter().position(|a| a.is_negative()) {
            return Err(Error::InvalidModel(format!(
                "multiplicity of item {} is negative",
                i + 1
            )));
        }
        Ok(Self {
            sizes,
            multiplicities,
            capacity,
            bin_budget,
        })
    }

    pub fn num_item_types(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[BigInt] {
        &self.sizes
    }

    pub fn multiplicities(&self) -> &[BigInt] {
        &self.multiplicities
    }

    pub fn capacity(&self) -> &BigInt {
        &self.capacity
    }

    pub fn bin_budget(&self) -> Option<u64> {
        self.bin_budget
    }

    /// `Σ sizes[i] * multiplicities[i]`.
    pub fn total_size(&self) -> BigInt {
        dot(&self.sizes, &self.multiplicities)
    }

    /// Total size of one configuration (a multiset of items given by counts).
    pub fn configuration_size(&self, config: &SolutionVector) -> Result<BigInt> {
        if config.len() != self.sizes.len() {
            return Err(Error::DimensionMismatch(format!(
                "configuration has {} entries, instance has {} item types",
                config.len(),
                self.sizes.len()
            )));
        }
        Ok(dot(&self.sizes, config.values()))
    }
}
