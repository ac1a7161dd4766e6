//! The binary-encoding gadget.
//!
//! For `d >= 1` digits and a base `γ >= 2` the gadget is a linear system over
//! non-negative integers whose solutions are in bijection with the exponents
//! `i ∈ [1, 2^d - 1]`: the variable `r(d)` equals `γ^i` and the 0/1 variables
//! `xbin(0..d)` spell `i` in binary. Level `ℓ` runs one step of repeated
//! division by `g_ℓ = γ^(2^ℓ)`:
//!
//! * `y(ℓ)` is the unique integer in
//!   `[r(ℓ+1)/g_ℓ - (g_ℓ-1)/g_ℓ, r(ℓ+1)/g_ℓ + 1/(g_ℓ+1)]`, which is zero
//!   exactly when `r(ℓ+1) < g_ℓ`;
//! * `xbin(ℓ)` is one exactly when `y(ℓ) >= 1`;
//! * `z(ℓ)` equals `r(ℓ)` when the bit is set and zero otherwise, and
//!   `(g_ℓ - 1)·z(ℓ) + r(ℓ) = r(ℓ+1)` links consecutive remainders.
//!
//! `r(0) = 1` forces the division to be exact all the way down, and
//! `2 <= r(d) <= γ^(2^d - 1)` excludes `i = 0` and exponents with more than
//! `d` bits.
//!
//! The equality form introduces slacks `s1..s5, s7..s9` per level, slacks for
//! the two bounds on `r(d)` and a final row `v + s_α = U` where `v` is the sum
//! of every other variable and `U` the sum of their upper bounds. Variables are
//! ordered canonically as
//!
//! ```text
//! xbin(0..d) y(0..d) z(0..d) r(0..=d) s1(..) s2(..) s3(..) s4(..) s5(..)
//! s7(..) s8(..) s9(..) s_alpha-3 s_alpha-2 s_alpha
//! ```
//!
//! for a total of `12d + 4`. Rows of the equality system are ordered by the
//! power of `M` they receive in the single knapsack equation: `r(0) = 1`
//! first, then nine rows per level, then the two `r(d)` bounds and the `v`
//! row last.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::aggregation::power_weighted_sum;
use crate::error::{Error, Result};
use crate::model::{EqualityIlp, KnapsackEquality, SolutionVector};

/// Largest `γ^(2^d - 1)` for which exhaustive enumeration is attempted.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Slack families per level, in canonical order.
pub const LEVEL_SLACKS: [u8; 8] = [1, 2, 3, 4, 5, 7, 8, 9];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetParams {
    digits: usize,
    gamma: BigInt,
    /// `γ^(2^ℓ)` for `ℓ = 0..=d`.
    level_bases: Vec<BigInt>,
}

impl GadgetParams {
    pub fn new(digits: usize, gamma: BigInt) -> Result<Self> {
        if digits < 1 {
            return Err(Error::InvalidArgument("the gadget needs d >= 1".into()));
        }
        if gamma < BigInt::from(2) {
            return Err(Error::InvalidArgument("the gadget needs γ >= 2".into()));
        }
        if digits > 30 {
            return Err(Error::InvalidArgument(format!(
                "d = {digits} is far beyond anything representable"
            )));
        }
        let mut level_bases = Vec::with_capacity(digits + 1);
        let mut base = gamma.clone();
        for _ in 0..=digits {
            let next = &base * &base;
            level_bases.push(base);
            base = next;
        }
        Ok(Self {
            digits,
            gamma,
            level_bases,
        })
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn gamma(&self) -> &BigInt {
        &self.gamma
    }

    /// `γ^(2^ℓ)`.
    pub fn level_base(&self, level: usize) -> &BigInt {
        &self.level_bases[level]
    }

    /// `2^d - 1`, the largest encodable exponent.
    pub fn max_exponent(&self) -> u64 {
        (1u64 << self.digits) - 1
    }

    /// `γ^(2^d - 1)`, the upper bound on `r(d)`.
    pub fn top_value(&self) -> BigInt {
        self.level_bases[self.digits].clone() / &self.gamma
    }

    pub fn num_vars(&self) -> usize {
        12 * self.digits + 4
    }

    pub fn xbin_index(&self, level: usize) -> usize {
        level
    }

    pub fn y_index(&self, level: usize) -> usize {
        self.digits + level
    }

    pub fn z_index(&self, level: usize) -> usize {
        2 * self.digits + level
    }

    /// `level` ranges over `0..=d`.
    pub fn r_index(&self, level: usize) -> usize {
        3 * self.digits + level
    }

    /// Index of slack family `family ∈ {1,2,3,4,5,7,8,9}` at `level`.
    pub fn slack_index(&self, family: u8, level: usize) -> usize {
        let pos = LEVEL_SLACKS
            .iter()
            .position(|&f| f == family)
            .expect("unknown slack family");
        4 * self.digits + 1 + pos * self.digits + level
    }

    /// Slack of `r(d) >= 2`.
    pub fn lower_slack_index(&self) -> usize {
        12 * self.digits + 1
    }

    /// Slack of `r(d) <= γ^(2^d - 1)`.
    pub fn upper_slack_index(&self) -> usize {
        12 * self.digits + 2
    }

    /// Slack of the `v + s_α = U` row.
    pub fn total_slack_index(&self) -> usize {
        12 * self.digits + 3
    }

    pub fn var_names(&self) -> Vec<String> {
        let d = self.digits;
        let mut names = Vec::with_capacity(self.num_vars());
        for prefix in ["xbin", "y", "z"] {
            names.extend((0..d).map(|l| format!("{prefix}({l})")));
        }
        names.extend((0..=d).map(|l| format!("r({l})")));
        for family in LEVEL_SLACKS {
            names.extend((0..d).map(|l| format!("s{family}({l})")));
        }
        names.push("s_alpha-3".into());
        names.push("s_alpha-2".into());
        names.push("s_alpha".into());
        names
    }
}

/// Sparse row `Σ a_j x_j = b`, optionally with a designated slack of
/// coefficient `±1`.
#[derive(Debug, Clone)]
struct SparseRow {
    terms: Vec<(usize, BigInt)>,
    rhs: BigInt,
    slack: Option<(usize, bool)>,
}

impl SparseRow {
    fn new(terms: Vec<(usize, BigInt)>, rhs: BigInt) -> Self {
        Self {
            terms,
            rhs,
            slack: None,
        }
    }

    /// `+1·s` when `positive`, `-1·s` otherwise.
    fn with_slack(mut self, index: usize, positive: bool) -> Self {
        self.slack = Some((index, positive));
        self
    }

    fn activity(&self, values: &[BigInt]) -> BigInt {
        let mut total: BigInt = self.terms.iter().map(|(j, a)| a * &values[*j]).sum();
        if let Some((s, positive)) = self.slack {
            if positive {
                total += &values[s];
            } else {
                total -= &values[s];
            }
        }
        total
    }

    /// Largest value the slack can take with the other variables in their
    /// boxes, clamped at zero.
    fn slack_bound(&self, upper: &[Option<BigInt>]) -> BigInt {
        let (_, positive) = self.slack.expect("row has a slack");
        let bound_of = |j: usize| upper[j].as_ref().expect("bound derived before use");
        let bound = if positive {
            let mut total = self.rhs.clone();
            for (j, a) in &self.terms {
                if a.is_negative() {
                    total -= a * bound_of(*j);
                }
            }
            total
        } else {
            let mut total = -&self.rhs;
            for (j, a) in &self.terms {
                if a.is_positive() {
                    total += a * bound_of(*j);
                }
            }
            total
        };
        bound.max(BigInt::zero())
    }
}

/// Rows plus per-variable bounds, before densification.
#[derive(Debug, Clone)]
struct RowSystem {
    names: Vec<String>,
    rows: Vec<SparseRow>,
    upper: Vec<Option<BigInt>>,
}

impl RowSystem {
    fn new(names: Vec<String>) -> Self {
        let n = names.len();
        Self {
            names,
            rows: Vec::new(),
            upper: vec![None; n],
        }
    }

    fn push(&mut self, row: SparseRow) {
        if let Some((s, _)) = row.slack {
            self.upper[s] = Some(row.slack_bound(&self.upper));
        }
        self.rows.push(row);
    }

    /// Sum of the upper bounds of every variable except `excluded`.
    fn bound_sum_excluding(&self, excluded: usize) -> BigInt {
        self.upper
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != excluded)
            .map(|(_, u)| u.clone().expect("every bound is derived"))
            .sum()
    }

    /// Fills every slack from its row; slacks may come out negative when
    /// the other values are infeasible.
    fn complete(&self, values: &mut [BigInt]) {
        for row in &self.rows {
            if let Some((s, positive)) = row.slack {
                values[s] = BigInt::zero();
                let missing = &row.rhs - row.activity(values);
                values[s] = if positive { missing } else { -missing };
            }
        }
    }

    fn to_ilp(&self) -> EqualityIlp {
        let n = self.names.len();
        let matrix = self
            .rows
            .iter()
            .map(|row| {
                let mut dense = vec![BigInt::zero(); n];
                for (j, a) in &row.terms {
                    dense[*j] += a;
                }
                if let Some((s, positive)) = row.slack {
                    dense[s] += if positive { 1 } else { -1 };
                }
                dense
            })
            .collect();
        let rhs = self.rows.iter().map(|r| r.rhs.clone()).collect();
        let upper = self
            .upper
            .iter()
            .map(|u| u.clone().expect("every bound is derived"))
            .collect();
        EqualityIlp::new(matrix, rhs, upper)
            .and_then(|ilp| ilp.with_var_names(self.names.clone()))
            .expect("gadget rows are consistent")
    }
}

fn one() -> BigInt {
    BigInt::one()
}

fn full_rows(params: &GadgetParams) -> RowSystem {
    let d = params.digits;
    let p = params;
    let mut sys = RowSystem::new(p.var_names());

    for l in 0..d {
        let g = p.level_base(l);
        sys.upper[p.xbin_index(l)] = Some(one());
        sys.upper[p.y_index(l)] = Some(g.clone());
        sys.upper[p.z_index(l)] = Some(g - 1u32);
    }
    for l in 0..=d {
        sys.upper[p.r_index(l)] = Some(p.level_base(l) - 1u32);
    }

    sys.push(SparseRow::new(vec![(p.r_index(0), one())], one()));
    for l in 0..d {
        let g = p.level_base(l).clone();
        let (x, y, z) = (p.xbin_index(l), p.y_index(l), p.z_index(l));
        let (r, r_next) = (p.r_index(l), p.r_index(l + 1));
        let s = |family| p.slack_index(family, l);
        let rows = [
            SparseRow::new(vec![(y, &g * &g + &g), (r_next, -(&g + 1u32))], g.clone())
                .with_slack(s(1), true),
            SparseRow::new(vec![(y, -g.clone()), (r_next, one())], &g - 1u32)
                .with_slack(s(2), true),
            SparseRow::new(vec![(x, one())], one()).with_slack(s(3), true),
            SparseRow::new(vec![(x, one()), (y, -one())], BigInt::zero()).with_slack(s(4), true),
            SparseRow::new(vec![(y, one()), (x, -(&g + 1u32))], BigInt::zero())
                .with_slack(s(5), true),
            SparseRow::new(
                vec![(z, &g - 1u32), (r, one()), (r_next, -one())],
                BigInt::zero(),
            ),
            SparseRow::new(vec![(x, g.clone()), (z, -one()), (r, one())], g.clone())
                .with_slack(s(7), true),
            SparseRow::new(vec![(x, -g.clone()), (z, one())], BigInt::zero())
                .with_slack(s(8), true),
            SparseRow::new(vec![(z, one()), (r, -one())], BigInt::zero()).with_slack(s(9), true),
        ];
        for row in rows {
            sys.push(row);
        }
    }
    let r_top = p.r_index(d);
    sys.push(
        SparseRow::new(vec![(r_top, one())], BigInt::from(2))
            .with_slack(p.lower_slack_index(), false),
    );
    sys.push(
        SparseRow::new(vec![(r_top, one())], p.top_value()).with_slack(p.upper_slack_index(), true),
    );

    let total_slack = p.total_slack_index();
    let total = sys.bound_sum_excluding(total_slack);
    let sum_terms = (0..p.num_vars())
        .filter(|&j| j != total_slack)
        .map(|j| (j, one()))
        .collect();
    sys.push(SparseRow::new(sum_terms, total).with_slack(total_slack, true));
    sys
}

/// The `9d + 4` equality rows over `12d + 4` variables, with derived upper
/// bounds.
pub fn build_equality_system(params: &GadgetParams) -> EqualityIlp {
    full_rows(params).to_ilp()
}

/// `U`: the sum of the upper bounds of every variable except `s_α`.
pub fn total_bound(params: &GadgetParams) -> BigInt {
    build_equality_system(params)
        .rhs()
        .last()
        .cloned()
        .expect("system has rows")
}

/// `2γ^(2^d)·U + γ^(2^d - 1) + 2γ^(2^d) + 2`.
pub fn gadget_big_m(params: &GadgetParams, total_bound: &BigInt) -> BigInt {
    let top = params.level_base(params.digits);
    BigInt::from(2) * top * total_bound + params.top_value() + BigInt::from(2) * top + 2u32
}

/// The equality system weighted by `1, M, ..., M^(α-1)` and summed, with
/// `α = 9d + 4`. Every grouped weight must lie in `(0, C]`.
pub fn build_knapsack_equation(params: &GadgetParams) -> Result<KnapsackEquality> {
    let system = build_equality_system(params);
    let big_m = gadget_big_m(params, system.rhs().last().expect("system has rows"));
    let kp = power_weighted_sum(&system, &big_m);
    for (w, name) in kp.weights().iter().zip(kp.var_names()) {
        if !w.is_positive() {
            return Err(Error::NonPositiveItemSize {
                variable: name.clone(),
            });
        }
        if w > kp.rhs() {
            return Err(Error::ItemSizeExceedsCapacity {
                variable: name.clone(),
            });
        }
    }
    Ok(kp)
}

/// A full assignment of the gadget variables. Values are signed so that
/// completions of infeasible partial assignments remain representable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GadgetAssignment {
    values: Vec<BigInt>,
    digits: usize,
}

impl GadgetAssignment {
    /// Wraps values in canonical order.
    pub fn from_values(params: &GadgetParams, values: Vec<BigInt>) -> Result<Self> {
        if values.len() != params.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} gadget variables",
                values.len(),
                params.num_vars()
            )));
        }
        Ok(Self {
            values,
            digits: params.digits,
        })
    }

    /// Builds the assignment from the structural variables and solves every
    /// slack from its row.
    pub fn complete(
        params: &GadgetParams,
        xbin: &[BigInt],
        y: &[BigInt],
        z: &[BigInt],
        r: &[BigInt],
    ) -> Result<Self> {
        let d = params.digits;
        if xbin.len() != d || y.len() != d || z.len() != d || r.len() != d + 1 {
            return Err(Error::DimensionMismatch(
                "xbin, y, z need d entries and r needs d + 1".into(),
            ));
        }
        let mut values = vec![BigInt::zero(); params.num_vars()];
        for l in 0..d {
            values[params.xbin_index(l)] = xbin[l].clone();
            values[params.y_index(l)] = y[l].clone();
            values[params.z_index(l)] = z[l].clone();
        }
        for (l, v) in r.iter().enumerate() {
            values[params.r_index(l)] = v.clone();
        }
        full_rows(params).complete(&mut values);
        Self::from_values(params, values)
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn xbin(&self) -> &[BigInt] {
        &self.values[..self.digits]
    }

    pub fn y(&self) -> &[BigInt] {
        &self.values[self.digits..2 * self.digits]
    }

    pub fn z(&self) -> &[BigInt] {
        &self.values[2 * self.digits..3 * self.digits]
    }

    /// `r(0..=d)`.
    pub fn r(&self) -> &[BigInt] {
        &self.values[3 * self.digits..4 * self.digits + 1]
    }

    /// Slack family `family` across all levels.
    pub fn slack(&self, family: u8) -> &[BigInt] {
        let pos = LEVEL_SLACKS
            .iter()
            .position(|&f| f == family)
            .expect("unknown slack family");
        let start = 4 * self.digits + 1 + pos * self.digits;
        &self.values[start..start + self.digits]
    }

    /// `(s_alpha-3, s_alpha-2, s_alpha)`.
    pub fn bound_slacks(&self) -> (&BigInt, &BigInt, &BigInt) {
        let n = self.values.len();
        (
            &self.values[n - 3],
            &self.values[n - 2],
            &self.values[n - 1],
        )
    }

    /// `Σ 2^ℓ xbin(ℓ)`.
    pub fn exponent(&self) -> BigInt {
        self.xbin().iter().enumerate().map(|(l, x)| x << l).sum()
    }

    pub fn to_solution_vector(&self) -> Result<SolutionVector> {
        SolutionVector::new(self.values.clone())
    }
}

impl fmt::Display for GadgetAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, v) in self.values.iter().enumerate() {
            if j > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Integers `y` with `g(g+1)·y <= (g+1)·r + g` and `g·y >= r - (g-1)`,
/// `y >= 0`. The range holds at most one value.
fn y_range(r_next: &BigInt, g: &BigInt) -> (BigInt, BigInt) {
    let g1 = g + 1u32;
    let lo = (r_next - g + 1u32).div_ceil(g).max(BigInt::zero());
    let hi = (&g1 * r_next + g).div_floor(&(g * &g1));
    (lo, hi)
}

/// Integers `z` allowed by `z >= 0`, `g·z >= r(ℓ+1) - g + g·x`,
/// `z <= g·x` and `g·z <= r(ℓ+1)`, i.e. the level's remainder constraints
/// after eliminating `r(ℓ) = r(ℓ+1) - (g-1)·z`.
fn z_range(r_next: &BigInt, g: &BigInt, x: &BigInt) -> (BigInt, BigInt) {
    let lo = (r_next - g + g * x).div_ceil(g).max(BigInt::zero());
    let hi = (g * x).min(r_next.div_floor(g));
    (lo, hi)
}

fn forced_y(r_next: &BigInt, g: &BigInt) -> Option<BigInt> {
    let (lo, hi) = y_range(r_next, g);
    (lo == hi).then_some(lo)
}

/// Runs repeated division of `γ^i` by `γ^(2^ℓ)` from the top level down and
/// records every variable of the gadget.
pub fn decimal_to_binary_trace(
    params: &GadgetParams,
    exponent: &BigInt,
) -> Result<GadgetAssignment> {
    let max = BigInt::from(params.max_exponent());
    if exponent < &BigInt::one() || exponent > &max {
        return Err(Error::ExponentOutOfRange {
            exponent: exponent.clone(),
            max,
        });
    }
    let d = params.digits;
    let i = exponent.to_u32().expect("exponent below 2^30");
    let mut r = vec![BigInt::zero(); d + 1];
    let mut xbin = vec![BigInt::zero(); d];
    let mut y = vec![BigInt::zero(); d];
    let mut z = vec![BigInt::zero(); d];
    r[d] = num_traits::pow(params.gamma.clone(), i as usize);
    for l in (0..d).rev() {
        let g = params.level_base(l);
        y[l] = forced_y(&r[l + 1], g).expect("a unique y exists for every integer remainder");
        if &r[l + 1] >= g {
            xbin[l] = BigInt::one();
            r[l] = &r[l + 1] / g;
            z[l] = r[l].clone();
        } else {
            r[l] = r[l + 1].clone();
        }
    }
    GadgetAssignment::complete(params, &xbin, &y, &z, &r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// A labelled linear constraint over the canonical gadget variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub label: String,
    pub terms: Vec<(usize, BigInt)>,
    pub relation: Relation,
    pub rhs: BigInt,
}

impl LinearConstraint {
    fn new(label: String, terms: Vec<(usize, BigInt)>, relation: Relation, rhs: BigInt) -> Self {
        Self {
            label,
            terms,
            relation,
            rhs,
        }
    }

    pub fn is_satisfied(&self, values: &[BigInt]) -> bool {
        let lhs: BigInt = self.terms.iter().map(|(j, a)| a * &values[*j]).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// The `13d + 3` constraints of the gadget in inequality form, denominators
/// cleared. Only `xbin`, `y`, `z` and `r` appear.
pub fn build_inequality_system(params: &GadgetParams) -> Vec<LinearConstraint> {
    use Relation::*;
    let p = params;
    let d = p.digits;
    let mut out = Vec::with_capacity(13 * d + 3);
    let zero = BigInt::zero;
    for l in 0..d {
        let g = p.level_base(l).clone();
        let (x, y, z) = (p.xbin_index(l), p.y_index(l), p.z_index(l));
        let (r, r_next) = (p.r_index(l), p.r_index(l + 1));
        let c =
            |k: u32, terms, rel, rhs| LinearConstraint::new(format!("C({l},{k})"), terms, rel, rhs);
        out.extend([
            c(1, vec![(y, one())], Ge, zero()),
            c(
                2,
                vec![(y, &g * (&g + 1u32)), (r_next, -(&g + 1u32))],
                Le,
                g.clone(),
            ),
            c(3, vec![(y, g.clone()), (r_next, -one())], Ge, -(&g - 1u32)),
            c(4, vec![(x, one())], Ge, zero()),
            c(5, vec![(x, one())], Le, one()),
            c(6, vec![(x, one()), (y, -one())], Le, zero()),
            c(7, vec![(y, one()), (x, -(&g + 1u32))], Le, zero()),
            c(8, vec![(r, one())], Ge, zero()),
            c(
                9,
                vec![(z, &g - 1u32), (r, one()), (r_next, -one())],
                Eq,
                zero(),
            ),
            c(10, vec![(z, one())], Ge, zero()),
            c(
                11,
                vec![(z, one()), (x, -g.clone()), (r, -one())],
                Ge,
                -g.clone(),
            ),
            c(12, vec![(z, one()), (x, -g.clone())], Le, zero()),
            c(13, vec![(z, one()), (r, -one())], Le, zero()),
        ]);
    }
    out.push(LinearConstraint::new(
        "C0".into(),
        vec![(p.r_index(0), one())],
        Eq,
        one(),
    ));
    out.push(LinearConstraint::new(
        "C(alpha-3)".into(),
        vec![(p.r_index(d), one())],
        Ge,
        BigInt::from(2),
    ));
    out.push(LinearConstraint::new(
        "C(alpha-2)".into(),
        vec![(p.r_index(d), one())],
        Le,
        p.top_value(),
    ));
    out
}

/// Whether `values` (canonical order; slacks ignored) satisfies every
/// inequality-form constraint.
pub fn satisfies_inequalities(params: &GadgetParams, values: &[BigInt]) -> bool {
    build_inequality_system(params)
        .iter()
        .all(|c| c.is_satisfied(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Scan every `r(d) ∈ [2, γ^(2^d - 1)]` and propagate the constraints.
    Exhaustive,
    /// One trace per exponent, without a completeness argument.
    Structural,
}

/// All gadget solutions, sorted by `r(d)`.
pub fn enumerate_gadget_solutions(
    params: &GadgetParams,
    mode: EnumerationMode,
) -> Result<Vec<GadgetAssignment>> {
    match mode {
        EnumerationMode::Structural => (1..=params.max_exponent())
            .map(|i| decimal_to_binary_trace(params, &BigInt::from(i)))
            .collect(),
        EnumerationMode::Exhaustive => exhaustive_solutions(params),
    }
}

fn exhaustive_solutions(params: &GadgetParams) -> Result<Vec<GadgetAssignment>> {
    let top = params.top_value();
    if top > BigInt::from(EXHAUSTIVE_LIMIT) {
        return Err(Error::BudgetExceeded {
            required: &top - 1u32,
            budget: BigInt::from(EXHAUSTIVE_LIMIT),
        });
    }
    let d = params.digits;
    let mut found = Vec::new();
    let mut state = Partial {
        xbin: vec![BigInt::zero(); d],
        y: vec![BigInt::zero(); d],
        z: vec![BigInt::zero(); d],
        r: vec![BigInt::zero(); d + 1],
    };
    let mut candidate = BigInt::from(2);
    while candidate <= top {
        state.r[d] = candidate.clone();
        descend(params, d, &mut state, &mut found)?;
        candidate += 1u32;
    }
    Ok(found)
}

struct Partial {
    xbin: Vec<BigInt>,
    y: Vec<BigInt>,
    z: Vec<BigInt>,
    r: Vec<BigInt>,
}

/// Fills level `level - 1` from `r(level)` and recurses. Every integer value
/// the constraints allow is tried, so no solution can be missed.
fn descend(
    params: &GadgetParams,
    level: usize,
    state: &mut Partial,
    found: &mut Vec<GadgetAssignment>,
) -> Result<()> {
    if level == 0 {
        if state.r[0].is_one() {
            let a = GadgetAssignment::complete(params, &state.xbin, &state.y, &state.z, &state.r)?;
            if satisfies_inequalities(params, a.values()) {
                found.push(a);
            }
        }
        return Ok(());
    }
    let l = level - 1;
    let g = params.level_base(l).clone();
    let r_next = state.r[level].clone();
    let (y_lo, y_hi) = y_range(&r_next, &g);
    let mut y = y_lo;
    while y <= y_hi {
        for x in [BigInt::zero(), BigInt::one()] {
            // x <= y and y <= (g+1)·x
            if x > y || y > (&g + 1u32) * &x {
                continue;
            }
            let (z_lo, z_hi) = z_range(&r_next, &g, &x);
            let mut z = z_lo;
            while z <= z_hi {
                let r = &r_next - (&g - 1u32) * &z;
                if !r.is_negative() {
                    state.xbin[l] = x.clone();
                    state.y[l] = y.clone();
                    state.z[l] = z.clone();
                    state.r[l] = r;
                    descend(params, l, state, found)?;
                }
                z += 1u32;
            }
        }
        y += 1u32;
    }
    Ok(())
}

/// The variant in which `y(ℓ)` replaces `z(ℓ)` in the remainder equation and
/// the four `z` constraints are dropped. Variables are
/// `xbin(0..d) y(0..d) r(0..=d) s1..s5(..) s_alpha-3 s_alpha-2`.
///
/// Without the `z` constraints the remainder bounds no longer follow, so every
/// `y` and `r` is bounded by `γ^(2^d - 1)`.
pub fn build_simplified_system(params: &GadgetParams) -> EqualityIlp {
    simplified_rows(params).to_ilp()
}

struct SimplifiedLayout {
    d: usize,
}

impl SimplifiedLayout {
    fn xbin(&self, l: usize) -> usize {
        l
    }
    fn y(&self, l: usize) -> usize {
        self.d + l
    }
    fn r(&self, l: usize) -> usize {
        2 * self.d + l
    }
    fn slack(&self, family: usize, l: usize) -> usize {
        3 * self.d + 1 + (family - 1) * self.d + l
    }
    fn lower_slack(&self) -> usize {
        8 * self.d + 1
    }
    fn upper_slack(&self) -> usize {
        8 * self.d + 2
    }
    fn num_vars(&self) -> usize {
        8 * self.d + 3
    }
    fn names(&self) -> Vec<String> {
        let d = self.d;
        let mut names = Vec::with_capacity(self.num_vars());
        names.extend((0..d).map(|l| format!("xbin({l})")));
        names.extend((0..d).map(|l| format!("y({l})")));
        names.extend((0..=d).map(|l| format!("r({l})")));
        for family in 1..=5 {
            names.extend((0..d).map(|l| format!("s{family}({l})")));
        }
        names.push("s_alpha-3".into());
        names.push("s_alpha-2".into());
        names
    }
}

fn simplified_rows(params: &GadgetParams) -> RowSystem {
    let d = params.digits;
    let lay = SimplifiedLayout { d };
    let top = params.top_value();
    let mut sys = RowSystem::new(lay.names());
    for l in 0..d {
        sys.upper[lay.xbin(l)] = Some(one());
        sys.upper[lay.y(l)] = Some(top.clone());
    }
    for l in 0..=d {
        sys.upper[lay.r(l)] = Some(top.clone());
    }
    sys.push(SparseRow::new(vec![(lay.r(0), one())], one()));
    for l in 0..d {
        let g = params.level_base(l).clone();
        let (x, y, r, r_next) = (lay.xbin(l), lay.y(l), lay.r(l), lay.r(l + 1));
        let rows = [
            SparseRow::new(vec![(y, &g * &g + &g), (r_next, -(&g + 1u32))], g.clone())
                .with_slack(lay.slack(1, l), true),
            SparseRow::new(vec![(y, -g.clone()), (r_next, one())], &g - 1u32)
                .with_slack(lay.slack(2, l), true),
            SparseRow::new(vec![(x, one())], one()).with_slack(lay.slack(3, l), true),
            SparseRow::new(vec![(x, one()), (y, -one())], BigInt::zero())
                .with_slack(lay.slack(4, l), true),
            SparseRow::new(vec![(y, one()), (x, -(&g + 1u32))], BigInt::zero())
                .with_slack(lay.slack(5, l), true),
            SparseRow::new(
                vec![(y, &g - 1u32), (r, one()), (r_next, -one())],
                BigInt::zero(),
            ),
        ];
        for row in rows {
            sys.push(row);
        }
    }
    sys.push(
        SparseRow::new(vec![(lay.r(d), one())], BigInt::from(2))
            .with_slack(lay.lower_slack(), false),
    );
    sys.push(SparseRow::new(vec![(lay.r(d), one())], top).with_slack(lay.upper_slack(), true));
    sys
}

/// Values of the simplified system for the given structural variables, with
/// every slack solved from its row.
pub fn simplified_values(
    params: &GadgetParams,
    xbin: &[BigInt],
    y: &[BigInt],
    r: &[BigInt],
) -> Result<Vec<BigInt>> {
    let d = params.digits;
    if xbin.len() != d || y.len() != d || r.len() != d + 1 {
        return Err(Error::DimensionMismatch(
            "xbin and y need d entries and r needs d + 1".into(),
        ));
    }
    let lay = SimplifiedLayout { d };
    let mut values = vec![BigInt::zero(); lay.num_vars()];
    for l in 0..d {
        values[lay.xbin(l)] = xbin[l].clone();
        values[lay.y(l)] = y[l].clone();
    }
    for (l, v) in r.iter().enumerate() {
        values[lay.r(l)] = v.clone();
    }
    simplified_rows(params).complete(&mut values);
    Ok(values)
}

/// Every solution of the simplified system with `r(d) ∈ [2, γ^(2^d - 1)]`,
/// as value vectors in its variable order, sorted by `r(d)`. Branches over
/// every `y(ℓ)` and `xbin(ℓ)` the level rows allow.
pub fn enumerate_simplified_solutions(params: &GadgetParams) -> Result<Vec<Vec<BigInt>>> {
    let top = params.top_value();
    if top > BigInt::from(EXHAUSTIVE_LIMIT) {
        return Err(Error::BudgetExceeded {
            required: &top - 1u32,
            budget: BigInt::from(EXHAUSTIVE_LIMIT),
        });
    }
    let d = params.digits;
    let system = build_simplified_system(params);
    let mut found = Vec::new();
    let mut xbin = vec![BigInt::zero(); d];
    let mut y = vec![BigInt::zero(); d];
    let mut r = vec![BigInt::zero(); d + 1];
    let mut candidate = BigInt::from(2);
    while candidate <= top {
        r[d] = candidate.clone();
        descend_simplified(params, &system, d, &mut xbin, &mut y, &mut r, &mut found)?;
        candidate += 1u32;
    }
    Ok(found)
}

fn descend_simplified(
    params: &GadgetParams,
    system: &EqualityIlp,
    level: usize,
    xbin: &mut [BigInt],
    y: &mut [BigInt],
    r: &mut [BigInt],
    found: &mut Vec<Vec<BigInt>>,
) -> Result<()> {
    if level == 0 {
        if r[0].is_one() {
            let values = simplified_values(params, xbin, y, r)?;
            if crate::model::check_values(system, &values)? {
                found.push(values);
            }
        }
        return Ok(());
    }
    let l = level - 1;
    let g = params.level_base(l).clone();
    let (y_lo, y_hi) = y_range(&r[level], &g);
    let mut yv = y_lo;
    while yv <= y_hi {
        for x in [BigInt::zero(), BigInt::one()] {
            if x > yv || yv > (&g + 1u32) * &x {
                continue;
            }
            let rest = &r[level] - (&g - 1u32) * &yv;
            if !rest.is_negative() {
                xbin[l] = x;
                y[l] = yv.clone();
                r[l] = rest;
                descend_simplified(params, system, l, xbin, y, r, found)?;
            }
        }
        yv += 1u32;
    }
    Ok(())
}

/// Checks the per-level consequences of the constraints on an assignment:
/// the value of `y(ℓ)` and `xbin(ℓ)`, the remainder step, and
/// `r(ℓ) <= γ^(2^ℓ) - 1` for every `ℓ ∈ [0, d]`. Purely integer arithmetic.
pub fn check_observations(params: &GadgetParams, a: &GadgetAssignment) -> bool {
    if a.digits() != params.digits {
        return false;
    }
    let (xbin, y, r) = (a.xbin(), a.y(), a.r());
    for l in 0..params.digits {
        let g = params.level_base(l);
        let r_next = &r[l + 1];
        let bit_set = r_next >= g;
        if bit_set {
            if y[l] < BigInt::one() || !xbin[l].is_one() || &(&r[l] * g) != r_next {
                return false;
            }
        } else if !y[l].is_zero() || !xbin[l].is_zero() || &r[l] != r_next {
            return false;
        }
        if forced_y(r_next, g).as_ref() != Some(&y[l]) {
            return false;
        }
    }
    (0..=params.digits).all(|l| r[l] < *params.level_base(l))
}
