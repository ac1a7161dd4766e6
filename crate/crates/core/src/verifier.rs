//! Brute-force oracles.
//!
//! None of these routines reuse the reasoning they check: box enumeration
//! looks at every point, the conic search tries every multiplicity vector
//! that does not overshoot the target, and the packing search enumerates
//! multisets of configurations directly.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enumerate::{box_size, check_budget, walk_box};
use crate::error::{Error, Result};
use crate::gadget::{build_knapsack_equation, enumerate_gadget_solutions, EnumerationMode};
use crate::hard_instance::{project, HardInstance, PointSet};
use crate::model::{max_abs, EqualityIlp, KnapsackEquality, SolutionVector};

/// SplitMix64: 64-bit state, golden-ratio increment, two xor-multiply rounds.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, bound)`, by rejection. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform in `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo) as u64 + 1) as i64
    }

    /// Uniform in `[0, bound]` for an arbitrary non-negative `bound`, by
    /// rejection on the bit length.
    pub fn big_at_most(&mut self, bound: &BigInt) -> BigInt {
        assert!(!bound.is_negative());
        let bits = bound.bits();
        if bits == 0 {
            return BigInt::zero();
        }
        let words = bits.div_ceil(64) as usize;
        let top_mask = if bits.is_multiple_of(64) {
            u64::MAX
        } else {
            (1u64 << (bits % 64)) - 1
        };
        loop {
            let mut digits: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
            digits[words - 1] &= top_mask;
            let candidate = BigInt::from_biguint(
                Sign::Plus,
                num_bigint::BigUint::from_slice(
                    &digits
                        .iter()
                        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                        .collect::<Vec<_>>(),
                ),
            );
            if &candidate <= bound {
                return candidate;
            }
        }
    }
}

/// A point drawn uniformly from `∏ [0, u_j]`.
pub fn random_box_vector(rng: &mut SplitMix64, bounds: &[BigInt]) -> Vec<BigInt> {
    bounds.iter().map(|u| rng.big_at_most(u)).collect()
}

/// Shape limits for [`random_ilp`].
#[derive(Debug, Clone, Copy)]
pub struct IlpFamily {
    pub max_rows: usize,
    pub max_vars: usize,
    pub max_coeff: i64,
    pub max_bound: i64,
}

impl Default for IlpFamily {
    fn default() -> Self {
        Self {
            max_rows: 3,
            max_vars: 3,
            max_coeff: 3,
            max_bound: 3,
        }
    }
}

/// A random equality ILP from `family`. Half of the instances get a
/// right-hand side `A·x0` for a random in-box `x0`, so they are feasible;
/// the rest draw `b` freely and are often infeasible.
pub fn random_ilp(rng: &mut SplitMix64, family: &IlpFamily) -> EqualityIlp {
    let d = rng.range_inclusive(1, family.max_rows as i64) as usize;
    let n = rng.range_inclusive(1, family.max_vars as i64) as usize;
    let c = family.max_coeff;
    let matrix: Vec<Vec<BigInt>> = (0..d)
        .map(|_| {
            (0..n)
                .map(|_| BigInt::from(rng.range_inclusive(-c, c)))
                .collect()
        })
        .collect();
    let upper: Vec<BigInt> = (0..n)
        .map(|_| BigInt::from(rng.range_inclusive(0, family.max_bound)))
        .collect();
    let rhs = if rng.below(2) == 0 {
        let x0 = random_box_vector(rng, &upper);
        matrix
            .iter()
            .map(|row| row.iter().zip(&x0).map(|(a, v)| a * v).sum())
            .collect()
    } else {
        let spread = c * family.max_bound;
        (0..d)
            .map(|_| BigInt::from(rng.range_inclusive(-spread, spread)))
            .collect()
    };
    EqualityIlp::new(matrix, rhs, upper).expect("consistent dimensions")
}

/// Every `x` in `∏ [0, u_j]` with `A x = b`, lexicographically sorted.
pub fn naive_box_enumeration(ilp: &EqualityIlp, budget: u64) -> Result<Vec<SolutionVector>> {
    check_budget(ilp.upper(), budget)?;
    let mut out = Vec::new();
    walk_box(ilp.upper(), ilp.matrix(), |x, values| {
        if values.iter().zip(ilp.rhs()).all(|(v, b)| v == b) {
            out.push(SolutionVector::new(x.to_vec()).expect("box points are non-negative"));
        }
    });
    Ok(out)
}

/// Every `x` in `∏ [0, bounds_j]` with `w · x = C`, by meet in the middle:
/// the sums of one half of the variables are tabulated and the other half
/// looks up its complement. `budget` caps the number of points visited in
/// both halves together.
pub fn knapsack_box_solutions(
    kp: &KnapsackEquality,
    bounds: &[BigInt],
    budget: u64,
) -> Result<Vec<SolutionVector>> {
    if bounds.len() != kp.num_vars() {
        return Err(Error::DimensionMismatch(format!(
            "{} bounds for {} variables",
            bounds.len(),
            kp.num_vars()
        )));
    }
    let n = bounds.len();
    let total = box_size(bounds);
    let split = (0..=n)
        .min_by_key(|&s| {
            let left = box_size(&bounds[..s]);
            let right = &total / &left;
            left.max(right)
        })
        .unwrap_or(0);
    let (left_bounds, right_bounds) = bounds.split_at(split);
    let required = box_size(left_bounds) + box_size(right_bounds);
    if required > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            required,
            budget: BigInt::from(budget),
        });
    }
    let (left_w, right_w) = kp.weights().split_at(split);

    let mut table: HashMap<BigInt, Vec<Vec<BigInt>>> = HashMap::new();
    walk_box(left_bounds, &[left_w.to_vec()], |x, v| {
        table.entry(v[0].clone()).or_default().push(x.to_vec());
    });
    let mut out = Vec::new();
    walk_box(right_bounds, &[right_w.to_vec()], |x, v| {
        if let Some(lefts) = table.get(&(kp.rhs() - &v[0])) {
            for left in lefts {
                let mut full = left.clone();
                full.extend_from_slice(x);
                out.push(SolutionVector::new(full).expect("box points are non-negative"));
            }
        }
    });
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicSearchResult {
    /// Every multiplicity vector `μ` with `Σ μ_i p_i = t`, sorted
    /// lexicographically.
    pub solutions: Vec<Vec<BigInt>>,
    /// Per-point cap used by the search.
    pub search_bounds: Vec<BigInt>,
}

/// Conic integer combinations of the non-zero points of `points` that hit `t`.
pub fn conic_combinations(
    points: &PointSet,
    t: &[BigInt],
    cap: &BigInt,
) -> Result<ConicSearchResult> {
    conic_search(points.nonzero_points(), t, cap)
}

/// Depth-first search over `μ_i ∈ [0, min(cap, ⌊t/p_i⌋)]`, highest-norm
/// point first, abandoning any branch whose partial sum exceeds `t` in some
/// coordinate. Points and `t` must be non-negative.
pub fn conic_search(
    points: &[Vec<BigInt>],
    t: &[BigInt],
    cap: &BigInt,
) -> Result<ConicSearchResult> {
    if cap < &BigInt::one() {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    if points.iter().any(|p| p.len() != t.len()) {
        return Err(Error::DimensionMismatch(
            "every point needs the dimension of t".into(),
        ));
    }
    if points.iter().flatten().chain(t).any(|v| v.is_negative()) {
        return Err(Error::InvalidArgument(
            "conic search needs non-negative coordinates".into(),
        ));
    }

    let search_bounds: Vec<BigInt> = points
        .iter()
        .map(|p| {
            p.iter()
                .zip(t)
                .filter(|(v, _)| v.is_positive())
                .map(|(v, tj)| tj / v)
                .min()
                .map_or_else(BigInt::zero, |fit| fit.min(cap.clone()))
        })
        .collect();

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| max_abs(&points[b]).cmp(&max_abs(&points[a])));

    let mut search = Conic {
        points,
        t,
        bounds: &search_bounds,
        order: &order,
        mu: vec![BigInt::zero(); points.len()],
        solutions: Vec::new(),
    };
    let sum = vec![BigInt::zero(); t.len()];
    search.dfs(0, sum);
    let mut solutions = search.solutions;
    solutions.sort();
    Ok(ConicSearchResult {
        solutions,
        search_bounds,
    })
}

struct Conic<'a> {
    points: &'a [Vec<BigInt>],
    t: &'a [BigInt],
    bounds: &'a [BigInt],
    order: &'a [usize],
    mu: Vec<BigInt>,
    solutions: Vec<Vec<BigInt>>,
}

impl Conic<'_> {
    fn dfs(&mut self, depth: usize, sum: Vec<BigInt>) {
        if depth == self.order.len() {
            if sum.as_slice() == self.t {
                self.solutions.push(self.mu.clone());
            }
            return;
        }
        let idx = self.order[depth];
        let point = &self.points[idx];
        let mut count = BigInt::zero();
        let mut current = sum;
        loop {
            self.mu[idx] = count.clone();
            self.dfs(depth + 1, current.clone());
            if count >= self.bounds[idx] {
                break;
            }
            count += 1u32;
            for (c, v) in current.iter_mut().zip(point) {
                *c += v;
            }
            if current.iter().zip(self.t).any(|(c, tj)| c > tj) {
                break;
            }
        }
        self.mu[idx] = BigInt::zero();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub min_support: usize,
    /// Configuration → number of bins packed with it.
    pub witness: BTreeMap<SolutionVector, BigInt>,
    pub method: EnumerationMode,
    /// Number of exact packings found by the search (1 when unique).
    pub optimal_packings: usize,
}

/// The smallest number of distinct configurations in a packing of the hard
/// instance into its `k` bins.
///
/// With total size `kC` and `k` bins of capacity `C`, every bin is filled
/// exactly, so only configurations of size `C` can occur; this is asserted
/// before the search. Structural mode projects those configurations onto
/// `(xbin, r(d'))` and runs the conic search; exhaustive mode (`d' <= 2`)
/// re-derives the configurations by exhaustive gadget enumeration and tries
/// every multiset of at most `k` of them.
pub fn min_support_packing(hi: &HardInstance, mode: EnumerationMode) -> Result<SupportReport> {
    let bp = &hi.instance;
    let k = hi.k();
    let capacity = bp.capacity();
    if bp.total_size() != capacity * k || bp.bin_budget() != Some(k) {
        return Err(Error::MassBalance);
    }
    for config in &hi.equality_configs {
        if &bp.configuration_size(config)? != capacity {
            return Err(Error::MassBalance);
        }
    }
    let target = SolutionVector::new(hi.target_multiplicities.clone())?;
    if target.values() != bp.multiplicities() {
        return Err(Error::MassBalance);
    }

    let (packings, method) = match mode {
        EnumerationMode::Structural => {
            let projected = hi
                .equality_configs
                .iter()
                .map(|c| project(c, &hi.params))
                .collect::<Result<Vec<_>>>()?;
            let t = project(&target, &hi.params)?;
            let cap = max_abs(&t).max(BigInt::one());
            let found = conic_search(&projected, &t, &cap)?;
            (found.solutions, EnumerationMode::Structural)
        }
        EnumerationMode::Exhaustive => {
            if hi.dprime() > 2 {
                return Err(Error::InvalidArgument(
                    "exhaustive packing search is limited to d' <= 2".into(),
                ));
            }
            let rederived = exhaustive_equality_configs(hi)?;
            if rederived != hi.equality_configs {
                return Err(Error::InvalidModel(
                    "stored configurations differ from exhaustive enumeration".into(),
                ));
            }
            (
                multisets_reaching(&hi.equality_configs, bp.multiplicities(), k),
                EnumerationMode::Exhaustive,
            )
        }
    };

    let best = packings
        .iter()
        .min_by_key(|mu| mu.iter().filter(|m| !m.is_zero()).count())
        .ok_or_else(|| Error::InvalidModel("no packing reaches the multiplicities".into()))?;
    let witness: BTreeMap<SolutionVector, BigInt> = hi
        .equality_configs
        .iter()
        .zip(best)
        .filter(|(_, m)| !m.is_zero())
        .map(|(c, m)| (c.clone(), m.clone()))
        .collect();

    // The witness must reproduce the multiplicities with at most k bins.
    let mut packed = vec![BigInt::zero(); bp.num_item_types()];
    let mut bins = BigInt::zero();
    for (config, m) in &witness {
        bins += m;
        for (acc, v) in packed.iter_mut().zip(config.values()) {
            *acc += v * m;
        }
    }
    if packed != bp.multiplicities() || bins > BigInt::from(k) {
        return Err(Error::InvalidModel(
            "witness does not pack the instance".into(),
        ));
    }

    Ok(SupportReport {
        min_support: witness.len(),
        witness,
        method,
        optimal_packings: packings.len(),
    })
}

fn exhaustive_equality_configs(hi: &HardInstance) -> Result<Vec<SolutionVector>> {
    let kp = build_knapsack_equation(&hi.params)?;
    let mut configs = Vec::new();
    for a in enumerate_gadget_solutions(&hi.params, EnumerationMode::Exhaustive)? {
        let sv = a.to_solution_vector()?;
        if !kp.is_satisfied(sv.values())? {
            return Err(Error::InvalidModel(
                "a gadget solution misses the knapsack equation".into(),
            ));
        }
        configs.push(sv);
    }
    Ok(configs)
}

/// Multiplicity vectors over `configs` with total at most `max_bins` whose
/// item-wise sum equals `target`.
fn multisets_reaching(
    configs: &[SolutionVector],
    target: &[BigInt],
    max_bins: u64,
) -> Vec<Vec<BigInt>> {
    fn rec(
        configs: &[SolutionVector],
        target: &[BigInt],
        idx: usize,
        remaining: u64,
        mu: &mut Vec<u64>,
        sum: &mut Vec<BigInt>,
        out: &mut Vec<Vec<BigInt>>,
    ) {
        if idx == configs.len() {
            if sum.as_slice() == target {
                out.push(mu.iter().map(|&m| BigInt::from(m)).collect());
            }
            return;
        }
        for m in 0..=remaining {
            mu[idx] = m;
            rec(configs, target, idx + 1, remaining - m, mu, sum, out);
            for (acc, v) in sum.iter_mut().zip(configs[idx].values()) {
                *acc += v;
            }
        }
        for (acc, v) in sum.iter_mut().zip(configs[idx].values()) {
            *acc -= v * (remaining + 1);
        }
        mu[idx] = 0;
    }
    let mut out = Vec::new();
    let mut mu = vec![0u64; configs.len()];
    let mut sum = vec![BigInt::zero(); target.len()];
    rec(configs, target, 0, max_bins, &mut mu, &mut sum, &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingReport {
    pub trials: u64,
    /// Sampled vectors that satisfy the equation, in draw order.
    pub satisfying: Vec<SolutionVector>,
}

impl SamplingReport {
    pub fn count(&self) -> usize {
        self.satisfying.len()
    }
}

/// Draws `trials` uniform points of `∏ [0, bounds_j]` with a SplitMix64
/// stream seeded by `seed` and keeps those satisfying `w · x = C`.
pub fn reject_random_nonsolutions(
    kp: &KnapsackEquality,
    bounds: &[BigInt],
    trials: u64,
    seed: u64,
) -> Result<SamplingReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if bounds.len() != kp.num_vars() {
        return Err(Error::DimensionMismatch(format!(
            "{} bounds for {} variables",
            bounds.len(),
            kp.num_vars()
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut satisfying = Vec::new();
    for _ in 0..trials {
        let x = random_box_vector(&mut rng, bounds);
        if kp.is_satisfied(&x)? {
            satisfying.push(SolutionVector::new(x)?);
        }
    }
    Ok(SamplingReport { trials, satisfying })
}

/// `trials` in-box vectors of `ilp`'s box, for term-dominance sampling.
pub fn sample_box(rng: &mut SplitMix64, bounds: &[BigInt], trials: usize) -> Vec<SolutionVector> {
    (0..trials)
        .map(|_| SolutionVector::new(random_box_vector(rng, bounds)).expect("non-negative"))
        .collect()
}

/// Number of points in the box, saturating at `u64::MAX`.
pub fn box_points(bounds: &[BigInt]) -> u64 {
    box_size(bounds).to_u64().unwrap_or(u64::MAX)
}
