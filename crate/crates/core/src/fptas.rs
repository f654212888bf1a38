//! Exact enumerator and FPTAS for constantly many agents with additive
//! integer valuations and asymmetric weights.
//!
//! The exact route enumerates every achievable utility vector good by good.
//! The FPTAS trims each step's vector set to one representative per
//! equivalence class of ~, where utilities are bucketed into the
//! multiplicative intervals (α^{k-1}, α^k] with α = 1 + ε/(2m) (zero and
//! one keeping their own buckets). Bucket indices come from exact rational
//! comparison against incrementally multiplied powers of α, so class
//! boundaries never wobble with floating point. Each surviving vector keeps
//! a parent pointer so the final winner unwinds into an allocation.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::{rat_uint, Rat};
use crate::solver::SolverOutput;
use crate::welfare::integer_exponents;

pub const DEFAULT_STATE_BUDGET: u128 = 10_000_000;

/// A partial utility vector reached after placing some prefix of the goods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityVector {
    pub utilities: Vec<u64>,
    /// (index into the previous layer, good placed, receiving agent).
    pub parent: Option<(usize, usize, usize)>,
}

/// Layered arena of utility vectors; layer j holds the vectors reachable by
/// allocating goods 0..j.
#[derive(Debug, Clone)]
pub struct UtilityLayers {
    pub layers: Vec<Vec<UtilityVector>>,
}

impl UtilityLayers {
    pub fn final_layer(&self) -> &[UtilityVector] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Follows parent pointers from a final-layer vector to an allocation.
    pub fn reconstruct(&self, agents: usize, final_index: usize) -> Allocation {
        let mut bundles = vec![Vec::new(); agents];
        let mut layer = self.layers.len() - 1;
        let mut index = final_index;
        while layer > 0 {
            let v = &self.layers[layer][index];
            let (prev, good, agent) = v.parent.expect("non-root vector has a parent");
            bundles[agent].push(good);
            index = prev;
            layer -= 1;
        }
        Allocation::new(bundles)
    }
}

/// Per-agent integer values, validated from an additive profile.
fn integer_values(instance: &Instance) -> Result<Vec<Vec<u64>>> {
    if !instance.is_additive() {
        return Err(Error::Unsupported(
            "utility-vector enumeration requires an additive profile".to_string(),
        ));
    }
    let n = instance.agent_count();
    let m = instance.good_count();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let v = instance.good_value(i, j);
            if !v.is_integer() {
                return Err(Error::Unsupported(
                    "integer valuations required (pre-scale rationals to integers)".to_string(),
                ));
            }
            let vi = v.to_integer().to_u64().ok_or_else(|| {
                Error::Unsupported("valuations too large for 64-bit enumeration".to_string())
            })?;
            row.push(vi);
        }
        rows.push(row);
    }
    // guard m * v_max against u64 overflow in accumulated utilities
    let v_max = rows.iter().flatten().copied().max().unwrap_or(0);
    if (m as u128) * (v_max as u128) > u64::MAX as u128 {
        return Err(Error::Unsupported(
            "valuations too large for 64-bit enumeration".to_string(),
        ));
    }
    Ok(rows)
}

/// Exact enumeration of all achievable utility vectors (complete
/// allocations of every prefix). Budget: (1 + m·v_max)^n candidate vectors.
pub fn enumerate_utility_vectors(
    instance: &Instance,
    budget: Option<u128>,
) -> Result<UtilityLayers> {
    let cap = budget.unwrap_or(DEFAULT_STATE_BUDGET);
    let values = integer_values(instance)?;
    let n = instance.agent_count();
    let m = instance.good_count();
    let v_max = values.iter().flatten().copied().max().unwrap_or(0);
    let required = (1u128 + (m as u128) * (v_max as u128))
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::Budget { required, cap });
    }
    expand_layers(&values, n, m, cap, |vectors| vectors)
}

/// FPTAS parameters: α = 1 + ε/(2m) and K = ⌈log_α v_max⌉.
#[derive(Debug, Clone)]
pub struct FptasParams {
    pub epsilon: Rat,
    pub alpha: Rat,
    /// Cumulative powers α^0..α^K (so bucket k checks value <= α^k).
    powers: Vec<Rat>,
}

impl FptasParams {
    /// `utility_bound` is the largest utility the buckets must cover. The
    /// interval family extends to the maximum achievable utility m·v_max
    /// (not just v_max): utilities beyond the last interval would otherwise
    /// share one oversized bucket and lose the per-coordinate α guarantee.
    pub fn new(epsilon: &Rat, m: usize, utility_bound: u64) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidParameter(
                "epsilon must be positive".to_string(),
            ));
        }
        let alpha = Rat::one() + epsilon / rat_uint(2 * m.max(1) as u64);
        let mut powers = vec![Rat::one()];
        let bound = rat_uint(utility_bound.max(1));
        while *powers.last().unwrap() < bound {
            let next = powers.last().unwrap() * &alpha;
            powers.push(next);
        }
        Ok(FptasParams {
            epsilon: epsilon.clone(),
            alpha,
            powers,
        })
    }

    /// K = ⌈log_α v_max⌉: index of the first power reaching v_max.
    pub fn bucket_count(&self) -> usize {
        self.powers.len()
    }

    /// Bucket of an integer utility: 0 stays alone, otherwise the smallest
    /// k with value <= α^k (value 1 lands in bucket 0).
    pub fn bucket(&self, value: u64) -> u32 {
        if value == 0 {
            return 0;
        }
        let v = rat_uint(value);
        for (k, p) in self.powers.iter().enumerate() {
            if v <= *p {
                return k as u32 + 1; // shift by one so bucket 0 means zero
            }
        }
        self.powers.len() as u32 + 1
    }

    fn signature(&self, utilities: &[u64], scratch: &mut Vec<u32>) {
        scratch.clear();
        scratch.extend(utilities.iter().map(|&u| self.bucket(u)));
    }
}

/// Keeps the first representative of each ~ equivalence class, in input
/// order.
pub fn reduce_vectors(vectors: Vec<UtilityVector>, params: &FptasParams) -> Vec<UtilityVector> {
    let mut seen: HashMap<Vec<u32>, ()> = HashMap::with_capacity(vectors.len());
    let mut out = Vec::new();
    let mut sig = Vec::new();
    for v in vectors {
        params.signature(&v.utilities, &mut sig);
        if !seen.contains_key(&sig) {
            seen.insert(sig.clone(), ());
            out.push(v);
        }
    }
    out
}

/// FPTAS layers: exact expansion followed by a Reduce per good.
pub fn fptas_layers(
    instance: &Instance,
    epsilon: &Rat,
    budget: Option<u128>,
) -> Result<(UtilityLayers, FptasParams)> {
    let cap = budget.unwrap_or(DEFAULT_STATE_BUDGET);
    let values = integer_values(instance)?;
    let n = instance.agent_count();
    let m = instance.good_count();
    let v_max = values.iter().flatten().copied().max().unwrap_or(0);
    let params = FptasParams::new(epsilon, m, (m as u64).saturating_mul(v_max))?;
    let layers = expand_layers(&values, n, m, cap, |vectors| {
        reduce_vectors(vectors, &params)
    })?;
    Ok((layers, params))
}

/// Shared expansion loop: layer j comes from layer j-1 by handing good j-1
/// to each agent in turn, deduplicating exact repeats (first producer
/// wins), then applying `trim`.
#[allow(clippy::needless_range_loop)]
fn expand_layers(
    values: &[Vec<u64>],
    n: usize,
    m: usize,
    cap: u128,
    mut trim: impl FnMut(Vec<UtilityVector>) -> Vec<UtilityVector>,
) -> Result<UtilityLayers> {
    let mut layers = Vec::with_capacity(m + 1);
    layers.push(vec![UtilityVector {
        utilities: vec![0; n],
        parent: None,
    }]);
    let mut visited: u128 = 1;
    for good in 0..m {
        let prev = layers.last().unwrap();
        let mut dedup: HashMap<Vec<u64>, ()> = HashMap::with_capacity(prev.len() * n);
        let mut next: Vec<UtilityVector> = Vec::with_capacity(prev.len() * n);
        for (prev_idx, v) in prev.iter().enumerate() {
            for agent in 0..n {
                let mut utilities = v.utilities.clone();
                utilities[agent] += values[agent][good];
                if dedup.contains_key(&utilities) {
                    continue;
                }
                dedup.insert(utilities.clone(), ());
                next.push(UtilityVector {
                    utilities,
                    parent: Some((prev_idx, good, agent)),
                });
            }
        }
        visited += next.len() as u128;
        if visited > cap {
            return Err(Error::Budget {
                required: visited,
                cap,
            });
        }
        layers.push(trim(next));
    }
    Ok(UtilityLayers { layers })
}

/// Best vector in a final layer under the weighted geometric mean, compared
/// exactly; ties keep the first (deterministic insertion order).
fn best_final_index(instance: &Instance, layer: &[UtilityVector]) -> usize {
    let (exponents, _) = integer_exponents(instance.weights());
    let mut best: Option<(usize, u32, BigUint)> = None; // (idx, zeros, product)
    for (idx, v) in layer.iter().enumerate() {
        let zeros = v.utilities.iter().filter(|&&u| u == 0).count() as u32;
        let mut product = BigUint::one();
        if zeros == 0 {
            for (u, e) in v.utilities.iter().zip(&exponents) {
                let e = e.to_u32().expect("weights fit u32 exponents");
                product *= BigUint::from(*u).pow(e);
            }
        }
        let better = match &best {
            None => true,
            Some((_, bz, bp)) => zeros < *bz || (zeros == *bz && product > *bp),
        };
        if better {
            best = Some((idx, zeros, product));
        }
    }
    best.expect("final layer is nonempty").0
}

/// Exact optimum by full enumeration (pseudo-polynomial in v_max).
pub fn exact_enumeration_solve(
    instance: &Instance,
    budget: Option<u128>,
) -> Result<SolverOutput> {
    let layers = enumerate_utility_vectors(instance, budget)?;
    finish(instance, layers)
}

/// (1 - ε)-approximate maximum Nash welfare for ε in (0, 1).
pub fn fptas_solve(instance: &Instance, epsilon: &Rat, budget: Option<u128>) -> Result<SolverOutput> {
    if !epsilon.is_positive() || *epsilon >= Rat::one() {
        return Err(Error::InvalidParameter(
            "epsilon must lie in (0, 1)".to_string(),
        ));
    }
    let (layers, _) = fptas_layers(instance, epsilon, budget)?;
    finish(instance, layers)
}

fn finish(instance: &Instance, layers: UtilityLayers) -> Result<SolverOutput> {
    let n = instance.agent_count();
    let final_layer = layers.final_layer();
    let best = best_final_index(instance, final_layer);
    let zero = final_layer[best].utilities.contains(&0);
    Ok(SolverOutput {
        allocation: layers.reconstruct(n, best),
        zero_optimum: zero,
    })
}
