//! Exact solver for identical additive valuations with few distinct values.
//!
//! Any bundle is summarized by how many goods of each distinct value it
//! holds, so a layered DAG over count vectors (one layer per agent) carries
//! every allocation. Path costs are compared exactly: fewer empty bundles
//! first, then the rational product Π value^{η_i · L} with L clearing the
//! weight denominators. The per-layer state space is Π(count_i + 1), which
//! is (m+1)^k in the worst case; callers budget for that.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::{pow_rat, rat_one, rat_zero, Rat};
use crate::solver::SolverOutput;
use crate::welfare::integer_exponents;

/// Distinct positive values with their multiplicities and concrete goods.
#[derive(Debug, Clone)]
pub struct KarySignature {
    pub values: Vec<Rat>,
    pub counts: Vec<u64>,
    /// Good ids per value class, ascending.
    pub class_goods: Vec<Vec<usize>>,
    pub zero_goods: Vec<usize>,
}

impl KarySignature {
    pub fn of(instance: &Instance) -> Result<Self> {
        let values = instance.identical_values().ok_or_else(|| {
            Error::Unsupported("k-ary solving requires an identical-additive profile".to_string())
        })?;
        let mut distinct: Vec<Rat> = Vec::new();
        for v in values {
            if !v.is_zero() && !distinct.contains(v) {
                distinct.push(v.clone());
            }
        }
        distinct.sort();
        let mut counts = vec![0u64; distinct.len()];
        let mut class_goods = vec![Vec::new(); distinct.len()];
        let mut zero_goods = Vec::new();
        for (j, v) in values.iter().enumerate() {
            if v.is_zero() {
                zero_goods.push(j);
            } else {
                let c = distinct.iter().position(|d| d == v).expect("value present");
                counts[c] += 1;
                class_goods[c].push(j);
            }
        }
        Ok(KarySignature {
            values: distinct,
            counts,
            class_goods,
            zero_goods,
        })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// Number of DP states per layer: Π (count_i + 1).
    pub fn state_count(&self) -> u128 {
        self.counts
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128 + 1))
    }
}

/// Exact path cost: empty-bundle count, then the exact welfare product.
#[derive(Debug, Clone, PartialEq, Eq)]
struct KCost {
    zeros: u32,
    product: Rat,
}

impl KCost {
    fn better_than(&self, other: &KCost) -> bool {
        self.zeros < other.zeros || (self.zeros == other.zeros && self.product > other.product)
    }
}

#[allow(clippy::needless_range_loop)]
pub fn kary_solve(instance: &Instance) -> Result<SolverOutput> {
    let sig = KarySignature::of(instance)?;
    let n = instance.agent_count();
    let k = sig.k();

    let (exponents, _) = integer_exponents(instance.weights());
    let exponents: Vec<u32> = exponents
        .iter()
        .map(|e: &BigInt| {
            e.to_u32()
                .ok_or_else(|| Error::InvalidParameter("weights too large".to_string()))
        })
        .collect::<Result<_>>()?;

    // States are count vectors 0 <= m <= counts, indexed in mixed radix.
    let radices: Vec<u64> = sig.counts.iter().map(|&c| c + 1).collect();
    let total_states = sig.state_count();
    let total_states_usize = usize::try_from(total_states).map_err(|_| Error::Budget {
        required: total_states,
        cap: usize::MAX as u128,
    })?;

    let decode = |mut idx: usize| -> Vec<u64> {
        let mut state = vec![0u64; k];
        for c in 0..k {
            state[c] = (idx as u64) % radices[c];
            idx /= radices[c] as usize;
        }
        state
    };
    let bundle_value = |diff: &[u64]| -> Rat {
        let mut acc = rat_zero();
        for (c, &d) in diff.iter().enumerate() {
            if d > 0 {
                acc += &sig.values[c] * Rat::from_integer(d.into());
            }
        }
        acc
    };

    // dp[state]: best cost reaching (layer, state), with per-layer parents.
    let mut dp: Vec<Option<KCost>> = vec![None; total_states_usize];
    dp[0] = Some(KCost {
        zeros: 0,
        product: rat_one(),
    });
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(n);

    for agent in 0..n {
        let mut next: Vec<Option<KCost>> = vec![None; total_states_usize];
        let mut parent = vec![usize::MAX; total_states_usize];
        for from_idx in 0..total_states_usize {
            let Some(cost) = dp[from_idx].clone() else {
                continue;
            };
            let from = decode(from_idx);
            // Enumerate every superset state reachable from `from`.
            let mut diff = vec![0u64; k];
            loop {
                let mut to_idx = 0usize;
                let mut stride = 1usize;
                for c in 0..k {
                    to_idx += ((from[c] + diff[c]) as usize) * stride;
                    stride *= radices[c] as usize;
                }
                let value = bundle_value(&diff);
                let cand = if value.is_zero() {
                    KCost {
                        zeros: cost.zeros + 1,
                        product: cost.product.clone(),
                    }
                } else {
                    KCost {
                        zeros: cost.zeros,
                        product: &cost.product * pow_rat(&value, exponents[agent]),
                    }
                };
                match &next[to_idx] {
                    Some(existing) if !cand.better_than(existing) => {}
                    _ => {
                        next[to_idx] = Some(cand);
                        parent[to_idx] = from_idx;
                    }
                }
                // advance diff within counts - from
                let mut c = 0;
                loop {
                    if c == k {
                        break;
                    }
                    diff[c] += 1;
                    if from[c] + diff[c] <= sig.counts[c] {
                        break;
                    }
                    diff[c] = 0;
                    c += 1;
                }
                if c == k {
                    break;
                }
            }
        }
        dp = next;
        parents.push(parent);
    }

    let final_idx = total_states_usize - 1;
    let final_cost = dp[final_idx]
        .clone()
        .ok_or_else(|| Error::Internal("full state unreachable".to_string()))?;

    // Walk parents to recover per-agent count differences.
    let mut states = vec![final_idx; n + 1];
    for agent in (0..n).rev() {
        states[agent] = parents[agent][states[agent + 1]];
    }
    debug_assert_eq!(states[0], 0);

    // Realize counts as concrete goods: lowest-index unused good per class.
    let mut next_good = vec![0usize; k];
    let mut bundles = vec![Vec::new(); n];
    for agent in 0..n {
        let from = decode(states[agent]);
        let to = decode(states[agent + 1]);
        for c in 0..k {
            for _ in from[c]..to[c] {
                bundles[agent].push(sig.class_goods[c][next_good[c]]);
                next_good[c] += 1;
            }
        }
    }
    bundles[0].extend(sig.zero_goods.iter().copied());

    Ok(SolverOutput {
        allocation: Allocation::new(bundles),
        zero_optimum: final_cost.zeros > 0,
    })
}
