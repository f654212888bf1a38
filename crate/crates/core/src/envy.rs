//! Weak weighted envy-freeness up to one good (wwEF1).
//!
//! Agent `i` is wwEF1-satisfied towards `h` when some good `j` in `x_h`
//! has `v_i(x_i)/η_i >= v_i(x_h)/η_h - v_ij/min(η_i, η_h)`. A pair is a
//! violation only when the strict inequality holds for every removable good,
//! so an empty envied bundle never violates.

use crate::allocation::Allocation;
use crate::error::Result;
use crate::instance::Instance;
use crate::rat::Rat;

/// Every ordered pair `(i, h)` violating wwEF1, lexicographically sorted,
/// 0-based. An empty result certifies the allocation is wwEF1.
pub fn wwef1_violations(instance: &Instance, allocation: &Allocation) -> Result<Vec<(usize, usize)>> {
    allocation.validate(instance, true)?;
    let n = instance.agent_count();
    let weights = instance.weights();
    let mut violations = Vec::new();
    for i in 0..n {
        let own = instance.bundle_value(i, allocation.bundle(i));
        for h in 0..n {
            if i == h || allocation.bundle(h).is_empty() {
                continue;
            }
            if pair_violates(instance, weights, i, &own, h, allocation.bundle(h)) {
                violations.push((i, h));
            }
        }
    }
    Ok(violations)
}

/// Checks one ordered pair against an explicit envied bundle.
pub(crate) fn pair_violates(
    instance: &Instance,
    weights: &[Rat],
    i: usize,
    own_value: &Rat,
    h: usize,
    envied_bundle: &[usize],
) -> bool {
    if envied_bundle.is_empty() {
        return false;
    }
    let min_weight = weights[i].clone().min(weights[h].clone());
    let lhs = own_value / &weights[i];
    let envied = instance.bundle_value(i, envied_bundle);
    for &j in envied_bundle {
        let vij = instance.good_value(i, j);
        let rhs = &envied / &weights[h] - vij / &min_weight;
        if lhs >= rhs {
            return false;
        }
    }
    true
}
