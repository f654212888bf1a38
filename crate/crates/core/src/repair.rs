//! wwEF1 repair for identical additive valuations with asymmetric weights.
//!
//! While the allocation is not wwEF1, one round runs: sort agents by
//! v(x_i)/η_i ascending (ties by original id), pick the first envious agent
//! i and the first agent h it envies, move one good from h to i, then keep
//! moving that same good to whichever agent newly envies its holder until
//! nobody does. Every logged move goes from a wwEF1-violated agent to the
//! envier, so Nash welfare strictly increases move by move; the process
//! stops after O(nm) transfers.

use serde::Serialize;

use crate::allocation::Allocation;
use crate::envy::pair_violates;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::Rat;
use crate::solver::SolverOutput;

/// One good movement; `round` groups the cascade started by one violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub round: u32,
    pub from: usize,
    pub to: usize,
    pub good: usize,
}

/// Transfers as JSON lines, one object per line.
pub fn serialize_transfer_log(log: &[Transfer]) -> String {
    log.iter()
        .map(|t| serde_json::to_string(t).expect("transfer serializes"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn wwef1_repair(
    instance: &Instance,
    allocation: &Allocation,
) -> Result<(Allocation, Vec<Transfer>)> {
    if instance.identical_values().is_none() {
        return Err(Error::Unsupported(
            "wwEF1 repair requires an identical-additive profile".to_string(),
        ));
    }
    allocation.validate(instance, true)?;

    let n = instance.agent_count();
    let m = instance.good_count();
    let weights = instance.weights();
    let mut current = allocation.clone();
    let mut log: Vec<Transfer> = Vec::new();
    let mut round: u32 = 0;
    // The procedure needs O(nm) transfers; this cap only guards against
    // implementation bugs turning into infinite loops.
    let cap = 64 + 16 * (n as u64) * (m as u64).max(1);

    loop {
        // Sort order for this round: v(x_i)/η_i ascending, ties by id.
        let utilities: Vec<Rat> = current.utilities(instance);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            (&utilities[a] / &weights[a])
                .cmp(&(&utilities[b] / &weights[b]))
                .then(a.cmp(&b))
        });

        let Some((envier, envied)) = first_violation(instance, &current, &order) else {
            return Ok((current, log));
        };
        round += 1;

        // Transferred good: the smallest-value good in x_h whose removal
        // satisfies i's wwEF1 condition towards h, else the largest-value
        // good (ties to the smaller good id either way).
        let good = select_good(instance, &current, envier, envied);
        current.remove(envied, good);
        current.push(envier, good);
        log.push(Transfer {
            round,
            from: envied,
            to: envier,
            good,
        });

        // Cascade: the same good moves on while someone envies its holder.
        let mut holder = envier;
        loop {
            if log.len() as u64 > cap {
                return Err(Error::Internal(
                    "transfer count exceeded the O(nm) safety cap".to_string(),
                ));
            }
            let Some(next) = first_envier_of(instance, &current, &order, holder) else {
                break;
            };
            current.remove(holder, good);
            current.push(next, good);
            log.push(Transfer {
                round,
                from: holder,
                to: next,
                good,
            });
            holder = next;
        }
    }
}

/// Repairs a solver output in place, composing the approximation guarantee
/// with fairness.
pub fn repair_output(instance: &Instance, output: SolverOutput) -> Result<(SolverOutput, Vec<Transfer>)> {
    let (allocation, log) = wwef1_repair(instance, &output.allocation)?;
    Ok((
        SolverOutput {
            allocation,
            zero_optimum: output.zero_optimum,
        },
        log,
    ))
}

/// First (in round order) envious agent and its first envied agent.
fn first_violation(
    instance: &Instance,
    allocation: &Allocation,
    order: &[usize],
) -> Option<(usize, usize)> {
    for &i in order {
        let own = instance.bundle_value(i, allocation.bundle(i));
        for &h in order {
            if i == h {
                continue;
            }
            if pair_violates(instance, instance.weights(), i, &own, h, allocation.bundle(h)) {
                return Some((i, h));
            }
        }
    }
    None
}

/// First agent (in round order) that wwEF1-envies `holder`.
fn first_envier_of(
    instance: &Instance,
    allocation: &Allocation,
    order: &[usize],
    holder: usize,
) -> Option<usize> {
    for &l in order {
        if l == holder {
            continue;
        }
        let own = instance.bundle_value(l, allocation.bundle(l));
        if pair_violates(
            instance,
            instance.weights(),
            l,
            &own,
            holder,
            allocation.bundle(holder),
        ) {
            return Some(l);
        }
    }
    None
}

fn select_good(instance: &Instance, allocation: &Allocation, i: usize, h: usize) -> usize {
    let bundle = allocation.bundle(h);
    debug_assert!(!bundle.is_empty());
    let mut candidates: Vec<usize> = bundle.to_vec();
    candidates.sort_by(|&a, &b| {
        instance
            .good_value(i, a)
            .cmp(&instance.good_value(i, b))
            .then(a.cmp(&b))
    });
    let own = instance.bundle_value(i, allocation.bundle(i));
    for &g in &candidates {
        let own_after = &own + instance.good_value(i, g);
        let envied_after: Vec<usize> = bundle.iter().copied().filter(|&x| x != g).collect();
        if !pair_violates(instance, instance.weights(), i, &own_after, h, &envied_after) {
            return g;
        }
    }
    *candidates.last().expect("nonempty bundle")
}
