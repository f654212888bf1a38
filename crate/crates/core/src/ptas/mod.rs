//! Approximation scheme for identical additive valuations with asymmetric
//! weights, plus the p-mean variant for symmetric weights.
//!
//! Pipeline: sort agents by ascending weight, round good values onto the
//! configuration grid, build the layered configuration graph, take the best
//! source-to-target path, then replay the path into concrete bundles.
//! Goods left over by the approximate small-good accounting go to the last
//! (heaviest) agent; worthless goods go to agent 0.

pub mod config;
pub mod graph;

pub use config::{
    enumerate_principal_configurations, extend_bundle, principal_configuration, represents,
    round_value, scale_configuration, Configuration, Magnitude, PtasParams,
};
pub use graph::{best_path, build_configuration_graph, Aggregation, BestPath, ConfigGraph};

use num_traits::Zero;

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::Rat;
use crate::solver::SolverOutput;
use crate::welfare::PExponent;

/// Per-run details used by diagnostics and the report: the path's edge
/// values, the bundles the path stands for (before leftover goods are
/// appended), and the agent order used internally.
#[derive(Debug, Clone)]
pub struct PtasReport {
    pub params: PtasParams,
    /// Original agent ids sorted by ascending weight.
    pub sorted_agents: Vec<usize>,
    /// Bundle value per sorted agent slot promised by the path.
    pub edge_values: Vec<Rat>,
    /// Concrete bundles per sorted agent slot (original good ids), before
    /// leftovers are appended.
    pub chain_bundles: Vec<Vec<usize>>,
    /// Goods not consumed by the path replay (appended to the last slot).
    pub leftovers: Vec<usize>,
    /// Worthless goods appended to agent 0.
    pub zero_goods: Vec<usize>,
}

pub fn ptas_solve(instance: &Instance, epsilon: &Rat) -> Result<SolverOutput> {
    let params = PtasParams::from_epsilon(epsilon)?;
    ptas_solve_with_params(instance, &params).map(|(out, _)| out)
}

pub fn ptas_solve_with_params(
    instance: &Instance,
    params: &PtasParams,
) -> Result<(SolverOutput, Option<PtasReport>)> {
    solve_impl(instance, params, Aggregation::WeightedProduct, true)
}

/// p-mean variant: same graph, different path aggregation. Requires
/// symmetric weights; p = 0 is the Nash objective.
pub fn pmean_ptas_solve(instance: &Instance, epsilon: &Rat, p: &PExponent) -> Result<SolverOutput> {
    let params = PtasParams::from_epsilon(epsilon)?;
    pmean_ptas_solve_with_params(instance, &params, p)
}

pub fn pmean_ptas_solve_with_params(
    instance: &Instance,
    params: &PtasParams,
    p: &PExponent,
) -> Result<SolverOutput> {
    if !instance.symmetric_weights() {
        return Err(Error::Unsupported(
            "the p-mean scheme requires symmetric weights".to_string(),
        ));
    }
    let (aggregation, zero_guard) = match p {
        PExponent::Zero => (Aggregation::WeightedProduct, true),
        PExponent::MinusInfinity => (Aggregation::Bottleneck, true),
        PExponent::Finite(p) => {
            let pf = crate::rat::rat_to_f64(p);
            // for p > 0 empty bundles do not zero the welfare
            (Aggregation::PSum(pf), pf < 0.0)
        }
    };
    solve_impl(instance, params, aggregation, zero_guard).map(|(out, _)| out)
}

fn solve_impl(
    instance: &Instance,
    params: &PtasParams,
    aggregation: Aggregation,
    zero_when_starved: bool,
) -> Result<(SolverOutput, Option<PtasReport>)> {
    let values = instance.identical_values().ok_or_else(|| {
        Error::Unsupported("this scheme requires an identical-additive profile".to_string())
    })?;
    let n = instance.agent_count();

    let mut positive_ids: Vec<usize> = Vec::new();
    let mut zero_goods: Vec<usize> = Vec::new();
    for (j, u) in values.iter().enumerate() {
        if u.is_zero() {
            zero_goods.push(j);
        } else {
            positive_ids.push(j);
        }
    }

    // Fewer positive goods than agents forces a zero utility somewhere; the
    // optimum is zero and any complete allocation witnesses it.
    if zero_when_starved && positive_ids.len() < n {
        let mut bundles = vec![Vec::new(); n];
        bundles[0] = (0..instance.good_count()).collect();
        return Ok((
            SolverOutput {
                allocation: Allocation::new(bundles),
                zero_optimum: true,
            },
            None,
        ));
    }

    // Some optimum has non-decreasing bundle values over agents sorted
    // by ascending weight, so the search works in that order (ties by id).
    let mut sorted_agents: Vec<usize> = (0..n).collect();
    sorted_agents.sort_by(|&a, &b| {
        instance.weights()[a]
            .cmp(&instance.weights()[b])
            .then(a.cmp(&b))
    });
    let weights_sorted: Vec<Rat> = sorted_agents
        .iter()
        .map(|&a| instance.weights()[a].clone())
        .collect();

    let pvalues: Vec<Rat> = positive_ids.iter().map(|&j| values[j].clone()).collect();
    let graph = build_configuration_graph(&pvalues, &weights_sorted, params)?;
    let path = best_path(&graph, aggregation)?;

    // Replay the path into bundles (ids into pvalues).
    let mut chain_local: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut allocated: Vec<usize> = Vec::new();
    for layer in 0..n {
        let from = path.config_ids[layer];
        let to = path.config_ids[layer + 1];
        if from == to {
            chain_local.push(Vec::new());
            continue;
        }
        let extended = extend_bundle(
            &pvalues,
            &allocated,
            &graph.configs[from],
            &graph.configs[to],
            params,
        )?;
        let bundle: Vec<usize> = extended
            .iter()
            .copied()
            .filter(|j| !allocated.contains(j))
            .collect();
        allocated = extended;
        chain_local.push(bundle);
    }

    let leftovers_local: Vec<usize> = (0..pvalues.len())
        .filter(|j| !allocated.contains(j))
        .collect();

    // Map back to original good ids and agents.
    let chain_bundles: Vec<Vec<usize>> = chain_local
        .iter()
        .map(|b| b.iter().map(|&j| positive_ids[j]).collect())
        .collect();
    let leftovers: Vec<usize> = leftovers_local.iter().map(|&j| positive_ids[j]).collect();

    let mut bundles = vec![Vec::new(); n];
    for (slot, bundle) in chain_bundles.iter().enumerate() {
        bundles[sorted_agents[slot]] = bundle.clone();
    }
    // Leftover small goods only increase the last (heaviest) slot's utility.
    bundles[sorted_agents[n - 1]].extend(leftovers.iter().copied());
    bundles[0].extend(zero_goods.iter().copied());

    let allocation = Allocation::new(bundles);
    // An all-positive path exists whenever the optimum is positive, but the
    // path-correspondence argument needs λ >= 12; below that a zero edge on
    // the best path proves nothing about the optimum.
    let zero_optimum = zero_when_starved && path.zero_edges > 0 && params.guarantee_applies();
    let report = PtasReport {
        params: *params,
        sorted_agents,
        edge_values: path.edge_values.clone(),
        chain_bundles,
        leftovers,
        zero_goods,
    };
    Ok((
        SolverOutput {
            allocation,
            zero_optimum,
        },
        Some(report),
    ))
}
