//! The layered configuration graph and its best-path search.
//!
//! Layer i holds one vertex per principal configuration, standing for the
//! union of the bundles of the first i (weight-sorted) agents. An edge from
//! (i-1, c) to (i, c') ships agent i a bundle worth V(w', m' - m''), where
//! m'' is c scaled to c' magnitude; the empty bundle is the self edge.
//! Empty-bundle edges carry a zero sentinel that ranks below every finite
//! cost, so the search returns an all-positive path whenever one exists.



use crate::error::{Error, Result};
use crate::rat::{rat_to_f64, rat_zero, Rat};

use super::config::{
    enumerate_principal_configurations, log_of_units, principal_configuration,
    scale_configuration, Configuration, Magnitude, PtasParams,
};

#[derive(Debug, Clone)]
pub struct GraphEdge {
    pub to: usize,
    /// Bundle value of the edge; zero exactly for empty-bundle self edges.
    pub value: Rat,
    /// ln(value); NEG_INFINITY sentinel for the empty bundle.
    pub log_value: f64,
}

#[derive(Debug, Clone)]
pub struct ConfigGraph {
    pub params: PtasParams,
    /// Sorted principal configurations; the index is the configuration id.
    pub configs: Vec<Configuration>,
    pub source: usize,
    pub target: usize,
    /// Agent count; the graph has layers 0..=n.
    pub layers: usize,
    /// Weight of each layer's agent, ascending in weight.
    pub weights_sorted: Vec<Rat>,
    /// Outgoing edges per configuration id; identical for every layer (only
    /// the cost exponent changes with the agent).
    edges_from: Vec<Vec<GraphEdge>>,
}

impl ConfigGraph {
    pub fn edges_from(&self, config_id: usize) -> &[GraphEdge] {
        &self.edges_from[config_id]
    }

    pub fn config_id(&self, config: &Configuration) -> Option<usize> {
        self.configs.binary_search(config).ok()
    }

    pub fn has_edge(&self, from: &Configuration, to: &Configuration) -> bool {
        match (self.config_id(from), self.config_id(to)) {
            (Some(f), Some(t)) => self.edges_from[f].iter().any(|e| e.to == t),
            _ => false,
        }
    }
}

/// Builds the graph over the positive good values of an identical-additive
/// market. `weights_sorted` must be ascending (the caller pre-sorts agents).
pub fn build_configuration_graph(
    values: &[Rat],
    weights_sorted: &[Rat],
    params: &PtasParams,
) -> Result<ConfigGraph> {
    debug_assert!(values.iter().all(|u| u > &rat_zero()));
    debug_assert!(weights_sorted.windows(2).all(|w| w[0] <= w[1]));
    let configs = enumerate_principal_configurations(values, params);
    let source = configs
        .binary_search(&Configuration::empty())
        .map_err(|_| Error::Internal("empty configuration missing".to_string()))?;
    let target_cfg = principal_configuration(values, params);
    let target = configs
        .binary_search(&target_cfg)
        .map_err(|_| Error::Internal("market configuration missing".to_string()))?;

    // Group configuration ids by magnitude for one scaling per (source, w').
    let mut by_mag: Vec<(Magnitude, Vec<usize>)> = Vec::new();
    for (id, cfg) in configs.iter().enumerate() {
        match by_mag.last_mut() {
            Some((mag, ids)) if *mag == cfg.mag() => ids.push(id),
            _ => by_mag.push((cfg.mag(), vec![id])),
        }
    }

    let lambda_sq = params.lambda_sq();
    let mut edges_from: Vec<Vec<GraphEdge>> = vec![Vec::new(); configs.len()];
    for (from_id, from_cfg) in configs.iter().enumerate() {
        // Empty-bundle self edge always exists.
        edges_from[from_id].push(GraphEdge {
            to: from_id,
            value: rat_zero(),
            log_value: f64::NEG_INFINITY,
        });
        for (mag, ids) in &by_mag {
            if *mag < from_cfg.mag() {
                continue;
            }
            let e_target = match mag {
                Magnitude::Zero => continue, // only the empty config; self edge covers it
                Magnitude::Pow2(e) => *e,
            };
            let scaled = scale_configuration(from_cfg, *mag, params)?;
            let scaled_units = scaled.value_units();
            for &to_id in ids {
                if to_id == from_id {
                    continue;
                }
                let to_cfg = &configs[to_id];
                if !scaled.dominated_by(to_cfg) {
                    continue;
                }
                let diff_units = to_cfg.value_units() - scaled_units;
                // V(w', m' - m'') >= w'/3  <=>  3 * units >= λ²
                if 3 * diff_units < lambda_sq {
                    continue;
                }
                let value = Rat::from_integer(diff_units.into()) * crate::rat::pow2(e_target)
                    / Rat::from_integer(lambda_sq.into());
                edges_from[from_id].push(GraphEdge {
                    to: to_id,
                    log_value: log_of_units(diff_units, e_target, params),
                    value,
                });
            }
        }
        edges_from[from_id].sort_by_key(|e| e.to);
    }

    Ok(ConfigGraph {
        params: *params,
        configs,
        source,
        target,
        layers: weights_sorted.len(),
        weights_sorted: weights_sorted.to_vec(),
        edges_from,
    })
}

/// How path costs aggregate across edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregation {
    /// Maximize Σ η_i ln(value): the weighted product of edge values.
    WeightedProduct,
    /// Maximize Σ value^p for p > 0, minimize it for p < 0.
    PSum(f64),
    /// Maximize the minimum edge value.
    Bottleneck,
}

/// Composable path cost; interpretation depends on the aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost {
    zeros: u64,
    score: f64,
}

impl Aggregation {
    fn identity(&self) -> Cost {
        match self {
            Aggregation::Bottleneck => Cost {
                zeros: 0,
                score: f64::INFINITY,
            },
            _ => Cost {
                zeros: 0,
                score: 0.0,
            },
        }
    }

    /// Cost of prefixing `suffix` with an edge taken by the given agent.
    fn step(&self, edge: &GraphEdge, agent_weight: f64, suffix: Cost) -> Cost {
        let empty = edge.log_value == f64::NEG_INFINITY;
        match self {
            Aggregation::WeightedProduct => {
                if empty {
                    Cost {
                        zeros: suffix.zeros + 1,
                        score: suffix.score,
                    }
                } else {
                    Cost {
                        zeros: suffix.zeros,
                        score: suffix.score + agent_weight * edge.log_value,
                    }
                }
            }
            Aggregation::PSum(p) => {
                if empty {
                    if *p > 0.0 {
                        // 0^p = 0 contributes nothing for p > 0
                        suffix
                    } else {
                        Cost {
                            zeros: suffix.zeros + 1,
                            score: suffix.score,
                        }
                    }
                } else {
                    Cost {
                        zeros: suffix.zeros,
                        score: suffix.score + (p * edge.log_value).exp(),
                    }
                }
            }
            Aggregation::Bottleneck => Cost {
                zeros: suffix.zeros,
                score: if empty { 0.0 } else { suffix.score.min(edge.log_value.exp()) },
            },
        }
    }

    /// Strictly-better-than, with zero-sentinel paths below all others.
    fn better(&self, a: Cost, b: Cost) -> bool {
        if a.zeros != b.zeros {
            return a.zeros < b.zeros;
        }
        match self {
            Aggregation::PSum(p) if *p < 0.0 => a.score < b.score,
            _ => a.score > b.score,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BestPath {
    /// Configuration ids for layers 0..=n.
    pub config_ids: Vec<usize>,
    /// Bundle value per layer edge (zero for empty bundles).
    pub edge_values: Vec<Rat>,
    /// Edge log-values (NEG_INFINITY for empty bundles).
    pub edge_logs: Vec<f64>,
    /// Number of empty bundles on the path.
    pub zero_edges: u64,
}

/// Finds the source-to-target path optimizing the aggregation. Exact cost
/// ties resolve to the lexicographically smallest configuration id sequence
/// (backward dynamic program, then a forward walk picking the smallest id
/// achieving the optimum).
pub fn best_path(graph: &ConfigGraph, aggregation: Aggregation) -> Result<BestPath> {
    let n = graph.layers;
    let num = graph.configs.len();
    let weights_f64: Vec<f64> = graph.weights_sorted.iter().map(rat_to_f64).collect();

    // suffix[l][c]: best cost from (l, c) to (n, target).
    let mut suffix: Vec<Vec<Option<Cost>>> = vec![vec![None; num]; n + 1];
    suffix[n][graph.target] = Some(aggregation.identity());
    for layer in (0..n).rev() {
        for from in 0..num {
            let mut best: Option<Cost> = None;
            for edge in graph.edges_from(from) {
                if let Some(tail) = suffix[layer + 1][edge.to] {
                    let cand = aggregation.step(edge, weights_f64[layer], tail);
                    match best {
                        Some(b) if !aggregation.better(cand, b) => {}
                        _ => best = Some(cand),
                    }
                }
            }
            suffix[layer][from] = best;
        }
    }

    if suffix[0][graph.source].is_none() {
        return Err(Error::Internal(
            "configuration graph has no source-to-target path".to_string(),
        ));
    }

    let mut config_ids = vec![graph.source];
    let mut edge_values = Vec::with_capacity(n);
    let mut edge_logs = Vec::with_capacity(n);
    let mut zero_edges = 0u64;
    let mut current = graph.source;
    for layer in 0..n {
        let want = suffix[layer][current].expect("walk stays on optimal states");
        let mut chosen: Option<&GraphEdge> = None;
        for edge in graph.edges_from(current) {
            if let Some(tail) = suffix[layer + 1][edge.to] {
                let cand = aggregation.step(edge, weights_f64[layer], tail);
                if cand == want {
                    chosen = Some(edge);
                    break; // edges sorted by target id: first hit is smallest
                }
            }
        }
        let edge = chosen.ok_or_else(|| {
            Error::Internal("optimal suffix lost during path reconstruction".to_string())
        })?;
        if edge.log_value == f64::NEG_INFINITY {
            zero_edges += 1;
        }
        edge_values.push(edge.value.clone());
        edge_logs.push(edge.log_value);
        config_ids.push(edge.to);
        current = edge.to;
    }
    debug_assert_eq!(current, graph.target);
    Ok(BestPath {
        config_ids,
        edge_values,
        edge_logs,
        zero_edges,
    })
}
