//! Exact solver for instances where each agent values at most two goods,
//! with arbitrary monotone valuations and asymmetric weights.
//!
//! Reduction first: forced assignments (goods wanted by one agent, agents
//! with one remaining valued good), removal of satisfied agents, a Hall
//! check certifying a zero optimum, and resolution of K_{2,2} blocks by
//! direct comparison. What remains is a bipartite interest graph where
//! every agent either holds one good and wants one more (N'), or holds
//! nothing and wants exactly two.
//!
//! The remainder reduces to one maximum-weight matching: an N' agent's edge
//! carries its marginal gain η_i (ln v_i({g_i, j}) - ln v_i({g_i})), and a
//! two-good agent contributes three edges (i, j), (i, j'), (j, j') whose
//! weights share a constant C large enough that matching all such agents
//! dominates any weight differences. With marginal N' weights the matching
//! objective equals the total log-welfare up to a constant whether or not
//! N' agents are matched. Zero values get a finite sentinel weight; a
//! negative-weight edge is never part of a maximum-weight matching, so
//! sentinel edges are never selected. A final utility scan closes the gap
//! the Hall test leaves open for complementary (both singles worthless)
//! agents.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::{Instance, Profile, TwoTable};
use crate::matching::{max_weight_matching, WeightedGraph};
use crate::rat::{ln_rat, rat_to_f64, Rat};
use crate::solver::SolverOutput;

/// Outcome of the reduction passes.
#[derive(Debug, Clone)]
pub struct ReducedState {
    /// Committed bundles for every original agent.
    pub bundles: Vec<Vec<usize>>,
    /// Goods already assigned (or known worthless to everyone).
    pub assigned: Vec<bool>,
    /// Agents still in the interest graph.
    pub active: Vec<bool>,
    /// Remaining valued goods per agent (only meaningful while active).
    pub remaining: Vec<Vec<usize>>,
    /// Active agents holding exactly one good.
    pub n_prime: Vec<bool>,
    /// Set when the reduction certifies that the optimum welfare is zero.
    pub zero_flag: bool,
}

impl ReducedState {
    pub fn active_agents(&self) -> Vec<usize> {
        (0..self.active.len()).filter(|&i| self.active[i]).collect()
    }

    /// No two active two-good agents want the same pair.
    pub fn is_k22_free(&self) -> bool {
        let mut seen: Vec<&[usize]> = Vec::new();
        for i in self.active_agents() {
            if self.remaining[i].len() == 2 {
                if seen.iter().any(|r| **r == *self.remaining[i]) {
                    return false;
                }
                seen.push(&self.remaining[i]);
            }
        }
        true
    }
}

fn tables(instance: &Instance) -> Result<&[TwoTable]> {
    match instance.profile() {
        Profile::TwoValuable { tables, .. } => Ok(tables),
        _ => Err(Error::Unsupported(
            "this solver requires a two_valuable profile".to_string(),
        )),
    }
}

/// Applies the reduction rules to a fixpoint. Rule order per pass:
/// (a) goods with a unique interested agent, (b) empty-handed agents with a
/// single remaining valued good, (c) retiring agents with no remaining
/// valued goods (zero flag if they ended worthless), (d) Hall check via
/// bipartite matching over edges that can still yield positive utility,
/// (e) K_{2,2} blocks resolved by comparing both splits exactly.
pub fn reduce_instance(instance: &Instance) -> Result<ReducedState> {
    let tabs = tables(instance)?;
    let n = instance.agent_count();
    let m = instance.good_count();
    let mut state = ReducedState {
        bundles: vec![Vec::new(); n],
        assigned: vec![false; m],
        active: vec![true; n],
        remaining: tabs.iter().map(|t| t.goods.clone()).collect(),
        n_prime: vec![false; n],
        zero_flag: false,
    };
    let (exponents, _) = crate::welfare::integer_exponents(instance.weights());

    let assign = |state: &mut ReducedState, agent: usize, good: usize| {
        debug_assert!(!state.assigned[good]);
        state.assigned[good] = true;
        state.bundles[agent].push(good);
        for r in state.remaining.iter_mut() {
            r.retain(|&g| g != good);
        }
    };

    loop {
        if state.zero_flag {
            return Ok(state);
        }
        let mut changed = false;

        // (a) goods with exactly one interested active agent
        for good in 0..m {
            if state.assigned[good] {
                continue;
            }
            let interested: Vec<usize> = state
                .active_agents()
                .into_iter()
                .filter(|&i| state.remaining[i].contains(&good))
                .collect();
            if interested.len() == 1 {
                assign(&mut state, interested[0], good);
                changed = true;
            }
        }

        // (b) empty-handed active agents with one remaining valued good
        for agent in 0..n {
            if !state.active[agent] || !state.bundles[agent].is_empty() {
                continue;
            }
            if state.remaining[agent].len() == 1 {
                let good = state.remaining[agent][0];
                assign(&mut state, agent, good);
                changed = true;
            }
        }

        // (c) retire agents whose valued goods are exhausted
        for agent in 0..n {
            if !state.active[agent] {
                continue;
            }
            if state.remaining[agent].is_empty() {
                state.active[agent] = false;
                changed = true;
                if instance
                    .bundle_value(agent, &state.bundles[agent])
                    .is_zero()
                {
                    // every good this agent could ever value is gone
                    state.zero_flag = true;
                }
            } else if state.bundles[agent].len() == 1 && !state.n_prime[agent] {
                state.n_prime[agent] = true;
                changed = true;
            }
        }
        if state.zero_flag {
            return Ok(state);
        }

        // (d) Hall check: every zero-utility active agent needs one of its
        // remaining goods, and only edges that can contribute positive
        // utility count. Necessary condition only; the post-matching scan
        // settles complementary cases.
        let needy: Vec<usize> = state
            .active_agents()
            .into_iter()
            .filter(|&i| instance.bundle_value(i, &state.bundles[i]).is_zero())
            .collect();
        for &i in &needy {
            let mut reachable = state.bundles[i].clone();
            reachable.extend(state.remaining[i].iter().copied());
            if instance.bundle_value(i, &reachable).is_zero() {
                state.zero_flag = true;
                return Ok(state);
            }
        }
        if !bipartite_saturates(&needy, &state.remaining, m) {
            state.zero_flag = true;
            return Ok(state);
        }

        // (e) K_{2,2} blocks: two agents wanting the same two goods
        let mut pairs: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
            std::collections::BTreeMap::new();
        for i in state.active_agents() {
            if state.remaining[i].len() == 2 && state.bundles[i].is_empty() {
                pairs
                    .entry((state.remaining[i][0], state.remaining[i][1]))
                    .or_default()
                    .push(i);
            }
        }
        for ((j1, j2), agents) in pairs {
            if agents.len() < 2 {
                continue;
            }
            if agents.len() > 2 {
                // three agents value only two goods: Hall violation
                state.zero_flag = true;
                return Ok(state);
            }
            let (i1, i2) = (agents[0], agents[1]);
            // straight split j1 -> i1, j2 -> i2 vs the swap, compared as
            // exact products v1^{e1} v2^{e2}
            let e1 = exponents[i1]
                .to_u32()
                .ok_or_else(|| Error::InvalidParameter("weights too large".to_string()))?;
            let e2 = exponents[i2]
                .to_u32()
                .ok_or_else(|| Error::InvalidParameter("weights too large".to_string()))?;
            let straight = crate::rat::pow_rat(&instance.good_value(i1, j1), e1)
                * crate::rat::pow_rat(&instance.good_value(i2, j2), e2);
            let swapped = crate::rat::pow_rat(&instance.good_value(i1, j2), e1)
                * crate::rat::pow_rat(&instance.good_value(i2, j1), e2);
            if straight >= swapped {
                assign(&mut state, i1, j1);
                assign(&mut state, i2, j2);
            } else {
                assign(&mut state, i1, j2);
                assign(&mut state, i2, j1);
            }
            changed = true;
        }

        if !changed {
            break;
        }
    }

    debug_assert!(state.is_k22_free());
    for i in state.active_agents() {
        debug_assert_eq!(
            state.remaining[i].len(),
            if state.n_prime[i] { 1 } else { 2 },
            "reduction fixpoint degree invariant"
        );
    }
    Ok(state)
}

/// Maximum-cardinality bipartite matching (augmenting paths) saturating the
/// needy agents; edges from each agent to its remaining valued goods.
fn bipartite_saturates(agents: &[usize], remaining: &[Vec<usize>], m: usize) -> bool {
    let mut good_owner: Vec<Option<usize>> = vec![None; m];
    fn try_assign(
        slot: usize,
        agents: &[usize],
        remaining: &[Vec<usize>],
        good_owner: &mut Vec<Option<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        let agent = agents[slot];
        for &g in &remaining[agent] {
            if visited[g] {
                continue;
            }
            visited[g] = true;
            let current = good_owner[g];
            if current.is_none()
                || try_assign(current.unwrap(), agents, remaining, good_owner, visited)
            {
                good_owner[g] = Some(slot);
                return true;
            }
        }
        false
    }
    for slot in 0..agents.len() {
        let mut visited = vec![false; m];
        if !try_assign(slot, agents, remaining, &mut good_owner, &mut visited) {
            return false;
        }
    }
    true
}

/// The weighted graph H built over a reduced state, with its vertex maps.
/// One matching in H decides every remaining assignment.
#[derive(Debug, Clone)]
pub struct MatchingModel {
    pub graph: WeightedGraph,
    /// Class constant: exceeds every per-agent log magnitude.
    pub c: f64,
    /// Active agents, in vertex order (agent i maps to vertex index).
    pub active: Vec<usize>,
    /// Remaining goods, in vertex order after the agents.
    pub remaining_goods: Vec<usize>,
}

impl MatchingModel {
    pub fn agent_vertex(&self, agent: usize) -> Option<usize> {
        self.active.iter().position(|&i| i == agent)
    }

    pub fn good_vertex(&self, good: usize) -> Option<usize> {
        self.remaining_goods
            .iter()
            .position(|&g| g == good)
            .map(|vx| self.active.len() + vx)
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<&Rat> {
        self.graph
            .edges()
            .iter()
            .find(|(a, b, _)| (*a == u && *b == v) || (*a == v && *b == u))
            .map(|(_, _, w)| w)
    }
}

/// Builds H for a reduced, non-zero state: marginal-gain edges for agents
/// already holding a good, and C-class edge triples for two-good agents.
pub fn build_matching_model(instance: &Instance, state: &ReducedState) -> Result<MatchingModel> {
    let tabs = tables(instance)?;
    let m = instance.good_count();
    let active = state.active_agents();
    let remaining_goods: Vec<usize> = (0..m)
        .filter(|&g| !state.assigned[g] && active.iter().any(|&i| state.remaining[i].contains(&g)))
        .collect();
    let agent_vx: std::collections::HashMap<usize, usize> = active
        .iter()
        .enumerate()
        .map(|(vx, &i)| (i, vx))
        .collect();
    let good_vx: std::collections::HashMap<usize, usize> = remaining_goods
        .iter()
        .enumerate()
        .map(|(vx, &g)| (g, active.len() + vx))
        .collect();

    // C must dominate every per-agent log magnitude so that the number of
    // matched two-good agents decides first; 1 + Σ η_i max|ln v| does.
    let weights = instance.weights();
    let mut c = 1.0f64;
    for &i in &active {
        let mut max_log: f64 = 0.0;
        for v in &tabs[i].values {
            if v.is_positive() {
                max_log = max_log.max(ln_rat(v).abs());
            }
        }
        c += rat_to_f64(&weights[i]) * max_log;
    }
    let sentinel = -(2.0 + active.len() as f64 * c);
    let log_or_sentinel = |v: &Rat, scale: f64| -> f64 {
        if v.is_zero() {
            sentinel
        } else {
            scale * ln_rat(v)
        }
    };

    let mut h = WeightedGraph::new(active.len() + remaining_goods.len());
    for &i in &active {
        let eta = rat_to_f64(&weights[i]);
        if state.n_prime[i] {
            let held = state.bundles[i][0];
            let j = state.remaining[i][0];
            let single = instance.bundle_value(i, &state.bundles[i]);
            let both = instance.bundle_value(i, &[held, j]);
            let weight = if single.is_zero() {
                // the agent's positive utility now depends on this match
                if both.is_zero() {
                    sentinel
                } else {
                    c + eta * ln_rat(&both)
                }
            } else {
                // marginal gain keeps the objective aligned with welfare
                // whether or not this agent ends up matched
                eta * (ln_rat(&both) - ln_rat(&single))
            };
            h.add_edge(agent_vx[&i], good_vx[&j], Rat::from_float(weight).unwrap())?;
        } else {
            let (j, jp) = (state.remaining[i][0], state.remaining[i][1]);
            let vj = instance.bundle_value(i, &[j]);
            let vjp = instance.bundle_value(i, &[jp]);
            let vboth = instance.bundle_value(i, &[j, jp]);
            h.add_edge(
                agent_vx[&i],
                good_vx[&j],
                Rat::from_float(c + log_or_sentinel(&vj, eta)).unwrap(),
            )?;
            h.add_edge(
                agent_vx[&i],
                good_vx[&jp],
                Rat::from_float(c + log_or_sentinel(&vjp, eta)).unwrap(),
            )?;
            h.add_edge(
                good_vx[&j],
                good_vx[&jp],
                Rat::from_float(c + log_or_sentinel(&vboth, eta)).unwrap(),
            )?;
        }
    }
    Ok(MatchingModel {
        graph: h,
        c,
        active,
        remaining_goods,
    })
}

pub fn solve_two_valuable(instance: &Instance) -> Result<SolverOutput> {
    let n = instance.agent_count();
    let m = instance.good_count();
    let state = reduce_instance(instance)?;

    if state.zero_flag {
        return Ok(finish(instance, state.bundles, true));
    }

    let active = state.active_agents();
    if active.is_empty() {
        return Ok(finish_with_scan(instance, state.bundles));
    }

    let model = build_matching_model(instance, &state)?;
    let remaining_goods = model.remaining_goods.clone();
    // pair_owner[(j, j')] = the unique active agent valuing both
    let mut pair_owner: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    for &i in &active {
        if !state.n_prime[i] {
            let (j, jp) = (state.remaining[i][0], state.remaining[i][1]);
            pair_owner.insert((j.min(jp), j.max(jp)), i);
        }
    }

    let matching = max_weight_matching(&model.graph);

    // Recover bundles from the matching.
    let mut bundles = state.bundles.clone();
    let mut matched_goods = vec![false; m];
    let mut agent_matched = vec![false; n];
    let vx_to_good = |vx: usize| -> Option<usize> {
        (vx >= active.len()).then(|| remaining_goods[vx - active.len()])
    };
    for &(a, b) in &matching {
        match (vx_to_good(a), vx_to_good(b)) {
            (None, Some(g)) => {
                let agent = active[a];
                bundles[agent].push(g);
                matched_goods[g] = true;
                agent_matched[agent] = true;
            }
            (Some(g1), Some(g2)) => {
                let owner = pair_owner[&(g1.min(g2), g1.max(g2))];
                bundles[owner].push(g1);
                bundles[owner].push(g2);
                matched_goods[g1] = true;
                matched_goods[g2] = true;
                agent_matched[owner] = true;
            }
            _ => {
                return Err(Error::Internal(
                    "matching contains an agent-agent edge".to_string(),
                ))
            }
        }
    }

    // Re-attach unmatched goods: prefer an interested agent the matching
    // left empty-handed, else one holding a single matched good (which by
    // monotonicity is the weakly better pair edge).
    for &g in &remaining_goods {
        if matched_goods[g] {
            continue;
        }
        let interested: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| state.remaining[i].contains(&g))
            .collect();
        let unmatched = interested.iter().copied().find(|&i| !agent_matched[i]);
        let target = unmatched.or_else(|| interested.first().copied());
        match target {
            Some(i) => {
                bundles[i].push(g);
                matched_goods[g] = true;
                agent_matched[i] = true;
            }
            None => {
                // no active agent values it; agent 0 sweeps it up below
            }
        }
    }

    Ok(finish_with_scan(instance, bundles))
}

/// Completes the allocation (leftover goods to agent 0) and flags zero
/// optimum when the final utility scan finds a worthless bundle.
fn finish_with_scan(instance: &Instance, bundles: Vec<Vec<usize>>) -> SolverOutput {
    let out = finish(instance, bundles, false);
    let zero = out
        .allocation
        .utilities(instance)
        .iter()
        .any(|u| u.is_zero());
    SolverOutput {
        zero_optimum: zero,
        ..out
    }
}

fn finish(instance: &Instance, mut bundles: Vec<Vec<usize>>, zero: bool) -> SolverOutput {
    let mut seen = vec![false; instance.good_count()];
    for b in &bundles {
        for &g in b {
            seen[g] = true;
        }
    }
    for (g, &s) in seen.iter().enumerate() {
        if !s {
            bundles[0].push(g);
        }
    }
    SolverOutput {
        allocation: Allocation::new(bundles),
        zero_optimum: zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_optimum, Objective};
    use crate::rat::rat_int;
    use crate::welfare::nash_welfare;

    fn two_valuable(weights: Vec<i64>, goods: usize, tables: Vec<(Vec<usize>, Vec<i64>)>) -> Instance {
        Instance::new(
            weights.into_iter().map(rat_int).collect(),
            Profile::TwoValuable {
                tables: tables
                    .into_iter()
                    .map(|(g, v)| {
                        TwoTable::new(g, v.into_iter().map(rat_int).collect()).unwrap()
                    })
                    .collect(),
                goods,
            },
        )
        .unwrap()
    }

    #[test]
    fn single_valued_agent_enters_n_prime() {
        let inst = two_valuable(vec![1, 1], 2, vec![(vec![0], vec![3]), (vec![0, 1], vec![1, 2, 3])]);
        let state = reduce_instance(&inst).unwrap();
        assert!(!state.zero_flag);
        // good 1 is wanted only by agent 1 and gets assigned by rule (a);
        // agent 1 then owns both valued goods and retires; good 0 flows to
        // agent 0 by rule (a) afterwards.
        assert!(state.bundles[1].contains(&1));
        assert!(state.bundles[0].contains(&0));
    }

    #[test]
    fn k22_block_resolved_toward_higher_welfare() {
        // both agents value {0, 1}: values (3, 1) vs (1, 3), equal weights:
        // straight split wins with 3 * 3 over 1 * 1.
        let inst = two_valuable(
            vec![1, 1],
            2,
            vec![(vec![0, 1], vec![3, 1, 4]), (vec![0, 1], vec![1, 3, 4])],
        );
        let out = solve_two_valuable(&inst).unwrap();
        assert_eq!(out.allocation.bundle(0), &[0]);
        assert_eq!(out.allocation.bundle(1), &[1]);
        let w = nash_welfare(&inst, &out.allocation).unwrap();
        assert!((w.linear() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hall_violation_flags_zero() {
        // three agents all valuing only goods {0, 1}
        let inst = two_valuable(
            vec![1, 1, 1],
            2,
            vec![
                (vec![0, 1], vec![1, 1, 2]),
                (vec![0, 1], vec![2, 1, 2]),
                (vec![0, 1], vec![1, 2, 2]),
            ],
        );
        let state = reduce_instance(&inst).unwrap();
        assert!(state.zero_flag);
        let out = solve_two_valuable(&inst).unwrap();
        assert!(out.zero_optimum);
        out.allocation.validate(&inst, true).unwrap();
    }

    #[test]
    fn single_agent_gets_both_goods() {
        let inst = two_valuable(vec![2], 2, vec![(vec![0, 1], vec![1, 2, 5])]);
        let out = solve_two_valuable(&inst).unwrap();
        assert_eq!(out.allocation.bundle(0), &[0, 1]);
        let w = nash_welfare(&inst, &out.allocation).unwrap();
        assert!((w.linear() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn complementary_agent_gets_both_goods() {
        // v({0}) = v({1}) = 0, v({0,1}) = 5: monotone table honored
        let inst = two_valuable(vec![1], 2, vec![(vec![0, 1], vec![0, 0, 5])]);
        let out = solve_two_valuable(&inst).unwrap();
        assert_eq!(out.allocation.bundle(0), &[0, 1]);
        assert!(!out.zero_optimum);
        let w = nash_welfare(&inst, &out.allocation).unwrap();
        assert!((w.linear() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn contested_good_with_private_fallbacks() {
        // T0 = {0, 1}, T1 = {1, 2}: the matching decides who gets good 1.
        let inst = two_valuable(
            vec![1, 1],
            3,
            vec![(vec![0, 1], vec![3, 1, 4]), (vec![1, 2], vec![2, 2, 4])],
        );
        let out = solve_two_valuable(&inst).unwrap();
        out.allocation.validate(&inst, true).unwrap();
        let got = nash_welfare(&inst, &out.allocation).unwrap();
        let oracle = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
        assert!(got.welfare_eq(&oracle.best_welfare));
    }

    #[test]
    fn n_prime_example_matches_oracle() {
        // T1 = {j1, j2} additive (3, 1), T2 = {j2} value 2, equal weights:
        // optimum j1 -> a1, j2 -> a2 with welfare sqrt(6).
        let inst = two_valuable(
            vec![1, 1],
            2,
            vec![(vec![0, 1], vec![3, 1, 4]), (vec![1], vec![2])],
        );
        let out = solve_two_valuable(&inst).unwrap();
        let got = nash_welfare(&inst, &out.allocation).unwrap();
        assert!((got.linear() - 6f64.sqrt()).abs() < 1e-9);
        let oracle = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
        assert!(got.welfare_eq(&oracle.best_welfare));
    }

    #[test]
    fn reduced_states_are_k22_free_with_degree_invariants() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..80 {
            let n = rng.gen_range(1..=5usize);
            let m = rng.gen_range(1..=6usize);
            let mut tables = Vec::new();
            for _ in 0..n {
                let t = rng.gen_range(1..=2usize).min(m);
                let mut goods: Vec<usize> = (0..m).collect();
                for k in 0..t {
                    let pick = rng.gen_range(k..m);
                    goods.swap(k, pick);
                }
                let mut goods = goods[..t].to_vec();
                goods.sort_unstable();
                if t == 1 {
                    tables.push((goods, vec![rng.gen_range(0..=5i64)]));
                } else {
                    let a = rng.gen_range(0..=5i64);
                    let b = rng.gen_range(0..=5i64);
                    tables.push((goods, vec![a, b, rng.gen_range(a.max(b)..=7i64)]));
                }
            }
            let inst = two_valuable((0..n).map(|_| rng.gen_range(1..=3i64)).collect(), m, tables);
            let state = reduce_instance(&inst).unwrap();
            if state.zero_flag {
                continue;
            }
            assert!(state.is_k22_free());
            for i in state.active_agents() {
                let expected = if state.n_prime[i] { 1 } else { 2 };
                assert_eq!(state.remaining[i].len(), expected);
                assert_eq!(state.bundles[i].len(), if state.n_prime[i] { 1 } else { 0 });
            }
        }
    }

    #[test]
    fn matching_weight_identity_on_reduced_allocations() {
        // For a complete positive-welfare allocation of the reduced
        // instance, the induced edge set is a matching in H with weight
        // |N \ N'| C + Σ η_i ln v_i(x_i) - Σ_{i in N'} η_i ln v_i({g_i}).
        for seed in [3u64, 9, 17, 31, 54] {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..=4usize);
            let m = rng.gen_range(2..=5usize);
            let mut tables = Vec::new();
            for _ in 0..n {
                let t = rng.gen_range(1..=2usize).min(m);
                let mut goods: Vec<usize> = (0..m).collect();
                for k in 0..t {
                    let pick = rng.gen_range(k..m);
                    goods.swap(k, pick);
                }
                let mut goods = goods[..t].to_vec();
                goods.sort_unstable();
                if t == 1 {
                    tables.push((goods, vec![rng.gen_range(1..=5i64)]));
                } else {
                    let a = rng.gen_range(1..=5i64);
                    let b = rng.gen_range(1..=5i64);
                    tables.push((goods, vec![a, b, rng.gen_range(a.max(b)..=7i64)]));
                }
            }
            let inst = two_valuable(
                (0..n).map(|_| rng.gen_range(1..=3i64)).collect(),
                m,
                tables,
            );
            let state = reduce_instance(&inst).unwrap();
            if state.zero_flag || state.active_agents().is_empty() {
                continue;
            }
            let model = build_matching_model(&inst, &state).unwrap();
            let active = model.active.clone();
            let goods = model.remaining_goods.clone();
            let nonprime = active.iter().filter(|&&i| !state.n_prime[i]).count();

            // every assignment of each remaining good to an interested agent
            let mut assignment = vec![0usize; goods.len()];
            'outer: loop {
                // build candidate bundles
                let mut extra: Vec<Vec<usize>> = vec![Vec::new(); inst.agent_count()];
                let mut ok = true;
                for (slot, &g) in goods.iter().enumerate() {
                    let agent = active[assignment[slot] % active.len()];
                    if !state.remaining[agent].contains(&g) {
                        ok = false;
                        break;
                    }
                    extra[agent].push(g);
                }
                if ok {
                    // total bundles and positivity
                    let mut total: Vec<Vec<usize>> = state.bundles.clone();
                    for (i, add) in extra.iter().enumerate() {
                        total[i].extend(add.iter().copied());
                    }
                    let positive = active
                        .iter()
                        .all(|&i| !inst.bundle_value(i, &total[i]).is_zero());
                    if positive {
                        // induced edges: (i, j) for singletons, (j, j') pairs
                        let mut edges: Vec<(usize, usize)> = Vec::new();
                        for &i in &active {
                            match extra[i].len() {
                                0 => {}
                                1 => edges.push((
                                    model.agent_vertex(i).unwrap(),
                                    model.good_vertex(extra[i][0]).unwrap(),
                                )),
                                2 => edges.push((
                                    model.good_vertex(extra[i][0]).unwrap(),
                                    model.good_vertex(extra[i][1]).unwrap(),
                                )),
                                _ => unreachable!("at most two valued goods"),
                            }
                        }
                        // it is a matching
                        let mut seen = std::collections::HashSet::new();
                        for &(a, b) in &edges {
                            assert!(seen.insert(a) && seen.insert(b), "seed {seed}");
                        }
                        // weight identity
                        let total_weight: f64 = edges
                            .iter()
                            .map(|&(a, b)| rat_to_f64(model.edge_weight(a, b).expect("edge exists")))
                            .sum();
                        let mut expected = nonprime as f64 * model.c;
                        for &i in &active {
                            let eta = rat_to_f64(&inst.weights()[i]);
                            expected += eta * ln_rat(&inst.bundle_value(i, &total[i]));
                            if state.n_prime[i] {
                                expected -= eta * ln_rat(&inst.bundle_value(i, &state.bundles[i]));
                            }
                        }
                        assert!(
                            (total_weight - expected).abs() < 1e-9,
                            "seed {seed}: weight {total_weight} vs expected {expected}"
                        );
                    }
                }
                // advance the mixed-radix assignment
                for digit in assignment.iter_mut() {
                    *digit += 1;
                    if *digit < active.len() {
                        continue 'outer;
                    }
                    *digit = 0;
                }
                break;
            }
        }
    }

    #[test]
    fn fuzzed_instances_match_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for round in 0..150 {
            let n = rng.gen_range(1..=4usize);
            let m = rng.gen_range(1..=5usize);
            let mut tables = Vec::new();
            for _ in 0..n {
                let t = rng.gen_range(1..=2usize).min(m);
                let mut goods: Vec<usize> = (0..m).collect();
                for k in 0..t {
                    let pick = rng.gen_range(k..m);
                    goods.swap(k, pick);
                }
                let mut goods: Vec<usize> = goods[..t].to_vec();
                goods.sort_unstable();
                if t == 1 {
                    tables.push((goods, vec![rng.gen_range(0..=6i64)]));
                } else {
                    let a = rng.gen_range(0..=6i64);
                    let b = rng.gen_range(0..=6i64);
                    let both = rng.gen_range(a.max(b)..=8i64);
                    tables.push((goods, vec![a, b, both]));
                }
            }
            let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4i64)).collect();
            let inst = two_valuable(weights, m, tables);
            let out = solve_two_valuable(&inst).unwrap();
            out.allocation.validate(&inst, true).unwrap();
            let got = nash_welfare(&inst, &out.allocation).unwrap();
            let oracle = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
            assert!(
                got.welfare_eq(&oracle.best_welfare),
                "round {round}: got {} vs oracle {}",
                got.log_value(),
                oracle.best_welfare.log_value()
            );
            assert_eq!(out.zero_optimum, oracle.best_welfare.is_zero(), "round {round}");
        }
    }
}
