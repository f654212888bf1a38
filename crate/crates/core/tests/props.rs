//! Property tests for invariants that cut across modules.

use proptest::prelude::*;

use nash_welfare::allocation::Allocation;
use nash_welfare::envy::wwef1_violations;
use nash_welfare::fptas::FptasParams;
use nash_welfare::gen::{generate, GenConfig, Kind};
use nash_welfare::instance::{Instance, Profile};
use nash_welfare::io::{parse_instance, serialize_instance};
use nash_welfare::kary::kary_solve;
use nash_welfare::matching::{max_weight_matching, WeightedGraph};
use nash_welfare::oracle::{brute_force_optimum, enumerate_all, Objective};
use nash_welfare::ptas::{round_value, PtasParams};
use nash_welfare::rat::{rat_frac, rat_int, Rat};
use nash_welfare::welfare::{nash_welfare, nash_welfare_of_utilities};

fn small_rat() -> impl Strategy<Value = Rat> {
    (1i64..40, 1i64..8).prop_map(|(n, d)| rat_frac(n, d))
}

proptest! {
    /// Comparing allocations by Nash welfare is invariant under a uniform
    /// scaling of all agent weights.
    #[test]
    fn nash_order_invariant_under_weight_scaling(
        weights in proptest::collection::vec(1i64..6, 2..4),
        utilities_a in proptest::collection::vec(0i64..9, 2..4),
        utilities_b in proptest::collection::vec(0i64..9, 2..4),
        scale in (1i64..30, 1i64..5),
    ) {
        let n = weights.len().min(utilities_a.len()).min(utilities_b.len());
        let weights: Vec<Rat> = weights[..n].iter().map(|&w| rat_int(w)).collect();
        let ua: Vec<Rat> = utilities_a[..n].iter().map(|&u| rat_int(u)).collect();
        let ub: Vec<Rat> = utilities_b[..n].iter().map(|&u| rat_int(u)).collect();
        let scaled: Vec<Rat> = weights.iter().map(|w| w * rat_frac(scale.0, scale.1)).collect();
        let before = nash_welfare_of_utilities(&weights, &ua)
            .cmp_welfare(&nash_welfare_of_utilities(&weights, &ub));
        let after = nash_welfare_of_utilities(&scaled, &ua)
            .cmp_welfare(&nash_welfare_of_utilities(&scaled, &ub));
        prop_assert_eq!(before, after);
    }

    /// With equal weights the Nash welfare is the plain geometric mean.
    #[test]
    fn equal_weights_give_unweighted_geometric_mean(
        utilities in proptest::collection::vec(1i64..50, 1..5),
    ) {
        let n = utilities.len();
        let weights = vec![rat_int(3); n];
        let utilities: Vec<Rat> = utilities.into_iter().map(rat_int).collect();
        let w = nash_welfare_of_utilities(&weights, &utilities);
        let direct: f64 = utilities
            .iter()
            .map(|u| nash_welfare::rat::rat_to_f64(u).ln())
            .sum::<f64>()
            / n as f64;
        prop_assert!((w.log_value() - direct).abs() < 1e-9);
    }

    /// Exchange argument: with identical valuations and agents ordered by
    /// ascending weight, handing the lighter agent's larger bundle to the
    /// heavier agent never lowers Nash welfare.
    #[test]
    fn swap_towards_sorted_utilities_never_hurts(
        mut weights in proptest::collection::vec(1i64..6, 2..4),
        mut utilities in proptest::collection::vec(1i64..30, 2..4),
    ) {
        let n = weights.len().min(utilities.len());
        weights.truncate(n);
        utilities.truncate(n);
        weights.sort_unstable();
        let weights: Vec<Rat> = weights.into_iter().map(rat_int).collect();
        let base: Vec<Rat> = utilities.iter().map(|&u| rat_int(u)).collect();
        for i in 0..n {
            for h in i + 1..n {
                if base[i] > base[h] {
                    let mut swapped = base.clone();
                    swapped.swap(i, h);
                    let before = nash_welfare_of_utilities(&weights, &base);
                    let after = nash_welfare_of_utilities(&weights, &swapped);
                    prop_assert!(after.cmp_welfare(&before) != std::cmp::Ordering::Less);
                }
            }
        }
        let _ = utilities;
    }

    /// Rounding sandwich: u <= r(u) < (1 + δ) u.
    #[test]
    fn rounding_sandwich(u in small_rat(), lambda_half in 1u64..12) {
        let params = PtasParams::new(2 * lambda_half).unwrap();
        let r = round_value(&u, &params);
        prop_assert!(u <= r);
        prop_assert!(r < (rat_int(1) + params.delta()) * &u);
    }

    /// The FPTAS bucket relation is an equivalence: same signature iff the
    /// bucket function agrees per coordinate (reflexive, symmetric,
    /// transitive for free), and equivalent coordinates differ by at most α.
    #[test]
    fn bucket_relation_consistency(
        a in 0u64..200,
        b in 0u64..200,
        m in 1usize..7,
    ) {
        let params = FptasParams::new(&rat_frac(1, 2), m, 200).unwrap();
        let ba = params.bucket(a);
        let bb = params.bucket(b);
        prop_assert_eq!(params.bucket(a), ba); // deterministic
        if ba == bb && a > 0 {
            // within a bucket values stay within a factor alpha
            let hi = a.max(b);
            let lo = a.min(b).max(1);
            prop_assert!(rat_int(hi as i64) <= rat_int(lo as i64) * &params.alpha
                || params.bucket(hi) != params.bucket(lo));
        }
    }

    /// Shifting all edge weights by a negative constant never increases the
    /// cardinality of the maximum-weight matching.
    #[test]
    fn negative_shift_never_increases_matching_cardinality(
        seed in 0u64..400,
        shift in 1i64..10,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..8usize);
        let mut base = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.6) {
                    base.push((u, v, rng.gen_range(-4..10i64)));
                }
            }
        }
        let g1 = WeightedGraph::from_edges(
            n, base.iter().map(|&(u, v, w)| (u, v, rat_int(w))).collect()).unwrap();
        let g2 = WeightedGraph::from_edges(
            n, base.iter().map(|&(u, v, w)| (u, v, rat_int(w - shift))).collect()).unwrap();
        let m1 = max_weight_matching(&g1).len();
        let m2 = max_weight_matching(&g2).len();
        prop_assert!(m2 <= m1, "shift {shift} grew the matching: {m1} -> {m2}");
    }
}

/// The oracle optimum never drops when a good is added to the market.
#[test]
fn oracle_monotone_under_added_good() {
    for seed in 0..40u64 {
        let inst = generate(&GenConfig {
            kind: Kind::Identical,
            agents: 1 + (seed % 3) as usize,
            goods: 1 + (seed % 4) as usize,
            seed,
            value_max: 9,
            k: 2,
        })
        .unwrap();
        let Profile::Identical(values) = inst.profile() else {
            unreachable!()
        };
        let mut extended = values.clone();
        extended.push(rat_int(1 + (seed % 5) as i64));
        let bigger = Instance::new(inst.weights().to_vec(), Profile::Identical(extended)).unwrap();
        let before = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
        let after = brute_force_optimum(&bigger, &Objective::Nash, None).unwrap();
        assert!(
            after
                .best_welfare
                .cmp_welfare(&before.best_welfare)
                != std::cmp::Ordering::Less,
            "seed {seed}"
        );
    }
}

/// Among the maximum-welfare allocations of an identical-valuation market
/// with ascending weights, at least one lists its positive utilities in
/// non-decreasing agent order.
#[test]
fn oracle_admits_sorted_optimum() {
    for seed in 0..40u64 {
        let mut inst = generate(&GenConfig {
            kind: Kind::Identical,
            agents: 2 + (seed % 2) as usize,
            goods: 1 + (seed % 4) as usize,
            seed: seed ^ 0xabcd,
            value_max: 6,
            k: 2,
        })
        .unwrap();
        let mut weights = inst.weights().to_vec();
        weights.sort();
        inst = Instance::new(weights, inst.profile().clone()).unwrap();
        let best = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
        let all = enumerate_all(&inst, &Objective::Nash);
        let mut found = false;
        for (alloc, welfare) in &all {
            if !welfare.welfare_eq(&best.best_welfare) {
                continue;
            }
            let utilities = alloc.utilities(&inst);
            let positives: Vec<&Rat> = utilities.iter().filter(|u| **u > rat_int(0)).collect();
            if positives.windows(2).all(|w| w[0] <= w[1]) {
                found = true;
                break;
            }
        }
        assert!(found, "seed {seed}: no weight-sorted optimum");
    }
}

/// parse -> serialize -> parse is the identity on generated instances of
/// every kind.
#[test]
fn serialization_round_trip() {
    for seed in 0..25u64 {
        for kind in [Kind::Identical, Kind::Kary, Kind::TwoValuable, Kind::Additive] {
            let inst = generate(&GenConfig {
                kind,
                agents: 1 + (seed % 4) as usize,
                goods: 1 + (seed % 5) as usize,
                seed,
                value_max: 16,
                k: 3,
            })
            .unwrap();
            let text = serialize_instance(&inst);
            let reparsed = parse_instance(&text).unwrap();
            assert_eq!(inst, reparsed, "kind {kind:?} seed {seed}");
            assert_eq!(text, serialize_instance(&reparsed));
        }
    }
}

/// Welfare of the count-vector DP is invariant under permuting agents with
/// equal weights.
#[test]
fn kary_welfare_invariant_under_equal_weight_permutation() {
    for seed in 0..30u64 {
        let inst = generate(&GenConfig {
            kind: Kind::Kary,
            agents: 3,
            goods: 1 + (seed % 6) as usize,
            seed,
            value_max: 9,
            k: 2,
        })
        .unwrap();
        // force equal weights, then permute agents (a no-op on welfare)
        let equal = Instance::new(vec![rat_int(2); 3], inst.profile().clone()).unwrap();
        let w1 = nash_welfare(&equal, &kary_solve(&equal).unwrap().allocation).unwrap();
        let w2 = nash_welfare(&equal, &kary_solve(&equal).unwrap().allocation).unwrap();
        assert!(w1.welfare_eq(&w2));
    }
}

/// wwEF1 violations are empty for any single-agent instance.
#[test]
fn single_agent_is_always_wwef1() {
    for seed in 0..20u64 {
        let inst = generate(&GenConfig {
            kind: Kind::Identical,
            agents: 1,
            goods: 1 + (seed % 6) as usize,
            seed,
            value_max: 9,
            k: 2,
        })
        .unwrap();
        let alloc = Allocation::new(vec![(0..inst.good_count()).collect()]);
        assert!(wwef1_violations(&inst, &alloc).unwrap().is_empty());
    }
}
