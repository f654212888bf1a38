//! Seeded fuzzing with fractional values and weights: the exact solvers
//! must still match the oracle, and the approximation bounds must hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nash_welfare::gen::{generate, GenConfig, Kind};
use nash_welfare::instance::{Instance, Profile, TwoTable};
use nash_welfare::kary::kary_solve;
use nash_welfare::oracle::{brute_force_optimum, Objective};
use nash_welfare::ptas::{ptas_solve_with_params, PtasParams};
use nash_welfare::rat::{rat_frac, Rat};
use nash_welfare::two_valuable::solve_two_valuable;
use nash_welfare::welfare::nash_welfare;

fn frac(rng: &mut ChaCha8Rng, max_num: i64) -> Rat {
    rat_frac(rng.gen_range(0..=max_num), rng.gen_range(1..=4))
}

fn positive_frac(rng: &mut ChaCha8Rng, max_num: i64) -> Rat {
    rat_frac(rng.gen_range(1..=max_num), rng.gen_range(1..=4))
}

#[test]
fn kary_matches_oracle_on_fractional_instances() {
    for seed in 0..120u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=6usize);
        let k = rng.gen_range(1..=3usize);
        let pool: Vec<Rat> = (0..k).map(|_| frac(&mut rng, 9)).collect();
        let values: Vec<Rat> = (0..m).map(|_| pool[rng.gen_range(0..k)].clone()).collect();
        let weights: Vec<Rat> = (0..n).map(|_| positive_frac(&mut rng, 5)).collect();
        let inst = Instance::new(weights, Profile::Identical(values)).unwrap();
        let out = kary_solve(&inst).unwrap();
        out.allocation.validate(&inst, true).unwrap();
        let got = nash_welfare(&inst, &out.allocation).unwrap();
        let oracle = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
        assert!(
            got.welfare_eq(&oracle.best_welfare),
            "seed {seed}: {} vs {}",
            got.log_value(),
            oracle.best_welfare.log_value()
        );
    }
}

#[test]
fn two_valuable_matches_oracle_on_fractional_instances() {
    for seed in 0..150u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d);
        let n = rng.gen_range(1..=4usize);
        let m = rng.gen_range(1..=5usize);
        let mut tables = Vec::new();
        for _ in 0..n {
            let t = rng.gen_range(1..=2usize).min(m);
            let mut ids: Vec<usize> = (0..m).collect();
            for slot in 0..t {
                let pick = rng.gen_range(slot..m);
                ids.swap(slot, pick);
            }
            let mut goods = ids[..t].to_vec();
            goods.sort_unstable();
            // values below 1 are common here, stressing the class constant
            let values = if t == 1 {
                vec![frac(&mut rng, 4)]
            } else {
                let a = frac(&mut rng, 4);
                let b = frac(&mut rng, 4);
                let both = a.clone().max(b.clone()) + frac(&mut rng, 3);
                vec![a, b, both]
            };
            tables.push(TwoTable::new(goods, values).unwrap());
        }
        let weights: Vec<Rat> = (0..n).map(|_| positive_frac(&mut rng, 4)).collect();
        let inst = Instance::new(weights, Profile::TwoValuable { tables, goods: m }).unwrap();
        let out = solve_two_valuable(&inst).unwrap();
        out.allocation.validate(&inst, true).unwrap();
        let got = nash_welfare(&inst, &out.allocation).unwrap();
        let oracle = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
        assert!(
            got.welfare_eq(&oracle.best_welfare),
            "seed {seed}: {} vs {}",
            got.log_value(),
            oracle.best_welfare.log_value()
        );
        assert_eq!(out.zero_optimum, oracle.best_welfare.is_zero(), "seed {seed}");
    }
}

#[test]
fn ptas_bound_holds_on_fractional_instances() {
    let params = PtasParams::new(12).unwrap();
    for seed in 0..80u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xcafe);
        let n = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=5usize);
        let values: Vec<Rat> = (0..m).map(|_| frac(&mut rng, 12)).collect();
        let weights: Vec<Rat> = (0..n).map(|_| positive_frac(&mut rng, 5)).collect();
        let inst = Instance::new(weights, Profile::Identical(values)).unwrap();
        let (out, _) = ptas_solve_with_params(&inst, &params).unwrap();
        out.allocation.validate(&inst, true).unwrap();
        let got = nash_welfare(&inst, &out.allocation).unwrap();
        let oracle = brute_force_optimum(&inst, &Objective::Nash, None).unwrap();
        assert!(
            got.at_least_fraction_of(0.2, &oracle.best_welfare),
            "seed {seed}: {} vs {}",
            got.log_value(),
            oracle.best_welfare.log_value()
        );
    }
}

#[test]
fn repair_stays_sound_on_generated_asymmetric_instances() {
    use nash_welfare::envy::wwef1_violations;
    use nash_welfare::repair::wwef1_repair;
    for seed in 200..280u64 {
        let inst = generate(&GenConfig {
            kind: Kind::Identical,
            agents: 2 + (seed % 4) as usize,
            goods: 1 + (seed % 9) as usize,
            seed,
            value_max: 20,
            k: 2,
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = inst.agent_count();
        let assignment: Vec<usize> = (0..inst.good_count()).map(|_| rng.gen_range(0..n)).collect();
        let start = nash_welfare::Allocation::from_assignment(n, &assignment);
        let before = nash_welfare(&inst, &start).unwrap();
        let (out, log) = wwef1_repair(&inst, &start).unwrap();
        assert!(wwef1_violations(&inst, &out).unwrap().is_empty(), "seed {seed}");
        let after = nash_welfare(&inst, &out).unwrap();
        assert!(
            after.cmp_welfare(&before) != std::cmp::Ordering::Less,
            "seed {seed}"
        );
        assert!(log.len() as u64 <= 4 * n as u64 * inst.good_count() as u64);
    }
}
