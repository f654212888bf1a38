//! Exhaustive exact optimizer for small instances.
//!
//! Sweeps every one of the `n^m` complete allocations with a mixed-radix
//! counter over goods (good j's digit is the receiving agent, good 0 most
//! significant), so ties resolve to the lexicographically smallest
//! assignment vector. A fast log-domain pass locates the maximum; exact
//! rational comparison then decides among near-tied candidates.

use num_traits::Zero;

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::{rat_to_f64, Rat};
use crate::welfare::{nash_welfare_of_utilities, p_mean_of_utilities, PExponent, WelfareValue};

pub const DEFAULT_ORACLE_CAP: u128 = 10_000_000;

#[derive(Debug, Clone)]
pub enum Objective {
    Nash,
    PMean(PExponent),
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_allocation: Allocation,
    pub best_welfare: WelfareValue,
    /// Number of allocations visited; `n^m` for a complete sweep.
    pub enumerated: u128,
}

pub fn brute_force_optimum(
    instance: &Instance,
    objective: &Objective,
    cap: Option<u128>,
) -> Result<OracleResult> {
    let cap = cap.unwrap_or(DEFAULT_ORACLE_CAP);
    let n = instance.agent_count();
    let m = instance.good_count();
    if let Objective::PMean(p) = objective {
        if !matches!(p, PExponent::Zero) && !instance.symmetric_weights() {
            return Err(Error::Unsupported(
                "p-mean welfare with p != 0 requires symmetric weights".to_string(),
            ));
        }
    }
    let total = (n as u128)
        .checked_pow(m as u32)
        .ok_or(Error::Budget {
            required: u128::MAX,
            cap,
        })?;
    if total > cap {
        return Err(Error::Budget {
            required: total,
            cap,
        });
    }

    let sweep = Sweep::new(instance, objective);

    // Pass 1: log-domain maximum.
    let mut best_log = f64::NEG_INFINITY;
    let mut any_nonzero = false;
    let mut assignment = vec![0usize; m];
    loop {
        let (zero, log) = sweep.evaluate_f64(&assignment);
        if !zero {
            any_nonzero = true;
            if log > best_log {
                best_log = log;
            }
        }
        if !next_assignment(&mut assignment, n) {
            break;
        }
    }

    if !any_nonzero {
        // Optimum welfare is zero; the first assignment vector is the
        // lexicographically smallest representative.
        let alloc = Allocation::from_assignment(n, &vec![0usize; m]);
        return Ok(OracleResult {
            best_allocation: alloc,
            best_welfare: WelfareValue::zero(),
            enumerated: total,
        });
    }

    // Pass 2: exact comparison among near-tied candidates, in lexicographic
    // order so the first strict maximum wins.
    let threshold = best_log - 1e-9 * best_log.abs().max(1.0);
    let mut best: Option<(Vec<usize>, WelfareValue)> = None;
    let mut assignment = vec![0usize; m];
    loop {
        let (zero, log) = sweep.evaluate_f64(&assignment);
        if !zero && log >= threshold {
            let exact = sweep.evaluate_exact(&assignment);
            match &best {
                Some((_, incumbent)) if exact.cmp_welfare(incumbent) != std::cmp::Ordering::Greater => {}
                _ => best = Some((assignment.clone(), exact)),
            }
        }
        if !next_assignment(&mut assignment, n) {
            break;
        }
    }

    let (vector, welfare) = best.expect("nonzero optimum implies a candidate");
    Ok(OracleResult {
        best_allocation: Allocation::from_assignment(n, &vector),
        best_welfare: welfare,
        enumerated: total,
    })
}

/// Advances the assignment vector in lexicographic order (last digit
/// fastest). Returns false after the final vector.
fn next_assignment(assignment: &mut [usize], n: usize) -> bool {
    for digit in assignment.iter_mut().rev() {
        *digit += 1;
        if *digit < n {
            return true;
        }
        *digit = 0;
    }
    false
}

struct Sweep<'a> {
    instance: &'a Instance,
    objective: &'a Objective,
    weights_f64: Vec<f64>,
    weight_total_f64: f64,
    values_f64: Vec<Vec<f64>>,
}

impl<'a> Sweep<'a> {
    fn new(instance: &'a Instance, objective: &'a Objective) -> Self {
        let weights_f64: Vec<f64> = instance.weights().iter().map(rat_to_f64).collect();
        let weight_total_f64 = weights_f64.iter().sum();
        let n = instance.agent_count();
        let m = instance.good_count();
        let values_f64 = (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| rat_to_f64(&instance.good_value(i, j)))
                    .collect()
            })
            .collect();
        Sweep {
            instance,
            objective,
            weights_f64,
            weight_total_f64,
            values_f64,
        }
    }

    fn exact_utilities(&self, assignment: &[usize]) -> Vec<Rat> {
        let alloc = Allocation::from_assignment(self.instance.agent_count(), assignment);
        alloc.utilities(self.instance)
    }

    fn f64_utilities(&self, assignment: &[usize]) -> Vec<f64> {
        match self.instance.profile() {
            crate::instance::Profile::TwoValuable { .. } => self
                .exact_utilities(assignment)
                .iter()
                .map(rat_to_f64)
                .collect(),
            _ => {
                let mut utilities = vec![0.0f64; self.instance.agent_count()];
                for (good, &agent) in assignment.iter().enumerate() {
                    utilities[agent] += self.values_f64[agent][good];
                }
                utilities
            }
        }
    }

    /// (is_zero, log objective value).
    fn evaluate_f64(&self, assignment: &[usize]) -> (bool, f64) {
        let utilities = self.f64_utilities(assignment);
        match self.objective {
            Objective::Nash | Objective::PMean(PExponent::Zero) => {
                if utilities.iter().any(|&u| u <= 0.0) {
                    return (true, f64::NEG_INFINITY);
                }
                let log = utilities
                    .iter()
                    .zip(&self.weights_f64)
                    .map(|(u, w)| w * u.ln())
                    .sum::<f64>()
                    / self.weight_total_f64;
                (false, log)
            }
            Objective::PMean(PExponent::MinusInfinity) => {
                let min = utilities.iter().cloned().fold(f64::INFINITY, f64::min);
                if min <= 0.0 {
                    (true, f64::NEG_INFINITY)
                } else {
                    (false, min.ln())
                }
            }
            Objective::PMean(PExponent::Finite(p)) => {
                let pf = rat_to_f64(p);
                if pf < 0.0 && utilities.iter().any(|&u| u <= 0.0) {
                    return (true, f64::NEG_INFINITY);
                }
                let sum: f64 = utilities
                    .iter()
                    .filter(|&&u| u > 0.0)
                    .map(|&u| (pf * u.ln()).exp())
                    .sum();
                if sum <= 0.0 {
                    (true, f64::NEG_INFINITY)
                } else {
                    (false, (sum / utilities.len() as f64).ln() / pf)
                }
            }
        }
    }

    fn evaluate_exact(&self, assignment: &[usize]) -> WelfareValue {
        let utilities = self.exact_utilities(assignment);
        match self.objective {
            Objective::Nash => nash_welfare_of_utilities(self.instance.weights(), &utilities),
            Objective::PMean(p) => {
                if matches!(p, PExponent::Zero) {
                    nash_welfare_of_utilities(self.instance.weights(), &utilities)
                } else {
                    p_mean_of_utilities(&utilities, p)
                }
            }
        }
    }
}

/// Test-support sweep: every complete allocation together with its welfare.
/// Quadratic in the search space; intended for tiny instances in tests.
pub fn enumerate_all(
    instance: &Instance,
    objective: &Objective,
) -> Vec<(Allocation, WelfareValue)> {
    let n = instance.agent_count();
    let m = instance.good_count();
    let sweep = Sweep::new(instance, objective);
    let mut out = Vec::new();
    let mut assignment = vec![0usize; m];
    loop {
        let welfare = sweep.evaluate_exact(&assignment);
        out.push((Allocation::from_assignment(n, &assignment), welfare));
        if !next_assignment(&mut assignment, n) {
            break;
        }
    }
    out
}

#[allow(dead_code)]
fn is_zero_rat(r: &Rat) -> bool {
    r.is_zero()
}
