//! Welfare values and the Nash / p-mean objectives.
//!
//! A welfare value is carried in log domain together with an explicit zero
//! flag so products of powers neither overflow nor lose the zero case. When
//! an exact representation `base^(1/root)` is available, comparisons whose
//! log gap falls below `LOG_TOLERANCE` fall back to exact rational
//! arithmetic, which prevents ties from being misordered.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::{denominator_lcm, ln_rat, pow_rat, rat_int, rat_one, rat_to_f64, rat_zero, Rat};

/// Relative tolerance below which log-domain comparisons defer to the exact
/// rational fallback.
pub const LOG_TOLERANCE: f64 = 1e-12;

/// Exact form of a nonzero welfare value: `base^(1/root)` with `base > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRoot {
    pub base: Rat,
    pub root: u64,
}

#[derive(Debug, Clone)]
pub struct WelfareValue {
    zero: bool,
    log_value: f64,
    exact: Option<ExactRoot>,
}

impl WelfareValue {
    pub fn zero() -> Self {
        WelfareValue {
            zero: true,
            log_value: f64::NEG_INFINITY,
            exact: None,
        }
    }

    pub fn from_log(log_value: f64) -> Self {
        WelfareValue {
            zero: false,
            log_value,
            exact: None,
        }
    }

    pub fn from_exact(base: Rat, root: u64) -> Self {
        debug_assert!(base.is_positive() && root > 0);
        WelfareValue {
            zero: false,
            log_value: ln_rat(&base) / root as f64,
            exact: Some(ExactRoot { base, root }),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Natural log of the welfare; `-inf` for the zero value.
    pub fn log_value(&self) -> f64 {
        self.log_value
    }

    /// Linear value when it fits in an f64.
    pub fn linear(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.log_value.exp()
        }
    }

    pub fn exact(&self) -> Option<&ExactRoot> {
        self.exact.as_ref()
    }

    /// Total order: zero below everything else, then log order with an exact
    /// rational fallback for near-ties.
    pub fn cmp_welfare(&self, other: &WelfareValue) -> Ordering {
        match (self.zero, other.zero) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (false, false) => {}
        }
        let la = self.log_value;
        let lb = other.log_value;
        let scale = la.abs().max(lb.abs()).max(1.0);
        if (la - lb).abs() > LOG_TOLERANCE * scale {
            return la.partial_cmp(&lb).unwrap_or(Ordering::Equal);
        }
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return cmp_exact_roots(a, b);
        }
        la.total_cmp(&lb)
    }

    pub fn welfare_eq(&self, other: &WelfareValue) -> bool {
        self.cmp_welfare(other) == Ordering::Equal
    }

    /// `self >= factor * other` (log-domain check with a small slack).
    pub fn at_least_fraction_of(&self, factor: f64, other: &WelfareValue) -> bool {
        if other.zero {
            return true;
        }
        if self.zero {
            return factor <= 0.0;
        }
        self.log_value + 1e-9 >= factor.ln() + other.log_value
    }
}

fn cmp_exact_roots(a: &ExactRoot, b: &ExactRoot) -> Ordering {
    if a.root == b.root {
        return a.base.cmp(&b.base);
    }
    // a^(1/ra) vs b^(1/rb)  <=>  a^rb vs b^ra  (all positive)
    let lhs = pow_rat(&a.base, u32::try_from(b.root).expect("root fits u32"));
    let rhs = pow_rat(&b.base, u32::try_from(a.root).expect("root fits u32"));
    lhs.cmp(&rhs)
}

/// Per-agent integer exponents `η_i · L` with `L` the lcm of weight
/// denominators, plus their sum. Shared by welfare evaluation and by solvers
/// that compare welfare products exactly.
pub fn integer_exponents(weights: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let lcm = denominator_lcm(weights);
    let exps: Vec<BigInt> = weights
        .iter()
        .map(|w| {
            let scaled = w * Rat::from_integer(lcm.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer()
        })
        .collect();
    let total = exps.iter().sum();
    (exps, total)
}

fn exponent_u32(e: &BigInt) -> Option<u32> {
    e.to_u32()
}

/// Weighted geometric mean of utilities: `(Π v_i^{η_i})^{1/Ση_i}`.
///
/// The allocation must be complete and disjoint. The result is zero iff some
/// agent has utility zero.
pub fn nash_welfare(instance: &Instance, allocation: &Allocation) -> Result<WelfareValue> {
    allocation.validate(instance, true)?;
    let utilities = allocation.utilities(instance);
    Ok(nash_welfare_of_utilities(instance.weights(), &utilities))
}

/// Nash welfare of explicit utilities (used by solvers on intermediate data).
pub fn nash_welfare_of_utilities(weights: &[Rat], utilities: &[Rat]) -> WelfareValue {
    debug_assert_eq!(weights.len(), utilities.len());
    if utilities.iter().any(|u| u.is_zero()) {
        return WelfareValue::zero();
    }
    let (exps, total) = integer_exponents(weights);
    let total_f = total.to_f64().unwrap_or(f64::INFINITY);
    let mut log_sum = 0.0;
    let mut product = rat_one();
    let mut exact_ok = true;
    for (u, e) in utilities.iter().zip(&exps) {
        let e_f = e.to_f64().unwrap_or(f64::INFINITY);
        log_sum += e_f * ln_rat(u);
        match exponent_u32(e) {
            Some(e32) if exact_ok => product *= pow_rat(u, e32),
            _ => exact_ok = false,
        }
    }
    let log_value = log_sum / total_f;
    match (exact_ok, total.to_u64()) {
        (true, Some(root)) => WelfareValue::from_exact(product, root),
        _ => WelfareValue::from_log(log_value),
    }
}

/// The p of a p-mean objective. `Zero` is the Nash welfare limit and
/// `MinusInfinity` the egalitarian (minimum utility) limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PExponent {
    MinusInfinity,
    Zero,
    Finite(Rat),
}

impl PExponent {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("-inf") || t.eq_ignore_ascii_case("-infinity") {
            return Ok(PExponent::MinusInfinity);
        }
        let p = crate::rat::parse_rational(t)
            .ok_or_else(|| Error::InvalidParameter(format!("cannot parse p value '{text}'")))?;
        if p.is_zero() {
            Ok(PExponent::Zero)
        } else {
            Ok(PExponent::Finite(p))
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PExponent::MinusInfinity => "-inf".to_string(),
            PExponent::Zero => "0".to_string(),
            PExponent::Finite(p) => crate::rat::format_rational(p),
        }
    }
}

/// `((1/n) Σ v_i(x_i)^p)^{1/p}`, with `p = 0` delegating to Nash welfare and
/// `p = -inf` the minimum utility. Symmetric weights are required when
/// `p != 0`.
pub fn p_mean_welfare(
    instance: &Instance,
    allocation: &Allocation,
    p: &PExponent,
) -> Result<WelfareValue> {
    if let PExponent::Zero = p {
        return nash_welfare(instance, allocation);
    }
    if !instance.symmetric_weights() {
        return Err(Error::Unsupported(
            "p-mean welfare with p != 0 requires symmetric weights".to_string(),
        ));
    }
    allocation.validate(instance, true)?;
    let utilities = allocation.utilities(instance);
    Ok(p_mean_of_utilities(&utilities, p))
}

/// p-mean of explicit utilities with implicit equal weights.
pub fn p_mean_of_utilities(utilities: &[Rat], p: &PExponent) -> WelfareValue {
    let n = utilities.len();
    match p {
        PExponent::Zero => {
            nash_welfare_of_utilities(&vec![rat_one(); n], utilities)
        }
        PExponent::MinusInfinity => {
            let min = utilities.iter().min().expect("nonempty utilities");
            if min.is_zero() {
                WelfareValue::zero()
            } else {
                WelfareValue::from_exact(min.clone(), 1)
            }
        }
        PExponent::Finite(p) => {
            if p.is_negative() && utilities.iter().any(|u| u.is_zero()) {
                return WelfareValue::zero();
            }
            if p.is_integer() {
                let exp = p.to_integer();
                let mag = exp.magnitude().to_u32();
                if let Some(mag) = mag {
                    let mut sum = rat_zero();
                    for u in utilities {
                        if u.is_zero() {
                            // only reachable for p > 0: contributes 0^p = 0
                            continue;
                        }
                        let term = pow_rat(u, mag);
                        sum += if exp.is_negative() {
                            rat_one() / term
                        } else {
                            term
                        };
                    }
                    let mean = sum / rat_int(n as i64);
                    if mean.is_zero() {
                        return WelfareValue::zero();
                    }
                    // mean^(1/p): for p < 0 this is (1/mean)^(1/|p|)
                    let base = if exp.is_negative() {
                        rat_one() / mean
                    } else {
                        mean
                    };
                    return WelfareValue::from_exact(base, mag as u64);
                }
            }
            // Non-integer p: log-domain only.
            let pf = rat_to_f64(p);
            let mut sum = 0.0f64;
            for u in utilities {
                if u.is_zero() {
                    continue;
                }
                sum += (pf * ln_rat(u)).exp();
            }
            if sum <= 0.0 {
                return WelfareValue::zero();
            }
            WelfareValue::from_log((sum / n as f64).ln() / pf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Profile;
    use crate::rat::rat_frac;

    fn identical(weights: Vec<Rat>, values: Vec<i64>) -> Instance {
        Instance::new(
            weights,
            Profile::Identical(values.into_iter().map(rat_int).collect()),
        )
        .unwrap()
    }

    #[test]
    fn weighted_geometric_mean_example() {
        // identical u = (2, 1), weights (1, 2), x = ({g2}, {g1}):
        // agent 1 gets good of value 1, agent 2 the good of value 2,
        // welfare (1^1 * 2^2)^(1/3).
        let inst = identical(vec![rat_int(1), rat_int(2)], vec![2, 1]);
        let alloc = Allocation::new(vec![vec![1], vec![0]]);
        let w = nash_welfare(&inst, &alloc).unwrap();
        let expected = 4f64.powf(1.0 / 3.0);
        assert!((w.linear() - expected).abs() < 1e-12);
        assert!((w.linear() - 1.5874).abs() < 1e-4);
        let exact = w.exact().unwrap();
        assert_eq!(exact.base, rat_int(4));
        assert_eq!(exact.root, 3);
    }

    #[test]
    fn zero_utility_annihilates() {
        let inst = identical(vec![rat_int(1), rat_int(1)], vec![1]);
        let alloc = Allocation::new(vec![vec![0], vec![]]);
        let w = nash_welfare(&inst, &alloc).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn all_ones_give_unit_welfare() {
        let inst = identical(vec![rat_int(2), rat_frac(1, 3)], vec![1, 1]);
        let alloc = Allocation::new(vec![vec![0], vec![1]]);
        let w = nash_welfare(&inst, &alloc).unwrap();
        assert!((w.linear() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_allocations_error() {
        let inst = identical(vec![rat_int(1), rat_int(1)], vec![1, 1]);
        let overlap = Allocation::new(vec![vec![0, 1], vec![1]]);
        assert!(matches!(
            nash_welfare(&inst, &overlap),
            Err(Error::InvalidAllocation(_))
        ));
    }

    #[test]
    fn p_mean_examples() {
        // utilities (2, 8)
        let utilities = vec![rat_int(2), rat_int(8)];
        let p1 = p_mean_of_utilities(&utilities, &PExponent::Finite(rat_int(1)));
        assert!((p1.linear() - 5.0).abs() < 1e-12);
        let pinf = p_mean_of_utilities(&utilities, &PExponent::MinusInfinity);
        assert!((pinf.linear() - 2.0).abs() < 1e-12);
        let pm1 = p_mean_of_utilities(&utilities, &PExponent::Finite(rat_int(-1)));
        assert!((pm1.linear() - 3.2).abs() < 1e-12);
        assert_eq!(pm1.exact().unwrap().base, rat_frac(16, 5));
    }

    #[test]
    fn p_mean_rejects_asymmetric_weights() {
        let inst = identical(vec![rat_int(1), rat_int(2)], vec![1, 1]);
        let alloc = Allocation::new(vec![vec![0], vec![1]]);
        assert!(matches!(
            p_mean_welfare(&inst, &alloc, &PExponent::Finite(rat_int(1))),
            Err(Error::Unsupported(_))
        ));
        // p = 0 delegates to Nash welfare and accepts asymmetric weights
        assert!(p_mean_welfare(&inst, &alloc, &PExponent::Zero).is_ok());
    }

    #[test]
    fn negative_p_with_zero_utility_is_zero() {
        let utilities = vec![rat_int(0), rat_int(8)];
        let w = p_mean_of_utilities(&utilities, &PExponent::Finite(rat_int(-1)));
        assert!(w.is_zero());
    }

    #[test]
    fn ordering_uses_exact_fallback_on_ties() {
        let a = WelfareValue::from_exact(rat_frac(1000000000001, 1000000000000), 1);
        let b = WelfareValue::from_exact(rat_int(1), 1);
        // log gap ~1e-12, inside tolerance: the exact fallback must decide.
        assert_eq!(a.cmp_welfare(&b), Ordering::Greater);
        assert_eq!(
            WelfareValue::zero().cmp_welfare(&b),
            Ordering::Less
        );
        assert_eq!(
            WelfareValue::zero().cmp_welfare(&WelfareValue::zero()),
            Ordering::Equal
        );
    }

    #[test]
    fn cross_root_exact_comparison() {
        // 2^(1/2) vs 5^(1/3): compare 2^3 = 8 vs 5^2 = 25.
        let a = WelfareValue::from_exact(rat_int(2), 2);
        let b = WelfareValue::from_exact(rat_int(5), 3);
        assert_eq!(a.cmp_welfare(&b), Ordering::Less);
    }
}
