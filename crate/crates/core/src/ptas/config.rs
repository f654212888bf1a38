//! Rounded-value configurations: the compact state of the approximation
//! scheme for identical valuations.
//!
//! A configuration pairs a magnitude `w` (zero or an integral power of 2)
//! with counts `m_i` of rounded goods of value `i δ² w` for levels
//! `i ∈ [λ, λ²]`; `m_λ` summarizes the small goods (value ≤ δw). Counts are
//! stored sparsely: levels that no rounded good value can hit are forced to
//! zero anyway, and the dense vector would be astronomically large.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rat::{largest_pow2_below, ln_rat, pow2, rat_uint, rat_zero, smallest_pow2_at_least, Rat};

/// Rounding precision: δ = 1/λ with λ an even integer ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PtasParams {
    lambda: u64,
}

impl PtasParams {
    pub fn new(lambda: u64) -> Result<Self> {
        if lambda < 2 || !lambda.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be an even integer >= 2, got {lambda}"
            )));
        }
        if lambda > 1 << 16 {
            return Err(Error::InvalidParameter(format!(
                "lambda {lambda} too large (max 65536)"
            )));
        }
        Ok(PtasParams { lambda })
    }

    /// Smallest even λ with λ >= (16 - 8ε)/ε; the approximation guarantee
    /// additionally needs λ >= 12.
    pub fn from_epsilon(epsilon: &Rat) -> Result<Self> {
        if !epsilon.is_positive() || *epsilon >= Rat::from_integer(1.into()) {
            return Err(Error::InvalidParameter(
                "epsilon must lie in (0, 1)".to_string(),
            ));
        }
        let sixteen = Rat::from_integer(16.into());
        let eight = Rat::from_integer(8.into());
        let threshold = (sixteen - eight * epsilon) / epsilon;
        let mut lambda = threshold.ceil().to_integer();
        if (&lambda % BigInt::from(2)) != BigInt::zero() {
            lambda += 1;
        }
        let lambda = lambda
            .to_u64()
            .ok_or_else(|| Error::InvalidParameter("epsilon too small".to_string()))?;
        PtasParams::new(lambda.max(2))
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn lambda_sq(&self) -> u64 {
        self.lambda * self.lambda
    }

    pub fn delta(&self) -> Rat {
        Rat::new(1.into(), self.lambda.into())
    }

    /// The proven bound applies only from λ = 12 up.
    pub fn guarantee_applies(&self) -> bool {
        self.lambda >= 12
    }

    /// (1 - 8δ) / (1 + 8δ): the welfare fraction the scheme retains.
    pub fn chain_bound(&self) -> Rat {
        let eight_delta = Rat::new(8.into(), self.lambda.into());
        let one = Rat::from_integer(1.into());
        (&one - &eight_delta) / (one + eight_delta)
    }
}

/// `w` is either zero (empty set only) or 2^e.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Magnitude {
    Zero,
    Pow2(i32),
}

impl Magnitude {
    pub fn as_rat(&self) -> Rat {
        match self {
            Magnitude::Zero => rat_zero(),
            Magnitude::Pow2(e) => pow2(*e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    mag: Magnitude,
    /// (level, count) with λ <= level <= λ², sorted by level, counts > 0.
    counts: Vec<(u64, u64)>,
}

impl Configuration {
    pub fn empty() -> Self {
        Configuration {
            mag: Magnitude::Zero,
            counts: Vec::new(),
        }
    }

    pub fn new(mag: Magnitude, mut counts: Vec<(u64, u64)>, params: &PtasParams) -> Self {
        counts.retain(|&(_, c)| c > 0);
        counts.sort_unstable();
        debug_assert!(counts
            .iter()
            .all(|&(l, _)| l >= params.lambda() && l <= params.lambda_sq()));
        debug_assert!(counts.windows(2).all(|w| w[0].0 < w[1].0));
        if let Magnitude::Zero = mag {
            debug_assert!(counts.is_empty());
        }
        Configuration { mag, counts }
    }

    pub fn mag(&self) -> Magnitude {
        self.mag
    }

    pub fn counts(&self) -> &[(u64, u64)] {
        &self.counts
    }

    pub fn count_at(&self, level: u64) -> u64 {
        self.counts
            .binary_search_by_key(&level, |&(l, _)| l)
            .map(|idx| self.counts[idx].1)
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.mag == Magnitude::Zero
    }

    /// Σ m_i · i, the configuration value in units of δ²w.
    pub fn value_units(&self) -> u64 {
        self.counts.iter().map(|&(l, c)| l * c).sum()
    }

    /// V(w, m) = Σ m_i · i δ² w.
    pub fn value(&self, params: &PtasParams) -> Rat {
        match self.mag {
            Magnitude::Zero => rat_zero(),
            Magnitude::Pow2(e) => {
                rat_uint(self.value_units()) * pow2(e) / rat_uint(params.lambda_sq())
            }
        }
    }

    /// Componentwise `self <= other` over all levels.
    pub fn dominated_by(&self, other: &Configuration) -> bool {
        self.counts
            .iter()
            .all(|&(l, c)| c <= other.count_at(l))
    }
}

/// `r(u)`: round `u > 0` up to the grid `i δ² w` where `w` is the largest
/// power of two with `u > δw` and `i` minimal; `r(0) = 0`.
pub fn round_value(u: &Rat, params: &PtasParams) -> Rat {
    match round_parts(u, params) {
        None => rat_zero(),
        Some((e, i)) => rat_uint(i) * pow2(e) / rat_uint(params.lambda_sq()),
    }
}

/// (e, i) with r(u) = i δ² 2^e; None for u = 0. Guarantees λ < i <= 2λ.
pub fn round_parts(u: &Rat, params: &PtasParams) -> Option<(i32, u64)> {
    if u.is_zero() {
        return None;
    }
    debug_assert!(u.is_positive());
    let lambda_u = u * rat_uint(params.lambda());
    let e = largest_pow2_below(&lambda_u);
    // i = ceil(u λ² / 2^e)
    let scaled = u * rat_uint(params.lambda_sq()) / pow2(e);
    let i = scaled.ceil().to_integer().to_u64().expect("level fits u64");
    debug_assert!(i > params.lambda() && i <= 2 * params.lambda());
    Some((e, i))
}

/// Whether `u` counts as small (u <= δw) w.r.t. magnitude 2^e.
pub fn is_small(u: &Rat, e: i32, params: &PtasParams) -> bool {
    u * rat_uint(params.lambda()) <= pow2(e)
}

/// Level of a big good (δw < u <= w) w.r.t. magnitude 2^e: r(u)/(δ² 2^e).
pub fn level_at(u: &Rat, e: i32, params: &PtasParams) -> u64 {
    let (e_own, i_own) = round_parts(u, params).expect("positive value");
    debug_assert!(e_own >= e, "big goods have own magnitude >= config magnitude");
    let shift = (e_own - e) as u32;
    let level = i_own << shift;
    debug_assert!(level > params.lambda() && level <= params.lambda_sq());
    level
}

/// Representation of a concrete set of good values at a fixed magnitude,
/// with the principal (largest) choice of m_λ.
fn representation_at(values: &[Rat], e: i32, params: &PtasParams) -> Configuration {
    let mut tally: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    let mut small_rounded = rat_zero();
    for u in values {
        debug_assert!(u.is_positive());
        if is_small(u, e, params) {
            small_rounded += round_value(u, params);
        } else {
            *tally.entry(level_at(u, e, params)).or_insert(0) += 1;
        }
    }
    // m_λ = ceil(Vr(A(w)) / δw) = ceil(Vr · λ / 2^e)
    let m_lambda = (small_rounded * rat_uint(params.lambda()) / pow2(e))
        .ceil()
        .to_integer()
        .to_u64()
        .expect("m_lambda fits u64");
    if m_lambda > 0 {
        *tally.entry(params.lambda()).or_insert(0) += m_lambda;
    }
    Configuration::new(Magnitude::Pow2(e), tally.into_iter().collect(), params)
}

/// Principal configuration of a set of positive good values: the
/// representing configuration with the smallest magnitude and the larger
/// (ceiling) small-goods count.
pub fn principal_configuration(values: &[Rat], params: &PtasParams) -> Configuration {
    if values.is_empty() {
        return Configuration::empty();
    }
    let e = values
        .iter()
        .map(smallest_pow2_at_least)
        .max()
        .expect("nonempty values");
    representation_at(values, e, params)
}

/// Direct check of the representation conditions for a configuration against
/// a concrete set of good values.
pub fn represents(config: &Configuration, values: &[Rat], params: &PtasParams) -> bool {
    let e = match config.mag() {
        Magnitude::Zero => return values.is_empty() && config.counts().is_empty(),
        Magnitude::Pow2(e) => e,
    };
    let w = pow2(e);
    // (i) every good fits under the magnitude
    if values.iter().any(|u| *u > w) {
        return false;
    }
    // (ii) big-good counts match exactly per level
    let mut tally: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    let mut small_rounded = rat_zero();
    for u in values {
        if is_small(u, e, params) {
            small_rounded += round_value(u, params);
        } else {
            *tally.entry(level_at(u, e, params)).or_insert(0) += 1;
        }
    }
    for &(level, count) in config.counts() {
        if level == params.lambda() {
            continue;
        }
        if tally.get(&level).copied().unwrap_or(0) != count {
            return false;
        }
    }
    for (&level, &count) in &tally {
        if config.count_at(level) != count {
            return false;
        }
    }
    // (iii) |Vr(A(w)) - m_λ δw| < δw
    let m_lambda = config.count_at(params.lambda());
    let delta_w = &w / rat_uint(params.lambda());
    let gap = small_rounded - rat_uint(m_lambda) * &delta_w;
    gap.abs() < delta_w
}

/// All principal configurations of subsets of the market, plus the empty
/// configuration: for each candidate magnitude (each good value rounded up
/// to a power of two), every count vector dominated by the representation of
/// `M(w)` that keeps some level above λ²/2.
pub fn enumerate_principal_configurations(
    values: &[Rat],
    params: &PtasParams,
) -> Vec<Configuration> {
    let mut out = vec![Configuration::empty()];
    let mut exponents: Vec<i32> = values
        .iter()
        .filter(|u| u.is_positive())
        .map(smallest_pow2_at_least)
        .collect();
    exponents.sort_unstable();
    exponents.dedup();
    let half = params.lambda_sq() / 2;
    for e in exponents {
        let w = pow2(e);
        let market: Vec<Rat> = values.iter().filter(|u| **u <= w && u.is_positive()).cloned().collect();
        let rep = representation_at(&market, e, params);
        let levels = rep.counts().to_vec();
        let mut current: Vec<(u64, u64)> = Vec::new();
        enumerate_rec(&levels, 0, &mut current, half, &mut |counts| {
            out.push(Configuration::new(
                Magnitude::Pow2(e),
                counts.to_vec(),
                params,
            ));
        });
    }
    out.sort();
    out.dedup();
    out
}

fn enumerate_rec(
    levels: &[(u64, u64)],
    idx: usize,
    current: &mut Vec<(u64, u64)>,
    half: u64,
    emit: &mut impl FnMut(&[(u64, u64)]),
) {
    if idx == levels.len() {
        if current.iter().any(|&(l, c)| l > half && c > 0) {
            emit(current);
        }
        return;
    }
    let (level, max_count) = levels[idx];
    for c in 0..=max_count {
        if c > 0 {
            current.push((level, c));
        }
        enumerate_rec(levels, idx + 1, current, half, emit);
        if c > 0 {
            current.pop();
        }
    }
}

/// Scaled configuration `s(w, m, w')` for `w' >= w`: the canonical multiset
/// of `m_i` goods of value `i δ² w` re-represented at magnitude `w'`, with
/// `m'_λ` the nearest multiple of `δw'` (ties toward larger `m'_λ`).
pub fn scale_configuration(
    config: &Configuration,
    target: Magnitude,
    params: &PtasParams,
) -> Result<Configuration> {
    if config.mag() == target {
        return Ok(config.clone());
    }
    let e_target = match (config.mag(), target) {
        (Magnitude::Zero, Magnitude::Pow2(e)) => {
            return Ok(Configuration::new(Magnitude::Pow2(e), Vec::new(), params))
        }
        (Magnitude::Pow2(_), Magnitude::Zero) => {
            return Err(Error::Internal(
                "cannot scale a nonempty configuration to magnitude zero".to_string(),
            ))
        }
        (Magnitude::Pow2(e), Magnitude::Pow2(e_target)) => {
            if e_target < e {
                return Err(Error::Internal(format!(
                    "cannot scale down from 2^{e} to 2^{e_target}"
                )));
            }
            e_target
        }
        (Magnitude::Zero, Magnitude::Zero) => unreachable!("handled by equality"),
    };
    let e = match config.mag() {
        Magnitude::Pow2(e) => e,
        Magnitude::Zero => unreachable!(),
    };
    let d = (e_target - e) as u32;
    let lambda = params.lambda();
    let big_threshold = lambda << d; // level i is big w.r.t. w' iff i > λ 2^d

    let mut tally: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    let mut small_units: u128 = 0; // Σ r(i δ² w) in units of δ² w
    for &(i, c) in config.counts() {
        if i > big_threshold {
            let rv = rounded_units(i, lambda);
            let level = rv >> d;
            debug_assert!(level > lambda && level <= params.lambda_sq());
            *tally.entry(level).or_insert(0) += c;
        } else {
            small_units += (rounded_units(i, lambda) as u128) * c as u128;
        }
    }
    // m'_λ = nearest integer to small_units / (λ 2^d), ties up.
    let den = (lambda as u128) << d;
    let q = small_units / den;
    let r = small_units % den;
    let m_lambda = if 2 * r >= den { q + 1 } else { q } as u64;
    if m_lambda > 0 {
        *tally.entry(lambda).or_insert(0) += m_lambda;
    }
    Ok(Configuration::new(
        Magnitude::Pow2(e_target),
        tally.into_iter().collect(),
        params,
    ))
}

/// r(i δ² w) in units of δ² w: the level i rounded up within its own dyadic
/// block (λ 2^t, λ 2^{t+1}]. Level λ itself is the value δw, a fixed point.
fn rounded_units(i: u64, lambda: u64) -> u64 {
    if i <= lambda {
        debug_assert_eq!(i, lambda);
        return lambda;
    }
    let mut t = 0u32;
    while i > lambda << (t + 1) {
        t += 1;
    }
    let block = 1u64 << t;
    i.div_ceil(block) * block
}

/// Extends the allocated set `A` (represented by `config_a`) to a set `B`
/// represented by the principal `target`: per big level add the missing
/// number of unused goods of that rounded level, then add unused small goods
/// until the rounded small value exceeds `(m'_λ - 1) δw'`.
///
/// `values` indexes every positive good of the market; `allocated` lists the
/// ids in `A`. Goods are consumed by descending value (then ascending id).
pub fn extend_bundle(
    values: &[Rat],
    allocated: &[usize],
    config_a: &Configuration,
    target: &Configuration,
    params: &PtasParams,
) -> Result<Vec<usize>> {
    if target.mag() == Magnitude::Zero {
        if allocated.is_empty() {
            return Ok(Vec::new());
        }
        return Err(Error::Internal(
            "nonempty set cannot extend to the empty configuration".to_string(),
        ));
    }
    let e = match target.mag() {
        Magnitude::Pow2(e) => e,
        Magnitude::Zero => unreachable!(),
    };
    let scaled = scale_configuration(config_a, target.mag(), params)?;
    if !scaled.dominated_by(target) {
        return Err(Error::Internal(
            "scaled source configuration exceeds the target".to_string(),
        ));
    }
    let mut in_a = vec![false; values.len()];
    for &j in allocated {
        in_a[j] = true;
    }
    let mut result: Vec<usize> = allocated.to_vec();

    // Unused goods that fit under the target magnitude (condition (i)
    // excludes anything larger), by descending value, ascending id.
    let w_target = pow2(e);
    let mut unused: Vec<usize> = (0..values.len())
        .filter(|&j| !in_a[j] && values[j] <= w_target)
        .collect();
    unused.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));

    for &(level, count) in target.counts() {
        if level == params.lambda() {
            continue;
        }
        let have = scaled.count_at(level);
        let need = count - have;
        if need == 0 {
            continue;
        }
        let mut taken = 0;
        for &j in &unused {
            if in_a[j] || is_small(&values[j], e, params) {
                continue;
            }
            if level_at(&values[j], e, params) == level {
                in_a[j] = true;
                result.push(j);
                taken += 1;
                if taken == need {
                    break;
                }
            }
        }
        if taken < need {
            return Err(Error::Internal(format!(
                "insufficient unused goods at level {level} (target is not principal)"
            )));
        }
    }

    // Small goods until Vr of the small part exceeds (m'_λ - 1) δw'.
    let m_lambda = target.count_at(params.lambda());
    if m_lambda > 0 {
        let delta_w = pow2(e) / rat_uint(params.lambda());
        let threshold = (rat_uint(m_lambda) - Rat::from_integer(1.into())) * &delta_w;
        let mut small_rounded = rat_zero();
        for &j in result.iter() {
            if is_small(&values[j], e, params) {
                small_rounded += round_value(&values[j], params);
            }
        }
        let mut cursor = 0;
        while small_rounded <= threshold {
            let mut advanced = false;
            while cursor < unused.len() {
                let j = unused[cursor];
                cursor += 1;
                if !in_a[j] && is_small(&values[j], e, params) {
                    in_a[j] = true;
                    result.push(j);
                    small_rounded += round_value(&values[j], params);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return Err(Error::Internal(
                    "insufficient small goods (target is not principal)".to_string(),
                ));
            }
        }
    }

    result.sort_unstable();
    debug_assert!(represents(target, &result.iter().map(|&j| values[j].clone()).collect::<Vec<_>>(), params));
    Ok(result)
}

/// Natural log of a configuration-value difference given in grid units.
pub fn log_of_units(units: u64, e: i32, params: &PtasParams) -> f64 {
    debug_assert!(units > 0);
    ln_rat(&(rat_uint(units) * pow2(e) / rat_uint(params.lambda_sq())))
}
