//! Exact rational arithmetic helpers shared by the solvers.
//!
//! All valuations and weights are carried as `BigRational` so that rounding
//! thresholds, envy comparisons and welfare tie-breaks are decided exactly.
//! Floating point only enters through the log-domain welfare summaries.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_uint(v: u64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// `num / den` with `den != 0`.
pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// 2^e as an exact rational; `e` may be negative.
pub fn pow2(e: i32) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::one() << e as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow_rat(base: &Rat, exp: u32) -> Rat {
    if exp == 0 {
        return rat_one();
    }
    Rat::new(base.numer().pow(exp), base.denom().pow(exp))
}

/// Natural log of a positive rational, robust to magnitudes outside f64 range.
pub fn ln_rat(value: &Rat) -> f64 {
    debug_assert!(value.is_positive(), "ln of non-positive rational");
    ln_big(value.numer()) - ln_big(value.denom())
}

fn ln_big(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 52 {
        return (mag.to_f64().unwrap()).ln();
    }
    // Take the top 53 bits as a float mantissa and account for the shift.
    let shift = bits - 53;
    let top = (mag >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

pub fn rat_to_f64(value: &Rat) -> f64 {
    value
        .to_f64()
        .unwrap_or_else(|| (ln_rat(&value.abs())).exp() * if value.is_negative() { -1.0 } else { 1.0 })
}

/// Least common multiple of the denominators of `values`.
/// Multiplying every value by the result clears all fractions.
pub fn denominator_lcm(values: &[Rat]) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        acc = acc.lcm(v.denom());
    }
    acc
}

/// Largest exponent `e` with `2^e < q` (strict), for positive `q`.
pub fn largest_pow2_below(q: &Rat) -> i32 {
    debug_assert!(q.is_positive());
    let mut e = approx_log2(q);
    while pow2(e) >= *q {
        e -= 1;
    }
    while pow2(e + 1) < *q {
        e += 1;
    }
    e
}

/// Smallest exponent `e` with `2^e >= q`, for positive `q`.
pub fn smallest_pow2_at_least(q: &Rat) -> i32 {
    let mut e = approx_log2(q);
    while pow2(e) < *q {
        e += 1;
    }
    while e > i32::MIN && pow2(e - 1) >= *q {
        e -= 1;
    }
    e
}

fn approx_log2(q: &Rat) -> i32 {
    let nb = q.numer().magnitude().bits() as i64;
    let db = q.denom().magnitude().bits() as i64;
    (nb - db) as i32
}

/// Parses "p/q", plain integers and decimal strings ("1.25") exactly.
pub fn parse_rational(text: &str) -> Option<Rat> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        let frac: BigUint = frac_part.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigInt::from_biguint(Sign::Plus, frac);
        let numer = if negative {
            int * &scale - frac
        } else {
            int * &scale + frac
        };
        return Some(Rat::new(numer, scale));
    }
    let n: BigInt = t.parse().ok()?;
    Some(Rat::from_integer(n))
}

/// Canonical text form: plain integer when the denominator is one, else "p/q".
pub fn format_rational(value: &Rat) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
