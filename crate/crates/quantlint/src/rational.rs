//! Exact rational arithmetic helpers.
//!
//! The checker never evaluates magnitudes, so every number it touches
//! (exponents, conversion factors, scalar literals) is kept as an exact
//! rational. `num_rational::BigRational` normalizes on construction: reduced
//! fraction, positive denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `2`, `-3`, `1/2`, `-1/2` or a decimal such as `0.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, text),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let numer: BigInt = n.trim().parse().ok()?;
        let denom: BigInt = d.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        Rational::new(numer, denom)
    } else {
        parse_decimal(body)?
    };
    Some(if negative { -value } else { value })
}

/// Parses an unsigned decimal literal (`12`, `0.5`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    match text.split_once('.') {
        None => {
            let n: BigInt = text.parse().ok()?;
            Some(Rational::from_integer(n))
        }
        Some((int_part, frac_part)) => {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let int_part = if int_part.is_empty() { "0" } else { int_part };
            let whole: BigInt = int_part.parse().ok()?;
            let frac: BigInt = frac_part.parse().ok()?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            Some(Rational::new(whole * &scale + frac, scale))
        }
    }
}

/// `p/q`, or just `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Finite decimal form when one exists (denominator of shape 2^a * 5^b),
/// otherwise falls back to `p/q`.
pub fn format_decimal(r: &Rational) -> String {
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut d = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format_rational(r);
    }
    let places = twos.max(fives);
    if places == 0 {
        return r.numer().to_string();
    }
    let scaled = (r * Rational::from_integer(BigInt::from(10u32).pow(places))).to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let digits = scaled.abs().to_string();
    let digits = if digits.len() <= places as usize {
        format!(
            "{}{}",
            "0".repeat(places as usize + 1 - digits.len()),
            digits
        )
    } else {
        digits
    };
    let split = digits.len() - places as usize;
    let mut frac = digits[split..].trim_end_matches('0').to_string();
    if frac.is_empty() {
        return format!("{}{}", sign, &digits[..split]);
    }
    frac.insert(0, '.');
    format!("{}{}{}", sign, &digits[..split], frac)
}

/// Raises a rational to an integer power. `None` if the exponent does not
/// fit in `i32` or on `0^negative`.
pub fn pow_int(base: &Rational, exp: &BigInt) -> Option<Rational> {
    let e = exp.to_i32()?;
    if e == 0 {
        return Some(Rational::one());
    }
    let positive = e.unsigned_abs();
    let powered = Rational::new(base.numer().pow(positive), base.denom().pow(positive));
    if e > 0 {
        Some(powered)
    } else if powered.is_zero() {
        None
    } else {
        Some(powered.recip())
    }
}

/// `base^exp` when the result is an exact rational: integer exponents always
/// work, fractional exponents only when the required root comes out exact.
pub fn pow_exact(base: &Rational, exp: &Rational) -> Option<Rational> {
    let powered = pow_int(base, exp.numer())?;
    let root = exp.denom().to_u32()?;
    if root == 1 {
        return Some(powered);
    }
    if powered.is_negative() && root % 2 == 0 {
        return None;
    }
    let rn = powered.numer().nth_root(root);
    let rd = powered.denom().nth_root(root);
    if rn.pow(root) == *powered.numer() && rd.pow(root) == *powered.denom() {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}
