//! Exact rational scalars.
//!
//! All arithmetic in the engine runs on arbitrary-precision rationals kept in
//! lowest terms with a positive denominator. Serialized form is `"p/q"`, or
//! `"p"` when the denominator is one; points serialize as arrays of such
//! strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar. Always reduced, denominator positive.
pub type Rat = BigRational;

/// Shorthand for small rationals in code and tests.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

pub fn parse_rat(s: &str) -> Result<Rat, crate::Error> {
    s.trim()
        .parse::<Rat>()
        .map_err(|_| crate::Error::Parse(format!("invalid rational: {s:?}")))
}

/// Canonical text form: `p/q`, or `p` when `q == 1`.
pub fn format_rat(r: &Rat) -> String {
    // BigRational's Display already prints `p` when the denominator is one.
    r.to_string()
}

/// Decimal rendering with `digits` significant digits, for plotting output
/// only. Internal formats never use this.
pub fn decimal_string(r: &Rat, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    // Find e with 10^e <= num/den < 10^(e+1).
    let mut e: i64 = 0;
    let ten = BigInt::from(10u32);
    let mut scaled_num = num.clone();
    let mut scaled_den = den.clone();
    while scaled_num < scaled_den {
        scaled_num *= &ten;
        e -= 1;
    }
    while scaled_num >= &scaled_den * &ten {
        scaled_den *= &ten;
        e += 1;
    }
    // mantissa = round(num/den * 10^(digits-1-e)), an integer with `digits`
    // digits (one more if rounding carried, e.g. 0.999 -> 1.00).
    let shift = digits as i64 - 1 - e;
    let (mut sn, mut sd) = (num, den);
    if shift >= 0 {
        sn *= ten.pow(shift as u32);
    } else {
        sd *= ten.pow((-shift) as u32);
    }
    let (q, rem) = num_integer::Integer::div_rem(&sn, &sd);
    let mut mantissa = q;
    if rem * 2 >= sd {
        mantissa += 1;
    }
    let s = mantissa.to_string();
    // value = mantissa * 10^(-shift); point sits after (len - shift) digits.
    let point = s.len() as i64 - shift;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(s.trim_end_matches('0'));
    } else if (point as usize) >= s.len() {
        out.push_str(&s);
        for _ in 0..(point as usize - s.len()) {
            out.push('0');
        }
    } else {
        let (a, b) = s.split_at(point as usize);
        out.push_str(a);
        let b = b.trim_end_matches('0');
        if !b.is_empty() {
            out.push('.');
            out.push_str(b);
        }
    }
    out
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod rat_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: optional rationals as `"p/q"` strings or null.
pub mod rat_opt_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rat(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_rat(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter: vectors of rationals as arrays of `"p/q"` strings.
pub mod rat_vec_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn rat_max(a: Rat, b: Rat) -> Rat {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn rat_min(a: Rat, b: Rat) -> Rat {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn rat_abs(a: &Rat) -> Rat {
    a.abs()
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_integers_without_denominator() {
        assert_eq!(format_rat(&int(5)), "5");
        assert_eq!(format_rat(&rat(10, 2)), "5");
        assert_eq!(format_rat(&rat(-3, 6)), "-1/2");
    }

    #[test]
    fn parses_both_forms() {
        assert_eq!(parse_rat("7").unwrap(), int(7));
        assert_eq!(parse_rat("-7/14").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat(" 3/4 ").unwrap(), rat(3, 4));
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&rat(1, 2), 12), "0.5");
        assert_eq!(decimal_string(&int(3), 12), "3");
        assert_eq!(decimal_string(&rat(-1, 3), 5), "-0.33333");
        assert_eq!(decimal_string(&rat(1, 8), 3), "0.125");
        assert_eq!(decimal_string(&int(0), 12), "0");
        assert_eq!(decimal_string(&int(1250), 3), "1250");
    }
}
