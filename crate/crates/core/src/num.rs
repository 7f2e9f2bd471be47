//! Integer and rational helpers shared by every module.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

pub fn ratz(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

pub fn floor(q: &Rat) -> Int {
    q.floor().to_integer()
}

pub fn ceil(q: &Rat) -> Int {
    q.ceil().to_integer()
}

/// `Some(n)` when `q` is an integer.
pub fn as_int(q: &Rat) -> Option<Int> {
    q.is_integer().then(|| q.to_integer())
}

/// Floor of the square root; `n` must be non-negative.
pub fn isqrt(n: &Int) -> Int {
    assert!(!n.is_negative(), "isqrt of a negative integer");
    n.sqrt()
}

pub fn exact_sqrt(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn rat_sqrt(q: &Rat) -> Option<Rat> {
    let n = exact_sqrt(q.numer())?;
    let d = exact_sqrt(q.denom())?;
    Some(Rat::new(n, d))
}

/// floor(sqrt(q)) for q ≥ 0.
pub fn sqrt_floor(q: &Rat) -> Int {
    assert!(!q.is_negative(), "sqrt of a negative rational");
    let nd = q.numer() * q.denom();
    isqrt(&nd).div_floor(q.denom())
}

/// Smallest integer m with m ≥ sqrt(q), q ≥ 0.
pub fn sqrt_ceil(q: &Rat) -> Int {
    let f = sqrt_floor(q);
    if ratz(&f) * ratz(&f) == *q {
        f
    } else {
        f + 1
    }
}

/// Integer interval [lo, hi] of real solutions of `a z² + b z + c ≥ 0` when `a < 0`.
/// Returns `None` if the inequality has no real solution.
pub fn concave_interval(a: &Rat, b: &Rat, c: &Rat) -> Option<(Int, Int)> {
    assert!(a.is_negative(), "concave_interval needs a negative leading coefficient");
    let disc = b * b - rat(4, 1) * a * c;
    if disc.is_negative() {
        return None;
    }
    // roots are (-b ± sqrt(disc)) / (2a); with a < 0 the interval is
    // [(-b + sqrt)/(2a), (-b - sqrt)/(2a)].
    // An upper bound for the square root moves both ends outward.
    let two_a = rat(2, 1) * a;
    let s_hi = ratz(&sqrt_ceil(&disc));
    let lo = floor(&((-b + &s_hi) / &two_a));
    let hi = ceil(&((-b - &s_hi) / &two_a));
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

/// Integer roots of `a z² + b z + c = 0` (not all coefficients zero).
pub fn integer_roots(a: &Int, b: &Int, c: &Int) -> Vec<Int> {
    if a.is_zero() {
        if b.is_zero() {
            return Vec::new();
        }
        let (q, r) = (-c).div_rem(b);
        return if r.is_zero() { vec![q] } else { Vec::new() };
    }
    let disc = b * b - int(4) * a * c;
    let Some(s) = exact_sqrt(&disc) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for num in [-b + &s, -b - &s] {
        let den = int(2) * a;
        if num.is_multiple_of(&den) {
            let z = num / &den;
            if !out.contains(&z) {
                out.push(z);
            }
        }
    }
    out.sort();
    out
}

/// All positive divisors of |n| (n ≠ 0), ascending.
pub fn divisors(n: &Int) -> Vec<Int> {
    let n = n.abs();
    assert!(!n.is_zero(), "divisors of zero");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = Int::one();
    while &k * &k <= n {
        if n.is_multiple_of(&k) {
            let other = &n / &k;
            if other != k {
                large.push(other);
            }
            small.push(k.clone());
        }
        k += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Writes n = f²·m with m squarefree (n > 0).
pub fn square_part(n: &Int) -> (Int, Int) {
    assert!(n.is_positive(), "square_part of a non-positive integer");
    let mut m = n.clone();
    let mut f = Int::one();
    let mut p = int(2);
    while &p * &p <= m {
        let p2 = &p * &p;
        while m.is_multiple_of(&p2) {
            m /= &p2;
            f *= &p;
        }
        p += 1;
    }
    (f, m)
}

pub fn fmt_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not an exact rational: {:?}", self.0)
    }
}

impl std::error::Error for ParseRatError {}

pub fn parse_int(s: &str) -> Result<Int, ParseRatError> {
    Int::from_str(s.trim()).map_err(|_| ParseRatError(s.to_string()))
}

/// Parses "p", "p/q" (q ≠ 0).
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let t = s.trim();
    let err = || ParseRatError(s.to_string());
    match t.split_once('/') {
        None => Ok(ratz(&Int::from_str(t).map_err(|_| err())?)),
        Some((n, d)) => {
            let n = Int::from_str(n.trim()).map_err(|_| err())?;
            let d = Int::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rat::new(n, d))
        }
    }
}

pub fn to_i64(n: &Int) -> Option<i64> {
    n.to_i64()
}

/// JSON wrapper: integers are written as numbers when they fit in 64 bits and as
/// decimal strings otherwise; both forms are accepted on input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonInt(pub Int);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => ser.serialize_i64(v),
            None => ser.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_i128<E: de::Error>(self, v: i128) -> Result<JsonInt, E> {
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_u128<E: de::Error>(self, v: u128) -> Result<JsonInt, E> {
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
                parse_int(v).map(JsonInt).map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

/// JSON wrapper: rationals are exact strings such as "-1/2" or "3".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonRat(pub Rat);

impl Serialize for JsonRat {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&fmt_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for JsonRat {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonRat;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string like \"-3/5\" or an integer")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonRat, E> {
                Ok(JsonRat(ratz(&Int::from(v))))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonRat, E> {
                Ok(JsonRat(ratz(&Int::from(v))))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonRat, E> {
                parse_rat(v).map(JsonRat).map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

pub fn json_ints(v: &[Int]) -> Vec<JsonInt> {
    v.iter().cloned().map(JsonInt).collect()
}

pub fn json_int_matrix(m: &[Vec<Int>]) -> Vec<Vec<JsonInt>> {
    m.iter().map(|row| json_ints(row)).collect()
}

pub fn from_json_int_matrix(m: Vec<Vec<JsonInt>>) -> Vec<Vec<Int>> {
    m.into_iter()
        .map(|row| row.into_iter().map(|x| x.0).collect())
        .collect()
}
