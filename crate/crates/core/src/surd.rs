//! Exact quadratic surds p + q√n.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::num::{fmt_rat, ratz, square_part, Int, JsonInt, JsonRat, Rat};

/// p + q√n with n squarefree; rational values are stored with q = 0 and n = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SurdRepr", into = "SurdRepr")]
pub struct QuadSurd {
    p: Rat,
    q: Rat,
    n: Int,
}

#[derive(Serialize, Deserialize)]
struct SurdRepr {
    p: JsonRat,
    q: JsonRat,
    n: JsonInt,
}

impl From<QuadSurd> for SurdRepr {
    fn from(s: QuadSurd) -> Self {
        SurdRepr { p: JsonRat(s.p), q: JsonRat(s.q), n: JsonInt(s.n) }
    }
}

impl TryFrom<SurdRepr> for QuadSurd {
    type Error = String;
    fn try_from(r: SurdRepr) -> Result<Self, String> {
        if !r.n.0.is_positive() {
            return Err("surd radicand must be positive".into());
        }
        Ok(QuadSurd::new(r.p.0, r.q.0, r.n.0))
    }
}

impl QuadSurd {
    pub fn new(p: Rat, q: Rat, n: Int) -> Self {
        assert!(n.is_positive(), "radicand must be positive");
        let (f, m) = square_part(&n);
        let q = q * ratz(&f);
        if q.is_zero() || m.is_one() {
            return QuadSurd { p: p + q, q: Rat::zero(), n: Int::one() };
        }
        QuadSurd { p, q, n: m }
    }

    pub fn rational(p: Rat) -> Self {
        QuadSurd { p, q: Rat::zero(), n: Int::one() }
    }

    /// √x for a non-negative rational x.
    pub fn sqrt(x: &Rat) -> Self {
        assert!(!x.is_negative(), "square root of a negative rational");
        if x.is_zero() {
            return Self::rational(Rat::zero());
        }
        // √(u/v) = √(u v) / v
        let uv = x.numer() * x.denom();
        Self::new(Rat::zero(), Rat::new(Int::one(), x.denom().clone()), uv)
    }

    pub fn p(&self) -> &Rat {
        &self.p
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn n(&self) -> &Int {
        &self.n
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.q.is_zero().then_some(&self.p)
    }

    pub fn is_positive(&self) -> bool {
        self.cmp_rational(&Rat::zero()) == Ordering::Greater
    }

    /// Compares the surd with a rational number exactly.
    pub fn cmp_rational(&self, x: &Rat) -> Ordering {
        // sign of (p - x) + q√n
        let u = &self.p - x;
        let v = &self.q;
        if v.is_zero() {
            return u.cmp(&Rat::zero());
        }
        let vv = v * v * ratz(&self.n);
        match (u.is_negative(), v.is_negative()) {
            (false, false) => Ordering::Greater,
            (true, true) => Ordering::Less,
            // u ≥ 0 > v: sign of u² − v²n
            (false, true) => (&u * &u).cmp(&vv),
            // u < 0 < v: sign of v²n − u²
            (true, false) => vv.cmp(&(&u * &u)),
        }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", fmt_rat(&self.p));
        }
        let root = if self.q.is_one() {
            format!("√{}", self.n)
        } else if self.q == -Rat::one() {
            format!("-√{}", self.n)
        } else {
            format!("{}·√{}", fmt_rat(&self.q), self.n)
        };
        if self.p.is_zero() {
            write!(f, "{root}")
        } else if root.starts_with('-') {
            write!(f, "{}{}", fmt_rat(&self.p), root)
        } else {
            write!(f, "{}+{}", fmt_rat(&self.p), root)
        }
    }
}
