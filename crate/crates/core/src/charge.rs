//! Central charges Z_{ω,β} with ω = xH, β = yH, isometry-fixed parameters, and the
//! one-parameter families ω(t) = √(kt+c)·x₀H used for wall searches.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isometry::LatticeIsometry;
use crate::lattice::{square, MukaiVector};
use crate::num::{as_int, int, ratz, Int, JsonRat, Rat};
use crate::surd::QuadSurd;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct ChargeParams {
    x: Rat,
    y: Rat,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    x: JsonRat,
    y: JsonRat,
}

impl From<ChargeParams> for ParamsRepr {
    fn from(p: ChargeParams) -> Self {
        ParamsRepr { x: JsonRat(p.x), y: JsonRat(p.y) }
    }
}

impl TryFrom<ParamsRepr> for ChargeParams {
    type Error = Error;
    fn try_from(r: ParamsRepr) -> Result<Self> {
        ChargeParams::new(r.x.0, r.y.0)
    }
}

impl ChargeParams {
    pub fn new(x: Rat, y: Rat) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::InvalidInput(format!("x must be positive, got {x}")));
        }
        Ok(ChargeParams { x, y })
    }

    pub fn x(&self) -> &Rat {
        &self.x
    }

    pub fn y(&self) -> &Rat {
        &self.y
    }
}

/// (Re Z, Im Z) for ω = xH, β = yH.
pub fn eval(p: &ChargeParams, v: &MukaiVector, d: u32) -> Result<(Rat, Rat)> {
    v.check_feasible(d)?;
    let (r, h, s) = (ratz(v.r()), ratz(&v.hdeg(d)), ratz(v.s()));
    let dd = Rat::from(int(d as i64));
    let re = &p.y * &h - &s + &r * &dd * (&p.x * &p.x - &p.y * &p.y);
    let im = &p.x * (&h - Rat::from(int(2)) * &dd * &r * &p.y);
    Ok((re, im))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPair {
    Unique { x: QuadSurd, y: Rat },
    NoSolution,
    Underdetermined,
}

impl FixedPair {
    pub fn status(&self) -> &'static str {
        match self {
            FixedPair::Unique { .. } => "unique",
            FixedPair::NoSolution => "none",
            FixedPair::Underdetermined => "underdetermined",
        }
    }
}

/// Solves for the linear unknown `z` in the system coef_j·z + cst_j = 0.
enum Linear {
    Free,
    Value(Rat),
    Inconsistent,
}

fn solve_linear(eqs: &[(Rat, Rat)]) -> Linear {
    let mut value: Option<Rat> = None;
    for (coef, cst) in eqs {
        if !coef.is_zero() {
            let z = -cst / coef;
            match &value {
                Some(v) if *v != z => return Linear::Inconsistent,
                _ => value = Some(z),
            }
        }
    }
    match value {
        Some(z) => {
            if eqs.iter().all(|(coef, cst)| (coef * &z + cst).is_zero()) {
                Linear::Value(z)
            } else {
                Linear::Inconsistent
            }
        }
        None if eqs.iter().all(|(_, cst)| cst.is_zero()) => Linear::Free,
        None => Linear::Inconsistent,
    }
}

/// All (x, y) with x > 0 and Z_{x,y}∘T = Z_{x,y}.
///
/// Both Re Z and Im Z/x are linear functionals on (r, Δ·H, s); requiring them to be
/// T-invariant gives three equations each. The imaginary ones are affine in y, and
/// once y is known the real ones are affine in X = x².
pub fn fixed_pair(t: &LatticeIsometry) -> FixedPair {
    let d = Rat::from(int(t.degree() as i64));
    let two_d = &d * Rat::from(int(2));
    let f = t.forms();
    // full matrix on (r, Δ·H, s), entry n[i][j]
    let mut n: Vec<Vec<Rat>> = vec![f[0].to_vec(), f[1].iter().map(|x| x * &two_d).collect(), f[2].to_vec()];
    n[1][1] += Rat::from(int(t.eps() as i64));
    let delta = |i: usize, j: usize| if i == j { Rat::one() } else { Rat::zero() };
    let m = |i: usize, j: usize| &n[i][j] - delta(i, j);

    // Im/x functional (−2d·y, 1, 0): (−2d·y)·m0j + m1j = 0
    let im_eqs: Vec<(Rat, Rat)> = (0..3).map(|j| (-&two_d * m(0, j), m(1, j))).collect();
    let y = match solve_linear(&im_eqs) {
        Linear::Inconsistent => return FixedPair::NoSolution,
        Linear::Value(y) => y,
        Linear::Free => {
            // rows 0 and 1 of T are the identity; Re invariance reduces to row 2
            return if (0..3).all(|j| m(2, j).is_zero()) {
                FixedPair::Underdetermined
            } else {
                FixedPair::NoSolution
            };
        }
    };
    // Re functional (d(X − y²), y, −1): X·d·m0j + (−d y² m0j + y m1j − m2j) = 0
    let re_eqs: Vec<(Rat, Rat)> = (0..3)
        .map(|j| (&d * m(0, j), -&d * &y * &y * m(0, j) + &y * m(1, j) - m(2, j)))
        .collect();
    match solve_linear(&re_eqs) {
        Linear::Inconsistent => FixedPair::NoSolution,
        Linear::Free => FixedPair::Underdetermined,
        Linear::Value(xx) if xx.is_positive() => FixedPair::Unique { x: QuadSurd::sqrt(&xx), y },
        Linear::Value(_) => FixedPair::NoSolution,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub hits: Vec<MukaiVector>,
    /// True when the search provably covers every spherical class on the line Im = 0.
    pub certified: bool,
}

impl Obstruction {
    pub fn status(&self) -> &'static str {
        if self.certified {
            "certified"
        } else {
            "bounded-only"
        }
    }
}

/// Spherical exact classes (r, aH, s) with r > 0, Im Z = 0 and Re Z ≤ 0, searched in
/// |r|, |a|, |s| ≤ box.
///
/// Im Z = 0 forces a = r·y. Writing y = p/q in lowest terms, r = kq and a = kp, and
/// sphericality r·s = d·a² + 1 makes k divide 1, so the line carries at most the single
/// class (q, p, (dp² + 1)/q). The result is certified unless that class exists outside
/// the box.
pub fn spherical_obstruction(p: &ChargeParams, d: u32, bx: u64) -> Result<Obstruction> {
    if bx == 0 {
        return Err(Error::InvalidInput("box must be at least 1".into()));
    }
    let b = Int::from(bx);
    let mut hits = Vec::new();
    let mut r = Int::one();
    while r <= b {
        if let Some(a) = as_int(&(ratz(&r) * &p.y)) {
            let num = Int::from(d) * &a * &a + Int::one();
            if a.abs() <= b && (&num % &r).is_zero() {
                let s = &num / &r;
                let w = MukaiVector::from_coords(&[r.clone(), a.clone(), s.clone()]);
                let (re, im) = eval(p, &w, d)?;
                if s.abs() <= b && im.is_zero() && !re.is_positive() && square(&w, d) == int(-2) {
                    hits.push(w);
                }
            }
        }
        r += 1;
    }
    // the unique candidate on the line, if it is integral
    let (pn, qd) = (p.y.numer().clone(), p.y.denom().clone());
    let num = Int::from(d) * &pn * &pn + Int::one();
    let certified = if (&num % &qd).is_zero() {
        let s = &num / &qd;
        let cand = MukaiVector::from_coords(&[qd.clone(), pn.clone(), s.clone()]);
        let (re, _) = eval(p, &cand, d)?;
        re.is_positive() || (qd <= b && pn.abs() <= b && s.abs() <= b)
    } else {
        true
    };
    Ok(Obstruction { hits, certified })
}

/// β = yH and ω(t) = √(kt + c)·x₀H for t ≥ 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct CharteredFamily {
    y: Rat,
    x0: Rat,
    k: Rat,
    c: Rat,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    y: JsonRat,
    x0: JsonRat,
    k: JsonRat,
    c: JsonRat,
}

impl From<CharteredFamily> for FamilyRepr {
    fn from(f: CharteredFamily) -> Self {
        FamilyRepr { y: JsonRat(f.y), x0: JsonRat(f.x0), k: JsonRat(f.k), c: JsonRat(f.c) }
    }
}

impl TryFrom<FamilyRepr> for CharteredFamily {
    type Error = Error;
    fn try_from(r: FamilyRepr) -> Result<Self> {
        CharteredFamily::new(r.y.0, r.x0.0, r.k.0, r.c.0)
    }
}

/// Affine polynomial slope·t + intercept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub slope: JsonRat,
    pub intercept: JsonRat,
}

impl Affine {
    pub fn eval(&self, t: &Rat) -> Rat {
        &self.slope.0 * t + &self.intercept.0
    }
}

impl CharteredFamily {
    pub fn new(y: Rat, x0: Rat, k: Rat, c: Rat) -> Result<Self> {
        if !x0.is_positive() || k.is_negative() || !c.is_positive() {
            return Err(Error::InvalidInput(
                "family needs x0 > 0, k ≥ 0 and c > 0".into(),
            ));
        }
        Ok(CharteredFamily { y, x0, k, c })
    }

    pub fn y(&self) -> &Rat {
        &self.y
    }

    pub fn x0(&self) -> &Rat {
        &self.x0
    }

    pub fn k(&self) -> &Rat {
        &self.k
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn contains(&self, t: &Rat) -> bool {
        !t.is_negative()
    }

    /// ω(t)² / H² · 1/x₀² = kt + c.
    pub fn scale_sq(&self, t: &Rat) -> Rat {
        &self.k * t + &self.c
    }

    /// (x, y) at t when x(t) is rational.
    pub fn params_at(&self, t: &Rat) -> Option<ChargeParams> {
        let root = crate::num::rat_sqrt(&self.scale_sq(t))?;
        ChargeParams::new(root * &self.x0, self.y.clone()).ok()
    }

    /// ω(t) as a multiple of ω(0): √((kt + c)/c).
    pub fn t_linear(&self, t: &Rat) -> QuadSurd {
        QuadSurd::sqrt(&(self.scale_sq(t) / &self.c))
    }

    /// x₀·√(kt+c) as an exact surd.
    pub fn x_at(&self, t: &Rat) -> QuadSurd {
        let s = QuadSurd::sqrt(&self.scale_sq(t));
        QuadSurd::new(s.p() * &self.x0, s.q() * &self.x0, s.n().clone())
    }
}

/// Re Z_t(v) as an affine function of t, and the reduced imaginary part
/// hdeg − 2d·r·y (Im Z_t divided by the positive factor x₀√(kt+c)).
pub fn family_eval(f: &CharteredFamily, v: &MukaiVector, d: u32) -> Result<(Affine, Rat)> {
    v.check_feasible(d)?;
    let (r, h, s) = (ratz(v.r()), ratz(&v.hdeg(d)), ratz(v.s()));
    let dd = Rat::from(int(d as i64));
    let x02 = &f.x0 * &f.x0;
    let slope = &r * &dd * &x02 * &f.k;
    let intercept = &f.y * &h - &s + &r * &dd * (&x02 * &f.c - &f.y * &f.y);
    let im = &h - Rat::from(int(2)) * &dd * &r * &f.y;
    Ok((Affine { slope: JsonRat(slope), intercept: JsonRat(intercept) }, im))
}

fn family(y: (i64, i64), x0: (i64, i64), k: i64, c: i64) -> CharteredFamily {
    use crate::num::rat;
    CharteredFamily::new(rat(y.0, y.1), rat(x0.0, x0.1), rat(k, 1), rat(c, 1)).expect("preset")
}

/// Degree 4; Z_t(r, aH, s) = (tr − 2a − s) + (r + 2a)√(2t+1)·i.
pub fn quartic_family() -> CharteredFamily {
    family((-1, 2), (1, 2), 2, 1)
}

/// Degree 10 around (1/5, −2/5).
pub fn gm_family_1() -> CharteredFamily {
    family((-2, 5), (1, 5), 5, 1)
}

/// Degree 10 around (1/5, −3/5).
pub fn gm_family_2() -> CharteredFamily {
    family((-3, 5), (1, 5), 5, 1)
}

/// Preset family by name with its degree parameter d.
pub fn preset(name: &str) -> Option<(CharteredFamily, u32)> {
    match name {
        "quartic" | "qds" => Some((quartic_family(), 2)),
        "gm1" => Some((gm_family_1(), 5)),
        "gm2" => Some((gm_family_2(), 5)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn v(r: i64, a: i64, s: i64) -> MukaiVector {
        MukaiVector::exact(r, a, s)
    }

    fn params(x: (i64, i64), y: (i64, i64)) -> ChargeParams {
        ChargeParams::new(rat(x.0, x.1), rat(y.0, y.1)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = params((1, 2), (-1, 2));
        let samples = [v(1, 0, 0), v(3, -2, 5), MukaiVector::abstract_vector(0, 1, -2, -1)];
        for w in &samples {
            let h = ratz(&w.hdeg(2));
            let (re, im) = eval(&p, w, 2).unwrap();
            assert_eq!(re, -(ratz(w.s()) + &h / rat(2, 1)));
            assert_eq!(im, ratz(w.r()) + &h / rat(2, 1));
        }
        assert_eq!(eval(&p, &v(0, 0, 1), 2).unwrap(), (rat(-1, 1), rat(0, 1)));
        let g = params((1, 5), (-2, 5));
        assert_eq!(eval(&g, &v(1, 0, -1), 5).unwrap(), (rat(2, 5), rat(4, 5)));
    }

    #[test]
    fn fixed_pairs() {
        let unique = |t: &LatticeIsometry, x: Rat, y: Rat| {
            assert_eq!(fixed_pair(t), FixedPair::Unique { x: QuadSurd::rational(x), y });
        };
        unique(&LatticeIsometry::tau_q(), rat(1, 2), rat(-1, 2));
        unique(&LatticeIsometry::tau_1(), rat(1, 5), rat(-2, 5));
        unique(&LatticeIsometry::tau_2(), rat(1, 5), rat(-3, 5));
        assert_eq!(fixed_pair(&LatticeIsometry::identity(3)), FixedPair::Underdetermined);
        assert_eq!(fixed_pair(&LatticeIsometry::tensor_h(2)), FixedPair::NoSolution);
        assert_eq!(fixed_pair(&LatticeIsometry::shift(2)), FixedPair::NoSolution);
    }

    #[test]
    fn obstruction_examples() {
        let o = spherical_obstruction(&params((1, 2), (-1, 2)), 2, 50).unwrap();
        assert!(o.hits.is_empty() && o.certified);
        let o = spherical_obstruction(&params((1, 5), (-2, 5)), 5, 50).unwrap();
        assert!(o.hits.is_empty() && o.certified);
        let o = spherical_obstruction(&params((1, 1), (0, 1)), 1, 10).unwrap();
        assert_eq!(o.hits, vec![v(1, 0, 1)]);
        assert!(o.certified);
        // the candidate (1, 0, 1) lies on the line but Re > 0 at x = 2
        let o = spherical_obstruction(&params((2, 1), (0, 1)), 1, 10).unwrap();
        assert!(o.hits.is_empty() && o.certified);
    }

    #[test]
    fn family_examples() {
        let (re, im) = family_eval(&quartic_family(), &v(3, -2, 5), 2).unwrap();
        assert_eq!(re.slope.0, rat(3, 1));
        assert_eq!(re.intercept.0, rat(4 - 5, 1));
        assert_eq!(im, rat(-8 + 6, 1));
        let (re, _) = family_eval(&gm_family_1(), &v(2, 1, -1), 5).unwrap();
        assert_eq!(re.slope.0, rat(2, 1));
        assert_eq!(re.intercept.0, rat(-6, 5) - rat(4, 1) + rat(1, 1));
        for f in [quartic_family(), gm_family_1(), gm_family_2()] {
            let (re, im) = family_eval(&f, &v(0, 0, 1), 5).unwrap();
            assert_eq!((re.slope.0, re.intercept.0, im), (rat(0, 1), rat(-1, 1), rat(0, 1)));
        }
        let p = quartic_family().params_at(&rat(0, 1)).unwrap();
        assert_eq!(p, params((1, 2), (-1, 2)));
        assert_eq!(gm_family_1().params_at(&rat(0, 1)).unwrap(), params((1, 5), (-2, 5)));
        assert_eq!(quartic_family().t_linear(&rat(1, 1)).to_string(), "√3");
        assert_eq!(quartic_family().params_at(&rat(4, 1)).unwrap(), params((3, 2), (-1, 2)));
    }
}
