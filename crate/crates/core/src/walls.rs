//! Numerical walls for a target class along a one-parameter family of central charges,
//! the rank-2 lattice attached to a wall, and its divisorial/flopping classification.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charge::{family_eval, CharteredFamily};
use crate::error::{Error, Result};
use crate::lattice::{hodge_feasible, mukai_gram, square, DivisorClass, MukaiVector, Sublattice};
use crate::matrix::{self, ext_gcd};
use crate::num::{
    as_int, ceil, concave_interval, divisors, int, integer_roots, ratz, sqrt_floor, Int, JsonInt,
    JsonRat, Rat,
};
use crate::surd::QuadSurd;

/// Search radius used whenever no finite bound can be proved.
pub const DEFAULT_BOUND: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Abstract,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    pub destabilizer: MukaiVector,
    pub quotient: MukaiVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallType {
    Divisorial,
    Flopping,
    FakeOrUnknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: WallType,
    /// The spherical or isotropic class that decides the type, if any.
    pub certificate: Option<MukaiVector>,
    pub certificate_pairing: Option<JsonInt>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Effectivity {
    /// r > 0, or r = 0 and Δ·H > 0; searched for |⟨w,v⟩| ≤ bound.
    RankPositive { bound: u64 },
    /// Z_t(w) is a positive multiple of Z_t(v) at the wall.
    PhaseAligned { family: CharteredFamily, t: JsonRat },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Semistability {
    pub totally_semistable: bool,
    pub witness: Option<MukaiVector>,
    pub heuristic: String,
    /// Every spherical class with −max_pairing ≤ ⟨w,v⟩ < 0 was examined.
    pub max_pairing: JsonInt,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallReport {
    pub t: JsonRat,
    pub t_linear: QuadSurd,
    pub destabilizer: MukaiVector,
    pub quotient: MukaiVector,
    /// Further decompositions with aligned phases at the same t.
    pub other_pairs: Vec<Pair>,
    /// Pairs involving non-proportional divisor classes (abstract mode only).
    pub geometric_candidates: Vec<Pair>,
    pub requires_geometric_input: bool,
    pub hw: Sublattice,
    pub classification: Classification,
    pub totally_semistable: Semistability,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallSearch {
    pub walls: Vec<WallReport>,
    /// The rank range searched is provably exhaustive.
    pub certified: bool,
    pub r_min: JsonInt,
    pub r_max: JsonInt,
}

/// Quadratic A r² + B r + C given by its values at r = −1, 0, 1.
fn interpolate(f: impl Fn(&Rat) -> Rat) -> (Rat, Rat, Rat) {
    let (m, z, p) = (f(&-Rat::one()), f(&Rat::zero()), f(&Rat::one()));
    let two = Rat::from(int(2));
    let a = (&p + &m) / &two - &z;
    let b = (&p - &m) / &two;
    (a, b, z)
}

fn hull(a: Option<(Int, Int)>, b: Option<(Int, Int)>) -> Option<(Int, Int)> {
    match (a, b) {
        (Some((l1, h1)), Some((l2, h2))) => Some((l1.min(l2), h1.max(h2))),
        (x, None) | (None, x) => x,
    }
}

fn intersect(a: Option<(Int, Int)>, b: Option<(Int, Int)>) -> Option<(Int, Int)> {
    let ((l1, h1), (l2, h2)) = (a?, b?);
    let (l, h) = (l1.max(l2), h1.min(h2));
    (l <= h).then_some((l, h))
}

/// Data of one wall search, shared by every integer line.
struct Search<'a> {
    f: &'a CharteredFamily,
    v: &'a MukaiVector,
    d: u32,
    mode: Mode,
    lo: Rat,
    hi: Rat,
    dd: Rat,
    im_v: Rat,
    re_v: crate::charge::Affine,
    v_coords: Vec<Rat>,
}

impl Search<'_> {
    fn x2(&self, t: &Rat) -> Rat {
        self.f.x0() * self.f.x0() * self.f.scale_sq(t)
    }

    /// s on the slope-equality locus for rank r on the line im(w) = m.
    fn s_of(&self, m: &Rat, r: &Rat, t: &Rat) -> Rat {
        let y = self.f.y();
        let hdeg = m + Rat::from(int(2)) * &self.dd * r * y;
        y * &hdeg + r * &self.dd * (self.x2(t) - y * y) - self.re_v.eval(t) * m / &self.im_v
    }

    /// Upper bounds for square(w) and square(v − w) at (m, r, t); exact when Δ is a
    /// multiple of H, and an upper bound by the Hodge index inequality otherwise.
    fn squares(&self, m: &Rat, r: &Rat, t: &Rat) -> (Rat, Rat) {
        let two = Rat::from(int(2));
        let h2 = &two * &self.dd;
        let hdeg = m + &h2 * r * self.f.y();
        let s = self.s_of(m, r, t);
        let q1 = &hdeg * &hdeg / &h2 - &two * r * &s;
        let (rv, av, sv) = (&self.v_coords[0], &self.v_coords[1], &self.v_coords[2]);
        let dh = av * &h2 - &hdeg;
        let q2 = &dh * &dh / &h2 - &two * (rv - r) * (sv - &s);
        (q1, q2)
    }

    fn r_range(&self, m: &Rat) -> Option<Option<(Int, Int)>> {
        let mut i1 = None;
        let mut i2 = None;
        for t in [&self.lo, &self.hi] {
            let (a1, b1, c1) = interpolate(|r| self.squares(m, r, t).0);
            let (a2, b2, c2) = interpolate(|r| self.squares(m, r, t).1);
            if !a1.is_negative() || !a2.is_negative() {
                return None;
            }
            let two = Rat::from(int(2));
            i1 = hull(i1, concave_interval(&a1, &b1, &(c1 + &two)));
            i2 = hull(i2, concave_interval(&a2, &b2, &(c2 + &two)));
        }
        Some(intersect(i1, i2))
    }

    fn line(&self, m: &Rat, range: &(Int, Int)) -> Vec<(Rat, MukaiVector)> {
        let mut out = Vec::new();
        let two = Rat::from(int(2));
        let h2 = &two * &self.dd;
        let mut next = range.0.clone();
        while next <= range.1 {
            let r = next.clone();
            next += 1;
            let rq = ratz(&r);
            let hdeg_q = m + &h2 * &rq * self.f.y();
            let Some(hdeg) = as_int(&hdeg_q) else { continue };
            let a = as_int(&(&hdeg_q / &h2));
            if self.mode == Mode::Exact && a.is_none() {
                continue;
            }
            let s0 = self.s_of(m, &rq, &Rat::zero());
            let s1 = self.s_of(m, &rq, &Rat::one()) - &s0;
            if s1.is_zero() {
                // numerically proportional to v: aligned for every t
                continue;
            }
            let (e_lo, e_hi) = (self.s_of(m, &rq, &self.lo), self.s_of(m, &rq, &self.hi));
            let (smin, smax) = if e_lo <= e_hi { (e_lo, e_hi) } else { (e_hi, e_lo) };
            let mut s = ceil(&smin);
            while ratz(&s) <= smax {
                let t = (ratz(&s) - &s0) / &s1;
                if let Some(a) = &a {
                    let w = MukaiVector::from_coords(&[r.clone(), a.clone(), s.clone()]);
                    if self.admissible(&w) {
                        out.push((t.clone(), w));
                    }
                }
                if self.mode == Mode::Abstract {
                    out.extend(self.abstract_classes(&r, &hdeg, &s).into_iter().map(|w| (t.clone(), w)));
                }
                s += 1;
            }
        }
        out
    }

    fn admissible(&self, w: &MukaiVector) -> bool {
        let two = int(-2);
        let Ok(q) = self.v.sub(w, self.d) else { return false };
        square(w, self.d) >= two
            && square(&q, self.d) >= two
            && hodge_feasible(&w.div, self.d)
            && hodge_feasible(&q.div, self.d)
    }

    /// Non-proportional divisor classes with the given r, Δ·H and s passing both
    /// square bounds.
    fn abstract_classes(&self, r: &Int, hdeg: &Int, s: &Int) -> Vec<MukaiVector> {
        let d = self.d;
        let h2 = Int::from(2 * d as u64);
        let v = self.v;
        let (rv, sv) = (v.r(), v.s());
        let av = v.a().expect("exact target");
        let sq_v = v.div.sq(d);
        // square(w) = sq − 2rs ≥ −2 and square(v − w) = sq_v − 2a_v·hdeg + sq − 2(rv−r)(sv−s) ≥ −2
        let lo1: Int = int(2) * r * s - 2;
        let lo2: Int = int(-2) + int(2) * (rv - r) * (sv - s) - &sq_v + int(2) * av * hdeg;
        let mut sq = lo1.max(lo2);
        if sq.is_odd() {
            sq += 1;
        }
        let hi = (hdeg * hdeg).div_floor(&h2);
        let mut out = Vec::new();
        while sq <= hi {
            let div = DivisorClass::abstract_class(hdeg.clone(), sq.clone());
            let w = MukaiVector::new(r.clone(), div, s.clone());
            if hodge_feasible(&w.div, d) && !w.normalized(d).is_exact() && self.admissible(&w) {
                out.push(w);
            }
            sq += 2;
        }
        out
    }
}

fn reduced_im(f: &CharteredFamily, w: &MukaiVector, d: u32) -> Rat {
    let h = ratz(&w.hdeg(d));
    h - Rat::from(int(2 * d as i64)) * ratz(w.r()) * f.y()
}

fn sort_key(w: &MukaiVector, d: u32) -> (Int, Int, Int) {
    (w.r().clone(), w.hdeg(d), w.s().clone())
}

/// Destabilizer is the part with smaller reduced imaginary part; ties go to the
/// lexicographically larger (r, Δ·H, s).
fn normalize(f: &CharteredFamily, v: &MukaiVector, w: MukaiVector, d: u32) -> Pair {
    let q = v.sub(&w, d).expect("exact target");
    let (iw, iq) = (reduced_im(f, &w, d), reduced_im(f, &q, d));
    let w_first = iw < iq || (iw == iq && sort_key(&w, d) > sort_key(&q, d));
    if w_first {
        Pair { destabilizer: w, quotient: q }
    } else {
        Pair { destabilizer: q, quotient: w }
    }
}

/// All numerical walls for `v` along `f` with t in [lo, hi].
///
/// For a destabilizing class w, 0 < im(w) < im(v) leaves finitely many lines; on each,
/// slope equality makes s affine in t, and square(w) ≥ −2, square(v − w) ≥ −2 are
/// concave quadratics in r whose leading coefficient is −2d·x₀²(kt + c) < 0. Both are
/// affine in t, so the rank range is read off at the endpoints of the t-interval.
pub fn find_walls(
    f: &CharteredFamily,
    v: &MukaiVector,
    d: u32,
    mode: Mode,
    lo: &Rat,
    hi: &Rat,
    bound_override: Option<u64>,
) -> Result<WallSearch> {
    let v_int = v.require_coords()?;
    if lo > hi {
        return Err(Error::EmptyRange(lo.to_string(), hi.to_string()));
    }
    if !f.contains(lo) {
        return Err(Error::OutsideDomain(lo.to_string()));
    }
    if f.k().is_zero() {
        return Err(Error::InvalidInput("family with k = 0 is constant in t".into()));
    }
    let (re_v, im_v) = family_eval(f, v, d)?;
    if !im_v.is_positive() {
        return Err(Error::NonPositiveIm);
    }
    let search = Search {
        f,
        v,
        d,
        mode,
        lo: lo.clone(),
        hi: hi.clone(),
        dd: Rat::from(int(d as i64)),
        im_v: im_v.clone(),
        re_v,
        v_coords: v_int.iter().map(ratz).collect(),
    };
    let q = f.y().denom().clone();
    let step = match mode {
        Mode::Exact => Rat::new(Int::from(2 * d as u64), q),
        Mode::Abstract => Rat::new(Int::one(), q),
    };
    let mut lines = Vec::new();
    let mut m = step.clone();
    while m < im_v {
        lines.push(m.clone());
        m += &step;
    }

    let fallback = Int::from(bound_override.unwrap_or(DEFAULT_BOUND));
    let per_line: Vec<(Option<(Int, Int)>, bool, Vec<(Rat, MukaiVector)>)> = lines
        .par_iter()
        .map(|m| {
            let (range, mut certified) = match search.r_range(m) {
                Some(r) => (r, true),
                None => (Some((-&fallback, fallback.clone())), false),
            };
            let range = match (range, bound_override) {
                (Some((l, h)), Some(b)) => {
                    let b = Int::from(b);
                    if l < -&b || h > b {
                        certified = false;
                    }
                    intersect(Some((l, h)), Some((-&b, b)))
                }
                (r, _) => r,
            };
            let found = range.as_ref().map(|r| search.line(m, r)).unwrap_or_default();
            (range, certified, found)
        })
        .collect();

    let certified = per_line.iter().all(|(_, c, _)| *c);
    let r_min = per_line.iter().filter_map(|(r, _, _)| r.as_ref().map(|x| x.0.clone())).min();
    let r_max = per_line.iter().filter_map(|(r, _, _)| r.as_ref().map(|x| x.1.clone())).max();

    let mut by_t: BTreeMap<Rat, BTreeSet<Pair>> = BTreeMap::new();
    for (_, _, found) in per_line {
        for (t, w) in found {
            by_t.entry(t).or_default().insert(normalize(f, v, w, d));
        }
    }

    let walls = by_t
        .into_iter()
        .map(|(t, pairs)| build_report(f, v, d, t, pairs, certified))
        .collect::<Result<Vec<_>>>()?;
    Ok(WallSearch {
        walls,
        certified,
        r_min: JsonInt(r_min.unwrap_or_default()),
        r_max: JsonInt(r_max.unwrap_or_default()),
    })
}

fn build_report(
    f: &CharteredFamily,
    v: &MukaiVector,
    d: u32,
    t: Rat,
    pairs: BTreeSet<Pair>,
    certified: bool,
) -> Result<WallReport> {
    let (mut exact, mut geometric): (Vec<Pair>, Vec<Pair>) = pairs
        .into_iter()
        .partition(|p| p.destabilizer.is_exact() && p.quotient.is_exact());
    let order = |p: &Pair| (reduced_im(f, &p.destabilizer, d), std::cmp::Reverse(sort_key(&p.destabilizer, d)));
    exact.sort_by_key(order);
    geometric.sort_by_key(order);
    let requires_geometric_input = exact.is_empty();
    let primary = if requires_geometric_input { geometric.remove(0) } else { exact.remove(0) };
    let hw = hyperbolic_lattice(f, v, d, &t)?;
    let classification = classify_wall(&hw, v, d)?;
    let effectivity = Effectivity::PhaseAligned { family: f.clone(), t: JsonRat(t.clone()) };
    let totally_semistable = totally_semistable(&hw, v, d, &effectivity)?;
    Ok(WallReport {
        t_linear: f.t_linear(&t),
        t: JsonRat(t),
        destabilizer: primary.destabilizer,
        quotient: primary.quotient,
        other_pairs: exact,
        geometric_candidates: geometric,
        requires_geometric_input,
        hw,
        classification,
        totally_semistable,
        certified,
    })
}

/// The saturated rank-2 lattice {w : Z_t0(w) ∈ ℝ·Z_t0(v)} in exact coordinates.
pub fn hyperbolic_lattice(f: &CharteredFamily, v: &MukaiVector, d: u32, t0: &Rat) -> Result<Sublattice> {
    if !f.contains(t0) {
        return Err(Error::OutsideDomain(t0.to_string()));
    }
    let (re_v, im_v) = family_eval(f, v, d)?;
    let re = re_v.eval(t0);
    let dd = Rat::from(int(d as i64));
    let two_d = &dd * Rat::from(int(2));
    let y = f.y();
    // Re_w·im_v − Re_v·im_w as a linear form in (r, a, s)
    let x2 = f.x0() * f.x0() * f.scale_sq(t0);
    let cr = &dd * (&x2 - y * y) * &im_v + &re * &two_d * y;
    let ca = &two_d * y * &im_v - &re * &two_d;
    let cs = -im_v.clone();
    let row = integral_row(&[cr, ca, cs]);
    let k = matrix::integer_kernel(&[row], 3);
    if k.len() != 2 {
        return Err(Error::RankMismatch(k.len()));
    }
    let hw = Sublattice::from_rows(&k, d)?;
    if square(v, d).is_positive() {
        assert!(hw.lattice.det().is_negative(), "wall lattice is not hyperbolic");
    }
    Ok(hw)
}

fn integral_row(q: &[Rat]) -> Vec<Int> {
    let l = q.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let row: Vec<Int> = q.iter().map(|x| (x * ratz(&l)).to_integer()).collect();
    let g = matrix::content(&row);
    if g.is_zero() {
        row
    } else {
        row.into_iter().map(|x| x / &g).collect()
    }
}

/// Classes w in the rank-2 lattice with ⟨w, v⟩ = c and w² = target.
/// The second component is false when the search had to be truncated at `bound`.
pub fn solve_on_line(hw: &Sublattice, v: &MukaiVector, d: u32, c: &Int, target: &Int, bound: u64) -> Result<(Vec<MukaiVector>, bool)> {
    let e = hw.pairing_row(v, d)?;
    let g = &hw.lattice.gram;
    let (gcd, x, y) = ext_gcd(&e[0], &e[1]);
    if gcd.is_zero() {
        return Ok((Vec::new(), !c.is_zero()));
    }
    if !c.is_multiple_of(&gcd) {
        return Ok((Vec::new(), true));
    }
    let k = c / &gcd;
    let p = [&x * &k, &y * &k];
    let u = [&e[1] / &gcd, -&e[0] / &gcd];
    let q = |a: &[Int; 2], b: &[Int; 2]| -> Int {
        &a[0] * &g[0][0] * &b[0] + &a[0] * &g[0][1] * &b[1] + &a[1] * &g[1][0] * &b[0] + &a[1] * &g[1][1] * &b[1]
    };
    // (p + z u)² = α z² + β z + γ
    let alpha = q(&u, &u);
    let beta = int(2) * q(&p, &u);
    let gamma = q(&p, &p) - target;
    let point = |z: &Int| hw.combine(&[&p[0] + z * &u[0], &p[1] + z * &u[1]]);
    if alpha.is_negative() || (alpha.is_zero() && !beta.is_zero()) {
        let mut out: Vec<MukaiVector> = integer_roots(&alpha, &beta, &gamma).iter().map(point).collect();
        out.sort();
        return Ok((out, true));
    }
    if alpha.is_zero() && beta.is_zero() && !gamma.is_zero() {
        return Ok((Vec::new(), true));
    }
    let b = Int::from(bound);
    let mut out = Vec::new();
    let mut z = -&b;
    while z <= b {
        if (&alpha * &z * &z + &beta * &z + &gamma).is_zero() {
            out.push(point(&z));
        }
        z += 1;
    }
    Ok((out, false))
}

fn first_solution(hw: &Sublattice, v: &MukaiVector, d: u32, cs: &[i64], target: i64) -> Result<Option<(MukaiVector, Int)>> {
    for &c in cs {
        let (sol, _) = solve_on_line(hw, v, d, &int(c), &int(target), DEFAULT_BOUND)?;
        if let Some(w) = sol.into_iter().next() {
            return Ok(Some((w, int(c))));
        }
    }
    Ok(None)
}

/// Divisorial / flopping classification of a wall through its rank-2 lattice.
///
/// For primitive v with 2 ≤ v² ≤ 4: divisorial iff there is a spherical w with
/// ⟨w,v⟩ = 0 or an isotropic w with ⟨w,v⟩ ∈ {1, 2}; otherwise flopping iff there is a
/// spherical w with 0 < ⟨w,v⟩ ≤ v²/2. For v = 2v₀ with v₀² = 2: divisorial iff there is
/// a spherical w with ⟨w,v⟩ ∈ {0, 2} or an isotropic w with ⟨w,v⟩ = 2; otherwise
/// flopping iff there is a spherical w with ⟨w,v⟩ = 4.
pub fn classify_wall(hw: &Sublattice, v: &MukaiVector, d: u32) -> Result<Classification> {
    if hw.coordinates(v).is_none() {
        return Err(Error::VectorNotInLattice(v.to_string()));
    }
    let vv = square(v, d);
    let half = v.coords().filter(|c| c.iter().all(|x| x.is_even())).map(|c| {
        MukaiVector::from_coords(&c.iter().map(|x| x / 2).collect::<Vec<_>>())
    });
    let (div_sph, div_iso, flop_sph, rule): (Vec<i64>, Vec<i64>, Vec<i64>, &str) =
        if v.is_primitive() && vv >= int(2) && vv <= int(4) {
            let top = if vv == int(4) { vec![1, 2] } else { vec![1] };
            (vec![0], vec![1, 2], top, "primitive target")
        } else if half.as_ref().is_some_and(|h| square(h, d) == int(2)) {
            (vec![0, 2], vec![2], vec![4], "twice a primitive class of square 2")
        } else {
            return Ok(Classification {
                kind: WallType::FakeOrUnknown,
                certificate: None,
                certificate_pairing: None,
                reason: format!("criterion needs a primitive target with 2 ≤ v² ≤ 4 or twice a class of square 2; v² = {vv}"),
            });
        };
    let found = |w: MukaiVector, c: Int, kind: WallType, what: &str| Classification {
        kind,
        reason: format!("{what} class {w} with ⟨w,v⟩ = {c} ({rule})"),
        certificate: Some(w),
        certificate_pairing: Some(JsonInt(c)),
    };
    if let Some((w, c)) = first_solution(hw, v, d, &div_sph, -2)? {
        return Ok(found(w, c, WallType::Divisorial, "spherical"));
    }
    if let Some((w, c)) = first_solution(hw, v, d, &div_iso, 0)? {
        return Ok(found(w, c, WallType::Divisorial, "isotropic"));
    }
    if let Some((w, c)) = first_solution(hw, v, d, &flop_sph, -2)? {
        return Ok(found(w, c, WallType::Flopping, "spherical"));
    }
    Ok(Classification {
        kind: WallType::FakeOrUnknown,
        certificate: None,
        certificate_pairing: None,
        reason: format!("no spherical or isotropic class with a qualifying pairing ({rule})"),
    })
}

/// Looks for a spherical w in the wall lattice with ⟨w, v⟩ < 0 that passes the
/// effectivity rule; such a class makes the wall totally semistable.
///
/// With the phase rule, w = αv + βu for u ⊥ v gives α = c/v², and im(w) > 0 together
/// with w² = −2 forces c² < 2(v²)²ρ²/K, where ρ = im(u)/im(v) and K = −u² − v²ρ² is
/// minus the square of the class of Z-value zero, hence positive.
pub fn totally_semistable(hw: &Sublattice, v: &MukaiVector, d: u32, effectivity: &Effectivity) -> Result<Semistability> {
    if hw.coordinates(v).is_none() {
        return Err(Error::VectorNotInLattice(v.to_string()));
    }
    let (max_c, certified, label): (Int, bool, &str) = match effectivity {
        Effectivity::RankPositive { bound } => (Int::from(*bound), false, "rank-positive"),
        Effectivity::PhaseAligned { family, .. } => {
            let (_, im_v) = family_eval(family, v, d)?;
            if !im_v.is_positive() {
                return Err(Error::NonPositiveIm);
            }
            match phase_bound(hw, v, d, family, &im_v)? {
                Some(b) => (b, true, "phase-aligned"),
                None => (Int::from(DEFAULT_BOUND), false, "phase-aligned"),
            }
        }
    };
    let effective = |w: &MukaiVector| -> Result<bool> {
        Ok(match effectivity {
            Effectivity::RankPositive { .. } => {
                w.r().is_positive() || (w.r().is_zero() && w.hdeg(d).is_positive())
            }
            Effectivity::PhaseAligned { family, .. } => reduced_im(family, w, d).is_positive(),
        })
    };
    let mut c = int(-1);
    while -&c <= max_c {
        let (sol, _) = solve_on_line(hw, v, d, &c, &int(-2), DEFAULT_BOUND)?;
        for w in sol {
            if effective(&w)? {
                return Ok(Semistability {
                    totally_semistable: true,
                    witness: Some(w),
                    heuristic: label.into(),
                    max_pairing: JsonInt(max_c),
                    certified,
                });
            }
        }
        c -= 1;
    }
    Ok(Semistability {
        totally_semistable: false,
        witness: None,
        heuristic: label.into(),
        max_pairing: JsonInt(max_c),
        certified,
    })
}

fn phase_bound(hw: &Sublattice, v: &MukaiVector, d: u32, f: &CharteredFamily, im_v: &Rat) -> Result<Option<Int>> {
    let vv = ratz(&square(v, d));
    if !vv.is_positive() {
        return Ok(None);
    }
    let e = hw.pairing_row(v, d)?;
    let u = hw.combine(&[e[1].clone(), -&e[0]]);
    let uu = ratz(&square(&u, d));
    let rho = reduced_im(f, &u, d) / im_v;
    let k = -&uu - &vv * &rho * &rho;
    if !k.is_positive() {
        return Ok(None);
    }
    let bound = Rat::from(int(2)) * &vv * &vv * &rho * &rho / k;
    // c² < bound
    Ok(Some(sqrt_floor(&bound)))
}

/// An affine condition coeffs·(r, a, s) = rhs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineConstraint {
    pub coeffs: [JsonRat; 3],
    pub rhs: JsonRat,
}

impl AffineConstraint {
    pub fn new(coeffs: [Rat; 3], rhs: Rat) -> Self {
        let [a, b, c] = coeffs;
        AffineConstraint { coeffs: [JsonRat(a), JsonRat(b), JsonRat(c)], rhs: JsonRat(rhs) }
    }

    pub fn from_i64(coeffs: [i64; 3], rhs: i64) -> Self {
        Self::new(coeffs.map(|x| Rat::from(int(x))), Rat::from(int(rhs)))
    }

    /// ⟨w, u⟩ = value for a fixed exact u.
    pub fn pairing_with(u: &MukaiVector, d: u32, value: i64) -> Result<Self> {
        let c = u.require_coords()?;
        let g = mukai_gram(d);
        let row = matrix::mul_vec(&g, &c);
        Ok(Self::new([ratz(&row[0]), ratz(&row[1]), ratz(&row[2])], Rat::from(int(value))))
    }

    pub fn holds(&self, c: &[Int]) -> bool {
        let lhs: Rat = self.coeffs.iter().zip(c).map(|(k, x)| &k.0 * ratz(x)).sum();
        lhs == self.rhs.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumeration {
    pub classes: Vec<MukaiVector>,
    /// False when the answer is only complete inside the box.
    pub complete: bool,
}

/// Exact classes of the given square satisfying all constraints.
pub fn enumerate_constrained(d: u32, target_square: i64, constraints: &[AffineConstraint], bx: u64) -> Result<Enumeration> {
    let rows: Vec<(Vec<Int>, Int)> = constraints
        .iter()
        .map(|c| {
            let mut q: Vec<Rat> = c.coeffs.iter().map(|x| x.0.clone()).collect();
            q.push(c.rhs.0.clone());
            let l = q.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
            let z: Vec<Int> = q.iter().map(|x| (x * ratz(&l)).to_integer()).collect();
            (z[..3].to_vec(), z[3].clone())
        })
        .collect();
    let m: Vec<Vec<Int>> = rows.iter().map(|r| r.0.clone()).collect();
    let b: Vec<Int> = rows.iter().map(|r| r.1.clone()).collect();
    let target = int(target_square);
    let Some((x0, kernel)) = (if m.is_empty() {
        Some((vec![Int::zero(); 3], matrix::identity(3)))
    } else {
        matrix::solve_affine(&m, &b, 3)
    }) else {
        return Ok(Enumeration { classes: Vec::new(), complete: true });
    };
    let bil = |x: &[Int], y: &[Int]| -> Int { crate::lattice::pair_coords(x, y, d) };
    let point = |z: &[Int]| -> Vec<Int> {
        let mut p = x0.clone();
        for (zi, k) in z.iter().zip(&kernel) {
            for j in 0..3 {
                p[j] += zi * &k[j];
            }
        }
        p
    };
    // square(x0 + Σ z_i k_i) = const + Σ lin_i z_i + Σ quad_ij z_i z_j
    let n = kernel.len();
    let cst = bil(&x0, &x0) - &target;
    let lin: Vec<Int> = kernel.iter().map(|k| int(2) * bil(k, &x0)).collect();
    let quad: Vec<Vec<Int>> = kernel.iter().map(|a| kernel.iter().map(|b| bil(a, b)).collect()).collect();

    let mut found: BTreeSet<Vec<Int>> = BTreeSet::new();
    let mut complete = true;
    match n {
        0 => {
            if cst.is_zero() {
                found.insert(x0.clone());
            }
        }
        1 => {
            let (a, bb) = (&quad[0][0], &lin[0]);
            if a.is_zero() && bb.is_zero() {
                if cst.is_zero() {
                    complete = false;
                    box_search(d, &target, constraints, bx, &mut found);
                }
            } else {
                for z in integer_roots(a, bb, &cst) {
                    found.insert(point(&[z]));
                }
            }
        }
        2 => {
            complete = two_parameter(&quad, &lin, &cst, &point, &mut found);
            if !complete {
                box_search(d, &target, constraints, bx, &mut found);
            }
        }
        _ => {
            complete = false;
            box_search(d, &target, constraints, bx, &mut found);
        }
    }
    let classes = found.iter().map(|c| MukaiVector::from_coords(c)).collect();
    Ok(Enumeration { classes, complete })
}

/// Solves q00 z0² + 2 q01 z0 z1 + q11 z1² + l0 z0 + l1 z1 + c = 0 when the solution
/// set is provably finite; returns false otherwise.
fn two_parameter(
    quad: &[Vec<Int>],
    lin: &[Int],
    cst: &Int,
    point: &dyn Fn(&[Int]) -> Vec<Int>,
    found: &mut BTreeSet<Vec<Int>>,
) -> bool {
    for (i, j) in [(0usize, 1usize), (1, 0)] {
        // treat z_j as the dependent variable
        let (aii, ajj, aij) = (&quad[i][i], &quad[j][j], int(2) * &quad[i][j]);
        let order = |zi: Int, zj: Int| if i == 0 { [zi, zj] } else { [zj, zi] };
        if ajj.is_zero() {
            // linear in z_j: (aij·zi + l_j)·zj = −(aii zi² + l_i zi + c)
            let (b1, b0) = (aij.clone(), lin[j].clone());
            let p = |zi: &Int| -(aii * zi * zi + &lin[i] * zi + cst);
            if b1.is_zero() {
                // z_j is free or determined by every z_i: not finite in this order
                continue;
            }
            // (b1 zi + b0) divides b1²·p(zi), hence b1²·p(−b0/b1)
            let rho = -(aii * &b0 * &b0 - &lin[i] * &b0 * &b1 + cst * &b1 * &b1);
            if rho.is_zero() {
                continue;
            }
            for dv in divisors(&rho) {
                for den in [dv.clone(), -dv] {
                    let num = &den - &b0;
                    if !num.is_multiple_of(&b1) {
                        continue;
                    }
                    let zi = num / &b1;
                    let pv = p(&zi);
                    if pv.is_multiple_of(&den) {
                        let zj = pv / &den;
                        found.insert(point(&order(zi, zj)));
                    }
                }
            }
            return true;
        }
        // discriminant in z_j as a quadratic in z_i must have a negative leading term
        // disc(zi) = (aij zi + l_j)² − 4 ajj (aii zi² + l_i zi + c)
        let d2 = &aij * &aij - int(4) * ajj * aii;
        let d1 = int(2) * &aij * &lin[j] - int(4) * ajj * &lin[i];
        let d0 = &lin[j] * &lin[j] - int(4) * ajj * cst;
        if !d2.is_negative() {
            continue;
        }
        let Some((lo, hi)) = concave_interval(&ratz(&d2), &ratz(&d1), &ratz(&d0)) else {
            return true;
        };
        let mut zi = lo;
        while zi <= hi {
            let b = &aij * &zi + &lin[j];
            let c = aii * &zi * &zi + &lin[i] * &zi + cst;
            for zj in integer_roots(ajj, &b, &c) {
                found.insert(point(&order(zi.clone(), zj)));
            }
            zi += 1;
        }
        return true;
    }
    false
}

fn box_search(d: u32, target: &Int, constraints: &[AffineConstraint], bx: u64, found: &mut BTreeSet<Vec<Int>>) {
    let b = Int::from(bx);
    let h2 = Int::from(2 * d as u64);
    let mut r = -&b;
    while r <= b {
        let mut a = -&b;
        while a <= b {
            let num = &h2 * &a * &a - target;
            let candidates: Vec<Int> = if r.is_zero() {
                if num.is_zero() {
                    let mut all = Vec::new();
                    let mut s = -&b;
                    while s <= b {
                        all.push(s.clone());
                        s += 1;
                    }
                    all
                } else {
                    Vec::new()
                }
            } else {
                let den = int(2) * &r;
                if num.is_multiple_of(&den) { vec![&num / &den] } else { Vec::new() }
            };
            for s in candidates {
                let c = vec![r.clone(), a.clone(), s];
                if c[2].abs() <= b && constraints.iter().all(|k| k.holds(&c)) {
                    found.insert(c);
                }
            }
            a += 1;
        }
        r += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::{gm_family_2, quartic_family};
    use crate::lattice::pair;
    use crate::num::rat;

    fn v(r: i64, a: i64, s: i64) -> MukaiVector {
        MukaiVector::exact(r, a, s)
    }

    fn walls(f: &CharteredFamily, target: MukaiVector, d: u32) -> WallSearch {
        find_walls(f, &target, d, Mode::Exact, &rat(0, 1), &rat(10, 1), None).unwrap()
    }

    #[test]
    fn quartic_u1_is_generic() {
        let w = walls(&quartic_family(), v(1, 0, -1), 2);
        assert!(w.walls.is_empty());
        assert!(w.certified);
    }

    #[test]
    fn quartic_2u1() {
        let w = walls(&quartic_family(), v(2, 0, -2), 2);
        assert_eq!(w.walls.len(), 1);
        let r = &w.walls[0];
        assert_eq!(r.t.0, rat(0, 1));
        assert_eq!((r.destabilizer.clone(), r.quotient.clone()), (v(3, -1, 1), v(-1, 1, -3)));
        assert_eq!(r.classification.kind, WallType::Flopping);
        assert!(!r.totally_semistable.totally_semistable);
        assert!(r.totally_semistable.certified);
        assert_eq!(r.hw.rows(), matrix::from_i64(&[&[1, 0, -1], &[0, 1, -4]]));
        assert_eq!(r.hw.lattice.gram, matrix::from_i64(&[&[2, 4], &[4, 4]]));
    }

    #[test]
    fn quartic_line_class_target() {
        let w = walls(&quartic_family(), v(0, 1, -2), 2);
        let summary: Vec<_> = w
            .walls
            .iter()
            .map(|r| (r.t.0.clone(), r.destabilizer.clone(), r.quotient.clone(), r.classification.kind))
            .collect();
        assert_eq!(
            summary,
            vec![
                (rat(0, 1), v(1, 0, 0), v(-1, 1, -2), WallType::Divisorial),
                (rat(1, 1), v(1, 0, 1), v(-1, 1, -3), WallType::Flopping),
            ]
        );
        assert_eq!(w.walls[1].t_linear.to_string(), "√3");
    }

    #[test]
    fn gm2_walls() {
        let w = walls(&gm_family_2(), v(1, 0, -2), 5);
        assert_eq!(w.walls.len(), 1);
        let r = &w.walls[0];
        assert_eq!(r.t.0, rat(1, 5));
        assert_eq!((r.destabilizer.clone(), r.quotient.clone()), (v(2, -1, 3), v(-1, 1, -5)));
        assert_eq!(r.classification.kind, WallType::Flopping);
        assert!(walls(&gm_family_2(), v(2, -1, 2), 5).walls.is_empty());
    }

    #[test]
    fn abstract_mode_flags_line_classes() {
        let f = quartic_family();
        let w = find_walls(&f, &v(1, 0, -1), 2, Mode::Abstract, &rat(0, 1), &rat(10, 1), None).unwrap();
        assert!(!w.walls.is_empty());
        for r in &w.walls {
            assert!(r.requires_geometric_input);
            assert!(!r.destabilizer.is_exact() || !r.quotient.is_exact());
        }
        // the exact walls of (0,H,−2) persist in abstract mode
        let a = find_walls(&f, &v(0, 1, -2), 2, Mode::Abstract, &rat(0, 1), &rat(10, 1), None).unwrap();
        let exact: Vec<_> = a.walls.iter().filter(|r| !r.requires_geometric_input).map(|r| r.t.0.clone()).collect();
        assert!(exact.contains(&rat(0, 1)) && exact.contains(&rat(1, 1)));
    }

    #[test]
    fn errors() {
        let f = quartic_family();
        assert_eq!(
            find_walls(&f, &v(-1, 0, 0), 2, Mode::Exact, &rat(0, 1), &rat(1, 1), None).unwrap_err(),
            Error::NonPositiveIm
        );
        assert!(matches!(
            find_walls(&f, &v(1, 0, -1), 2, Mode::Exact, &rat(2, 1), &rat(1, 1), None),
            Err(Error::EmptyRange(..))
        ));
    }

    #[test]
    fn hyperbolic_lattice_contains_v() {
        let f = quartic_family();
        for t in [rat(0, 1), rat(1, 3), rat(7, 2)] {
            let hw = hyperbolic_lattice(&f, &v(2, 0, -2), 2, &t).unwrap();
            assert!(hw.coordinates(&v(2, 0, -2)).is_some());
            // r + 2(t+2)a + s = 0
            for b in &hw.basis {
                let c = b.coords().unwrap();
                let lhs = ratz(&c[0]) + rat(2, 1) * (&t + rat(2, 1)) * ratz(&c[1]) + ratz(&c[2]);
                assert!(lhs.is_zero());
            }
        }
    }

    #[test]
    fn classification_examples() {
        let f = quartic_family();
        let hw = hyperbolic_lattice(&f, &v(0, 1, -2), 2, &rat(0, 1)).unwrap();
        let c = classify_wall(&hw, &v(0, 1, -2), 2).unwrap();
        assert_eq!(c.kind, WallType::Divisorial);
        let hw = hyperbolic_lattice(&gm_family_2(), &v(1, 0, -2), 5, &rat(1, 5)).unwrap();
        let c = classify_wall(&hw, &v(1, 0, -2), 5).unwrap();
        assert_eq!(c.kind, WallType::Flopping);
        assert_eq!(c.certificate_pairing.unwrap().0, int(1));
        // a lattice spanned by (1,0,0) and (0,0,1) at d = 2 holds no spherical class
        let hw = Sublattice::from_rows(&matrix::from_i64(&[&[1, 0, 0], &[0, 0, 1]]), 2).unwrap();
        let c = classify_wall(&hw, &v(1, 0, -1), 2).unwrap();
        assert_eq!(c.kind, WallType::Divisorial); // (1,0,0) is isotropic with ⟨,⟩ = 1
        assert!(matches!(classify_wall(&hw, &v(0, 1, 0), 2), Err(Error::VectorNotInLattice(_))));
    }

    #[test]
    fn totally_semistable_examples() {
        let f = quartic_family();
        let v2 = v(2, 0, -2);
        let hw = hyperbolic_lattice(&f, &v2, 2, &rat(0, 1)).unwrap();
        let phase = Effectivity::PhaseAligned { family: f.clone(), t: JsonRat(rat(0, 1)) };
        assert!(!totally_semistable(&hw, &v2, 2, &phase).unwrap().totally_semistable);
        // the rank heuristic accepts (1,−H,3), which has the opposite phase
        let rank = totally_semistable(&hw, &v2, 2, &Effectivity::RankPositive { bound: 8 }).unwrap();
        assert!(rank.totally_semistable);
        assert_eq!(rank.witness, Some(v(1, -1, 3)));
        // synthetic: (1,0,1) against the point class
        let hw = Sublattice::from_rows(&matrix::from_i64(&[&[1, 0, 0], &[0, 0, 1]]), 2).unwrap();
        let s = totally_semistable(&hw, &v(0, 0, 1), 2, &Effectivity::RankPositive { bound: 4 }).unwrap();
        assert_eq!(s.witness, Some(v(1, 0, 1)));
        assert_eq!(pair(&v(1, 0, 1), &v(0, 0, 1), 2).unwrap(), int(-1));
        // −(1,0,1) pairs negatively with (0,0,−1) but fails the rank rule
        let s = totally_semistable(&hw, &v(0, 0, -1), 2, &Effectivity::RankPositive { bound: 4 }).unwrap();
        assert!(!s.totally_semistable);
    }

    #[test]
    fn constrained_enumeration() {
        let e = enumerate_constrained(2, 0, &[AffineConstraint::from_i64([1, 2, 0], 1)], 10).unwrap();
        assert!(e.complete);
        assert_eq!(e.classes, vec![v(-1, 1, -2), v(1, 0, 0)]);
        let hw_eq = AffineConstraint::from_i64([0, 2, 1], 0);
        let perp = AffineConstraint::pairing_with(&v(0, 1, -2), 2, 0).unwrap();
        let e = enumerate_constrained(2, -2, &[hw_eq, perp], 10).unwrap();
        assert!(e.complete && e.classes.is_empty());
        let e = enumerate_constrained(2, -2, &[], 2).unwrap();
        assert!(!e.complete);
        assert!(e.classes.contains(&v(1, 0, 1)));
        for w in &e.classes {
            assert_eq!(square(w, 2), int(-2));
        }
    }
}
