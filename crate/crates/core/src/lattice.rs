//! The algebraic Mukai lattice ℤ ⊕ ℤH ⊕ ℤ of a polarized K3 surface with H² = 2d,
//! abstract divisor classes carried by their numerical invariants, and Gram lattices.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix};
use crate::num::{int, json_int_matrix, from_json_int_matrix, Int, JsonInt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub d: u32,
}

impl SurfaceParams {
    pub fn new(d: i64) -> Result<Self> {
        match u32::try_from(d) {
            Ok(d) if d >= 1 => Ok(SurfaceParams { d }),
            _ => Err(Error::InvalidDegree(d)),
        }
    }

    /// H² = 2d.
    pub fn h2(&self) -> Int {
        Int::from(2 * self.d as u64)
    }
}

/// Divisor part Δ of a Mukai vector: either an exact multiple aH, or an abstract
/// class known only through Δ·H and Δ².
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DivisorClass {
    Exact {
        #[serde(rename = "exact")]
        a: JsonInt,
    },
    Abstract { hdeg: JsonInt, sq: JsonInt },
}

impl DivisorClass {
    pub fn exact(a: Int) -> Self {
        DivisorClass::Exact { a: JsonInt(a) }
    }

    pub fn abstract_class(hdeg: Int, sq: Int) -> Self {
        DivisorClass::Abstract { hdeg: JsonInt(hdeg), sq: JsonInt(sq) }
    }

    pub fn as_exact(&self) -> Option<&Int> {
        match self {
            DivisorClass::Exact { a } => Some(&a.0),
            DivisorClass::Abstract { .. } => None,
        }
    }

    /// Δ·H.
    pub fn hdeg(&self, d: u32) -> Int {
        match self {
            DivisorClass::Exact { a } => &a.0 * Int::from(2 * d as u64),
            DivisorClass::Abstract { hdeg, .. } => hdeg.0.clone(),
        }
    }

    /// Δ².
    pub fn sq(&self, d: u32) -> Int {
        match self {
            DivisorClass::Exact { a } => &a.0 * &a.0 * Int::from(2 * d as u64),
            DivisorClass::Abstract { sq, .. } => sq.0.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            DivisorClass::Exact { a } => DivisorClass::exact(-&a.0),
            DivisorClass::Abstract { hdeg, sq } => {
                DivisorClass::abstract_class(-&hdeg.0, sq.0.clone())
            }
        }
    }

    /// eps·Δ + ℓH.
    pub fn transform(&self, eps: i8, ell: &Int, d: u32) -> Self {
        let h2 = Int::from(2 * d as u64);
        match self {
            DivisorClass::Exact { a } => DivisorClass::exact(Int::from(eps) * &a.0 + ell),
            DivisorClass::Abstract { hdeg, sq } => {
                let e = Int::from(eps);
                DivisorClass::abstract_class(
                    &e * &hdeg.0 + &h2 * ell,
                    &sq.0 + int(2) * &e * ell * &hdeg.0 + &h2 * ell * ell,
                )
            }
        }
    }

    /// Rewrites an abstract class that is numerically a multiple of H as exact.
    pub fn normalized(&self, d: u32) -> Self {
        if let DivisorClass::Abstract { hdeg, sq } = self {
            let h2 = Int::from(2 * d as u64);
            if hdeg.0.is_multiple_of(&h2) && &hdeg.0 * &hdeg.0 == &sq.0 * &h2 {
                return DivisorClass::exact(&hdeg.0 / &h2);
            }
        }
        self.clone()
    }
}

/// Hodge index feasibility: 2d·Δ² < (Δ·H)², or Δ numerically proportional to H.
pub fn hodge_feasible(div: &DivisorClass, d: u32) -> bool {
    match div {
        DivisorClass::Exact { .. } => true,
        DivisorClass::Abstract { hdeg, sq } => {
            let h2 = Int::from(2 * d as u64);
            if sq.0.is_odd() {
                return false;
            }
            let lhs = &h2 * &sq.0;
            let rhs = &hdeg.0 * &hdeg.0;
            lhs < rhs || (hdeg.0.is_multiple_of(&h2) && lhs == rhs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MukaiVector {
    pub r: JsonInt,
    pub div: DivisorClass,
    pub s: JsonInt,
}

impl MukaiVector {
    pub fn new(r: Int, div: DivisorClass, s: Int) -> Self {
        MukaiVector { r: JsonInt(r), div, s: JsonInt(s) }
    }

    pub fn exact(r: i64, a: i64, s: i64) -> Self {
        Self::new(int(r), DivisorClass::exact(int(a)), int(s))
    }

    pub fn from_coords(c: &[Int]) -> Self {
        assert_eq!(c.len(), 3, "exact coordinates are (r, a, s)");
        Self::new(c[0].clone(), DivisorClass::exact(c[1].clone()), c[2].clone())
    }

    pub fn abstract_vector(r: i64, hdeg: i64, sq: i64, s: i64) -> Self {
        Self::new(int(r), DivisorClass::abstract_class(int(hdeg), int(sq)), int(s))
    }

    pub fn r(&self) -> &Int {
        &self.r.0
    }

    pub fn s(&self) -> &Int {
        &self.s.0
    }

    pub fn a(&self) -> Option<&Int> {
        self.div.as_exact()
    }

    pub fn is_exact(&self) -> bool {
        self.a().is_some()
    }

    /// (r, a, s) for exact vectors.
    pub fn coords(&self) -> Option<Vec<Int>> {
        self.a().map(|a| vec![self.r().clone(), a.clone(), self.s().clone()])
    }

    pub fn require_coords(&self) -> Result<Vec<Int>> {
        self.coords().ok_or_else(|| Error::NotExact(self.to_string()))
    }

    pub fn hdeg(&self, d: u32) -> Int {
        self.div.hdeg(d)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.r(), self.div.neg(), -self.s())
    }

    /// Sum of two vectors; at most one of them may carry an abstract divisor.
    pub fn add(&self, other: &Self, d: u32) -> Result<Self> {
        let div = match (&self.div, &other.div) {
            (DivisorClass::Exact { a }, DivisorClass::Exact { a: b }) => {
                DivisorClass::exact(&a.0 + &b.0)
            }
            (DivisorClass::Exact { a }, abs @ DivisorClass::Abstract { .. })
            | (abs @ DivisorClass::Abstract { .. }, DivisorClass::Exact { a }) => {
                abs.transform(1, &a.0, d)
            }
            _ => return Err(Error::UndefinedCrossTerm),
        };
        Ok(Self::new(self.r() + other.r(), div, self.s() + other.s()))
    }

    pub fn sub(&self, other: &Self, d: u32) -> Result<Self> {
        self.add(&other.neg(), d)
    }

    pub fn scale(&self, k: &Int) -> Self {
        let div = match &self.div {
            DivisorClass::Exact { a } => DivisorClass::exact(&a.0 * k),
            DivisorClass::Abstract { hdeg, sq } => {
                DivisorClass::abstract_class(&hdeg.0 * k, &sq.0 * k * k)
            }
        };
        Self::new(self.r() * k, div, self.s() * k)
    }

    pub fn check_feasible(&self, d: u32) -> Result<()> {
        if hodge_feasible(&self.div, d) {
            Ok(())
        } else {
            Err(Error::InfeasibleDivisor(self.to_string()))
        }
    }

    pub fn normalized(&self, d: u32) -> Self {
        Self::new(self.r().clone(), self.div.normalized(d), self.s().clone())
    }

    /// gcd of the exact coordinates is 1.
    pub fn is_primitive(&self) -> bool {
        self.coords().is_some_and(|c| matrix::content(&c).is_one())
    }
}

fn fmt_h(a: &Int) -> String {
    if a.is_zero() {
        "0".into()
    } else if a.is_one() {
        "H".into()
    } else if *a == int(-1) {
        "-H".into()
    } else {
        format!("{a}H")
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.div {
            DivisorClass::Exact { a } => write!(f, "({},{},{})", self.r(), fmt_h(&a.0), self.s()),
            DivisorClass::Abstract { hdeg, sq } => write!(
                f,
                "({},Δ[Δ.H={},Δ²={}],{})",
                self.r(),
                hdeg.0,
                sq.0,
                self.s()
            ),
        }
    }
}

/// Parses "r,a,s" (the middle entry may be written "H", "-H", "3H") or
/// "r,hdeg:sq,s" for an abstract divisor; surrounding parentheses are optional.
impl FromStr for MukaiVector {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse Mukai vector {text:?}"));
        let t = text.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let r = Int::from_str(parts[0]).map_err(|_| bad())?;
        let s = Int::from_str(parts[2]).map_err(|_| bad())?;
        let mid = parts[1];
        let div = if let Some((h, q)) = mid.split_once(':') {
            let h = Int::from_str(h.trim()).map_err(|_| bad())?;
            let q = Int::from_str(q.trim()).map_err(|_| bad())?;
            DivisorClass::abstract_class(h, q)
        } else if let Some(coef) = mid.strip_suffix('H') {
            let a = match coef.trim() {
                "" | "+" => Int::one(),
                "-" => int(-1),
                c => Int::from_str(c).map_err(|_| bad())?,
            };
            DivisorClass::exact(a)
        } else {
            DivisorClass::exact(Int::from_str(mid).map_err(|_| bad())?)
        };
        Ok(MukaiVector::new(r, div, s))
    }
}

/// Gram matrix of the exact coordinates (r, a, s).
pub fn mukai_gram(d: u32) -> IntMatrix {
    let h2 = 2 * d as i64;
    matrix::from_i64(&[&[0, 0, -1], &[0, h2, 0], &[-1, 0, 0]])
}

/// Mukai pairing of exact coordinate vectors.
pub fn pair_coords(x: &[Int], y: &[Int], d: u32) -> Int {
    Int::from(2 * d as u64) * &x[1] * &y[1] - &x[0] * &y[2] - &x[2] * &y[0]
}

/// ⟨v, w⟩ = Δ₁·Δ₂ − r₁s₂ − r₂s₁.
pub fn pair(v: &MukaiVector, w: &MukaiVector, d: u32) -> Result<Int> {
    let cross = match (&v.div, &w.div) {
        (DivisorClass::Exact { a }, DivisorClass::Exact { a: b }) => {
            Int::from(2 * d as u64) * &a.0 * &b.0
        }
        (DivisorClass::Exact { a }, DivisorClass::Abstract { hdeg, .. })
        | (DivisorClass::Abstract { hdeg, .. }, DivisorClass::Exact { a }) => &a.0 * &hdeg.0,
        _ => return Err(Error::UndefinedCrossTerm),
    };
    Ok(cross - v.r() * w.s() - w.r() * v.s())
}

pub fn square(v: &MukaiVector, d: u32) -> Int {
    v.div.sq(d) - int(2) * v.r() * v.s()
}

pub fn is_spherical(v: &MukaiVector, d: u32) -> bool {
    square(v, d) == int(-2)
}

pub fn is_isotropic(v: &MukaiVector, d: u32) -> bool {
    square(v, d).is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GramRepr", into = "GramRepr")]
pub struct GramLattice {
    pub gram: IntMatrix,
    pub labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct GramRepr {
    rank: usize,
    gram: Vec<Vec<JsonInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl From<GramLattice> for GramRepr {
    fn from(g: GramLattice) -> Self {
        GramRepr { rank: g.rank(), gram: json_int_matrix(&g.gram), labels: g.labels }
    }
}

impl TryFrom<GramRepr> for GramLattice {
    type Error = Error;
    fn try_from(r: GramRepr) -> Result<Self> {
        let g = GramLattice::new(from_json_int_matrix(r.gram))?;
        if g.rank() != r.rank {
            return Err(Error::InvalidInput("rank differs from Gram dimension".into()));
        }
        Ok(GramLattice { labels: r.labels, ..g })
    }
}

impl GramLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("Gram matrix must be square and non-empty".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidInput("Gram matrix must be symmetric".into()));
                }
            }
        }
        Ok(GramLattice { gram, labels: None })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::new(matrix::from_i64(rows)).expect("valid Gram matrix")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> Int {
        matrix::det(&self.gram)
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Self {
        self.labels = Some(labels.iter().map(|s| s.to_string()).collect());
        self
    }
}

/// A sublattice of the exact rank-3 lattice with its basis and Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sublattice {
    pub basis: Vec<MukaiVector>,
    pub lattice: GramLattice,
}

impl Sublattice {
    /// Builds the sublattice spanned by the given exact coordinate rows.
    pub fn from_rows(rows: &[Vec<Int>], d: u32) -> Result<Self> {
        let basis: Vec<MukaiVector> = rows.iter().map(|r| MukaiVector::from_coords(r)).collect();
        let gram = rows
            .iter()
            .map(|x| rows.iter().map(|y| pair_coords(x, y, d)).collect())
            .collect();
        Ok(Sublattice { basis, lattice: GramLattice::new(gram)? })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn rows(&self) -> IntMatrix {
        self.basis.iter().map(|b| b.coords().expect("exact basis")).collect()
    }

    /// Integer coordinates of `v` in the basis, if `v` lies in the sublattice.
    pub fn coordinates(&self, v: &MukaiVector) -> Option<Vec<Int>> {
        let c = v.coords()?;
        let cols = matrix::transpose(&self.rows());
        let (x, kernel) = matrix::solve_affine(&cols, &c, self.rank())?;
        debug_assert!(kernel.is_empty());
        Some(x)
    }

    pub fn combine(&self, coeffs: &[Int]) -> MukaiVector {
        let rows = self.rows();
        let mut out = vec![Int::zero(); 3];
        for (k, row) in coeffs.iter().zip(&rows) {
            for i in 0..3 {
                out[i] += k * &row[i];
            }
        }
        MukaiVector::from_coords(&out)
    }

    pub fn pairing_row(&self, v: &MukaiVector, d: u32) -> Result<Vec<Int>> {
        self.basis.iter().map(|b| pair(b, v, d)).collect()
    }
}

/// Saturated basis (Hermite form) of the integer kernel of `m`, which has `n` columns.
pub fn integer_kernel(m: &[Vec<Int>], n: usize) -> IntMatrix {
    matrix::integer_kernel(m, n)
}

/// The rank-2 orthogonal complement of a primitive exact vector.
pub fn perp(v: &MukaiVector, d: u32) -> Result<Sublattice> {
    let c = v.require_coords()?;
    if !matrix::content(&c).is_one() {
        return Err(Error::NonPrimitive(v.to_string()));
    }
    let g = mukai_gram(d);
    let row = matrix::mul_vec(&g, &c);
    let k = integer_kernel(&[row], 3);
    Sublattice::from_rows(&k, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: i64, a: i64, s: i64) -> MukaiVector {
        MukaiVector::exact(r, a, s)
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pair(&v(0, 0, 1), &v(0, 0, 1), 2).unwrap(), int(0));
        assert_eq!(pair(&v(2, -1, 3), &v(2, -1, 3), 5).unwrap(), int(-2));
        assert_eq!(pair(&v(1, 0, -1), &v(1, 0, -1), 2).unwrap(), int(2));
        assert_eq!(square(&v(2, 0, -2), 2), int(8));
        assert!(is_spherical(&v(1, 0, 1), 2));
        assert!(is_isotropic(&v(1, 0, 0), 2));
        assert!(!is_spherical(&v(-1, 1, -5), 5));
        assert!(is_isotropic(&v(-1, 1, -5), 5));
    }

    #[test]
    fn abstract_pairings() {
        let line = MukaiVector::abstract_vector(0, 1, -2, -1);
        assert_eq!(square(&line, 2), int(-2));
        assert_eq!(pair(&line, &v(1, 1, 0), 2).unwrap(), int(1 + 1));
        assert_eq!(pair(&line, &line, 2), Err(Error::UndefinedCrossTerm));
        let sum = line.add(&v(1, 1, 0), 2).unwrap();
        assert_eq!(sum.div, DivisorClass::abstract_class(int(5), int(-2 + 2 + 4)));
        assert!(line.add(&line, 2).is_err());
    }

    #[test]
    fn hodge_feasibility() {
        assert!(hodge_feasible(&DivisorClass::exact(int(7)), 2));
        assert!(hodge_feasible(&DivisorClass::abstract_class(int(1), int(-2)), 2));
        // 2d·Δ² = 0 < 1 = (Δ·H)², so the Hodge index bound allows this class
        assert!(hodge_feasible(&DivisorClass::abstract_class(int(1), int(0)), 2));
        assert!(!hodge_feasible(&DivisorClass::abstract_class(int(1), int(2)), 2));
        assert!(!hodge_feasible(&DivisorClass::abstract_class(int(2), int(1)), 2));
        // proportional branch: Δ = H
        assert!(hodge_feasible(&DivisorClass::abstract_class(int(4), int(4)), 2));
        // equality without divisibility is excluded
        assert!(!hodge_feasible(&DivisorClass::abstract_class(int(4), int(2)), 4));
    }

    #[test]
    fn perp_examples() {
        let p = perp(&v(0, 0, 1), 2).unwrap();
        assert_eq!(p.rows(), matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(p.lattice.gram, matrix::from_i64(&[&[4, 0], &[0, 0]]));
        let p = perp(&v(1, 0, -1), 2).unwrap();
        assert!(p.coordinates(&v(1, 0, 1)).is_some());
        assert!(p.coordinates(&v(0, 1, 0)).is_some());
        let p = perp(&v(1, 0, 1), 2).unwrap();
        for b in &p.basis {
            assert!(pair(b, &v(1, 0, 1), 2).unwrap().is_zero());
        }
        assert!(matches!(perp(&v(2, 0, -2), 2), Err(Error::NonPrimitive(_))));
    }

    #[test]
    fn parse_and_display() {
        let w: MukaiVector = "(3,-H,1)".parse().unwrap();
        assert_eq!(w, v(3, -1, 1));
        assert_eq!(w.to_string(), "(3,-H,1)");
        assert_eq!("0,1:-2,-1".parse::<MukaiVector>().unwrap(), MukaiVector::abstract_vector(0, 1, -2, -1));
        assert_eq!("2,0,-2".parse::<MukaiVector>().unwrap(), v(2, 0, -2));
        assert!("1,2".parse::<MukaiVector>().is_err());
    }
}
