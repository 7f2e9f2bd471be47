//! Isometries of the algebraic Mukai lattice.
//!
//! An isometry is stored as a sign `eps` on the divisor direction together with three
//! linear forms in (r, Δ·H, s) giving r', the H-multiplier ℓ and s', so that
//! Δ ↦ eps·Δ + ℓH. This acts on abstract divisor classes as well as on exact ones;
//! the 3×3 matrix on exact coordinates (r, a, s) is derived from it.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, is_spherical, mukai_gram, MukaiVector, Sublattice};
use crate::matrix::{self, IntMatrix, RatMatrix};
use crate::num::{as_int, int, ratz, Int, JsonRat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IsometryRepr", into = "IsometryRepr")]
pub struct LatticeIsometry {
    d: u32,
    eps: i8,
    forms: [[Rat; 3]; 3],
}

#[derive(Serialize, Deserialize)]
struct IsometryRepr {
    degree: u32,
    eps: i8,
    forms: Vec<Vec<JsonRat>>,
}

impl From<LatticeIsometry> for IsometryRepr {
    fn from(t: LatticeIsometry) -> Self {
        IsometryRepr {
            degree: t.d,
            eps: t.eps,
            forms: t
                .forms
                .iter()
                .map(|row| row.iter().cloned().map(JsonRat).collect())
                .collect(),
        }
    }
}

impl TryFrom<IsometryRepr> for LatticeIsometry {
    type Error = Error;
    fn try_from(r: IsometryRepr) -> Result<Self> {
        if r.forms.len() != 3 || r.forms.iter().any(|row| row.len() != 3) {
            return Err(Error::InvalidInput("forms must be a 3×3 matrix".into()));
        }
        let f = |i: usize, j: usize| r.forms[i][j].0.clone();
        let forms = [
            [f(0, 0), f(0, 1), f(0, 2)],
            [f(1, 0), f(1, 1), f(1, 2)],
            [f(2, 0), f(2, 1), f(2, 2)],
        ];
        LatticeIsometry::new(r.degree, r.eps, forms)
    }
}

fn q(n: i64) -> Rat {
    ratz(&int(n))
}

fn form(r: i64, h: i64, s: i64) -> [Rat; 3] {
    [q(r), q(h), q(s)]
}

fn dot(f: &[Rat; 3], x: &[Rat; 3]) -> Rat {
    &f[0] * &x[0] + &f[1] * &x[1] + &f[2] * &x[2]
}

impl LatticeIsometry {
    /// Validates integrality, unimodularity and pairing preservation of the induced
    /// exact-mode matrix.
    pub fn new(d: u32, eps: i8, forms: [[Rat; 3]; 3]) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDegree(0));
        }
        if eps != 1 && eps != -1 {
            return Err(Error::InvalidInput(format!("eps must be ±1, got {eps}")));
        }
        let t = LatticeIsometry { d, eps, forms };
        let m = t.try_exact_matrix()?;
        if !matrix::det(&m).abs().is_one() {
            return Err(Error::NotIsometry);
        }
        let g = mukai_gram(d);
        if matrix::congruence(&g, &m) != g {
            return Err(Error::NotIsometry);
        }
        Ok(t)
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn eps(&self) -> i8 {
        self.eps
    }

    pub fn forms(&self) -> &[[Rat; 3]; 3] {
        &self.forms
    }

    fn h2(&self) -> Rat {
        q(2 * self.d as i64)
    }

    fn try_exact_matrix(&self) -> Result<IntMatrix> {
        let h2 = self.h2();
        let f = &self.forms;
        let rows = [
            [f[0][0].clone(), &f[0][1] * &h2, f[0][2].clone()],
            [f[1][0].clone(), q(self.eps as i64) + &f[1][1] * &h2, f[1][2].clone()],
            [f[2][0].clone(), &f[2][1] * &h2, f[2][2].clone()],
        ];
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        as_int(x).ok_or_else(|| {
                            Error::NonIntegral("exact-mode matrix entry".to_string())
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Matrix on exact coordinates (r, a, s) (column convention: v' = M v).
    pub fn exact_matrix(&self) -> IntMatrix {
        self.try_exact_matrix().expect("integrality is checked at construction")
    }

    /// Matrix on (r, Δ·H, s).
    fn full_matrix(&self) -> RatMatrix {
        let h2 = self.h2();
        let mut mid: Vec<Rat> = self.forms[1].iter().map(|x| x * &h2).collect();
        mid[1] += q(self.eps as i64);
        vec![self.forms[0].to_vec(), mid, self.forms[2].to_vec()]
    }

    pub fn identity(d: u32) -> Self {
        Self::new(d, 1, [form(1, 0, 0), form(0, 0, 0), form(0, 0, 1)]).expect("identity")
    }

    /// The shift [1], acting as −id.
    pub fn shift(d: u32) -> Self {
        Self::new(d, -1, [form(-1, 0, 0), form(0, 0, 0), form(0, 0, -1)]).expect("shift")
    }

    /// Tensoring by O(H): (r, Δ, s) ↦ (r, Δ + rH, s + Δ·H + r·d).
    pub fn tensor_h(d: u32) -> Self {
        Self::new(d, 1, [form(1, 0, 0), form(1, 0, 0), form(d as i64, 1, 1)]).expect("tensor")
    }

    /// Reflection w ↦ w + ⟨w, u⟩u in a spherical class u with exact divisor part.
    pub fn twist(u: &MukaiVector, d: u32) -> Result<Self> {
        let c = u.require_coords()?;
        if !is_spherical(u, d) {
            return Err(Error::NotSpherical(u.to_string()));
        }
        let (ua, ub, uc) = (ratz(&c[0]), ratz(&c[1]), ratz(&c[2]));
        // ⟨w, u⟩ = ub·(Δ·H) − uc·r − ua·s
        let p = [-&uc, ub.clone(), -&ua];
        let add = |base: [Rat; 3], k: &Rat| -> [Rat; 3] {
            [&base[0] + k * &p[0], &base[1] + k * &p[1], &base[2] + k * &p[2]]
        };
        let forms = [
            add(form(1, 0, 0), &ua),
            add(form(0, 0, 0), &ub),
            add(form(0, 0, 1), &uc),
        ];
        Self::new(d, 1, forms)
    }

    /// Tensor by O(H) followed by the reflection in (1, 0, 1).
    pub fn rotation(d: u32) -> Self {
        let o = MukaiVector::exact(1, 0, 1);
        Self::tensor_h(d).then(&Self::twist(&o, d).expect("(1,0,1) is spherical"))
    }

    /// Square of the degree-4 rotation, composed with the shift.
    pub fn tau_q() -> Self {
        Self::rotation(2).pow(2).neg()
    }

    /// −(T_(1,0,1) ∘ T_(2,H,3) ∘ (− ⊗ O(H))) on degree 10.
    pub fn tau_1() -> Self {
        let d = 5;
        Self::tensor_h(d)
            .then(&Self::twist(&MukaiVector::exact(2, 1, 3), d).expect("spherical"))
            .then(&Self::twist(&MukaiVector::exact(1, 0, 1), d).expect("spherical"))
            .neg()
    }

    /// −(T_(2,−H,3) ∘ T_(1,0,1) ∘ (− ⊗ O(H))) on degree 10.
    pub fn tau_2() -> Self {
        let d = 5;
        Self::tensor_h(d)
            .then(&Self::twist(&MukaiVector::exact(1, 0, 1), d).expect("spherical"))
            .then(&Self::twist(&MukaiVector::exact(2, -1, 3), d).expect("spherical"))
            .neg()
    }

    /// Rotation followed by the reflection in the spherical class (a, bH, c).
    pub fn tau_u(a: i64, b: i64, c: i64, d: u32) -> Result<Self> {
        let u = MukaiVector::exact(a, b, c);
        Ok(Self::rotation(d).then(&Self::twist(&u, d)?))
    }

    /// The degree-10 rotation.
    pub fn o_gm() -> Self {
        Self::rotation(5)
    }

    /// Applies `self`, then `next`.
    pub fn then(&self, next: &LatticeIsometry) -> LatticeIsometry {
        assert_eq!(self.d, next.d, "isometries of different degrees");
        let n1 = self.full_matrix();
        let through = |f: &[Rat; 3]| -> [Rat; 3] {
            let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
            for (j, o) in out.iter_mut().enumerate() {
                *o = (0..3).map(|i| &f[i] * &n1[i][j]).sum();
            }
            out
        };
        let r = through(&next.forms[0]);
        let l2 = through(&next.forms[1]);
        let e2 = q(next.eps as i64);
        let l = [
            &e2 * &self.forms[1][0] + &l2[0],
            &e2 * &self.forms[1][1] + &l2[1],
            &e2 * &self.forms[1][2] + &l2[2],
        ];
        let s = through(&next.forms[2]);
        LatticeIsometry::new(self.d, self.eps * next.eps, [r, l, s])
            .expect("composition of isometries")
    }

    pub fn neg(&self) -> LatticeIsometry {
        self.then(&Self::shift(self.d))
    }

    pub fn inverse(&self) -> LatticeIsometry {
        let inv = matrix::rat_inverse(&self.full_matrix()).expect("isometries are invertible");
        let row = |i: usize| [inv[i][0].clone(), inv[i][1].clone(), inv[i][2].clone()];
        let e = q(self.eps as i64);
        let l: Vec<Rat> = (0..3)
            .map(|j| -&e * (0..3).map(|i| &self.forms[1][i] * &inv[i][j]).sum::<Rat>())
            .collect();
        LatticeIsometry::new(
            self.d,
            self.eps,
            [row(0), [l[0].clone(), l[1].clone(), l[2].clone()], row(2)],
        )
        .expect("inverse of an isometry")
    }

    pub fn pow(&self, n: u32) -> LatticeIsometry {
        let mut acc = Self::identity(self.d);
        for _ in 0..n {
            acc = acc.then(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.d)
    }

    /// Least n ≤ n_max with Tⁿ = id.
    pub fn order(&self, n_max: u32) -> Option<u32> {
        let mut p = self.clone();
        for n in 1..=n_max {
            if p.is_identity() {
                return Some(n);
            }
            p = p.then(self);
        }
        None
    }

    pub fn apply(&self, v: &MukaiVector) -> Result<MukaiVector> {
        v.check_feasible(self.d)?;
        let x = [ratz(v.r()), ratz(&v.hdeg(self.d)), ratz(v.s())];
        let img = |i: usize| -> Result<Int> {
            as_int(&dot(&self.forms[i], &x))
                .ok_or_else(|| Error::NonIntegral(format!("image of {v}")))
        };
        let (r, ell, s) = (img(0)?, img(1)?, img(2)?);
        Ok(MukaiVector::new(r, v.div.transform(self.eps, &ell, self.d), s))
    }

    /// Hermite-reduced basis of the fixed sublattice.
    pub fn fixed_lattice(&self) -> Vec<MukaiVector> {
        let mut m = self.exact_matrix();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= Int::one();
        }
        lattice::integer_kernel(&m, 3)
            .iter()
            .map(|c| MukaiVector::from_coords(c))
            .collect()
    }

    /// Matrix of the isometry on perp(v) for a fixed primitive v.
    pub fn restrict_to_perp(&self, v: &MukaiVector) -> Result<PerpRestriction> {
        if self.apply(v)? != *v {
            return Err(Error::NotInvariant(v.to_string()));
        }
        let perp = lattice::perp(v, self.d)?;
        let mut cols: Vec<Vec<Int>> = Vec::new();
        for b in &perp.basis {
            let image = self.apply(b)?;
            let c = perp
                .coordinates(&image)
                .ok_or_else(|| Error::VectorNotInLattice(image.to_string()))?;
            cols.push(c);
        }
        let m = matrix::transpose(&cols);
        Ok(PerpRestriction { perp, matrix: m })
    }
}

/// Compose: apply `t1`, then `t2`.
pub fn compose(t1: &LatticeIsometry, t2: &LatticeIsometry) -> LatticeIsometry {
    t1.then(t2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerpRestriction {
    pub perp: Sublattice,
    /// Columns are the images of the perp basis vectors in that basis.
    #[serde(with = "int_matrix")]
    pub matrix: IntMatrix,
}

impl PerpRestriction {
    /// Saturated fixed sublattice of the restriction, as vectors of the big lattice.
    pub fn fixed_part(&self) -> Vec<MukaiVector> {
        let mut m = self.matrix.clone();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= Int::one();
        }
        lattice::integer_kernel(&m, 2)
            .iter()
            .map(|c| self.perp.combine(c))
            .collect()
    }
}

pub(crate) mod int_matrix {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::matrix::IntMatrix;
    use crate::num::{from_json_int_matrix, json_int_matrix, JsonInt};

    pub fn serialize<S: Serializer>(m: &IntMatrix, ser: S) -> Result<S::Ok, S::Error> {
        json_int_matrix(m).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<IntMatrix, D::Error> {
        Ok(from_json_int_matrix(Vec::<Vec<JsonInt>>::deserialize(de)?))
    }
}

/// Named constructors accepted by the command line and configuration files.
pub fn by_name(name: &str, d: u32) -> Result<LatticeIsometry> {
    let need = |expected: u32| {
        if d == expected {
            Ok(())
        } else {
            Err(Error::DegreeMismatch { expected, found: d })
        }
    };
    Ok(match name {
        "identity" => LatticeIsometry::identity(d),
        "shift" => LatticeIsometry::shift(d),
        "tensor_h" | "tensor" => LatticeIsometry::tensor_h(d),
        "rotation" => LatticeIsometry::rotation(d),
        "tau_q" => {
            need(2)?;
            LatticeIsometry::tau_q()
        }
        "tau_1" => {
            need(5)?;
            LatticeIsometry::tau_1()
        }
        "tau_2" => {
            need(5)?;
            LatticeIsometry::tau_2()
        }
        "o_gm" => {
            need(5)?;
            LatticeIsometry::o_gm()
        }
        other => {
            if let Some(rest) = other.strip_prefix("twist:") {
                let u: MukaiVector = rest.parse()?;
                return LatticeIsometry::twist(&u, d);
            }
            return Err(Error::InvalidInput(format!("unknown isometry {other:?}")));
        }
    })
}

/// Builds an isometry from a word of generators applied left to right, e.g.
/// `["tensor_h", "twist:1,0,1", "shift"]`.
pub fn from_word(word: &[String], d: u32) -> Result<LatticeIsometry> {
    let mut t = LatticeIsometry::identity(d);
    for g in word {
        t = t.then(&by_name(g, d)?);
    }
    Ok(t)
}
