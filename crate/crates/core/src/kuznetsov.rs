//! Rank-2 numerical Grothendieck groups of Kuznetsov components (quartic double
//! solid, and the two Gushel–Mukai presentations) with the forgetful and inflation
//! maps to and from the Mukai lattice of the associated K3 surface.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isometry::LatticeIsometry;
use crate::lattice::{hodge_feasible, pair, square, DivisorClass, MukaiVector};
use crate::matrix::{self, IntMatrix};
use crate::num::{concave_interval, int, ratz, Int, JsonInt};
use crate::walls::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KuLattice {
    Qds,
    Gm1,
    Gm2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "mu")]
    Mu,
    #[serde(rename = "kappa")]
    Kappa,
    #[serde(rename = "kappa-prime")]
    KappaPrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KuClass {
    pub a: JsonInt,
    pub b: JsonInt,
    pub basis: Basis,
}

impl KuLattice {
    pub const ALL: [KuLattice; 3] = [KuLattice::Qds, KuLattice::Gm1, KuLattice::Gm2];

    /// Degree parameter of the associated K3 surface (H² = 2d).
    pub fn degree(self) -> u32 {
        match self {
            KuLattice::Qds => 2,
            KuLattice::Gm1 | KuLattice::Gm2 => 5,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            KuLattice::Qds => Basis::Mu,
            KuLattice::Gm1 => Basis::Kappa,
            KuLattice::Gm2 => Basis::KappaPrime,
        }
    }

    pub fn labels(self) -> [&'static str; 2] {
        match self {
            KuLattice::Qds => ["μ1", "μ2"],
            KuLattice::Gm1 => ["κ1", "κ2"],
            KuLattice::Gm2 => ["κ'1", "κ'2"],
        }
    }

    pub fn euler_matrix(self) -> IntMatrix {
        match self {
            KuLattice::Qds => matrix::from_i64(&[&[-1, -1], &[-1, -2]]),
            KuLattice::Gm1 | KuLattice::Gm2 => matrix::from_i64(&[&[-1, 0], &[0, -1]]),
        }
    }

    /// The involution of the Mukai lattice whose fixed points the forgetful map sees.
    pub fn involution(self) -> LatticeIsometry {
        match self {
            KuLattice::Qds => LatticeIsometry::tau_q(),
            KuLattice::Gm1 => LatticeIsometry::tau_1(),
            KuLattice::Gm2 => LatticeIsometry::tau_2(),
        }
    }

    pub fn class(self, a: i64, b: i64) -> KuClass {
        KuClass { a: JsonInt(int(a)), b: JsonInt(int(b)), basis: self.basis() }
    }

    fn class_of(self, a: Int, b: Int) -> KuClass {
        KuClass { a: JsonInt(a), b: JsonInt(b), basis: self.basis() }
    }

    fn check(self, c: &KuClass) -> Result<()> {
        if c.basis == self.basis() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("class in basis {:?} used with lattice {self}", c.basis)))
        }
    }
}

impl fmt::Display for KuLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KuLattice::Qds => "qds",
            KuLattice::Gm1 => "gm1",
            KuLattice::Gm2 => "gm2",
        })
    }
}

impl FromStr for KuLattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qds" => Ok(KuLattice::Qds),
            "gm1" => Ok(KuLattice::Gm1),
            "gm2" => Ok(KuLattice::Gm2),
            other => Err(Error::InvalidInput(format!("unknown lattice {other:?}"))),
        }
    }
}

impl fmt::Display for KuClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a.0, self.b.0)
    }
}

fn check_degree(lat: KuLattice, d: u32) -> Result<()> {
    if lat.degree() == d {
        Ok(())
    } else {
        Err(Error::DegreeMismatch { expected: lat.degree(), found: d })
    }
}

/// Image of (r, Δ·H, s) in the Kuznetsov lattice, as integer-linear forms.
fn forg_forms(lat: KuLattice) -> [[i64; 3]; 2] {
    match lat {
        KuLattice::Qds => [[0, 1, 2], [-1, -1, -1]],
        KuLattice::Gm1 => [[-1, 0, 1], [2, 1, 2]],
        KuLattice::Gm2 => [[4, 1, 1], [-2, -1, -2]],
    }
}

pub fn forg(lat: KuLattice, v: &MukaiVector, d: u32) -> Result<KuClass> {
    check_degree(lat, d)?;
    v.check_feasible(d)?;
    let x = [v.r().clone(), v.hdeg(d), v.s().clone()];
    let f = forg_forms(lat);
    let ev = |row: &[i64; 3]| -> Int { row.iter().zip(&x).map(|(k, y)| int(*k) * y).sum() };
    Ok(lat.class_of(ev(&f[0]), ev(&f[1])))
}

pub fn inf(lat: KuLattice, c: &KuClass) -> Result<MukaiVector> {
    lat.check(c)?;
    let (a, b) = (&c.a.0, &c.b.0);
    let (r, h, s) = match lat {
        KuLattice::Qds => (-a, -b, a + int(2) * b),
        KuLattice::Gm1 => (-a - int(2) * b, b.clone(), a - int(2) * b),
        KuLattice::Gm2 => (-a + int(2) * b, a - b, int(-4) * a + int(2) * b),
    };
    Ok(MukaiVector::from_coords(&[r, h, s]))
}

pub fn euler(lat: KuLattice, c1: &KuClass, c2: &KuClass) -> Result<Int> {
    lat.check(c1)?;
    lat.check(c2)?;
    let e = lat.euler_matrix();
    let x = [&c1.a.0, &c1.b.0];
    let y = [&c2.a.0, &c2.b.0];
    let mut acc = Int::zero();
    for i in 0..2 {
        for j in 0..2 {
            acc += x[i] * &e[i][j] * y[j];
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lattice: KuLattice,
    pub samples: usize,
    /// forg(inf(c)) = 2c on the basis.
    pub forg_inf_doubles: bool,
    /// inf(forg(v)) = v + τ(v) on every sample.
    pub inf_forg_is_norm: bool,
    /// χ(forg u, forg v) = −⟨u, inf forg v⟩ on every sample pair.
    pub adjunction: bool,
    pub violations: Vec<String>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.forg_inf_doubles && self.inf_forg_is_norm && self.adjunction
    }
}

fn random_vector(rng: &mut StdRng, span: i64) -> MukaiVector {
    MukaiVector::exact(
        rng.gen_range(-span..=span),
        rng.gen_range(-span..=span),
        rng.gen_range(-span..=span),
    )
}

/// Checks forg∘inf = 2, inf∘forg = 1 + τ and the adjunction identity on
/// `samples` pseudo-random exact vectors drawn from `seed`.
pub fn verify_identities(lat: KuLattice, samples: usize, seed: u64) -> Result<IdentityReport> {
    let d = lat.degree();
    let tau = lat.involution();
    let mut violations = Vec::new();
    let mut forg_inf_doubles = true;
    for (a, b) in [(1, 0), (0, 1)] {
        let c = lat.class(a, b);
        let back = forg(lat, &inf(lat, &c)?, d)?;
        if back != lat.class(2 * a, 2 * b) {
            forg_inf_doubles = false;
            violations.push(format!("forg(inf{c}) = {back}"));
        }
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut inf_forg_is_norm = true;
    let mut adjunction = true;
    for _ in 0..samples {
        let u = random_vector(&mut rng, 50);
        let v = random_vector(&mut rng, 50);
        let lhs = inf(lat, &forg(lat, &v, d)?)?;
        let rhs = v.add(&tau.apply(&v)?, d)?;
        if lhs != rhs {
            inf_forg_is_norm = false;
            violations.push(format!("inf(forg{v}) = {lhs} ≠ {rhs}"));
        }
        let chi = euler(lat, &forg(lat, &u, d)?, &forg(lat, &v, d)?)?;
        let other = -pair(&u, &lhs, d)?;
        if chi != other {
            adjunction = false;
            violations.push(format!("χ(forg{u}, forg{v}) = {chi} ≠ {other}"));
        }
    }
    Ok(IdentityReport { lattice: lat, samples, forg_inf_doubles, inf_forg_is_norm, adjunction, violations })
}

/// All vectors v with forg(v) = target and square(v) ≥ square_min.
///
/// The two forg equations cut out a line in (r, Δ·H, s). In exact mode Δ·H = 2d·a and
/// square(v) is a concave quadratic along the line. In abstract mode Δ² is bounded
/// above by (Δ·H)²/2d, so (Δ·H)² − 4d·rs ≥ 2d·square_min bounds the line, and every
/// even Δ² between square_min + 2rs and the Hodge bound is listed.
pub fn fiber(lat: KuLattice, target: &KuClass, d: u32, mode: Mode, square_min: i64) -> Result<Vec<MukaiVector>> {
    check_degree(lat, d)?;
    lat.check(target)?;
    let f = forg_forms(lat);
    let h2 = Int::from(2 * d as u64);
    // unknowns (r, a, s) in exact mode, (r, hdeg, s) in abstract mode
    let scale = match mode {
        Mode::Exact => h2.clone(),
        Mode::Abstract => Int::from(1),
    };
    let m: Vec<Vec<Int>> = f.iter().map(|row| vec![int(row[0]), int(row[1]) * &scale, int(row[2])]).collect();
    let rhs = [target.a.0.clone(), target.b.0.clone()];
    let Some((x0, kernel)) = matrix::solve_affine(&m, &rhs, 3) else {
        return Ok(Vec::new());
    };
    assert_eq!(kernel.len(), 1, "forg has rank 2");
    let k = &kernel[0];
    let at = |z: &Int| -> Vec<Int> { (0..3).map(|i| &x0[i] + z * &k[i]).collect() };

    // the bound as a quadratic in z via values at −1, 0, 1
    let bound = |z: &Int| -> Int {
        let p = at(z);
        match mode {
            Mode::Exact => &h2 * &p[1] * &p[1] - int(2) * &p[0] * &p[2] - int(square_min),
            Mode::Abstract => {
                &p[1] * &p[1] - int(2) * &h2 * &p[0] * &p[2] - &h2 * int(square_min)
            }
        }
    };
    let (bm, b0, bp) = (bound(&int(-1)), bound(&int(0)), bound(&int(1)));
    let qa = ratz(&((&bp + &bm - int(2) * &b0) / int(2)));
    let qb = ratz(&((&bp - &bm) / int(2)));
    let qc = ratz(&b0);
    if !qa.is_negative() {
        return Err(Error::InvalidInput("fiber is not bounded along the forg line".into()));
    }
    let Some((lo, hi)) = concave_interval(&qa, &qb, &qc) else {
        return Ok(Vec::new());
    };

    let mut out = Vec::new();
    let mut z = lo;
    while z <= hi {
        let p = at(&z);
        match mode {
            Mode::Exact => {
                let v = MukaiVector::from_coords(&p);
                if square(&v, d) >= int(square_min) {
                    out.push(v);
                }
            }
            Mode::Abstract => {
                let (r, hdeg, s) = (&p[0], &p[1], &p[2]);
                let mut sq: Int = int(square_min) + int(2) * r * s;
                if (&sq % int(2)) != Int::zero() {
                    sq += 1;
                }
                let top = num_integer::Integer::div_floor(&(hdeg * hdeg), &h2);
                while sq <= top {
                    let div = DivisorClass::abstract_class(hdeg.clone(), sq.clone());
                    if hodge_feasible(&div, d) {
                        out.push(MukaiVector::new(r.clone(), div.normalized(d), s.clone()));
                    }
                    sq += 2;
                }
            }
        }
        z += 1;
    }
    out.sort();
    Ok(out)
}
