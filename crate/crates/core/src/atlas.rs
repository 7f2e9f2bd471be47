//! Sweeps behind the classification of rotation and twist involutions: powers of
//! the rotation matrix, the twist involution condition, Vieta jumping, the
//! Fibonacci families, and the rank-2 invariant lattice check.

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary_form::binary_form_equivalent;
use crate::charge::{fixed_pair, FixedPair};
use crate::error::{Error, Result};
use crate::isometry::LatticeIsometry;
use crate::lattice::GramLattice;
use crate::matrix::{self, IntMatrix};
use crate::num::{int, json_int_matrix, Int, JsonInt, Rat};

/// Exact-mode matrix of the rotation for degree parameter d.
pub fn rotation_matrix(d: u32) -> IntMatrix {
    LatticeIsometry::rotation(d).exact_matrix()
}

/// O_d^{2n} = I.
pub fn rotation_power_identity(d: u32, n: u32) -> bool {
    assert!(n >= 1);
    let m = rotation_matrix(d);
    matrix::pow(&m, 2 * n as u64) == matrix::identity(3)
}

/// All (d, n) with 1 ≤ d ≤ d_max, 1 ≤ n ≤ n_max and O_d^{2n} = I, sorted.
pub fn classify_rotation_involutions(d_max: u32, n_max: u32) -> Vec<(u32, u32)> {
    (1..=d_max)
        .into_par_iter()
        .flat_map_iter(|d| {
            let sq = matrix::pow(&rotation_matrix(d), 2);
            let id = matrix::identity(3);
            let mut acc = id.clone();
            let mut hits = Vec::new();
            for n in 1..=n_max {
                acc = matrix::mul(&acc, &sq);
                if acc == id {
                    hits.push((d, n));
                }
            }
            hits
        })
        .collect()
}

/// The closed-form families (1,3k), (2,2k), (3,3k) inside the box.
pub fn expected_rotation_involutions(d_max: u32, n_max: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for (d, step) in [(1, 3), (2, 2), (3, 3)] {
        if d <= d_max {
            out.extend((step..=n_max).step_by(step as usize).map(|n| (d, n)));
        }
    }
    out
}

pub fn twist_involution_condition(a: i64, b: i64, d: i64) -> bool {
    (a + b) * b * d + a * a + 1 == 0
}

/// Spherical class (a, bH, c) on a surface of degree parameter d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwistTriple {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: u32,
}

impl TwistTriple {
    pub fn new(a: i64, b: i64, c: i64, d: u32) -> Result<Self> {
        let t = TwistTriple { a, b, c, d };
        t.check()?;
        Ok(t)
    }

    /// The unique spherical completion, if a divides b²d + 1.
    pub fn complete(a: i64, b: i64, d: u32) -> Option<Self> {
        if a <= 0 || d == 0 {
            return None;
        }
        let num = b.checked_mul(b)?.checked_mul(d as i64)?.checked_add(1)?;
        (num % a == 0).then(|| TwistTriple { a, b, c: num / a, d })
    }

    fn check(&self) -> Result<()> {
        let lhs = int(self.b) * int(self.b) * int(self.d as i64) + 1;
        if self.a > 0 && self.d > 0 && lhs == int(self.a) * int(self.c) {
            Ok(())
        } else {
            Err(Error::NotSpherical(format!("({},{}H,{}) at d={}", self.a, self.b, self.c, self.d)))
        }
    }

    /// −(rotation followed by the twist in this class).
    pub fn isometry(&self) -> Result<LatticeIsometry> {
        self.check()?;
        Ok(LatticeIsometry::tau_u(self.a, self.b, self.c, self.d)?.neg())
    }

    pub fn condition(&self) -> bool {
        twist_involution_condition(self.a, self.b, self.d as i64)
    }
}

pub fn is_twist_involution(t: &TwistTriple) -> Result<bool> {
    Ok(t.isometry()?.pow(2).is_identity())
}

/// Solutions of x² + y² + 1 = t·x·y with bound ≥ x ≥ y ≥ 1.
///
/// Replacing x by t·y − x = (y² + 1)/x keeps a solution and, while x > y, lowers
/// x below y; descent therefore ends on the diagonal, where (t − 2)x² = 1. So the
/// diagonal roots generate everything by the ascending jump (x, y) → (t·x − y, x).
pub fn vieta_solve(t: i64, bound: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    // (t − 2)x² = 1 has the single positive root x = 1, at t = 3
    if t != 3 || bound == 0 {
        return out;
    }
    let (mut x, mut y) = (1u64, 1u64);
    loop {
        out.push((x, y));
        let next = t as u128 * x as u128 - y as u128;
        if next > bound as u128 {
            break;
        }
        (x, y) = (next as u64, x);
    }
    out
}

/// F_n with F_n = 1 for n ≤ 1.
pub fn fib(n: i64) -> Int {
    if n <= 1 {
        return Int::one();
    }
    let (mut a, mut b) = (Int::one(), Int::one());
    for _ in 1..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    b
}

fn fib_i64(n: i64) -> Result<i64> {
    i64::try_from(fib(n)).map_err(|_| Error::InvalidInput(format!("F_{n} exceeds 64 bits")))
}

/// Both degree-10 families for even n ≤ n_max, family 1 then family 2 per n.
pub fn fibonacci_solutions(n_max: u32) -> Result<Vec<TwistTriple>> {
    if !n_max.is_multiple_of(2) {
        return Err(Error::InvalidInput("n_max must be even".into()));
    }
    let mut out = Vec::new();
    for n in (0..=n_max as i64).step_by(2) {
        let (fm, f0, fp) = (fib_i64(n - 2)?, fib_i64(n)?, fib_i64(n + 2)?);
        out.push(TwistTriple::new(f0 + fm, -f0, fp + f0, 5)?);
        out.push(TwistTriple::new(fp + f0, -f0, f0 + fm, 5)?);
    }
    Ok(out)
}

/// (x, y) = (1/(5F_n), −(4F_n − F_{n+2})/(5F_n)).
pub fn fixed_pair_family(n: u32) -> Result<(Rat, Rat)> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidInput("n must be even".into()));
    }
    let (f0, fp) = (fib(n as i64), fib(n as i64 + 2));
    let den = int(5) * &f0;
    let x = Rat::new(Int::one(), den.clone());
    let y = Rat::new(-(int(4) * &f0 - fp), den);
    Ok((x, y))
}

/// The family-2 triple for n, the one whose involution fixes fixed_pair_family(n).
pub fn family_triple(n: u32) -> Result<TwistTriple> {
    let all = fibonacci_solutions(n + n % 2)?;
    Ok(all[n as usize + 1])
}

/// Solver-side pair for the same n.
pub fn fixed_pair_of_triple(t: &TwistTriple) -> Result<Option<(Rat, Rat)>> {
    Ok(match fixed_pair(&t.isometry()?) {
        FixedPair::Unique { x, y } => x.as_rational().map(|x| (x.clone(), y)),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Og10Report {
    /// Gram of the ambient basis (θ(H), B, E).
    pub ambient: GramLattice,
    pub basis: Vec<Vec<JsonInt>>,
    pub gram: GramLattice,
    pub target: GramLattice,
    pub witness: Option<Vec<Vec<JsonInt>>>,
    pub det: JsonInt,
    pub passed: bool,
}

/// θ(H) ⊥ Λ with θ(H)² = 4 and Λ = [[−2,3],[3,−6]] on (B, E); the classes 2B − θ(H)
/// and E span a lattice that should be ℤ(2) ⊕ ℤ(−6).
pub fn og10_check() -> Og10Report {
    let ambient = GramLattice::from_i64(&[&[4, 0, 0], &[0, -2, 3], &[0, 3, -6]]).with_labels(&["θ(H)", "B", "E"]);
    let basis = matrix::from_i64(&[&[-1, 2, 0], &[0, 0, 1]]);
    let gram_m: IntMatrix = basis
        .iter()
        .map(|u| {
            basis
                .iter()
                .map(|w| {
                    let gw = matrix::mul_vec(&ambient.gram, w);
                    u.iter().zip(&gw).map(|(x, y)| x * y).sum()
                })
                .collect()
        })
        .collect();
    let gram = GramLattice::new(gram_m).expect("symmetric by construction");
    let target = GramLattice::from_i64(&[&[2, 0], &[0, -6]]);
    let witness = binary_form_equivalent(&gram, &target);
    let passed = witness.as_ref().is_some_and(|p| {
        matrix::congruence(&gram.gram, p) == target.gram && (matrix::det(p) == int(1) || matrix::det(p) == int(-1))
    });
    let det = gram.det();
    Og10Report {
        ambient,
        basis: json_int_matrix(&basis),
        gram,
        target,
        witness: witness.map(|p| json_int_matrix(&p)),
        det: JsonInt(det),
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use num_traits::Zero;

    #[test]
    fn rotation_powers() {
        assert!(rotation_power_identity(2, 2));
        assert!(!rotation_power_identity(2, 1));
        assert!(rotation_power_identity(3, 3));
        assert!(!rotation_power_identity(4, 12));
        assert_eq!(
            classify_rotation_involutions(10, 6),
            vec![(1, 3), (1, 6), (2, 2), (2, 4), (2, 6), (3, 3), (3, 6)]
        );
        assert!(classify_rotation_involutions(4, 1).is_empty());
        assert_eq!(classify_rotation_involutions(10, 6), expected_rotation_involutions(10, 6));
    }

    #[test]
    fn twist_condition() {
        assert!(twist_involution_condition(2, -1, 5));
        assert!(twist_involution_condition(3, -1, 5));
        assert!(!twist_involution_condition(2, -1, 4));
        assert!(is_twist_involution(&TwistTriple::new(2, -1, 3, 5).unwrap()).unwrap());
        assert!(is_twist_involution(&TwistTriple::new(3, -1, 2, 5).unwrap()).unwrap());
        assert!(!is_twist_involution(&TwistTriple::new(1, 0, 1, 2).unwrap()).unwrap());
        assert!(matches!(TwistTriple::new(2, -1, 4, 5), Err(Error::NotSpherical(_))));
        assert_eq!(TwistTriple::new(3, -1, 2, 5).unwrap().isometry().unwrap(), LatticeIsometry::tau_1());
    }

    #[test]
    fn vieta() {
        assert_eq!(vieta_solve(3, 20), vec![(1, 1), (2, 1), (5, 2), (13, 5)]);
        assert!(vieta_solve(2, 1000).is_empty());
        assert!(vieta_solve(4, 10_000).is_empty());
        assert!(vieta_solve(3, 0).is_empty());
    }

    #[test]
    fn fibonacci_families() {
        let all = fibonacci_solutions(10).unwrap();
        assert_eq!(all.len(), 12);
        assert_eq!((all[0].a, all[0].b, all[0].c), (2, -1, 3));
        assert_eq!((all[1].a, all[1].b, all[1].c), (3, -1, 2));
        assert_eq!((all[2].a, all[2].b, all[2].c), (3, -2, 7));
        assert_eq!((all[3].a, all[3].b, all[3].c), (7, -2, 3));
        for t in &all {
            assert!(t.condition());
            assert_eq!(t.c, -t.a - 5 * t.b);
        }
        assert!(fibonacci_solutions(3).is_err());
    }

    #[test]
    fn fixed_pairs_of_the_family() {
        assert_eq!(fixed_pair_family(0).unwrap(), (rat(1, 5), rat(-2, 5)));
        assert_eq!(fixed_pair_family(2).unwrap(), (rat(1, 10), rat(-3, 10)));
        for n in (0..=10).step_by(2) {
            let t = family_triple(n).unwrap();
            assert_eq!(fixed_pair_of_triple(&t).unwrap(), Some(fixed_pair_family(n).unwrap()));
        }
    }

    #[test]
    fn og10() {
        let rep = og10_check();
        assert!(rep.passed);
        assert_eq!(rep.gram, GramLattice::from_i64(&[&[-4, 6], &[6, -6]]));
        assert_eq!(rep.det.0, int(-12));
        let p = matrix::from_i64(&[&[1, 0], &[1, 1]]);
        assert_eq!(matrix::congruence(&rep.gram.gram, &p), rep.target.gram);
        assert!(!rep.det.0.is_zero());
    }
}
