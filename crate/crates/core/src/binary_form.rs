//! GL₂(ℤ)-equivalence of integral binary quadratic forms given by 2×2 Gram matrices.
//!
//! Each form is brought to a canonical representative of its SL₂(ℤ)-class while the
//! transformation is tracked: Gauss reduction for definite forms, the cycle of reduced
//! forms for indefinite forms of non-square discriminant, and the normal form
//! (0, n, c mod n) for forms of square discriminant. Improper equivalence is handled by
//! also trying the mirror image of the second form.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::GramLattice;
use crate::matrix::{self, IntMatrix};
use crate::num::{exact_sqrt, int, isqrt, Int};

/// f(x, y) = a x² + b xy + c y²; the Gram matrix is [[a, b/2], [b/2, c]].
#[derive(Debug, Clone, PartialEq, Eq)]
struct Form {
    a: Int,
    b: Int,
    c: Int,
}

type M2 = [[Int; 2]; 2];

fn m2(a: Int, b: Int, c: Int, d: Int) -> M2 {
    [[a, b], [c, d]]
}

fn m2_id() -> M2 {
    m2(Int::one(), Int::zero(), Int::zero(), Int::one())
}

fn m2_mul(x: &M2, y: &M2) -> M2 {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    m2(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
}

fn m2_det(x: &M2) -> Int {
    &x[0][0] * &x[1][1] - &x[0][1] * &x[1][0]
}

/// Inverse of a matrix with determinant ±1.
fn m2_inv(x: &M2) -> M2 {
    let det = m2_det(x);
    debug_assert!(det.abs().is_one());
    m2(
        &x[1][1] * &det,
        -&x[0][1] * &det,
        -&x[1][0] * &det,
        &x[0][0] * &det,
    )
}

impl Form {
    fn from_gram(g: &IntMatrix) -> Form {
        Form { a: g[0][0].clone(), b: int(2) * &g[0][1], c: g[1][1].clone() }
    }

    fn disc(&self) -> Int {
        &self.b * &self.b - int(4) * &self.a * &self.c
    }

    fn eval(&self, x: &Int, y: &Int) -> Int {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// The form g(x) = f(M x).
    fn act(&self, m: &M2) -> Form {
        let (p, q, r, s) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
        Form {
            a: self.eval(p, r),
            b: int(2) * &self.a * p * q + &self.b * (p * s + q * r) + int(2) * &self.c * r * s,
            c: self.eval(q, s),
        }
    }

    fn neg(&self) -> Form {
        Form { a: -&self.a, b: -&self.b, c: -&self.c }
    }
}

/// SL₂-canonical representative of `f` and M with f∘M = representative.
/// For indefinite non-square discriminants the representative is the first form of
/// the reduced cycle; `cycle` then lists every reduced form with its transform.
struct Canonical {
    rep: Form,
    to_rep: M2,
    cycle: Vec<(Form, M2)>,
}

fn translate(k: &Int) -> M2 {
    m2(Int::one(), k.clone(), Int::zero(), Int::one())
}

fn swap_s() -> M2 {
    m2(Int::zero(), int(-1), Int::one(), Int::zero())
}

fn canonical_definite(f: &Form) -> Canonical {
    let flip = f.a.is_negative();
    let mut g = if flip { f.neg() } else { f.clone() };
    let mut m = m2_id();
    loop {
        // bring b into (-a, a]
        let two_a = int(2) * &g.a;
        let k = (&g.a - &g.b).div_floor(&two_a);
        if !k.is_zero() {
            let t = translate(&k);
            g = g.act(&t);
            m = m2_mul(&m, &t);
        }
        if g.a > g.c {
            let s = swap_s();
            g = g.act(&s);
            m = m2_mul(&m, &s);
            continue;
        }
        if g.a == g.c && g.b.is_negative() {
            let s = swap_s();
            g = g.act(&s);
            m = m2_mul(&m, &s);
        }
        break;
    }
    let rep = if flip { g.neg() } else { g };
    Canonical { rep, to_rep: m, cycle: Vec::new() }
}

/// Reduced: |√D − 2|a|| < b < √D.
fn is_reduced(f: &Form, root: &Int) -> bool {
    let two_a = int(2) * f.a.abs();
    f.b.is_positive() && &f.b <= root && &f.b + &two_a > *root && &two_a - &f.b <= *root
}

/// One step of the reduction operator ρ and the SL₂ matrix realizing it.
fn rho(f: &Form, root: &Int) -> (Form, M2) {
    let c_abs = f.c.abs();
    let two_c = int(2) * &c_abs;
    // choose r ≡ -b (mod 2|c|) in the normalizing window
    let r0 = (-&f.b).mod_floor(&two_c);
    let r = if &c_abs > root {
        // -|c| < r ≤ |c|
        if r0 > c_abs { &r0 - &two_c } else { r0 }
    } else {
        // √D − 2|c| < r < √D: take the largest r ≤ root in the class
        let shift = (root - &r0).div_floor(&two_c);
        r0 + shift * &two_c
    };
    // r = -b + 2 c t
    let t = (&r + &f.b) / (int(2) * &f.c);
    let m = m2(Int::zero(), int(-1), Int::one(), t);
    let g = f.act(&m);
    debug_assert_eq!(g.b, r);
    (g, m)
}

fn canonical_indefinite(f: &Form) -> Canonical {
    let root = isqrt(&f.disc());
    let mut g = f.clone();
    let mut m = m2_id();
    let mut guard = 0usize;
    while !is_reduced(&g, &root) {
        let (h, step) = rho(&g, &root);
        g = h;
        m = m2_mul(&m, &step);
        guard += 1;
        assert!(guard < 100_000, "reduction did not terminate");
    }
    let start = g.clone();
    let mut cycle = vec![(g.clone(), m.clone())];
    loop {
        let (h, step) = rho(&g, &root);
        m = m2_mul(&m, &step);
        g = h;
        if g == start {
            break;
        }
        cycle.push((g.clone(), m.clone()));
        assert!(cycle.len() < 100_000, "reduced cycle did not close");
    }
    Canonical { rep: start, to_rep: cycle[0].1.clone(), cycle }
}

/// Completes a primitive column (p, q) to an SL₂ matrix [[p, u], [q, v]].
fn complete_first_column(p: &Int, q: &Int) -> M2 {
    let (g, x, y) = matrix::ext_gcd(p, q);
    debug_assert!(g.is_one());
    // p·x + q·y = 1  ⇒  det [[p, -y], [q, x]] = p x + q y = 1
    m2(p.clone(), -y, q.clone(), x)
}

fn canonical_square(f: &Form) -> Canonical {
    let n = exact_sqrt(&f.disc()).expect("square discriminant");
    // primitive zeros of f
    let mut roots: Vec<(Int, Int)> = Vec::new();
    if f.a.is_zero() {
        roots.push((Int::one(), Int::zero()));
        // other zero: b x + c y = 0
        let g = f.b.gcd(&f.c);
        roots.push((-&f.c / &g, &f.b / &g));
    } else {
        for sgn in [1, -1] {
            let num = -&f.b + int(sgn) * &n;
            let den = int(2) * &f.a;
            let g = num.gcd(&den);
            roots.push((num / &g, den / g));
        }
    }
    for (p, q) in roots {
        let m = complete_first_column(&p, &q);
        let g = f.act(&m);
        debug_assert!(g.a.is_zero());
        if g.b.is_positive() {
            // (0, b, c) ~ (0, b, c + b k)
            let k = -g.c.div_floor(&g.b);
            let t = translate(&k);
            let rep = g.act(&t);
            let to_rep = m2_mul(&m, &t);
            return Canonical { rep, to_rep, cycle: Vec::new() };
        }
    }
    unreachable!("one of the two zeros yields a positive middle coefficient")
}

fn canonical_degenerate(f: &Form) -> Canonical {
    if f.a.is_zero() && f.b.is_zero() && f.c.is_zero() {
        return Canonical { rep: f.clone(), to_rep: m2_id(), cycle: Vec::new() };
    }
    // kernel of the Gram matrix [[2a, b], [b, 2c]]
    let (kx, ky) = if !f.a.is_zero() || !f.b.is_zero() {
        (-f.b.clone(), int(2) * &f.a)
    } else {
        (int(2) * &f.c, -f.b.clone())
    };
    let g = kx.gcd(&ky);
    let (p, q) = (kx / &g, ky / &g);
    // put the kernel vector in the second column
    let first = complete_first_column(&p, &q);
    let m = m2_mul(&first, &swap_s());
    let rep = f.act(&m);
    debug_assert!(rep.b.is_zero() && rep.c.is_zero());
    Canonical { rep, to_rep: m, cycle: Vec::new() }
}

fn canonical(f: &Form) -> Canonical {
    let d = f.disc();
    if d.is_negative() {
        canonical_definite(f)
    } else if d.is_zero() {
        canonical_degenerate(f)
    } else if exact_sqrt(&d).is_some() {
        canonical_square(f)
    } else {
        canonical_indefinite(f)
    }
}

/// Finds Q with f1∘Q = f2 inside SL₂(ℤ), if any.
fn proper_equivalence(f1: &Form, f2: &Form) -> Option<M2> {
    let c1 = canonical(f1);
    let c2 = canonical(f2);
    let back = m2_inv(&c2.to_rep);
    if c1.cycle.is_empty() {
        return (c1.rep == c2.rep).then(|| m2_mul(&c1.to_rep, &back));
    }
    c1.cycle
        .iter()
        .find(|(g, _)| *g == c2.rep)
        .map(|(_, m)| m2_mul(m, &back))
}

fn to_matrix(m: &M2) -> IntMatrix {
    vec![m[0].to_vec(), m[1].to_vec()]
}

/// A unimodular P with Pᵀ·G1·P = G2, or `None` if the forms are not equivalent.
pub fn binary_form_equivalent(g1: &GramLattice, g2: &GramLattice) -> Option<IntMatrix> {
    assert!(g1.rank() == 2 && g2.rank() == 2, "binary forms have rank 2");
    if g1.det() != g2.det() {
        return None;
    }
    let f1 = Form::from_gram(&g1.gram);
    let f2 = Form::from_gram(&g2.gram);
    let mirror = m2(Int::one(), Int::zero(), Int::zero(), int(-1));
    let candidate = proper_equivalence(&f1, &f2).or_else(|| {
        // f1∘Q = f2∘J  ⇒  f1∘(Q J) = f2
        proper_equivalence(&f1, &f2.act(&mirror)).map(|q| m2_mul(&q, &mirror))
    })?;
    let p = to_matrix(&candidate);
    let ok = matrix::congruence(&g1.gram, &p) == g2.gram && matrix::det(&p).abs().is_one();
    assert!(ok, "reduction produced an invalid witness");
    Some(p)
}
