//! Dense integer and rational matrices: echelon forms, kernels, affine integer
//! systems and small determinants.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::num::{Int, Rat};

pub type IntMatrix = Vec<Vec<Int>>;
pub type RatMatrix = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect()
}

pub fn from_i64(rows: &[&[i64]]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| Int::from(x)).collect())
        .collect()
}

pub fn transpose(m: &IntMatrix) -> IntMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| {
                    let mut acc = Int::zero();
                    for k in 0..inner {
                        acc += &row[k] * &b[k][j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(a: &IntMatrix, v: &[Int]) -> Vec<Int> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn pow(m: &IntMatrix, mut e: u64) -> IntMatrix {
    let mut base = m.clone();
    let mut acc = identity(m.len());
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    acc
}

/// Congruence transform `Pᵀ G P`.
pub fn congruence(g: &IntMatrix, p: &IntMatrix) -> IntMatrix {
    mul(&transpose(p), &mul(g, p))
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(m: &IntMatrix) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Int::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Integer row reduction of `rows` on the first `width` columns by unimodular row
/// operations applied to whole rows (so augmented columns are carried along).
/// Returns the pivot columns; rows past the pivots are zero on those columns.
/// With `reduce_above` the pivot block is put in Hermite normal form.
fn row_reduce(rows: &mut [Vec<Int>], width: usize, reduce_above: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..width {
        if top == rows.len() {
            break;
        }
        loop {
            // choose the smallest non-zero entry at or below `top`
            let mut best: Option<usize> = None;
            for i in top..rows.len() {
                if !rows[i][col].is_zero()
                    && best.is_none_or(|b| rows[i][col].abs() < rows[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(top, b);
            let mut done = true;
            for i in top + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[top][col]);
                let pivot_row = rows[top].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[top][col].is_zero() {
            continue;
        }
        if rows[top][col].is_negative() {
            for x in rows[top].iter_mut() {
                *x = -&*x;
            }
        }
        if reduce_above {
            let pivot_row = rows[top].clone();
            for i in 0..top {
                let q = rows[i][col].div_floor(&pivot_row[col]);
                if !q.is_zero() {
                    for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * p;
                    }
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    pivots
}

/// Row-style Hermite normal form of the lattice spanned by the given rows
/// (zero rows dropped).
pub fn hnf(rows: &[Vec<Int>]) -> IntMatrix {
    if rows.is_empty() {
        return Vec::new();
    }
    let width = rows[0].len();
    let mut m: IntMatrix = rows.to_vec();
    let pivots = row_reduce(&mut m, width, true);
    m.truncate(pivots.len());
    m
}

/// Saturated basis of `{x ∈ ℤⁿ : M x = 0}` in Hermite normal form, for an m×n matrix
/// given by its rows. `n` is passed explicitly so that empty matrices work.
pub fn integer_kernel(m: &[Vec<Int>], n: usize) -> IntMatrix {
    let mut aug: IntMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<Int> = m.iter().map(|r| r[j].clone()).collect();
            row.extend((0..n).map(|k| if k == j { Int::one() } else { Int::zero() }));
            row
        })
        .collect();
    let width = m.len();
    let rank = row_reduce(&mut aug, width, false).len();
    let basis: IntMatrix = aug[rank..].iter().map(|row| row[width..].to_vec()).collect();
    hnf(&basis)
}

/// Integer solutions of `M x = b`: a particular solution and a kernel basis, or
/// `None` when there is no integer solution.
pub fn solve_affine(m: &[Vec<Int>], b: &[Int], n: usize) -> Option<(Vec<Int>, IntMatrix)> {
    assert_eq!(m.len(), b.len(), "right-hand side length mismatch");
    let width = m.len();
    let mut aug: IntMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<Int> = m.iter().map(|r| r[j].clone()).collect();
            row.extend((0..n).map(|k| if k == j { Int::one() } else { Int::zero() }));
            row
        })
        .collect();
    // rows of aug: U·Mᵀ | U with U unimodular; M·Uᵀ = Eᵀ.
    let pivots = row_reduce(&mut aug, width, false);
    let rank = pivots.len();
    let mut y: Vec<Int> = Vec::with_capacity(rank);
    for (j, &p) in pivots.iter().enumerate() {
        let mut rhs = b[p].clone();
        for (i, yi) in y.iter().enumerate() {
            rhs -= &aug[i][p] * yi;
        }
        let piv = &aug[j][p];
        if !rhs.is_multiple_of(piv) {
            return None;
        }
        y.push(rhs / piv);
    }
    // all equations must hold, not only those at pivot positions
    for (row_idx, target) in b.iter().enumerate() {
        let mut acc = Int::zero();
        for (i, yi) in y.iter().enumerate() {
            acc += &aug[i][row_idx] * yi;
        }
        if &acc != target {
            return None;
        }
    }
    let mut x = vec![Int::zero(); n];
    for (i, yi) in y.iter().enumerate() {
        for k in 0..n {
            x[k] += yi * &aug[i][width + k];
        }
    }
    let kernel: IntMatrix = aug[rank..].iter().map(|row| row[width..].to_vec()).collect();
    Some((x, hnf(&kernel)))
}

/// Gauss–Jordan inverse over the rationals; `None` if singular.
pub fn rat_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[col].clone();
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Extended Euclid: returns (g, x, y) with a x + b y = g ≥ 0.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        from_i64(rows)
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        assert_eq!(integer_kernel(&m(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]), 3), identity(3));
        assert!(integer_kernel(&identity(3), 3).is_empty());
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y = 0 has kernel spanned by (2,-1), not (4,-2)
        let k = integer_kernel(&m(&[&[2, 4]]), 2);
        assert_eq!(k, m(&[&[2, -1]]));
        let k = integer_kernel(&m(&[&[1, 4, 1]]), 3);
        assert_eq!(k, m(&[&[1, 0, -1], &[0, 1, -4]]));
    }

    #[test]
    fn affine_solutions() {
        let (x, k) = solve_affine(&m(&[&[1, 2, 0]]), &[int(1)], 3).unwrap();
        assert_eq!(x[0].clone() + int(2) * &x[1], int(1));
        assert_eq!(k.len(), 2);
        assert!(solve_affine(&m(&[&[2, 4]]), &[int(1)], 2).is_none());
        // inconsistent non-pivot equation
        assert!(solve_affine(&m(&[&[1, 0], &[1, 0]]), &[int(1), int(2)], 2).is_none());
    }

    #[test]
    fn determinants_and_powers() {
        assert_eq!(det(&m(&[&[0, 0, -1], &[0, 4, 0], &[-1, 0, 0]])), int(-4));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), int(-1));
        let r = m(&[&[0, -1], &[1, 0]]);
        assert_eq!(pow(&r, 4), identity(2));
        assert_eq!(pow(&r, 0), identity(2));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(&m(&[&[1, 0, -1], &[1, -1, 1]]));
        let b = hnf(&m(&[&[1, -1, 1], &[2, -1, 0]]));
        assert_eq!(a, b);
        assert_eq!(a, m(&[&[1, 0, -1], &[0, 1, -2]]));
    }
}
