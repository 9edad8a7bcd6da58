//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::rational::{Rational, Vector};

/// Row-major dense matrix.
pub type Matrix = Vec<Vector>;

pub fn zeros(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(t: &Rational, a: &[Rational]) -> Vector {
    a.iter().map(|x| t * x).collect()
}

pub fn is_zero(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn sum<'a>(n: usize, vs: impl IntoIterator<Item = &'a Vector>) -> Vector {
    let mut acc = zeros(n);
    for v in vs {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    acc
}

/// Kronecker product; coordinate `(i, j)` lands at `i * b.len() + j`.
pub fn kron(a: &[Rational], b: &[Rational]) -> Vector {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn mat_vec(m: &[Vector], v: &[Rational]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn transpose(m: &[Vector], ncols: usize) -> Matrix {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &[Vector], b: &[Vector], b_cols: usize) -> Matrix {
    let bt = transpose(b, b_cols);
    a.iter()
        .map(|row| bt.iter().map(|col| dot(row, col)).collect())
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| unit_vector(n, i)).collect()
}

/// Reduced row echelon form together with the pivot columns.
pub fn rref(m: &[Vector], ncols: usize) -> (Matrix, Vec<usize>) {
    let mut a: Matrix = m.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (x, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    a.truncate(pivots.len());
    (a, pivots)
}

pub fn rank(m: &[Vector], ncols: usize) -> usize {
    rref(m, ncols).1.len()
}

/// Canonical basis of the row space (the nonzero rows of the RREF).
pub fn row_basis(m: &[Vector], ncols: usize) -> Matrix {
    rref(m, ncols).0
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vector], ncols: usize) -> Matrix {
    let (r, pivots) = rref(m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(ncols);
            v[f] = Rational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `a x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &[Vector], b: &[Rational], ncols: usize) -> Option<Vector> {
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = zeros(ncols);
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Coefficients `c` with `x = sum_i c_i basis_i`, if `x` lies in the span.
pub fn coordinates(basis: &[Vector], x: &[Rational]) -> Option<Vector> {
    let n = x.len();
    let cols = transpose(basis, n);
    solve(&cols, x, basis.len())
}

pub fn inverse(m: &[Vector]) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit_vector(n, i));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}
