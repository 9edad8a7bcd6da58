//! Exact vertex and ray enumeration by the double description method.
//!
//! Cones are handled in H-form `{x : a.x >= 0}`. Polytopes are homogenized
//! (`x -> (x, t)`) and their equality constraints are eliminated by working in
//! a nullspace basis, so the cone handed to the double description step is
//! always pointed whenever the polytope is bounded.

use fixedbitset::FixedBitSet;
use num_traits::{Signed, Zero};

use crate::error::{structural, Result};
use crate::linalg::{self, dot, is_zero, Matrix};
use crate::lp::LinearProgram;
use crate::rational::{primitive_ray, Rational, Vector};

struct Ray {
    coords: Vector,
    zeros: FixedBitSet,
}

fn independent_rows(rows: &[Vector], dim: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Matrix = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        basis.push(row.clone());
        if linalg::rank(&basis, dim) == basis.len() {
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}

/// Extreme rays, as primitive integer vectors in sorted order, of the pointed
/// cone `{x in R^dim : a.x >= 0 for every row a}`.
pub fn cone_extreme_rays(rows: &[Vector], dim: usize) -> Result<Vec<Vector>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let m = rows.len();
    let initial = independent_rows(rows, dim);
    if initial.len() < dim {
        return structural("cone has a nontrivial lineality space");
    }
    let square: Matrix = initial.iter().map(|&i| rows[i].clone()).collect();
    let inv = linalg::inverse(&square).expect("independent rows are invertible");
    let mut rays: Vec<Ray> = (0..dim)
        .map(|k| {
            let coords: Vector = inv.iter().map(|row| row[k].clone()).collect();
            let mut zeros = FixedBitSet::with_capacity(m);
            for (j, &row) in initial.iter().enumerate() {
                if j != k {
                    zeros.insert(row);
                }
            }
            Ray {
                coords: primitive_ray(&coords),
                zeros,
            }
        })
        .collect();

    let mut processed = vec![false; m];
    for &i in &initial {
        processed[i] = true;
    }
    for i in 0..m {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let values: Vec<Rational> = rays.iter().map(|r| dot(&rows[i], &r.coords)).collect();
        if values.iter().all(|v| !v.is_negative()) {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.insert(i);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        let mut fresh = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let mut common = rays[p].zeros.clone();
                common.intersect_with(&rays[n].zeros);
                if common.count_ones(..) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == n || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let coords: Vector = rays[n]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(xn, xp)| &values[p] * xn - &values[n] * xp)
                    .collect();
                let mut zeros = common;
                zeros.insert(i);
                fresh.push(Ray {
                    coords: primitive_ray(&coords),
                    zeros,
                });
            }
        }
        let mut kept = Vec::with_capacity(rays.len() + fresh.len());
        for (mut r, v) in rays.into_iter().zip(values) {
            if v.is_negative() {
                continue;
            }
            if v.is_zero() {
                r.zeros.insert(i);
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }
    let mut out: Vec<Vector> = rays.into_iter().map(|r| r.coords).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Generators of the dual cone `{f : f.g >= 0 for all g}` of a cone spanned by
/// `generators`. The generators must span `R^dim`.
pub fn dual_cone_generators(generators: &[Vector], dim: usize) -> Result<Vec<Vector>> {
    cone_extreme_rays(generators, dim)
}

/// Affine constraint `coeffs . x (= or >=) rhs`.
#[derive(Debug, Clone)]
pub struct AffineRow {
    pub coeffs: Vector,
    pub rhs: Rational,
}

impl AffineRow {
    pub fn new(coeffs: Vector, rhs: Rational) -> Self {
        AffineRow { coeffs, rhs }
    }
}

/// Vertices of the polytope `{x : e.x = b (eqs), a.x >= c (ineqs)}` in sorted
/// order. Returns an empty list for an empty polytope and a structural error
/// when the set is unbounded.
pub fn polytope_vertices(eqs: &[AffineRow], ineqs: &[AffineRow], dim: usize) -> Result<Vec<Vector>> {
    let homog = |r: &AffineRow| -> Vector {
        let mut v = r.coeffs.clone();
        v.push(-r.rhs.clone());
        v
    };
    let eq_rows: Matrix = eqs.iter().map(homog).collect();
    let basis = linalg::nullspace(&eq_rows, dim + 1);
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let k = basis.len();
    let mut lifted: Matrix = ineqs.iter().map(homog).collect();
    lifted.push(linalg::unit_vector(dim + 1, dim));
    let reduced: Matrix = lifted
        .iter()
        .map(|row| basis.iter().map(|b| dot(row, b)).collect())
        .collect();

    if linalg::rank(&reduced, k) < k {
        return if affine_feasible(eqs, ineqs, dim) {
            structural("polytope is unbounded")
        } else {
            Ok(Vec::new())
        };
    }
    let rays = cone_extreme_rays(&reduced, k)?;
    let mut vertices = Vec::new();
    let mut recession = false;
    for z in rays {
        let y: Vector = (0..=dim)
            .map(|c| {
                basis
                    .iter()
                    .zip(&z)
                    .fold(Rational::zero(), |acc, (b, zi)| acc + &b[c] * zi)
            })
            .collect();
        let t = y[dim].clone();
        if t.is_zero() {
            if !is_zero(&y) {
                recession = true;
            }
            continue;
        }
        vertices.push(y[..dim].iter().map(|x| x / &t).collect::<Vector>());
    }
    if recession && !vertices.is_empty() {
        return structural("polytope is unbounded");
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

fn affine_feasible(eqs: &[AffineRow], ineqs: &[AffineRow], dim: usize) -> bool {
    let mut lp = LinearProgram::new(dim);
    for j in 0..dim {
        lp.set_free(j);
    }
    for r in eqs {
        lp.add_eq(r.coeffs.clone(), r.rhs.clone());
    }
    for r in ineqs {
        lp.add_ge(r.coeffs.clone(), r.rhs.clone());
    }
    lp.is_feasible()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ivec, q};

    #[test]
    fn orthant_rays() {
        let rays = cone_extreme_rays(&[ivec(&[1, 0]), ivec(&[0, 1])], 2).unwrap();
        assert_eq!(rays, vec![ivec(&[0, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn square_cone_rays() {
        // {v : v0 +- v1 +- v2 >= 0} is the cone over a square.
        let rows = vec![
            ivec(&[1, 1, 1]),
            ivec(&[1, 1, -1]),
            ivec(&[1, -1, 1]),
            ivec(&[1, -1, -1]),
        ];
        let rays = cone_extreme_rays(&rows, 3).unwrap();
        assert_eq!(
            rays,
            vec![
                ivec(&[1, -1, 0]),
                ivec(&[1, 0, -1]),
                ivec(&[1, 0, 1]),
                ivec(&[1, 1, 0])
            ]
        );
    }

    #[test]
    fn lineality_is_rejected() {
        assert!(cone_extreme_rays(&[ivec(&[1, 0])], 2).is_err());
    }

    #[test]
    fn unit_square_vertices() {
        let ineqs = vec![
            AffineRow::new(ivec(&[1, 0]), int(0)),
            AffineRow::new(ivec(&[0, 1]), int(0)),
            AffineRow::new(ivec(&[-1, 0]), int(-1)),
            AffineRow::new(ivec(&[0, -1]), int(-1)),
        ];
        let v = polytope_vertices(&[], &ineqs, 2).unwrap();
        assert_eq!(v, vec![ivec(&[0, 0]), ivec(&[0, 1]), ivec(&[1, 0]), ivec(&[1, 1])]);
    }

    #[test]
    fn simplex_slice_with_equality() {
        let eqs = vec![AffineRow::new(ivec(&[1, 1, 1]), int(1))];
        let ineqs: Vec<AffineRow> = (0..3)
            .map(|i| AffineRow::new(linalg::unit_vector(3, i), int(0)))
            .collect();
        let v = polytope_vertices(&eqs, &ineqs, 3).unwrap();
        assert_eq!(v.len(), 3);
        let half = vec![AffineRow::new(ivec(&[1, 0, 0]), q(1, 2))];
        let mut all = ineqs.clone();
        all.extend(half);
        let v = polytope_vertices(&eqs, &all, 3).unwrap();
        assert!(v.contains(&vec![q(1, 2), q(1, 2), int(0)]));
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn unbounded_and_empty() {
        let ray = vec![AffineRow::new(ivec(&[1]), int(0))];
        assert!(polytope_vertices(&[], &ray, 1).is_err());
        let clash = vec![
            AffineRow::new(ivec(&[1]), int(1)),
            AffineRow::new(ivec(&[-1]), int(0)),
        ];
        assert!(polytope_vertices(&[], &clash, 1).unwrap().is_empty());
    }

    #[test]
    fn birkhoff_three() {
        // 3x3 doubly stochastic matrices: 6 permutation vertices.
        let mut eqs = Vec::new();
        for r in 0..3 {
            let mut row = linalg::zeros(9);
            let mut col = linalg::zeros(9);
            for c in 0..3 {
                row[3 * r + c] = int(1);
                col[3 * c + r] = int(1);
            }
            eqs.push(AffineRow::new(row, int(1)));
            eqs.push(AffineRow::new(col, int(1)));
        }
        let ineqs: Vec<AffineRow> = (0..9)
            .map(|i| AffineRow::new(linalg::unit_vector(9, i), int(0)))
            .collect();
        let v = polytope_vertices(&eqs, &ineqs, 9).unwrap();
        assert_eq!(v.len(), 6);
        for vert in v {
            assert!(vert.iter().all(|x| x.is_zero() || *x == int(1)));
        }
    }
}
