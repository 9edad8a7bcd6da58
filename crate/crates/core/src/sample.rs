//! Seeded random instances: spaces, effects, states, valued weights,
//! stochastic matrices and tensors. Used by the property tests, the
//! acceptance suite and the benches.

use num_traits::{One, Zero};
use rand::Rng;

use crate::channel::MarkovKernel;
use crate::linalg::{self, add, kron, rank, scale, sub, sum};
use crate::ous::{OrderUnitSpace, State};
use crate::rational::{int, Rational, Vector};
use crate::systems;
use crate::testspace::TestSpace;
use crate::vweight::ValuedWeight;

/// `p/q` with `0 <= p <= q <= max_den`, `q >= 1`.
pub fn unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    Rational::new(rng.gen_range(0..=q).into(), q.into())
}

/// `p/q` with `|p/q| <= bound` and `q <= max_den`.
pub fn signed_rational<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    Rational::new(rng.gen_range(-bound * q..=bound * q).into(), q.into())
}

pub fn signed_vector<R: Rng>(rng: &mut R, dim: usize, bound: i64, max_den: i64) -> Vector {
    (0..dim).map(|_| signed_rational(rng, bound, max_den)).collect()
}

/// Positive weights summing to 1.
pub fn simplex_point<R: Rng>(rng: &mut R, n: usize) -> Vector {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=12)).collect();
    let total: i64 = raw.iter().sum();
    raw.iter().map(|&r| Rational::new(r.into(), total.into())).collect()
}

/// `sum_k w_k p_k` for a random positive convex weight `w`.
pub fn convex_combination<R: Rng>(rng: &mut R, points: &[Vector]) -> Vector {
    let w = simplex_point(rng, points.len());
    let dim = points[0].len();
    points
        .iter()
        .zip(&w)
        .fold(linalg::zeros(dim), |acc, (p, t)| add(&acc, &scale(t, p)))
}

/// A pointed polyhedral cone in dimension 2..=4 with generators
/// `(1, small integers)` and unit the sum of the generators.
pub fn polyhedral_space<R: Rng>(rng: &mut R) -> OrderUnitSpace {
    loop {
        let d = rng.gen_range(2..=4);
        let count = rng.gen_range(d..=d + 2);
        let gens: Vec<Vector> = (0..count)
            .map(|_| {
                let mut g = vec![Rational::one()];
                g.extend((1..d).map(|_| int(rng.gen_range(-2..=2))));
                g
            })
            .collect();
        if rank(&gens, d) < d {
            continue;
        }
        let unit = sum(d, gens.iter());
        if let Ok(s) = OrderUnitSpace::new(gens, unit) {
            return s;
        }
    }
}

/// One of the built-in spaces or a random polyhedral one.
pub fn space<R: Rng>(rng: &mut R) -> OrderUnitSpace {
    match rng.gen_range(0..5) {
        0 => systems::bit(),
        1 => systems::classical(3),
        2 => systems::gbit(),
        _ => polyhedral_space(rng),
    }
}

/// A random point of the order interval `[0, u]`.
pub fn effect<R: Rng>(rng: &mut R, space: &OrderUnitSpace) -> Vector {
    let vertices = space.interval_vertices(space.unit()).expect("[0, u] is a polytope");
    convex_combination(rng, &vertices)
}

/// A nonzero effect, scaled by a random factor in `(0, 1]`.
pub fn nonzero_effect<R: Rng>(rng: &mut R, space: &OrderUnitSpace) -> Vector {
    loop {
        let a = effect(rng, space);
        if !linalg::is_zero(&a) {
            let t = Rational::new(rng.gen_range(1..=4).into(), 4.into());
            return scale(&t, &a);
        }
    }
}

/// A random point of the state polytope.
pub fn state<R: Rng>(rng: &mut R, space: &OrderUnitSpace) -> State {
    let vertices: Vec<Vector> = space
        .state_polytope_vertices()
        .expect("state polytope is bounded")
        .into_iter()
        .map(|s| s.0)
        .collect();
    State(convex_combination(rng, &vertices))
}

/// A random element of the positive cone.
pub fn positive<R: Rng>(rng: &mut R, space: &OrderUnitSpace) -> Vector {
    let scale_by = Rational::new(rng.gen_range(1..=3).into(), 1.into());
    scale(&scale_by, &convex_combination(rng, space.generators()))
}

/// `k` positive effects summing to `u`.
pub fn decomposition_of_unit<R: Rng>(rng: &mut R, space: &OrderUnitSpace, k: usize) -> Vec<Vector> {
    let kk = Rational::from_integer((k as i64).into());
    let mut parts: Vec<Vector> = (1..k).map(|_| scale(&(Rational::one() / &kk), &effect(rng, space))).collect();
    let rest = sub(space.unit(), &sum(space.dim(), parts.iter()));
    parts.push(rest);
    parts
}

/// `F(x) = sum_j alpha_j(x) c_j` for random weights `alpha_j` and a random
/// decomposition `c` of the unit: valued in `space` on every test space
/// that has probability weights.
pub fn valued_weight<R: Rng>(rng: &mut R, space: &OrderUnitSpace, ts: &TestSpace) -> ValuedWeight {
    let vertices = ts.weight_polytope_vertices().expect("test space is small");
    assert!(!vertices.is_empty(), "test space has no probability weights");
    let k = rng.gen_range(1..=3);
    let parts = decomposition_of_unit(rng, space, k);
    let weights: Vec<Vector> = (0..k).map(|_| convex_combination(rng, &vertices)).collect();
    let values = (0..ts.num_outcomes())
        .map(|x| {
            parts
                .iter()
                .zip(&weights)
                .fold(linalg::zeros(space.dim()), |acc, (c, w)| add(&acc, &scale(&w[x], c)))
        })
        .collect();
    ValuedWeight::new(space.clone(), ts.clone(), values).expect("construction sums to the unit")
}

/// A random row-stochastic matrix.
pub fn stochastic<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> MarkovKernel {
    let matrix = (0..rows)
        .map(|_| {
            if rng.gen_bool(0.2) {
                let mut row = vec![Rational::zero(); cols];
                row[rng.gen_range(0..cols)] = Rational::one();
                row
            } else {
                simplex_point(rng, cols)
            }
        })
        .collect();
    MarkovKernel::new(matrix).expect("rows are distributions")
}

/// A tensor `sum c_ij g_i (x) h_j` over generator pairs with coefficients
/// in `[-1, 2]`; nonnegative coefficients about half of the time.
pub fn tensor<R: Rng>(rng: &mut R, a: &OrderUnitSpace, b: &OrderUnitSpace) -> Vector {
    let nonneg = rng.gen_bool(0.5);
    let mut t = linalg::zeros(a.dim() * b.dim());
    for g in a.generators() {
        for h in b.generators() {
            let c = if nonneg {
                unit_rational(rng, 4)
            } else {
                signed_rational(rng, 1, 4) + Rational::new(1.into(), 2.into())
            };
            t = add(&t, &scale(&c, &kron(g, h)));
        }
    }
    t
}
