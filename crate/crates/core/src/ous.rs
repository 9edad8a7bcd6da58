//! Finite-dimensional order-unit spaces with polyhedral positive cones.
//!
//! A space is presented by generators of its positive cone (V-form) and an
//! order unit. Facet descriptions of the cone and the vertices of the state
//! polytope are derived on demand by double description; every membership
//! question is an exact LP.
//!
//! Polyhedral cones are closed, so every order unit here is Archimedean. There
//! is nothing to check at runtime for that property.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{input, structural, Error, Result};
use crate::linalg::{self, dot, is_zero, sub, zeros, Matrix};
use crate::lp::LinearProgram;
use crate::polyhedron::{self, AffineRow};
use crate::rational::{fmt_vector, primitive_ray, Rational, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderUnitSpace {
    dim: usize,
    generators: Vec<Vector>,
    unit: Vector,
}

/// An element `a` of a space with `0 <= a <= u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Effect(Vector);

impl Effect {
    pub fn value(&self) -> &Vector {
        &self.0
    }

    pub fn into_inner(self) -> Vector {
        self.0
    }
}

/// A positive functional normalized on the order unit, in dual coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vector);

impl State {
    pub fn eval(&self, v: &[Rational]) -> Rational {
        dot(&self.0, v)
    }

    pub fn functional(&self) -> &Vector {
        &self.0
    }
}

impl OrderUnitSpace {
    /// Validates and builds a space. Zero generators are dropped and repeated
    /// rays collapsed; the remaining generators must span the ambient space,
    /// generate a pointed cone, and have `unit` as an order unit.
    pub fn new(generators: Vec<Vector>, unit: Vector) -> Result<Self> {
        let dim = unit.len();
        if dim == 0 {
            return input("order unit must have positive dimension");
        }
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return input(format!(
                "generator {} has dimension {}, expected {dim}",
                fmt_vector(g),
                g.len()
            ));
        }
        let mut seen = BTreeSet::new();
        let generators: Vec<Vector> = generators
            .into_iter()
            .filter(|g| !is_zero(g))
            .filter(|g| seen.insert(primitive_ray(g)))
            .collect();
        if generators.is_empty() {
            return input("cone needs at least one nonzero generator");
        }
        if linalg::rank(&generators, dim) < dim {
            return structural("cone generators do not span the ambient space");
        }
        let space = OrderUnitSpace {
            dim,
            generators,
            unit,
        };
        if !space.is_pointed() {
            return structural("cone is not pointed");
        }
        if !space.cone_contains(&space.unit)? {
            return structural("order unit is not in the positive cone");
        }
        if !space.is_order_unit(&space.unit)? {
            return structural(format!(
                "{} is not an order unit",
                fmt_vector(&space.unit)
            ));
        }
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn check_dim(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim {
            return input(format!(
                "vector {} has dimension {}, space has dimension {}",
                fmt_vector(v),
                v.len(),
                self.dim
            ));
        }
        Ok(())
    }

    fn is_pointed(&self) -> bool {
        // Pointed iff no convex combination of generators vanishes.
        let n = self.generators.len();
        let mut lp = LinearProgram::new(n);
        for i in 0..self.dim {
            lp.add_eq(
                self.generators.iter().map(|g| g[i].clone()).collect(),
                Rational::zero(),
            );
        }
        lp.add_eq(vec![Rational::one(); n], Rational::one());
        !lp.is_feasible()
    }

    /// LP over generator weights: `sum_i w_i g_i = v`, `w >= 0`.
    pub(crate) fn cone_lp(generators: &[Vector], v: &[Rational]) -> LinearProgram {
        let mut lp = LinearProgram::new(generators.len());
        for (i, vi) in v.iter().enumerate() {
            lp.add_eq(generators.iter().map(|g| g[i].clone()).collect(), vi.clone());
        }
        lp
    }

    /// Whether `v` is a nonnegative combination of the cone generators.
    pub fn cone_contains(&self, v: &[Rational]) -> Result<bool> {
        self.check_dim(v)?;
        Ok(Self::cone_lp(&self.generators, v).is_feasible())
    }

    /// `x <= y` in the space's order.
    pub fn leq(&self, x: &[Rational], y: &[Rational]) -> Result<bool> {
        self.check_dim(x)?;
        self.cone_contains(&sub(y, x))
    }

    pub fn is_effect(&self, v: &[Rational]) -> Result<bool> {
        self.check_dim(v)?;
        Ok(self.cone_contains(v)? && self.cone_contains(&sub(&self.unit, v))?)
    }

    pub fn effect(&self, v: Vector) -> Result<Effect> {
        if !self.is_effect(&v)? {
            return input(format!("{} is not an effect", fmt_vector(&v)));
        }
        Ok(Effect(v))
    }

    pub fn is_state(&self, f: &[Rational]) -> Result<bool> {
        self.check_dim(f)?;
        Ok(self.generators.iter().all(|g| !dot(f, g).is_negative()) && dot(f, &self.unit).is_one())
    }

    pub fn state(&self, f: Vector) -> Result<State> {
        if !self.is_state(&f)? {
            return input(format!("{} is not a state", fmt_vector(&f)));
        }
        Ok(State(f))
    }

    /// Extreme rays of the dual cone, i.e. the facet normals of the positive cone.
    pub fn dual_generators(&self) -> Vec<Vector> {
        polyhedron::dual_cone_generators(&self.generators, self.dim)
            .expect("spanning generators give a pointed dual cone")
    }

    /// Exact vertices of `{f : f >= 0 on the cone, f(u) = 1}`, sorted.
    pub fn state_polytope_vertices(&self) -> Result<Vec<State>> {
        let ineqs: Vec<AffineRow> = self
            .generators
            .iter()
            .map(|g| AffineRow::new(g.clone(), Rational::zero()))
            .collect();
        let eqs = [AffineRow::new(self.unit.clone(), Rational::one())];
        let vertices = polyhedron::polytope_vertices(&eqs, &ineqs, self.dim).map_err(|_| {
            Error::Structural("state set is unbounded; unit is not an order unit".into())
        })?;
        Ok(vertices.into_iter().map(State).collect())
    }

    /// For each coordinate direction `e_i`, some `t >= 0` with `-t v <= e_i <= t v`.
    pub fn is_order_unit(&self, v: &[Rational]) -> Result<bool> {
        self.check_dim(v)?;
        let n = self.generators.len();
        for i in 0..self.dim {
            for sign in [1i64, -1] {
                // sum_k w_k g_k - t v = sign * e_i
                let mut lp = LinearProgram::new(n + 1);
                for c in 0..self.dim {
                    let mut row: Vector = self.generators.iter().map(|g| g[c].clone()).collect();
                    row.push(-v[c].clone());
                    let rhs = if c == i {
                        Rational::from_integer(sign.into())
                    } else {
                        Rational::zero()
                    };
                    lp.add_eq(row, rhs);
                }
                if !lp.is_feasible() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Generators after removing every one that is a nonnegative combination of the others.
    pub fn extreme_generators(&self) -> Vec<Vector> {
        prune_redundant(self.generators.clone())
    }

    /// Same cone (as a set of rays) and same unit.
    pub fn same_as(&self, other: &OrderUnitSpace) -> bool {
        let rays = |s: &OrderUnitSpace| -> BTreeSet<Vector> {
            s.extreme_generators().iter().map(|g| primitive_ray(g)).collect()
        };
        self.dim == other.dim && self.unit == other.unit && rays(self) == rays(other)
    }

    /// The order interval `[0, v]` as a polytope, by its vertices.
    pub fn interval_vertices(&self, v: &[Rational]) -> Result<Vec<Vector>> {
        self.check_dim(v)?;
        let mut ineqs = Vec::new();
        for h in self.dual_generators() {
            ineqs.push(AffineRow::new(h.clone(), Rational::zero()));
            let neg: Vector = h.iter().map(|x| -x).collect();
            ineqs.push(AffineRow::new(neg, -dot(&h, v)));
        }
        polyhedron::polytope_vertices(&[], &ineqs, self.dim)
    }

    /// The space `A_v = span [0, v]` ordered by `span_+ [0, v]`, with `v` as its unit.
    pub fn sub_ous(&self, v: &Effect) -> Result<SubOus> {
        let v = v.value();
        self.check_dim(v)?;
        if is_zero(v) {
            return input("sub-space of the zero effect is trivial");
        }
        if !self.is_effect(v)? {
            return input(format!("{} is not an effect", fmt_vector(v)));
        }
        let mut seen = BTreeSet::new();
        let candidates: Vec<Vector> = self
            .interval_vertices(v)?
            .into_iter()
            .filter(|x| !is_zero(x))
            .filter(|x| seen.insert(primitive_ray(x)))
            .collect();
        let generators = prune_redundant(candidates);
        let rank = linalg::rank(&generators, self.dim);
        let basis: Matrix = if rank == self.dim {
            linalg::identity(self.dim)
        } else {
            linalg::row_basis(&generators, self.dim)
        };
        let to_coords = |x: &Vector| -> Result<Vector> {
            linalg::coordinates(&basis, x)
                .ok_or_else(|| Error::Internal("generator outside its own span".into()))
        };
        let coords: Vec<Vector> = generators.iter().map(to_coords).collect::<Result<_>>()?;
        let unit = to_coords(v)?;
        let space = OrderUnitSpace::new(coords, unit)
            .map_err(|e| Error::Internal(format!("sub-space failed validation: {e}")))?;
        Ok(SubOus {
            space,
            basis,
            ambient_generators: generators,
        })
    }
}

fn prune_redundant(mut gens: Vec<Vector>) -> Vec<Vector> {
    let mut i = 0;
    while i < gens.len() {
        let others: Vec<Vector> = gens
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, g)| g.clone())
            .collect();
        if !others.is_empty() && OrderUnitSpace::cone_lp(&others, &gens[i]).is_feasible() {
            gens.remove(i);
        } else {
            i += 1;
        }
    }
    gens
}

/// `A_v` together with its embedding into the ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubOus {
    /// The space in intrinsic coordinates.
    pub space: OrderUnitSpace,
    /// Ambient vectors whose coordinates are the intrinsic ones.
    pub basis: Matrix,
    /// Extreme nonzero vertices of `[0, v]`, in ambient coordinates.
    pub ambient_generators: Vec<Vector>,
}

impl SubOus {
    pub fn ambient_dim(&self) -> usize {
        self.basis.first().map_or(0, Vec::len)
    }

    pub fn embed(&self, coords: &[Rational]) -> Vector {
        let mut out = zeros(self.ambient_dim());
        for (b, c) in self.basis.iter().zip(coords) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }

    /// Intrinsic coordinates of an ambient vector, if it lies in `span [0, v]`.
    pub fn restrict(&self, x: &[Rational]) -> Option<Vector> {
        linalg::coordinates(&self.basis, x)
    }

    pub fn ambient_unit(&self) -> Vector {
        self.embed(self.space.unit())
    }

    /// `x in span_+ [0, v]`, decided over the ambient generators.
    pub fn positive_span_contains(&self, x: &[Rational]) -> bool {
        OrderUnitSpace::cone_lp(&self.ambient_generators, x).is_feasible()
    }

    /// `x = p - q` with `p, q in span_+ [0, v]`.
    pub fn is_difference_of_positives(&self, x: &[Rational]) -> bool {
        let g = &self.ambient_generators;
        let mut lp = LinearProgram::new(2 * g.len());
        for (i, xi) in x.iter().enumerate() {
            let mut row: Vector = g.iter().map(|v| v[i].clone()).collect();
            row.extend(g.iter().map(|v| -v[i].clone()));
            lp.add_eq(row, xi.clone());
        }
        lp.is_feasible()
    }
}

/// `x` is dominated by some nonnegative multiple of `v`: `x <= t v` for some `t >= 0`.
pub fn dominated_by_multiple(space: &OrderUnitSpace, x: &[Rational], v: &[Rational]) -> bool {
    let gens = space.generators();
    let mut lp = LinearProgram::new(gens.len() + 1);
    for c in 0..space.dim() {
        let mut row: Vector = gens.iter().map(|g| g[c].clone()).collect();
        row.push(-v[c].clone());
        lp.add_eq(row, -x[c].clone());
    }
    lp.is_feasible()
}

/// Outcome of comparing the two routes to each property of `A_v` on one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubOusAudit {
    /// Positive cone of `A_v` agrees with `{x >= 0 : x <= t v}`.
    pub positive_cone: bool,
    /// Linear span agrees with differences of positives.
    pub span: bool,
    /// The order of `A_v` agrees with the ambient order.
    pub order: bool,
    /// `v` is an order unit of `A_v`.
    pub order_unit: bool,
}

impl SubOusAudit {
    pub fn all(&self) -> bool {
        self.positive_cone && self.span && self.order && self.order_unit
    }
}

/// Checks the characterizations of `A_v` and its cone on the sample `x`, `y`
/// (both ambient vectors; `x` is expected to be positive).
pub fn audit_sub_ous(
    space: &OrderUnitSpace,
    sub_space: &SubOus,
    v: &[Rational],
    x: &[Rational],
    y: &[Rational],
) -> SubOusAudit {
    let positive_cone = sub_space.positive_span_contains(x) == dominated_by_multiple(space, x, v);
    let span = sub_space.restrict(y).is_some() == sub_space.is_difference_of_positives(y);
    let order = match (sub_space.restrict(x), sub_space.restrict(y)) {
        (Some(xc), Some(yc)) => {
            let inner = sub_space.space.leq(&xc, &yc).unwrap_or(false);
            let outer = space.leq(x, y).unwrap_or(false);
            inner == outer
        }
        _ => true,
    };
    let order_unit = sub_space
        .space
        .is_order_unit(sub_space.space.unit())
        .unwrap_or(false);
    SubOusAudit {
        positive_cone,
        span,
        order,
        order_unit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ivec, q};
    use crate::systems::{bit, square_bit, trivial};

    #[test]
    fn cone_membership_examples() {
        let bit = bit();
        assert!(bit.cone_contains(&ivec(&[1, 2])).unwrap());
        assert!(!bit.cone_contains(&ivec(&[-1, 0])).unwrap());
        assert!(square_bit().cone_contains(&[q(1, 2), q(1, 2), int(0)]).unwrap());
        assert!(bit.cone_contains(&ivec(&[1])).is_err());
    }

    #[test]
    fn effect_examples() {
        let bit = bit();
        assert!(bit.is_effect(&[q(1, 2), q(1, 3)]).unwrap());
        assert!(!bit.is_effect(&[q(3, 2), int(0)]).unwrap());
        assert!(bit.is_effect(&ivec(&[1, 1])).unwrap());
    }

    #[test]
    fn state_examples() {
        let bit = bit();
        assert!(bit.is_state(&[q(1, 3), q(2, 3)]).unwrap());
        assert!(!bit.is_state(&[q(6, 5), q(-1, 5)]).unwrap());
        assert!(square_bit().is_state(&ivec(&[1, 1, 1])).unwrap());
    }

    #[test]
    fn state_polytope_examples() {
        let v: Vec<Vector> = bit()
            .state_polytope_vertices()
            .unwrap()
            .into_iter()
            .map(|s| s.0)
            .collect();
        assert_eq!(v, vec![ivec(&[0, 1]), ivec(&[1, 0])]);
        let t = trivial().state_polytope_vertices().unwrap();
        assert_eq!(t, vec![State(ivec(&[1]))]);
        let sq = square_bit().state_polytope_vertices().unwrap();
        let expected: BTreeSet<Vector> = [[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]]
            .iter()
            .map(|c| ivec(c))
            .collect();
        assert_eq!(sq.into_iter().map(|s| s.0).collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn state_vertices_are_states_and_distinct() {
        for space in [bit(), square_bit(), trivial()] {
            let verts = space.state_polytope_vertices().unwrap();
            let set: BTreeSet<_> = verts.iter().collect();
            assert_eq!(set.len(), verts.len());
            for s in &verts {
                assert!(space.is_state(&s.0).unwrap());
            }
        }
    }

    #[test]
    fn order_unit_examples() {
        let bit = bit();
        assert!(bit.is_order_unit(&ivec(&[1, 1])).unwrap());
        assert!(!bit.is_order_unit(&ivec(&[1, 0])).unwrap());
        assert!(bit.is_order_unit(&ivec(&[2, 3])).unwrap());
    }

    #[test]
    fn invalid_spaces_are_rejected() {
        // not spanning
        assert!(OrderUnitSpace::new(vec![ivec(&[1, 0])], ivec(&[1, 0])).is_err());
        // not pointed
        assert!(OrderUnitSpace::new(
            vec![ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1])],
            ivec(&[0, 1])
        )
        .is_err());
        // unit on the boundary
        assert!(OrderUnitSpace::new(vec![ivec(&[1, 0]), ivec(&[0, 1])], ivec(&[1, 0])).is_err());
    }

    #[test]
    fn sub_ous_of_a_ray() {
        let bit = bit();
        let s = bit.sub_ous(&bit.effect(ivec(&[1, 0])).unwrap()).unwrap();
        assert_eq!(s.space.dim(), 1);
        assert_eq!(s.ambient_generators, vec![ivec(&[1, 0])]);
        assert_eq!(s.ambient_unit(), ivec(&[1, 0]));
    }

    #[test]
    fn sub_ous_of_unit_is_whole_space() {
        for space in [bit(), square_bit()] {
            let s = space.sub_ous(&space.effect(space.unit().clone()).unwrap()).unwrap();
            assert!(s.space.same_as(&space));
        }
    }

    #[test]
    fn sub_ous_of_box_corner() {
        let bit = bit();
        let v = vec![int(1), q(1, 2)];
        let s = bit.sub_ous(&bit.effect(v.clone()).unwrap()).unwrap();
        assert_eq!(s.space.dim(), 2);
        let rays: BTreeSet<Vector> = s.ambient_generators.iter().map(|g| primitive_ray(g)).collect();
        assert_eq!(rays, [ivec(&[0, 1]), ivec(&[1, 0])].into_iter().collect());
        assert_eq!(s.ambient_unit(), v);
    }

    #[test]
    fn sub_ous_rejects_zero_and_non_effects() {
        let bit = bit();
        assert!(bit.sub_ous(&Effect(ivec(&[0, 0]))).is_err());
        assert!(bit.sub_ous(&Effect(ivec(&[2, 0]))).is_err());
    }

    #[test]
    fn sub_ous_audit_on_square_edge() {
        let sq = square_bit();
        let v = vec![q(1, 2), q(1, 2), int(0)];
        let s = sq.sub_ous(&sq.effect(v.clone()).unwrap()).unwrap();
        assert_eq!(s.space.dim(), 1);
        let x = vec![int(1), int(1), int(0)];
        let y = vec![int(1), int(0), int(1)];
        assert!(audit_sub_ous(&sq, &s, &v, &x, &y).all());
    }
}
