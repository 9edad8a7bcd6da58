//! Composites: product test spaces, non-signalling joint weights, min and
//! max tensor cones, bilinear composition rules and the induced map on
//! observable fragments.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::{input, Error, Result};
use crate::linalg::{self, dot, is_zero, kron, mat_vec, Matrix};
use crate::lp::{FarkasCertificate, LinearProgram, LpOutcome};
use crate::modj::{build_modj, extend_to_state, lift_state, Catalog, Observable};
use crate::ous::{OrderUnitSpace, State};
use crate::polyhedron::{cone_extreme_rays, polytope_vertices, AffineRow};
use crate::rational::{fmt_vector, Rational, Vector};
use crate::testspace::{Outcome, TestSpace};
use crate::vweight::{Model, ValuedWeight};

/// Coordinates of an element of `A (x) B`, index `i * dim B + j`.
pub type TensorVector = Vector;

/// Tests `E x F`; outcome `(x, y)` sits at position `x * |N| + y`.
pub fn product_testspace(m: &TestSpace, n: &TestSpace) -> Result<TestSpace> {
    let tests = m.tests().len().checked_mul(n.tests().len());
    if tests.is_none_or(|t| t > crate::testspace::event_cap()) {
        return crate::error::resource("too many product tests for the event cap");
    }
    let mut out = Vec::new();
    for e in m.tests() {
        for f in n.tests() {
            out.push(
                e.iter()
                    .flat_map(|&x| f.iter().map(move |&y| Outcome::pair(m.outcome(x).clone(), n.outcome(y).clone())))
                    .collect(),
            );
        }
    }
    TestSpace::new(out)
}

/// A probability weight on `M x N`, stored as the table `values[x][y]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointWeight {
    values: Matrix,
}

impl JointWeight {
    pub fn new(m: &TestSpace, n: &TestSpace, values: Matrix) -> Result<Self> {
        if values.len() != m.num_outcomes() || values.iter().any(|r| r.len() != n.num_outcomes()) {
            return input(format!("joint table must be {} x {}", m.num_outcomes(), n.num_outcomes()));
        }
        if values.iter().flatten().any(Signed::is_negative) {
            return input("joint weight has a negative value");
        }
        for e in m.tests() {
            for f in n.tests() {
                let total = e
                    .iter()
                    .flat_map(|&x| f.iter().map(move |&y| (x, y)))
                    .fold(Rational::zero(), |s, (x, y)| s + &values[x][y]);
                if !total.is_one() {
                    return input(format!(
                        "joint weight sums to {total} on {} x {}",
                        m.fmt_event(e),
                        n.fmt_event(f)
                    ));
                }
            }
        }
        Ok(JointWeight { values })
    }

    /// `(x, y) -> alpha(x) beta(y)`.
    pub fn product(m: &TestSpace, n: &TestSpace, alpha: &[Rational], beta: &[Rational]) -> Result<Self> {
        if !m.is_probability_weight(alpha)? || !n.is_probability_weight(beta)? {
            return input("factors must be probability weights");
        }
        let values = alpha.iter().map(|a| beta.iter().map(|b| a * b).collect()).collect();
        JointWeight::new(m, n, values)
    }

    /// Reads a weight on `product_testspace(m, n)`.
    pub fn from_flat(m: &TestSpace, n: &TestSpace, flat: &[Rational]) -> Result<Self> {
        let k = n.num_outcomes();
        if flat.len() != m.num_outcomes() * k {
            return input("flat joint weight has the wrong length");
        }
        JointWeight::new(m, n, flat.chunks(k).map(<[Rational]>::to_vec).collect())
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn value(&self, x: usize, y: usize) -> &Rational {
        &self.values[x][y]
    }

    /// The weight as a vector over `product_testspace` outcomes.
    pub fn flat(&self) -> Vector {
        self.values.iter().flatten().cloned().collect()
    }

    fn transpose(&self) -> JointWeight {
        let cols = self.values.first().map_or(0, Vec::len);
        JointWeight {
            values: linalg::transpose(&self.values, cols),
        }
    }
}

fn check_shape(m: &TestSpace, n: &TestSpace, w: &JointWeight) -> Result<()> {
    if w.values.len() != m.num_outcomes() || w.values.iter().any(|r| r.len() != n.num_outcomes()) {
        return input("joint weight does not match the factor test spaces");
    }
    Ok(())
}

/// `sum_{y in F} w(x, y)` for the test `F` of `n`.
fn row_sum(w: &JointWeight, x: usize, f: &[usize]) -> Rational {
    f.iter().fold(Rational::zero(), |s, &y| s + &w.values[x][y])
}

/// Marginals of `m`'s outcomes read against the first test of `n`.
fn left_marginals_unchecked(m: &TestSpace, n: &TestSpace, w: &JointWeight) -> Vector {
    let f = &n.tests()[0];
    (0..m.num_outcomes()).map(|x| row_sum(w, x, f)).collect()
}

/// Marginals do not depend on the partner's test.
pub fn is_nonsignalling(m: &TestSpace, n: &TestSpace, w: &JointWeight) -> Result<bool> {
    check_shape(m, n, w)?;
    let one_side = |m: &TestSpace, n: &TestSpace, w: &JointWeight| {
        (0..m.num_outcomes()).all(|x| {
            let first = row_sum(w, x, &n.tests()[0]);
            n.tests().iter().all(|f| row_sum(w, x, f) == first)
        })
    };
    Ok(one_side(m, n, w) && one_side(n, m, &w.transpose()))
}

/// `omega_1(x)`; input error unless `w` is non-signalling.
pub fn left_marginal(m: &TestSpace, n: &TestSpace, w: &JointWeight) -> Result<Vector> {
    if !is_nonsignalling(m, n, w)? {
        return input("joint weight is signalling");
    }
    Ok(left_marginals_unchecked(m, n, w))
}

/// `omega_2(y)`; input error unless `w` is non-signalling.
pub fn right_marginal(m: &TestSpace, n: &TestSpace, w: &JointWeight) -> Result<Vector> {
    left_marginal(n, m, &w.transpose())
}

/// `omega_{2|x}(y) = omega(x, y) / omega_1(x)`.
pub fn conditional_right(m: &TestSpace, n: &TestSpace, w: &JointWeight, x: usize) -> Result<Vector> {
    let marg = left_marginal(m, n, w)?;
    let Some(p) = marg.get(x) else {
        return input(format!("no outcome {x}"));
    };
    if p.is_zero() {
        return Err(Error::Undefined(format!(
            "conditional at {} is undefined: marginal is 0",
            m.outcome(x)
        )));
    }
    Ok(w.values[x].iter().map(|v| v / p).collect())
}

/// `omega_{1|y}(x) = omega(x, y) / omega_2(y)`.
pub fn conditional_left(m: &TestSpace, n: &TestSpace, w: &JointWeight, y: usize) -> Result<Vector> {
    conditional_right(n, m, &w.transpose(), y)
}

/// Convex-hull membership LP together with its outcome.
#[derive(Debug, Clone)]
pub struct HullVerdict {
    pub lp: LinearProgram,
    pub outcome: LpOutcome,
}

impl HullVerdict {
    pub fn is_member(&self) -> bool {
        self.outcome.is_feasible()
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match &self.outcome {
            LpOutcome::Infeasible(c) => Some(c),
            _ => None,
        }
    }
}

/// `target = sum_k l_k p_k`, `l >= 0`, `sum l = 1`.
pub fn hull_membership(points: &[Vector], target: &[Rational]) -> HullVerdict {
    let mut lp = LinearProgram::new(points.len());
    for (i, t) in target.iter().enumerate() {
        lp.add_eq(points.iter().map(|p| p[i].clone()).collect(), t.clone());
    }
    lp.add_eq(vec![Rational::one(); points.len()], Rational::one());
    let outcome = lp.solve();
    HullVerdict { lp, outcome }
}

/// Non-signalling with every defined conditional in the factor's state set.
pub fn is_joint_state(ma: &Model, mb: &Model, w: &JointWeight) -> Result<bool> {
    let (m, n) = (ma.testspace(), mb.testspace());
    if !is_nonsignalling(m, n, w)? {
        return Ok(false);
    }
    let left = left_marginal(m, n, w)?;
    for (x, p) in left.iter().enumerate() {
        if !p.is_zero() && !hull_membership(mb.states(), &conditional_right(m, n, w, x)?).is_member() {
            return Ok(false);
        }
    }
    let right = right_marginal(m, n, w)?;
    for (y, p) in right.iter().enumerate() {
        if !p.is_zero() && !hull_membership(ma.states(), &conditional_left(m, n, w, y)?).is_member() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// LP membership of `w` in the hull of products of factor state generators.
pub fn separability(ma: &Model, mb: &Model, w: &JointWeight) -> Result<HullVerdict> {
    if !is_joint_state(ma, mb, w)? {
        return input("not a non-signalling joint state");
    }
    let products: Vec<Vector> = ma
        .states()
        .iter()
        .flat_map(|a| mb.states().iter().map(move |b| kron(a, b)))
        .collect();
    Ok(hull_membership(&products, &w.flat()))
}

pub fn is_separable(ma: &Model, mb: &Model, w: &JointWeight) -> Result<bool> {
    Ok(separability(ma, mb, w)?.is_member())
}

/// The PR box on two copies of [`crate::systems::two_binary_tests`]:
/// `omega((a, s), (b, t)) = 1/2` iff `a xor b = s t`.
pub fn pr_box() -> JointWeight {
    let ts = crate::systems::two_binary_tests();
    // Outcome order x0, x1, y0, y1: setting = position / 2, bit = position % 2.
    let values = (0..4)
        .map(|i: usize| {
            (0..4)
                .map(|j: usize| {
                    let (a, s, b, t) = (i % 2, i / 2, j % 2, j / 2);
                    if a ^ b == s * t {
                        Rational::new(1.into(), 2.into())
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    JointWeight::new(&ts, &ts, values).expect("PR box is a probability weight")
}

fn check_tensor(a: &OrderUnitSpace, b: &OrderUnitSpace, t: &[Rational]) -> Result<()> {
    if t.len() != a.dim() * b.dim() {
        return input(format!(
            "tensor has length {}, expected {}",
            t.len(),
            a.dim() * b.dim()
        ));
    }
    Ok(())
}

/// `g_i (x) h_j` over all pairs of cone generators.
pub fn min_generators(a: &OrderUnitSpace, b: &OrderUnitSpace) -> Vec<TensorVector> {
    a.generators()
        .iter()
        .flat_map(|g| b.generators().iter().map(move |h| kron(g, h)))
        .collect()
}

/// `f (x) g` over all pairs of extreme dual rays.
pub fn max_constraints(a: &OrderUnitSpace, b: &OrderUnitSpace) -> Vec<TensorVector> {
    let (fa, fb) = (a.dual_generators(), b.dual_generators());
    fa.iter().flat_map(|f| fb.iter().map(move |g| kron(f, g))).collect()
}

/// LP for `t = sum l_ij g_i (x) h_j`, `l >= 0`, with its outcome.
pub fn min_cone_membership(a: &OrderUnitSpace, b: &OrderUnitSpace, t: &[Rational]) -> Result<HullVerdict> {
    check_tensor(a, b, t)?;
    let lp = OrderUnitSpace::cone_lp(&min_generators(a, b), t);
    let outcome = lp.solve();
    Ok(HullVerdict { lp, outcome })
}

pub fn min_cone_contains(a: &OrderUnitSpace, b: &OrderUnitSpace, t: &[Rational]) -> Result<bool> {
    Ok(min_cone_membership(a, b, t)?.is_member())
}

/// Positivity of `(f (x) g)(t)` on extreme rays of both dual cones; by
/// bilinearity this covers every pair of positive functionals.
pub fn max_cone_contains(a: &OrderUnitSpace, b: &OrderUnitSpace, t: &[Rational]) -> Result<bool> {
    check_tensor(a, b, t)?;
    Ok(max_constraints(a, b).iter().all(|r| !dot(r, t).is_negative()))
}

/// `A (x)_min B` as an order-unit space.
pub fn min_tensor(a: &OrderUnitSpace, b: &OrderUnitSpace) -> Result<OrderUnitSpace> {
    OrderUnitSpace::new(min_generators(a, b), kron(a.unit(), b.unit()))
}

/// `A (x)_max B` as an order-unit space.
pub fn max_tensor(a: &OrderUnitSpace, b: &OrderUnitSpace) -> Result<OrderUnitSpace> {
    let d = a.dim() * b.dim();
    OrderUnitSpace::new(cone_extreme_rays(&max_constraints(a, b), d)?, kron(a.unit(), b.unit()))
}

/// Vertices of `{phi : phi(u_A (x) u_B) = 1, phi >= 0 on the min cone}`.
pub fn max_tensor_state_vertices(a: &OrderUnitSpace, b: &OrderUnitSpace) -> Result<Vec<Vector>> {
    let d = a.dim() * b.dim();
    let eqs = [AffineRow::new(kron(a.unit(), b.unit()), Rational::one())];
    let ineqs: Vec<AffineRow> = min_generators(a, b)
        .into_iter()
        .map(|g| AffineRow::new(g, Rational::zero()))
        .collect();
    polytope_vertices(&eqs, &ineqs, d)
}

/// Vertices of the non-signalling polytope of `M x N`, flattened as in [`JointWeight::flat`].
pub fn ns_polytope_vertices(m: &TestSpace, n: &TestSpace) -> Result<Vec<Vector>> {
    let (p, k) = (m.num_outcomes(), n.num_outcomes());
    let d = p * k;
    let at = |x: usize, y: usize| x * k + y;
    let indicator = |cells: &mut dyn Iterator<Item = (usize, usize)>, sign: i64| {
        let mut row = linalg::zeros(d);
        for (x, y) in cells {
            row[at(x, y)] += Rational::from_integer(sign.into());
        }
        row
    };
    let mut eqs = Vec::new();
    for e in m.tests() {
        for f in n.tests() {
            let row = indicator(&mut e.iter().flat_map(|&x| f.iter().map(move |&y| (x, y))), 1);
            eqs.push(AffineRow::new(row, Rational::one()));
        }
    }
    for x in 0..p {
        for f in &n.tests()[1..] {
            let mut row = indicator(&mut f.iter().map(|&y| (x, y)), 1);
            row = linalg::add(&row, &indicator(&mut n.tests()[0].iter().map(|&y| (x, y)), -1));
            eqs.push(AffineRow::new(row, Rational::zero()));
        }
    }
    for y in 0..k {
        for e in &m.tests()[1..] {
            let mut row = indicator(&mut e.iter().map(|&x| (x, y)), 1);
            row = linalg::add(&row, &indicator(&mut m.tests()[0].iter().map(|&x| (x, y)), -1));
            eqs.push(AffineRow::new(row, Rational::zero()));
        }
    }
    let ineqs: Vec<AffineRow> = (0..d)
        .map(|i| AffineRow::new(linalg::unit_vector(d, i), Rational::zero()))
        .collect();
    polytope_vertices(&eqs, &ineqs, d)
}

/// `phi -> ((x, y) -> phi(F(x) (x) G(y)))`.
pub fn functional_to_joint(fa: &ValuedWeight, fb: &ValuedWeight, phi: &[Rational]) -> Vector {
    fa.values()
        .iter()
        .flat_map(|a| fb.values().iter().map(move |b| dot(phi, &kron(a, b))))
        .collect()
}

/// Both vertex sets, the max-tensor side carried to joint tables by [`functional_to_joint`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsComparison {
    pub ns_vertices: BTreeSet<Vector>,
    pub max_vertices: BTreeSet<Vector>,
}

impl NsComparison {
    pub fn equal(&self) -> bool {
        self.ns_vertices == self.max_vertices
    }
}

/// Compares the non-signalling polytope of the realized test spaces with
/// the max-tensor state space of the underlying spaces.
pub fn ns_max_comparison(fa: &ValuedWeight, fb: &ValuedWeight) -> Result<NsComparison> {
    let ns_vertices = ns_polytope_vertices(fa.testspace(), fb.testspace())?
        .into_iter()
        .collect();
    let max_vertices = max_tensor_state_vertices(fa.space(), fb.space())?
        .iter()
        .map(|phi| functional_to_joint(fa, fb, phi))
        .collect();
    Ok(NsComparison {
        ns_vertices,
        max_vertices,
    })
}

/// A composite `(G, pi)`: `pi(a, b) = matrix . (a (x) b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearRule {
    a: OrderUnitSpace,
    b: OrderUnitSpace,
    g: OrderUnitSpace,
    matrix: Matrix,
}

impl BilinearRule {
    /// Checks positivity on generator pairs and `pi(u_A, u_B) = u_G`.
    pub fn new(a: OrderUnitSpace, b: OrderUnitSpace, g: OrderUnitSpace, matrix: Matrix) -> Result<Self> {
        let d = a.dim() * b.dim();
        if matrix.len() != g.dim() || matrix.iter().any(|r| r.len() != d) {
            return input(format!("rule matrix must be {} x {d}", g.dim()));
        }
        let rule = BilinearRule { a, b, g, matrix };
        for x in rule.a.generators() {
            for y in rule.b.generators() {
                let v = rule.apply(x, y);
                if !rule.g.cone_contains(&v)? {
                    return input(format!(
                        "pi({}, {}) = {} is not positive",
                        fmt_vector(x),
                        fmt_vector(y),
                        fmt_vector(&v)
                    ));
                }
            }
        }
        if &rule.apply(rule.a.unit(), rule.b.unit()) != rule.g.unit() {
            return input("pi(u_A, u_B) is not the unit of G");
        }
        Ok(rule)
    }

    /// Identity coordinates into `A (x)_min B`.
    pub fn min_rule(a: &OrderUnitSpace, b: &OrderUnitSpace) -> Result<Self> {
        let g = min_tensor(a, b)?;
        BilinearRule::new(a.clone(), b.clone(), g, linalg::identity(a.dim() * b.dim()))
    }

    /// Identity coordinates into `A (x)_max B`.
    pub fn max_rule(a: &OrderUnitSpace, b: &OrderUnitSpace) -> Result<Self> {
        let g = max_tensor(a, b)?;
        BilinearRule::new(a.clone(), b.clone(), g, linalg::identity(a.dim() * b.dim()))
    }

    /// Multiplication `R x R -> R`.
    pub fn multiplication() -> Self {
        let t = crate::systems::trivial();
        BilinearRule::new(t.clone(), t.clone(), t, vec![vec![Rational::one()]]).expect("valid rule")
    }

    /// The same composite with the factors exchanged.
    pub fn swapped(&self) -> Self {
        let (da, db) = (self.a.dim(), self.b.dim());
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..db * da)
                    .map(|k| {
                        let (j, i) = (k / da, k % da);
                        row[i * db + j].clone()
                    })
                    .collect()
            })
            .collect();
        BilinearRule {
            a: self.b.clone(),
            b: self.a.clone(),
            g: self.g.clone(),
            matrix,
        }
    }

    pub fn left(&self) -> &OrderUnitSpace {
        &self.a
    }

    pub fn right(&self) -> &OrderUnitSpace {
        &self.b
    }

    pub fn composite(&self) -> &OrderUnitSpace {
        &self.g
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, a: &[Rational], b: &[Rational]) -> Vector {
        mat_vec(&self.matrix, &kron(a, b))
    }

    /// `pi^*`: functional on `G` to functional on `A (x) B`.
    pub fn pull(&self, gamma: &[Rational]) -> Vector {
        mat_vec(&linalg::transpose(&self.matrix, self.a.dim() * self.b.dim()), gamma)
    }
}

/// The map `((x, a), (y, b)) -> ((x, y), pi(a, b))` from the product of two
/// fragments into the fragment of the paired observables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidalMap {
    pub left: TestSpace,
    pub right: TestSpace,
    pub source: TestSpace,
    pub target: TestSpace,
    pub image_catalog: Catalog,
    /// Target position of source outcome `x * |right| + y`.
    pub map: Vec<Option<usize>>,
    /// Source pairs whose image effect vanished.
    pub dropped: Vec<Outcome>,
    pub test_preserving: bool,
}

impl MonoidalMap {
    /// The joint table `(x, y) -> gamma(map(x, y))` for a weight on the target.
    pub fn pullback(&self, gamma: &[Rational]) -> Result<JointWeight> {
        let k = self.right.num_outcomes();
        let values = (0..self.left.num_outcomes())
            .map(|x| {
                (0..k)
                    .map(|y| self.map[x * k + y].map_or_else(Rational::zero, |t| gamma[t].clone()))
                    .collect()
            })
            .collect();
        JointWeight::new(&self.left, &self.right, values)
    }
}

pub fn monoidal_map(rule: &BilinearRule, ca: &Catalog, cb: &Catalog) -> Result<MonoidalMap> {
    if ca.space() != rule.left() || cb.space() != rule.right() {
        return input("catalogs are not over the rule's factor spaces");
    }
    let left = build_modj(ca)?.model.testspace().clone();
    let right = build_modj(cb)?.model.testspace().clone();
    let source = product_testspace(&left, &right)?;
    let mut dropped = BTreeSet::new();
    let mut observables = Vec::new();
    for f in ca.observables() {
        for g in cb.observables() {
            let mut pairs = Vec::new();
            for (x, a) in f.assignment() {
                for (y, b) in g.assignment() {
                    let c = rule.apply(a, b);
                    if is_zero(&c) {
                        dropped.insert(Outcome::pair(
                            Outcome::labeled(x.clone(), a.clone()),
                            Outcome::labeled(y.clone(), b.clone()),
                        ));
                    } else {
                        pairs.push((Outcome::pair(x.clone(), y.clone()), c));
                    }
                }
            }
            observables.push(Observable::new(rule.composite(), pairs)?);
        }
    }
    let image_catalog = Catalog::new(rule.composite().clone(), observables)?;
    let target = build_modj(&image_catalog)?.model.testspace().clone();
    let mut map = Vec::with_capacity(source.num_outcomes());
    for xo in left.outcomes() {
        for yo in right.outcomes() {
            let (Some((x, a)), Some((y, b))) = (xo.as_labeled(), yo.as_labeled()) else {
                return Err(Error::Internal("fragment outcome is not an (index, effect) pair".into()));
            };
            let image = Outcome::labeled(Outcome::pair(x.clone(), y.clone()), rule.apply(a, b));
            map.push(target.id(&image));
        }
    }
    let test_preserving = source.tests().iter().all(|t| {
        let mut img: Vec<usize> = t.iter().filter_map(|&s| map[s]).collect();
        img.sort_unstable();
        img.dedup();
        target.is_test(&img)
    });
    Ok(MonoidalMap {
        left,
        right,
        source,
        target,
        image_catalog,
        map,
        dropped: dropped.into_iter().collect(),
        test_preserving,
    })
}

/// Per-vertex outcome of [`monoidality_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidalityReport {
    pub vertices: usize,
    pub test_preserving: bool,
    pub nonsignalling: bool,
    pub conditionals_extend: bool,
    /// Pulled-back tables are `(a, b) -> a^T K b` for one matrix `K` per vertex.
    pub bilinear: bool,
    /// First vertex state of `G` that failed, if any.
    pub failing_vertex: Option<Vector>,
}

impl MonoidalityReport {
    pub fn passed(&self) -> bool {
        self.test_preserving && self.nonsignalling && self.conditionals_extend && self.bilinear
    }
}

fn effect_of(o: &Outcome) -> &Vector {
    o.as_labeled().expect("fragment outcomes are labeled").1
}

/// Whether a table on effect pairs is given by a single bilinear form.
fn fits_bilinear(rows: &[(Vector, Vector, Rational)], da: usize, db: usize) -> bool {
    let mut by_pair: BTreeMap<(&Vector, &Vector), &Rational> = BTreeMap::new();
    for (a, b, v) in rows {
        if by_pair.insert((a, b), v).is_some_and(|old| old != v) {
            return false;
        }
    }
    let system: Matrix = by_pair.keys().map(|(a, b)| kron(a, b)).collect();
    let rhs: Vector = by_pair.values().map(|v| (*v).clone()).collect();
    linalg::solve(&system, &rhs, da * db).is_some()
}

/// Sweeps the vertex states of `G`: each pulled-back table must be a
/// non-signalling weight whose conditionals extend to factor states.
pub fn monoidality_check(rule: &BilinearRule, ca: &Catalog, cb: &Catalog) -> Result<MonoidalityReport> {
    let mm = monoidal_map(rule, ca, cb)?;
    let vertices = rule.composite().state_polytope_vertices()?;
    let mut report = MonoidalityReport {
        vertices: vertices.len(),
        test_preserving: mm.test_preserving,
        nonsignalling: true,
        conditionals_extend: true,
        bilinear: true,
        failing_vertex: None,
    };
    let (l, r) = (&mm.left, &mm.right);
    for gamma in &vertices {
        let mu = mm.pullback(&lift_state(&mm.target, gamma)?)?;
        let ns = is_nonsignalling(l, r, &mu)?;
        let mut ext = ns;
        if ns {
            let lm = left_marginal(l, r, &mu)?;
            for (x, p) in lm.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let cond = conditional_right(l, r, &mu, x)?;
                let cons: Vec<(Vector, Rational)> = r.outcomes().iter().map(effect_of).cloned().zip(cond).collect();
                if extend_to_state(rule.right(), &cons)?.is_none() {
                    ext = false;
                    break;
                }
            }
            let rm = right_marginal(l, r, &mu)?;
            for (y, p) in rm.iter().enumerate() {
                if !ext || p.is_zero() {
                    continue;
                }
                let cond = conditional_left(l, r, &mu, y)?;
                let cons: Vec<(Vector, Rational)> = l.outcomes().iter().map(effect_of).cloned().zip(cond).collect();
                if extend_to_state(rule.left(), &cons)?.is_none() {
                    ext = false;
                }
            }
        }
        let rows: Vec<(Vector, Vector, Rational)> = l
            .outcomes()
            .iter()
            .enumerate()
            .flat_map(|(x, xo)| {
                let mu = &mu;
                r.outcomes()
                    .iter()
                    .enumerate()
                    .map(move |(y, yo)| (effect_of(xo).clone(), effect_of(yo).clone(), mu.value(x, y).clone()))
            })
            .collect();
        let bil = fits_bilinear(&rows, rule.left().dim(), rule.right().dim());
        report.nonsignalling &= ns;
        report.conditionals_extend &= ext;
        report.bilinear &= bil;
        if !(ns && ext && bil) && report.failing_vertex.is_none() {
            report.failing_vertex = Some(gamma.functional().clone());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeFlags {
    /// Every product of factor state generators is `pi^*` of some composite state.
    pub strong: bool,
    /// `pi^*` is injective.
    pub locally_tomographic: bool,
}

/// Flags for a composite whose state sets are the listed generators.
pub fn composite_flags(
    rule: &BilinearRule,
    states_a: &[State],
    states_b: &[State],
    states_g: &[State],
) -> CompositeFlags {
    let pulled: Vec<Vector> = states_g.iter().map(|g| rule.pull(g.functional())).collect();
    let strong = states_a.iter().all(|a| {
        states_b
            .iter()
            .all(|b| hull_membership(&pulled, &kron(a.functional(), b.functional())).is_member())
    });
    let locally_tomographic = linalg::rank(rule.matrix(), rule.left().dim() * rule.right().dim()) == rule.composite().dim();
    CompositeFlags {
        strong,
        locally_tomographic,
    }
}

/// [`composite_flags`] with every state set taken to be the full state polytope.
pub fn composite_flags_full(rule: &BilinearRule) -> Result<CompositeFlags> {
    Ok(composite_flags(
        rule,
        &rule.left().state_polytope_vertices()?,
        &rule.right().state_polytope_vertices()?,
        &rule.composite().state_polytope_vertices()?,
    ))
}

/// A space on `A (x) B` coordinates sits between the min and max cones.
pub fn cone_sandwich_check(a: &OrderUnitSpace, b: &OrderUnitSpace, g: &OrderUnitSpace) -> Result<bool> {
    if g.dim() != a.dim() * b.dim() {
        return input("composite space must have dimension dim A * dim B");
    }
    for t in g.generators() {
        if !max_cone_contains(a, b, t)? {
            return Ok(false);
        }
    }
    for t in min_generators(a, b) {
        if !g.cone_contains(&t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ivec, q};
    use crate::systems::{bit, bit_model, gbit, gbit_model, single_test, trivial, two_binary_tests};

    fn half() -> Rational {
        q(1, 2)
    }

    #[test]
    fn product_testspace_counts() {
        let p = product_testspace(&single_test(&["x", "y"]), &single_test(&["p", "q"])).unwrap();
        assert_eq!((p.tests().len(), p.num_outcomes()), (1, 4));
        let p = product_testspace(&two_binary_tests(), &two_binary_tests()).unwrap();
        assert_eq!(p.tests().len(), 4);
        let p = product_testspace(&crate::systems::grid(), &single_test(&["p"])).unwrap();
        assert_eq!(p.tests().len(), 6);
        // Flat order agrees with the product test space's outcome order.
        for (k, o) in p.outcomes().iter().enumerate().take(3) {
            let (x, _) = o.as_pair().unwrap();
            assert_eq!(x, crate::systems::grid().outcome(k));
        }
    }

    #[test]
    fn nonsignalling_examples() {
        let m = two_binary_tests();
        let alpha = vec![half(), half(), q(1, 3), q(2, 3)];
        let beta = vec![int(1), int(0), q(1, 4), q(3, 4)];
        let w = JointWeight::product(&m, &m, &alpha, &beta).unwrap();
        assert!(is_nonsignalling(&m, &m, &w).unwrap());
        assert_eq!(conditional_right(&m, &m, &w, 0).unwrap(), beta);
        assert_eq!(conditional_left(&m, &m, &w, 2).unwrap(), alpha);
        assert!(matches!(conditional_left(&m, &m, &w, 1), Err(Error::Undefined(_))));

        // x0 is certain against {x0, x1} but impossible against {y0, y1}.
        let signalling = vec![
            vec![int(1), int(0), int(0), int(0)],
            vec![int(0), int(0), int(0), int(1)],
            vec![half(), int(0), half(), int(0)],
            vec![half(), int(0), half(), int(0)],
        ];
        let w = JointWeight::new(&m, &m, signalling).unwrap();
        assert!(!is_nonsignalling(&m, &m, &w).unwrap());
        assert!(left_marginal(&m, &m, &w).is_err());
        assert!(JointWeight::new(&m, &m, vec![vec![int(1); 4]; 4]).is_err());

        let pr = pr_box();
        assert!(is_nonsignalling(&m, &m, &pr).unwrap());
        assert_eq!(left_marginal(&m, &m, &pr).unwrap(), vec![half(); 4]);
        assert_eq!(conditional_right(&m, &m, &pr, 0).unwrap(), vec![int(1), int(0), int(1), int(0)]);
    }

    #[test]
    fn pr_box_is_entangled() {
        let model = Model::full(two_binary_tests()).unwrap();
        let pr = pr_box();
        assert!(is_joint_state(&model, &model, &pr).unwrap());
        let v = separability(&model, &model, &pr).unwrap();
        assert!(!v.is_member());
        assert!(v.certificate().unwrap().verify(&v.lp));

        let a = &model.states()[0];
        let b = &model.states()[3];
        let m = model.testspace();
        let prod = JointWeight::product(m, m, a, b).unwrap();
        assert!(is_separable(&model, &model, &prod).unwrap());
        let c = &model.states()[1];
        let other = JointWeight::product(m, m, c, a).unwrap();
        let mix: Matrix = prod
            .values()
            .iter()
            .zip(other.values())
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x + y) / int(2)).collect())
            .collect();
        let mix = JointWeight::new(m, m, mix).unwrap();
        assert!(is_separable(&model, &model, &mix).unwrap());
    }

    #[test]
    fn proper_face_conditional_is_not_a_joint_state() {
        let ts = single_test(&["x0", "x1"]);
        let full = Model::full(ts.clone()).unwrap();
        let face = Model::new(ts.clone(), vec![ivec(&[1, 0])]).unwrap();
        let w = JointWeight::product(&ts, &ts, &ivec(&[1, 0]), &[half(), half()]).unwrap();
        assert!(is_joint_state(&full, &full, &w).unwrap());
        assert!(!is_joint_state(&full, &face, &w).unwrap());
        let v = hull_membership(face.states(), &[half(), half()]);
        assert!(v.certificate().unwrap().verify(&v.lp));
    }

    #[test]
    fn tensor_cone_examples() {
        let (b, g) = (bit(), gbit());
        assert!(min_cone_contains(&b, &b, &kron(b.unit(), b.unit())).unwrap());
        let t = linalg::sub(&kron(&ivec(&[1, 0]), &ivec(&[1, 0])), &kron(&ivec(&[0, 1]), &ivec(&[0, 1])));
        let v = min_cone_membership(&b, &b, &t).unwrap();
        assert!(!v.is_member());
        assert!(v.certificate().unwrap().verify(&v.lp));
        assert!(!max_cone_contains(&b, &b, &t).unwrap());

        let max = max_tensor(&g, &g).unwrap();
        assert_eq!(max.generators().len(), 24);
        let entangled: Vec<&Vector> = max
            .generators()
            .iter()
            .filter(|t| !min_cone_contains(&g, &g, t).unwrap())
            .collect();
        assert_eq!(entangled.len(), 8);
        assert!(cone_sandwich_check(&g, &g, &max).unwrap());
        assert!(cone_sandwich_check(&g, &g, &min_tensor(&g, &g).unwrap()).unwrap());
        assert!(max_tensor(&b, &b).unwrap().same_as(&min_tensor(&b, &b).unwrap()));
        assert!(min_cone_contains(&b, &g, &[int(1)]).is_err());
    }

    #[test]
    fn ns_polytope_matches_max_tensor() {
        let c = ns_max_comparison(&bit_model(), &bit_model()).unwrap();
        assert_eq!(c.ns_vertices.len(), 4);
        assert!(c.equal());
        let c = ns_max_comparison(&gbit_model(), &gbit_model()).unwrap();
        // 16 local deterministic boxes and 8 PR-type boxes.
        assert_eq!(c.ns_vertices.len(), 24);
        assert!(c.equal());
        assert!(c.ns_vertices.contains(&pr_box().flat()));
    }

    fn scalar_catalog(obs: &[&[Rational]]) -> Catalog {
        let t = trivial();
        let o = obs
            .iter()
            .enumerate()
            .map(|(k, vals)| {
                let pairs = vals
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (Outcome::atom(format!("{k}.{i}")), vec![v.clone()]))
                    .collect();
                Observable::new(&t, pairs).unwrap()
            })
            .collect();
        Catalog::new(t, o).unwrap()
    }

    fn delta_bit() -> Catalog {
        crate::systems::delta_bit_catalog()
    }

    fn gbit_catalog() -> Catalog {
        crate::systems::realized_catalog(&gbit_model()).unwrap()
    }

    #[test]
    fn monoidal_map_examples() {
        let ca = scalar_catalog(&[&[q(1, 2), q(1, 3), q(1, 6)]]);
        let cb = scalar_catalog(&[&[q(1, 4), q(3, 4)]]);
        let mm = monoidal_map(&BilinearRule::multiplication(), &ca, &cb).unwrap();
        assert_eq!(mm.target.num_outcomes(), 6);
        let total = mm
            .target
            .outcomes()
            .iter()
            .fold(int(0), |s, o| s + &effect_of(o)[0]);
        assert_eq!(total, int(1));
        assert!(mm.test_preserving);

        let rule = BilinearRule::min_rule(&bit(), &bit()).unwrap();
        let mm = monoidal_map(&rule, &delta_bit(), &delta_bit()).unwrap();
        let effects: BTreeSet<Vector> = mm.target.outcomes().iter().map(|o| effect_of(o).clone()).collect();
        assert_eq!(effects, (0..4).map(|i| linalg::unit_vector(4, i)).collect());

        let unit_obs = |s: &OrderUnitSpace| {
            Catalog::new(s.clone(), vec![Observable::from_named(s, &[("u", s.unit().clone())]).unwrap()]).unwrap()
        };
        let mm = monoidal_map(&rule, &unit_obs(&bit()), &unit_obs(&bit())).unwrap();
        assert_eq!(mm.target.tests().len(), 1);
        assert_eq!(effect_of(mm.target.outcome(0)), rule.composite().unit());
    }

    #[test]
    fn monoidality_examples() {
        let ca = scalar_catalog(&[&[q(1, 2), q(1, 2)], &[q(1, 3), q(2, 3)]]);
        let cb = scalar_catalog(&[&[q(1, 5), q(4, 5)]]);
        assert!(monoidality_check(&BilinearRule::multiplication(), &ca, &cb).unwrap().passed());

        let rule = BilinearRule::min_rule(&bit(), &bit()).unwrap();
        let r = monoidality_check(&rule, &delta_bit(), &delta_bit()).unwrap();
        assert!(r.passed());
        assert_eq!(r.vertices, 4);

        let rule = BilinearRule::max_rule(&gbit(), &gbit()).unwrap();
        let r = monoidality_check(&rule, &gbit_catalog(), &gbit_catalog()).unwrap();
        assert!(r.passed());
        assert_eq!(r.vertices, 16);
    }

    #[test]
    fn composite_flag_examples() {
        let rule = BilinearRule::min_rule(&bit(), &bit()).unwrap();
        assert_eq!(
            composite_flags_full(&rule).unwrap(),
            CompositeFlags {
                strong: true,
                locally_tomographic: true
            }
        );
        let only = [State(kron(&ivec(&[1, 0]), &ivec(&[1, 0])))];
        let sa = bit().state_polytope_vertices().unwrap();
        assert!(!composite_flags(&rule, &sa, &sa, &only).strong);
        assert!(composite_flags_full(&BilinearRule::max_rule(&gbit(), &gbit()).unwrap()).unwrap().strong);
    }

    #[test]
    fn swapped_rule_swaps_tensors() {
        let rule = BilinearRule::min_rule(&bit(), &gbit()).unwrap();
        let s = rule.swapped();
        let (a, b) = (ivec(&[2, 3]), ivec(&[1, -1, 5]));
        let direct = rule.apply(&a, &b);
        let swapped = s.apply(&b, &a);
        assert_eq!(direct, swapped);
        assert!(BilinearRule::new(
            bit(),
            bit(),
            trivial(),
            vec![ivec(&[1, 0, 0, 1])]
        )
        .is_err());
    }
}
