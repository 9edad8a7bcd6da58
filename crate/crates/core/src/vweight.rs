//! Weights with values in an order-unit space, probabilistic models, and the
//! canonical weight into the dual of the span of a model's states.

use std::collections::BTreeSet;

use crate::error::{input, Error, Result};
use crate::linalg::{self, is_zero, sum, Matrix};
use crate::ous::{OrderUnitSpace, State};
use crate::rational::{fmt_vector, Rational, Vector};
use crate::testspace::TestSpace;

/// Checks cone membership of every value and that values sum to the unit on every test.
pub fn is_valued_weight(space: &OrderUnitSpace, ts: &TestSpace, values: &[Vector]) -> Result<bool> {
    Ok(valued_weight_violation(space, ts, values)?.is_none())
}

/// Description of the first violated condition, if any.
pub fn valued_weight_violation(
    space: &OrderUnitSpace,
    ts: &TestSpace,
    values: &[Vector],
) -> Result<Option<String>> {
    if values.len() != ts.num_outcomes() {
        return input(format!(
            "weight has {} values for {} outcomes",
            values.len(),
            ts.num_outcomes()
        ));
    }
    for (x, v) in ts.outcomes().iter().zip(values) {
        space.check_dim(v)?;
        if !space.cone_contains(v)? {
            return Ok(Some(format!("value {} at {x} is not positive", fmt_vector(v))));
        }
    }
    for t in ts.tests() {
        let total = sum(space.dim(), t.iter().map(|&i| &values[i]));
        if &total != space.unit() {
            return Ok(Some(format!(
                "values on test {} sum to {}, not the unit {}",
                ts.fmt_event(t),
                fmt_vector(&total),
                fmt_vector(space.unit())
            )));
        }
    }
    Ok(None)
}

/// A normalized weight on a test space with values in a space's positive cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuedWeight {
    space: OrderUnitSpace,
    testspace: TestSpace,
    values: Vec<Vector>,
}

impl ValuedWeight {
    /// `values` is indexed by outcome position in `testspace`.
    pub fn new(space: OrderUnitSpace, testspace: TestSpace, values: Vec<Vector>) -> Result<Self> {
        if let Some(why) = valued_weight_violation(&space, &testspace, &values)? {
            return input(format!("not a valued weight: {why}"));
        }
        Ok(ValuedWeight {
            space,
            testspace,
            values,
        })
    }

    pub fn space(&self) -> &OrderUnitSpace {
        &self.space
    }

    pub fn testspace(&self) -> &TestSpace {
        &self.testspace
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &Vector {
        &self.values[x]
    }

    /// The probability weight `x -> phi(F(x))`.
    pub fn pullback_state(&self, phi: &State) -> Result<Vector> {
        if !self.space.is_state(phi.functional())? {
            return input(format!("{} is not a state", fmt_vector(phi.functional())));
        }
        Ok(self.values.iter().map(|v| phi.eval(v)).collect())
    }

    /// The model carried by the pullbacks of all vertex states of the space.
    pub fn pullback_model(&self) -> Result<Model> {
        let states = self
            .space
            .state_polytope_vertices()?
            .iter()
            .map(|phi| self.pullback_state(phi))
            .collect::<Result<Vec<_>>>()?;
        Model::new(self.testspace.clone(), states)
    }
}

/// A test space with a finite list of probability weights generating its state set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    testspace: TestSpace,
    states: Vec<Vector>,
}

impl Model {
    /// States are validated and stored sorted without repetitions.
    pub fn new(testspace: TestSpace, states: Vec<Vector>) -> Result<Self> {
        for (k, s) in states.iter().enumerate() {
            if !testspace.is_probability_weight(s)? {
                let why = match testspace.failing_test(s) {
                    Some(t) => format!("does not sum to 1 on test {}", testspace.fmt_event(&testspace.tests()[t])),
                    None => "has a negative value".to_string(),
                };
                return input(format!("state {k} {why}"));
            }
        }
        let states: Vec<Vector> = states.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        Ok(Model { testspace, states })
    }

    /// The model whose states are all probability weights.
    pub fn full(testspace: TestSpace) -> Result<Self> {
        let states = testspace.weight_polytope_vertices()?;
        Model::new(testspace, states)
    }

    pub fn testspace(&self) -> &TestSpace {
        &self.testspace
    }

    pub fn states(&self) -> &[Vector] {
        &self.states
    }
}

/// The canonical weight `x -> x^` of a model, with the basis of `V(Omega)`
/// that fixes its coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalWeight {
    pub weight: ValuedWeight,
    /// Rows span the states; `x^` has coordinates `(b_1[x], ..., b_r[x])`.
    pub basis: Matrix,
}

impl CanonicalWeight {
    /// Coordinates of a weight in `V(Omega)` relative to the basis, if it lies there.
    pub fn coordinates(&self, alpha: &[Rational]) -> Option<Vector> {
        linalg::coordinates(&self.basis, alpha)
    }
}

/// Sends each outcome to its evaluation functional on the span of the states.
pub fn canonical_weight(model: &Model) -> Result<CanonicalWeight> {
    if model.states.is_empty() {
        return input("model has no states");
    }
    let ts = &model.testspace;
    let n = ts.num_outcomes();
    let basis = linalg::row_basis(&model.states, n);
    let hats: Vec<Vector> = (0..n)
        .map(|x| basis.iter().map(|b| b[x].clone()).collect())
        .collect();
    let generators: Vec<Vector> = hats.iter().filter(|h| !is_zero(h)).cloned().collect();
    let first = ts
        .tests()
        .first()
        .ok_or_else(|| Error::Input("model has no tests".into()))?;
    let unit = sum(basis.len(), first.iter().map(|&x| &hats[x]));
    let space = OrderUnitSpace::new(generators, unit)
        .map_err(|e| Error::Internal(format!("canonical target space is invalid: {e}")))?;
    let weight = ValuedWeight::new(space, ts.clone(), hats)
        .map_err(|e| Error::Internal(format!("canonical weight is invalid: {e}")))?;
    Ok(CanonicalWeight { weight, basis })
}

/// The linear map `L` with `L(x^) = F(x)` for every outcome, when it exists
/// and also sends the canonical unit to the unit of `F`'s space.
pub fn factor_map(f: &ValuedWeight) -> Result<Option<Matrix>> {
    let model = f.pullback_model()?;
    let canon = canonical_weight(&model)?;
    let hats = canon.weight.values();
    let r = canon.basis.len();
    let d = f.space.dim();

    // Every linear relation among the x^ must hold among the F(x).
    for c in linalg::nullspace(&linalg::transpose(hats, r), hats.len()) {
        let mut combo = linalg::zeros(d);
        for (cx, fx) in c.iter().zip(&f.values) {
            for (acc, v) in combo.iter_mut().zip(fx) {
                *acc += cx * v;
            }
        }
        if !is_zero(&combo) {
            return Ok(None);
        }
    }

    // Solve row by row: L_i . x^ = F(x)_i for all x.
    let mut map = Matrix::with_capacity(d);
    for i in 0..d {
        let rhs: Vector = f.values.iter().map(|v| v[i].clone()).collect();
        match linalg::solve(hats, &rhs, r) {
            Some(row) => map.push(row),
            None => return Ok(None),
        }
    }
    let consistent = hats
        .iter()
        .zip(&f.values)
        .all(|(h, v)| &linalg::mat_vec(&map, h) == v);
    let unit_ok = &linalg::mat_vec(&map, canon.weight.space().unit()) == f.space.unit();
    Ok((consistent && unit_ok).then_some(map))
}

/// `F` factors through its canonical weight.
pub fn factorization_check(f: &ValuedWeight) -> Result<bool> {
    Ok(factor_map(f)?.is_some())
}
