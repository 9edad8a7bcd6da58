//! Indexed observables, their graphs, and finite fragments of the test spaces
//! built from them.
//!
//! The full test spaces are infinite; everything here works on explicitly
//! supplied catalogs of observables.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{input, resource, structural, Error, Result};
use crate::linalg::{is_zero, sub, sum};
use crate::lp::{LinearProgram, LpOutcome};
use crate::ous::{OrderUnitSpace, State};
use crate::rational::{fmt_vector, Rational, Vector};
use crate::testspace::{bell, event_cap, set_partitions, Outcome, TestSpace, EVENT_CAP_VAR};
use crate::vweight::Model;

/// A finite family of nonzero effects, keyed by distinct indices, summing to the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observable {
    assignment: Vec<(Outcome, Vector)>,
}

impl Observable {
    pub fn new(space: &OrderUnitSpace, mut assignment: Vec<(Outcome, Vector)>) -> Result<Self> {
        if assignment.is_empty() {
            return input("observable needs at least one index");
        }
        assignment.sort();
        if assignment.windows(2).any(|w| w[0].0 == w[1].0) {
            return input("observable indices must be distinct");
        }
        for (i, a) in &assignment {
            space.check_dim(a)?;
            if is_zero(a) {
                return input(format!("observable assigns the zero effect to index {i}"));
            }
            if !space.is_effect(a)? {
                return input(format!("{} at index {i} is not an effect", fmt_vector(a)));
            }
        }
        let total = sum(space.dim(), assignment.iter().map(|(_, a)| a));
        if &total != space.unit() {
            return input(format!(
                "observable sums to {}, not the unit {}",
                fmt_vector(&total),
                fmt_vector(space.unit())
            ));
        }
        Ok(Observable { assignment })
    }

    /// Observable over atom indices.
    pub fn from_named(space: &OrderUnitSpace, pairs: &[(&str, Vector)]) -> Result<Self> {
        Observable::new(
            space,
            pairs.iter().map(|(i, a)| (Outcome::atom(*i), a.clone())).collect(),
        )
    }

    pub fn assignment(&self) -> &[(Outcome, Vector)] {
        &self.assignment
    }

    pub fn indices(&self) -> impl Iterator<Item = &Outcome> {
        self.assignment.iter().map(|(i, _)| i)
    }

    /// The graph `{(i, f(i))}` as a sorted list of outcomes.
    pub fn graph(&self) -> Vec<Outcome> {
        self.assignment
            .iter()
            .map(|(i, a)| Outcome::labeled(i.clone(), a.clone()))
            .collect()
    }
}

/// The graph of an observable.
pub fn observable_graph(f: &Observable) -> Vec<Outcome> {
    f.graph()
}

/// A finite list of observables over one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    space: OrderUnitSpace,
    observables: Vec<Observable>,
}

impl Catalog {
    pub fn new(space: OrderUnitSpace, observables: Vec<Observable>) -> Result<Self> {
        if observables.is_empty() {
            return input("catalog must contain an observable");
        }
        Ok(Catalog { space, observables })
    }

    pub fn space(&self) -> &OrderUnitSpace {
        &self.space
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    fn atom_names(&self) -> BTreeSet<String> {
        self.observables
            .iter()
            .flat_map(|f| f.indices())
            .filter_map(|i| match i {
                Outcome::Atom(s) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }
}

/// The finite fragment of graphs of a catalog, with the states of the space lifted to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModJModel {
    pub model: Model,
    pub source: Catalog,
    /// The vertex states that were lifted, in the order of `model`'s construction.
    pub vertices: Vec<State>,
}

impl ModJModel {
    pub fn testspace(&self) -> &TestSpace {
        self.model.testspace()
    }

    pub fn space(&self) -> &OrderUnitSpace {
        self.source.space()
    }
}

/// The weight `(j, a) -> phi(a)` on a fragment of graph outcomes.
pub fn lift_state(ts: &TestSpace, phi: &State) -> Result<Vector> {
    ts.outcomes()
        .iter()
        .map(|o| match o.as_labeled() {
            Some((_, a)) => Ok(phi.eval(a)),
            None => input(format!("{o} is not an (index, effect) outcome")),
        })
        .collect()
}

/// Test space of the catalog's graphs, with every vertex state of the space lifted.
pub fn build_modj(catalog: &Catalog) -> Result<ModJModel> {
    let graphs: Vec<Vec<Outcome>> = catalog.observables.iter().map(Observable::graph).collect();
    let ts = TestSpace::new(graphs).map_err(|e| match e {
        Error::Structural(m) => Error::Structural(format!("catalog graphs are redundant: {m}")),
        other => other,
    })?;
    let vertices = catalog.space.state_polytope_vertices()?;
    let states = vertices
        .iter()
        .map(|phi| lift_state(&ts, phi))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModJModel {
        model: Model::new(ts, states)?,
        source: catalog.clone(),
        vertices,
    })
}

/// Subsets of `effects` summing exactly to the unit, as tests on bare-effect outcomes.
pub fn decompositions_fragment(space: &OrderUnitSpace, effects: &[Vector]) -> Result<TestSpace> {
    let distinct: BTreeSet<&Vector> = effects.iter().collect();
    if distinct.len() != effects.len() {
        return input("effects must be distinct");
    }
    for a in effects {
        space.check_dim(a)?;
        if is_zero(a) || !space.is_effect(a)? {
            return input(format!("{} is not a nonzero effect", fmt_vector(a)));
        }
    }
    let n = effects.len();
    if n >= 63 || (1usize << n) > event_cap() {
        return resource(format!(
            "{n} effects give too many subsets for the cap ({EVENT_CAP_VAR})"
        ));
    }
    let mut tests = Vec::new();
    for mask in 1u64..1 << n {
        let chosen: Vec<&Vector> = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| &effects[k]).collect();
        if &sum(space.dim(), chosen.iter().copied()) == space.unit() {
            tests.push(chosen.into_iter().map(|a| Outcome::Effect(a.clone())).collect());
        }
    }
    TestSpace::new(tests)
}

/// A state `f` with `f(a_i) = c_i` for every constraint, if one exists.
pub fn extend_to_state(space: &OrderUnitSpace, constraints: &[(Vector, Rational)]) -> Result<Option<State>> {
    let d = space.dim();
    let mut lp = LinearProgram::new(d);
    for j in 0..d {
        lp.set_free(j);
    }
    for g in space.generators() {
        lp.add_ge(g.clone(), Rational::zero());
    }
    lp.add_eq(space.unit().clone(), Rational::one());
    for (a, c) in constraints {
        space.check_dim(a)?;
        lp.add_eq(a.clone(), c.clone());
    }
    match lp.solve() {
        LpOutcome::Optimal { point, .. } => Ok(Some(State(point))),
        LpOutcome::Infeasible(_) => Ok(None),
        LpOutcome::Unbounded => Err(Error::Internal("feasibility LP reported unbounded".into())),
    }
}

/// Outcomes are nonempty subsets of `{1..n}`, tests are partitions of `{1..n}`.
pub fn boolean_testspace(n: usize) -> Result<TestSpace> {
    if n == 0 {
        return input("boolean test space needs n >= 1");
    }
    if bell(n) > event_cap() as u128 {
        return resource(format!("partitions of {n} points exceed the cap ({EVENT_CAP_VAR})"));
    }
    let points: Vec<Outcome> = (1..=n).map(|k| Outcome::atom(k.to_string())).collect();
    let tests = set_partitions(&points)
        .into_iter()
        .map(|p| p.into_iter().map(Outcome::event).collect())
        .collect();
    TestSpace::new(tests)
}

/// All observables whose index set is a test of `indexing` and whose values are
/// drawn from `effects`.
pub fn indexed_catalog(space: &OrderUnitSpace, indexing: &TestSpace, effects: &[Vector]) -> Result<Catalog> {
    for a in effects {
        space.check_dim(a)?;
        if is_zero(a) || !space.is_effect(a)? {
            return input(format!("{} is not a nonzero effect", fmt_vector(a)));
        }
    }
    let cap = event_cap() as f64;
    let total: f64 = indexing
        .tests()
        .iter()
        .map(|t| (effects.len() as f64).powi(t.len() as i32))
        .sum();
    if total > cap {
        return resource(format!("indexed fragment needs about {total} maps, above the cap ({EVENT_CAP_VAR})"));
    }
    let mut observables = Vec::new();
    for t in indexing.tests() {
        let k = t.len();
        let mut choice = vec![0usize; k];
        loop {
            let values: Vec<&Vector> = choice.iter().map(|&c| &effects[c]).collect();
            if &sum(space.dim(), values.iter().copied()) == space.unit() {
                let pairs = t
                    .iter()
                    .zip(&values)
                    .map(|(&x, a)| (indexing.outcome(x).clone(), (*a).clone()))
                    .collect();
                observables.push(Observable::new(space, pairs)?);
            }
            let mut pos = 0;
            while pos < k && choice[pos] + 1 == effects.len() {
                choice[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
            choice[pos] += 1;
        }
    }
    if observables.is_empty() {
        return structural("no map from a test into the effect list sums to the unit");
    }
    Catalog::new(space.clone(), observables)
}

/// Pair of outcomes `(i, a)`, `(j, a)` lacking a common `(r, u - a)` completing both.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MissingCompletion {
    pub first: Outcome,
    pub second: Outcome,
    pub effect: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionAudit {
    pub closed: bool,
    pub missing: Vec<MissingCompletion>,
    /// Largest `beta(i, a) - beta(j, a)` over weights and same-effect pairs.
    pub max_gap: Rational,
    /// Every vertex of the fragment's weight polytope is the lift of a state.
    pub extension_ok: bool,
    /// Vertices that admit no state, in weight-polytope order.
    pub non_extending: Vec<Vector>,
}

fn effect_index_table(ts: &TestSpace) -> BTreeMap<Vector, Vec<usize>> {
    let mut by_effect: BTreeMap<Vector, Vec<usize>> = BTreeMap::new();
    for (id, o) in ts.outcomes().iter().enumerate() {
        if let Some((_, a)) = o.as_labeled() {
            by_effect.entry(a.clone()).or_default().push(id);
        }
    }
    by_effect
}

/// Audits the binary-completion hypothesis on the fragment of `catalog`, then
/// measures how far weights separate same-effect outcomes and whether every
/// extreme weight comes from a state.
pub fn completion_audit(catalog: &Catalog) -> Result<CompletionAudit> {
    let space = catalog.space();
    let m = build_modj(catalog)?;
    let ts = m.testspace();
    let unit = space.unit();
    let by_effect = effect_index_table(ts);

    let mut missing = Vec::new();
    let mut pairs = Vec::new();
    for (a, ids) in &by_effect {
        let complement = sub(unit, a);
        for (p, &x) in ids.iter().enumerate() {
            for &y in &ids[p + 1..] {
                pairs.push((x, y));
                if a == unit {
                    continue;
                }
                let partners = |z: usize| -> BTreeSet<Outcome> {
                    ts.tests()
                        .iter()
                        .filter(|t| t.len() == 2 && t.contains(&z))
                        .flat_map(|t| t.iter().copied())
                        .filter(|&w| w != z)
                        .map(|w| ts.outcome(w).clone())
                        .filter(|o| o.as_labeled().is_some_and(|(_, b)| *b == complement))
                        .collect()
                };
                if partners(x).is_disjoint(&partners(y)) {
                    missing.push(MissingCompletion {
                        first: ts.outcome(x).clone(),
                        second: ts.outcome(y).clone(),
                        effect: a.clone(),
                    });
                }
            }
        }
    }

    let mut max_gap = Rational::zero();
    for &(x, y) in &pairs {
        for gap in [ts.weight_equality_bound(x, y)?, ts.weight_equality_bound(y, x)?] {
            if gap > max_gap {
                max_gap = gap;
            }
        }
    }

    let mut non_extending = Vec::new();
    for beta in ts.weight_polytope_vertices()? {
        let constraints: Vec<(Vector, Rational)> = ts
            .outcomes()
            .iter()
            .zip(&beta)
            .map(|(o, b)| (o.as_labeled().expect("graph outcome").1.clone(), b.clone()))
            .collect();
        if extend_to_state(space, &constraints)?.is_none() {
            non_extending.push(beta);
        }
    }

    Ok(CompletionAudit {
        closed: missing.is_empty(),
        missing,
        max_gap,
        extension_ok: non_extending.is_empty(),
        non_extending,
    })
}

/// Binary observables that make the catalog satisfy the completion hypothesis.
///
/// For every effect `a != u` carried by two or more indices, each `(i, a)` is
/// paired with each `(k, u - a)` already present; when `u - a` is carried by no
/// index a fresh index `r#k` is introduced. For `a = u/2` the indices carrying
/// `a` are completed to a complete graph, adding a fresh index when only two exist.
pub fn completion_observables(catalog: &Catalog) -> Result<Vec<Observable>> {
    let space = catalog.space();
    let unit = space.unit().clone();
    let m = build_modj(catalog)?;
    let ts = m.testspace();
    let by_effect = effect_index_table(ts);
    let mut used = catalog.atom_names();
    let mut fresh = || -> Outcome {
        let k = (0..).find(|k| !used.contains(&format!("r#{k}"))).expect("unbounded range");
        let name = format!("r#{k}");
        used.insert(name.clone());
        Outcome::Atom(name)
    };
    let indices = |a: &Vector| -> Vec<Outcome> {
        by_effect
            .get(a)
            .map(|ids| {
                ids.iter()
                    .map(|&id| ts.outcome(id).as_labeled().expect("graph outcome").0.clone())
                    .collect()
            })
            .unwrap_or_default()
    };
    let existing: BTreeSet<Vec<Outcome>> = ts
        .tests()
        .iter()
        .map(|t| t.iter().map(|&i| ts.outcome(i).clone()).collect())
        .collect();

    let mut out: BTreeSet<Observable> = BTreeSet::new();
    let mut handled: BTreeSet<Vector> = BTreeSet::new();
    for (a, ids) in &by_effect {
        if *a == unit || ids.len() < 2 || handled.contains(a) {
            continue;
        }
        let b = sub(&unit, a);
        handled.insert(a.clone());
        handled.insert(b.clone());
        let mut pairs: Vec<(Outcome, Vector, Outcome, Vector)> = Vec::new();
        if *a == b {
            let mut idx = indices(a);
            if idx.len() == 2 {
                idx.push(fresh());
            }
            for p in 0..idx.len() {
                for q in p + 1..idx.len() {
                    pairs.push((idx[p].clone(), a.clone(), idx[q].clone(), a.clone()));
                }
            }
        } else {
            let left = indices(a);
            let mut right = indices(&b);
            if right.is_empty() {
                right.push(fresh());
            }
            for i in &left {
                for k in &right {
                    pairs.push((i.clone(), a.clone(), k.clone(), b.clone()));
                }
            }
        }
        for (i, x, k, y) in pairs {
            let f = Observable::new(space, vec![(i, x), (k, y)])?;
            if !existing.contains(&f.graph()) {
                out.insert(f);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The catalog extended by [`completion_observables`].
pub fn complete_catalog(catalog: &Catalog) -> Result<Catalog> {
    let mut observables = catalog.observables().to_vec();
    observables.extend(completion_observables(catalog)?);
    Catalog::new(catalog.space().clone(), observables)
}

/// Whether `beta` is a weight on the decompositions fragment that is the
/// restriction of some state.
pub fn restricts_from_state(space: &OrderUnitSpace, ts: &TestSpace, beta: &[Rational]) -> Result<bool> {
    let constraints = ts
        .outcomes()
        .iter()
        .zip(beta)
        .map(|(o, b)| match o {
            Outcome::Effect(a) => Ok((a.clone(), b.clone())),
            other => input(format!("{other} is not a bare effect outcome")),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(extend_to_state(space, &constraints)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ivec, q};
    use crate::linalg::dot;
    use crate::systems::{bit, square_bit, trivial};

    fn s(v: i64, d: i64) -> Vector {
        vec![q(v, d)]
    }

    #[test]
    fn graph_examples() {
        let f = Observable::from_named(&bit(), &[("1", ivec(&[1, 0])), ("2", ivec(&[0, 1]))]).unwrap();
        assert_eq!(
            observable_graph(&f),
            vec![
                Outcome::labeled(Outcome::atom("1"), ivec(&[1, 0])),
                Outcome::labeled(Outcome::atom("2"), ivec(&[0, 1]))
            ]
        );
        let h = vec![q(1, 2), q(1, 2)];
        let f = Observable::from_named(&bit(), &[("1", h.clone()), ("2", h)]).unwrap();
        let g = f.graph();
        assert_eq!(g.len(), 2);
        assert_ne!(g[0], g[1]);
        let f = Observable::from_named(&trivial(), &[("1", s(1, 6)), ("2", s(1, 3)), ("3", s(1, 2))]).unwrap();
        assert_eq!(f.graph().len(), 3);
        assert!(Observable::from_named(&bit(), &[("1", ivec(&[1, 1])), ("2", ivec(&[0, 0]))]).is_err());
    }

    fn permutation_catalog() -> Catalog {
        let vals = [s(1, 6), s(1, 3), s(1, 2)];
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let obs = perms
            .iter()
            .map(|p| {
                Observable::from_named(
                    &trivial(),
                    &[("1", vals[p[0]].clone()), ("2", vals[p[1]].clone()), ("3", vals[p[2]].clone())],
                )
                .unwrap()
            })
            .collect();
        Catalog::new(trivial(), obs).unwrap()
    }

    #[test]
    fn build_modj_examples() {
        let delta = Observable::from_named(&bit(), &[("1", ivec(&[1, 0])), ("2", ivec(&[0, 1]))]).unwrap();
        let m = build_modj(&Catalog::new(bit(), vec![delta]).unwrap()).unwrap();
        assert_eq!(m.testspace().tests().len(), 1);
        assert_eq!(m.testspace().num_outcomes(), 2);
        assert_eq!(m.model.states().len(), 2);

        let m = build_modj(&permutation_catalog()).unwrap();
        let ts = m.testspace();
        assert_eq!((ts.tests().len(), ts.num_outcomes()), (6, 9));
        // Each outcome lies in exactly two tests: a row (fixed value) and a column (fixed index).
        for x in 0..9 {
            assert_eq!(ts.tests().iter().filter(|t| t.contains(&x)).count(), 2);
        }
    }

    #[test]
    fn graphs_overlap_at_shared_pairs() {
        let a = s(1, 6);
        let f = Observable::from_named(&trivial(), &[("1", a.clone()), ("2", s(1, 2)), ("3", s(1, 3))]).unwrap();
        let g = Observable::from_named(&trivial(), &[("1", a.clone()), ("2", s(1, 3)), ("3", s(1, 2))]).unwrap();
        let m = build_modj(&Catalog::new(trivial(), vec![f, g]).unwrap()).unwrap();
        let ts = m.testspace();
        let shared = ts.id(&Outcome::labeled(Outcome::atom("1"), a)).unwrap();
        assert!(ts.tests().iter().all(|t| t.contains(&shared)));
    }

    #[test]
    fn lifted_states_depend_only_on_effects() {
        let m = build_modj(&permutation_catalog()).unwrap();
        let ts = m.testspace();
        for alpha in m.model.states() {
            for x in 0..ts.num_outcomes() {
                for y in 0..ts.num_outcomes() {
                    if ts.outcome(x).as_labeled().unwrap().1 == ts.outcome(y).as_labeled().unwrap().1 {
                        assert_eq!(alpha[x], alpha[y]);
                    }
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let ts = decompositions_fragment(&bit(), &[ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[1, 1])]).unwrap();
        let tests: BTreeSet<Vec<Outcome>> = ts
            .tests()
            .iter()
            .map(|t| t.iter().map(|&i| ts.outcome(i).clone()).collect())
            .collect();
        let expected: BTreeSet<Vec<Outcome>> = [
            vec![Outcome::Effect(ivec(&[0, 1])), Outcome::Effect(ivec(&[1, 0]))],
            vec![Outcome::Effect(ivec(&[1, 1]))],
        ]
        .into_iter()
        .collect();
        assert_eq!(tests, expected);
        let ts = decompositions_fragment(&bit(), &[ivec(&[1, 1])]).unwrap();
        assert_eq!(ts.tests().len(), 1);
        let ts = decompositions_fragment(&trivial(), &[s(1, 2)]).unwrap();
        assert!(ts.tests().is_empty());
    }

    #[test]
    fn decomposition_weights_restrict_from_states() {
        // Every sum of coordinate effects of classical(3): each weight is fixed by
        // its values on e1, e2, e3.
        let sp = crate::systems::classical(3);
        let effects: Vec<Vector> = (1u32..8)
            .map(|m| (0..3).map(|k| int(i64::from(m >> k & 1))).collect())
            .collect();
        let ts = decompositions_fragment(&sp, &effects).unwrap();
        assert_eq!(ts.tests().len(), 5);
        for beta in ts.weight_polytope_vertices().unwrap() {
            assert!(restricts_from_state(&sp, &ts, &beta).unwrap());
        }
    }

    #[test]
    fn sparse_decompositions_admit_foreign_weights() {
        // Two independent binary decompositions: the weight putting 1 on both
        // (1,0) and (1/2,1/4) is no state.
        let effects = vec![ivec(&[1, 0]), ivec(&[0, 1]), vec![q(1, 2), q(1, 4)], vec![q(1, 2), q(3, 4)]];
        let ts = decompositions_fragment(&bit(), &effects).unwrap();
        let verts = ts.weight_polytope_vertices().unwrap();
        assert!(verts.iter().any(|b| !restricts_from_state(&bit(), &ts, b).unwrap()));
    }

    #[test]
    fn extension_examples() {
        let w = extend_to_state(&bit(), &[(ivec(&[1, 0]), q(1, 3))]).unwrap().unwrap();
        assert_eq!(w.0, vec![q(1, 3), q(2, 3)]);
        assert!(extend_to_state(&bit(), &[(ivec(&[1, 0]), int(2))]).unwrap().is_none());
        // Values taken from the state (1, 1/2, -1/3).
        let phi = [int(1), q(1, 2), q(-1, 3)];
        let a = vec![q(1, 2), q(1, 2), int(0)];
        let b = vec![q(1, 2), int(0), q(-1, 2)];
        let c = [dot(&phi, &a), dot(&phi, &b)];
        let w = extend_to_state(&square_bit(), &[(a.clone(), c[0].clone()), (b.clone(), c[1].clone())])
            .unwrap()
            .unwrap();
        assert!(square_bit().is_state(&w.0).unwrap());
        assert_eq!(dot(&w.0, &a), c[0]);
        assert_eq!(dot(&w.0, &b), c[1]);
    }

    #[test]
    fn boolean_examples() {
        let b1 = boolean_testspace(1).unwrap();
        assert_eq!(b1.tests().len(), 1);
        let b3 = boolean_testspace(3).unwrap();
        assert_eq!((b3.tests().len(), b3.num_outcomes()), (5, 7));
        let b2 = boolean_testspace(2).unwrap();
        assert_eq!(b2.tests().len(), 2);
        assert!(b2.tests().iter().any(|t| t.len() == 1));
        assert!(b2.tests().iter().any(|t| t.len() == 2));
    }

    fn binary(i: &str, a: &Vector, r: &str) -> Observable {
        let b = sub(bit().unit(), a);
        Observable::from_named(&bit(), &[(i, a.clone()), (r, b)]).unwrap()
    }

    #[test]
    fn closed_binary_family_has_zero_gap() {
        let a = vec![q(1, 2), q(1, 4)];
        let cat = Catalog::new(bit(), vec![binary("i", &a, "r"), binary("j", &a, "r")]).unwrap();
        let rep = completion_audit(&cat).unwrap();
        assert!(rep.closed);
        assert_eq!(rep.max_gap, int(0));
        // The bare family also admits the weight beta(i, a) = 1, which no state
        // attains since every state gives a a value in [1/4, 1/2].
        assert!(!rep.extension_ok);
        assert!(rep.non_extending.iter().any(|b| b.contains(&int(1))));
    }

    #[test]
    fn enriched_binary_family_extends() {
        let a = vec![q(1, 2), q(1, 4)];
        let h = vec![int(0), q(1, 2)];
        let sp = bit();
        let mut obs = vec![binary("i", &a, "r"), binary("j", &a, "r")];
        obs.push(Observable::from_named(&sp, &[("1", ivec(&[1, 0])), ("2", ivec(&[0, 1]))]).unwrap());
        obs.push(Observable::from_named(&sp, &[("1", a.clone()), ("2", a.clone()), ("3", h.clone())]).unwrap());
        obs.push(Observable::from_named(&sp, &[("1", h.clone()), ("2", h), ("3", ivec(&[1, 0]))]).unwrap());
        let cat = Catalog::new(sp, obs).unwrap();
        assert!(!completion_audit(&cat).unwrap().closed);
        let closed = complete_catalog(&cat).unwrap();
        let rep = completion_audit(&closed).unwrap();
        assert!(rep.closed, "{:?}", rep.missing);
        assert_eq!(rep.max_gap, int(0));
        assert!(rep.extension_ok);
    }

    #[test]
    fn missing_completions_are_listed() {
        let a = vec![q(1, 2), q(1, 4)];
        let cat = Catalog::new(bit(), vec![binary("i", &a, "r"), binary("j", &a, "s")]).unwrap();
        let rep = completion_audit(&cat).unwrap();
        assert!(!rep.closed);
        let effects: BTreeSet<Vector> = rep.missing.iter().map(|m| m.effect.clone()).collect();
        assert_eq!(effects, [a.clone(), sub(bit().unit(), &a)].into_iter().collect());
        assert!(rep.max_gap > int(0));
        let fixed = complete_catalog(&cat).unwrap();
        assert!(completion_audit(&fixed).unwrap().closed);
    }

    #[test]
    fn unit_effect_pairs_are_forced() {
        let u = bit().unit().clone();
        let cat = Catalog::new(
            bit(),
            vec![
                Observable::from_named(&bit(), &[("i", u.clone())]).unwrap(),
                Observable::from_named(&bit(), &[("j", u)]).unwrap(),
            ],
        )
        .unwrap();
        let rep = completion_audit(&cat).unwrap();
        assert!(rep.closed);
        assert_eq!(rep.max_gap, int(0));
        assert!(rep.extension_ok);
    }

    #[test]
    fn uniform_dim_one_catalogs_close_and_extend() {
        for n in 2..=4 {
            let names: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
            let pairs: Vec<(&str, Vector)> = names.iter().map(|k| (k.as_str(), s(1, n))).collect();
            let cat = Catalog::new(trivial(), vec![Observable::from_named(&trivial(), &pairs).unwrap()]).unwrap();
            let closed = complete_catalog(&cat).unwrap();
            let rep = completion_audit(&closed).unwrap();
            assert!(rep.closed);
            assert_eq!(rep.max_gap, int(0));
            assert!(rep.extension_ok);
        }
    }

    #[test]
    fn fresh_indices_are_minimal() {
        let cat = Catalog::new(
            trivial(),
            vec![Observable::from_named(&trivial(), &[("r#0", s(1, 2)), ("x", s(1, 2))]).unwrap()],
        )
        .unwrap();
        let added = completion_observables(&cat).unwrap();
        let names: BTreeSet<String> = added.iter().flat_map(|f| f.indices()).map(|i| i.to_string()).collect();
        assert!(names.contains("r#1"));
        assert!(!names.contains("r#2"));
    }

    #[test]
    fn indexed_catalog_over_a_single_test() {
        let idx = TestSpace::from_atoms(&[&["p", "q"]]).unwrap();
        let cat = indexed_catalog(&trivial(), &idx, &[s(1, 4), s(1, 2), s(3, 4), s(1, 1)]).unwrap();
        // (1/4,3/4), (1/2,1/2), (3/4,1/4)
        assert_eq!(cat.observables().len(), 3);
    }
}
