//! Processes and channels between order-unit spaces, the test-space
//! morphisms they induce on observable fragments, and finite Markov kernels.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::{input, structural, Error, Result};
use crate::linalg::{self, is_zero, mat_vec, Matrix};
use crate::modj::{build_modj, Catalog, Observable};
use crate::ous::{OrderUnitSpace, State, SubOus};
use crate::rational::{fmt_vector, Rational, Vector};
use crate::systems::classical;
use crate::testspace::{Outcome, TestSpace};
use crate::vweight::ValuedWeight;

/// A linear map between two spaces, as a `codomain.dim x domain.dim` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    domain: OrderUnitSpace,
    codomain: OrderUnitSpace,
    matrix: Matrix,
}

impl LinearMap {
    pub fn new(domain: OrderUnitSpace, codomain: OrderUnitSpace, matrix: Matrix) -> Result<Self> {
        if matrix.len() != codomain.dim() || matrix.iter().any(|r| r.len() != domain.dim()) {
            return input(format!(
                "matrix must be {} x {}",
                codomain.dim(),
                domain.dim()
            ));
        }
        Ok(LinearMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(space: &OrderUnitSpace) -> Self {
        LinearMap {
            domain: space.clone(),
            codomain: space.clone(),
            matrix: linalg::identity(space.dim()),
        }
    }

    pub fn domain(&self) -> &OrderUnitSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &OrderUnitSpace {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Rational]) -> Vector {
        mat_vec(&self.matrix, x)
    }

    /// `self` after `first`.
    pub fn after(&self, first: &LinearMap) -> Result<LinearMap> {
        if first.codomain != self.domain {
            return input("maps do not compose: codomain and domain differ");
        }
        Ok(LinearMap {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: linalg::mat_mul(&self.matrix, &first.matrix, first.domain.dim()),
        })
    }

    /// Every domain cone generator lands in the codomain cone.
    pub fn is_positive(&self) -> Result<bool> {
        for g in self.domain.generators() {
            if !self.codomain.cone_contains(&self.apply(g))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Positive with `Phi(u) <= u`.
    pub fn is_process(&self) -> Result<bool> {
        Ok(self.is_positive()? && self.codomain.leq(&self.apply(self.domain.unit()), self.codomain.unit())?)
    }

    /// Positive with `Phi(u) = u`.
    pub fn is_channel(&self) -> Result<bool> {
        Ok(self.is_positive()? && &self.apply(self.domain.unit()) == self.codomain.unit())
    }

    /// The state `psi o Phi` of the domain.
    pub fn pull_state(&self, psi: &State) -> State {
        let t = linalg::transpose(&self.matrix, self.domain.dim());
        State(mat_vec(&t, psi.functional()))
    }

    /// Re-expresses a process as a channel onto `B_v`, `v = Phi(u)`.
    pub fn restrict_to_sub_ous(&self) -> Result<RestrictedChannel> {
        if !self.is_process()? {
            return input("map is not a process");
        }
        let v = self.apply(self.domain.unit());
        if is_zero(&v) {
            return structural("process has degenerate range: it sends the unit to 0");
        }
        let sub = self.codomain.sub_ous(&self.codomain.effect(v)?)?;
        let images = (0..self.domain.dim())
            .map(|j| {
                let col: Vector = self.matrix.iter().map(|row| row[j].clone()).collect();
                sub.restrict(&col)
                    .ok_or_else(|| Error::Internal(format!("image {} leaves the span of [0, v]", fmt_vector(&col))))
            })
            .collect::<Result<Vec<_>>>()?;
        let matrix = linalg::transpose(&images, sub.space.dim());
        let map = LinearMap::new(self.domain.clone(), sub.space.clone(), matrix)?;
        if !map.is_channel()? {
            return Err(Error::Internal("restricted process is not a channel".into()));
        }
        Ok(RestrictedChannel { map, sub })
    }
}

/// A process viewed as a channel into the sub-space generated by `Phi(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedChannel {
    /// Channel into `sub.space` (intrinsic coordinates).
    pub map: LinearMap,
    pub sub: SubOus,
}

/// `x -> Phi(F(x))` as a weight valued in `B_v`, `v = Phi(u)`.
pub fn compose_valued_weight(phi: &LinearMap, f: &ValuedWeight) -> Result<(ValuedWeight, SubOus)> {
    if f.space() != phi.domain() {
        return input("weight is not valued in the map's domain");
    }
    let r = phi.restrict_to_sub_ous()?;
    let values = f.values().iter().map(|a| r.map.apply(a)).collect();
    let w = ValuedWeight::new(r.sub.space.clone(), f.testspace().clone(), values)
        .map_err(|e| Error::Internal(format!("composed weight is invalid: {e}")))?;
    Ok((w, r.sub))
}

/// The image `(i, Phi(a))` of a graph outcome `(i, a)`.
pub fn outcome_image(phi: &LinearMap, x: &Outcome) -> Result<Outcome> {
    match x.as_labeled() {
        Some((i, a)) => Ok(Outcome::labeled(i.clone(), phi.apply(a))),
        None => input(format!("{x} is not an (index, effect) outcome")),
    }
}

/// Outcome map `(i, a) -> (i, Phi(a))` between observable fragments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMorphism {
    pub source: TestSpace,
    pub target: TestSpace,
    /// Target position of each source outcome; `None` where `Phi(a) = 0`.
    pub map: Vec<Option<usize>>,
    /// Source outcomes whose image effect vanished.
    pub dropped: Vec<Outcome>,
    pub image_catalog: Catalog,
    /// Every source test lands on a target test.
    pub test_preserving: bool,
    /// Injective on each source test.
    pub locally_injective: bool,
}

/// The morphism a channel induces on the fragment of a catalog.
pub fn induced_morphism(phi: &LinearMap, catalog: &Catalog) -> Result<InducedMorphism> {
    if catalog.space() != phi.domain() {
        return input("catalog is not over the channel's domain");
    }
    if !phi.is_channel()? {
        return input("map is not a channel");
    }
    let source = build_modj(catalog)?.model.testspace().clone();
    let mut dropped = BTreeSet::new();
    let mut image_obs = Vec::new();
    for f in catalog.observables() {
        let mut pairs = Vec::new();
        for (i, a) in f.assignment() {
            let b = phi.apply(a);
            if is_zero(&b) {
                dropped.insert(Outcome::labeled(i.clone(), a.clone()));
            } else {
                pairs.push((i.clone(), b));
            }
        }
        image_obs.push(Observable::new(phi.codomain(), pairs)?);
    }
    let image_catalog = Catalog::new(phi.codomain().clone(), image_obs)?;
    let target = build_modj(&image_catalog)?.model.testspace().clone();
    let map: Vec<Option<usize>> = source
        .outcomes()
        .iter()
        .map(|x| {
            let y = outcome_image(phi, x)?;
            Ok(target.id(&y))
        })
        .collect::<Result<_>>()?;
    let test_preserving = source.tests().iter().all(|t| {
        let mut img: Vec<usize> = t.iter().filter_map(|&x| map[x]).collect();
        img.sort_unstable();
        target.is_test(&img)
    });
    let locally_injective = source.tests().iter().all(|t| {
        let img: Vec<usize> = t.iter().filter_map(|&x| map[x]).collect();
        img.iter().collect::<BTreeSet<_>>().len() == img.len()
    });
    Ok(InducedMorphism {
        source,
        target,
        map,
        dropped: dropped.into_iter().collect(),
        image_catalog,
        test_preserving,
        locally_injective,
    })
}

impl InducedMorphism {
    /// Image outcome of each source outcome, keyed by source outcome.
    pub fn outcome_table(&self) -> BTreeMap<Outcome, Option<Outcome>> {
        self.source
            .outcomes()
            .iter()
            .zip(&self.map)
            .map(|(x, y)| (x.clone(), y.map(|k| self.target.outcome(k).clone())))
            .collect()
    }

    /// `alpha o phi` for a weight `alpha` on the target fragment.
    pub fn pullback(&self, alpha: &[Rational]) -> Vector {
        self.map
            .iter()
            .map(|y| y.map_or_else(Rational::zero, |k| alpha[k].clone()))
            .collect()
    }
}

/// The set `{Phi(a) : a in E}`; it has fewer elements than `E` when `Phi`
/// identifies two effects of the decomposition.
pub fn decomposition_image(phi: &LinearMap, decomposition: &[Vector]) -> BTreeSet<Vector> {
    decomposition.iter().map(|a| phi.apply(a)).collect()
}

/// A row-stochastic matrix: row `s` is a probability distribution on targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovKernel {
    matrix: Matrix,
}

impl MarkovKernel {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let cols = matrix.first().map_or(0, Vec::len);
        if matrix.is_empty() || cols == 0 || matrix.iter().any(|r| r.len() != cols) {
            return input("kernel must be a nonempty rectangular matrix");
        }
        for (s, row) in matrix.iter().enumerate() {
            if row.iter().any(Signed::is_negative) {
                return input(format!("kernel row {s} has a negative entry"));
            }
            let total = row.iter().fold(Rational::zero(), |a, x| a + x);
            if !total.is_one() {
                return input(format!("kernel row {s} sums to {total}, not 1"));
            }
        }
        Ok(MarkovKernel { matrix })
    }

    pub fn identity(n: usize) -> Self {
        MarkovKernel {
            matrix: linalg::identity(n),
        }
    }

    /// The kernel of a function `s -> f[s]`.
    pub fn deterministic(f: &[usize], targets: usize) -> Result<Self> {
        if f.iter().any(|&t| t >= targets) {
            return input("function value out of range");
        }
        MarkovKernel::new(f.iter().map(|&t| linalg::unit_vector(targets, t)).collect())
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// `j o k`: first `k`, then `j`. In the row-stochastic convention this is the product `k j`.
pub fn markov_compose(j: &MarkovKernel, k: &MarkovKernel) -> Result<MarkovKernel> {
    if k.cols() != j.rows() {
        return input(format!(
            "cannot compose: first kernel has {} targets, second has {} sources",
            k.cols(),
            j.rows()
        ));
    }
    MarkovKernel::new(linalg::mat_mul(&k.matrix, &j.matrix, j.cols()))
}

/// `g -> (s -> sum_t k(s, t) g(t))` between the function spaces on targets and sources.
pub fn markov_dual(k: &MarkovKernel) -> LinearMap {
    LinearMap {
        domain: classical(k.cols()),
        codomain: classical(k.rows()),
        matrix: k.matrix.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ivec, q};
    use crate::systems::{bit, single_test};

    fn averaging() -> LinearMap {
        let h = q(1, 2);
        LinearMap::new(bit(), bit(), vec![vec![h.clone(), h.clone()], vec![h.clone(), h]]).unwrap()
    }

    fn halving() -> LinearMap {
        LinearMap::new(bit(), bit(), vec![vec![q(1, 2), int(0)], vec![int(0), q(1, 2)]]).unwrap()
    }

    fn delta_catalog() -> Catalog {
        let f = Observable::from_named(&bit(), &[("1", ivec(&[1, 0])), ("2", ivec(&[0, 1]))]).unwrap();
        Catalog::new(bit(), vec![f]).unwrap()
    }

    #[test]
    fn process_and_channel_examples() {
        let id = LinearMap::identity(&bit());
        assert!(id.is_channel().unwrap());
        assert!(averaging().is_channel().unwrap());
        assert!(halving().is_process().unwrap());
        assert!(!halving().is_channel().unwrap());
        let swap_neg = LinearMap::new(bit(), bit(), vec![ivec(&[1, -1]), ivec(&[0, 1])]).unwrap();
        assert!(!swap_neg.is_positive().unwrap());
        assert!(LinearMap::new(bit(), bit(), vec![ivec(&[1, 0])]).is_err());
    }

    #[test]
    fn restriction_examples() {
        let r = halving().restrict_to_sub_ous().unwrap();
        assert_eq!(r.sub.space.dim(), 2);
        assert_eq!(r.sub.ambient_unit(), vec![q(1, 2), q(1, 2)]);
        assert!(r.map.is_channel().unwrap());

        let r = LinearMap::identity(&bit()).restrict_to_sub_ous().unwrap();
        assert!(r.sub.space.same_as(&bit()));
        assert_eq!(r.map.matrix(), &linalg::identity(2));

        // Phi(a) = f(a) (1, 0) with f = (1/2, 1/3).
        let rank_one = LinearMap::new(bit(), bit(), vec![vec![q(1, 2), q(1, 3)], vec![int(0), int(0)]]).unwrap();
        assert!(rank_one.is_process().unwrap());
        let r = rank_one.restrict_to_sub_ous().unwrap();
        assert_eq!(r.sub.space.dim(), 1);
        assert_eq!(r.sub.ambient_generators.len(), 1);
        assert_eq!(crate::rational::primitive_ray(&r.sub.ambient_generators[0]), ivec(&[1, 0]));

        let zero = LinearMap::new(bit(), bit(), vec![ivec(&[0, 0]), ivec(&[0, 0])]).unwrap();
        assert!(matches!(zero.restrict_to_sub_ous(), Err(Error::Structural(_))));
    }

    #[test]
    fn composed_weight_examples() {
        let f = ValuedWeight::new(bit(), single_test(&["x", "y"]), vec![ivec(&[1, 0]), ivec(&[0, 1])]).unwrap();
        let (w, _) = compose_valued_weight(&LinearMap::identity(&bit()), &f).unwrap();
        assert_eq!(w.values(), f.values());

        let (w, sub) = compose_valued_weight(&averaging(), &f).unwrap();
        for v in w.values() {
            assert_eq!(sub.embed(v), vec![q(1, 2), q(1, 2)]);
        }

        let (w, sub) = compose_valued_weight(&halving(), &f).unwrap();
        assert_eq!(sub.ambient_unit(), vec![q(1, 2), q(1, 2)]);
        assert_eq!(sub.embed(w.value(0)), vec![q(1, 2), int(0)]);
    }

    #[test]
    fn induced_morphism_examples() {
        let m = induced_morphism(&LinearMap::identity(&bit()), &delta_catalog()).unwrap();
        assert!(m.test_preserving && m.locally_injective);
        for (x, y) in m.outcome_table() {
            assert_eq!(Some(x), y);
        }

        let m = induced_morphism(&averaging(), &delta_catalog()).unwrap();
        let h = vec![q(1, 2), q(1, 2)];
        assert_eq!(
            m.target.outcomes(),
            &[
                Outcome::labeled(Outcome::atom("1"), h.clone()),
                Outcome::labeled(Outcome::atom("2"), h.clone())
            ]
        );
        assert!(m.test_preserving && m.locally_injective);
        assert_eq!(m.target.tests().len(), 1);

        let set = decomposition_image(&averaging(), &[ivec(&[1, 0]), ivec(&[0, 1])]);
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn zero_images_are_reported() {
        // a -> a_1 into the trivial space: a channel that kills (0, 1).
        let first = LinearMap::new(bit(), crate::systems::trivial(), vec![ivec(&[1, 0])]).unwrap();
        assert!(first.is_channel().unwrap());
        let m = induced_morphism(&first, &delta_catalog()).unwrap();
        assert_eq!(m.dropped, vec![Outcome::labeled(Outcome::atom("2"), ivec(&[0, 1]))]);
        assert_eq!(m.map.iter().filter(|y| y.is_none()).count(), 1);
        assert!(m.test_preserving && m.locally_injective);

        let total = LinearMap::new(bit(), crate::systems::trivial(), vec![vec![q(1, 2), q(1, 2)]]).unwrap();
        let m = induced_morphism(&total, &delta_catalog()).unwrap();
        assert!(m.dropped.is_empty());
        assert_eq!(m.target.num_outcomes(), 2);

        let kill = LinearMap::new(bit(), bit(), vec![ivec(&[1, 1]), ivec(&[0, 0])]).unwrap();
        assert!(!kill.is_channel().unwrap());
        assert!(matches!(induced_morphism(&kill, &delta_catalog()), Err(Error::Input(_))));
    }

    #[test]
    fn markov_examples() {
        let k = MarkovKernel::new(vec![vec![q(1, 2), q(1, 2)], vec![int(0), int(1)]]).unwrap();
        let j = MarkovKernel::new(vec![vec![int(1), int(0)], vec![q(1, 3), q(2, 3)]]).unwrap();
        assert_eq!(markov_compose(&MarkovKernel::identity(2), &k).unwrap(), k);
        assert_eq!(
            markov_compose(&j, &k).unwrap().matrix(),
            &vec![vec![q(2, 3), q(1, 3)], vec![q(1, 3), q(2, 3)]]
        );
        let f = MarkovKernel::deterministic(&[1, 0, 1], 2).unwrap();
        let g = MarkovKernel::deterministic(&[1, 1], 2).unwrap();
        assert_eq!(markov_compose(&g, &f).unwrap(), MarkovKernel::deterministic(&[1, 1, 1], 2).unwrap());

        assert_eq!(markov_dual(&MarkovKernel::identity(3)).matrix(), &linalg::identity(3));
        assert_eq!(markov_dual(&k).apply(&ivec(&[1, 0])), vec![q(1, 2), int(0)]);
        assert_eq!(markov_dual(&k).apply(&ivec(&[1, 1])), ivec(&[1, 1]));
        assert!(markov_dual(&k).is_channel().unwrap());
        assert!(MarkovKernel::new(vec![vec![q(1, 2), q(1, 3)]]).is_err());
    }
}
