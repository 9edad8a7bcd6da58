//! Two-stage test spaces: Dacey sums, graphs of event-valued maps, the
//! Dacey cover of a coarse-graining, and the splitting of a valued weight
//! into a coarse weight followed by state-independent dice.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::{input, resource, Result};
use crate::linalg::{is_zero, scale, sum};
use crate::ous::State;
use crate::rational::{fmt_vector, Rational, Vector};
use crate::testspace::{event_cap, Event, Outcome, TestSpace, EVENT_CAP_VAR};
use crate::vweight::ValuedWeight;

/// Tests `U_{x in E} {x} x F_x` over every test `E` and every choice of
/// fiber tests `F_x`. `fibers[x]` is the fiber over outcome `x`.
pub fn dacey_sum(m: &TestSpace, fibers: &[TestSpace]) -> Result<TestSpace> {
    if fibers.len() != m.num_outcomes() {
        return input(format!(
            "need one fiber per outcome: got {}, expected {}",
            fibers.len(),
            m.num_outcomes()
        ));
    }
    let cap = event_cap();
    let mut tests = Vec::new();
    for e in m.tests() {
        let mut count: usize = 1;
        for &x in e {
            count = count.saturating_mul(fibers[x].tests().len());
        }
        if count.saturating_add(tests.len()) > cap {
            return resource(format!("two-stage tests exceed the cap ({EVENT_CAP_VAR})"));
        }
        // Odometer over the per-outcome fiber test choices.
        let mut choice = vec![0usize; e.len()];
        loop {
            let test: Vec<Outcome> = e
                .iter()
                .zip(&choice)
                .flat_map(|(&x, &c)| {
                    let fx = &fibers[x];
                    fx.tests()[c]
                        .iter()
                        .map(move |&y| Outcome::pair(m.outcome(x).clone(), fx.outcome(y).clone()))
                })
                .collect();
            tests.push(test);
            let mut k = 0;
            while k < e.len() {
                choice[k] += 1;
                if choice[k] < fibers[e[k]].tests().len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == e.len() {
                break;
            }
        }
    }
    TestSpace::new(tests)
}

/// The graph of `x -> phi[x]`, each event `phi[x]` read as a one-test space.
pub fn graph_of_morphism(m: &TestSpace, phi: &[Vec<Outcome>]) -> Result<TestSpace> {
    if phi.len() != m.num_outcomes() {
        return input("need one image event per outcome");
    }
    let fibers = phi
        .iter()
        .zip(m.outcomes())
        .map(|(ev, x)| {
            if ev.is_empty() {
                return input(format!("image of {x} is empty"));
            }
            TestSpace::new(vec![ev.clone()])
        })
        .collect::<Result<Vec<_>>>()?;
    dacey_sum(m, &fibers)
}

/// The Dacey cover of `source` with its two canonical maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaceyCover {
    pub source: TestSpace,
    /// The coarse-graining; its outcomes are nonempty events.
    pub coarse: TestSpace,
    /// Outcomes `(A, x)` with `x in A`.
    pub cover: TestSpace,
    /// `pi(A, x) = x`, by position.
    pub pi: Vec<usize>,
    /// `psi(A) = {(A, x) : x in A}`, by position.
    pub psi: Vec<Event>,
}

pub fn dacey_cover(source: &TestSpace) -> Result<DaceyCover> {
    let coarse = source.coarse_graining()?;
    let phi: Vec<Vec<Outcome>> = coarse
        .outcomes()
        .iter()
        .map(|a| match a {
            Outcome::Event(members) => members.clone(),
            other => vec![other.clone()],
        })
        .collect();
    let cover = graph_of_morphism(&coarse, &phi)?;
    let pi = cover
        .outcomes()
        .iter()
        .map(|o| {
            let (_, x) = o.as_pair().expect("cover outcomes are pairs");
            source.id(x).expect("members are source outcomes")
        })
        .collect();
    let psi = coarse
        .outcomes()
        .iter()
        .zip(&phi)
        .map(|(a, members)| {
            let pairs: Vec<Outcome> = members.iter().map(|x| Outcome::pair(a.clone(), x.clone())).collect();
            cover.ids(&pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DaceyCover {
        source: source.clone(),
        coarse,
        cover,
        pi,
        psi,
    })
}

/// Structural facts about the canonical maps of a cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverAudit {
    pub pi_test_preserving: bool,
    pub pi_onto: bool,
    pub pi_injective: bool,
    pub psi_test_preserving: bool,
    pub psi_injective: bool,
    /// Every `psi(A)` is a single outcome.
    pub psi_outcome_preserving: bool,
    /// `pi(psi(A)) = A` for every coarse outcome `A`.
    pub factorization: bool,
}

impl DaceyCover {
    pub fn audit(&self) -> CoverAudit {
        let pi_test_preserving = self.cover.tests().iter().all(|t| {
            let img: BTreeSet<usize> = t.iter().map(|&o| self.pi[o]).collect();
            img.len() == t.len() && self.source.is_test(&img.into_iter().collect::<Vec<_>>())
        });
        let hit: BTreeSet<usize> = self.pi.iter().copied().collect();
        let pi_onto = hit.len() == self.source.num_outcomes();
        let pi_injective = hit.len() == self.pi.len();
        let psi_test_preserving = self.coarse.tests().iter().all(|t| {
            let mut img: Vec<usize> = t.iter().flat_map(|&a| self.psi[a].iter().copied()).collect();
            img.sort_unstable();
            self.cover.is_test(&img)
        });
        let mut seen = BTreeSet::new();
        let psi_injective = self.psi.iter().flatten().all(|&o| seen.insert(o));
        let psi_outcome_preserving = self.psi.iter().all(|e| e.len() == 1);
        let factorization = self.coarse.outcomes().iter().zip(&self.psi).all(|(a, e)| {
            let image: BTreeSet<&Outcome> = e.iter().map(|&o| self.source.outcome(self.pi[o])).collect();
            let members: BTreeSet<&Outcome> = match a {
                Outcome::Event(m) => m.iter().collect(),
                other => std::iter::once(other).collect(),
            };
            image == members
        });
        CoverAudit {
            pi_test_preserving,
            pi_onto,
            pi_injective,
            psi_test_preserving,
            psi_injective,
            psi_outcome_preserving,
            factorization,
        }
    }

    /// Splits a weight on the cover into `alpha(A) = beta(psi(A))` and dice
    /// `beta_A = beta(A, .) / alpha(A)` (`None` where `alpha(A) = 0`).
    pub fn split_weight(&self, beta: &[Rational]) -> Result<(Vector, Vec<Option<Vector>>)> {
        if !self.cover.is_probability_weight(beta)? {
            return input("not a probability weight on the cover");
        }
        let alpha: Vector = self.psi.iter().map(|e| self.cover.event_sum(beta, e)).collect();
        let dice = self
            .psi
            .iter()
            .zip(&alpha)
            .map(|(e, a)| (!a.is_zero()).then(|| e.iter().map(|&o| &beta[o] / a).collect()))
            .collect();
        Ok((alpha, dice))
    }

    /// `beta(A, x) = alpha(A) beta_A(x)` with `alpha` a weight on the
    /// coarse-graining and every defined `beta_A` a weight on its die.
    pub fn weight_factors(&self, beta: &[Rational]) -> Result<bool> {
        let (alpha, dice) = self.split_weight(beta)?;
        if !self.coarse.is_probability_weight(&alpha)? {
            return Ok(false);
        }
        for ((e, a), die) in self.psi.iter().zip(&alpha).zip(&dice) {
            match die {
                Some(d) => {
                    let total = d.iter().fold(Rational::zero(), |s, p| s + p);
                    if !total.is_one() || d.iter().any(Signed::is_negative) {
                        return Ok(false);
                    }
                    if e.iter().zip(d).any(|(&o, p)| beta[o] != a * p) {
                        return Ok(false);
                    }
                }
                None => {
                    if e.iter().any(|&o| !beta[o].is_zero()) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// [`Self::weight_factors`] on every vertex of the cover's weight polytope.
    pub fn factorization_on_vertices(&self) -> Result<bool> {
        for beta in self.cover.weight_polytope_vertices()? {
            if !self.weight_factors(&beta)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Tests of the cover whose first stage is a partition in `hat`.
    pub fn restricted_to(&self, hat: &TestSpace) -> Result<TestSpace> {
        let wanted: BTreeSet<BTreeSet<&Outcome>> = hat
            .tests()
            .iter()
            .map(|t| t.iter().map(|&a| hat.outcome(a)).collect())
            .collect();
        let tests: Vec<Vec<Outcome>> = self
            .cover
            .tests()
            .iter()
            .filter(|t| {
                let first: BTreeSet<&Outcome> = t
                    .iter()
                    .map(|&o| self.cover.outcome(o).as_pair().expect("pairs").0)
                    .collect();
                wanted.contains(&first)
            })
            .map(|t| t.iter().map(|&o| self.cover.outcome(o).clone()).collect())
            .collect();
        if tests.is_empty() {
            return input("no cover test starts with a partition of the given test space");
        }
        TestSpace::new(tests)
    }
}

/// `t` with `a = t b`, `t > 0`, if it exists (both nonzero).
fn proportion(a: &[Rational], b: &[Rational]) -> Option<Rational> {
    let k = b.iter().position(|x| !x.is_zero())?;
    let t = &a[k] / &b[k];
    (t.is_positive() && scale(&t, b) == a).then_some(t)
}

/// Outcomes grouped by proportional values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxClasses {
    /// Sorted classes; the least outcome of each is its representative.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// `F(x) = ratio[x] F(rep)`.
    pub ratios: Vec<Rational>,
    /// Outcomes with `F(x) = 0`, each kept as its own class.
    pub zero_outcomes: Vec<usize>,
}

pub fn approx_classes(f: &ValuedWeight) -> ApproxClasses {
    let n = f.values().len();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0; n];
    let mut ratios = vec![Rational::one(); n];
    let mut zero_outcomes = Vec::new();
    for x in 0..n {
        let v = f.value(x);
        if is_zero(v) {
            zero_outcomes.push(x);
        } else {
            let found = classes.iter().enumerate().find_map(|(c, members)| {
                let rep = f.value(members[0]);
                if is_zero(rep) {
                    return None;
                }
                proportion(v, rep).map(|t| (c, t))
            });
            if let Some((c, t)) = found {
                classes[c].push(x);
                class_of[x] = c;
                ratios[x] = t;
                continue;
            }
        }
        class_of[x] = classes.len();
        classes.push(vec![x]);
    }
    ApproxClasses {
        classes,
        class_of,
        ratios,
        zero_outcomes,
    }
}

/// One cell `C cap E` of a coarse test together with its die.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub class: usize,
    pub test: usize,
    pub members: Event,
    /// `a_{C,E} = sum of F over the cell`.
    pub total: Vector,
    /// `p_{C,E}(x) = t(x) / T_{C,E}`, aligned with `members`.
    pub die: Vec<Rational>,
}

/// A valued weight split into a coarse weight and classical dice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derandomization {
    pub classes: ApproxClasses,
    /// Tests `E^ = {C cap E}`; outcomes are the cells as events.
    pub hat_testspace: TestSpace,
    pub hat_weight: ValuedWeight,
    pub cells: Vec<Cell>,
    /// Dice agree whichever member of the cell is used as reference.
    pub representative_independent: bool,
    /// Pairs of distinct cells of one coarse test with equal totals.
    pub equal_sum_cells: Vec<(usize, usize)>,
}

impl Derandomization {
    /// Index into `cells` for the cell of outcome `x` within test `e`.
    pub fn cell_of(&self, test: usize, x: usize) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.test == test && c.members.binary_search(&x).is_ok())
    }

    /// `p_{C,E}(x)`.
    pub fn die_value(&self, test: usize, x: usize) -> Option<&Rational> {
        let c = &self.cells[self.cell_of(test, x)?];
        let k = c.members.binary_search(&x).ok()?;
        Some(&c.die[k])
    }
}

pub fn derandomize(f: &ValuedWeight) -> Result<Derandomization> {
    let classes = approx_classes(f);
    let ts = f.testspace();
    if let Some(&x) = classes.zero_outcomes.first() {
        return input(format!(
            "outcome {} has value 0; proportionality classes need nonzero values",
            ts.outcome(x)
        ));
    }
    let d = f.space().dim();
    let mut cells = Vec::new();
    let mut representative_independent = true;
    for (ti, e) in ts.tests().iter().enumerate() {
        let mut by_class: BTreeMap<usize, Event> = BTreeMap::new();
        for &x in e {
            by_class.entry(classes.class_of[x]).or_default().push(x);
        }
        for (class, members) in by_class {
            let total = sum(d, members.iter().map(|&x| f.value(x)));
            let t: Vec<&Rational> = members.iter().map(|&x| &classes.ratios[x]).collect();
            let big_t = t.iter().fold(Rational::zero(), |s, v| s + *v);
            let die: Vec<Rational> = t.iter().map(|v| *v / &big_t).collect();
            for &x0 in &members {
                let local: Vec<Rational> = members
                    .iter()
                    .map(|&x| proportion(f.value(x), f.value(x0)).expect("same class"))
                    .collect();
                let local_t = local.iter().fold(Rational::zero(), |s, v| s + v);
                if local.iter().zip(&die).any(|(v, p)| v / &local_t != *p) {
                    representative_independent = false;
                }
            }
            cells.push(Cell {
                class,
                test: ti,
                members,
                total,
                die,
            });
        }
    }
    let cell_outcome = |c: &Cell| Outcome::event(c.members.iter().map(|&x| ts.outcome(x).clone()).collect());
    let hat_tests: Vec<Vec<Outcome>> = ts
        .tests()
        .iter()
        .enumerate()
        .map(|(ti, _)| cells.iter().filter(|c| c.test == ti).map(cell_outcome).collect())
        .collect();
    let hat_testspace = TestSpace::new(hat_tests)?;
    let mut values: Vec<Option<Vector>> = vec![None; hat_testspace.num_outcomes()];
    for c in &cells {
        let id = hat_testspace.id(&cell_outcome(c)).expect("cell is an outcome");
        values[id] = Some(c.total.clone());
    }
    let values: Vec<Vector> = values.into_iter().map(|v| v.expect("every cell is assigned")).collect();
    let hat_weight = ValuedWeight::new(f.space().clone(), hat_testspace.clone(), values)?;
    let mut equal_sum_cells = Vec::new();
    for (i, a) in cells.iter().enumerate() {
        for (j, b) in cells.iter().enumerate().skip(i + 1) {
            if a.test == b.test && a.total == b.total {
                equal_sum_cells.push((i, j));
            }
        }
    }
    Ok(Derandomization {
        classes,
        hat_testspace,
        hat_weight,
        cells,
        representative_independent,
        equal_sum_cells,
    })
}

/// `alpha(x) = phi(F^(C cap E)) p_{C,E}(x)` for every test `E` and `x in E`.
pub fn simulate_check(f: &ValuedWeight, d: &Derandomization, phi: &State) -> Result<bool> {
    let alpha = f.pullback_state(phi)?;
    for c in &d.cells {
        let coarse = phi.eval(&c.total);
        for (&x, p) in c.members.iter().zip(&c.die) {
            if alpha[x] != &coarse * p {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Human-readable `E^` cell listing used by reports.
pub fn describe_cell(f: &ValuedWeight, c: &Cell) -> String {
    let ts = f.testspace();
    let dice: Vec<String> = c
        .members
        .iter()
        .zip(&c.die)
        .map(|(&x, p)| format!("{}:{p}", ts.outcome(x)))
        .collect();
    format!(
        "{} -> {} dice [{}]",
        ts.fmt_event(&c.members),
        fmt_vector(&c.total),
        dice.join(", ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ivec, q};
    use crate::systems::{bit, single_test, trivial, two_binary_tests};

    fn bit_example() -> ValuedWeight {
        ValuedWeight::new(
            bit(),
            single_test(&["x", "y", "z"]),
            vec![vec![q(1, 2), q(1, 4)], vec![q(1, 4), q(1, 8)], vec![q(1, 4), q(5, 8)]],
        )
        .unwrap()
    }

    #[test]
    fn dacey_sum_examples() {
        let p = single_test(&["p"]);
        let s = dacey_sum(&single_test(&["x", "y"]), &[p.clone(), p]).unwrap();
        assert_eq!((s.tests().len(), s.num_outcomes()), (1, 2));
        let s = dacey_sum(&single_test(&["x"]), &[two_binary_tests()]).unwrap();
        assert_eq!(s.tests().len(), 2);
        let s = dacey_sum(&single_test(&["x", "y"]), &[two_binary_tests(), two_binary_tests()]).unwrap();
        assert_eq!(s.tests().len(), 4);
        assert!(dacey_sum(&single_test(&["x"]), &[]).is_err());
    }

    #[test]
    fn graph_examples() {
        let m = two_binary_tests();
        let id: Vec<Vec<Outcome>> = m.outcomes().iter().map(|x| vec![x.clone()]).collect();
        let g = graph_of_morphism(&m, &id).unwrap();
        assert_eq!((g.tests().len(), g.num_outcomes()), (2, 4));
        let ab = vec![Outcome::atom("a"), Outcome::atom("b")];
        let g = graph_of_morphism(&single_test(&["x"]), &[ab]).unwrap();
        assert_eq!(g.num_outcomes(), 2);
        assert!(graph_of_morphism(&single_test(&["x"]), &[vec![]]).is_err());
    }

    #[test]
    fn cover_of_three_outcome_test() {
        let c = dacey_cover(&single_test(&["x", "y", "z"])).unwrap();
        assert_eq!((c.coarse.tests().len(), c.coarse.num_outcomes()), (5, 7));
        assert_eq!((c.cover.tests().len(), c.cover.num_outcomes()), (5, 12));
        let a = c.audit();
        assert!(a.pi_test_preserving && a.pi_onto && !a.pi_injective);
        assert!(a.psi_test_preserving && a.psi_injective && !a.psi_outcome_preserving);
        assert!(a.factorization);
        assert!(c.factorization_on_vertices().unwrap());

        let c = dacey_cover(&single_test(&["x"])).unwrap();
        assert_eq!((c.cover.tests().len(), c.cover.num_outcomes()), (1, 1));
    }

    #[test]
    fn approx_class_examples() {
        let f = ValuedWeight::new(
            trivial(),
            single_test(&["a", "b", "c"]),
            vec![vec![q(1, 6)], vec![q(1, 3)], vec![q(1, 2)]],
        )
        .unwrap();
        let c = approx_classes(&f);
        assert_eq!(c.classes, vec![vec![0, 1, 2]]);
        assert_eq!(c.ratios, vec![int(1), int(2), int(3)]);

        let c = approx_classes(&bit_example());
        assert_eq!(c.classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(c.ratios[1], q(1, 2));

        let c = approx_classes(&crate::systems::bit_model());
        assert_eq!(c.classes.len(), 2);
    }

    #[test]
    fn derandomize_bit_example() {
        let f = bit_example();
        let d = derandomize(&f).unwrap();
        assert_eq!(d.hat_testspace.tests().len(), 1);
        assert_eq!(d.hat_testspace.num_outcomes(), 2);
        assert_eq!(d.cells[0].total, vec![q(3, 4), q(3, 8)]);
        assert_eq!(d.cells[0].die, vec![q(2, 3), q(1, 3)]);
        assert_eq!(d.die_value(0, 2), Some(&int(1)));
        assert!(d.representative_independent);
        assert!(d.equal_sum_cells.is_empty());
        let phi = bit().state(vec![q(1, 3), q(2, 3)]).unwrap();
        assert_eq!(f.pullback_state(&phi).unwrap()[0], q(1, 3));
        assert_eq!(phi.eval(&d.cells[0].total) * &d.cells[0].die[0], q(1, 3));
        assert!(simulate_check(&f, &d, &phi).unwrap());

        let cover = dacey_cover(f.testspace()).unwrap();
        let df = cover.restricted_to(&d.hat_testspace).unwrap();
        assert_eq!((df.tests().len(), df.num_outcomes()), (1, 3));
    }

    #[test]
    fn derandomize_degenerate_cases() {
        let f = crate::systems::bit_model();
        let d = derandomize(&f).unwrap();
        assert_eq!(d.hat_testspace.tests().len(), 1);
        assert!(d.cells.iter().all(|c| c.die == vec![int(1)]));

        let f = ValuedWeight::new(trivial(), single_test(&["a", "b"]), vec![vec![q(1, 4)], vec![q(3, 4)]]).unwrap();
        let d = derandomize(&f).unwrap();
        assert_eq!(d.hat_testspace.num_outcomes(), 1);
        assert_eq!(d.cells[0].die, vec![q(1, 4), q(3, 4)]);

        let f = ValuedWeight::new(bit(), single_test(&["a", "b"]), vec![ivec(&[1, 1]), ivec(&[0, 0])]).unwrap();
        assert_eq!(approx_classes(&f).zero_outcomes, vec![1]);
        assert!(derandomize(&f).is_err());

        // Cell totals of distinct classes point in distinct directions.
        let f = ValuedWeight::new(
            bit(),
            single_test(&["a", "b", "c", "d"]),
            vec![
                vec![q(1, 4), int(0)],
                vec![q(1, 4), q(1, 2)],
                vec![int(0), q(1, 2)],
                vec![q(1, 2), int(0)],
            ],
        )
        .unwrap();
        let d = derandomize(&f).unwrap();
        assert_eq!(d.cells.len(), 3);
        assert!(d.equal_sum_cells.is_empty());
    }
}
