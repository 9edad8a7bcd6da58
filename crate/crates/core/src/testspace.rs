//! Finite test spaces and their event calculus.
//!
//! Outcomes are kept sorted and referred to by their position; tests and
//! events are sorted lists of positions, so structural equality is set
//! equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{input, resource, structural, Result};
use crate::lp::{LinearProgram, LpOutcome, Sense};
use crate::polyhedron::{self, AffineRow};
use crate::rational::{fmt_vector, Rational, Vector};

/// Environment variable overriding [`DEFAULT_EVENT_CAP`].
pub const EVENT_CAP_VAR: &str = "GPTK_EVENT_CAP";
pub const DEFAULT_EVENT_CAP: usize = 1 << 20;

/// Upper bound on the size of any brute-force enumeration.
pub fn event_cap() -> usize {
    std::env::var(EVENT_CAP_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_EVENT_CAP)
}

/// Structured outcome identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    /// A plain named outcome.
    Atom(String),
    /// An `(index, effect)` pair from the graph of an observable.
    Labeled(Box<Outcome>, Vector),
    /// A bare effect, as in decompositions of the unit.
    Effect(Vector),
    /// An ordered pair: product outcomes, two-stage outcomes, cover outcomes.
    Pair(Box<Outcome>, Box<Outcome>),
    /// A coarse-grained outcome: a nonempty event of another test space.
    Event(Vec<Outcome>),
}

impl Outcome {
    pub fn atom(name: impl Into<String>) -> Self {
        Outcome::Atom(name.into())
    }

    pub fn labeled(index: Outcome, effect: Vector) -> Self {
        Outcome::Labeled(Box::new(index), effect)
    }

    pub fn pair(a: Outcome, b: Outcome) -> Self {
        Outcome::Pair(Box::new(a), Box::new(b))
    }

    pub fn event(mut members: Vec<Outcome>) -> Self {
        members.sort();
        members.dedup();
        Outcome::Event(members)
    }

    /// Index and effect of a graph outcome.
    pub fn as_labeled(&self) -> Option<(&Outcome, &Vector)> {
        match self {
            Outcome::Labeled(i, a) => Some((i, a)),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Outcome, &Outcome)> {
        match self {
            Outcome::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Atom(s) => write!(f, "{s}"),
            Outcome::Labeled(i, a) => write!(f, "({i}, {})", fmt_vector(a)),
            Outcome::Effect(a) => write!(f, "{}", fmt_vector(a)),
            Outcome::Pair(a, b) => write!(f, "({a}, {b})"),
            Outcome::Event(ms) => {
                let parts: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

/// Sorted outcome positions contained in a single test.
pub type Event = Vec<usize>;

/// True iff no member of the family is a proper subset of another.
pub fn is_irredundant<T: Ord>(family: &[Vec<T>]) -> bool {
    let sets: Vec<BTreeSet<&T>> = family.iter().map(|t| t.iter().collect()).collect();
    sets.iter().enumerate().all(|(i, a)| {
        sets.iter()
            .enumerate()
            .all(|(j, b)| i == j || !(a.len() < b.len() && a.is_subset(b)))
    })
}

/// All set partitions of `items` into nonempty blocks. Blocks keep the input
/// order, partitions come out in restricted-growth order.
pub fn set_partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    fn go<T: Clone>(items: &[T], k: usize, blocks: &mut Vec<Vec<T>>, out: &mut Vec<Vec<Vec<T>>>) {
        if k == items.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(items[k].clone());
            go(items, k + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![items[k].clone()]);
        go(items, k + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(items, 0, &mut Vec::new(), &mut out);
    out
}

/// Bell number `B_n`, saturating.
pub fn bell(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            next.push(next.last().unwrap().saturating_add(*x));
        }
        row = next;
    }
    row[0]
}

fn subsets(test: &[usize]) -> impl Iterator<Item = Event> + '_ {
    (0u64..1 << test.len()).map(move |mask| {
        test.iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}

fn difference(a: &[usize], b: &[usize]) -> Event {
    a.iter().filter(|x| b.binary_search(x).is_err()).copied().collect()
}

fn is_sorted_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestSpace {
    outcomes: Vec<Outcome>,
    tests: Vec<Event>,
}

impl TestSpace {
    /// Builds a test space from its tests. Identical tests are merged; empty
    /// tests and proper containments between tests are rejected.
    pub fn new(tests: Vec<Vec<Outcome>>) -> Result<Self> {
        if tests.iter().any(Vec::is_empty) {
            return input("tests must be nonempty");
        }
        let outcomes: Vec<Outcome> = tests
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut ids: Vec<Event> = tests
            .iter()
            .map(|t| {
                let mut e: Event = t
                    .iter()
                    .map(|x| outcomes.binary_search(x).expect("collected above"))
                    .collect();
                e.sort_unstable();
                e.dedup();
                e
            })
            .collect();
        ids.sort();
        ids.dedup();
        if !is_irredundant(&ids) {
            let (a, b) = ids
                .iter()
                .flat_map(|a| ids.iter().map(move |b| (a, b)))
                .find(|(a, b)| a.len() < b.len() && is_sorted_subset(a, b))
                .expect("redundancy has a witness");
            let space = TestSpace {
                outcomes,
                tests: Vec::new(),
            };
            return structural(format!(
                "test {} is properly contained in test {}",
                space.fmt_event(a),
                space.fmt_event(b)
            ));
        }
        Ok(TestSpace {
            outcomes,
            tests: ids,
        })
    }

    /// Convenience constructor from named atoms.
    pub fn from_atoms(tests: &[&[&str]]) -> Result<Self> {
        TestSpace::new(
            tests
                .iter()
                .map(|t| t.iter().map(|&s| Outcome::atom(s)).collect())
                .collect(),
        )
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome(&self, id: usize) -> &Outcome {
        &self.outcomes[id]
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn tests(&self) -> &[Event] {
        &self.tests
    }

    pub fn id(&self, x: &Outcome) -> Option<usize> {
        self.outcomes.binary_search(x).ok()
    }

    /// Positions of the given outcomes as a sorted event (not checked to be an event).
    pub fn ids(&self, xs: &[Outcome]) -> Result<Event> {
        let mut e = xs
            .iter()
            .map(|x| self.id(x).ok_or_else(|| crate::error::Error::Input(format!("unknown outcome {x}"))))
            .collect::<Result<Event>>()?;
        e.sort_unstable();
        e.dedup();
        Ok(e)
    }

    pub fn test_outcomes(&self, test: usize) -> Vec<&Outcome> {
        self.tests[test].iter().map(|&i| &self.outcomes[i]).collect()
    }

    pub fn is_test(&self, e: &[usize]) -> bool {
        self.tests.binary_search_by(|t| t.as_slice().cmp(e)).is_ok()
    }

    pub fn is_event(&self, e: &[usize]) -> bool {
        self.tests.iter().any(|t| is_sorted_subset(e, t))
    }

    pub fn fmt_event(&self, e: &[usize]) -> String {
        let parts: Vec<String> = e.iter().map(|&i| self.outcomes[i].to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn require_event(&self, e: &[usize]) -> Result<()> {
        if e.windows(2).any(|w| w[0] >= w[1]) || e.iter().any(|&i| i >= self.outcomes.len()) {
            return input("events must be sorted lists of outcome positions");
        }
        if !self.is_event(e) {
            return input(format!("{} is not an event", self.fmt_event(e)));
        }
        Ok(())
    }

    fn enumeration_size(&self) -> Result<usize> {
        let cap = event_cap();
        let mut total: usize = 0;
        for t in &self.tests {
            if t.len() >= usize::BITS as usize - 1 {
                return resource("a test is too large to enumerate its events");
            }
            total = total.saturating_add(1 << t.len());
        }
        if total > cap {
            return resource(format!(
                "event enumeration needs {total} subsets, above the cap of {cap} ({EVENT_CAP_VAR})"
            ));
        }
        Ok(total)
    }

    /// Every event, sorted, including the empty event when there is a test.
    pub fn events(&self) -> Result<Vec<Event>> {
        self.enumeration_size()?;
        let set: BTreeSet<Event> = self.tests.iter().flat_map(|t| subsets(t)).collect();
        Ok(set.into_iter().collect())
    }

    /// `a` and `b` are disjoint and their union is a test.
    pub fn complementary(&self, a: &[usize], b: &[usize]) -> Result<bool> {
        self.require_event(a)?;
        self.require_event(b)?;
        if a.iter().any(|x| b.binary_search(x).is_ok()) {
            return Ok(false);
        }
        let mut union: Event = a.iter().chain(b).copied().collect();
        union.sort_unstable();
        Ok(self.is_test(&union))
    }

    /// All events complementary to `a`, sorted.
    pub fn complements(&self, a: &[usize]) -> Result<Vec<Event>> {
        self.require_event(a)?;
        let set: BTreeSet<Event> = self
            .tests
            .iter()
            .filter(|t| is_sorted_subset(a, t))
            .map(|t| difference(t, a))
            .collect();
        Ok(set.into_iter().collect())
    }

    /// `a` and `b` share a complement.
    pub fn perspective(&self, a: &[usize], b: &[usize]) -> Result<bool> {
        let ca = self.complements(a)?;
        let cb = self.complements(b)?;
        Ok(ca.iter().any(|c| cb.binary_search(c).is_ok()))
    }

    /// Complement sets of all events, and events grouped by a shared complement.
    #[allow(clippy::type_complexity)]
    fn complement_tables(
        &self,
    ) -> Result<(BTreeMap<Event, BTreeSet<Event>>, BTreeMap<Event, BTreeSet<Event>>)> {
        self.enumeration_size()?;
        let mut co: BTreeMap<Event, BTreeSet<Event>> = BTreeMap::new();
        let mut by_complement: BTreeMap<Event, BTreeSet<Event>> = BTreeMap::new();
        for t in &self.tests {
            for a in subsets(t) {
                let c = difference(t, &a);
                co.entry(a.clone()).or_default().insert(c.clone());
                by_complement.entry(c).or_default().insert(a);
            }
        }
        Ok((co, by_complement))
    }

    /// Whenever two events are perspective, their complement sets coincide.
    pub fn is_algebraic(&self) -> Result<bool> {
        Ok(self.algebraicity_witness()?.is_none())
    }

    /// A pair of perspective events with different complement sets, if any.
    pub fn algebraicity_witness(&self) -> Result<Option<(Event, Event)>> {
        let (co, by_complement) = self.complement_tables()?;
        for group in by_complement.values() {
            let mut it = group.iter();
            let first = it.next().expect("groups are nonempty");
            if let Some(other) = it.find(|b| co[*b] != co[first]) {
                return Ok(Some((first.clone(), other.clone())));
            }
        }
        Ok(None)
    }

    /// Classes of the equivalence generated by perspectivity, each sorted, in
    /// sorted order. On an algebraic space this is perspectivity itself.
    pub fn perspectivity_classes(&self) -> Result<Vec<Vec<Event>>> {
        let (co, by_complement) = self.complement_tables()?;
        let events: Vec<&Event> = co.keys().collect();
        let index: BTreeMap<&Event, usize> = events.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut parent: Vec<usize> = (0..events.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for group in by_complement.values() {
            let mut it = group.iter();
            let root = index[it.next().expect("groups are nonempty")];
            for b in it {
                let (ra, rb) = (find(&mut parent, root), find(&mut parent, index[b]));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<Event>> = BTreeMap::new();
        for (i, e) in events.iter().enumerate() {
            let r = find(&mut parent, i);
            classes.entry(r).or_default().push((*e).clone());
        }
        let mut out: Vec<Vec<Event>> = classes.into_values().collect();
        out.sort();
        Ok(out)
    }

    pub fn check_weight_len(&self, alpha: &[Rational]) -> Result<()> {
        if alpha.len() != self.outcomes.len() {
            return input(format!(
                "weight has {} values for {} outcomes",
                alpha.len(),
                self.outcomes.len()
            ));
        }
        Ok(())
    }

    pub fn event_sum(&self, alpha: &[Rational], e: &[usize]) -> Rational {
        e.iter().fold(Rational::zero(), |acc, &i| acc + &alpha[i])
    }

    /// Nonnegative values, indexed by outcome position, summing to one on every test.
    pub fn is_probability_weight(&self, alpha: &[Rational]) -> Result<bool> {
        self.check_weight_len(alpha)?;
        Ok(alpha.iter().all(|a| !a.is_negative())
            && self.tests.iter().all(|t| self.event_sum(alpha, t).is_one()))
    }

    /// The first test on which `alpha` does not sum to one.
    pub fn failing_test(&self, alpha: &[Rational]) -> Option<usize> {
        self.tests.iter().position(|t| !self.event_sum(alpha, t).is_one())
    }

    fn weight_constraints(&self, lp: &mut LinearProgram) {
        for t in &self.tests {
            let mut row = vec![Rational::zero(); self.outcomes.len()];
            for &i in t {
                row[i] = Rational::one();
            }
            lp.add_eq(row, Rational::one());
        }
    }

    /// Exact vertices of the polytope of probability weights.
    pub fn weight_polytope_vertices(&self) -> Result<Vec<Vector>> {
        let n = self.outcomes.len();
        let eqs: Vec<AffineRow> = self
            .tests
            .iter()
            .map(|t| {
                let mut row = vec![Rational::zero(); n];
                for &i in t {
                    row[i] = Rational::one();
                }
                AffineRow::new(row, Rational::one())
            })
            .collect();
        let ineqs: Vec<AffineRow> = (0..n)
            .map(|i| AffineRow::new(crate::linalg::unit_vector(n, i), Rational::zero()))
            .collect();
        polyhedron::polytope_vertices(&eqs, &ineqs, n)
    }

    /// `max (sum_a beta - sum_b beta)` over all probability weights `beta`.
    pub fn max_event_difference(&self, a: &[usize], b: &[usize]) -> Result<Rational> {
        let n = self.outcomes.len();
        let mut lp = LinearProgram::new(n);
        self.weight_constraints(&mut lp);
        let mut obj = vec![Rational::zero(); n];
        for &i in a {
            obj[i] += Rational::one();
        }
        for &i in b {
            obj[i] -= Rational::one();
        }
        lp.set_objective(Sense::Maximize, obj);
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible(_) => structural("test space admits no probability weight"),
            LpOutcome::Unbounded => structural("objective unbounded on the weight polytope"),
        }
    }

    /// `max (beta(x) - beta(y))` over all probability weights.
    pub fn weight_equality_bound(&self, x: usize, y: usize) -> Result<Rational> {
        if x >= self.outcomes.len() || y >= self.outcomes.len() {
            return input("outcome position out of range");
        }
        self.max_event_difference(&[x], &[y])
    }

    /// The coarse-graining whose outcomes are nonempty events and whose tests
    /// are partitions of tests into nonempty events.
    pub fn coarse_graining(&self) -> Result<TestSpace> {
        let cap = event_cap() as u128;
        let total = self
            .tests
            .iter()
            .fold(0u128, |acc, t| acc.saturating_add(bell(t.len())));
        if total > cap {
            return resource(format!(
                "coarse-graining needs {total} partitions, above the cap of {cap} ({EVENT_CAP_VAR})"
            ));
        }
        let mut tests = Vec::new();
        for t in &self.tests {
            for partition in set_partitions(t) {
                tests.push(
                    partition
                        .into_iter()
                        .map(|block| Outcome::event(block.iter().map(|&i| self.outcomes[i].clone()).collect()))
                        .collect(),
                );
            }
        }
        TestSpace::new(tests)
    }

    /// The weight induced on a coarse-graining by summing over each event.
    pub fn coarse_weight(&self, coarse: &TestSpace, alpha: &[Rational]) -> Result<Vector> {
        self.check_weight_len(alpha)?;
        coarse
            .outcomes()
            .iter()
            .map(|o| match o {
                Outcome::Event(members) => Ok(self.event_sum(alpha, &self.ids(members)?)),
                other => input(format!("{other} is not a coarse-grained outcome")),
            })
            .collect()
    }
}
