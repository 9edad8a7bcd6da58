//! Finite effect algebras given by their partial-sum tables, the logic of an
//! algebraic test space, and the `L * M` product.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{input, resource, structural, Error, Result};
use crate::linalg::{add, is_zero, sub, zeros};
use crate::modj::{build_modj, indexed_catalog};
use crate::ous::OrderUnitSpace;
use crate::rational::{fmt_vector, Vector};
use crate::testspace::{event_cap, Event, TestSpace, EVENT_CAP_VAR};

/// A finite effect algebra. `osum[a][b]` is `Some(a + b)` when the sum is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectAlgebraTable {
    labels: Vec<String>,
    zero: usize,
    one: usize,
    osum: Vec<Vec<Option<usize>>>,
}

impl EffectAlgebraTable {
    /// Validates commutativity, associativity, unique orthosupplements and the
    /// zero-one law.
    pub fn new(labels: Vec<String>, zero: usize, one: usize, osum: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || zero >= n || one >= n {
            return input("effect algebra needs elements with zero and one among them");
        }
        if osum.len() != n || osum.iter().any(|r| r.len() != n) {
            return input(format!("sum table must be {n} x {n}"));
        }
        if osum.iter().flatten().flatten().any(|&c| c >= n) {
            return input("sum table refers to an unknown element");
        }
        let ea = EffectAlgebraTable {
            labels,
            zero,
            one,
            osum,
        };
        if let Some(why) = ea.axiom_violation() {
            return structural(format!("not an effect algebra: {why}"));
        }
        Ok(ea)
    }

    fn axiom_violation(&self) -> Option<String> {
        let n = self.len();
        let l = |a: usize| &self.labels[a];
        for a in 0..n {
            for b in 0..n {
                if self.osum[a][b] != self.osum[b][a] {
                    return Some(format!("{} + {} is not commutative", l(a), l(b)));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = self.osum[a][b] else { continue };
                for c in 0..n {
                    let Some(left) = self.osum[ab][c] else { continue };
                    match self.osum[b][c].and_then(|bc| self.osum[a][bc]) {
                        Some(right) if right == left => {}
                        _ => {
                            return Some(format!(
                                "({} + {}) + {} is defined but {} + ({} + {}) is not equal to it",
                                l(a),
                                l(b),
                                l(c),
                                l(a),
                                l(b),
                                l(c)
                            ))
                        }
                    }
                }
            }
        }
        for a in 0..n {
            let supps = (0..n).filter(|&b| self.osum[a][b] == Some(self.one)).count();
            if supps != 1 {
                return Some(format!("{} has {supps} orthosupplements", l(a)));
            }
            if a != self.zero && self.osum[a][self.one].is_some() {
                return Some(format!("{} + 1 is defined", l(a)));
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn sum(&self, a: usize, b: usize) -> Option<usize> {
        self.osum[a][b]
    }

    pub fn table(&self) -> &[Vec<Option<usize>>] {
        &self.osum
    }

    pub fn supplement(&self, a: usize) -> usize {
        (0..self.len())
            .find(|&b| self.osum[a][b] == Some(self.one))
            .expect("validated")
    }

    /// `a + a` is defined only for `a = 0`.
    pub fn is_orthoalgebra(&self) -> bool {
        (0..self.len()).all(|a| a == self.zero || self.osum[a][a].is_none())
    }

    /// Nonzero elements that are not a sum of two nonzero elements.
    pub fn atoms(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&a| a != self.zero)
            .filter(|&a| {
                !(0..n).any(|b| {
                    (0..n).any(|c| b != self.zero && c != self.zero && self.osum[b][c] == Some(a))
                })
            })
            .collect()
    }

    /// `f` sends one to one and every defined sum to the corresponding defined sum.
    pub fn is_homomorphism(&self, target: &EffectAlgebraTable, f: &[usize]) -> bool {
        if f.len() != self.len() || f[self.one] != target.one {
            return false;
        }
        (0..self.len()).all(|a| {
            (0..self.len()).all(|b| match self.osum[a][b] {
                Some(c) => target.osum[f[a]][f[b]] == Some(f[c]),
                None => true,
            })
        })
    }

    /// A bijection that preserves and reflects the sum table.
    pub fn is_isomorphism(&self, target: &EffectAlgebraTable, f: &[usize]) -> bool {
        if f.len() != self.len() || target.len() != self.len() {
            return false;
        }
        let image: BTreeSet<usize> = f.iter().copied().collect();
        image.len() == self.len()
            && f[self.zero] == target.zero
            && f[self.one] == target.one
            && (0..self.len())
                .all(|a| (0..self.len()).all(|b| self.osum[a][b].map(|c| f[c]) == target.osum[f[a]][f[b]]))
    }

    /// Any isomorphism onto `target`, by backtracking.
    pub fn find_isomorphism(&self, target: &EffectAlgebraTable) -> Option<Vec<usize>> {
        let n = self.len();
        if target.len() != n {
            return None;
        }
        let defined = |t: &EffectAlgebraTable, a: usize| t.osum[a].iter().filter(|c| c.is_some()).count();
        let mut f = vec![usize::MAX; n];
        let mut used = vec![false; n];
        f[self.zero] = target.zero;
        used[target.zero] = true;
        if self.one != self.zero {
            if target.one == target.zero {
                return None;
            }
            f[self.one] = target.one;
            used[target.one] = true;
        }
        let order: Vec<usize> = (0..n).filter(|&a| f[a] == usize::MAX).collect();
        fn extend(
            s: &EffectAlgebraTable,
            t: &EffectAlgebraTable,
            order: &[usize],
            k: usize,
            f: &mut [usize],
            used: &mut [bool],
            defined: &dyn Fn(&EffectAlgebraTable, usize) -> usize,
        ) -> bool {
            if k == order.len() {
                return s.is_isomorphism(t, f);
            }
            let a = order[k];
            for b in 0..t.len() {
                if used[b] || defined(s, a) != defined(t, b) {
                    continue;
                }
                f[a] = b;
                let consistent = (0..s.len()).all(|x| {
                    f[x] == usize::MAX
                        || s.osum[a][x].is_none_or(|c| f[c] == usize::MAX || t.osum[b][f[x]] == Some(f[c]))
                            && (s.osum[a][x].is_some() || t.osum[b][f[x]].is_none())
                });
                if consistent {
                    used[b] = true;
                    if extend(s, t, order, k + 1, f, used, defined) {
                        return true;
                    }
                    used[b] = false;
                }
                f[a] = usize::MAX;
            }
            false
        }
        extend(self, target, &order, 0, &mut f, &mut used, &defined).then_some(f)
    }

    /// Isomorphic to the powerset of its atoms.
    pub fn is_boolean(&self) -> bool {
        let k = self.atoms().len();
        k < 20 && 1usize << k == self.len() && self.find_isomorphism(&boolean_algebra(k)).is_some()
    }

    /// The chain `{0, 1/n, ..., 1}` with `i/n + j/n` defined when `i + j <= n`.
    pub fn chain(n: usize) -> EffectAlgebraTable {
        let labels = (0..=n)
            .map(|k| match k {
                0 => "0".to_string(),
                k if k == n => "1".to_string(),
                k => format!("{k}/{n}"),
            })
            .collect();
        let osum = (0..=n)
            .map(|a| (0..=n).map(|b| (a + b <= n).then_some(a + b)).collect())
            .collect();
        EffectAlgebraTable::new(labels, 0, n, osum).expect("chains are effect algebras")
    }
}

/// The powerset of a `k`-element set, sums defined on disjoint pairs.
pub fn boolean_algebra(k: usize) -> EffectAlgebraTable {
    let n = 1usize << k;
    let labels = (0..n)
        .map(|m| {
            let members: Vec<String> = (0..k).filter(|i| m >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    let osum = (0..n)
        .map(|a| (0..n).map(|b| (a & b == 0).then_some(a | b)).collect())
        .collect();
    EffectAlgebraTable::new(labels, 0, n - 1, osum).expect("powersets are effect algebras")
}

/// The sub-effect-algebra of `[0, u]` on `{0} + effects`, with `a + b` defined
/// when `a + b <= u`. The list must be closed under `a -> u - a` and under all
/// defined sums.
pub fn effect_algebra_from_effects(space: &OrderUnitSpace, effects: &[Vector]) -> Result<EffectAlgebraTable> {
    let mut elems: BTreeSet<Vector> = BTreeSet::new();
    elems.insert(zeros(space.dim()));
    for a in effects {
        space.check_dim(a)?;
        if !space.is_effect(a)? {
            return input(format!("{} is not an effect", fmt_vector(a)));
        }
        elems.insert(a.clone());
    }
    let elems: Vec<Vector> = elems.into_iter().collect();
    let pos = |v: &Vector| elems.binary_search(v).ok();
    let unit = space.unit();
    if pos(unit).is_none() {
        return input("effect list must contain the unit");
    }
    for a in &elems {
        if pos(&sub(unit, a)).is_none() {
            return input(format!("effect list is not closed under complement: {}", fmt_vector(a)));
        }
    }
    let mut osum = vec![vec![None; elems.len()]; elems.len()];
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            let s = add(a, b);
            if space.is_effect(&s)? {
                match pos(&s) {
                    Some(k) => osum[i][j] = Some(k),
                    None => {
                        return input(format!(
                            "effect list is not closed under sums: {} + {}",
                            fmt_vector(a),
                            fmt_vector(b)
                        ))
                    }
                }
            }
        }
    }
    let labels = elems.iter().map(|v| fmt_vector(v)).collect();
    let zero = pos(&zeros(space.dim())).expect("inserted");
    let one = pos(unit).expect("checked");
    EffectAlgebraTable::new(labels, zero, one, osum).map_err(|e| Error::Input(format!("effect list: {e}")))
}

/// Pairs `(a, b)` with `a = 0 iff b = 0` and `a = 1 iff b = 1`, summed
/// componentwise when both sums exist and the result is again such a pair.
pub fn star_product(l: &EffectAlgebraTable, m: &EffectAlgebraTable) -> Result<StarProduct> {
    let mut carrier = Vec::new();
    for a in 0..l.len() {
        for b in 0..m.len() {
            if (a == l.zero) == (b == m.zero) && (a == l.one) == (b == m.one) {
                carrier.push((a, b));
            }
        }
    }
    let index: BTreeMap<(usize, usize), usize> = carrier.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let n = carrier.len();
    let mut osum = vec![vec![None; n]; n];
    for (i, &(a, b)) in carrier.iter().enumerate() {
        for (j, &(c, d)) in carrier.iter().enumerate() {
            if let (Some(x), Some(y)) = (l.sum(a, c), m.sum(b, d)) {
                osum[i][j] = index.get(&(x, y)).copied();
            }
        }
    }
    let labels = carrier
        .iter()
        .map(|&(a, b)| format!("({}, {})", l.labels[a], m.labels[b]))
        .collect();
    let zero = index[&(l.zero, m.zero)];
    let one = index[&(l.one, m.one)];
    let table = EffectAlgebraTable::new(labels, zero, one, osum)
        .map_err(|e| Error::Internal(format!("star product failed validation: {e}")))?;
    Ok(StarProduct { table, carrier })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarProduct {
    pub table: EffectAlgebraTable,
    /// Element `k` of `table` is the pair `carrier[k]`.
    pub carrier: Vec<(usize, usize)>,
}

impl StarProduct {
    pub fn left_projection(&self) -> Vec<usize> {
        self.carrier.iter().map(|p| p.0).collect()
    }

    pub fn right_projection(&self) -> Vec<usize> {
        self.carrier.iter().map(|p| p.1).collect()
    }

    /// Both projections are homomorphisms.
    pub fn projections_are_homomorphisms(&self, l: &EffectAlgebraTable, m: &EffectAlgebraTable) -> bool {
        self.table.is_homomorphism(l, &self.left_projection()) && self.table.is_homomorphism(m, &self.right_projection())
    }

    /// Both projections are onto. This fails when exactly one factor is `{0, 1}`:
    /// the other factor's elements strictly between 0 and 1 have no partner.
    pub fn projections_are_onto(&self, l: &EffectAlgebraTable, m: &EffectAlgebraTable) -> bool {
        let onto = |f: &[usize], n: usize| f.iter().copied().collect::<BTreeSet<_>>().len() == n;
        onto(&self.left_projection(), l.len()) && onto(&self.right_projection(), m.len())
    }
}

/// Perspectivity classes of an algebraic test space with their induced sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicClassMap {
    pub source: TestSpace,
    pub classes: Vec<Vec<Event>>,
    pub algebra: EffectAlgebraTable,
    class_of: BTreeMap<Event, usize>,
}

impl LogicClassMap {
    pub fn class_of(&self, e: &[usize]) -> Option<usize> {
        self.class_of.get(e).copied()
    }
}

/// The logic of an algebraic test space.
pub fn logic_of(ts: &TestSpace) -> Result<LogicClassMap> {
    if let Some((a, b)) = ts.algebraicity_witness()? {
        return structural(format!(
            "test space is not algebraic: {} and {} are perspective with different complements",
            ts.fmt_event(&a),
            ts.fmt_event(&b)
        ));
    }
    let pairs: f64 = ts.tests().iter().map(|t| 3f64.powi(t.len() as i32)).sum();
    if pairs > event_cap() as f64 {
        return resource(format!("logic table needs {pairs} disjoint pairs, above the cap ({EVENT_CAP_VAR})"));
    }
    let classes = ts.perspectivity_classes()?;
    let mut class_of = BTreeMap::new();
    for (k, class) in classes.iter().enumerate() {
        for e in class {
            class_of.insert(e.clone(), k);
        }
    }
    let n = classes.len();
    let zero = class_of[&Vec::new()];
    let one = ts
        .tests()
        .first()
        .map(|t| class_of[t])
        .ok_or_else(|| Error::Input("test space has no tests".into()))?;
    let mut osum: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    for t in ts.tests() {
        let k = t.len();
        let mut digits = vec![0u8; k];
        loop {
            let a: Event = (0..k).filter(|&i| digits[i] == 1).map(|i| t[i]).collect();
            let b: Event = (0..k).filter(|&i| digits[i] == 2).map(|i| t[i]).collect();
            let mut ab: Event = a.iter().chain(&b).copied().collect();
            ab.sort_unstable();
            let (ca, cb, cab) = (class_of[&a], class_of[&b], class_of[&ab]);
            match osum[ca][cb] {
                Some(prev) if prev != cab => {
                    return Err(Error::Internal(format!(
                        "sum of classes depends on representatives at {} + {}",
                        ts.fmt_event(&a),
                        ts.fmt_event(&b)
                    )))
                }
                _ => osum[ca][cb] = Some(cab),
            }
            let mut p = 0;
            while p < k && digits[p] == 2 {
                digits[p] = 0;
                p += 1;
            }
            if p == k {
                break;
            }
            digits[p] += 1;
        }
    }
    let labels = classes.iter().map(|c| format!("[{}]", ts.fmt_event(&c[0]))).collect();
    let algebra = EffectAlgebraTable::new(labels, zero, one, osum)
        .map_err(|e| Error::Internal(format!("logic failed validation: {e}")))?;
    Ok(LogicClassMap {
        source: ts.clone(),
        classes,
        algebra,
        class_of,
    })
}

/// The fragment of the indexed test space whose observables are all maps from
/// tests of `indexing` into `effects` summing to the unit.
pub fn indexed_fragment(space: &OrderUnitSpace, indexing: &TestSpace, effects: &[Vector]) -> Result<TestSpace> {
    let catalog = indexed_catalog(space, indexing, effects)?;
    Ok(build_modj(&catalog)?.model.testspace().clone())
}

/// Index projection `A_o` (as an event of `indexing`) and effect total of a fragment event.
pub fn project_event(
    space: &OrderUnitSpace,
    fragment: &TestSpace,
    indexing: &TestSpace,
    e: &[usize],
) -> Result<(Event, Vector)> {
    let mut total = zeros(space.dim());
    let mut idx = Vec::with_capacity(e.len());
    for &x in e {
        let (i, a) = fragment
            .outcome(x)
            .as_labeled()
            .ok_or_else(|| Error::Input(format!("{} is not an (index, effect) outcome", fragment.outcome(x))))?;
        idx.push(i.clone());
        total = add(&total, a);
    }
    Ok((indexing.ids(&idx)?, total))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementarityReport {
    pub events: usize,
    pub pairs_checked: usize,
    /// Event pairs where the two sides of the characterization disagree.
    pub violations: Vec<(Event, Event)>,
}

/// Brute-force comparison of complementarity in the fragment with
/// complementarity of index projections plus complementary effect totals.
pub fn complementarity_check(space: &OrderUnitSpace, indexing: &TestSpace, fragment: &TestSpace) -> Result<ComplementarityReport> {
    let events = fragment.events()?;
    if events.len().saturating_mul(events.len()) > event_cap().saturating_mul(16) {
        return resource(format!("{} events give too many pairs ({EVENT_CAP_VAR})", events.len()));
    }
    let projected = events
        .iter()
        .map(|e| project_event(space, fragment, indexing, e))
        .collect::<Result<Vec<_>>>()?;
    let unit = space.unit();
    let mut violations = Vec::new();
    for (a, (ao, sa)) in events.iter().zip(&projected) {
        for (b, (bo, sb)) in events.iter().zip(&projected) {
            let lhs = fragment.complementary(a, b)?;
            let rhs = indexing.complementary(ao, bo)? && *sb == sub(unit, sa);
            if lhs != rhs {
                violations.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(ComplementarityReport {
        events: events.len(),
        pairs_checked: events.len() * events.len(),
        violations,
    })
}

/// The fragment is algebraic exactly when the indexing space is.
pub fn algebraicity_transfer_check(space: &OrderUnitSpace, indexing: &TestSpace, effects: &[Vector]) -> Result<bool> {
    let fragment = indexed_fragment(space, indexing, effects)?;
    Ok(fragment.is_algebraic()? == indexing.is_algebraic()?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarIsoReport {
    pub fragment_classes: usize,
    pub product_classes: usize,
    /// `[A] -> ([A_o], sum A)` is a well-defined isomorphism.
    pub canonical_map_ok: bool,
    /// Some isomorphism exists (the canonical one, or one found by search).
    pub isomorphic: bool,
}

/// Compares the logic of the indexed fragment with `logic(indexing) * E`,
/// where `E` is the effect algebra on `effects`.
pub fn star_logic_iso_check(space: &OrderUnitSpace, indexing: &TestSpace, effects: &[Vector]) -> Result<StarIsoReport> {
    let effect_ea = effect_algebra_from_effects(space, effects)?;
    let nonzero: Vec<Vector> = effects.iter().filter(|a| !is_zero(a)).cloned().collect();
    let fragment = indexed_fragment(space, indexing, &nonzero)?;
    let left = logic_of(&fragment)?;
    let base = logic_of(indexing)?;
    let star = star_product(&base.algebra, &effect_ea)?;
    let effect_pos: BTreeMap<String, usize> = effect_ea
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let pair_pos: BTreeMap<(usize, usize), usize> =
        star.carrier.iter().enumerate().map(|(i, &p)| (p, i)).collect();

    let mut canonical: Vec<Option<usize>> = vec![None; left.classes.len()];
    let mut well_defined = true;
    'classes: for (k, class) in left.classes.iter().enumerate() {
        for e in class {
            let (ao, total) = project_event(space, &fragment, indexing, e)?;
            let image = base
                .class_of(&ao)
                .and_then(|c| effect_pos.get(&fmt_vector(&total)).map(|&b| (c, b)))
                .and_then(|p| pair_pos.get(&p).copied());
            match (image, canonical[k]) {
                (None, _) => {
                    well_defined = false;
                    break 'classes;
                }
                (Some(i), Some(prev)) if i != prev => {
                    well_defined = false;
                    break 'classes;
                }
                (Some(i), _) => canonical[k] = Some(i),
            }
        }
    }
    let canonical_map_ok = well_defined && {
        let f: Vec<usize> = canonical.iter().map(|c| c.expect("filled")).collect();
        left.algebra.is_isomorphism(&star.table, &f)
    };
    let isomorphic = canonical_map_ok || left.algebra.find_isomorphism(&star.table).is_some();
    Ok(StarIsoReport {
        fragment_classes: left.classes.len(),
        product_classes: star.table.len(),
        canonical_map_ok,
        isomorphic,
    })
}

/// Chain `{u/n, 2u/n, ..., u}` of a space.
pub fn unit_chain(space: &OrderUnitSpace, n: usize) -> Vec<Vector> {
    (1..=n as i64)
        .map(|k| {
            let t = crate::rational::q(k, n as i64);
            crate::linalg::scale(&t, space.unit())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modj::boolean_testspace;
    use crate::systems::{single_test, trivial, triangle};

    #[test]
    fn chain_and_boolean_tables() {
        let c = EffectAlgebraTable::chain(2);
        assert_eq!(c.len(), 3);
        assert!(!c.is_orthoalgebra());
        assert!(boolean_algebra(2).is_orthoalgebra());
        assert!(EffectAlgebraTable::chain(1).is_orthoalgebra());
        assert!(boolean_algebra(3).is_boolean());
        assert!(!EffectAlgebraTable::chain(2).is_boolean());
    }

    #[test]
    fn invalid_tables_are_rejected() {
        // h + h undefined but h has no supplement.
        let labels = vec!["0".into(), "h".into(), "1".into()];
        let osum = vec![
            vec![Some(0), Some(1), Some(2)],
            vec![Some(1), None, None],
            vec![Some(2), None, None],
        ];
        assert!(EffectAlgebraTable::new(labels, 0, 2, osum).is_err());
    }

    #[test]
    fn logic_examples() {
        let l = logic_of(&boolean_testspace(2).unwrap()).unwrap();
        assert_eq!(l.algebra.len(), 4);
        assert!(l.algebra.find_isomorphism(&boolean_algebra(2)).is_some());
        for n in 1..=4 {
            let names: Vec<String> = (0..n).map(|k| format!("x{k}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let l = logic_of(&single_test(&refs)).unwrap();
            assert!(l.algebra.find_isomorphism(&boolean_algebra(n)).is_some());
        }
        let l = logic_of(&boolean_testspace(1).unwrap()).unwrap();
        assert_eq!(l.algebra.len(), 2);
        assert!(logic_of(&triangle()).is_err());
    }

    #[test]
    fn boolean_logics_are_boolean() {
        for n in 1..=4 {
            assert!(logic_of(&boolean_testspace(n).unwrap()).unwrap().algebra.is_boolean());
        }
    }

    #[test]
    fn star_product_examples() {
        let two = EffectAlgebraTable::chain(1);
        let three = EffectAlgebraTable::chain(2);
        let p = star_product(&two, &two).unwrap();
        assert_eq!(p.carrier, vec![(0, 0), (1, 1)]);
        let p = star_product(&three, &two).unwrap();
        assert_eq!(p.carrier, vec![(0, 0), (2, 1)]);
        let p = star_product(&three, &three).unwrap();
        assert_eq!(p.carrier, vec![(0, 0), (1, 1), (2, 2)]);
        let h = 1;
        assert_eq!(p.table.sum(h, h), Some(2));
        assert!(p.projections_are_homomorphisms(&three, &three));
        assert!(p.projections_are_onto(&three, &three));
        let p = star_product(&three, &two).unwrap();
        assert!(p.projections_are_homomorphisms(&three, &two));
        assert!(!p.projections_are_onto(&three, &two));
    }

    #[test]
    fn star_of_orthoalgebra_is_orthoalgebra() {
        let tables = [
            boolean_algebra(1),
            boolean_algebra(2),
            EffectAlgebraTable::chain(2),
            EffectAlgebraTable::chain(3),
        ];
        for l in &tables {
            for m in &tables {
                let p = star_product(l, m).unwrap();
                assert!(p.projections_are_homomorphisms(l, m));
                if (l.len() == 2) == (m.len() == 2) {
                    assert!(p.projections_are_onto(l, m));
                }
                if l.is_orthoalgebra() {
                    assert!(p.table.is_orthoalgebra());
                }
            }
        }
    }

    #[test]
    fn effect_list_algebra() {
        let sp = trivial();
        let ea = effect_algebra_from_effects(&sp, &unit_chain(&sp, 3)).unwrap();
        assert!(ea.find_isomorphism(&EffectAlgebraTable::chain(3)).is_some());
        let bad = vec![vec![crate::rational::q(1, 3)], vec![crate::rational::int(1)]];
        assert!(effect_algebra_from_effects(&sp, &bad).is_err());
    }

    fn quarters() -> Vec<Vector> {
        unit_chain(&trivial(), 4)
    }

    #[test]
    fn transfer_examples() {
        let sp = trivial();
        assert!(algebraicity_transfer_check(&sp, &boolean_testspace(2).unwrap(), &quarters()).unwrap());
        assert!(algebraicity_transfer_check(&sp, &triangle(), &quarters()).unwrap());
        assert!(!indexed_fragment(&sp, &triangle(), &quarters()).unwrap().is_algebraic().unwrap());
        assert!(algebraicity_transfer_check(&sp, &single_test(&["p", "q", "r"]), &quarters()).unwrap());
    }

    #[test]
    fn star_iso_examples() {
        let sp = trivial();
        let rep = star_logic_iso_check(&sp, &boolean_testspace(2).unwrap(), &unit_chain(&sp, 2)).unwrap();
        assert!(rep.canonical_map_ok && rep.isomorphic);
        assert_eq!(rep.fragment_classes, rep.product_classes);
        let rep = star_logic_iso_check(&sp, &single_test(&["p"]), &unit_chain(&sp, 1)).unwrap();
        assert!(rep.isomorphic);
        assert_eq!(rep.product_classes, 2);
        let rep = star_logic_iso_check(&sp, &boolean_testspace(1).unwrap(), &unit_chain(&sp, 3)).unwrap();
        assert!(rep.canonical_map_ok);
    }

    #[test]
    fn complementarity_on_small_fragments() {
        let sp = trivial();
        for idx in [boolean_testspace(2).unwrap(), triangle(), single_test(&["p", "q"])] {
            let frag = indexed_fragment(&sp, &idx, &quarters()).unwrap();
            let rep = complementarity_check(&sp, &idx, &frag).unwrap();
            assert!(rep.violations.is_empty());
            assert!(rep.pairs_checked > 0);
        }
    }
}
