//! Small built-in systems used throughout the examples and tests.

use crate::linalg;
use crate::ous::OrderUnitSpace;
use crate::rational::{ivec, q, Vector};
use crate::testspace::{Outcome, TestSpace};
use crate::error::Result;
use crate::modj::{Catalog, Observable};
use crate::vweight::ValuedWeight;

/// `R^n` with the positive orthant and unit `(1, ..., 1)`.
pub fn classical(n: usize) -> OrderUnitSpace {
    OrderUnitSpace::new(linalg::identity(n), vec![crate::rational::int(1); n])
        .expect("orthant is a valid cone")
}

/// The classical bit: `R^2`, orthant cone, unit `(1, 1)`.
pub fn bit() -> OrderUnitSpace {
    classical(2)
}

/// The one-dimensional space `R` with unit `1`.
pub fn trivial() -> OrderUnitSpace {
    classical(1)
}

/// Effects of the square-state-space bit: the cone of functionals that are
/// nonnegative on the four states `(1, +-1, +-1)`.
pub fn square_bit_generators() -> Vec<Vector> {
    vec![
        ivec(&[1, 1, 0]),
        ivec(&[1, -1, 0]),
        ivec(&[1, 0, 1]),
        ivec(&[1, 0, -1]),
    ]
}

/// The square-state-space bit (gbit), unit `(1, 0, 0)`.
pub fn square_bit() -> OrderUnitSpace {
    OrderUnitSpace::new(square_bit_generators(), ivec(&[1, 0, 0])).expect("square cone is valid")
}

/// Alias for [`square_bit`].
pub fn gbit() -> OrderUnitSpace {
    square_bit()
}

/// A test space with the single test `names`.
pub fn single_test(names: &[&str]) -> TestSpace {
    TestSpace::from_atoms(&[names]).expect("one test is irredundant")
}

/// The triangle `{{a,b},{b,c},{c,a}}`.
pub fn triangle() -> TestSpace {
    TestSpace::from_atoms(&[&["a", "b"], &["b", "c"], &["c", "a"]]).expect("valid")
}

/// The 3x3 grid: outcomes `"rc"` for row `r` and column `c`, rows and columns as tests.
pub fn grid() -> TestSpace {
    let name = |r: usize, c: usize| Outcome::atom(format!("{r}{c}"));
    let mut tests = Vec::new();
    for k in 0..3 {
        tests.push((0..3).map(|c| name(k, c)).collect());
        tests.push((0..3).map(|r| name(r, k)).collect());
    }
    TestSpace::new(tests).expect("valid")
}

/// Two binary tests `{x0, x1}`, `{y0, y1}`.
pub fn two_binary_tests() -> TestSpace {
    TestSpace::from_atoms(&[&["x0", "x1"], &["y0", "y1"]]).expect("valid")
}

/// The bit realized on the single test `{x0, x1}`.
pub fn bit_model() -> ValuedWeight {
    ValuedWeight::new(bit(), single_test(&["x0", "x1"]), vec![ivec(&[1, 0]), ivec(&[0, 1])])
        .expect("valid weight")
}

/// The gbit realized on two binary tests: `x0, x1` read the first coordinate, `y0, y1` the second.
pub fn gbit_model() -> ValuedWeight {
    let h = |a: i64, b: i64| vec![q(1, 2), q(a, 2), q(b, 2)];
    ValuedWeight::new(gbit(), two_binary_tests(), vec![h(1, 0), h(-1, 0), h(0, 1), h(0, -1)])
        .expect("valid weight")
}

/// One observable per test of `f`'s test space, indexed by the test's outcomes.
pub fn realized_catalog(f: &ValuedWeight) -> Result<Catalog> {
    let ts = f.testspace();
    let observables = ts
        .tests()
        .iter()
        .map(|t| {
            let pairs = t.iter().map(|&x| (ts.outcome(x).clone(), f.value(x).clone())).collect();
            Observable::new(f.space(), pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    Catalog::new(f.space().clone(), observables)
}

/// The bit's coordinate observable `{1: (1, 0), 2: (0, 1)}`.
pub fn delta_bit_catalog() -> Catalog {
    realized_catalog(&ValuedWeight::new(bit(), single_test(&["1", "2"]), vec![ivec(&[1, 0]), ivec(&[0, 1])]).expect("valid"))
        .expect("valid")
}

/// One uniform `n`-outcome observable on the one-dimensional space.
pub fn uniform_catalog(n: usize) -> Catalog {
    let t = trivial();
    let pairs = (1..=n)
        .map(|k| (Outcome::atom(k.to_string()), vec![q(1, n as i64)]))
        .collect();
    Catalog::new(t.clone(), vec![Observable::new(&t, pairs).expect("valid")]).expect("valid")
}

/// Binaries `{i: a, r: u - a}`, `{j: a, r: u - a}` with `a = (1/2, 1/4)`, plus
/// the coordinate observable and two three-outcome observables built from
/// `a` and `h = (0, 1/2)`.
pub fn enriched_bit_catalog() -> Catalog {
    let sp = bit();
    let a = vec![q(1, 2), q(1, 4)];
    let rest = crate::linalg::sub(sp.unit(), &a);
    let h = vec![q(0, 1), q(1, 2)];
    let named = |pairs: &[(&str, Vector)]| Observable::from_named(&sp, pairs).expect("valid");
    let obs = vec![
        named(&[("i", a.clone()), ("r", rest.clone())]),
        named(&[("j", a.clone()), ("r", rest)]),
        named(&[("1", ivec(&[1, 0])), ("2", ivec(&[0, 1]))]),
        named(&[("1", a.clone()), ("2", a), ("3", h.clone())]),
        named(&[("1", h.clone()), ("2", h), ("3", ivec(&[1, 0]))]),
    ];
    Catalog::new(sp, obs).expect("valid")
}
