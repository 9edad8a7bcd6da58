//! Exact-rational linear programming.
//!
//! A dense two-phase tableau simplex using Bland's smallest-index rule, so it
//! terminates on degenerate problems without any tolerance. When phase one
//! ends with a positive artificial total the final duals form a Farkas
//! certificate, which is returned alongside the verdict and can be re-checked
//! independently with [`FarkasCertificate::verify`].

use num_traits::{One, Signed, Zero};

use crate::linalg::{dot, zeros};
use crate::rational::{Rational, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vector,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `optimize c.x subject to rows`, with each variable either `>= 0` or free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Vector,
    sense: Sense,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vector },
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible(_))
    }

    pub fn point(&self) -> Option<&Vector> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Multipliers `y`, one per constraint, proving that no feasible point exists:
/// `y.A` is `<= 0` on nonnegative variables and `= 0` on free ones, `y_i <= 0`
/// on `<=` rows, `y_i >= 0` on `>=` rows, and `y.b > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vector,
}

impl FarkasCertificate {
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        let y = &self.multipliers;
        if y.len() != lp.constraints.len() {
            return false;
        }
        for (yi, c) in y.iter().zip(&lp.constraints) {
            let ok = match c.relation {
                Relation::Eq => true,
                Relation::Le => !yi.is_positive(),
                Relation::Ge => !yi.is_negative(),
            };
            if !ok {
                return false;
            }
        }
        for j in 0..lp.num_vars {
            let combo = y
                .iter()
                .zip(&lp.constraints)
                .fold(Rational::zero(), |acc, (yi, c)| acc + yi * &c.coeffs[j]);
            if lp.free[j] && !combo.is_zero() || !lp.free[j] && combo.is_positive() {
                return false;
            }
        }
        let rhs = y
            .iter()
            .zip(&lp.constraints)
            .fold(Rational::zero(), |acc, (yi, c)| acc + yi * &c.rhs);
        rhs.is_positive()
    }
}

impl LinearProgram {
    /// A feasibility problem over `num_vars` nonnegative variables.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            free: vec![false; num_vars],
            constraints: Vec::new(),
            objective: zeros(num_vars),
            sense: Sense::Minimize,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn add(&mut self, coeffs: Vector, relation: Relation, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn add_eq(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.add(coeffs, Relation::Eq, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.add(coeffs, Relation::Ge, rhs)
    }

    pub fn add_le(&mut self, coeffs: Vector, rhs: Rational) -> &mut Self {
        self.add(coeffs, Relation::Le, rhs)
    }

    pub fn set_objective(&mut self, sense: Sense, objective: Vector) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars, "objective width");
        self.sense = sense;
        self.objective = objective;
        self
    }

    pub fn is_feasible(&self) -> bool {
        self.solve().is_feasible()
    }

    /// Checks that `x` satisfies every constraint and sign restriction exactly.
    pub fn satisfies(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x
                .iter()
                .zip(&self.free)
                .all(|(v, &free)| free || !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, x);
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::standard_form(self).run(self)
    }
}

/// Column bookkeeping from the user's variables to standard-form columns.
enum Column {
    Plus(usize),
    Minus(usize),
    Slack,
}

struct Tableau {
    rows: Vec<Vector>,
    rhs: Vector,
    basis: Vec<usize>,
    columns: Vec<Column>,
    row_sign: Vec<bool>,
    num_structural: usize,
}

impl Tableau {
    fn standard_form(lp: &LinearProgram) -> Tableau {
        let mut columns = Vec::new();
        for j in 0..lp.num_vars {
            columns.push(Column::Plus(j));
            if lp.free[j] {
                columns.push(Column::Minus(j));
            }
        }
        let slack_start = columns.len();
        let num_slacks = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        for _ in 0..num_slacks {
            columns.push(Column::Slack);
        }
        let n = columns.len();
        let m = lp.constraints.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        let mut slack = slack_start;
        for c in &lp.constraints {
            let mut row = zeros(n + m);
            for (k, col) in columns.iter().enumerate().take(slack_start) {
                row[k] = match col {
                    Column::Plus(j) => c.coeffs[*j].clone(),
                    Column::Minus(j) => -c.coeffs[*j].clone(),
                    Column::Slack => unreachable!(),
                };
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let negate = c.rhs.is_negative();
            if negate {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            rows.push(row);
            rhs.push(if negate { -c.rhs.clone() } else { c.rhs.clone() });
            row_sign.push(negate);
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row[n + i] = Rational::one();
        }
        Tableau {
            rows,
            rhs,
            basis: (n..n + m).collect(),
            columns,
            row_sign,
            num_structural: n,
        }
    }

    fn width(&self) -> usize {
        self.num_structural + self.rows.len()
    }

    fn pivot(&mut self, r: usize, c: usize, reduced: &mut Vector, objective: &mut Rational) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !reduced[c].is_zero() {
            let f = reduced[c].clone();
            for (x, p) in reduced.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            *objective -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Minimizes with Bland's rule over the allowed columns. Returns false if unbounded.
    fn optimize(
        &mut self,
        reduced: &mut Vector,
        objective: &mut Rational,
        allowed: impl Fn(usize) -> bool,
    ) -> bool {
        loop {
            let entering = (0..reduced.len()).find(|&j| allowed(j) && reduced[j].is_negative());
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, c, reduced, objective);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let n = self.num_structural;
        let m = self.rows.len();
        let width = self.width();

        // Phase one: minimize the sum of artificials. `objective` holds minus the value.
        let mut reduced = zeros(width);
        let mut objective = Rational::zero();
        for i in 0..m {
            for j in 0..n {
                reduced[j] -= &self.rows[i][j];
            }
            objective -= &self.rhs[i];
        }
        self.optimize(&mut reduced, &mut objective, |_| true);
        if objective.is_negative() {
            let multipliers = (0..m)
                .map(|i| {
                    let y = Rational::one() - &reduced[n + i];
                    if self.row_sign[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            let cert = FarkasCertificate { multipliers };
            debug_assert!(cert.verify(lp), "phase one produced an invalid certificate");
            return LpOutcome::Infeasible(cert);
        }

        // Drive remaining artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= n {
                if let Some(c) = (0..n).find(|&j| !self.rows[i][j].is_zero()) {
                    let mut scratch = zeros(width);
                    let mut obj = Rational::zero();
                    self.pivot(i, c, &mut scratch, &mut obj);
                } else {
                    self.rows.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }

        // Phase two on the structural columns.
        let flip = lp.sense == Sense::Maximize;
        let mut cost = zeros(width);
        for (k, col) in self.columns.iter().enumerate() {
            let c = match col {
                Column::Plus(j) => lp.objective[*j].clone(),
                Column::Minus(j) => -lp.objective[*j].clone(),
                Column::Slack => Rational::zero(),
            };
            cost[k] = if flip { -c } else { c };
        }
        let mut reduced = cost.clone();
        let mut objective = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for j in 0..width {
                if !self.rows[i][j].is_zero() {
                    reduced[j] -= &cost[b] * &self.rows[i][j];
                }
            }
            objective -= &cost[b] * &self.rhs[i];
        }
        if !self.optimize(&mut reduced, &mut objective, |j| j < n) {
            return LpOutcome::Unbounded;
        }

        let mut std_point = zeros(n);
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                std_point[b] = self.rhs[i].clone();
            }
        }
        let mut point = zeros(lp.num_vars);
        for (k, col) in self.columns.iter().enumerate() {
            match col {
                Column::Plus(j) => point[*j] += &std_point[k],
                Column::Minus(j) => point[*j] -= &std_point[k],
                Column::Slack => {}
            }
        }
        let value = dot(&lp.objective, &point);
        debug_assert!(lp.satisfies(&point));
        LpOutcome::Optimal { value, point }
    }
}
