//! Dense two-phase simplex for the small linear programs that arise when the
//! minimax weight problem is fixed at a trial deviation.
//!
//! Pivoting follows Bland's rule (lowest eligible index enters, ties in the
//! ratio test leave by lowest basic index). Every verdict is exact: a fast
//! floating-point pass proposes a final basis, and that basis is accepted only
//! with a rational certificate. A feasible point must satisfy every constraint
//! in exact arithmetic. An infeasibility or optimality claim needs a dual
//! vector whose reduced costs check out exactly. When the floating-point
//! basis cannot be certified, the same pivoting runs again over rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Exact rational value of a finite `f64`.
pub fn exact(v: f64) -> Rational {
    Rational::from_float(v).expect("finite coefficient")
}

pub fn to_f64(v: &Rational) -> f64 {
    v.to_f64().expect("rational fits in f64")
}

pub fn integer(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self
            .coeffs
            .iter()
            .zip(x)
            .filter(|(a, v)| !a.is_zero() && !v.is_zero())
            .map(|(a, v)| a * v)
            .sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("phase one reported an unbounded objective")]
    Breakdown,
    #[error("constraint {row} has {actual} coefficients, expected {expected}")]
    Shape {
        row: usize,
        expected: usize,
        actual: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// `x >= 0` plus a list of linear constraints over `n_vars` variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    n_vars: usize,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            constraints: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Whether `x` is non-negative and satisfies every constraint exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.n_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }

    /// Any point satisfying every constraint, or `None` if there is none.
    pub fn feasible_point(&self) -> Result<Option<Vec<Rational>>, LpError> {
        let form = StandardForm::new(self)?;
        if let Ok(phase) = Tableau::<f64>::phase_one(&form) {
            match phase {
                PhaseOne::Feasible(t) => {
                    if let Some(x) = form.certify_point(self, &t.basis) {
                        return Ok(Some(x));
                    }
                }
                PhaseOne::Infeasible(t) => {
                    if form.certify_infeasible(&t.basis) {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(match Tableau::<Rational>::phase_one(&form)? {
            PhaseOne::Feasible(t) => Some(t.primal(self.n_vars)),
            PhaseOne::Infeasible(_) => None,
        })
    }

    /// Minimize `cost · x`.
    pub fn minimize(&self, cost: &[Rational]) -> Result<LpOutcome, LpError> {
        assert_eq!(cost.len(), self.n_vars, "cost vector length");
        let form = StandardForm::new(self)?;
        let mut full_cost = vec![Rational::zero(); form.cols];
        full_cost[..self.n_vars].clone_from_slice(cost);
        if let Some(outcome) = self.minimize_approx(&form, cost, &full_cost) {
            return Ok(outcome);
        }
        let mut tableau = match Tableau::<Rational>::phase_one(&form)? {
            PhaseOne::Feasible(t) => t,
            PhaseOne::Infeasible(_) => return Ok(LpOutcome::Infeasible),
        };
        match tableau.optimize(&full_cost, |c| c < form.first_artificial)? {
            Status::Optimal => {
                let x = tableau.primal(self.n_vars);
                let value = dot(cost, &x);
                Ok(LpOutcome::Optimal { x, value })
            }
            Status::Unbounded => Ok(LpOutcome::Unbounded),
        }
    }

    /// The floating-point pass of [`minimize`](Self::minimize), `None` unless
    /// its answer is certified.
    fn minimize_approx(
        &self,
        form: &StandardForm,
        cost: &[Rational],
        full_cost: &[Rational],
    ) -> Option<LpOutcome> {
        let mut tableau = match Tableau::<f64>::phase_one(form).ok()? {
            PhaseOne::Feasible(t) => t,
            PhaseOne::Infeasible(t) => {
                return form
                    .certify_infeasible(&t.basis)
                    .then_some(LpOutcome::Infeasible)
            }
        };
        let approx: Vec<f64> = full_cost.iter().map(to_f64).collect();
        match tableau
            .optimize(&approx, |c| c < form.first_artificial)
            .ok()?
        {
            Status::Optimal => {
                let x = form.certify_point(self, &tableau.basis)?;
                let value = dot(cost, &x);
                let y = form.dual(&tableau.basis, full_cost, |c| c < form.first_artificial)?;
                // weak duality closes the gap only at an optimum
                (dot(&form.rhs, &y) == value).then_some(LpOutcome::Optimal { x, value })
            }
            Status::Unbounded => None,
        }
    }

    /// Maximize `cost · x`.
    pub fn maximize(&self, cost: &[Rational]) -> Result<LpOutcome, LpError> {
        let negated: Vec<Rational> = cost.iter().map(|c| -c).collect();
        Ok(match self.minimize(&negated)? {
            LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x, value: -value },
            other => other,
        })
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Equality form with non-negative right-hand sides: structural columns,
/// then one slack per inequality, then one artificial per `>=` or `=` row.
struct StandardForm {
    n_vars: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Slack column and its coefficient (`1` or `-1`) per row.
    slack: Vec<Option<(usize, i64)>>,
    artificial: Vec<Option<usize>>,
    /// Row of every slack and artificial column, indexed from `n_vars`.
    unit_row: Vec<usize>,
    cols: usize,
    first_artificial: usize,
}

impl StandardForm {
    fn new(lp: &LinearProgram) -> Result<Self, LpError> {
        let n = lp.n_vars;
        let mut rows = Vec::with_capacity(lp.constraints.len());
        let mut rhs = Vec::with_capacity(lp.constraints.len());
        let mut relations = Vec::with_capacity(lp.constraints.len());
        for (row, c) in lp.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Shape {
                    row,
                    expected: n,
                    actual: c.coeffs.len(),
                });
            }
            // flip rows so every right-hand side is non-negative
            if c.rhs.is_negative() {
                rows.push(c.coeffs.iter().map(|v| -v).collect());
                rhs.push(-&c.rhs);
                relations.push(match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                });
            } else {
                rows.push(c.coeffs.clone());
                rhs.push(c.rhs.clone());
                relations.push(c.relation);
            }
        }

        let n_slack = relations.iter().filter(|r| **r != Relation::Eq).count();
        let first_artificial = n + n_slack;
        let mut slack = Vec::with_capacity(rows.len());
        let mut artificial = Vec::with_capacity(rows.len());
        let mut unit_row = Vec::new();
        let mut next_slack = n;
        for (i, rel) in relations.iter().enumerate() {
            slack.push(match rel {
                Relation::Eq => None,
                Relation::Le => Some((next_slack, 1)),
                Relation::Ge => Some((next_slack, -1)),
            });
            if *rel != Relation::Eq {
                next_slack += 1;
                unit_row.push(i);
            }
        }
        let mut next_artificial = first_artificial;
        for (i, rel) in relations.iter().enumerate() {
            if *rel == Relation::Le {
                artificial.push(None);
            } else {
                artificial.push(Some(next_artificial));
                next_artificial += 1;
                unit_row.push(i);
            }
        }
        Ok(StandardForm {
            n_vars: n,
            rows,
            rhs,
            slack,
            artificial,
            unit_row,
            cols: next_artificial,
            first_artificial,
        })
    }

    /// Column `c` of row `i`.
    fn entry(&self, i: usize, c: usize) -> Rational {
        if c < self.n_vars {
            return self.rows[i][c].clone();
        }
        if self.unit_row[c - self.n_vars] != i {
            return Rational::zero();
        }
        match self.slack[i] {
            Some((s, sign)) if s == c => integer(sign),
            _ => integer(1),
        }
    }

    fn phase_one_cost(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|c| integer(i64::from(c >= self.first_artificial)))
            .collect()
    }

    /// The basic solution of `basis` when it satisfies the program exactly.
    fn certify_point(&self, lp: &LinearProgram, basis: &[usize]) -> Option<Vec<Rational>> {
        // rows whose slack or artificial is nonbasic hold with equality
        let mut covered = vec![false; self.rows.len()];
        for &c in basis.iter().filter(|&&c| c >= self.n_vars) {
            covered[self.unit_row[c - self.n_vars]] = true;
        }
        let structural: Vec<usize> = basis.iter().copied().filter(|&c| c < self.n_vars).collect();
        let system: Vec<Vec<Rational>> = (0..self.rows.len())
            .filter(|&i| !covered[i])
            .map(|i| {
                let mut row: Vec<Rational> = structural
                    .iter()
                    .map(|&j| self.rows[i][j].clone())
                    .collect();
                row.push(self.rhs[i].clone());
                row
            })
            .collect();
        let values = solve(system, structural.len())?;
        let mut x = vec![Rational::zero(); self.n_vars];
        for (&j, v) in structural.iter().zip(values) {
            x[j] = v;
        }
        lp.is_feasible(&x).then_some(x)
    }

    /// Dual vector priced by `basis` whose reduced costs are non-negative on
    /// every `allowed` column, or `None` when the basis does not yield one.
    fn dual(
        &self,
        basis: &[usize],
        cost: &[Rational],
        allowed: impl Fn(usize) -> bool,
    ) -> Option<Vec<Rational>> {
        let m = self.rows.len();
        let mut fixed: Vec<Option<Rational>> = vec![None; m];
        for &c in basis.iter().filter(|&&c| c >= self.n_vars) {
            let i = self.unit_row[c - self.n_vars];
            fixed[i] = Some(&cost[c] / self.entry(i, c));
        }
        let free: Vec<usize> = (0..m).filter(|&i| fixed[i].is_none()).collect();
        let system: Vec<Vec<Rational>> = basis
            .iter()
            .filter(|&&c| c < self.n_vars)
            .map(|&j| {
                let known: Rational = (0..m)
                    .filter(|&i| !self.rows[i][j].is_zero())
                    .filter_map(|i| fixed[i].as_ref().map(|y| y * &self.rows[i][j]))
                    .sum();
                let mut row: Vec<Rational> =
                    free.iter().map(|&i| self.rows[i][j].clone()).collect();
                row.push(&cost[j] - known);
                row
            })
            .collect();
        let values = solve(system, free.len())?;
        let mut y: Vec<Rational> = fixed
            .into_iter()
            .map(|v| v.unwrap_or_else(Rational::zero))
            .collect();
        for (&i, v) in free.iter().zip(values) {
            y[i] = v;
        }
        let dual_feasible = (0..self.cols).filter(|&c| allowed(c)).all(|c| {
            let priced: Rational = if c < self.n_vars {
                (0..m)
                    .filter(|&i| !self.rows[i][c].is_zero() && !y[i].is_zero())
                    .map(|i| &y[i] * &self.rows[i][c])
                    .sum()
            } else {
                let i = self.unit_row[c - self.n_vars];
                &y[i] * self.entry(i, c)
            };
            cost[c] >= priced
        });
        dual_feasible.then_some(y)
    }

    /// Farkas certificate: a dual bound on the phase-one optimum above zero.
    fn certify_infeasible(&self, basis: &[usize]) -> bool {
        self.dual(basis, &self.phase_one_cost(), |_| true)
            .is_some_and(|y| dot(&self.rhs, &y).is_positive())
    }
}

/// Some solution of the augmented system (free unknowns set to zero), or
/// `None` when it is inconsistent.
fn solve(mut rows: Vec<Vec<Rational>>, unknowns: usize) -> Option<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for v in rows[r].iter_mut().filter(|v| !v.is_zero()) {
            *v /= &pivot;
        }
        let pivot_row = rows[r].clone();
        let support: Vec<usize> = (0..=unknowns)
            .filter(|&k| !pivot_row[k].is_zero())
            .collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for &k in &support {
                    row[k] -= &factor * &pivot_row[k];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); unknowns];
    for (row, &c) in rows.iter().zip(&pivots) {
        x[c] = row[unknowns].clone();
    }
    Some(x)
}

/// Field the tableau pivots over.
trait Scalar: Clone {
    fn from_rational(v: &Rational) -> Self;
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    /// Strictly below `other`, beyond round-off.
    fn below(&self, other: &Self) -> bool;
    fn magnitude(&self) -> f64;
    fn quotient(&self, by: &Self) -> Self;
    /// `self -= factor * v`
    fn subtract(&mut self, factor: &Self, v: &Self);
}

const TOLERANCE: f64 = 1e-11;

impl Scalar for f64 {
    fn from_rational(v: &Rational) -> Self {
        to_f64(v)
    }
    fn nil() -> Self {
        0.0
    }
    fn is_nil(&self) -> bool {
        self.abs() <= TOLERANCE
    }
    fn is_pos(&self) -> bool {
        *self > TOLERANCE
    }
    fn is_neg(&self) -> bool {
        *self < -TOLERANCE
    }
    fn below(&self, other: &Self) -> bool {
        *self < other - TOLERANCE
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn quotient(&self, by: &Self) -> Self {
        self / by
    }
    fn subtract(&mut self, factor: &Self, v: &Self) {
        *self -= factor * v;
    }
}

impl Scalar for Rational {
    fn from_rational(v: &Rational) -> Self {
        v.clone()
    }
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn below(&self, other: &Self) -> bool {
        self < other
    }
    fn magnitude(&self) -> f64 {
        to_f64(&self.abs())
    }
    fn quotient(&self, by: &Self) -> Self {
        self / by
    }
    fn subtract(&mut self, factor: &Self, v: &Self) {
        *self -= factor * v;
    }
}

enum Status {
    Optimal,
    Unbounded,
}

enum PhaseOne<S> {
    /// Basic feasible solution with every artificial out of the basis.
    Feasible(Tableau<S>),
    /// Optimal phase-one basis with a positive artificial sum.
    Infeasible(Tableau<S>),
}

struct Tableau<S> {
    /// Each row holds `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<S>>,
    /// Reduced costs followed by the negated objective value.
    objective: Vec<S>,
    basis: Vec<usize>,
    cols: usize,
    first_artificial: usize,
    max_pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn phase_one(form: &StandardForm) -> Result<PhaseOne<S>, LpError> {
        let cols = form.cols;
        let mut rows = Vec::with_capacity(form.rows.len());
        let mut basis = Vec::with_capacity(form.rows.len());
        for i in 0..form.rows.len() {
            let mut row = vec![S::nil(); cols + 1];
            for (v, c) in row.iter_mut().zip(&form.rows[i]) {
                *v = S::from_rational(c);
            }
            for c in form.slack[i]
                .map(|(c, _)| c)
                .into_iter()
                .chain(form.artificial[i])
            {
                row[c] = S::from_rational(&form.entry(i, c));
            }
            row[cols] = S::from_rational(&form.rhs[i]);
            rows.push(row);
            basis.push(
                form.artificial[i]
                    .or(form.slack[i].map(|(c, _)| c))
                    .expect("every row has a slack or an artificial"),
            );
        }
        let m = rows.len();
        let mut tableau = Tableau {
            rows,
            objective: Vec::new(),
            basis,
            cols,
            first_artificial: form.first_artificial,
            max_pivots: 50 * (cols + m + 1),
        };
        if form.first_artificial < cols {
            let cost: Vec<S> = form.phase_one_cost().iter().map(S::from_rational).collect();
            match tableau.optimize(&cost, |_| true)? {
                Status::Optimal => {}
                // the objective is bounded below by zero, so only round-off gets here
                Status::Unbounded => return Err(LpError::Breakdown),
            }
            // the objective entry holds minus the artificial sum
            if tableau.objective[cols].is_neg() {
                return Ok(PhaseOne::Infeasible(tableau));
            }
            tableau.evict_artificials();
        }
        Ok(PhaseOne::Feasible(tableau))
    }

    /// Pivots zero-valued artificials out of the basis; rows where that is
    /// impossible are redundant and dropped.
    fn evict_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                let entering = (0..self.first_artificial)
                    .filter(|&c| !self.rows[r][c].is_nil())
                    .max_by(|&a, &b| {
                        let (a, b) = (&self.rows[r][a], &self.rows[r][b]);
                        a.magnitude().total_cmp(&b.magnitude())
                    });
                match entering {
                    Some(c) => {
                        // zero up to round-off; a small pivot would spread
                        // the residue into every other row
                        self.rows[r][self.cols] = S::nil();
                        self.pivot(r, c);
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    /// Reduced costs of `cost` against the current basis.
    fn price(&mut self, cost: &[S]) {
        let mut objective = cost.to_vec();
        objective.push(S::nil());
        for (&b, row) in self.basis.iter().zip(&self.rows) {
            if !cost[b].is_nil() {
                for (o, v) in objective.iter_mut().zip(row) {
                    o.subtract(&cost[b], v);
                }
            }
        }
        self.objective = objective;
    }

    fn optimize(&mut self, cost: &[S], allowed: impl Fn(usize) -> bool) -> Result<Status, LpError> {
        self.price(cost);
        for _ in 0..self.max_pivots {
            let entering = (0..self.cols)
                .find(|&c| allowed(c) && self.objective[c].is_neg() && !self.basis.contains(&c));
            let Some(c) = entering else {
                return Ok(Status::Optimal);
            };

            let mut leaving: Option<(usize, S)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_pos() {
                    let ratio = row[self.cols].quotient(&row[c]);
                    let better = match &leaving {
                        None => true,
                        Some((best, best_ratio)) => {
                            ratio.below(best_ratio)
                                || (!best_ratio.below(&ratio) && self.basis[r] < self.basis[*best])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(Status::Unbounded),
            }
        }
        Err(LpError::IterationLimit(self.max_pivots))
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_nil() {
                *v = v.quotient(&p);
            }
        }
        let pivot_row = self.rows[r].clone();
        let support: Vec<usize> = (0..pivot_row.len())
            .filter(|&k| !pivot_row[k].is_nil())
            .collect();
        let eliminate = |row: &mut Vec<S>| {
            let factor = row[c].clone();
            if !factor.is_nil() {
                for &k in &support {
                    row[k].subtract(&factor, &pivot_row[k]);
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        if !self.objective.is_empty() {
            eliminate(&mut self.objective);
        }
        self.basis[r] = c;
    }

    fn primal(&self, n_vars: usize) -> Vec<S> {
        let mut x = vec![S::nil(); n_vars];
        for (&b, row) in self.basis.iter().zip(&self.rows) {
            if b < n_vars {
                x[b] = row[self.cols].clone();
            }
        }
        x
    }
}
