//! Dense two-phase simplex for small linear programs in standard form
//! (`min c'x` subject to `Ax = b`, `x >= 0`).
//!
//! Two arithmetic modes share the one implementation: exact [`Rational`]
//! pivoting (the default, giving certified optima) and `f64` with a pivot
//! tolerance (faster, results must be re-verified exactly by the caller).
//! Bland's rule is used for both entering and leaving variables, so the
//! iteration cannot cycle and identical inputs always produce identical
//! pivot sequences.

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub trait LpScalar: Clone + PartialOrd + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Magnitude small enough to treat as zero when pivoting.
    fn negligible(&self) -> bool;

    fn is_negative(&self) -> bool {
        *self < Self::zero() && !self.negligible()
    }
}

impl LpScalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn negligible(&self) -> bool {
        self.is_zero()
    }
}

const F64_PIVOT_TOL: f64 = 1e-9;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn negligible(&self) -> bool {
        self.abs() <= F64_PIVOT_TOL
    }
}

/// `min objective . x` subject to `rows . x = rhs`, `x >= 0`.
#[derive(Clone, Debug)]
pub struct StandardLp<T> {
    pub objective: Vec<T>,
    pub rows: Vec<Vec<T>>,
    pub rhs: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpOutcome<T> {
    pub status: LpStatus,
    /// Objective at the returned point; present for `Optimal` and
    /// `IterationLimit` (the best basic feasible point reached).
    pub objective_value: Option<T>,
    pub solution: Vec<T>,
    pub iterations: usize,
}

struct Tableau<T> {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    data: Vec<Vec<T>>,
    /// Reduced-cost row; last entry is minus the current objective value.
    cost: Vec<T>,
    /// Basic variable of each row.
    basis: Vec<usize>,
    cols: usize,
    iterations: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.data[row][col].clone();
        for v in self.data[row].iter_mut() {
            *v = v.div(&piv);
        }
        for r in 0..self.data.len() {
            if r == row || self.data[r][col].negligible() {
                continue;
            }
            let factor = self.data[r][col].clone();
            for c in 0..=self.cols {
                let delta = factor.mul(&self.data[row][c]);
                self.data[r][c] = self.data[r][c].sub(&delta);
            }
        }
        if !self.cost[col].negligible() {
            let factor = self.cost[col].clone();
            for c in 0..=self.cols {
                let delta = factor.mul(&self.data[row][c]);
                self.cost[c] = self.cost[c].sub(&delta);
            }
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Bland's rule: enter the lowest-index column with negative reduced
    /// cost; leave by minimum ratio, ties broken toward the lowest basic
    /// variable index. Returns the status of the phase.
    fn run(&mut self, enterable: &[bool], max_iterations: usize) -> LpStatus {
        loop {
            if self.iterations >= max_iterations {
                return LpStatus::IterationLimit;
            }
            let entering = (0..self.cols)
                .find(|&j| enterable[j] && self.cost[j].is_negative());
            let entering = match entering {
                Some(j) => j,
                None => return LpStatus::Optimal,
            };
            let mut leaving: Option<(usize, T)> = None;
            for r in 0..self.data.len() {
                let a = &self.data[r][entering];
                if *a <= T::zero() || a.negligible() {
                    continue;
                }
                let ratio = self.data[r][self.cols].div(a);
                let replace = match &leaving {
                    None => true,
                    Some((best_r, best_ratio)) => {
                        let diff = ratio.sub(best_ratio);
                        diff.is_negative()
                            || (diff.negligible() && self.basis[r] < self.basis[*best_r])
                    }
                };
                if replace {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, entering),
                None => return LpStatus::Unbounded,
            }
        }
    }
}

/// Solves the standard-form program with the two-phase method.
pub fn solve_standard<T: LpScalar>(lp: &StandardLp<T>, max_iterations: usize) -> LpOutcome<T> {
    let m = lp.rows.len();
    let n = lp.objective.len();
    assert_eq!(lp.rhs.len(), m);
    assert!(lp.rows.iter().all(|r| r.len() == n));

    // Phase 1 tableau: structural columns, one artificial per row, rhs >= 0.
    let cols = n + m;
    let mut data = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let negate = lp.rhs[i].is_negative();
        let mut r: Vec<T> = Vec::with_capacity(cols + 1);
        for v in row {
            r.push(if negate { v.neg() } else { v.clone() });
        }
        for k in 0..m {
            r.push(if k == i { T::one() } else { T::zero() });
        }
        r.push(if negate {
            lp.rhs[i].neg()
        } else {
            lp.rhs[i].clone()
        });
        data.push(r);
    }
    // Phase-1 reduced costs: minimize the artificial sum, whose cost row is
    // minus the column sums over structural columns.
    let mut cost = vec![T::zero(); cols + 1];
    for j in 0..=cols {
        let mut s = T::zero();
        for row in data.iter() {
            s = s.add(&row[j]);
        }
        cost[j] = cost[j].sub(&s);
    }
    for k in 0..m {
        cost[n + k] = T::zero();
    }
    let mut t = Tableau {
        data,
        cost,
        basis: (n..n + m).collect(),
        cols,
        iterations: 0,
    };

    let enterable: Vec<bool> = (0..cols).map(|j| j < n).collect();
    let status = t.run(&enterable, max_iterations);
    if status == LpStatus::IterationLimit {
        return LpOutcome {
            status,
            objective_value: None,
            solution: vec![T::zero(); n],
            iterations: t.iterations,
        };
    }
    // Artificial mass that cannot be driven to zero means infeasibility.
    let phase1_value = t.cost[cols].neg();
    if !phase1_value.negligible() {
        return LpOutcome {
            status: LpStatus::Infeasible,
            objective_value: None,
            solution: vec![T::zero(); n],
            iterations: t.iterations,
        };
    }

    // Remove artificials from the basis: pivot them out on any structural
    // column, or drop the row as redundant.
    let mut r = 0;
    while r < t.data.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.data[r][j].negligible()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.data.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2: truncate the artificial columns and install the real
    // objective, reduced by the current basis.
    for row in t.data.iter_mut() {
        let rhs = row.pop().expect("row has rhs");
        row.truncate(n);
        row.push(rhs);
    }
    t.cols = n;
    let mut cost: Vec<T> = lp
        .objective
        .iter()
        .cloned()
        .chain(std::iter::once(T::zero()))
        .collect();
    for (r, &b) in t.basis.iter().enumerate() {
        if cost[b].negligible() {
            continue;
        }
        let factor = cost[b].clone();
        for c in 0..=n {
            let delta = factor.mul(&t.data[r][c]);
            cost[c] = cost[c].sub(&delta);
        }
    }
    t.cost = cost;

    let enterable = vec![true; n];
    let status = t.run(&enterable, max_iterations);

    let mut solution = vec![T::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            solution[b] = t.data[r][t.cols].clone();
        }
    }
    let objective_value = match status {
        LpStatus::Optimal | LpStatus::IterationLimit => Some(t.cost[t.cols].neg()),
        _ => None,
    };
    LpOutcome {
        status,
        objective_value,
        solution,
        iterations: t.iterations,
    }
}
