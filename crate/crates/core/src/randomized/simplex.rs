//! Dense tableau simplex for `max c·x` subject to `A x <= b`, `x >= 0`
//! (slack basis, `b >= 0`) or `A x = b` given a starting unit basis.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub(crate) trait Field: Clone + Debug + PartialOrd {
    fn nought() -> Self;
    fn unit() -> Self;
    /// Strictly positive beyond the field's tolerance.
    fn positive(&self) -> bool;
    fn negligible(&self) -> bool;
    /// Large enough to pivot on.
    fn pivotable(&self) -> bool;
    /// Primal infeasibility tolerated by the ratio test.
    fn slack() -> Self;
    fn magnitude(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
}

const EPS: f64 = 1e-10;
const PIVOT_EPS: f64 = 1e-7;
const FEASIBILITY_EPS: f64 = 1e-9;

impl Field for f64 {
    fn nought() -> Self {
        0.0
    }
    fn unit() -> Self {
        1.0
    }
    fn positive(&self) -> bool {
        *self > EPS
    }
    fn negligible(&self) -> bool {
        self.abs() <= EPS
    }
    fn pivotable(&self) -> bool {
        *self > PIVOT_EPS
    }
    fn slack() -> Self {
        FEASIBILITY_EPS
    }
    fn magnitude(&self) -> Self {
        self.abs()
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
}

impl Field for Rational {
    fn nought() -> Self {
        <Rational as Zero>::zero()
    }
    fn unit() -> Self {
        <Rational as One>::one()
    }
    fn positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn negligible(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pivotable(&self) -> bool {
        Signed::is_positive(self)
    }
    fn slack() -> Self {
        <Rational as Zero>::zero()
    }
    fn magnitude(&self) -> Self {
        Signed::abs(self)
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
}

/// Sparse constraint row: `(column, coefficient)` pairs.
pub(crate) type Row<F> = Vec<(usize, F)>;

#[derive(Debug)]
pub(crate) enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

pub(crate) struct Tableau<F> {
    rows: usize,
    /// Columns that may enter the basis; the right-hand side follows them.
    columns: usize,
    data: Vec<Vec<F>>,
    /// Reduced costs `c_j - z_j` for every column, and `-z` last.
    objective: Vec<F>,
    pub(crate) basis: Vec<usize>,
    pub(crate) pivots: usize,
}

impl<F: Field> Tableau<F> {
    /// `A x <= b` with one slack column per row after the structural ones.
    #[cfg(test)]
    pub(crate) fn new(cols: usize, c: &[F], rows_a: &[Row<F>], b: &[F]) -> Self {
        let rows = rows_a.len();
        let with_slacks: Vec<Row<F>> = rows_a
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let mut row = row.clone();
                row.push((cols + r, F::unit()));
                row
            })
            .collect();
        let mut costs = c.to_vec();
        costs.resize(cols + rows, F::nought());
        Self::canonical(&costs, &with_slacks, b, (cols..cols + rows).collect())
    }

    /// `A x = b` where column `basis[r]` is the unit vector of row `r` and
    /// `b >= 0`.
    pub(crate) fn canonical(c: &[F], rows_a: &[Row<F>], b: &[F], basis: Vec<usize>) -> Self {
        let rows = rows_a.len();
        let columns = c.len();
        let mut data = Vec::with_capacity(rows);
        for (r, row) in rows_a.iter().enumerate() {
            let mut dense = vec![F::nought(); columns + 1];
            for (j, a) in row {
                dense[*j] = dense[*j].add(a);
            }
            dense[columns] = b[r].clone();
            data.push(dense);
        }
        let mut objective = c.to_vec();
        objective.push(F::nought());
        for (r, &j) in basis.iter().enumerate() {
            let cost = c[j].clone();
            if cost.negligible() {
                continue;
            }
            for (k, v) in data[r].iter().enumerate() {
                objective[k] = objective[k].sub(&cost.mul(v));
            }
        }
        Tableau {
            rows,
            columns,
            data,
            objective,
            basis,
            pivots: 0,
        }
    }

    pub(crate) fn pivot(&mut self, row: usize, col: usize) {
        let rhs = self.columns;
        let inv = F::unit().div(&self.data[row][col]);
        let pivot_row: Vec<F> = self.data[row].iter().map(|x| x.mul(&inv)).collect();
        let nonzero: Vec<usize> = (0..=rhs).filter(|&j| !pivot_row[j].negligible()).collect();
        for (r, line) in self.data.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = line[col].clone();
            if factor.negligible() {
                continue;
            }
            for &j in &nonzero {
                line[j] = line[j].sub(&factor.mul(&pivot_row[j]));
            }
            line[col] = F::nought();
            // ratio-test slack may leave tiny negative values behind
            if line[rhs] < F::nought() && !(line[rhs].add(&F::slack()) < F::nought()) {
                line[rhs] = F::nought();
            }
        }
        let factor = self.objective[col].clone();
        if !factor.negligible() {
            for &j in &nonzero {
                self.objective[j] = self.objective[j].sub(&factor.mul(&pivot_row[j]));
            }
            self.objective[col] = F::nought();
        }
        self.data[row] = pivot_row;
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Leaving row for an entering column, by a two-pass ratio test: the
    /// longest step that keeps every basic value above `-slack`, then among
    /// the rows blocking within that step the largest pivot element (or, in
    /// Bland mode, the smallest basic variable among the numerically safe
    /// pivots). Exact fields have zero slack, where this is the textbook
    /// minimum ratio.
    fn ratio_row(&self, col: usize, bland: bool) -> Option<usize> {
        let rhs = self.columns;
        let zero = F::nought();
        let value = |r: usize| {
            let v = &self.data[r][rhs];
            if *v < zero {
                zero.clone()
            } else {
                v.clone()
            }
        };
        let rows: Vec<usize> = (0..self.rows).filter(|&r| self.data[r][col].positive()).collect();
        let step = rows
            .iter()
            .map(|&r| value(r).add(&F::slack()).div(&self.data[r][col]))
            .fold(None, |m: Option<F>, q| match m {
                Some(m) if !(q < m) => Some(m),
                _ => Some(q),
            })?;
        rows.into_iter()
            .filter(|&r| !(value(r).div(&self.data[r][col]) > step))
            .min_by(|&p, &q| {
                let stable = self.data[q][col]
                    .pivotable()
                    .cmp(&self.data[p][col].pivotable());
                let by_index = stable.then(self.basis[p].cmp(&self.basis[q]));
                if bland {
                    by_index
                } else {
                    self.data[q][col]
                        .partial_cmp(&self.data[p][col])
                        .unwrap_or(Ordering::Equal)
                        .then(by_index)
                }
            })
    }

    /// Brings `col` into the basis at its ratio-test row, if it has one.
    pub(crate) fn try_enter(&mut self, col: usize) -> bool {
        match self.ratio_row(col, false) {
            Some(row) => {
                self.pivot(row, col);
                true
            }
            None => false,
        }
    }

    /// Primal simplex. Dantzig's rule, switching to Bland's rule after a
    /// run of degenerate pivots so cycling cannot occur.
    pub(crate) fn solve(&mut self, max_pivots: usize) -> Outcome {
        let rhs = self.columns;
        let mut stalled = 0usize;
        let mut last = self.objective[rhs].clone();
        loop {
            if self.pivots >= max_pivots {
                return Outcome::IterationLimit;
            }
            let bland = stalled > 50;
            let entering = if bland {
                (0..self.columns).find(|&j| self.objective[j].positive())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.columns {
                    if self.objective[j].positive()
                        && best.is_none_or(|b| self.objective[j] > self.objective[b])
                    {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return Outcome::Optimal;
            };
            let Some(row) = self.ratio_row(col, bland) else {
                return Outcome::Unbounded;
            };
            self.pivot(row, col);
            let now = self.objective[rhs].clone();
            if now.sub(&last).negligible() {
                stalled += 1;
            } else {
                stalled = 0;
            }
            last = now;
        }
    }

    /// Values of every column, slacks included.
    #[cfg(test)]
    pub(crate) fn values(&self) -> Vec<F> {
        let mut x = vec![F::nought(); self.columns];
        for (r, &j) in self.basis.iter().enumerate() {
            x[j] = self.data[r][self.columns].clone();
        }
        x
    }

    #[cfg(test)]
    pub(crate) fn objective_value(&self) -> F {
        F::nought().sub(&self.objective[self.columns])
    }
}

/// Primal and dual values of an `A x <= b` basis given by its basic
/// columns (structural below `cols`, slack `cols + r` for row `r`): solves
/// the square systems on the rows whose slacks are nonbasic. `None` when
/// the basis has the wrong size or is singular.
pub(crate) fn basic_solution<F: Field>(
    cols: usize,
    c: &[F],
    rows_a: &[Row<F>],
    b: &[F],
    basis: &[usize],
) -> Option<(Vec<F>, Vec<F>)> {
    let m = rows_a.len();
    let structural: Vec<usize> = basis.iter().copied().filter(|&j| j < cols).collect();
    let mut basic_slack = vec![false; m];
    for &j in basis.iter().filter(|&&j| j >= cols) {
        basic_slack[j - cols] = true;
    }
    let tight: Vec<usize> = (0..m).filter(|&r| !basic_slack[r]).collect();
    if tight.len() != structural.len() {
        return None;
    }
    let k = structural.len();
    let mut pos = vec![None; cols];
    for (i, &j) in structural.iter().enumerate() {
        pos[j] = Some(i);
    }
    // matrix[i][l] = A[tight[i]][structural[l]]
    let mut matrix = vec![vec![F::nought(); k]; k];
    for (i, &r) in tight.iter().enumerate() {
        for (j, a) in &rows_a[r] {
            if let Some(l) = pos[*j] {
                matrix[i][l] = matrix[i][l].add(a);
            }
        }
    }
    let transposed: Vec<Vec<F>> = (0..k)
        .map(|l| (0..k).map(|i| matrix[i][l].clone()).collect())
        .collect();
    let x_basic = solve_square(matrix, tight.iter().map(|&r| b[r].clone()).collect())?;
    let y_tight = solve_square(transposed, structural.iter().map(|&j| c[j].clone()).collect())?;
    let mut x = vec![F::nought(); cols];
    for (l, &j) in structural.iter().enumerate() {
        x[j] = x_basic[l].clone();
    }
    let mut y = vec![F::nought(); m];
    for (i, &r) in tight.iter().enumerate() {
        y[r] = y_tight[i].clone();
    }
    Some((x, y))
}

/// Exact optimality certificate for a basis: its primal solution is
/// feasible and its duals are nonnegative with no positive reduced cost.
/// Returns the structural solution and the duals.
pub(crate) fn certify_basis(
    cols: usize,
    c: &[Rational],
    rows_a: &[Row<Rational>],
    b: &[Rational],
    basis: &[usize],
) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let (x, y) = basic_solution(cols, c, rows_a, b, basis)?;
    if x.iter().chain(&y).any(Signed::is_negative) {
        return None;
    }
    for (r, row) in rows_a.iter().enumerate() {
        let lhs: Rational = row.iter().map(|(j, a)| a * &x[*j]).sum();
        if lhs > b[r] {
            return None;
        }
    }
    let mut reduced = c.to_vec();
    for (r, row) in rows_a.iter().enumerate() {
        if y[r].is_zero() {
            continue;
        }
        for (j, a) in row {
            reduced[*j] -= &y[r] * a;
        }
    }
    if reduced.iter().any(Signed::is_positive) {
        return None;
    }
    Some((x, y))
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Option<Vec<F>> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k)
            .filter(|&r| !a[r][col].negligible())
            .max_by(|&p, &q| {
                a[p][col]
                    .magnitude()
                    .partial_cmp(&a[q][col].magnitude())
                    .unwrap_or(Ordering::Equal)
                    .then(q.cmp(&p))
            })?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = F::unit().div(&a[col][col]);
        for j in col..k {
            a[col][j] = a[col][j].mul(&inv);
        }
        b[col] = b[col].mul(&inv);
        let pivot_row = a[col].clone();
        let pivot_b = b[col].clone();
        for r in 0..k {
            if r == col || a[r][col].negligible() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in col..k {
                if !pivot_row[j].negligible() {
                    a[r][j] = a[r][j].sub(&factor.mul(&pivot_row[j]));
                }
            }
            b[r] = b[r].sub(&factor.mul(&pivot_b));
        }
    }
    Some(b)
}
