//! Dense exact-rational primal simplex for `max c·y  s.t.  A y ≤ b, y ≥ 0`
//! with `b ≥ 0`, so the slack basis is feasible from the start.
//!
//! Bland's rule picks both the entering column (lowest index with positive
//! reduced cost) and the leaving row (lowest basic index among ratio ties),
//! which rules out cycling on the heavily degenerate matching polytopes.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("right-hand side of row {row} is negative")]
    NegativeRhs { row: usize },
    #[error("objective is unbounded along column {column}")]
    Unbounded { column: usize },
}

/// One `≤` row stored sparsely as `(column, coefficient)` pairs.
#[derive(Debug, Clone)]
pub struct Row {
    pub coefficients: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    /// Shadow price of every row; non-negative at optimum.
    pub duals: Vec<Rational>,
    /// Some non-basic column has zero reduced cost, so the optimal face is
    /// larger than a single vertex.
    pub multiple_optima: bool,
}

pub fn maximize(objective: &[Rational], rows: &[Row]) -> Result<LpSolution, LpError> {
    let n = objective.len();
    let m = rows.len();
    let width = n + m;

    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        if row.rhs.is_negative() {
            return Err(LpError::NegativeRhs { row: i });
        }
        let mut dense = vec![Rational::zero(); width];
        for (j, a) in &row.coefficients {
            dense[*j] += a;
        }
        dense[n + i] = Rational::from_integer(1.into());
        tableau.push(dense);
        rhs.push(row.rhs.clone());
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // Reduced costs; the slack basis has c_B = 0.
    let mut reduced: Vec<Rational> = objective
        .iter()
        .cloned()
        .chain(std::iter::repeat_n(Rational::zero(), m))
        .collect();
    let mut value = Rational::zero();

    while let Some(col) = (0..width).find(|&j| reduced[j].is_positive()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            let a = &tableau[i][col];
            if !a.is_positive() {
                continue;
            }
            let t = &rhs[i] / a;
            let better = match &best {
                None => true,
                Some(b) => t < *b || (t == *b && basis[i] < basis[leave.unwrap()]),
            };
            if better {
                best = Some(t);
                leave = Some(i);
            }
        }
        let r = leave.ok_or(LpError::Unbounded { column: col })?;

        let pivot = tableau[r][col].clone();
        for a in tableau[r].iter_mut() {
            if !a.is_zero() {
                *a /= &pivot;
            }
        }
        rhs[r] /= &pivot;
        let pivot_row = tableau[r].clone();
        let pivot_rhs = rhs[r].clone();
        for i in 0..m {
            if i == r || tableau[i][col].is_zero() {
                continue;
            }
            let f = tableau[i][col].clone();
            for (a, p) in tableau[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &f * p;
                }
            }
            rhs[i] -= &f * &pivot_rhs;
        }
        let f = reduced[col].clone();
        for (d, p) in reduced.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *d -= &f * p;
            }
        }
        value += &f * &pivot_rhs;
        basis[r] = col;
    }

    let mut x = vec![Rational::zero(); n];
    let mut is_basic = vec![false; width];
    for (i, &b) in basis.iter().enumerate() {
        is_basic[b] = true;
        if b < n {
            x[b] = rhs[i].clone();
        }
    }
    let duals = (0..m).map(|i| -reduced[n + i].clone()).collect();
    let multiple_optima = (0..width).any(|j| !is_basic[j] && reduced[j].is_zero());
    Ok(LpSolution {
        x,
        objective: value,
        duals,
        multiple_optima,
    })
}
