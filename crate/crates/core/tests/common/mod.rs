//! Test-only oracles, kept independent of the solver implementations they
//! check.
//!
//! The LP oracle enumerates candidate vertices as exact solutions of
//! n-subsets of tight constraints (Gaussian elimination, no tableau, no
//! pivoting rules) and scans them; on bounded feasible regions this is a
//! complete optimizer and a complete feasibility decider.

// Shared between test binaries; each uses a subset.
#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use std::sync::Arc;

use tradenet::coords::{IndexSet, RatVec};
use tradenet::lp::{LinearProgram, Relation, Sense};
use tradenet::rat::Rat;

/// One row of the oracle's constraint list: coeffs · x (rel) rhs.
#[derive(Clone)]
pub struct OracleRow {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// Flatten a LinearProgram (bounds become rows) for the oracle.
pub fn flatten(lp: &LinearProgram) -> Vec<OracleRow> {
    let n = lp.num_vars();
    let mut rows: Vec<OracleRow> = lp
        .constraints
        .iter()
        .map(|c| OracleRow {
            coeffs: (0..n).map(|j| c.coeffs.get(j).clone()).collect(),
            relation: c.relation,
            rhs: c.rhs.clone(),
        })
        .collect();
    for j in 0..n {
        if let Some(l) = &lp.lower[j] {
            let mut coeffs = vec![Rat::zero(); n];
            coeffs[j] = Rat::one();
            rows.push(OracleRow {
                coeffs,
                relation: Relation::Ge,
                rhs: l.clone(),
            });
        }
        if let Some(u) = &lp.upper[j] {
            let mut coeffs = vec![Rat::zero(); n];
            coeffs[j] = Rat::one();
            rows.push(OracleRow {
                coeffs,
                relation: Relation::Le,
                rhs: u.clone(),
            });
        }
    }
    rows
}

/// Solve a square exact linear system; None when singular.
fn solve_square(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = a[col][c].clone() * &inv;
        }
        b[col] = b[col].clone() * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    let delta = factor.clone() * &a[col][c];
                    a[r][c] -= &delta;
                }
                let delta = factor * &b[col];
                b[r] -= &delta;
            }
        }
    }
    Some(b)
}

fn satisfies(rows: &[OracleRow], x: &[Rat]) -> bool {
    rows.iter().all(|row| {
        let lhs: Rat = row
            .coeffs
            .iter()
            .zip(x)
            .map(|(a, v)| a.clone() * v)
            .sum();
        match row.relation {
            Relation::Le => lhs <= row.rhs,
            Relation::Eq => lhs == row.rhs,
            Relation::Ge => lhs >= row.rhs,
        }
    })
}

/// All feasible vertices of the flattened system (bounded regions only:
/// callers must box every variable). Exponential and proud of it.
pub fn feasible_vertices(rows: &[OracleRow], n: usize) -> Vec<Vec<Rat>> {
    let m = rows.len();
    let mut vertices: Vec<Vec<Rat>> = Vec::new();
    let mut choice: Vec<usize> = (0..n).collect();
    if n == 0 {
        return if satisfies(rows, &[]) {
            vec![vec![]]
        } else {
            vec![]
        };
    }
    if m < n {
        return vec![];
    }
    loop {
        let a: Vec<Vec<Rat>> = choice
            .iter()
            .map(|&i| rows[i].coeffs.clone())
            .collect();
        let b: Vec<Rat> = choice.iter().map(|&i| rows[i].rhs.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if satisfies(rows, &x) && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
        // Next lexicographic n-combination of 0..m.
        let mut i = n;
        loop {
            if i == 0 {
                return vertices;
            }
            i -= 1;
            if choice[i] < m - (n - i) {
                choice[i] += 1;
                for k in i + 1..n {
                    choice[k] = choice[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Oracle verdict for a boxed program: the exact optimum, or None when
/// infeasible.
pub fn oracle_optimum(lp: &LinearProgram) -> Option<Rat> {
    let n = lp.num_vars();
    for j in 0..n {
        assert!(
            lp.lower[j].is_some() && lp.upper[j].is_some(),
            "oracle requires boxed variables"
        );
    }
    let rows = flatten(lp);
    let vertices = feasible_vertices(&rows, n);
    let objective = |x: &[Rat]| -> Rat {
        (0..n)
            .map(|j| lp.objective.get(j).clone() * &x[j])
            .sum()
    };
    let mut best: Option<Rat> = None;
    for v in &vertices {
        let val = objective(v);
        let better = match (&best, lp.sense) {
            (None, _) => true,
            (Some(b), Sense::Maximize) => val > *b,
            (Some(b), Sense::Minimize) => val < *b,
        };
        if better {
            best = Some(val);
        }
    }
    best
}

pub fn rv(index: &Arc<IndexSet>, vals: &[Rat]) -> RatVec {
    RatVec::new(index.clone(), vals.to_vec()).unwrap()
}

pub fn vars(names: &[&str]) -> Arc<IndexSet> {
    IndexSet::new(names.iter().copied()).unwrap()
}
