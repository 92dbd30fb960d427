//! Exact rational linear programming with primal and dual certificates.
//!
//! Two-phase primal simplex over arbitrary-precision rationals with Bland's
//! anti-cycling rule. Every `Optimal` result carries dual multipliers that
//! are verified against the KKT conditions before being returned; every
//! `Infeasible` result carries a Farkas certificate that is re-verified by
//! direct arithmetic. Identical inputs produce identical outputs.
//!
//! Dual convention (shadow prices): multipliers satisfy, for every variable
//! j, `Σ_i row_dual_i·a_ij + lower_dual_j + upper_dual_j = c_j`, and the
//! dual objective `Σ_i row_dual_i·b_i + Σ_j lower_dual_j·l_j +
//! Σ_j upper_dual_j·u_j` equals the optimum. For a maximization problem
//! duals on `≤` rows and upper bounds are ≥ 0, duals on `≥` rows and lower
//! bounds are ≤ 0; for minimization all signs flip.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::coords::{IndexSet, RatVec};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Eq => write!(f, "="),
            Relation::Ge => write!(f, ">="),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Constraint {
    pub coeffs: RatVec,
    pub relation: Relation,
    pub rhs: Rat,
}

/// A linear program over named variables. Variables are free unless bounds
/// are set explicitly.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: RatVec,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<Option<Rat>>,
    pub upper: Vec<Option<Rat>>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: RatVec) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    /// Feasibility program (zero objective) over the given variables.
    pub fn feasibility(vars: Arc<IndexSet>) -> Self {
        LinearProgram::new(Sense::Maximize, RatVec::zero(vars))
    }

    pub fn vars(&self) -> &Arc<IndexSet> {
        self.objective.index()
    }

    pub fn push(&mut self, coeffs: RatVec, relation: Relation, rhs: Rat) {
        debug_assert_eq!(coeffs.index(), self.objective.index());
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_lower(&mut self, var: usize, bound: Rat) {
        self.lower[var] = Some(bound);
    }

    pub fn set_upper(&mut self, var: usize, bound: Rat) {
        self.upper[var] = Some(bound);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

// Plain-text dump mirroring the fields; for debugging and error reports.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sense = match self.sense {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        };
        write!(f, "{sense} ")?;
        write_linear(f, &self.objective)?;
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for c in &self.constraints {
            write!(f, "  ")?;
            write_linear(f, &c.coeffs)?;
            writeln!(f, " {} {}", c.relation, c.rhs)?;
        }
        for (j, name) in self.vars().names().iter().enumerate() {
            match (&self.lower[j], &self.upper[j]) {
                (None, None) => writeln!(f, "  {name} free")?,
                (Some(l), None) => writeln!(f, "  {name} >= {l}")?,
                (None, Some(u)) => writeln!(f, "  {name} <= {u}")?,
                (Some(l), Some(u)) => writeln!(f, "  {l} <= {name} <= {u}")?,
            }
        }
        Ok(())
    }
}

fn write_linear(f: &mut fmt::Formatter<'_>, v: &RatVec) -> fmt::Result {
    let mut first = true;
    for (name, c) in v.iter() {
        if c.is_zero() {
            continue;
        }
        if first {
            write!(f, "{c}·{name}")?;
            first = false;
        } else if c.is_negative() {
            write!(f, " - {}·{name}", -c)?;
        } else {
            write!(f, " + {c}·{name}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Primal solution with verified dual multipliers.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub optimum: Rat,
    pub primal: RatVec,
    /// One multiplier per constraint, in input order.
    pub row_duals: Vec<Rat>,
    /// One multiplier per variable lower bound (zero where unbounded).
    pub lower_duals: Vec<Rat>,
    /// One multiplier per variable upper bound (zero where unbounded).
    pub upper_duals: Vec<Rat>,
}

/// Farkas certificate of infeasibility: a sign-respecting combination of the
/// constraints and bounds whose variable coefficients cancel exactly while
/// the combined right-hand side is negative.
#[derive(Debug, Clone, Serialize)]
pub struct Farkas {
    pub row_mults: Vec<Rat>,
    pub lower_mults: Vec<Rat>,
    pub upper_mults: Vec<Rat>,
}

#[derive(Debug, Clone, Serialize)]
pub enum LpResult {
    Optimal(Solution),
    Infeasible(Farkas),
    Unbounded,
}

impl LpResult {
    pub fn expect_optimal(&self) -> &Solution {
        match self {
            LpResult::Optimal(s) => s,
            other => panic!("expected optimal LP result, got {other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible(RatVec),
    Infeasible(Farkas),
}

/// Verify a claimed optimal solution: primal feasibility, dual sign
/// conditions, stationarity, complementary slackness, and exact strong
/// duality. Returns a description of the first violation.
pub fn verify_optimal(lp: &LinearProgram, sol: &Solution) -> Result<(), String> {
    let n = lp.num_vars();
    let x = &sol.primal;
    // Primal feasibility.
    for (i, c) in lp.constraints.iter().enumerate() {
        let lhs = c.coeffs.dot(x);
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs,
            Relation::Eq => lhs == c.rhs,
            Relation::Ge => lhs >= c.rhs,
        };
        if !ok {
            return Err(format!("primal violates constraint {i}"));
        }
    }
    for j in 0..n {
        if let Some(l) = &lp.lower[j] {
            if x.get(j) < l {
                return Err(format!("primal violates lower bound of var {j}"));
            }
        }
        if let Some(u) = &lp.upper[j] {
            if x.get(j) > u {
                return Err(format!("primal violates upper bound of var {j}"));
            }
        }
    }
    // Sign conditions. For Maximize: ≤ rows and upper bounds carry ≥ 0,
    // ≥ rows and lower bounds carry ≤ 0. Minimize flips every sign.
    let max = lp.sense == Sense::Maximize;
    let sign_ok = |r: &Rat, nonneg: bool| {
        if nonneg == max {
            !r.is_negative()
        } else {
            !r.is_positive()
        }
    };
    for (i, c) in lp.constraints.iter().enumerate() {
        let y = &sol.row_duals[i];
        let ok = match c.relation {
            Relation::Le => sign_ok(y, true),
            Relation::Ge => sign_ok(y, false),
            Relation::Eq => true,
        };
        if !ok {
            return Err(format!("row dual {i} has wrong sign"));
        }
    }
    for j in 0..n {
        if !sign_ok(&sol.lower_duals[j], false) {
            return Err(format!("lower dual {j} has wrong sign"));
        }
        if !sign_ok(&sol.upper_duals[j], true) {
            return Err(format!("upper dual {j} has wrong sign"));
        }
        if lp.lower[j].is_none() && !sol.lower_duals[j].is_zero() {
            return Err(format!("lower dual {j} nonzero without a bound"));
        }
        if lp.upper[j].is_none() && !sol.upper_duals[j].is_zero() {
            return Err(format!("upper dual {j} nonzero without a bound"));
        }
    }
    // Stationarity.
    for j in 0..n {
        let mut acc = sol.lower_duals[j].clone() + &sol.upper_duals[j];
        for (i, c) in lp.constraints.iter().enumerate() {
            acc += &(sol.row_duals[i].clone() * c.coeffs.get(j));
        }
        if acc != *lp.objective.get(j) {
            return Err(format!("stationarity fails at var {j}"));
        }
    }
    // Complementary slackness.
    for (i, c) in lp.constraints.iter().enumerate() {
        if !sol.row_duals[i].is_zero() && c.coeffs.dot(x) != c.rhs {
            return Err(format!("complementary slackness fails at row {i}"));
        }
    }
    for j in 0..n {
        if !sol.lower_duals[j].is_zero() && x.get(j) != lp.lower[j].as_ref().unwrap() {
            return Err(format!("complementary slackness fails at lower bound {j}"));
        }
        if !sol.upper_duals[j].is_zero() && x.get(j) != lp.upper[j].as_ref().unwrap() {
            return Err(format!("complementary slackness fails at upper bound {j}"));
        }
    }
    // Exact strong duality.
    let primal_obj = lp.objective.dot(x);
    if primal_obj != sol.optimum {
        return Err("reported optimum differs from c·x".to_string());
    }
    let mut dual_obj = Rat::zero();
    for (i, c) in lp.constraints.iter().enumerate() {
        dual_obj += &(sol.row_duals[i].clone() * &c.rhs);
    }
    for j in 0..n {
        if let Some(l) = &lp.lower[j] {
            dual_obj += &(sol.lower_duals[j].clone() * l);
        }
        if let Some(u) = &lp.upper[j] {
            dual_obj += &(sol.upper_duals[j].clone() * u);
        }
    }
    if dual_obj != sol.optimum {
        return Err(format!(
            "strong duality fails: dual objective {dual_obj}, optimum {}",
            sol.optimum
        ));
    }
    Ok(())
}

/// Verify a Farkas certificate by direct arithmetic.
pub fn verify_farkas(lp: &LinearProgram, cert: &Farkas) -> Result<(), String> {
    let n = lp.num_vars();
    if cert.row_mults.len() != lp.constraints.len()
        || cert.lower_mults.len() != n
        || cert.upper_mults.len() != n
    {
        return Err("certificate has wrong shape".to_string());
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        let m = &cert.row_mults[i];
        let ok = match c.relation {
            Relation::Le => !m.is_negative(),
            Relation::Ge => !m.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(format!("certificate multiplier {i} has wrong sign"));
        }
    }
    for j in 0..n {
        if cert.lower_mults[j].is_positive() {
            return Err(format!("lower-bound multiplier {j} must be ≤ 0"));
        }
        if cert.upper_mults[j].is_negative() {
            return Err(format!("upper-bound multiplier {j} must be ≥ 0"));
        }
        if lp.lower[j].is_none() && !cert.lower_mults[j].is_zero() {
            return Err(format!("lower multiplier {j} without a bound"));
        }
        if lp.upper[j].is_none() && !cert.upper_mults[j].is_zero() {
            return Err(format!("upper multiplier {j} without a bound"));
        }
    }
    for j in 0..n {
        let mut acc = cert.lower_mults[j].clone() + &cert.upper_mults[j];
        for (i, c) in lp.constraints.iter().enumerate() {
            acc += &(cert.row_mults[i].clone() * c.coeffs.get(j));
        }
        if !acc.is_zero() {
            return Err(format!("combined coefficient at var {j} is {acc}, not 0"));
        }
    }
    let mut rhs = Rat::zero();
    for (i, c) in lp.constraints.iter().enumerate() {
        rhs += &(cert.row_mults[i].clone() * &c.rhs);
    }
    for j in 0..n {
        if let Some(l) = &lp.lower[j] {
            rhs += &(cert.lower_mults[j].clone() * l);
        }
        if let Some(u) = &lp.upper[j] {
            rhs += &(cert.upper_mults[j].clone() * u);
        }
    }
    if !rhs.is_negative() {
        return Err(format!("combined right-hand side is {rhs}, not negative"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Solver internals
// ---------------------------------------------------------------------------

#[derive(Clone)]
enum ColKind {
    // x_j = l + s, s ≥ 0
    Shift(Rat),
    // x_j = u − s, s ≥ 0
    Mirror(Rat),
    // x_j = s⁺ − s⁻
    SplitPos,
    SplitNeg,
}

struct InternalCol {
    var: usize,
    kind: ColKind,
}

enum RowOrigin {
    User(usize),
    // s_j ≤ u_j − l_j for a variable with both bounds
    UpperBound(usize),
}

struct Internal {
    cols: Vec<InternalCol>,
    // Dense coefficient rows over the internal columns, rhs, relation.
    rows: Vec<(Vec<Rat>, Relation, Rat)>,
    origins: Vec<RowOrigin>,
    objective: Vec<Rat>,
}

/// Solve the program. Certificates are verified internally before being
/// returned; a verification failure is a bug and panics.
pub fn solve(lp: &LinearProgram) -> LpResult {
    let n = lp.num_vars();
    // Inconsistent bounds short-circuit to a two-line certificate.
    for j in 0..n {
        if let (Some(l), Some(u)) = (&lp.lower[j], &lp.upper[j]) {
            if l > u {
                let mut cert = Farkas {
                    row_mults: vec![Rat::zero(); lp.constraints.len()],
                    lower_mults: vec![Rat::zero(); n],
                    upper_mults: vec![Rat::zero(); n],
                };
                cert.lower_mults[j] = -Rat::one();
                cert.upper_mults[j] = Rat::one();
                verify_farkas(lp, &cert).expect("bound certificate must verify");
                return LpResult::Infeasible(cert);
            }
        }
    }

    let maximize = lp.sense == Sense::Maximize;
    let internal = build_internal(lp, maximize);
    match simplex(&internal) {
        SimplexOutcome::Optimal {
            col_values,
            row_duals,
            reduced_costs,
        } => {
            let sol = recover_solution(lp, &internal, maximize, col_values, row_duals, reduced_costs);
            if let Err(e) = verify_optimal(lp, &sol) {
                panic!("internal LP verification failed: {e}\nprogram:\n{lp}");
            }
            LpResult::Optimal(sol)
        }
        SimplexOutcome::Infeasible { row_duals } => {
            let cert = recover_farkas(lp, &internal, row_duals);
            if let Err(e) = verify_farkas(lp, &cert) {
                panic!("internal Farkas verification failed: {e}\nprogram:\n{lp}");
            }
            LpResult::Infeasible(cert)
        }
        SimplexOutcome::Unbounded => LpResult::Unbounded,
    }
}

/// Feasibility check: `solve` with a zero objective.
pub fn check_feasible(lp: &LinearProgram) -> Feasibility {
    let mut zeroed = lp.clone();
    zeroed.objective = RatVec::zero(lp.vars().clone());
    zeroed.sense = Sense::Maximize;
    match solve(&zeroed) {
        LpResult::Optimal(sol) => Feasibility::Feasible(sol.primal),
        LpResult::Infeasible(cert) => Feasibility::Infeasible(cert),
        LpResult::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

fn build_internal(lp: &LinearProgram, maximize: bool) -> Internal {
    let n = lp.num_vars();
    let mut cols = Vec::new();
    for j in 0..n {
        match (&lp.lower[j], &lp.upper[j]) {
            (Some(l), _) => cols.push(InternalCol {
                var: j,
                kind: ColKind::Shift(l.clone()),
            }),
            (None, Some(u)) => cols.push(InternalCol {
                var: j,
                kind: ColKind::Mirror(u.clone()),
            }),
            (None, None) => {
                cols.push(InternalCol {
                    var: j,
                    kind: ColKind::SplitPos,
                });
                cols.push(InternalCol {
                    var: j,
                    kind: ColKind::SplitNeg,
                });
            }
        }
    }

    let col_coeff = |col: &InternalCol, orig: &Rat| -> Rat {
        match col.kind {
            ColKind::Shift(_) | ColKind::SplitPos => orig.clone(),
            ColKind::Mirror(_) | ColKind::SplitNeg => -orig,
        }
    };
    let shift_of = |col: &InternalCol| -> Option<Rat> {
        match &col.kind {
            ColKind::Shift(l) => Some(l.clone()),
            ColKind::Mirror(u) => Some(u.clone()),
            _ => None,
        }
    };

    let mut rows = Vec::new();
    let mut origins = Vec::new();
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut coeffs = Vec::with_capacity(cols.len());
        let mut rhs = c.rhs.clone();
        for col in &cols {
            let a = c.coeffs.get(col.var);
            coeffs.push(col_coeff(col, a));
            if let Some(s) = shift_of(col) {
                // x_j = shift ± s: the constant moves to the rhs.
                rhs -= &(a.clone() * s);
            }
        }
        rows.push((coeffs, c.relation, rhs));
        origins.push(RowOrigin::User(i));
    }
    // Upper-bound rows for doubly-bounded variables: s_j ≤ u − l.
    for (k, col) in cols.iter().enumerate() {
        if let ColKind::Shift(l) = &col.kind {
            if let Some(u) = &lp.upper[col.var] {
                let mut coeffs = vec![Rat::zero(); cols.len()];
                coeffs[k] = Rat::one();
                rows.push((coeffs, Relation::Le, u.clone() - l));
                origins.push(RowOrigin::UpperBound(col.var));
            }
        }
    }

    let objective = cols
        .iter()
        .map(|col| {
            let c = lp.objective.get(col.var);
            let c = if maximize { c.clone() } else { -c };
            match col.kind {
                ColKind::Shift(_) | ColKind::SplitPos => c,
                ColKind::Mirror(_) | ColKind::SplitNeg => -c,
            }
        })
        .collect();

    Internal {
        cols,
        rows,
        origins,
        objective,
    }
}

enum SimplexOutcome {
    Optimal {
        col_values: Vec<Rat>,
        /// Dual multiplier per internal row (flip-corrected).
        row_duals: Vec<Rat>,
        /// Reduced cost per internal column.
        reduced_costs: Vec<Rat>,
    },
    Infeasible {
        row_duals: Vec<Rat>,
    },
    Unbounded,
}

/// Dense two-phase tableau simplex on `max c·s, A s rel b, s ≥ 0`.
fn simplex(internal: &Internal) -> SimplexOutcome {
    let n = internal.cols.len();
    let m = internal.rows.len();

    // Normalize every row to nonnegative rhs, remembering flips.
    let mut flipped = vec![false; m];
    let mut rows: Vec<(Vec<Rat>, Relation, Rat)> = internal.rows.clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if row.2.is_negative() {
            flipped[i] = true;
            for a in row.0.iter_mut() {
                *a = -&*a;
            }
            row.2 = -&row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Column layout: structural | slack/surplus | artificial | rhs.
    let mut num_aux = 0usize;
    let mut num_art = 0usize;
    for row in &rows {
        match row.1 {
            Relation::Le => num_aux += 1,
            Relation::Ge => {
                num_aux += 1;
                num_art += 1;
            }
            Relation::Eq => num_art += 1,
        }
    }
    let total = n + num_aux + num_art;
    let rhs_col = total;

    let mut tableau: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    // init_col[i]: the identity column that starts basic in row i; used for
    // dual extraction.
    let mut init_col: Vec<usize> = Vec::with_capacity(m);
    let mut next_aux = n;
    let mut next_art = n + num_aux;
    let mut artificial_start = n + num_aux;
    for row in &rows {
        let mut t = vec![Rat::zero(); total + 1];
        for (j, a) in row.0.iter().enumerate() {
            t[j] = a.clone();
        }
        t[rhs_col] = row.2.clone();
        match row.1 {
            Relation::Le => {
                t[next_aux] = Rat::one();
                basis.push(next_aux);
                init_col.push(next_aux);
                next_aux += 1;
            }
            Relation::Ge => {
                t[next_aux] = -Rat::one();
                next_aux += 1;
                t[next_art] = Rat::one();
                basis.push(next_art);
                init_col.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                t[next_art] = Rat::one();
                basis.push(next_art);
                init_col.push(next_art);
                next_art += 1;
            }
        }
        tableau.push(t);
    }
    debug_assert_eq!(next_aux, n + num_aux);
    debug_assert_eq!(next_art, total);
    if num_art == 0 {
        artificial_start = total; // no artificial columns
    }

    // Phase 1: maximize −Σ artificials (skipped when a slack basis exists).
    if num_art > 0 {
        let mut costs = vec![Rat::zero(); total];
        for c in costs.iter_mut().take(total).skip(artificial_start) {
            *c = -Rat::one();
        }
        let mut objrow = price_out(&costs, &tableau, &basis, rhs_col);
        run_simplex(&mut tableau, &mut basis, &mut objrow, rhs_col, total, None);
        // objrow[rhs_col] holds −(current objective value) = Σ artificials.
        if objrow[rhs_col].is_positive() {
            // Infeasible: duals of phase 1 certify it.
            let row_duals =
                extract_duals(&costs, &objrow, &init_col, &flipped, m);
            return SimplexOutcome::Infeasible { row_duals };
        }
        // Drive basic artificials (all at level zero now) out of the basis
        // so no phase-2 pivot can lift them. A row with no nonzero
        // non-artificial entry is redundant and inert: every admissible
        // entering column has a zero there.
        let mut scratch = vec![Rat::zero(); rhs_col + 1];
        for i in 0..m {
            if basis[i] >= artificial_start {
                debug_assert!(tableau[i][rhs_col].is_zero());
                if let Some(j) = (0..artificial_start).find(|&j| !tableau[i][j].is_zero()) {
                    pivot(&mut tableau, &mut basis, &mut scratch, rhs_col, i, j);
                }
            }
        }
    }

    // Phase 2: artificial columns may stay basic at level zero but must
    // never re-enter.
    let mut costs = vec![Rat::zero(); total];
    for (j, c) in internal.objective.iter().enumerate() {
        costs[j] = c.clone();
    }
    let mut objrow = price_out(&costs, &tableau, &basis, rhs_col);
    let forbid_from = if num_art > 0 {
        Some(artificial_start)
    } else {
        None
    };
    if !run_simplex(
        &mut tableau,
        &mut basis,
        &mut objrow,
        rhs_col,
        total,
        forbid_from,
    ) {
        return SimplexOutcome::Unbounded;
    }

    let mut col_values = vec![Rat::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            col_values[b] = tableau[i][rhs_col].clone();
        }
    }
    let row_duals = extract_duals(&costs, &objrow, &init_col, &flipped, m);
    let reduced_costs: Vec<Rat> = (0..n).map(|j| objrow[j].clone()).collect();
    SimplexOutcome::Optimal {
        col_values,
        row_duals,
        reduced_costs,
    }
}

/// Reduced-cost row for the given costs and basis: `objrow[j] = c_j − w·A_j`,
/// with the negated objective value in the rhs slot.
fn price_out(costs: &[Rat], tableau: &[Vec<Rat>], basis: &[usize], rhs_col: usize) -> Vec<Rat> {
    let mut objrow = vec![Rat::zero(); rhs_col + 1];
    objrow[..rhs_col].clone_from_slice(costs);
    for (i, &b) in basis.iter().enumerate() {
        if !costs[b].is_zero() {
            let factor = costs[b].clone();
            for j in 0..=rhs_col {
                let delta = factor.clone() * &tableau[i][j];
                objrow[j] -= &delta;
            }
        }
    }
    objrow
}

/// Bland-rule simplex iterations. Returns false on unboundedness.
fn run_simplex(
    tableau: &mut [Vec<Rat>],
    basis: &mut [usize],
    objrow: &mut [Rat],
    rhs_col: usize,
    num_cols: usize,
    forbid_from: Option<usize>,
) -> bool {
    loop {
        // Entering column: lowest index with positive reduced cost.
        let scan_until = forbid_from.unwrap_or(num_cols);
        let entering = objrow[..scan_until].iter().position(|r| r.is_positive());
        let Some(enter) = entering else {
            return true;
        };
        // Leaving row: minimum ratio, ties by lowest basic column index.
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = row[rhs_col].clone() / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            return false;
        };
        pivot(tableau, basis, objrow, rhs_col, pivot_row, enter);
    }
}

fn pivot(
    tableau: &mut [Vec<Rat>],
    basis: &mut [usize],
    objrow: &mut [Rat],
    rhs_col: usize,
    pivot_row: usize,
    enter: usize,
) {
    let inv = tableau[pivot_row][enter].recip();
    for cell in tableau[pivot_row].iter_mut() {
        *cell = cell.clone() * &inv;
    }
    for i in 0..tableau.len() {
        if i == pivot_row || tableau[i][enter].is_zero() {
            continue;
        }
        let factor = tableau[i][enter].clone();
        #[allow(clippy::needless_range_loop)] // two rows borrowed at once
        for j in 0..=rhs_col {
            let delta = factor.clone() * &tableau[pivot_row][j];
            tableau[i][j] -= &delta;
        }
    }
    if !objrow[enter].is_zero() {
        let factor = objrow[enter].clone();
        for (j, cell) in objrow.iter_mut().enumerate() {
            let delta = factor.clone() * &tableau[pivot_row][j];
            *cell -= &delta;
        }
    }
    basis[pivot_row] = enter;
}

/// Row duals from the final reduced costs of the initial identity columns:
/// `w_i = c_init(i) − objrow[init_col(i)]`, corrected for flipped rows.
fn extract_duals(
    costs: &[Rat],
    objrow: &[Rat],
    init_col: &[usize],
    flipped: &[bool],
    m: usize,
) -> Vec<Rat> {
    (0..m)
        .map(|i| {
            let w = costs[init_col[i]].clone() - &objrow[init_col[i]];
            if flipped[i] {
                -w
            } else {
                w
            }
        })
        .collect()
}

fn recover_solution(
    lp: &LinearProgram,
    internal: &Internal,
    maximize: bool,
    col_values: Vec<Rat>,
    row_duals: Vec<Rat>,
    reduced_costs: Vec<Rat>,
) -> Solution {
    let n = lp.num_vars();
    let mut x = RatVec::zero(lp.vars().clone());
    for (k, col) in internal.cols.iter().enumerate() {
        let s = &col_values[k];
        match &col.kind {
            ColKind::Shift(l) => x.set(col.var, l.clone() + s),
            ColKind::Mirror(u) => x.set(col.var, u.clone() - s),
            ColKind::SplitPos => {
                let cur = x.get(col.var).clone();
                x.set(col.var, cur + s);
            }
            ColKind::SplitNeg => {
                let cur = x.get(col.var).clone();
                x.set(col.var, cur - s);
            }
        }
    }

    // Multipliers in max orientation, then flipped for Minimize.
    let sign = |r: Rat| if maximize { r } else { -r };
    let mut user_duals = vec![Rat::zero(); lp.constraints.len()];
    let mut upper_duals = vec![Rat::zero(); n];
    for (i, origin) in internal.origins.iter().enumerate() {
        match origin {
            RowOrigin::User(u) => user_duals[*u] = sign(row_duals[i].clone()),
            RowOrigin::UpperBound(j) => upper_duals[*j] = sign(row_duals[i].clone()),
        }
    }
    let mut lower_duals = vec![Rat::zero(); n];
    for (k, col) in internal.cols.iter().enumerate() {
        match &col.kind {
            // Reduced cost of the shifted column is the lower-bound dual.
            ColKind::Shift(_) => lower_duals[col.var] = sign(reduced_costs[k].clone()),
            // Mirrored column: upper dual is the negated reduced cost.
            ColKind::Mirror(_) => upper_duals[col.var] = sign(-reduced_costs[k].clone()),
            _ => {}
        }
    }

    let optimum = lp.objective.dot(&x);
    Solution {
        optimum,
        primal: x,
        row_duals: user_duals,
        lower_duals,
        upper_duals,
    }
}

fn recover_farkas(lp: &LinearProgram, internal: &Internal, row_duals: Vec<Rat>) -> Farkas {
    let n = lp.num_vars();
    let mut row_mults = vec![Rat::zero(); lp.constraints.len()];
    let mut upper_mults = vec![Rat::zero(); n];
    for (i, origin) in internal.origins.iter().enumerate() {
        match origin {
            RowOrigin::User(u) => row_mults[*u] = row_duals[i].clone(),
            RowOrigin::UpperBound(j) => upper_mults[*j] = row_duals[i].clone(),
        }
    }
    // Close the stationarity equations with bound multipliers.
    let mut lower_mults = vec![Rat::zero(); n];
    for col in &internal.cols {
        let j = col.var;
        match &col.kind {
            ColKind::Shift(_) => {
                let mut t = upper_mults[j].clone();
                for (i, c) in lp.constraints.iter().enumerate() {
                    t += &(row_mults[i].clone() * c.coeffs.get(j));
                }
                lower_mults[j] = -t;
            }
            ColKind::Mirror(_) => {
                let mut t = Rat::zero();
                for (i, c) in lp.constraints.iter().enumerate() {
                    t += &(row_mults[i].clone() * c.coeffs.get(j));
                }
                upper_mults[j] = -t;
            }
            _ => {}
        }
    }
    normalize_farkas(Farkas {
        row_mults,
        lower_mults,
        upper_mults,
    })
}

/// Scale a certificate to the smallest integer multiple (reproducible form).
fn normalize_farkas(cert: Farkas) -> Farkas {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed, Zero};
    let mut denom_lcm = BigInt::one();
    let mut numer_gcd = BigInt::zero();
    let mut scan = |r: &Rat| {
        denom_lcm = denom_lcm.lcm(r.denom());
        numer_gcd = numer_gcd.gcd(r.numer());
    };
    cert.row_mults.iter().for_each(&mut scan);
    cert.lower_mults.iter().for_each(&mut scan);
    cert.upper_mults.iter().for_each(&mut scan);
    if numer_gcd.is_zero() {
        return cert;
    }
    let scale = Rat::from(num_rational::BigRational::new(
        denom_lcm,
        numer_gcd.abs(),
    ));
    let apply = |v: Vec<Rat>| -> Vec<Rat> { v.into_iter().map(|r| r * &scale).collect() };
    Farkas {
        row_mults: apply(cert.row_mults),
        lower_mults: apply(cert.lower_mults),
        upper_mults: apply(cert.upper_mults),
    }
}
