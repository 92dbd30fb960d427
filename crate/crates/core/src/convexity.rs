//! M-convex / M♯-convex sets and functions, concave extensions, and the
//! linearity facet B_f(x).
//!
//! Checkers are exhaustive over the declared points and return the
//! lexicographically first counterexample, so failure messages are
//! reproducible. Functions are concave-oriented by default (valuations);
//! the convex variants are obtained by negation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::coords::{IndexSet, IntVec, RatVec};
use crate::error::Error;
use crate::lp::{self, LinearProgram, LpResult, Relation, Sense};
use crate::rat::{Rat, Value};

/// A finite set of integer points over a shared index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    index: Arc<IndexSet>,
    points: BTreeSet<IntVec>,
}

impl PointSet {
    pub fn new(
        index: Arc<IndexSet>,
        points: impl IntoIterator<Item = IntVec>,
    ) -> Result<Self, Error> {
        let points: BTreeSet<IntVec> = points.into_iter().collect();
        for p in &points {
            if *p.index() != index {
                return Err(Error::Validation(
                    "point set members must share the index set".to_string(),
                ));
            }
        }
        Ok(PointSet { index, points })
    }

    pub fn empty(index: Arc<IndexSet>) -> Self {
        PointSet {
            index,
            points: BTreeSet::new(),
        }
    }

    pub fn index(&self) -> &Arc<IndexSet> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &IntVec) -> bool {
        self.points.contains(p)
    }

    pub fn insert(&mut self, p: IntVec) {
        debug_assert_eq!(*p.index(), self.index);
        self.points.insert(p);
    }

    /// Points in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &IntVec> + '_ {
        self.points.iter()
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            index: self.index.clone(),
            points: self.points.intersection(&other.points).cloned().collect(),
        }
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.points.len()))?;
        for p in &self.points {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

/// A finite table from integer vectors to rationals-or-minus-infinity.
/// Off-table points are implicitly −∞ in the concave orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteIntFunction {
    index: Arc<IndexSet>,
    table: BTreeMap<IntVec, Value>,
}

impl FiniteIntFunction {
    pub fn new(
        index: Arc<IndexSet>,
        entries: impl IntoIterator<Item = (IntVec, Value)>,
    ) -> Result<Self, Error> {
        let mut table = BTreeMap::new();
        for (p, v) in entries {
            if *p.index() != index {
                return Err(Error::Validation(
                    "table keys must share the declared index set".to_string(),
                ));
            }
            if table.insert(p.clone(), v).is_some() {
                return Err(Error::Validation(format!("duplicate table point {p:?}")));
            }
        }
        if table.is_empty() {
            return Err(Error::Validation("function table is empty".to_string()));
        }
        Ok(FiniteIntFunction { index, table })
    }

    pub fn index(&self) -> &Arc<IndexSet> {
        &self.index
    }

    /// Table value; −∞ off the table.
    pub fn value(&self, p: &IntVec) -> Value {
        self.table.get(p).cloned().unwrap_or(Value::NegInf)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&IntVec, &Value)> + '_ {
        self.table.iter()
    }

    /// Table keys with finite values, in lexicographic order.
    pub fn effective_domain(&self) -> PointSet {
        PointSet {
            index: self.index.clone(),
            points: self
                .table
                .iter()
                .filter(|(_, v)| v.is_finite())
                .map(|(p, _)| p.clone())
                .collect(),
        }
    }

    /// Borrowed view of the effective domain, in lexicographic order.
    pub fn effective_domain_vec(&self) -> Vec<&IntVec> {
        self.table
            .iter()
            .filter(|(_, v)| v.is_finite())
            .map(|(p, _)| p)
            .collect()
    }

    /// The pointwise negation (finite values negated, −∞ entries kept as
    /// off-domain sentinels). Converts between the concave and convex
    /// orientations.
    pub fn negate(&self) -> FiniteIntFunction {
        FiniteIntFunction {
            index: self.index.clone(),
            table: self
                .table
                .iter()
                .map(|(p, v)| {
                    let nv = match v {
                        Value::Fin(r) => Value::Fin(-r),
                        Value::NegInf => Value::NegInf,
                    };
                    (p.clone(), nv)
                })
                .collect(),
        }
    }

    /// Add a constant to every finite value.
    pub fn shift(&self, c: &Rat) -> FiniteIntFunction {
        FiniteIntFunction {
            index: self.index.clone(),
            table: self
                .table
                .iter()
                .map(|(p, v)| {
                    let nv = match v {
                        Value::Fin(r) => Value::Fin(r.clone() + c),
                        Value::NegInf => Value::NegInf,
                    };
                    (p.clone(), nv)
                })
                .collect(),
        }
    }
}

impl Serialize for FiniteIntFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            point: &'a IntVec,
            value: &'a Value,
        }
        let mut seq = serializer.serialize_seq(Some(self.table.len()))?;
        for (p, v) in &self.table {
            seq.serialize_element(&Entry { point: p, value: v })?;
        }
        seq.end()
    }
}

/// First counterexample of an exchange-property check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeViolation {
    pub x: IntVec,
    pub y: IntVec,
    /// Coordinate name of the offending u ∈ supp⁺(x−y).
    pub u: String,
}

impl fmt::Display for ExchangeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exchange fails at x={:?}, y={:?}, u={}",
            self.x, self.y, self.u
        )
    }
}

/// Failure report for the function checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FnViolation {
    Exchange(ExchangeViolation),
    /// M-convexity requires all domain points to share one coordinate sum.
    DomainNotBase { x: IntVec, y: IntVec },
}

impl fmt::Display for FnViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnViolation::Exchange(v) => v.fmt(f),
            FnViolation::DomainNotBase { x, y } => write!(
                f,
                "domain is not a base set: {x:?} and {y:?} have different coordinate sums"
            ),
        }
    }
}

fn set_exchange_check(set: &PointSet, allow_single: bool) -> Result<(), ExchangeViolation> {
    for x in set.iter() {
        for y in set.iter() {
            let diff = x.sub(y);
            for u in diff.supp_plus() {
                let single_ok = allow_single
                    && set.contains(&x.shifted(u, -1))
                    && set.contains(&y.shifted(u, 1));
                let pair_ok = diff.supp_minus().into_iter().any(|v| {
                    set.contains(&x.shifted(u, -1).shifted(v, 1))
                        && set.contains(&y.shifted(u, 1).shifted(v, -1))
                });
                if !single_ok && !pair_ok {
                    return Err(ExchangeViolation {
                        x: x.clone(),
                        y: y.clone(),
                        u: set.index.name(u).to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Symmetric two-element exchange property (M-convex set).
pub fn is_m_convex_set(set: &PointSet) -> Result<(), ExchangeViolation> {
    set_exchange_check(set, false)
}

/// Exchange property weakened by the single-element alternative.
pub fn is_msharp_convex_set(set: &PointSet) -> Result<(), ExchangeViolation> {
    set_exchange_check(set, true)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Concave,
    Convex,
}

fn fn_exchange_check(
    f: &FiniteIntFunction,
    allow_single: bool,
    orientation: Orientation,
) -> Result<(), FnViolation> {
    let dom: Vec<&IntVec> = f
        .table
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(p, _)| p)
        .collect();
    if !allow_single {
        // The two-element exchange preserves the coordinate sum, so the
        // definition is vacuous across different sums; report that case
        // distinctly instead of quietly passing.
        for w in dom.windows(2) {
            if w[0].coord_sum() != w[1].coord_sum() {
                return Err(FnViolation::DomainNotBase {
                    x: w[0].clone(),
                    y: w[1].clone(),
                });
            }
        }
    }
    // The concave inequality is f(x)+f(y) ≤ f(x−χu[+χv])+f(y+χu[−χv]);
    // convex reverses it. Exchanged points off the domain fail the clause.
    let clause_ok = |lhs: &Rat, a: Value, b: Value| -> bool {
        match a + b {
            Value::NegInf => false,
            Value::Fin(rhs) => match orientation {
                Orientation::Concave => *lhs <= rhs,
                Orientation::Convex => *lhs >= rhs,
            },
        }
    };
    for &x in &dom {
        for &y in &dom {
            let lhs = match (f.value(x), f.value(y)) {
                (Value::Fin(a), Value::Fin(b)) => a + b,
                _ => unreachable!("domain values are finite"),
            };
            let diff = x.sub(y);
            for u in diff.supp_plus() {
                let single_ok = allow_single
                    && clause_ok(&lhs, f.value(&x.shifted(u, -1)), f.value(&y.shifted(u, 1)));
                let pair_ok = diff.supp_minus().into_iter().any(|v| {
                    clause_ok(
                        &lhs,
                        f.value(&x.shifted(u, -1).shifted(v, 1)),
                        f.value(&y.shifted(u, 1).shifted(v, -1)),
                    )
                });
                if !single_ok && !pair_ok {
                    return Err(FnViolation::Exchange(ExchangeViolation {
                        x: x.clone(),
                        y: y.clone(),
                        u: f.index.name(u).to_string(),
                    }));
                }
            }
        }
    }
    Ok(())
}

pub fn is_msharp_concave_fn(f: &FiniteIntFunction) -> Result<(), FnViolation> {
    fn_exchange_check(f, true, Orientation::Concave)
}

pub fn is_msharp_convex_fn(f: &FiniteIntFunction) -> Result<(), FnViolation> {
    fn_exchange_check(f, true, Orientation::Convex)
}

pub fn is_m_concave_fn(f: &FiniteIntFunction) -> Result<(), FnViolation> {
    fn_exchange_check(f, false, Orientation::Concave)
}

pub fn is_m_convex_fn(f: &FiniteIntFunction) -> Result<(), FnViolation> {
    fn_exchange_check(f, false, Orientation::Convex)
}

/// Probability weights over integer points certifying a concave-extension
/// value: positive weights summing to one whose weighted mean is `target`
/// and whose weighted value-sum is `value`.
#[derive(Debug, Clone, Serialize)]
pub struct LotteryWitness {
    pub support: Vec<(IntVec, Rat)>,
    pub target: RatVec,
    pub value: Rat,
}

impl LotteryWitness {
    /// Validate the witness invariants against the function it certifies.
    pub fn validated(
        support: Vec<(IntVec, Rat)>,
        target: RatVec,
        value: Rat,
        f: &FiniteIntFunction,
    ) -> Result<Self, Error> {
        let mut weight_sum = Rat::zero();
        let mut value_sum = Rat::zero();
        let mut mean = RatVec::zero(target.index().clone());
        for (p, w) in &support {
            if !w.is_positive() {
                return Err(Error::Validation(format!(
                    "lottery weight {w} at {p:?} is not positive"
                )));
            }
            weight_sum += w;
            match f.value(p) {
                Value::Fin(v) => value_sum += &(w.clone() * v),
                Value::NegInf => {
                    return Err(Error::Validation(format!(
                        "lottery point {p:?} is outside the effective domain"
                    )))
                }
            }
            for pos in 0..p.len() {
                let inc = w.clone() * Rat::from_int(p.get(pos));
                let cur = mean.get(pos).clone();
                mean.set(pos, cur + inc);
            }
        }
        if weight_sum != Rat::one() {
            return Err(Error::Validation(format!(
                "lottery weights sum to {weight_sum}, not 1"
            )));
        }
        if mean != target {
            return Err(Error::Validation(format!(
                "lottery mean {mean:?} differs from target {target:?}"
            )));
        }
        if value_sum != value {
            return Err(Error::Validation(format!(
                "lottery value {value_sum} differs from claimed {value}"
            )));
        }
        Ok(LotteryWitness {
            support,
            target,
            value,
        })
    }
}

/// Variable names for the lottery LP: one per domain point.
fn lottery_vars(dom: &[&IntVec]) -> Result<Arc<IndexSet>, Error> {
    IndexSet::new(dom.iter().map(|p| format!("lam{:?}", p)))
}

/// Lottery LP over the given support: mean rows pinning `x`, the
/// probability row, λ ≥ 0. Objective left zero for the caller to fill.
fn lottery_lp(f: &FiniteIntFunction, x: &RatVec, dom: &[&IntVec]) -> Result<LinearProgram, Error> {
    let vars = lottery_vars(dom)?;
    let mut lp = LinearProgram::new(Sense::Maximize, RatVec::zero(vars.clone()));
    for j in 0..dom.len() {
        lp.set_lower(j, Rat::zero());
    }
    for pos in 0..f.index.len() {
        let coeffs = RatVec::new(
            vars.clone(),
            dom.iter().map(|p| Rat::from_int(p.get(pos))).collect(),
        )?;
        lp.push(coeffs, Relation::Eq, x.get(pos).clone());
    }
    let ones = RatVec::new(vars.clone(), vec![Rat::one(); dom.len()])?;
    lp.push(ones, Relation::Eq, Rat::one());
    Ok(lp)
}

fn finite_values(f: &FiniteIntFunction, dom: &[&IntVec]) -> Vec<Rat> {
    dom.iter()
        .map(|p| f.value(p).expect_finite().clone())
        .collect()
}

/// Map an infeasible lottery LP into a separating-hyperplane error: the
/// equality-row multipliers give a normal with normal·z ≥ offset on the
/// domain but normal·x < offset.
fn outside_hull_error(f: &FiniteIntFunction, cert: &lp::Farkas) -> Error {
    let n = f.index.len();
    let mut normal = RatVec::zero(f.index.clone());
    for pos in 0..n {
        normal.set(pos, cert.row_mults[pos].clone());
    }
    let offset = -cert.row_mults[n].clone();
    Error::OutsideHull { normal, offset }
}

/// Value of the concave closure of `f` at `x` with an optimal lottery.
///
/// The LP ranges over the full effective domain, not only the hypercube
/// around `x`. Errors with a separating certificate when `x` lies outside
/// the convex hull of the domain.
pub fn concave_extension_eval(
    f: &FiniteIntFunction,
    x: &RatVec,
) -> Result<(Rat, LotteryWitness), Error> {
    if *x.index() != f.index {
        return Err(Error::Validation(
            "evaluation point must share the function's index set".to_string(),
        ));
    }
    let dom = f.effective_domain_vec();
    if dom.is_empty() {
        return Err(Error::Validation("effective domain is empty".to_string()));
    }
    let values = finite_values(f, &dom);
    let mut lp = lottery_lp(f, x, &dom)?;
    lp.objective = RatVec::new(lp.vars().clone(), values)?;
    match lp::solve(&lp) {
        LpResult::Optimal(sol) => {
            let support: Vec<(IntVec, Rat)> = dom
                .iter()
                .enumerate()
                .filter(|(j, _)| sol.primal.get(*j).is_positive())
                .map(|(j, p)| ((*p).clone(), sol.primal.get(j).clone()))
                .collect();
            let witness = LotteryWitness::validated(support, x.clone(), sol.optimum.clone(), f)?;
            Ok((sol.optimum, witness))
        }
        LpResult::Infeasible(cert) => Err(outside_hull_error(f, &cert)),
        LpResult::Unbounded => unreachable!("lottery polytope is bounded"),
    }
}

/// B_f(x): the corners of the unit hypercube around `x` that carry positive
/// weight in at least one optimal lottery. Each corner is decided by one LP
/// that maximizes its weight subject to optimality of the lottery value.
pub fn facet_set(f: &FiniteIntFunction, x: &RatVec) -> Result<PointSet, Error> {
    let (best, _) = concave_extension_eval(f, x)?;
    let dom = f.effective_domain_vec();
    let values = finite_values(f, &dom);
    let mut result = PointSet::empty(f.index.clone());
    for corner in x.hypercube_corners() {
        let Some(pos) = dom.iter().position(|p| **p == corner) else {
            continue; // off-domain corners cannot appear in any lottery
        };
        let mut lp = lottery_lp(f, x, &dom)?;
        let value_row = RatVec::new(lp.vars().clone(), values.clone())?;
        lp.push(value_row, Relation::Eq, best.clone());
        let mut objective = RatVec::zero(lp.vars().clone());
        objective.set(pos, Rat::one());
        lp.objective = objective;
        match lp::solve(&lp) {
            LpResult::Optimal(sol) => {
                if sol.optimum.is_positive() {
                    result.insert(corner);
                }
            }
            LpResult::Infeasible(_) => unreachable!("optimal lottery exists"),
            LpResult::Unbounded => unreachable!("lottery polytope is bounded"),
        }
    }
    Ok(result)
}

/// Minimum and maximum of Σλ_z f(z) over lotteries supported in `support`
/// with mean `x`. Used to confirm that every such lottery attains the
/// extension value exactly (the rebalancing property holds across the whole
/// polytope iff min = max = extension value).
pub fn lottery_value_range(
    f: &FiniteIntFunction,
    x: &RatVec,
    support: &PointSet,
) -> Result<(Rat, Rat), Error> {
    let dom: Vec<&IntVec> = support.iter().collect();
    if dom.is_empty() {
        return Err(Error::Validation("empty lottery support".to_string()));
    }
    for p in &dom {
        if !f.value(p).is_finite() {
            return Err(Error::Validation(format!(
                "support point {p:?} is outside the effective domain"
            )));
        }
    }
    let values = finite_values(f, &dom);
    let mut lp = lottery_lp(f, x, &dom)?;
    lp.objective = RatVec::new(lp.vars().clone(), values)?;
    let max = match lp::solve(&lp) {
        LpResult::Optimal(sol) => sol.optimum,
        LpResult::Infeasible(cert) => return Err(outside_hull_error(f, &cert)),
        LpResult::Unbounded => unreachable!("lottery polytope is bounded"),
    };
    lp.sense = Sense::Minimize;
    let min = lp::solve(&lp).expect_optimal().optimum.clone();
    Ok((min, max))
}

/// B_f(x) of an M♯-concave function is an M-convex set.
pub fn verify_lemma_2_2(f: &FiniteIntFunction, x: &RatVec) -> Result<bool, Error> {
    if let Err(v) = is_msharp_concave_fn(f) {
        return Err(Error::Precondition(format!(
            "function is not M♯-concave: {v}"
        )));
    }
    let b = facet_set(f, x)?;
    Ok(is_m_convex_set(&b).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn idx2() -> Arc<IndexSet> {
        IndexSet::new(["e", "g"]).unwrap()
    }

    fn iv(vals: &[i64]) -> IntVec {
        IntVec::new(idx2(), vals.to_vec()).unwrap()
    }

    fn ps(points: &[&[i64]]) -> PointSet {
        PointSet::new(idx2(), points.iter().map(|p| iv(p))).unwrap()
    }

    fn table(entries: &[(&[i64], Value)]) -> FiniteIntFunction {
        FiniteIntFunction::new(idx2(), entries.iter().map(|(p, v)| (iv(p), v.clone()))).unwrap()
    }

    /// Substitutable sell/buy pairing over one sale arc and one purchase arc.
    fn w1() -> FiniteIntFunction {
        table(&[
            (&[0, 0], Value::Fin(rat(-1, 2))),
            (&[1, -1], Value::Fin(rat(0, 1))),
            (&[1, 0], Value::Fin(rat(-1, 1))),
            (&[0, -1], Value::Fin(rat(-1, 1))),
        ])
    }

    #[test]
    fn m_convex_set_examples() {
        assert!(is_m_convex_set(&ps(&[&[1, 0], &[0, 1]])).is_ok());
        let bad = ps(&[&[0, 0], &[1, 1]]);
        let v = is_m_convex_set(&bad).unwrap_err();
        assert_eq!(v.x, iv(&[1, 1]));
        assert_eq!(v.y, iv(&[0, 0]));
        assert_eq!(v.u, "e");
        assert!(is_m_convex_set(&ps(&[&[3, -2]])).is_ok());
    }

    #[test]
    fn msharp_convex_set_examples() {
        assert!(is_msharp_convex_set(&ps(&[&[0, 0], &[1, 0], &[0, 1]])).is_ok());
        assert!(is_msharp_convex_set(&ps(&[&[0, 0], &[1, 1]])).is_err());
        // Every M-convex set is M♯-convex.
        let m = ps(&[&[1, 0], &[0, 1]]);
        assert!(is_m_convex_set(&m).is_ok());
        assert!(is_msharp_convex_set(&m).is_ok());
    }

    #[test]
    fn msharp_concave_fn_examples() {
        assert!(is_msharp_concave_fn(&w1()).is_ok());
        // Complements: f(0,0)=f(1,1)=1, f(1,0)=f(0,1)=0.
        let complements = table(&[
            (&[0, 0], Value::from(1)),
            (&[1, 1], Value::from(1)),
            (&[1, 0], Value::from(0)),
            (&[0, 1], Value::from(0)),
        ]);
        let v = is_msharp_concave_fn(&complements).unwrap_err();
        match v {
            FnViolation::Exchange(e) => {
                assert_eq!(e.x, iv(&[1, 1]));
                assert_eq!(e.y, iv(&[0, 0]));
                assert_eq!(e.u, "e");
            }
            other => panic!("{other:?}"),
        }
        // Singleton domain is trivially M♯-concave.
        let singleton = table(&[(&[2, 1], Value::from(5))]);
        assert!(is_msharp_concave_fn(&singleton).is_ok());
    }

    #[test]
    fn m_concave_and_duality() {
        let zero = table(&[(&[1, 0], Value::from(0)), (&[0, 1], Value::from(0))]);
        assert!(is_m_concave_fn(&zero).is_ok());
        // Negation duality on a few tables.
        for f in [w1(), zero] {
            assert_eq!(
                is_m_convex_fn(&f).is_ok(),
                is_m_concave_fn(&f.negate()).is_ok()
            );
            assert_eq!(
                is_msharp_convex_fn(&f).is_ok(),
                is_msharp_concave_fn(&f.negate()).is_ok()
            );
        }
        // Linear on an M-convex set is M-concave.
        let linear = table(&[(&[1, 0], Value::from(3)), (&[0, 1], Value::from(7))]);
        assert!(is_m_concave_fn(&linear).is_ok());
        // Domain with differing coordinate sums is reported distinctly.
        let not_base = table(&[(&[0, 0], Value::from(0)), (&[1, 0], Value::from(0))]);
        assert!(matches!(
            is_m_concave_fn(&not_base).unwrap_err(),
            FnViolation::DomainNotBase { .. }
        ));
    }

    #[test]
    fn effective_domain_examples() {
        let dom = w1().effective_domain();
        assert_eq!(dom.len(), 4);
        assert!(dom.contains(&iv(&[1, -1])));
        let with_inf = table(&[(&[0, 0], Value::from(1)), (&[1, 1], Value::NegInf)]);
        assert_eq!(with_inf.effective_domain().len(), 1);
    }

    /// Aggregate on outcomes: g(0,0)=−1, g(1,1)=0, g(1,0)=g(0,1)=−2.
    fn aggregate_g() -> FiniteIntFunction {
        table(&[
            (&[0, 0], Value::from(-1)),
            (&[1, 1], Value::from(0)),
            (&[1, 0], Value::from(-2)),
            (&[0, 1], Value::from(-2)),
        ])
    }

    #[test]
    fn extension_at_half_half() {
        let g = aggregate_g();
        let x = RatVec::new(idx2(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let (value, witness) = concave_extension_eval(&g, &x).unwrap();
        assert_eq!(value, rat(-1, 2));
        let mut support = witness.support.clone();
        support.sort();
        assert_eq!(
            support,
            vec![(iv(&[0, 0]), rat(1, 2)), (iv(&[1, 1]), rat(1, 2))]
        );
    }

    #[test]
    fn extension_at_integral_point_equals_value() {
        let g = aggregate_g();
        for (p, expected) in [(&[0, 0], rat(-1, 1)), (&[1, 1], rat(0, 1))] {
            let x = iv(p).to_rat();
            let (value, _) = concave_extension_eval(&g, &x).unwrap();
            assert_eq!(value, expected);
        }
    }

    #[test]
    fn extension_equals_value_on_msharp_concave_domains() {
        // Dominance holds everywhere; equality at integral domain points is
        // the concave-extensibility of the M♯ class.
        let f = w1();
        for z in f.effective_domain().iter() {
            let (value, witness) = concave_extension_eval(&f, &z.to_rat()).unwrap();
            assert_eq!(Value::Fin(value), f.value(z));
            assert_eq!(witness.support.len(), 1);
        }
        // A non-M♯ table still satisfies dominance (the degenerate lottery
        // is always available).
        let complements = table(&[
            (&[0, 0], Value::from(1)),
            (&[1, 1], Value::from(1)),
            (&[1, 0], Value::from(0)),
            (&[0, 1], Value::from(0)),
        ]);
        for z in complements.effective_domain().iter() {
            let (value, _) = concave_extension_eval(&complements, &z.to_rat()).unwrap();
            assert!(Value::Fin(value) >= complements.value(z));
        }
    }

    #[test]
    fn extension_of_linear_is_linear() {
        // f(x) = 2x_e + 3x_g on the unit square.
        let f = table(&[
            (&[0, 0], Value::from(0)),
            (&[1, 0], Value::from(2)),
            (&[0, 1], Value::from(3)),
            (&[1, 1], Value::from(5)),
        ]);
        let x = RatVec::new(idx2(), vec![rat(1, 3), rat(1, 2)]).unwrap();
        let (value, _) = concave_extension_eval(&f, &x).unwrap();
        assert_eq!(value, rat(2, 3) + rat(3, 2));
    }

    #[test]
    fn extension_outside_hull_errors() {
        let g = aggregate_g();
        let x = RatVec::new(idx2(), vec![rat(3, 1), rat(0, 1)]).unwrap();
        match concave_extension_eval(&g, &x) {
            Err(Error::OutsideHull { normal, offset }) => {
                for z in g.effective_domain().iter() {
                    assert!(z.dot(&normal) >= offset);
                }
                assert!(x.dot(&normal) < offset);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn facet_set_examples() {
        let g = aggregate_g();
        let x = RatVec::new(idx2(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let b = facet_set(&g, &x).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.contains(&iv(&[0, 0])));
        assert!(b.contains(&iv(&[1, 1])));

        // Integral domain point: the singleton facet.
        let at_zero = iv(&[0, 0]).to_rat();
        let b0 = facet_set(&g, &at_zero).unwrap();
        assert_eq!(b0.len(), 1);
        assert!(b0.contains(&iv(&[0, 0])));

        // Linear on the full unit square: all four corners.
        let lin = table(&[
            (&[0, 0], Value::from(0)),
            (&[1, 0], Value::from(2)),
            (&[0, 1], Value::from(3)),
            (&[1, 1], Value::from(5)),
        ]);
        let mid = RatVec::new(idx2(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(facet_set(&lin, &mid).unwrap().len(), 4);
    }

    #[test]
    fn lemma_2_2_on_w1() {
        let f = w1();
        // On the high diagonal the facet is the two-point set
        // {(0,0),(1,−1)}, which is M-convex.
        let x = RatVec::new(idx2(), vec![rat(1, 2), rat(-1, 2)]).unwrap();
        assert!(verify_lemma_2_2(&f, &x).unwrap());
        // Integral point: singleton facet set, trivially M-convex.
        let z = iv(&[0, 0]).to_rat();
        assert!(verify_lemma_2_2(&f, &z).unwrap());
        // Off the diagonal the facet is a triangle with mixed coordinate
        // sums: M♯-convex but not M-convex. The M-convex claim fails here
        // even though f is M♯-concave.
        let x = RatVec::new(idx2(), vec![rat(1, 2), rat(-1, 4)]).unwrap();
        assert!(!verify_lemma_2_2(&f, &x).unwrap());
        let b = facet_set(&f, &x).unwrap();
        assert_eq!(b.len(), 3);
        assert!(is_msharp_convex_set(&b).is_ok());
        // Precondition violation reported distinctly.
        let complements = table(&[
            (&[0, 0], Value::from(1)),
            (&[1, 1], Value::from(1)),
            (&[1, 0], Value::from(0)),
            (&[0, 1], Value::from(0)),
        ]);
        let x = RatVec::new(idx2(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert!(matches!(
            verify_lemma_2_2(&complements, &x),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn facet_set_of_msharp_concave_is_msharp_convex() {
        // The repaired exchange statement: every facet set of an
        // M♯-concave function passes the M♯ (single-or-pair) property.
        let f = w1();
        let grid = [
            vec![rat(1, 2), rat(-1, 2)],
            vec![rat(1, 2), rat(-1, 4)],
            vec![rat(1, 4), rat(-3, 4)],
            vec![rat(2, 3), rat(-1, 3)],
            vec![rat(1, 3), rat(-2, 3)],
        ];
        for vals in grid {
            let x = RatVec::new(idx2(), vals).unwrap();
            let b = facet_set(&f, &x).unwrap();
            assert!(is_msharp_convex_set(&b).is_ok(), "at {x:?}: {b:?}");
        }
    }

    #[test]
    fn lottery_range_within_facet_set() {
        let g = aggregate_g();
        let x = RatVec::new(idx2(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let b = facet_set(&g, &x).unwrap();
        let (min, max) = lottery_value_range(&g, &x, &b).unwrap();
        assert_eq!(min, rat(-1, 2));
        assert_eq!(max, rat(-1, 2));
    }
}
