//! The efficient-allocation problem under polymatroid constraints: exact
//! integral optimum by enumeration, the lottery-LP relaxation, and
//! integrality-gap detection.
//!
//! The relaxation is formulated on outcome space: lottery weights over
//! integer outcomes of the capacity box with finite aggregate value, with
//! only the lottery *mean* required to satisfy the polymatroid
//! inequalities. Supports may leave the constraint set; restricting them
//! would miss fractional witnesses whose mass sits on infeasible outcomes.

use std::time::Instant;

use serde::Serialize;

use crate::convexity::{
    concave_extension_eval, is_msharp_concave_fn, FiniteIntFunction, LotteryWitness,
};
use crate::coords::{IndexSet, IntVec, RatVec};
use crate::error::Error;
use crate::lp::{self, LinearProgram, LpResult, Relation, Sense};
use crate::network::Instance;
use crate::polymatroid::{mask_positions, Polymatroid};
use crate::rat::{Rat, Value};

pub const MAX_ARCS: usize = 8;
pub const MAX_CAPACITY: i64 = 3;
pub const MAX_DOMAIN_POINTS: usize = 2000;
/// Cap on the lottery-LP support; dense exact pivoting beyond this is not a
/// desk-scale computation and deserves a refusal instead of a hang.
pub const MAX_SUPPORT: usize = 4096;

/// Exhaustive methods are the correctness strategy here; inputs beyond
/// these bounds get a clear refusal rather than a silent blowup.
pub fn check_desk_bounds(inst: &Instance) -> Result<(), Error> {
    let arcs = inst.graph.arcs();
    if arcs.len() > MAX_ARCS {
        return Err(Error::DeskScale(format!(
            "{} arcs exceed the bound of {MAX_ARCS}",
            arcs.len()
        )));
    }
    for arc in arcs {
        if arc.capacity > MAX_CAPACITY {
            return Err(Error::DeskScale(format!(
                "capacity {} on arc `{}` exceeds the bound of {MAX_CAPACITY}",
                arc.capacity, arc.id
            )));
        }
    }
    for v in inst.valuations() {
        let n = v.table.entries().count();
        if n > MAX_DOMAIN_POINTS {
            return Err(Error::DeskScale(format!(
                "valuation of `{}` has {n} points; bound is {MAX_DOMAIN_POINTS}",
                v.agent
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralSolution {
    pub value: Value,
    /// Every optimal outcome, lexicographically ordered. Empty exactly when
    /// no feasible outcome has finite aggregate value.
    pub argmax: Vec<IntVec>,
}

/// Exhaustive maximization of the aggregate over the feasible outcomes
/// (capacity box intersected with the constraint when present).
pub fn solve_integral(inst: &Instance) -> Result<IntegralSolution, Error> {
    check_desk_bounds(inst)?;
    let mut best = Value::NegInf;
    let mut argmax: Vec<IntVec> = Vec::new();
    for x in inst.graph.box_points() {
        if !inst.is_feasible_outcome(&x)? {
            continue;
        }
        let v = inst.aggregate_value(&x)?;
        if !v.is_finite() {
            continue;
        }
        if v > best {
            best = v.clone();
            argmax.clear();
        }
        if v == best {
            argmax.push(x);
        }
    }
    Ok(IntegralSolution {
        value: best,
        argmax,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FractionalSolution {
    pub value: Rat,
    pub mean: RatVec,
    pub lottery: LotteryWitness,
}

/// The lottery relaxation: maximize Σ λ_z g(z) over probability weights on
/// the finite-valued outcomes of the capacity box, subject to the mean
/// satisfying every polymatroid inequality. Returns `NoFiniteOutcome` when
/// the support is empty.
pub fn solve_relaxation(inst: &Instance) -> Result<FractionalSolution, Error> {
    check_desk_bounds(inst)?;
    let support: Vec<(IntVec, Rat)> = inst
        .graph
        .box_points()
        .into_iter()
        .filter_map(|x| match inst.aggregate_value(&x) {
            Ok(Value::Fin(v)) => Some(Ok((x, v))),
            Ok(Value::NegInf) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, Error>>()?;
    if support.is_empty() {
        return Err(Error::NoFiniteOutcome);
    }
    if support.len() > MAX_SUPPORT {
        return Err(Error::DeskScale(format!(
            "lottery support has {} outcomes; bound is {MAX_SUPPORT}",
            support.len()
        )));
    }

    let vars = IndexSet::new(support.iter().map(|(x, _)| format!("lam{:?}", x)))?;
    let objective = RatVec::new(vars.clone(), support.iter().map(|(_, v)| v.clone()).collect())?;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for j in 0..support.len() {
        lp.set_lower(j, Rat::zero());
    }
    let ones = RatVec::new(vars.clone(), vec![Rat::one(); support.len()])?;
    lp.push(ones, Relation::Eq, Rat::one());
    if let Some(p) = &inst.constraint {
        let f = p.set_fn();
        for s in 1..=f.full_mask() {
            let coeffs = RatVec::new(
                vars.clone(),
                support
                    .iter()
                    .map(|(x, _)| Rat::from_int(x.sum_over(mask_positions(s))))
                    .collect(),
            )?;
            lp.push(coeffs, Relation::Le, Rat::from_int(f.value(s)));
        }
    }
    // Without a constraint the box rows are implied by the support itself,
    // so the program is the bare lottery maximization.

    let sol = match lp::solve(&lp) {
        LpResult::Optimal(sol) => sol,
        LpResult::Infeasible(_) => unreachable!("degenerate lotteries are always feasible"),
        LpResult::Unbounded => unreachable!("lottery polytope is bounded"),
    };
    let weights: Vec<(IntVec, Rat)> = support
        .iter()
        .enumerate()
        .filter(|(j, _)| sol.primal.get(*j).is_positive())
        .map(|(j, (x, _))| (x.clone(), sol.primal.get(j).clone()))
        .collect();
    let mut mean = RatVec::zero(inst.graph.arc_index().clone());
    for (x, w) in &weights {
        for pos in 0..mean.len() {
            let inc = w.clone() * Rat::from_int(x.get(pos));
            let cur = mean.get(pos).clone();
            mean.set(pos, cur + inc);
        }
    }
    let aggregate = inst.aggregate_function()?;
    let lottery =
        LotteryWitness::validated(weights, mean.clone(), sol.optimum.clone(), &aggregate)?;
    if let Some(p) = &inst.constraint {
        debug_assert!(p.contains(&mean), "relaxation mean must lie in the constraint");
    }
    Ok(FractionalSolution {
        value: sol.optimum,
        mean,
        lottery,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub integral: IntegralSolution,
    pub fractional: Option<FractionalSolution>,
    /// Strict excess of the relaxation optimum over the integral optimum.
    pub gap: bool,
    #[serde(skip)]
    pub timings: Timings,
}

/// Wall-clock timings; kept out of the JSON so identical inputs produce
/// byte-identical reports.
#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub integral_ms: u128,
    pub fractional_ms: u128,
}

/// Run both solvers and flag a strict integrality gap.
pub fn detect_gap(inst: &Instance) -> Result<SolveReport, Error> {
    let t0 = Instant::now();
    let integral = solve_integral(inst)?;
    let integral_ms = t0.elapsed().as_millis();
    let t1 = Instant::now();
    let fractional = match solve_relaxation(inst) {
        Ok(f) => Some(f),
        Err(Error::NoFiniteOutcome) => None,
        Err(e) => return Err(e),
    };
    let fractional_ms = t1.elapsed().as_millis();
    let gap = match &fractional {
        None => false,
        Some(f) => Value::Fin(f.value.clone()) > integral.value,
    };
    if let (Some(f), Value::Fin(iv)) = (&fractional, &integral.value) {
        debug_assert!(f.value >= *iv, "relaxation dominates the integer program");
    }
    Ok(SolveReport {
        integral,
        fractional,
        gap,
        timings: Timings {
            integral_ms,
            fractional_ms,
        },
    })
}

/// Exact equality of the relaxation optimum and the integral optimum for an
/// M♯-concave objective over an integral polymatroid: the integer-optimizer
/// property checked head-on.
pub fn verify_thm_2_3(f: &FiniteIntFunction, p: &Polymatroid) -> Result<bool, Error> {
    if let Err(v) = is_msharp_concave_fn(f) {
        return Err(Error::Precondition(format!(
            "objective is not M♯-concave: {v}; route such instances through gap detection"
        )));
    }
    if f.index() != p.ground() {
        return Err(Error::Precondition(
            "objective and constraint must share the ground set".to_string(),
        ));
    }
    // Integral side: the best finite value on P's integer points.
    let mut integral: Option<Rat> = None;
    for x in p.integer_points().iter() {
        if let Value::Fin(v) = f.value(x) {
            if integral.as_ref().is_none_or(|b| v > *b) {
                integral = Some(v);
            }
        }
    }
    // Fractional side: lottery over dom f with mean in P.
    let dom_set = f.effective_domain();
    let dom: Vec<&IntVec> = dom_set.iter().collect();
    if dom.is_empty() {
        return Ok(integral.is_none());
    }
    let vars = IndexSet::new(dom.iter().map(|x| format!("lam{:?}", x)))?;
    let objective = RatVec::new(
        vars.clone(),
        dom.iter()
            .map(|x| f.value(x).expect_finite().clone())
            .collect(),
    )?;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for j in 0..dom.len() {
        lp.set_lower(j, Rat::zero());
    }
    let ones = RatVec::new(vars.clone(), vec![Rat::one(); dom.len()])?;
    lp.push(ones, Relation::Eq, Rat::one());
    let sf = p.set_fn();
    for s in 1..=sf.full_mask() {
        let coeffs = RatVec::new(
            vars.clone(),
            dom.iter()
                .map(|x| Rat::from_int(x.sum_over(mask_positions(s))))
                .collect(),
        )?;
        lp.push(coeffs, Relation::Le, Rat::from_int(sf.value(s)));
    }
    // The mean must also be nonnegative; supports may have negative
    // coordinates in general valuations, so the rows are explicit.
    for pos in 0..f.index().len() {
        let coeffs = RatVec::new(
            vars.clone(),
            dom.iter().map(|x| Rat::from_int(x.get(pos))).collect(),
        )?;
        lp.push(coeffs, Relation::Ge, Rat::zero());
    }
    let fractional = match lp::solve(&lp) {
        LpResult::Optimal(sol) => Some(sol.optimum),
        LpResult::Infeasible(_) => None,
        LpResult::Unbounded => unreachable!("lottery polytope is bounded"),
    };
    Ok(match (integral, fractional) {
        (None, None) => true,
        (Some(i), Some(fr)) => i == fr,
        _ => false,
    })
}

/// Concave-extension value of the aggregate at a fractional outcome; the
/// §-level sanity hook used by reports.
pub fn aggregate_extension(inst: &Instance, x: &RatVec) -> Result<(Rat, LotteryWitness), Error> {
    let g = inst.aggregate_function()?;
    concave_extension_eval(&g, x)
}
