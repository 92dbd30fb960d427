//! Competitive-equilibrium verification, supporting-price search, and
//! non-existence certification.
//!
//! Two price notions are kept apart throughout. Arc-only prices implement
//! the demand-membership definition verbatim (demands ignore the
//! constraint). Rent-based systems decentralize the constraint: the
//! polymatroid multipliers load onto sellers, so the seller of arc e
//! receives p_e − Σ_{S∋e} μ_S while the buyer pays p_e, with μ ≥ 0 and
//! μ_S = 0 on every subset that is slack at the designated outcome.

use serde::Serialize;

use crate::coords::{IndexSet, IntVec, RatVec};
use crate::error::Error;
use crate::lp::{self, Farkas, LinearProgram, Relation};
use crate::network::{demand, DemandSet, Instance};
use crate::polymatroid::{mask_positions, subset_names, SubsetMask};
use crate::rat::{Rat, Value};
use crate::solver;

/// Arc prices plus optional constraint rents with complementary slackness.
#[derive(Debug, Clone, Serialize)]
pub struct PriceSystem {
    pub prices: RatVec,
    /// Nonzero rents on tight constraint subsets; empty for arc-only
    /// systems.
    pub rents: Vec<RentEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RentEntry {
    pub subset: Vec<String>,
    #[serde(skip)]
    pub mask: SubsetMask,
    pub amount: Rat,
}

impl PriceSystem {
    pub fn arc_only(prices: RatVec) -> Self {
        PriceSystem {
            prices,
            rents: Vec::new(),
        }
    }

    pub fn has_rents(&self) -> bool {
        !self.rents.is_empty()
    }

    /// Total rent charged on an arc position (sellers bear it).
    fn tax(&self, arc_pos: usize) -> Rat {
        self.rents
            .iter()
            .filter(|r| r.mask & (1 << arc_pos) != 0)
            .map(|r| r.amount.clone())
            .sum()
    }
}

/// Per-agent demand check at the effective prices.
#[derive(Debug, Clone, Serialize)]
pub struct AgentCheck {
    pub agent: String,
    pub bundle: IntVec,
    pub surplus: Value,
    pub demand: DemandSet,
    pub in_demand: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CEReport {
    pub outcome: IntVec,
    pub prices: PriceSystem,
    pub agents: Vec<AgentCheck>,
    /// μ_S > 0 only on subsets tight at the outcome.
    pub comp_slack_ok: bool,
    /// Every agent's bundle lies in its demand set and complementary
    /// slackness holds for the rents.
    pub verdict: bool,
}

/// Effective local prices of an agent: rents are subtracted on the arcs the
/// agent sells; purchases trade at the raw arc price.
fn effective_local_prices(
    inst: &Instance,
    agent: &str,
    ps: &PriceSystem,
) -> Result<RatVec, Error> {
    let coords = inst
        .graph
        .agent_coords(agent)
        .ok_or_else(|| Error::Validation(format!("unknown agent `{agent}`")))?;
    let mut local = inst.graph.local_prices(agent, &ps.prices)?;
    for (k, (&global, &sign)) in coords.global_pos.iter().zip(&coords.signs).enumerate() {
        if sign > 0 {
            let effective = local.get(k).clone() - ps.tax(global);
            local.set(k, effective);
        }
    }
    Ok(local)
}

/// Definition-level equilibrium check: is every agent's net flow in its
/// demand set at the (effective) prices?
pub fn verify_ce(inst: &Instance, x: &IntVec, ps: &PriceSystem) -> Result<CEReport, Error> {
    if !inst.is_feasible_outcome(x)? {
        return Err(Error::Precondition(
            "outcome is not feasible for the instance".to_string(),
        ));
    }
    let mut comp_slack_ok = true;
    if ps.has_rents() {
        let p = inst.constraint.as_ref().ok_or_else(|| {
            Error::Precondition("rents supplied but the instance has no constraint".to_string())
        })?;
        for rent in &ps.rents {
            if rent.amount.is_negative() {
                return Err(Error::Validation(format!(
                    "rent on {{{}}} is negative",
                    rent.subset.join(", ")
                )));
            }
            if rent.amount.is_positive() {
                let tight = x.sum_over(mask_positions(rent.mask))
                    == p.set_fn().value(rent.mask);
                if !tight {
                    comp_slack_ok = false;
                }
            }
        }
    }
    let flows = inst.graph.outcome_to_netflow(x)?;
    let mut agents = Vec::new();
    let mut all_in_demand = true;
    for agent in inst.graph.agents() {
        let valuation = inst.valuation(agent);
        let bundle = flows.agent(agent).expect("net flow covers every agent");
        let local = effective_local_prices(inst, agent, ps)?;
        let d = demand(valuation, &local)?;
        let in_demand = d.contains(bundle);
        all_in_demand &= in_demand;
        agents.push(AgentCheck {
            agent: agent.clone(),
            bundle: bundle.clone(),
            surplus: crate::network::surplus(valuation, bundle, &local),
            demand: d,
            in_demand,
        });
    }
    Ok(CEReport {
        outcome: x.clone(),
        prices: ps.clone(),
        agents,
        comp_slack_ok,
        verdict: all_in_demand && comp_slack_ok,
    })
}

/// One demand inequality of the price-feasibility system: the designated
/// bundle must beat this alternative for this agent.
#[derive(Debug, Clone, Serialize)]
pub struct DeviationRow {
    pub agent: String,
    pub alternative: IntVec,
}

/// An infeasible price LP with its Farkas certificate. The LP is rebuilt
/// deterministically from the instance, the outcome, and the listed tight
/// sets, so third parties can re-verify by pure arithmetic.
#[derive(Debug, Clone, Serialize)]
pub struct PriceCertificate {
    pub outcome: IntVec,
    pub rows: Vec<DeviationRow>,
    /// Tight subsets whose rents were free variables (empty for arc-only).
    pub tight_sets: Vec<Vec<String>>,
    pub farkas: Farkas,
}

#[derive(Debug, Clone, Serialize)]
pub enum Refusal {
    /// The demand system is infeasible; the certificate proves it.
    Lp(PriceCertificate),
    /// The outcome hands this agent a bundle it values at −∞; no prices
    /// can place it in the demand set.
    InfeasibleBundle { agent: String },
}

#[derive(Debug, Clone, Serialize)]
pub enum PriceSearch {
    Found(PriceSystem),
    Unsupported(Refusal),
}

struct PriceLp {
    lp: LinearProgram,
    rows: Vec<DeviationRow>,
    tight_masks: Vec<SubsetMask>,
    num_arcs: usize,
}

/// Demand inequalities over (p, μ): for every agent and every finite
/// alternative bundle, surplus at the designated bundle ≥ surplus at the
/// alternative.
fn build_price_lp(
    inst: &Instance,
    x: &IntVec,
    tight_masks: &[SubsetMask],
) -> Result<Result<PriceLp, Refusal>, Error> {
    let arcs = inst.graph.arcs();
    let num_arcs = arcs.len();
    let names: Vec<String> = arcs
        .iter()
        .map(|a| format!("p:{}", a.id))
        .chain(tight_masks.iter().map(|&m| {
            format!("mu:{{{}}}", subset_names(inst.graph.arc_index(), m).join(","))
        }))
        .collect();
    let vars = IndexSet::new(names)?;
    let mut lp = LinearProgram::feasibility(vars.clone());
    for (k, _) in tight_masks.iter().enumerate() {
        lp.set_lower(num_arcs + k, Rat::zero());
    }
    let flows = inst.graph.outcome_to_netflow(x)?;
    let mut rows = Vec::new();
    for agent in inst.graph.agents() {
        let valuation = inst.valuation(agent);
        let bundle = flows.agent(agent).expect("net flow covers every agent");
        let Value::Fin(bundle_value) = valuation.table.value(bundle) else {
            return Ok(Err(Refusal::InfeasibleBundle {
                agent: agent.clone(),
            }));
        };
        let coords = inst.graph.agent_coords(agent).expect("validated");
        for (alt, v) in valuation.table.entries() {
            let Value::Fin(alt_value) = v else { continue };
            if alt == bundle {
                continue;
            }
            let mut coeffs = RatVec::zero(vars.clone());
            for (k, (&global, &sign)) in
                coords.global_pos.iter().zip(&coords.signs).enumerate()
            {
                let delta = Rat::from_int(bundle.get(k) - alt.get(k));
                if delta.is_zero() {
                    continue;
                }
                let cur = coeffs.get(global).clone();
                coeffs.set(global, cur + &delta);
                if sign > 0 {
                    for (t, &mask) in tight_masks.iter().enumerate() {
                        if mask & (1 << global) != 0 {
                            let pos = num_arcs + t;
                            let cur = coeffs.get(pos).clone();
                            coeffs.set(pos, cur - &delta);
                        }
                    }
                }
            }
            lp.push(coeffs, Relation::Ge, alt_value.clone() - &bundle_value);
            rows.push(DeviationRow {
                agent: agent.clone(),
                alternative: alt.clone(),
            });
        }
    }
    Ok(Ok(PriceLp {
        lp,
        rows,
        tight_masks: tight_masks.to_vec(),
        num_arcs,
    }))
}

fn search_prices(inst: &Instance, x: &IntVec, tight_masks: &[SubsetMask]) -> Result<PriceSearch, Error> {
    let built = match build_price_lp(inst, x, tight_masks)? {
        Ok(b) => b,
        Err(refusal) => return Ok(PriceSearch::Unsupported(refusal)),
    };
    match lp::check_feasible(&built.lp) {
        lp::Feasibility::Feasible(witness) => {
            let prices = RatVec::new(
                inst.graph.arc_index().clone(),
                (0..built.num_arcs).map(|j| witness.get(j).clone()).collect(),
            )?;
            let rents = built
                .tight_masks
                .iter()
                .enumerate()
                .filter(|(k, _)| witness.get(built.num_arcs + k).is_positive())
                .map(|(k, &mask)| RentEntry {
                    subset: subset_names(inst.graph.arc_index(), mask),
                    mask,
                    amount: witness.get(built.num_arcs + k).clone(),
                })
                .collect();
            let ps = PriceSystem {
                prices,
                rents,
            };
            // Soundness round trip: a found system must verify.
            let report = verify_ce(inst, x, &ps)?;
            assert!(
                report.verdict,
                "found price system failed the demand check at {x:?}"
            );
            Ok(PriceSearch::Found(ps))
        }
        lp::Feasibility::Infeasible(farkas) => {
            lp::verify_farkas(&built.lp, &farkas).expect("certificate re-verifies");
            Ok(PriceSearch::Unsupported(Refusal::Lp(PriceCertificate {
                outcome: x.clone(),
                rows: built.rows,
                tight_sets: built
                    .tight_masks
                    .iter()
                    .map(|&m| subset_names(inst.graph.arc_index(), m))
                    .collect(),
                farkas,
            })))
        }
    }
}

/// Arc-price support for the outcome under the raw demand definition.
pub fn find_arc_prices(inst: &Instance, x: &IntVec) -> Result<PriceSearch, Error> {
    if !inst.is_feasible_outcome(x)? {
        return Err(Error::Precondition(
            "outcome is not feasible for the instance".to_string(),
        ));
    }
    search_prices(inst, x, &[])
}

/// Support by arc prices plus nonnegative rents on the subsets tight at the
/// outcome (complementary slackness built in: slack sets get no variable).
pub fn find_prices_with_rents(inst: &Instance, x: &IntVec) -> Result<PriceSearch, Error> {
    let p = inst.constraint.as_ref().ok_or_else(|| {
        Error::Precondition("rent search requires a constraint".to_string())
    })?;
    if !inst.is_feasible_outcome(x)? {
        return Err(Error::Precondition(
            "outcome is not feasible for the instance".to_string(),
        ));
    }
    let f = p.set_fn();
    let tight: Vec<SubsetMask> = (1..=f.full_mask())
        .filter(|&s| x.sum_over(mask_positions(s)) == f.value(s))
        .collect();
    search_prices(inst, x, &tight)
}

/// Re-verify a price certificate by rebuilding the LP and checking the
/// Farkas combination arithmetically.
pub fn reverify_certificate(inst: &Instance, cert: &PriceCertificate) -> Result<(), String> {
    let masks: Vec<SubsetMask> = cert
        .tight_sets
        .iter()
        .map(|names| {
            let mut mask = 0;
            for n in names {
                let pos = inst
                    .graph
                    .arc_index()
                    .position(n)
                    .ok_or_else(|| format!("unknown arc `{n}` in certificate"))?;
                mask |= 1 << pos;
            }
            Ok::<SubsetMask, String>(mask)
        })
        .collect::<Result<_, _>>()?;
    let built = build_price_lp(inst, &cert.outcome, &masks)
        .map_err(|e| e.to_string())?
        .map_err(|_| "certificate outcome hands some agent a −∞ bundle".to_string())?;
    if built.rows.len() != cert.rows.len() {
        return Err(format!(
            "certificate row count {} differs from rebuilt LP ({})",
            cert.rows.len(),
            built.rows.len()
        ));
    }
    lp::verify_farkas(&built.lp, &cert.farkas)
}

/// Per-outcome certificates covering every feasible integral outcome with
/// finite aggregate value.
#[derive(Debug, Clone, Serialize)]
pub struct NonexistenceCertificate {
    pub entries: Vec<OutcomeCertificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeCertificate {
    pub outcome: IntVec,
    pub arc_only: PriceCertificate,
    /// Present when the instance has a constraint.
    pub with_rents: Option<PriceCertificate>,
}

#[derive(Debug, Clone, Serialize)]
pub enum CertifyResult {
    Exists {
        outcome: IntVec,
        prices: PriceSystem,
        report: CEReport,
    },
    Certificate(NonexistenceCertificate),
}

/// Search every feasible integral outcome for supporting prices (rent-based
/// when a constraint is present, arc-only otherwise); the first supported
/// outcome wins, else the complete bundle of Farkas certificates is
/// returned.
pub fn certify_nonexistence(inst: &Instance) -> Result<CertifyResult, Error> {
    solver::check_desk_bounds(inst)?;
    let mut entries = Vec::new();
    for x in inst.graph.box_points() {
        if !inst.is_feasible_outcome(&x)? {
            continue;
        }
        if !inst.aggregate_value(&x)?.is_finite() {
            continue;
        }
        if inst.constraint.is_some() {
            match find_prices_with_rents(inst, &x)? {
                PriceSearch::Found(ps) => {
                    let report = verify_ce(inst, &x, &ps)?;
                    return Ok(CertifyResult::Exists {
                        outcome: x,
                        prices: ps,
                        report,
                    });
                }
                PriceSearch::Unsupported(Refusal::Lp(rent_cert)) => {
                    // Rent-infeasibility implies arc-only infeasibility
                    // (dropping the μ variables shrinks the feasible set).
                    let arc_cert = match find_arc_prices(inst, &x)? {
                        PriceSearch::Unsupported(Refusal::Lp(c)) => c,
                        other => panic!(
                            "arc-only search must fail when the rent search does, got {other:?}"
                        ),
                    };
                    entries.push(OutcomeCertificate {
                        outcome: x,
                        arc_only: arc_cert,
                        with_rents: Some(rent_cert),
                    });
                }
                PriceSearch::Unsupported(Refusal::InfeasibleBundle { .. }) => {
                    unreachable!("finite aggregate value implies finite bundles")
                }
            }
        } else {
            match find_arc_prices(inst, &x)? {
                PriceSearch::Found(ps) => {
                    let report = verify_ce(inst, &x, &ps)?;
                    return Ok(CertifyResult::Exists {
                        outcome: x,
                        prices: ps,
                        report,
                    });
                }
                PriceSearch::Unsupported(Refusal::Lp(cert)) => {
                    entries.push(OutcomeCertificate {
                        outcome: x,
                        arc_only: cert,
                        with_rents: None,
                    });
                }
                PriceSearch::Unsupported(Refusal::InfeasibleBundle { .. }) => {
                    unreachable!("finite aggregate value implies finite bundles")
                }
            }
        }
    }
    Ok(CertifyResult::Certificate(NonexistenceCertificate {
        entries,
    }))
}

/// First-welfare check: a verified equilibrium outcome attains the integral
/// optimum — over the constraint set for rent systems, over the capacity
/// box for arc-only prices.
pub fn check_first_welfare(inst: &Instance, x: &IntVec, ps: &PriceSystem) -> Result<bool, Error> {
    let report = verify_ce(inst, x, ps)?;
    if !report.verdict {
        return Err(Error::Precondition(
            "price system does not support the outcome".to_string(),
        ));
    }
    let optimum = if ps.has_rents() {
        solver::solve_integral(inst)?
    } else {
        let mut unconstrained = inst.clone();
        unconstrained.constraint = None;
        solver::solve_integral(&unconstrained)?
    };
    Ok(inst.aggregate_value(x)? == optimum.value)
}
