//! The multigraph economy: agents, oriented arcs, outcome ↔ net-flow
//! conversion, surplus, demand correspondences, and the separability
//! classification used by the two-sided existence result.
//!
//! Sign conventions are load-bearing everywhere: an agent's net flow is
//! +x_e on arcs it sells and −x_e on arcs it buys, and valuation domains
//! must declare every incident coordinate explicitly.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convexity::{is_msharp_concave_fn, FiniteIntFunction, PointSet};
use crate::coords::{IndexSet, IntVec, RatVec};
use crate::error::Error;
use crate::polymatroid::{Polymatroid, SetFunctionDoc};
use crate::rat::{Rat, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TradeArc {
    pub id: String,
    pub seller: String,
    pub buyer: String,
    pub capacity: i64,
}

/// Agent-local view of the incident arcs, in global arc order.
#[derive(Debug, Clone)]
pub struct AgentCoords {
    pub index: Arc<IndexSet>,
    /// Global arc position per local coordinate.
    pub global_pos: Vec<usize>,
    /// +1 where the agent sells the arc, −1 where it buys.
    pub signs: Vec<i64>,
}

impl AgentCoords {
    pub fn outgoing_positions(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&i| self.signs[i] > 0).collect()
    }

    pub fn incoming_positions(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&i| self.signs[i] < 0).collect()
    }
}

/// Directed multigraph of agents and trades.
#[derive(Debug, Clone)]
pub struct TradeGraph {
    agents: Vec<String>,
    arcs: Vec<TradeArc>,
    arc_index: Arc<IndexSet>,
    coords: BTreeMap<String, AgentCoords>,
}

impl TradeGraph {
    pub fn new(agents: Vec<String>, arcs: Vec<TradeArc>) -> Result<Self, Error> {
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].contains(a) {
                return Err(Error::instance(
                    format!("agents[{i}]"),
                    format!("duplicate agent `{a}`"),
                ));
            }
        }
        for (i, arc) in arcs.iter().enumerate() {
            if arc.seller == arc.buyer {
                return Err(Error::instance(
                    format!("arcs[{i}]"),
                    "seller and buyer must differ".to_string(),
                ));
            }
            for (role, agent) in [("seller", &arc.seller), ("buyer", &arc.buyer)] {
                if !agents.contains(agent) {
                    return Err(Error::instance(
                        format!("arcs[{i}].{role}"),
                        format!("unknown agent `{agent}`"),
                    ));
                }
            }
            if arc.capacity < 1 {
                return Err(Error::instance(
                    format!("arcs[{i}].capacity"),
                    "capacity must be a positive integer".to_string(),
                ));
            }
        }
        let arc_index = IndexSet::new(arcs.iter().map(|a| a.id.clone())).map_err(|_| {
            Error::instance("arcs", "arc ids must be unique".to_string())
        })?;
        let mut coords = BTreeMap::new();
        for agent in &agents {
            let mut names = Vec::new();
            let mut global_pos = Vec::new();
            let mut signs = Vec::new();
            for (pos, arc) in arcs.iter().enumerate() {
                if arc.seller == *agent {
                    names.push(arc.id.clone());
                    global_pos.push(pos);
                    signs.push(1);
                } else if arc.buyer == *agent {
                    names.push(arc.id.clone());
                    global_pos.push(pos);
                    signs.push(-1);
                }
            }
            coords.insert(
                agent.clone(),
                AgentCoords {
                    index: IndexSet::new(names)?,
                    global_pos,
                    signs,
                },
            );
        }
        Ok(TradeGraph {
            agents,
            arcs,
            arc_index,
            coords,
        })
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn arcs(&self) -> &[TradeArc] {
        &self.arcs
    }

    pub fn arc_index(&self) -> &Arc<IndexSet> {
        &self.arc_index
    }

    pub fn agent_coords(&self, agent: &str) -> Option<&AgentCoords> {
        self.coords.get(agent)
    }

    pub fn capacities(&self) -> Vec<i64> {
        self.arcs.iter().map(|a| a.capacity).collect()
    }

    /// 0 ≤ x_e ≤ capacity(e) for every arc.
    pub fn validate_outcome(&self, x: &IntVec) -> Result<(), Error> {
        if x.index() != &self.arc_index {
            return Err(Error::Validation(
                "outcome must be indexed by the arc set".to_string(),
            ));
        }
        for (pos, arc) in self.arcs.iter().enumerate() {
            let v = x.get(pos);
            if v < 0 || v > arc.capacity {
                return Err(Error::Validation(format!(
                    "outcome violates capacity on arc `{}`: {v} not in 0..={}",
                    arc.id, arc.capacity
                )));
            }
        }
        Ok(())
    }

    /// Per-agent signed net flows of an outcome: +x_e for the seller of e,
    /// −x_e for the buyer.
    pub fn outcome_to_netflow(&self, x: &IntVec) -> Result<NetFlow, Error> {
        self.validate_outcome(x)?;
        let mut flows = BTreeMap::new();
        for agent in &self.agents {
            let c = &self.coords[agent];
            let vals = c
                .global_pos
                .iter()
                .zip(&c.signs)
                .map(|(&pos, &sign)| sign * x.get(pos))
                .collect();
            flows.insert(agent.clone(), IntVec::new(c.index.clone(), vals)?);
        }
        Ok(NetFlow { flows })
    }

    /// Reconstruct the outcome from per-agent net flows, checking the
    /// pairwise feasibility equations y_e^i + y_e^j = 0 and the sign
    /// conventions.
    pub fn netflow_to_outcome(&self, flows: &NetFlow) -> Result<IntVec, Error> {
        let mut x = IntVec::zero(self.arc_index.clone());
        for (pos, arc) in self.arcs.iter().enumerate() {
            let seller = flows.agent(&arc.seller).ok_or_else(|| {
                Error::Validation(format!("missing net flow for agent `{}`", arc.seller))
            })?;
            let buyer = flows.agent(&arc.buyer).ok_or_else(|| {
                Error::Validation(format!("missing net flow for agent `{}`", arc.buyer))
            })?;
            let ys = seller.get_named(&arc.id).ok_or_else(|| {
                Error::Validation(format!("seller flow missing arc `{}`", arc.id))
            })?;
            let yb = buyer.get_named(&arc.id).ok_or_else(|| {
                Error::Validation(format!("buyer flow missing arc `{}`", arc.id))
            })?;
            if ys + yb != 0 {
                return Err(Error::Validation(format!(
                    "net flows on arc `{}` do not cancel: {ys} + {yb} != 0",
                    arc.id
                )));
            }
            if ys < 0 {
                return Err(Error::Validation(format!(
                    "seller flow on arc `{}` must be nonnegative",
                    arc.id
                )));
            }
            x = x.shifted(pos, ys);
        }
        self.validate_outcome(&x)?;
        Ok(x)
    }

    /// All outcomes of the capacity box, in lexicographic order.
    pub fn box_points(&self) -> Vec<IntVec> {
        let n = self.arcs.len();
        let caps = self.capacities();
        let mut out = Vec::new();
        let mut current = vec![0i64; n];
        loop {
            out.push(IntVec::new(self.arc_index.clone(), current.clone()).expect("shape"));
            let mut pos = n;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if current[pos] < caps[pos] {
                    current[pos] += 1;
                    current[pos + 1..n].fill(0);
                    break;
                }
            }
        }
    }

    /// Restrict an arc price vector to an agent's incident coordinates.
    pub fn local_prices(&self, agent: &str, prices: &RatVec) -> Result<RatVec, Error> {
        debug_assert_eq!(prices.index(), &self.arc_index);
        let c = self
            .coords
            .get(agent)
            .ok_or_else(|| Error::Validation(format!("unknown agent `{agent}`")))?;
        let vals = c.global_pos.iter().map(|&p| prices.get(p).clone()).collect();
        RatVec::new(c.index.clone(), vals)
    }
}

/// Per-agent signed net flows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetFlow {
    flows: BTreeMap<String, IntVec>,
}

impl NetFlow {
    pub fn agent(&self, agent: &str) -> Option<&IntVec> {
        self.flows.get(agent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &IntVec)> + '_ {
        self.flows.iter()
    }
}

/// An agent's valuation over its incident net flows.
#[derive(Debug, Clone)]
pub struct AgentValuation {
    pub agent: String,
    pub table: FiniteIntFunction,
}

impl AgentValuation {
    /// Validate sign conventions and capacity bounds against the graph.
    pub fn new(graph: &TradeGraph, agent: String, table: FiniteIntFunction) -> Result<Self, Error> {
        let coords = graph
            .agent_coords(&agent)
            .ok_or_else(|| Error::Validation(format!("unknown agent `{agent}`")))?;
        if table.index() != &coords.index {
            return Err(Error::Validation(format!(
                "valuation of `{agent}` must be indexed by its incident arcs {:?}",
                coords.index.names()
            )));
        }
        for (point, _) in table.entries() {
            for (local, (&global, &sign)) in
                coords.global_pos.iter().zip(&coords.signs).enumerate()
            {
                let v = point.get(local);
                let cap = graph.arcs()[global].capacity;
                let ok = if sign > 0 {
                    0 <= v && v <= cap
                } else {
                    -cap <= v && v <= 0
                };
                if !ok {
                    let arc = &graph.arcs()[global].id;
                    return Err(Error::Validation(format!(
                        "valuation point {point:?} of `{agent}` violates the sign \
                         convention or capacity on arc `{arc}`"
                    )));
                }
            }
        }
        Ok(AgentValuation { agent, table })
    }
}

/// Full agent-surplus of a bundle at local prices: w(y) + p·y. The single
/// inner product makes sellers earn and buyers pay. −∞ propagates.
pub fn surplus(valuation: &AgentValuation, y: &IntVec, local_prices: &RatVec) -> Value {
    valuation.table.value(y) + &y.dot(local_prices)
}

#[derive(Debug, Clone, Serialize)]
pub struct DemandSet {
    pub points: PointSet,
    pub best_surplus: Value,
}

impl DemandSet {
    pub fn contains(&self, y: &IntVec) -> bool {
        self.points.contains(y)
    }
}

/// Full argmax of surplus over the declared valuation domain (points off
/// the table are −∞ and never demanded).
pub fn demand(valuation: &AgentValuation, local_prices: &RatVec) -> Result<DemandSet, Error> {
    let mut best = Value::NegInf;
    let mut points = PointSet::empty(valuation.table.index().clone());
    for (y, v) in valuation.table.entries() {
        if !v.is_finite() {
            continue;
        }
        let s = v.clone() + &y.dot(local_prices);
        if s > best {
            best = s.clone();
            points = PointSet::empty(valuation.table.index().clone());
        }
        if s == best {
            points.insert(y.clone());
        }
    }
    if points.is_empty() {
        return Err(Error::Validation(format!(
            "agent `{}` has an empty effective domain",
            valuation.agent
        )));
    }
    Ok(DemandSet {
        points,
        best_surplus: best,
    })
}

/// The efficient-allocation instance: graph, valuations, and the optional
/// polymatroid constraint on outcomes (absent means the capacity box).
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: TradeGraph,
    valuations: BTreeMap<String, AgentValuation>,
    pub constraint: Option<Polymatroid>,
}

impl Instance {
    pub fn new(
        graph: TradeGraph,
        valuations: Vec<AgentValuation>,
        constraint: Option<Polymatroid>,
    ) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for v in valuations {
            if !graph.agents().contains(&v.agent) {
                return Err(Error::Validation(format!("unknown agent `{}`", v.agent)));
            }
            let agent = v.agent.clone();
            if map.insert(agent.clone(), v).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate valuation for agent `{agent}`"
                )));
            }
        }
        for agent in graph.agents() {
            if !map.contains_key(agent) {
                return Err(Error::Validation(format!(
                    "missing valuation for agent `{agent}`"
                )));
            }
        }
        if let Some(p) = &constraint {
            if p.ground() != graph.arc_index() {
                return Err(Error::Validation(
                    "constraint ground set must equal the arc set".to_string(),
                ));
            }
        }
        Ok(Instance {
            graph,
            valuations: map,
            constraint,
        })
    }

    pub fn valuation(&self, agent: &str) -> &AgentValuation {
        &self.valuations[agent]
    }

    pub fn valuations(&self) -> impl Iterator<Item = &AgentValuation> + '_ {
        self.valuations.values()
    }

    /// Σ_i w_i(y^i(x)); −∞ if any agent is infeasible at x.
    pub fn aggregate_value(&self, x: &IntVec) -> Result<Value, Error> {
        let flows = self.graph.outcome_to_netflow(x)?;
        let mut total = Value::zero();
        for agent in self.graph.agents() {
            let y = flows.agent(agent).expect("net flow covers every agent");
            total = total + self.valuations[agent].table.value(y);
        }
        Ok(total)
    }

    /// The aggregate as a function on outcome space, tabulated over the
    /// capacity box (entries with −∞ kept as sentinels).
    pub fn aggregate_function(&self) -> Result<FiniteIntFunction, Error> {
        let entries: Vec<(IntVec, Value)> = self
            .graph
            .box_points()
            .into_iter()
            .map(|x| {
                let v = self.aggregate_value(&x)?;
                Ok((x, v))
            })
            .collect::<Result<_, Error>>()?;
        FiniteIntFunction::new(self.graph.arc_index().clone(), entries)
    }

    /// Outcome feasibility: capacity box plus constraint membership when a
    /// constraint is present.
    pub fn is_feasible_outcome(&self, x: &IntVec) -> Result<bool, Error> {
        self.graph.validate_outcome(x)?;
        Ok(match &self.constraint {
            Some(p) => p.contains_int(x),
            None => true,
        })
    }

    pub fn classify_structure(&self) -> StructureReport {
        let agents: Vec<AgentStructure> = self
            .graph
            .agents()
            .iter()
            .map(|a| classify_agent(&self.graph, &self.valuations[a]))
            .collect();
        let two_sided = agents.iter().all(|a| a.role != Role::Both);
        let all_separable = agents.iter().all(|a| a.separable);
        let orientation_outgoing_msharp = all_separable
            && agents
                .iter()
                .all(|a| a.outgoing_msharp == Some(true) && a.incoming_linear == Some(true));
        let orientation_incoming_msharp = all_separable
            && agents
                .iter()
                .all(|a| a.incoming_msharp == Some(true) && a.outgoing_linear == Some(true));
        let mixed_condition = agents
            .iter()
            .all(|a| a.outgoing_slices_msharp && a.incoming_slices_linear);
        StructureReport {
            two_sided,
            all_separable,
            orientation_outgoing_msharp,
            orientation_incoming_msharp,
            thm31_hypotheses: orientation_outgoing_msharp || orientation_incoming_msharp,
            mixed_condition,
            agents,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    /// Only outgoing arcs.
    Seller,
    /// Only incoming arcs.
    Buyer,
    Both,
    /// No incident arcs.
    Inactive,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgentStructure {
    pub agent: String,
    pub role: Role,
    /// Product domain over the δ₊/δ₋ split plus the rectangle identity.
    pub separable: bool,
    pub outgoing_msharp: Option<bool>,
    pub outgoing_linear: Option<bool>,
    pub incoming_msharp: Option<bool>,
    pub incoming_linear: Option<bool>,
    /// Every slice with incoming flows fixed is M♯-concave in the outgoing
    /// coordinates.
    pub outgoing_slices_msharp: bool,
    /// Every slice with outgoing flows fixed is affine in the incoming
    /// coordinates.
    pub incoming_slices_linear: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub agents: Vec<AgentStructure>,
    pub two_sided: bool,
    pub all_separable: bool,
    /// Separable with M♯-concave outgoing parts and linear incoming parts.
    pub orientation_outgoing_msharp: bool,
    /// The mirrored orientation (M♯-concave incoming, linear outgoing).
    pub orientation_incoming_msharp: bool,
    /// Either consistent orientation holds for every agent.
    pub thm31_hypotheses: bool,
    pub mixed_condition: bool,
}

fn classify_agent(graph: &TradeGraph, valuation: &AgentValuation) -> AgentStructure {
    let coords = graph.agent_coords(&valuation.agent).expect("validated");
    let out_pos = coords.outgoing_positions();
    let in_pos = coords.incoming_positions();
    let role = match (out_pos.is_empty(), in_pos.is_empty()) {
        (false, true) => Role::Seller,
        (true, false) => Role::Buyer,
        (false, false) => Role::Both,
        (true, true) => Role::Inactive,
    };

    let project = |point: &IntVec, positions: &[usize]| -> Vec<i64> {
        positions.iter().map(|&p| point.get(p)).collect()
    };
    let dom: Vec<(&IntVec, &Rat)> = valuation
        .table
        .entries()
        .filter_map(|(p, v)| v.finite().map(|r| (p, r)))
        .collect();

    // Separability: the domain is a product set over the split and the
    // rectangle identity w(a,b)+w(a',b') = w(a,b')+w(a',b) holds.
    let mut value_at: BTreeMap<(Vec<i64>, Vec<i64>), Rat> = BTreeMap::new();
    let mut outs: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut ins: BTreeSet<Vec<i64>> = BTreeSet::new();
    for (p, v) in &dom {
        let a = project(p, &out_pos);
        let b = project(p, &in_pos);
        outs.insert(a.clone());
        ins.insert(b.clone());
        value_at.insert((a, b), (*v).clone());
    }
    let product_domain = value_at.len() == outs.len() * ins.len();
    let mut separable = product_domain && !dom.is_empty();
    if separable {
        'rect: for a in &outs {
            for a2 in &outs {
                for b in &ins {
                    for b2 in &ins {
                        let lhs = value_at[&(a.clone(), b.clone())].clone()
                            + &value_at[&(a2.clone(), b2.clone())];
                        let rhs = value_at[&(a.clone(), b2.clone())].clone()
                            + &value_at[&(a2.clone(), b.clone())];
                        if lhs != rhs {
                            separable = false;
                            break 'rect;
                        }
                    }
                }
            }
        }
    }

    let out_index = IndexSet::new(out_pos.iter().map(|&p| coords.index.name(p))).expect("names");
    let in_index = IndexSet::new(in_pos.iter().map(|&p| coords.index.name(p))).expect("names");

    let (mut outgoing_msharp, mut outgoing_linear) = (None, None);
    let (mut incoming_msharp, mut incoming_linear) = (None, None);
    if separable {
        // w(a,b) = w⁺(a) + w⁻(b) with w⁺(a) = w(a,b₀), w⁻(b) = w(a₀,b) − w(a₀,b₀).
        let b0 = ins.iter().next().expect("nonempty").clone();
        let a0 = outs.iter().next().expect("nonempty").clone();
        let base = value_at[&(a0.clone(), b0.clone())].clone();
        let out_part = make_table(&out_index, outs.iter().map(|a| {
            (a.clone(), value_at[&(a.clone(), b0.clone())].clone())
        }));
        let in_part = make_table(&in_index, ins.iter().map(|b| {
            (b.clone(), value_at[&(a0.clone(), b.clone())].clone() - &base)
        }));
        outgoing_msharp = Some(is_msharp_concave_fn(&out_part).is_ok());
        outgoing_linear = Some(is_affine(&out_part));
        incoming_msharp = Some(is_msharp_concave_fn(&in_part).is_ok());
        incoming_linear = Some(is_affine(&in_part));
    }

    // Mixed condition: slices instead of parts; no product domain needed.
    let mut outgoing_slices_msharp = true;
    for b in &ins {
        let slice = make_table(
            &out_index,
            dom.iter().filter(|(p, _)| project(p, &in_pos) == *b).map(|(p, v)| {
                (project(p, &out_pos), (*v).clone())
            }),
        );
        if is_msharp_concave_fn(&slice).is_err() {
            outgoing_slices_msharp = false;
            break;
        }
    }
    let mut incoming_slices_linear = true;
    for a in &outs {
        let slice = make_table(
            &in_index,
            dom.iter().filter(|(p, _)| project(p, &out_pos) == *a).map(|(p, v)| {
                (project(p, &in_pos), (*v).clone())
            }),
        );
        if !is_affine(&slice) {
            incoming_slices_linear = false;
            break;
        }
    }

    AgentStructure {
        agent: valuation.agent.clone(),
        role,
        separable,
        outgoing_msharp,
        outgoing_linear,
        incoming_msharp,
        incoming_linear,
        outgoing_slices_msharp,
        incoming_slices_linear,
    }
}

fn make_table(
    index: &Arc<IndexSet>,
    entries: impl IntoIterator<Item = (Vec<i64>, Rat)>,
) -> FiniteIntFunction {
    let entries: Vec<(IntVec, Value)> = entries
        .into_iter()
        .map(|(vals, v)| {
            (
                IntVec::new(index.clone(), vals).expect("shape"),
                Value::Fin(v),
            )
        })
        .collect();
    FiniteIntFunction::new(index.clone(), entries).expect("projection tables are nonempty")
}

/// Exact affine-fit consistency: is there (c, d) with f(z) = c·z + d on the
/// whole effective domain? Decided by Gaussian elimination over the
/// rationals.
fn is_affine(f: &FiniteIntFunction) -> bool {
    let n = f.index().len();
    let rows: Vec<(Vec<Rat>, Rat)> = f
        .entries()
        .filter_map(|(p, v)| v.finite().map(|r| (p, r)))
        .map(|(p, r)| {
            let mut row: Vec<Rat> = (0..n).map(|i| Rat::from_int(p.get(i))).collect();
            row.push(Rat::one()); // the constant term
            (row, r.clone())
        })
        .collect();
    exactly_solvable(rows, n + 1)
}

/// Whether the linear system (rows, rhs) has an exact solution.
fn exactly_solvable(mut rows: Vec<(Vec<Rat>, Rat)>, cols: usize) -> bool {
    let mut col = 0;
    let mut row = 0;
    while col < cols && row < rows.len() {
        let Some(pivot) = (row..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            col += 1;
            continue;
        };
        rows.swap(row, pivot);
        let inv = rows[row].0[col].recip();
        for c in col..cols {
            rows[row].0[c] = rows[row].0[c].clone() * &inv;
        }
        rows[row].1 = rows[row].1.clone() * &inv;
        for r in 0..rows.len() {
            if r != row && !rows[r].0[col].is_zero() {
                let factor = rows[r].0[col].clone();
                for c in col..cols {
                    let delta = factor.clone() * &rows[row].0[c];
                    rows[r].0[c] -= &delta;
                }
                let delta = factor * &rows[row].1;
                rows[r].1 -= &delta;
            }
        }
        row += 1;
        col += 1;
    }
    // Consistent iff no zero-row has nonzero rhs.
    rows.iter()
        .all(|(r, rhs)| r.iter().any(|c| !c.is_zero()) || rhs.is_zero())
}

// --------------------------------------------------------------------------
// Instance document (JSON, UTF-8)
// --------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub agents: Vec<String>,
    pub arcs: Vec<ArcDoc>,
    pub valuations: Vec<ValuationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<SetFunctionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ArcDoc {
    pub id: String,
    pub seller: String,
    pub buyer: String,
    /// Defaults to 1: the 0/1 contract case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValuationDoc {
    pub agent: String,
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EntryDoc {
    pub flows: BTreeMap<String, i64>,
    pub value: Value,
}

impl Instance {
    pub fn from_doc(doc: &InstanceDoc) -> Result<Self, Error> {
        let arcs: Vec<TradeArc> = doc
            .arcs
            .iter()
            .map(|a| TradeArc {
                id: a.id.clone(),
                seller: a.seller.clone(),
                buyer: a.buyer.clone(),
                capacity: a.capacity.unwrap_or(1),
            })
            .collect();
        let graph = TradeGraph::new(doc.agents.clone(), arcs)?;
        let mut valuations = Vec::new();
        for (vi, vdoc) in doc.valuations.iter().enumerate() {
            let coords = graph.agent_coords(&vdoc.agent).ok_or_else(|| {
                Error::instance(
                    format!("valuations[{vi}].agent"),
                    format!("unknown agent `{}`", vdoc.agent),
                )
            })?;
            let mut entries = Vec::new();
            for (ei, entry) in vdoc.entries.iter().enumerate() {
                let path = format!("valuations[{vi}].entries[{ei}].flows");
                let mut vals = vec![None; coords.index.len()];
                for (name, &v) in &entry.flows {
                    let pos = coords.index.position(name).ok_or_else(|| {
                        Error::instance(
                            format!("{path}.{name}"),
                            format!("arc `{name}` is not incident to `{}`", vdoc.agent),
                        )
                    })?;
                    vals[pos] = Some(v);
                }
                let mut point_vals = Vec::with_capacity(coords.index.len());
                for (i, v) in vals.into_iter().enumerate() {
                    match v {
                        Some(v) => point_vals.push(v),
                        None => {
                            return Err(Error::instance(
                                path,
                                format!(
                                    "missing arc `{}` (flows must be explicit)",
                                    coords.index.name(i)
                                ),
                            ))
                        }
                    }
                }
                let point = IntVec::new(coords.index.clone(), point_vals)?;
                entries.push((point, entry.value.clone()));
            }
            let table = FiniteIntFunction::new(coords.index.clone(), entries).map_err(|e| {
                Error::instance(format!("valuations[{vi}].entries"), e.to_string())
            })?;
            let valuation =
                AgentValuation::new(&graph, vdoc.agent.clone(), table).map_err(|e| {
                    Error::instance(format!("valuations[{vi}]"), e.to_string())
                })?;
            valuations.push(valuation);
        }
        let constraint = match &doc.constraint {
            Some(cdoc) => {
                let f = cdoc.expand(graph.arc_index(), "constraint")?;
                Some(Polymatroid::new(f).map_err(|e| {
                    Error::instance("constraint", e.to_string())
                })?)
            }
            None => None,
        };
        Instance::new(graph, valuations, constraint)
    }

    pub fn from_json(json: &str) -> Result<Self, Error> {
        let doc: InstanceDoc =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        Instance::from_doc(&doc)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            agents: self.graph.agents().to_vec(),
            arcs: self
                .graph
                .arcs()
                .iter()
                .map(|a| ArcDoc {
                    id: a.id.clone(),
                    seller: a.seller.clone(),
                    buyer: a.buyer.clone(),
                    capacity: Some(a.capacity),
                })
                .collect(),
            valuations: self
                .valuations
                .values()
                .map(|v| ValuationDoc {
                    agent: v.agent.clone(),
                    entries: v
                        .table
                        .entries()
                        .map(|(p, value)| EntryDoc {
                            flows: p.iter().map(|(n, x)| (n.to_string(), x)).collect(),
                            value: value.clone(),
                        })
                        .collect(),
                })
                .collect(),
            constraint: self
                .constraint
                .as_ref()
                .map(|p| SetFunctionDoc::table_of(p.set_fn())),
        }
    }
}
