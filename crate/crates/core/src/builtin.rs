//! Built-in instances. They ship embedded so the golden tests have no
//! filesystem dependency.

use std::sync::Arc;

use crate::convexity::FiniteIntFunction;
use crate::coords::{IndexSet, IntVec};
use crate::error::Error;
use crate::network::{AgentValuation, Instance, TradeArc, TradeGraph};
use crate::polymatroid::{Polymatroid, SetFunction};
use crate::rat::{rat, Value};

fn table(
    index: &Arc<IndexSet>,
    entries: &[(&[i64], Value)],
) -> Result<FiniteIntFunction, Error> {
    FiniteIntFunction::new(
        index.clone(),
        entries
            .iter()
            .map(|(vals, v)| {
                IntVec::new(index.clone(), vals.to_vec()).map(|p| (p, v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?,
    )
}

/// The two-agent ring economy behind the `paper-example1` subcommand: each
/// agent sells one arc and buys the other, valuations reward the paired
/// sell/buy bundle, and the one-for-one substitution constraint
/// x_e ≤ 1, x_g ≤ 1, x_e + x_g ≤ 1 binds the outcomes.
///
/// Agent 2's published table is encoded as the mirror image respecting the
/// sign conventions (its net flow on `e` is −x_e); the encoding reproduces
/// the aggregate values −1, 0, −2, −2 on the four outcomes exactly.
pub fn example1() -> Instance {
    build_example1().expect("built-in instance is valid")
}

fn build_example1() -> Result<Instance, Error> {
    let graph = TradeGraph::new(
        vec!["1".to_string(), "2".to_string()],
        vec![
            TradeArc {
                id: "e".to_string(),
                seller: "1".to_string(),
                buyer: "2".to_string(),
                capacity: 1,
            },
            TradeArc {
                id: "g".to_string(),
                seller: "2".to_string(),
                buyer: "1".to_string(),
                capacity: 1,
            },
        ],
    )?;
    // Agent 1: sells e (y_e ≥ 0), buys g (y_g ≤ 0).
    let idx1 = graph.agent_coords("1").unwrap().index.clone();
    let w1 = table(
        &idx1,
        &[
            (&[0, 0], Value::Fin(rat(-1, 2))),
            (&[1, -1], Value::Fin(rat(0, 1))),
            (&[1, 0], Value::Fin(rat(-1, 1))),
            (&[0, -1], Value::Fin(rat(-1, 1))),
        ],
    )?;
    // Agent 2: buys e (y_e ≤ 0), sells g (y_g ≥ 0).
    let idx2 = graph.agent_coords("2").unwrap().index.clone();
    let w2 = table(
        &idx2,
        &[
            (&[0, 0], Value::Fin(rat(-1, 2))),
            (&[-1, 1], Value::Fin(rat(0, 1))),
            (&[-1, 0], Value::Fin(rat(-1, 1))),
            (&[0, 1], Value::Fin(rat(-1, 1))),
        ],
    )?;
    let constraint = Polymatroid::new(SetFunction::new(
        graph.arc_index().clone(),
        vec![0, 1, 1, 1],
    )?)?;
    let v1 = AgentValuation::new(&graph, "1".to_string(), w1)?;
    let v2 = AgentValuation::new(&graph, "2".to_string(), w2)?;
    Instance::new(graph, vec![v1, v2], Some(constraint))
}

/// Two-sided market under the same substitution constraint: a seller with
/// linear unit costs on both arcs and a buyer with substitutable values
/// (3 for e, 2 for g, 3 for the pair). The integral optimum is x = (1, 0)
/// with aggregate value 2, supported by rent-based prices.
pub fn two_sided_example() -> Instance {
    build_two_sided().expect("built-in instance is valid")
}

fn build_two_sided() -> Result<Instance, Error> {
    let graph = TradeGraph::new(
        vec!["s".to_string(), "b".to_string()],
        vec![
            TradeArc {
                id: "e".to_string(),
                seller: "s".to_string(),
                buyer: "b".to_string(),
                capacity: 1,
            },
            TradeArc {
                id: "g".to_string(),
                seller: "s".to_string(),
                buyer: "b".to_string(),
                capacity: 1,
            },
        ],
    )?;
    // Seller: cost 1 per unit sold, linear.
    let idx_s = graph.agent_coords("s").unwrap().index.clone();
    let ws = table(
        &idx_s,
        &[
            (&[0, 0], Value::from(0)),
            (&[1, 0], Value::from(-1)),
            (&[0, 1], Value::from(-1)),
            (&[1, 1], Value::from(-2)),
        ],
    )?;
    // Buyer: values 3 on e, 2 on g, 3 on both (one-for-one substitutes).
    let idx_b = graph.agent_coords("b").unwrap().index.clone();
    let wb = table(
        &idx_b,
        &[
            (&[0, 0], Value::from(0)),
            (&[-1, 0], Value::from(3)),
            (&[0, -1], Value::from(2)),
            (&[-1, -1], Value::from(3)),
        ],
    )?;
    let constraint = Polymatroid::new(SetFunction::new(
        graph.arc_index().clone(),
        vec![0, 1, 1, 1],
    )?)?;
    let vs = AgentValuation::new(&graph, "s".to_string(), ws)?;
    let vb = AgentValuation::new(&graph, "b".to_string(), wb)?;
    Instance::new(graph, vec![vs, vb], Some(constraint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::is_msharp_concave_fn;

    #[test]
    fn example1_valuations_are_msharp_concave() {
        let inst = example1();
        for agent in ["1", "2"] {
            assert!(is_msharp_concave_fn(&inst.valuation(agent).table).is_ok());
        }
    }

    #[test]
    fn example1_aggregates() {
        let inst = example1();
        let idx = inst.graph.arc_index().clone();
        let at = |vals: &[i64]| {
            let x = IntVec::new(idx.clone(), vals.to_vec()).unwrap();
            inst.aggregate_value(&x).unwrap()
        };
        assert_eq!(at(&[0, 0]), Value::from(-1));
        assert_eq!(at(&[1, 1]), Value::from(0));
        assert_eq!(at(&[1, 0]), Value::from(-2));
        assert_eq!(at(&[0, 1]), Value::from(-2));
    }

    #[test]
    fn two_sided_aggregates() {
        let inst = two_sided_example();
        let idx = inst.graph.arc_index().clone();
        let at = |vals: &[i64]| {
            let x = IntVec::new(idx.clone(), vals.to_vec()).unwrap();
            inst.aggregate_value(&x).unwrap()
        };
        assert_eq!(at(&[0, 0]), Value::from(0));
        assert_eq!(at(&[1, 0]), Value::from(2));
        assert_eq!(at(&[0, 1]), Value::from(1));
        assert_eq!(at(&[1, 1]), Value::from(1));
    }
}
