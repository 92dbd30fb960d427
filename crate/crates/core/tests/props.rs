//! Property-based invariants for the vector and rational layers.

use proptest::prelude::*;

use tradenet::coords::{IndexSet, IntVec, RatVec};
use tradenet::network::{AgentValuation, TradeArc, TradeGraph};
use tradenet::rat::{Rat, Value};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-50i64..=50, 1i64..=12).prop_map(|(p, q)| Rat::new(p, q))
}

proptest! {
    #[test]
    fn supports_are_disjoint(vals in prop::collection::vec(-5i64..=5, 1..6)) {
        let names: Vec<String> = (0..vals.len()).map(|i| format!("c{i}")).collect();
        let index = IndexSet::new(names).unwrap();
        let v = IntVec::new(index, vals).unwrap();
        let plus = v.supp_plus();
        let minus = v.supp_minus();
        prop_assert!(plus.iter().all(|p| !minus.contains(p)));
        prop_assert_eq!(plus.len() + minus.len() + v.values().iter().filter(|&&x| x == 0).count(), v.len());
    }

    #[test]
    fn hypercube_has_two_to_the_k_corners(vals in prop::collection::vec((-6i64..=6, 1i64..=4), 1..5)) {
        let names: Vec<String> = (0..vals.len()).map(|i| format!("c{i}")).collect();
        let index = IndexSet::new(names).unwrap();
        let rats: Vec<Rat> = vals.iter().map(|&(p, q)| Rat::new(p, q)).collect();
        let k = rats.iter().filter(|r| !r.is_integer()).count();
        let x = RatVec::new(index, rats).unwrap();
        let corners = x.hypercube_corners();
        prop_assert_eq!(corners.len(), 1usize << k);
        // Every corner stays within the floor/ceil box.
        for c in &corners {
            for pos in 0..x.len() {
                let f = x.get(pos).floor();
                let g = x.get(pos).ceil();
                let v = Rat::from_int(c.get(pos));
                prop_assert!(f <= v && v <= g);
            }
        }
    }

    #[test]
    fn rational_arithmetic_is_exact(a in small_rat(), b in small_rat()) {
        prop_assert_eq!((a.clone() + b.clone()) - b.clone(), a.clone());
        if !b.is_zero() {
            prop_assert_eq!((a.clone() * b.clone()) / b.clone(), a.clone());
        }
    }

    #[test]
    fn rational_serde_round_trip(a in small_rat()) {
        let json = serde_json::to_string(&a).unwrap();
        let back: Rat = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(a, back);
    }

    #[test]
    fn outcome_netflow_round_trip(cap_e in 1i64..=3, cap_g in 1i64..=3, xe in 0i64..=3, xg in 0i64..=3) {
        prop_assume!(xe <= cap_e && xg <= cap_g);
        let graph = TradeGraph::new(
            vec!["a".into(), "b".into()],
            vec![
                TradeArc { id: "e".into(), seller: "a".into(), buyer: "b".into(), capacity: cap_e },
                TradeArc { id: "g".into(), seller: "b".into(), buyer: "a".into(), capacity: cap_g },
            ],
        ).unwrap();
        let x = IntVec::new(graph.arc_index().clone(), vec![xe, xg]).unwrap();
        let flows = graph.outcome_to_netflow(&x).unwrap();
        // Opposite endpoints cancel on every arc.
        for arc in graph.arcs() {
            let ys = flows.agent(&arc.seller).unwrap().get_named(&arc.id).unwrap();
            let yb = flows.agent(&arc.buyer).unwrap().get_named(&arc.id).unwrap();
            prop_assert_eq!(ys + yb, 0);
            prop_assert!(ys >= 0);
        }
        prop_assert_eq!(graph.netflow_to_outcome(&flows).unwrap(), x);
    }

    #[test]
    fn demand_ignores_constant_shifts(shift in small_rat(), p_e in small_rat(), p_g in small_rat()) {
        let graph = TradeGraph::new(
            vec!["a".into(), "b".into()],
            vec![
                TradeArc { id: "e".into(), seller: "a".into(), buyer: "b".into(), capacity: 1 },
                TradeArc { id: "g".into(), seller: "b".into(), buyer: "a".into(), capacity: 1 },
            ],
        ).unwrap();
        let idx = graph.agent_coords("a").unwrap().index.clone();
        let table = tradenet::convexity::FiniteIntFunction::new(
            idx.clone(),
            vec![
                (IntVec::new(idx.clone(), vec![0, 0]).unwrap(), Value::Fin(Rat::new(-1, 2))),
                (IntVec::new(idx.clone(), vec![1, -1]).unwrap(), Value::Fin(Rat::zero())),
                (IntVec::new(idx.clone(), vec![1, 0]).unwrap(), Value::Fin(Rat::from_int(-1))),
                (IntVec::new(idx.clone(), vec![0, -1]).unwrap(), Value::Fin(Rat::from_int(-1))),
            ],
        ).unwrap();
        let v = AgentValuation::new(&graph, "a".into(), table.clone()).unwrap();
        let shifted = AgentValuation::new(&graph, "a".into(), table.shift(&shift)).unwrap();
        let prices = RatVec::new(idx, vec![p_e, p_g]).unwrap();
        let d1 = tradenet::network::demand(&v, &prices).unwrap();
        let d2 = tradenet::network::demand(&shifted, &prices).unwrap();
        prop_assert_eq!(d1.points, d2.points);
    }
}
