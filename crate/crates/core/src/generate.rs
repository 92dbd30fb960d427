//! Deterministic pseudo-random generation of test instances.
//!
//! Every M♯-concave candidate is produced by a construction known to land
//! in the class (linear, separable concave, laminar concave, weighted
//! uniform-matroid rank) and then re-validated by the exchange checker;
//! closure of the class under the construction is never assumed. The same
//! policy applies to submodular tables. A fixed seed reproduces the exact
//! same artifacts.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convexity::{is_msharp_concave_fn, FiniteIntFunction, PointSet};
use crate::coords::{IndexSet, IntVec};
use crate::error::Error;
use crate::network::{AgentValuation, Instance, TradeArc, TradeGraph};
use crate::polymatroid::{points_from_set_fn, Polymatroid, SetFunction};
use crate::rat::{Rat, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    MsharpValuation,
    TwoSidedSeparable,
    MultiSided,
    Polymatroid,
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "msharp-valuation" => Ok(Profile::MsharpValuation),
            "two-sided-separable" => Ok(Profile::TwoSidedSeparable),
            "multi-sided" => Ok(Profile::MultiSided),
            "polymatroid" => Ok(Profile::Polymatroid),
            other => Err(Error::Parse(format!("unknown profile `{other}`"))),
        }
    }
}

#[derive(Debug)]
pub enum Generated {
    Valuation(FiniteIntFunction),
    Instance(Instance),
    Constraint(Polymatroid),
}

/// Deterministic generation entry point for the CLI.
pub fn generate_instances(seed: u64, profile: Profile) -> Generated {
    let mut g = Generator::new(seed);
    match profile {
        Profile::MsharpValuation => {
            let n = g.rng.gen_range(2..=3);
            let index = g.fresh_index(n);
            let highs = vec![2i64; n];
            let lows = vec![0i64; n];
            Generated::Valuation(g.msharp_table(&index, &lows, &highs))
        }
        Profile::TwoSidedSeparable => Generated::Instance(g.two_sided_instance(4)),
        Profile::MultiSided => Generated::Instance(g.multi_sided_instance(4)),
        Profile::Polymatroid => {
            let n = g.rng.gen_range(2..=4);
            let ground = g.fresh_index(n);
            Generated::Constraint(g.polymatroid(&ground))
        }
    }
}

pub struct Generator {
    pub rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn fresh_index(&mut self, n: usize) -> Arc<IndexSet> {
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        IndexSet::new(names).expect("unique names")
    }

    fn box_points(index: &Arc<IndexSet>, lows: &[i64], highs: &[i64]) -> Vec<IntVec> {
        let n = lows.len();
        let mut out = Vec::new();
        let mut current = lows.to_vec();
        loop {
            out.push(IntVec::new(index.clone(), current.clone()).expect("shape"));
            let mut pos = n;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if current[pos] < highs[pos] {
                    current[pos] += 1;
                    current[pos + 1..n].copy_from_slice(&lows[pos + 1..n]);
                    break;
                }
            }
        }
    }

    fn half_int(&mut self, lo: i64, hi: i64) -> Rat {
        Rat::new(self.rng.gen_range(2 * lo..=2 * hi), 2)
    }

    /// A concave sequence of the given length: running sums of
    /// non-increasing increments.
    fn concave_sequence(&mut self, len: usize) -> Vec<Rat> {
        let mut increments: Vec<Rat> = (0..len.saturating_sub(1))
            .map(|_| self.half_int(-3, 3))
            .collect();
        increments.sort_by(|a, b| b.cmp(a));
        let mut out = vec![self.half_int(-2, 2)];
        for inc in increments {
            let next = out.last().unwrap().clone() + inc;
            out.push(next);
        }
        out
    }

    /// An M♯-concave table over the integer box [lows, highs]; validated by
    /// the exchange checker, retried on (unexpected) failure, with a linear
    /// table as the always-valid fallback.
    pub fn msharp_table(
        &mut self,
        index: &Arc<IndexSet>,
        lows: &[i64],
        highs: &[i64],
    ) -> FiniteIntFunction {
        for _ in 0..50 {
            let candidate = self.msharp_candidate(index, lows, highs);
            if is_msharp_concave_fn(&candidate).is_ok() {
                return candidate;
            }
        }
        let f = self.linear_table(index, lows, highs);
        assert!(is_msharp_concave_fn(&f).is_ok(), "linear tables are M♯-concave");
        f
    }

    fn linear_table(
        &mut self,
        index: &Arc<IndexSet>,
        lows: &[i64],
        highs: &[i64],
    ) -> FiniteIntFunction {
        let n = index.len();
        let coeffs: Vec<Rat> = (0..n).map(|_| self.half_int(-3, 3)).collect();
        let constant = self.half_int(-2, 2);
        let entries = Self::box_points(index, lows, highs)
            .into_iter()
            .map(|p| {
                let v: Rat = (0..n)
                    .map(|i| coeffs[i].clone() * Rat::from_int(p.get(i)))
                    .sum::<Rat>()
                    + &constant;
                (p, Value::Fin(v))
            })
            .collect::<Vec<_>>();
        FiniteIntFunction::new(index.clone(), entries).expect("nonempty box")
    }

    fn msharp_candidate(
        &mut self,
        index: &Arc<IndexSet>,
        lows: &[i64],
        highs: &[i64],
    ) -> FiniteIntFunction {
        let n = index.len();
        let uniform_sign = lows.iter().all(|&l| l == 0) || highs.iter().all(|&h| h == 0);
        let zero_one = lows
            .iter()
            .zip(highs)
            .all(|(&l, &h)| h - l == 1);
        let kind = self.rng.gen_range(0..5);
        match kind {
            0 => self.linear_table(index, lows, highs),
            1 => {
                // Separable concave: Σ_i φ_i(z_i).
                let seqs: Vec<Vec<Rat>> = (0..n)
                    .map(|i| self.concave_sequence((highs[i] - lows[i] + 1) as usize))
                    .collect();
                self.table_from(index, lows, highs, |p| {
                    (0..n)
                        .map(|i| seqs[i][(p.get(i) - lows[i]) as usize].clone())
                        .sum()
                })
            }
            2 => {
                // Laminar concave: Σ_i φ_i(z_i) + ψ(z(E)).
                let seqs: Vec<Vec<Rat>> = (0..n)
                    .map(|i| self.concave_sequence((highs[i] - lows[i] + 1) as usize))
                    .collect();
                let total_lo: i64 = lows.iter().sum();
                let total_hi: i64 = highs.iter().sum();
                let top = self.concave_sequence((total_hi - total_lo + 1) as usize);
                self.table_from(index, lows, highs, |p| {
                    let sep: Rat = (0..n)
                        .map(|i| seqs[i][(p.get(i) - lows[i]) as usize].clone())
                        .sum();
                    sep + &top[(p.coord_sum() - total_lo) as usize]
                })
            }
            3 if uniform_sign && zero_one => {
                // Weighted rank of a uniform matroid on the consumed items.
                let k = self.rng.gen_range(1..=n);
                let weights: Vec<Rat> =
                    (0..n).map(|_| self.half_int(0, 4)).collect();
                self.table_from(index, lows, highs, |p| {
                    let mut selected: Vec<Rat> = (0..n)
                        .filter(|&i| p.get(i) != 0)
                        .map(|i| weights[i].clone())
                        .collect();
                    selected.sort_by(|a, b| b.cmp(a));
                    selected.into_iter().take(k).sum()
                })
            }
            _ => {
                // Separable concave plus a linear tilt.
                let seqs: Vec<Vec<Rat>> = (0..n)
                    .map(|i| self.concave_sequence((highs[i] - lows[i] + 1) as usize))
                    .collect();
                let coeffs: Vec<Rat> = (0..n).map(|_| self.half_int(-2, 2)).collect();
                self.table_from(index, lows, highs, |p| {
                    let sep: Rat = (0..n)
                        .map(|i| seqs[i][(p.get(i) - lows[i]) as usize].clone())
                        .sum();
                    let lin: Rat = (0..n)
                        .map(|i| coeffs[i].clone() * Rat::from_int(p.get(i)))
                        .sum();
                    sep + &lin
                })
            }
        }
    }

    fn table_from(
        &mut self,
        index: &Arc<IndexSet>,
        lows: &[i64],
        highs: &[i64],
        f: impl Fn(&IntVec) -> Rat,
    ) -> FiniteIntFunction {
        let entries: Vec<(IntVec, Value)> = Self::box_points(index, lows, highs)
            .into_iter()
            .map(|p| {
                let v = f(&p);
                (p, Value::Fin(v))
            })
            .collect();
        FiniteIntFunction::new(index.clone(), entries).expect("nonempty box")
    }

    /// Monotone integer submodular set function: weighted coverage plus a
    /// nonnegative additive part. Validated exhaustively.
    pub fn monotone_submodular(&mut self, ground: &Arc<IndexSet>) -> SetFunction {
        let n = ground.len();
        let universe = self.rng.gen_range(2..=4);
        let weights: Vec<i64> = (0..universe).map(|_| self.rng.gen_range(1..=3)).collect();
        let covers: Vec<u32> = (0..n)
            .map(|_| self.rng.gen_range(0..(1u32 << universe)))
            .collect();
        let additive: Vec<i64> = (0..n).map(|_| self.rng.gen_range(0..=1)).collect();
        let f = SetFunction::from_subset_values(ground.clone(), |mask| {
            let mut covered = 0u32;
            let mut add = 0i64;
            for e in crate::polymatroid::mask_positions(mask) {
                covered |= covers[e];
                add += additive[e];
            }
            let cov: i64 = (0..universe)
                .filter(|&u| covered & (1 << u) != 0)
                .map(|u| weights[u])
                .sum();
            cov + add
        })
        .expect("small ground set");
        assert!(f.is_submodular().is_ok(), "coverage functions are submodular");
        f
    }

    /// Monotone submodular with f(E) pinned to `total` (min with a constant).
    pub fn monotone_submodular_with_total(
        &mut self,
        ground: &Arc<IndexSet>,
        total: i64,
    ) -> SetFunction {
        loop {
            let base = self.monotone_submodular(ground);
            if base.value(base.full_mask()) < total {
                continue;
            }
            let f = SetFunction::from_subset_values(ground.clone(), |mask| {
                base.value(mask).min(total)
            })
            .expect("small ground set");
            assert!(f.is_submodular().is_ok());
            return f;
        }
    }

    pub fn polymatroid(&mut self, ground: &Arc<IndexSet>) -> Polymatroid {
        Polymatroid::new(self.monotone_submodular(ground)).expect("validated submodular")
    }

    /// Random M-convex set: the integer base points of a random monotone
    /// submodular function.
    pub fn mconvex_set(&mut self, ground: &Arc<IndexSet>) -> PointSet {
        loop {
            let f = self.monotone_submodular(ground);
            let pts = points_from_set_fn(&f).expect("validated submodular");
            if !pts.base.is_empty() {
                return pts.base;
            }
        }
    }

    /// Two-sided separable instance: sellers carry M♯-concave tables on
    /// their outgoing arcs, buyers carry linear tables on their incoming
    /// arcs, and a random polymatroid constrains the outcomes.
    pub fn two_sided_instance(&mut self, max_arcs: usize) -> Instance {
        loop {
            let n_sellers = self.rng.gen_range(1..=2);
            let n_buyers = self.rng.gen_range(1..=2);
            let n_arcs = self.rng.gen_range(2..=max_arcs.max(2));
            let sellers: Vec<String> = (0..n_sellers).map(|i| format!("s{i}")).collect();
            let buyers: Vec<String> = (0..n_buyers).map(|i| format!("b{i}")).collect();
            let arcs: Vec<TradeArc> = (0..n_arcs)
                .map(|i| TradeArc {
                    id: format!("e{i}"),
                    seller: sellers[self.rng.gen_range(0..n_sellers)].clone(),
                    buyer: buyers[self.rng.gen_range(0..n_buyers)].clone(),
                    capacity: self.rng.gen_range(1..=2),
                })
                .collect();
            let mut agents: Vec<String> = sellers.clone();
            agents.extend(buyers.clone());
            // Drop agents that ended up without arcs.
            let agents: Vec<String> = agents
                .into_iter()
                .filter(|a| arcs.iter().any(|arc| arc.seller == *a || arc.buyer == *a))
                .collect();
            let Ok(graph) = TradeGraph::new(agents.clone(), arcs) else {
                continue;
            };
            let mut valuations = Vec::new();
            for agent in &agents {
                let coords = graph.agent_coords(agent).unwrap().clone();
                let caps: Vec<i64> = coords
                    .global_pos
                    .iter()
                    .map(|&p| graph.arcs()[p].capacity)
                    .collect();
                let table = if sellers.contains(agent) {
                    let lows = vec![0i64; coords.index.len()];
                    self.msharp_table(&coords.index, &lows, &caps)
                } else {
                    // Buyer: linear value of consumption, w(y) = c·y with
                    // c ≤ 0 so purchases (y ≤ 0) earn nonnegative value.
                    let n = coords.index.len();
                    let coeffs: Vec<Rat> = (0..n).map(|_| self.half_int(-4, 0)).collect();
                    let lows: Vec<i64> = caps.iter().map(|&c| -c).collect();
                    let highs = vec![0i64; n];
                    self.table_from(&coords.index, &lows, &highs, |p| {
                        (0..n)
                            .map(|i| coeffs[i].clone() * Rat::from_int(p.get(i)))
                            .sum()
                    })
                };
                valuations.push(
                    AgentValuation::new(&graph, agent.clone(), table).expect("sign conventions"),
                );
            }
            let constraint = self.polymatroid(graph.arc_index());
            if let Ok(inst) = Instance::new(graph, valuations, Some(constraint)) {
                return inst;
            }
        }
    }

    /// Unconstrained instance in which every agent (possibly a buyer on
    /// some arcs and a seller on others) carries a validated M♯-concave
    /// valuation over its signed domain.
    pub fn msharp_unconstrained_instance(&mut self, max_arcs: usize) -> Instance {
        loop {
            let n_agents = self.rng.gen_range(2..=3);
            let agents: Vec<String> = (0..n_agents).map(|i| format!("a{i}")).collect();
            let n_arcs = self.rng.gen_range(2..=max_arcs.max(2));
            let arcs: Vec<TradeArc> = (0..n_arcs)
                .map(|i| {
                    let seller = self.rng.gen_range(0..n_agents);
                    let buyer = loop {
                        let b = self.rng.gen_range(0..n_agents);
                        if b != seller {
                            break b;
                        }
                    };
                    TradeArc {
                        id: format!("e{i}"),
                        seller: agents[seller].clone(),
                        buyer: agents[buyer].clone(),
                        capacity: self.rng.gen_range(1..=2),
                    }
                })
                .collect();
            let agents: Vec<String> = agents
                .into_iter()
                .filter(|a| arcs.iter().any(|arc| arc.seller == *a || arc.buyer == *a))
                .collect();
            let Ok(graph) = TradeGraph::new(agents.clone(), arcs) else {
                continue;
            };
            let mut valuations = Vec::new();
            for agent in &agents {
                let coords = graph.agent_coords(agent).unwrap().clone();
                let (mut lows, mut highs) = (Vec::new(), Vec::new());
                for (k, &global) in coords.global_pos.iter().enumerate() {
                    let cap = graph.arcs()[global].capacity;
                    if coords.signs[k] > 0 {
                        lows.push(0);
                        highs.push(cap);
                    } else {
                        lows.push(-cap);
                        highs.push(0);
                    }
                }
                let table = self.msharp_table(&coords.index, &lows, &highs);
                valuations.push(
                    AgentValuation::new(&graph, agent.clone(), table).expect("sign conventions"),
                );
            }
            if let Ok(inst) = Instance::new(graph, valuations, None) {
                return inst;
            }
        }
    }

    /// Multi-sided gap-hunting instance: a ring of agents that each sell
    /// one arc and buy the next, with paired-bundle valuations that reward
    /// trading both incident arcs together, under a one-for-one
    /// substitution constraint. Roughly half the draws use the
    /// complement-style tables that produce integrality gaps.
    pub fn multi_sided_instance(&mut self, max_arcs: usize) -> Instance {
        let k = self.rng.gen_range(2..=max_arcs.clamp(2, 3));
        let agents: Vec<String> = (0..k).map(|i| format!("a{i}")).collect();
        let arcs: Vec<TradeArc> = (0..k)
            .map(|i| TradeArc {
                id: format!("e{i}"),
                seller: agents[i].clone(),
                buyer: agents[(i + 1) % k].clone(),
                capacity: 1,
            })
            .collect();
        let graph = TradeGraph::new(agents.clone(), arcs).expect("ring is valid");
        let complementary = self.rng.gen_bool(0.5);
        let mut valuations = Vec::new();
        for agent in &agents {
            let coords = graph.agent_coords(agent).unwrap().clone();
            let table = if complementary {
                // Reward the paired sell/buy bundle; penalize lone trades.
                let idle = -self.half_int(0, 2) - Rat::new(1, 2);
                let lone = idle.clone() - self.half_int(0, 2) - Rat::new(1, 2);
                let mut entries = Vec::new();
                for p in Self::box_points(
                    &coords.index,
                    &coords.signs.iter().map(|&s| if s > 0 { 0 } else { -1 }).collect::<Vec<_>>(),
                    &coords.signs.iter().map(|&s| if s > 0 { 1 } else { 0 }).collect::<Vec<_>>(),
                ) {
                    let traded = (0..coords.index.len())
                        .filter(|&i| p.get(i) != 0)
                        .count();
                    let v = match traded {
                        0 => idle.clone(),
                        1 => lone.clone(),
                        _ => Rat::zero(),
                    };
                    entries.push((p, Value::Fin(v)));
                }
                FiniteIntFunction::new(coords.index.clone(), entries).expect("nonempty")
            } else {
                let (lows, highs): (Vec<i64>, Vec<i64>) = coords
                    .signs
                    .iter()
                    .map(|&s| if s > 0 { (0, 1) } else { (-1, 0) })
                    .unzip();
                self.msharp_table(&coords.index, &lows, &highs)
            };
            valuations.push(
                AgentValuation::new(&graph, agent.clone(), table).expect("sign conventions"),
            );
        }
        // One-for-one substitution across the ring: at most one arc trades
        // in total, each at most once.
        let constraint = Polymatroid::new(
            SetFunction::from_subset_values(graph.arc_index().clone(), |mask| {
                i64::from(mask != 0)
            })
            .expect("small ground"),
        )
        .expect("substitution cap is submodular");
        Instance::new(graph, valuations, Some(constraint)).expect("generated instance is valid")
    }
}
