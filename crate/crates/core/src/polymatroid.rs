//! Integer submodular set functions and their polymatroids: membership,
//! integer-point enumeration, greedy vertices, tight-set faces, and the
//! correspondences between M-convex sets and submodular functions.
//!
//! Ground sets are capped at 12 elements so the 2^E tables stay exhaustively
//! checkable; that cap is the correctness strategy, not a tuning knob.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convexity::{is_m_convex_set, PointSet};
use crate::coords::{IndexSet, IntVec, RatVec};
use crate::error::Error;
use crate::lp::{LinearProgram, Relation, Sense};
use crate::rat::Rat;

pub const MAX_GROUND_SET: usize = 12;

/// A subset of the ground set encoded as a bitmask over coordinate
/// positions.
pub type SubsetMask = usize;

pub fn subset_names(ground: &IndexSet, mask: SubsetMask) -> Vec<String> {
    (0..ground.len())
        .filter(|&i| mask & (1 << i) != 0)
        .map(|i| ground.name(i).to_string())
        .collect()
}

/// An integer set function given by a complete table over 2^E with f(∅)=0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunction {
    ground: Arc<IndexSet>,
    values: Vec<i64>, // indexed by bitmask
}

impl SetFunction {
    pub fn new(ground: Arc<IndexSet>, values: Vec<i64>) -> Result<Self, Error> {
        if ground.len() > MAX_GROUND_SET {
            return Err(Error::DeskScale(format!(
                "ground set has {} elements; at most {MAX_GROUND_SET} are supported",
                ground.len()
            )));
        }
        if values.len() != 1 << ground.len() {
            return Err(Error::Validation(format!(
                "set function table has {} entries; expected {}",
                values.len(),
                1 << ground.len()
            )));
        }
        if values[0] != 0 {
            return Err(Error::Validation(format!(
                "f(∅) must be 0, found {}",
                values[0]
            )));
        }
        Ok(SetFunction { ground, values })
    }

    /// Build from a per-subset evaluation.
    pub fn from_subset_values(
        ground: Arc<IndexSet>,
        f: impl Fn(SubsetMask) -> i64,
    ) -> Result<Self, Error> {
        let n = ground.len();
        if n > MAX_GROUND_SET {
            return Err(Error::DeskScale(format!(
                "ground set has {n} elements; at most {MAX_GROUND_SET} are supported"
            )));
        }
        let values = (0..1usize << n).map(&f).collect();
        SetFunction::new(ground, values)
    }

    pub fn ground(&self) -> &Arc<IndexSet> {
        &self.ground
    }

    pub fn value(&self, mask: SubsetMask) -> i64 {
        self.values[mask]
    }

    pub fn full_mask(&self) -> SubsetMask {
        (1 << self.ground.len()) - 1
    }

    /// Exhaustive submodularity check; deterministic first counterexample.
    pub fn is_submodular(&self) -> Result<(), SubmodularityViolation> {
        let full = self.full_mask();
        for s in 0..=full {
            for t in 0..=full {
                if self.values[s] + self.values[t] < self.values[s | t] + self.values[s & t] {
                    return Err(SubmodularityViolation { s, t });
                }
            }
        }
        Ok(())
    }

    /// Monotone (nondecreasing) in set inclusion: checked by single-element
    /// extensions.
    pub fn is_monotone(&self) -> bool {
        let full = self.full_mask();
        for s in 0..=full {
            for i in 0..self.ground.len() {
                let bit = 1 << i;
                if s & bit == 0 && self.values[s | bit] < self.values[s] {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmodularityViolation {
    pub s: SubsetMask,
    pub t: SubsetMask,
}

impl fmt::Display for SubmodularityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "submodularity fails at S={:#b}, T={:#b}", self.s, self.t)
    }
}

/// The polymatroid {x ≥ 0 : x(S) ≤ f(S) ∀S} of a validated submodular f.
///
/// Nonnegativity is imposed even though some displays of P_f omit it:
/// outcomes live in Z₊^E and the point set would otherwise be unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polymatroid {
    f: SetFunction,
}

impl Polymatroid {
    pub fn new(f: SetFunction) -> Result<Self, Error> {
        if let Err(v) = f.is_submodular() {
            return Err(Error::Validation(format!(
                "constraint function is not submodular: {v}"
            )));
        }
        Ok(Polymatroid { f })
    }

    pub fn set_fn(&self) -> &SetFunction {
        &self.f
    }

    pub fn ground(&self) -> &Arc<IndexSet> {
        self.f.ground()
    }

    /// x ≥ 0 and x(S) ≤ f(S) for every subset S.
    pub fn contains(&self, x: &RatVec) -> bool {
        debug_assert_eq!(x.index(), self.ground());
        if x.values().iter().any(|v| v.is_negative()) {
            return false;
        }
        let full = self.f.full_mask();
        for s in 1..=full {
            let sum = x.sum_over(mask_positions(s));
            if sum > Rat::from_int(self.f.value(s)) {
                return false;
            }
        }
        true
    }

    pub fn contains_int(&self, x: &IntVec) -> bool {
        self.contains(&x.to_rat())
    }

    /// All nonnegative integer points of the polymatroid, in lexicographic
    /// order. Each coordinate is bounded by min over S∋e of f(S), so the
    /// enumeration is finite.
    pub fn integer_points(&self) -> PointSet {
        let ground = self.ground().clone();
        let n = ground.len();
        let full = self.f.full_mask();
        let mut caps = vec![i64::MAX; n];
        for (e, cap) in caps.iter_mut().enumerate() {
            for s in 1..=full {
                if s & (1 << e) != 0 {
                    *cap = (*cap).min(self.f.value(s));
                }
            }
        }
        let mut points = PointSet::empty(ground.clone());
        if n == 0 {
            points.insert(IntVec::zero(ground));
            return points;
        }
        if caps.iter().any(|&c| c < 0) {
            return points; // some singleton bound is negative: empty
        }
        let mut current = vec![0i64; n];
        loop {
            let candidate = IntVec::new(ground.clone(), current.clone()).expect("shape");
            if self.contains_int(&candidate) {
                points.insert(candidate);
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return points;
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

    /// Edmonds' greedy vertex for the weight vector: coordinates processed
    /// in decreasing weight (nonpositive weights pinned to zero), each
    /// receiving the marginal value of the growing prefix. Maximizes w·x
    /// over the polymatroid.
    pub fn greedy_vertex(&self, weights: &RatVec) -> IntVec {
        debug_assert_eq!(weights.index(), self.ground());
        let n = self.ground().len();
        let mut order: Vec<usize> = (0..n).filter(|&i| weights.get(i).is_positive()).collect();
        order.sort_by(|&a, &b| weights.get(b).cmp(weights.get(a)).then(a.cmp(&b)));
        let mut x = IntVec::zero(self.ground().clone());
        let mut prefix: SubsetMask = 0;
        for e in order {
            let with = prefix | (1 << e);
            let gain = self.f.value(with) - self.f.value(prefix);
            x = x.shifted(e, gain);
            prefix = with;
        }
        x
    }

    /// Maximize w·x over the inequality description with the LP core; the
    /// independent cross-check for the greedy vertex.
    pub fn lp_maximize(&self, weights: &RatVec) -> Rat {
        let lp = self.lp_program(weights);
        crate::lp::solve(&lp).expect_optimal().optimum.clone()
    }

    fn lp_program(&self, weights: &RatVec) -> LinearProgram {
        let ground = self.ground().clone();
        let mut lp = LinearProgram::new(Sense::Maximize, weights.clone());
        for j in 0..ground.len() {
            lp.set_lower(j, Rat::zero());
        }
        let full = self.f.full_mask();
        for s in 1..=full {
            let mut coeffs = RatVec::zero(ground.clone());
            for e in mask_positions(s) {
                coeffs.set(e, Rat::one());
            }
            lp.push(coeffs, Relation::Le, Rat::from_int(self.f.value(s)));
        }
        lp
    }

    /// The face of the point x: every subset where x(S) = f(S).
    pub fn tight_face(&self, x: &RatVec) -> Result<TightFace, Error> {
        if !self.contains(x) {
            return Err(Error::Precondition(
                "point is not in the polymatroid".to_string(),
            ));
        }
        let full = self.f.full_mask();
        let tight = (0..=full)
            .filter(|&s| x.sum_over(mask_positions(s)) == Rat::from_int(self.f.value(s)))
            .collect();
        Ok(TightFace {
            point: x.clone(),
            tight_sets: tight,
        })
    }
}

pub fn mask_positions(mask: SubsetMask) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |&i| mask & (1 << i) != 0)
}

/// A point of the polymatroid together with all of its tight sets.
#[derive(Debug, Clone)]
pub struct TightFace {
    pub point: RatVec,
    /// Tight subsets as bitmasks, ascending; ∅ is always tight.
    pub tight_sets: Vec<SubsetMask>,
}

impl TightFace {
    pub fn nonempty_tight_sets(&self) -> Vec<SubsetMask> {
        self.tight_sets
            .iter()
            .copied()
            .filter(|&s| s != 0)
            .collect()
    }

    /// Tight sets of a point inside the polymatroid form a lattice.
    pub fn is_lattice(&self) -> bool {
        let tight: std::collections::BTreeSet<SubsetMask> =
            self.tight_sets.iter().copied().collect();
        for &s in &tight {
            for &t in &tight {
                if !tight.contains(&(s | t)) || !tight.contains(&(s & t)) {
                    return false;
                }
            }
        }
        true
    }
}

/// The submodular function induced by an M-convex set:
/// f(S) = max{ Σ_{j∈S} x_j : x ∈ B }. The output is asserted submodular.
pub fn set_fn_from_mconvex_set(b: &PointSet) -> Result<SetFunction, Error> {
    if let Err(v) = is_m_convex_set(b) {
        return Err(Error::Precondition(format!(
            "point set is not M-convex: {v}"
        )));
    }
    if b.is_empty() {
        return Err(Error::Precondition("point set is empty".to_string()));
    }
    let ground = b.index().clone();
    let f = SetFunction::from_subset_values(ground, |mask| {
        b.iter()
            .map(|x| x.sum_over(mask_positions(mask)))
            .max()
            .expect("nonempty point set")
    })?;
    f.is_submodular().map_err(|v| {
        Error::Validation(format!(
            "induced set function is not submodular ({v}); M-convexity check let a bad set through"
        ))
    })?;
    Ok(f)
}

/// Integer points of P_f split into the independent vectors and the base
/// points (those with x(E) = f(E)). For monotone f the base reproduces f
/// via `set_fn_from_mconvex_set`.
pub struct PolymatroidPoints {
    pub independent: PointSet,
    pub base: PointSet,
}

pub fn points_from_set_fn(f: &SetFunction) -> Result<PolymatroidPoints, Error> {
    let p = Polymatroid::new(f.clone())?;
    let independent = p.integer_points();
    let total = f.value(f.full_mask());
    let ground = f.ground().clone();
    let base = PointSet::new(
        ground,
        independent
            .iter()
            .filter(|x| x.coord_sum() == total)
            .cloned(),
    )?;
    Ok(PolymatroidPoints { independent, base })
}

/// Spot-check of the closure-intersection property for two M-convex sets:
/// for a deterministic battery of weight vectors, the LP optimum over the
/// intersection of the convex hulls must be attained at an integral point of
/// B1 ∩ B2. An infeasible hull intersection is consistent only when the
/// point sets are disjoint too.
pub fn verify_closure_intersection(b1: &PointSet, b2: &PointSet) -> Result<bool, Error> {
    for (name, b) in [("first", b1), ("second", b2)] {
        if let Err(v) = is_m_convex_set(b) {
            return Err(Error::Precondition(format!(
                "{name} point set is not M-convex: {v}"
            )));
        }
    }
    if b1.index() != b2.index() {
        return Err(Error::Precondition(
            "point sets must share a ground set".to_string(),
        ));
    }
    let common = b1.intersection(b2);
    for weights in weight_battery(b1.index()) {
        match hull_intersection_max(b1, b2, &weights)? {
            None => {
                // Hulls do not intersect; consistent only if the integer
                // intersection is empty as well.
                return Ok(common.is_empty());
            }
            Some(opt) => {
                let best_common = common.iter().map(|z| z.dot(&weights)).max();
                match best_common {
                    Some(v) if v == opt => {}
                    _ => return Ok(false),
                }
            }
        }
    }
    Ok(true)
}

/// Maximize w·x over hull(B1) ∩ hull(B2) via a two-lottery LP; None when the
/// hulls do not intersect.
fn hull_intersection_max(
    b1: &PointSet,
    b2: &PointSet,
    weights: &RatVec,
) -> Result<Option<Rat>, Error> {
    let p1: Vec<&IntVec> = b1.iter().collect();
    let p2: Vec<&IntVec> = b2.iter().collect();
    let names = p1
        .iter()
        .map(|p| format!("a{:?}", p))
        .chain(p2.iter().map(|p| format!("b{:?}", p)));
    let vars = IndexSet::new(names)?;
    let n1 = p1.len();
    let objective = RatVec::new(
        vars.clone(),
        p1.iter()
            .map(|p| p.dot(weights))
            .chain(std::iter::repeat_n(Rat::zero(), p2.len()))
            .collect(),
    )?;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for j in 0..vars.len() {
        lp.set_lower(j, Rat::zero());
    }
    // Both lotteries are probability vectors with a common mean.
    let sum1 = RatVec::new(
        vars.clone(),
        (0..vars.len())
            .map(|j| if j < n1 { Rat::one() } else { Rat::zero() })
            .collect(),
    )?;
    lp.push(sum1, Relation::Eq, Rat::one());
    let sum2 = RatVec::new(
        vars.clone(),
        (0..vars.len())
            .map(|j| if j < n1 { Rat::zero() } else { Rat::one() })
            .collect(),
    )?;
    lp.push(sum2, Relation::Eq, Rat::one());
    for pos in 0..b1.index().len() {
        let coeffs = RatVec::new(
            vars.clone(),
            p1.iter()
                .map(|p| Rat::from_int(p.get(pos)))
                .chain(p2.iter().map(|p| Rat::from_int(-p.get(pos))))
                .collect(),
        )?;
        lp.push(coeffs, Relation::Eq, Rat::zero());
    }
    match crate::lp::solve(&lp) {
        crate::lp::LpResult::Optimal(sol) => Ok(Some(sol.optimum)),
        crate::lp::LpResult::Infeasible(_) => Ok(None),
        crate::lp::LpResult::Unbounded => unreachable!("lottery polytope is bounded"),
    }
}

/// Deterministic battery of weight vectors: the full {−1,0,1}^E grid while
/// it stays small, then a fixed seeded sample with entries in [−3, 3].
fn weight_battery(index: &Arc<IndexSet>) -> Vec<RatVec> {
    use rand::{Rng, SeedableRng};
    let n = index.len();
    let mut out = Vec::new();
    if n == 0 {
        return vec![RatVec::zero(index.clone())];
    }
    if 3usize.pow(n as u32) <= 729 {
        let mut current = vec![-1i64; n];
        loop {
            out.push(
                RatVec::new(
                    index.clone(),
                    current.iter().map(|&v| Rat::from_int(v)).collect(),
                )
                .expect("shape"),
            );
            let mut pos = n;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if current[pos] < 1 {
                    current[pos] += 1;
                    for p in pos + 1..n {
                        current[p] = -1;
                    }
                    break;
                }
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7e57_ba77);
    for _ in 0..729 {
        let vals = (0..n)
            .map(|_| Rat::from_int(rng.gen_range(-3..=3)))
            .collect();
        out.push(RatVec::new(index.clone(), vals).expect("shape"));
    }
    out
}

// --------------------------------------------------------------------------
// Serialization: subset-list table plus the cardinality-cap shorthand.
// --------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetFunctionDoc {
    Shorthand(CardinalityCapDoc),
    Table(Vec<SubsetEntryDoc>),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubsetEntryDoc {
    pub subset: Vec<String>,
    pub value: i64,
}

/// {type:"cardinality-cap"}: per-arc caps, optional disjoint group caps,
/// optional global cap. Expands to
/// f(S) = min(global, Σ_g min(cap_g, Σ_{e∈S∩g} cap_e) + Σ_{e∈S∖∪g} cap_e),
/// a laminar construction that is submodular by construction.
#[derive(Debug, Serialize, Deserialize)]
pub struct CardinalityCapDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub caps: std::collections::BTreeMap<String, i64>,
    #[serde(default)]
    pub groups: Vec<GroupCapDoc>,
    #[serde(default)]
    pub global: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GroupCapDoc {
    pub arcs: Vec<String>,
    pub cap: i64,
}

impl SetFunctionDoc {
    pub fn expand(&self, ground: &Arc<IndexSet>, path: &str) -> Result<SetFunction, Error> {
        match self {
            SetFunctionDoc::Table(entries) => expand_table(entries, ground, path),
            SetFunctionDoc::Shorthand(doc) => expand_shorthand(doc, ground, path),
        }
    }

    /// Serializable table form of a set function.
    pub fn table_of(f: &SetFunction) -> SetFunctionDoc {
        let entries = (0..=f.full_mask())
            .map(|mask| SubsetEntryDoc {
                subset: subset_names(f.ground(), mask),
                value: f.value(mask),
            })
            .collect();
        SetFunctionDoc::Table(entries)
    }
}

fn expand_table(
    entries: &[SubsetEntryDoc],
    ground: &Arc<IndexSet>,
    path: &str,
) -> Result<SetFunction, Error> {
    let n = ground.len();
    if n > MAX_GROUND_SET {
        return Err(Error::DeskScale(format!(
            "ground set has {n} elements; at most {MAX_GROUND_SET} are supported"
        )));
    }
    let mut values: Vec<Option<i64>> = vec![None; 1 << n];
    for (i, entry) in entries.iter().enumerate() {
        let mut mask: SubsetMask = 0;
        for name in &entry.subset {
            let pos = ground.position(name).ok_or_else(|| {
                Error::instance(
                    format!("{path}[{i}].subset"),
                    format!("unknown arc `{name}`"),
                )
            })?;
            if mask & (1 << pos) != 0 {
                return Err(Error::instance(
                    format!("{path}[{i}].subset"),
                    format!("arc `{name}` listed twice"),
                ));
            }
            mask |= 1 << pos;
        }
        if values[mask].is_some() {
            return Err(Error::instance(
                format!("{path}[{i}].subset"),
                "duplicate subset".to_string(),
            ));
        }
        values[mask] = Some(entry.value);
    }
    let mut table = Vec::with_capacity(1 << n);
    for (mask, v) in values.into_iter().enumerate() {
        match v {
            Some(v) => table.push(v),
            None => {
                return Err(Error::instance(
                    path.to_string(),
                    format!(
                        "missing subset {{{}}}",
                        subset_names(ground, mask).join(", ")
                    ),
                ))
            }
        }
    }
    if table[0] != 0 {
        return Err(Error::instance(path.to_string(), "f(∅) must be 0"));
    }
    SetFunction::new(ground.clone(), table)
}

fn expand_shorthand(
    doc: &CardinalityCapDoc,
    ground: &Arc<IndexSet>,
    path: &str,
) -> Result<SetFunction, Error> {
    if doc.kind != "cardinality-cap" {
        return Err(Error::instance(
            format!("{path}.type"),
            format!("unknown shorthand `{}`", doc.kind),
        ));
    }
    let n = ground.len();
    let mut caps = vec![0i64; n];
    for (name, &c) in &doc.caps {
        let pos = ground.position(name).ok_or_else(|| {
            Error::instance(format!("{path}.caps.{name}"), "unknown arc".to_string())
        })?;
        if c < 0 {
            return Err(Error::instance(
                format!("{path}.caps.{name}"),
                "cap must be nonnegative".to_string(),
            ));
        }
        caps[pos] = c;
    }
    for pos in 0..n {
        if !doc.caps.contains_key(ground.name(pos)) {
            return Err(Error::instance(
                format!("{path}.caps"),
                format!("missing cap for arc `{}`", ground.name(pos)),
            ));
        }
    }
    let mut group_masks: Vec<(SubsetMask, i64)> = Vec::new();
    let mut used: SubsetMask = 0;
    for (gi, group) in doc.groups.iter().enumerate() {
        let mut mask: SubsetMask = 0;
        for name in &group.arcs {
            let pos = ground.position(name).ok_or_else(|| {
                Error::instance(
                    format!("{path}.groups[{gi}].arcs"),
                    format!("unknown arc `{name}`"),
                )
            })?;
            mask |= 1 << pos;
        }
        if mask & used != 0 {
            return Err(Error::instance(
                format!("{path}.groups[{gi}]"),
                "groups must be disjoint".to_string(),
            ));
        }
        if group.cap < 0 {
            return Err(Error::instance(
                format!("{path}.groups[{gi}].cap"),
                "cap must be nonnegative".to_string(),
            ));
        }
        used |= mask;
        group_masks.push((mask, group.cap));
    }
    SetFunction::from_subset_values(ground.clone(), |s| {
        let mut total = 0i64;
        for &(gmask, gcap) in &group_masks {
            let in_group: i64 = mask_positions(s & gmask).map(|e| caps[e]).sum();
            total += in_group.min(gcap);
        }
        let ungrouped: i64 = mask_positions(s & !used).map(|e| caps[e]).sum();
        total += ungrouped;
        match doc.global {
            Some(g) => total.min(g),
            None => total,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn ground2() -> Arc<IndexSet> {
        IndexSet::new(["e", "g"]).unwrap()
    }

    fn iv(vals: &[i64]) -> IntVec {
        IntVec::new(ground2(), vals.to_vec()).unwrap()
    }

    /// The one-for-one substitution constraint: x_e ≤ 1, x_g ≤ 1, x_e+x_g ≤ 1.
    fn substitution_constraint() -> Polymatroid {
        let f = SetFunction::new(ground2(), vec![0, 1, 1, 1]).unwrap();
        Polymatroid::new(f).unwrap()
    }

    #[test]
    fn submodularity_examples() {
        assert!(substitution_constraint().set_fn().is_submodular().is_ok());
        // Supermodular: f({e})=f({g})=0, f({e,g})=1.
        let f = SetFunction::new(ground2(), vec![0, 0, 0, 1]).unwrap();
        let v = f.is_submodular().unwrap_err();
        assert_eq!((v.s, v.t), (0b01, 0b10));
        // Additive |S| is submodular with equality.
        let additive = SetFunction::new(ground2(), vec![0, 1, 1, 2]).unwrap();
        assert!(additive.is_submodular().is_ok());
    }

    #[test]
    fn membership_examples() {
        let p = substitution_constraint();
        assert!(!p.contains_int(&iv(&[1, 1])));
        assert!(p.contains_int(&iv(&[0, 0])));
        let half = RatVec::new(ground2(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert!(p.contains(&half));
        assert!(!p.contains_int(&iv(&[-1, 0])));
    }

    #[test]
    fn integer_points_examples() {
        let p = substitution_constraint();
        let pts: Vec<_> = p.integer_points().iter().cloned().collect();
        assert_eq!(pts, vec![iv(&[0, 0]), iv(&[0, 1]), iv(&[1, 0])]);

        let zero = SetFunction::new(ground2(), vec![0, 0, 0, 0]).unwrap();
        let p0 = Polymatroid::new(zero).unwrap();
        assert_eq!(p0.integer_points().len(), 1);

        // Box: f(S) = Σ caps. All 0 ≤ x ≤ c.
        let bx = SetFunction::new(ground2(), vec![0, 2, 1, 3]).unwrap();
        let pb = Polymatroid::new(bx).unwrap();
        assert_eq!(pb.integer_points().len(), 6);
    }

    #[test]
    fn greedy_examples() {
        let p = substitution_constraint();
        let w = RatVec::new(ground2(), vec![rat(2, 1), rat(1, 1)]).unwrap();
        let x = p.greedy_vertex(&w);
        assert_eq!(x, iv(&[1, 0]));
        assert_eq!(x.dot(&w), rat(2, 1));
        assert_eq!(p.lp_maximize(&w), rat(2, 1));

        let nonpos = RatVec::new(ground2(), vec![rat(0, 1), rat(-3, 1)]).unwrap();
        assert_eq!(p.greedy_vertex(&nonpos), iv(&[0, 0]));

        let bx = SetFunction::new(ground2(), vec![0, 2, 1, 3]).unwrap();
        let pb = Polymatroid::new(bx).unwrap();
        let pos = RatVec::new(ground2(), vec![rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(pb.greedy_vertex(&pos), iv(&[2, 1]));
    }

    #[test]
    fn set_fn_from_mconvex_examples() {
        let b = PointSet::new(ground2(), vec![iv(&[1, 0]), iv(&[0, 1])]).unwrap();
        let f = set_fn_from_mconvex_set(&b).unwrap();
        assert_eq!((f.value(0b01), f.value(0b10), f.value(0b11)), (1, 1, 1));
        let singleton = PointSet::new(ground2(), vec![iv(&[1, 1])]).unwrap();
        let fs = set_fn_from_mconvex_set(&singleton).unwrap();
        assert_eq!((fs.value(0b01), fs.value(0b10), fs.value(0b11)), (1, 1, 2));
        let bad = PointSet::new(ground2(), vec![iv(&[0, 0]), iv(&[1, 1])]).unwrap();
        assert!(set_fn_from_mconvex_set(&bad).is_err());
    }

    #[test]
    fn points_from_set_fn_examples() {
        let f = substitution_constraint().set_fn().clone();
        let pts = points_from_set_fn(&f).unwrap();
        assert_eq!(pts.independent.len(), 3);
        let base: Vec<_> = pts.base.iter().cloned().collect();
        assert_eq!(base, vec![iv(&[0, 1]), iv(&[1, 0])]);
        assert!(is_m_convex_set(&pts.base).is_ok());

        // Additive: base is the single cap vector.
        let additive = SetFunction::new(ground2(), vec![0, 2, 1, 3]).unwrap();
        let pts = points_from_set_fn(&additive).unwrap();
        let base: Vec<_> = pts.base.iter().cloned().collect();
        assert_eq!(base, vec![iv(&[2, 1])]);
    }

    #[test]
    fn cor_2_1_round_trip() {
        let f = substitution_constraint().set_fn().clone();
        let pts = points_from_set_fn(&f).unwrap();
        let back = set_fn_from_mconvex_set(&pts.base).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn tight_face_examples() {
        let p = substitution_constraint();
        let face = p.tight_face(&iv(&[1, 0]).to_rat()).unwrap();
        assert_eq!(face.nonempty_tight_sets(), vec![0b01, 0b11]);
        assert!(face.is_lattice());

        let at_zero = p.tight_face(&iv(&[0, 0]).to_rat()).unwrap();
        assert_eq!(at_zero.nonempty_tight_sets(), Vec::<SubsetMask>::new());

        let half = RatVec::new(ground2(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let face = p.tight_face(&half).unwrap();
        assert_eq!(face.nonempty_tight_sets(), vec![0b11]);

        assert!(p.tight_face(&iv(&[1, 1]).to_rat()).is_err());
    }

    #[test]
    fn closure_intersection_examples() {
        let b = PointSet::new(ground2(), vec![iv(&[1, 0]), iv(&[0, 1])]).unwrap();
        assert!(verify_closure_intersection(&b, &b).unwrap());

        // Disjoint hulls (different coordinate sums): vacuously true.
        let far = PointSet::new(ground2(), vec![iv(&[2, 1]), iv(&[1, 2])]).unwrap();
        assert!(verify_closure_intersection(&b, &far).unwrap());

        let partial =
            PointSet::new(ground2(), vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[2, -1])]).unwrap();
        assert!(is_m_convex_set(&partial).is_ok());
        assert!(verify_closure_intersection(&b, &partial).unwrap());
    }

    #[test]
    fn enumeration_and_membership_agree() {
        let mut g = crate::generate::Generator::new(41);
        for _ in 0..10 {
            let ground = g.fresh_index(3);
            let p = g.polymatroid(&ground);
            let pts = p.integer_points();
            for x in pts.iter() {
                assert!(p.contains_int(x));
            }
            // Every member of a generous integer box is enumerated.
            let cap = (0..3)
                .map(|e| p.set_fn().value(1 << e))
                .max()
                .unwrap()
                .max(0)
                + 1;
            for a in 0..=cap {
                for b in 0..=cap {
                    for c in 0..=cap {
                        let x = IntVec::new(ground.clone(), vec![a, b, c]).unwrap();
                        assert_eq!(p.contains_int(&x), pts.contains(&x), "{x:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn cardinality_cap_shorthand() {
        let doc: SetFunctionDoc =
            serde_json::from_str(r#"{"type":"cardinality-cap","caps":{"e":1,"g":1},"global":1}"#)
                .unwrap();
        let f = doc.expand(&ground2(), "constraint").unwrap();
        assert_eq!(f, substitution_constraint().set_fn().clone());

        let doc: SetFunctionDoc = serde_json::from_str(
            r#"{"type":"cardinality-cap","caps":{"e":2,"g":3},
                "groups":[{"arcs":["e","g"],"cap":4}]}"#,
        )
        .unwrap();
        let f = doc.expand(&ground2(), "constraint").unwrap();
        assert_eq!((f.value(0b01), f.value(0b10), f.value(0b11)), (2, 3, 4));
        assert!(f.is_submodular().is_ok());
    }

    #[test]
    fn subset_table_round_trip() {
        let f = substitution_constraint().set_fn().clone();
        let doc = SetFunctionDoc::table_of(&f);
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: SetFunctionDoc = serde_json::from_str(&json).unwrap();
        let back = parsed.expand(&ground2(), "constraint").unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn table_validation_errors() {
        // Missing subset.
        let doc: SetFunctionDoc =
            serde_json::from_str(r#"[{"subset":[],"value":0},{"subset":["e"],"value":1}]"#)
                .unwrap();
        assert!(doc.expand(&ground2(), "constraint").is_err());
        // f(∅) ≠ 0.
        let doc: SetFunctionDoc = serde_json::from_str(
            r#"[{"subset":[],"value":1},{"subset":["e"],"value":1},
                 {"subset":["g"],"value":1},{"subset":["e","g"],"value":1}]"#,
        )
        .unwrap();
        assert!(doc.expand(&ground2(), "constraint").is_err());
        // Duplicate subset.
        let doc: SetFunctionDoc = serde_json::from_str(
            r#"[{"subset":[],"value":0},{"subset":["e"],"value":1},
                 {"subset":["e"],"value":2},{"subset":["e","g"],"value":1}]"#,
        )
        .unwrap();
        assert!(doc.expand(&ground2(), "constraint").is_err());
    }
}
