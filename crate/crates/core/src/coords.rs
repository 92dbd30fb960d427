//! Finite coordinate sets and the integer / rational vectors over them.
//!
//! Vectors are total over their index set: every declared coordinate carries
//! an explicit entry. This rules out the "missing means zero" convention that
//! breeds sign bugs in net-flow code.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat::Rat;

/// An ordered set of named coordinates (arc identifiers or agent-local
/// trade slots). Order is the declaration order and fixes every
/// deterministic iteration in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    names: Vec<String>,
}

impl IndexSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Self>, Error> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Validation(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Arc::new(IndexSet { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, pos: usize) -> &str {
        &self.names[pos]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Integer vector over an [`IndexSet`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntVec {
    index: Arc<IndexSet>,
    vals: Vec<i64>,
}

/// Rational vector over an [`IndexSet`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatVec {
    index: Arc<IndexSet>,
    vals: Vec<Rat>,
}

impl IntVec {
    pub fn new(index: Arc<IndexSet>, vals: Vec<i64>) -> Result<Self, Error> {
        if vals.len() != index.len() {
            return Err(Error::Validation(format!(
                "vector has {} entries for {} coordinates",
                vals.len(),
                index.len()
            )));
        }
        Ok(IntVec { index, vals })
    }

    pub fn zero(index: Arc<IndexSet>) -> Self {
        let n = index.len();
        IntVec {
            index,
            vals: vec![0; n],
        }
    }

    /// Basis vector χ_u: 1 at `name`, 0 elsewhere.
    pub fn unit(index: Arc<IndexSet>, name: &str) -> Result<Self, Error> {
        let pos = index
            .position(name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        let mut v = IntVec::zero(index);
        v.vals[pos] = 1;
        Ok(v)
    }

    pub fn index(&self) -> &Arc<IndexSet> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn get(&self, pos: usize) -> i64 {
        self.vals[pos]
    }

    pub fn get_named(&self, name: &str) -> Option<i64> {
        self.index.position(name).map(|p| self.vals[p])
    }

    pub fn values(&self) -> &[i64] {
        &self.vals
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> + '_ {
        self.index
            .names()
            .iter()
            .map(String::as_str)
            .zip(self.vals.iter().copied())
    }

    /// Coordinates with strictly positive entries: supp⁺.
    pub fn supp_plus(&self) -> Vec<usize> {
        (0..self.vals.len()).filter(|&i| self.vals[i] > 0).collect()
    }

    /// Coordinates with strictly negative entries: supp⁻.
    pub fn supp_minus(&self) -> Vec<usize> {
        (0..self.vals.len()).filter(|&i| self.vals[i] < 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|&v| v == 0)
    }

    pub fn coord_sum(&self) -> i64 {
        self.vals.iter().sum()
    }

    /// Sum of entries over the coordinate positions in `positions`.
    pub fn sum_over(&self, positions: impl IntoIterator<Item = usize>) -> i64 {
        positions.into_iter().map(|p| self.vals[p]).sum()
    }

    pub fn add(&self, other: &IntVec) -> IntVec {
        debug_assert_eq!(self.index, other.index);
        let vals = self
            .vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| a + b)
            .collect();
        IntVec {
            index: self.index.clone(),
            vals,
        }
    }

    pub fn sub(&self, other: &IntVec) -> IntVec {
        debug_assert_eq!(self.index, other.index);
        let vals = self
            .vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| a - b)
            .collect();
        IntVec {
            index: self.index.clone(),
            vals,
        }
    }

    /// self with coordinate `pos` shifted by `delta` (χ arithmetic).
    pub fn shifted(&self, pos: usize, delta: i64) -> IntVec {
        let mut v = self.clone();
        v.vals[pos] += delta;
        v
    }

    pub fn neg(&self) -> IntVec {
        IntVec {
            index: self.index.clone(),
            vals: self.vals.iter().map(|v| -v).collect(),
        }
    }

    pub fn to_rat(&self) -> RatVec {
        RatVec {
            index: self.index.clone(),
            vals: self.vals.iter().map(|&v| Rat::from_int(v)).collect(),
        }
    }

    /// Exact inner product with a rational vector over the same index set.
    pub fn dot(&self, prices: &RatVec) -> Rat {
        debug_assert_eq!(self.index, prices.index);
        self.vals
            .iter()
            .zip(&prices.vals)
            .map(|(&a, p)| Rat::from_int(a) * p)
            .sum()
    }
}

impl PartialOrd for IntVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IntVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index
            .cmp(&other.index)
            .then_with(|| self.vals.cmp(&other.vals))
    }
}

impl fmt::Debug for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (name, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}={v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for IntVec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.len()))?;
        for (name, v) in self.iter() {
            map.serialize_entry(name, &v)?;
        }
        map.end()
    }
}

impl RatVec {
    pub fn new(index: Arc<IndexSet>, vals: Vec<Rat>) -> Result<Self, Error> {
        if vals.len() != index.len() {
            return Err(Error::Validation(format!(
                "vector has {} entries for {} coordinates",
                vals.len(),
                index.len()
            )));
        }
        Ok(RatVec { index, vals })
    }

    pub fn zero(index: Arc<IndexSet>) -> Self {
        let n = index.len();
        RatVec {
            index,
            vals: vec![Rat::zero(); n],
        }
    }

    pub fn index(&self) -> &Arc<IndexSet> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn get(&self, pos: usize) -> &Rat {
        &self.vals[pos]
    }

    pub fn get_named(&self, name: &str) -> Option<&Rat> {
        self.index.position(name).map(|p| &self.vals[p])
    }

    pub fn set(&mut self, pos: usize, v: Rat) {
        self.vals[pos] = v;
    }

    pub fn values(&self) -> &[Rat] {
        &self.vals
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rat)> + '_ {
        self.index
            .names()
            .iter()
            .map(String::as_str)
            .zip(self.vals.iter())
    }

    pub fn sum_over(&self, positions: impl IntoIterator<Item = usize>) -> Rat {
        positions.into_iter().map(|p| self.vals[p].clone()).sum()
    }

    pub fn dot(&self, other: &RatVec) -> Rat {
        debug_assert_eq!(self.index, other.index);
        self.vals.iter().zip(&other.vals).map(|(a, b)| a * b).sum()
    }

    /// Exact equality with an integer vector.
    pub fn eq_int(&self, other: &IntVec) -> bool {
        self.index == other.index
            && self
                .vals
                .iter()
                .zip(&other.vals)
                .all(|(a, &b)| *a == Rat::from_int(b))
    }

    /// The integer vector with the same entries, if all entries are integral.
    pub fn to_int(&self) -> Option<IntVec> {
        let mut vals = Vec::with_capacity(self.vals.len());
        for v in &self.vals {
            vals.push(v.to_i64()?);
        }
        Some(IntVec {
            index: self.index.clone(),
            vals,
        })
    }

    /// All integer points of the unit hypercube N(x) containing this point:
    /// per coordinate the range floor(x_i)..=ceil(x_i), a single value when
    /// x_i is integral. Returned in lexicographic order; 2^k corners where k
    /// is the number of non-integral coordinates.
    pub fn hypercube_corners(&self) -> Vec<IntVec> {
        let ranges: Vec<(i64, i64)> = self
            .vals
            .iter()
            .map(|v| {
                let lo = v.floor().to_i64().expect("corner out of i64 range");
                let hi = v.ceil().to_i64().expect("corner out of i64 range");
                (lo, hi)
            })
            .collect();
        let mut corners = Vec::new();
        let mut current: Vec<i64> = ranges.iter().map(|&(lo, _)| lo).collect();
        loop {
            corners.push(IntVec {
                index: self.index.clone(),
                vals: current.clone(),
            });
            // Odometer with the last coordinate fastest: lexicographic order.
            let mut pos = ranges.len();
            loop {
                if pos == 0 {
                    return corners;
                }
                pos -= 1;
                if current[pos] < ranges[pos].1 {
                    current[pos] += 1;
                    for (c, r) in current.iter_mut().zip(&ranges).skip(pos + 1) {
                        *c = r.0;
                    }
                    break;
                }
            }
        }
    }
}

impl PartialOrd for RatVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RatVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index
            .cmp(&other.index)
            .then_with(|| self.vals.cmp(&other.vals))
    }
}

impl fmt::Debug for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (name, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}={v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for RatVec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.len()))?;
        for (name, v) in self.iter() {
            map.serialize_entry(name, v)?;
        }
        map.end()
    }
}

/// Helper for deserializing vectors given an index set: a JSON object
/// mapping coordinate name to value, required to be total.
#[derive(Debug, Deserialize)]
pub struct VecDoc(pub std::collections::BTreeMap<String, Rat>);

impl VecDoc {
    pub fn into_rat_vec(self, index: &Arc<IndexSet>) -> Result<RatVec, Error> {
        let mut vals = vec![None; index.len()];
        for (name, v) in self.0 {
            let pos = index
                .position(&name)
                .ok_or_else(|| Error::UnknownCoordinate(name.clone()))?;
            vals[pos] = Some(v);
        }
        let mut out = Vec::with_capacity(index.len());
        for (i, v) in vals.into_iter().enumerate() {
            match v {
                Some(v) => out.push(v),
                None => {
                    return Err(Error::Validation(format!(
                        "missing coordinate `{}` (entries must be explicit)",
                        index.name(i)
                    )))
                }
            }
        }
        RatVec::new(index.clone(), out)
    }

    pub fn into_int_vec(self, index: &Arc<IndexSet>) -> Result<IntVec, Error> {
        let rv = self.into_rat_vec(index)?;
        rv.to_int()
            .ok_or_else(|| Error::Validation("expected integer entries".to_string()))
    }
}
