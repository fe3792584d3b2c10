//! Exact A-weighted Davenport constants of Z_n.
//!
//! A sequence is zero-sum-free for the weight set A when no nonempty
//! subsequence admits weights from A summing to zero. The solver extends
//! nondecreasing sequences depth-first while carrying the set of reachable
//! weighted subsequence sums, pruning as soon as 0 becomes reachable.

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::zmod::{Modulus, ResidueSet};

/// A nonempty weight set `A ⊆ [1, n−1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSet {
    weights: ResidueSet,
}

impl WeightSet {
    /// Rejects weights outside `[1, n−1]` and the empty set.
    pub fn new<I: IntoIterator<Item = u64>>(modulus: Modulus, weights: I) -> Result<Self> {
        let mut values = Vec::new();
        for w in weights {
            if w == 0 || w >= modulus.n() {
                return Err(Error::InvalidWeight {
                    weight: w,
                    max: modulus.n() - 1,
                });
            }
            values.push(w);
        }
        Self::from_set(ResidueSet::from_values(modulus, values))
    }

    pub fn from_set(weights: ResidueSet) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeightSet);
        }
        if weights.contains(0) {
            return Err(Error::InvalidWeight {
                weight: 0,
                max: weights.modulus().n() - 1,
            });
        }
        Ok(WeightSet { weights })
    }

    /// All of `[1, n−1]`.
    pub fn all(modulus: Modulus) -> Self {
        WeightSet {
            weights: ResidueSet::units_and_nonzero(modulus),
        }
    }

    /// `{1, −1}` (just `{1}` when n = 2).
    pub fn plus_minus_one(modulus: Modulus) -> Self {
        WeightSet {
            weights: ResidueSet::from_values(modulus, [1, modulus.n() - 1]),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.weights.modulus()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_set(&self) -> &ResidueSet {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.weights.iter()
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.weights.to_vec()
    }

    pub fn contains(&self, w: u64) -> bool {
        self.weights.contains(w)
    }

    /// `cA` for a unit `c`.
    pub fn dilate(&self, c: u64) -> Result<Self> {
        let m = self.modulus();
        if m.inv(c % m.n()).is_none() {
            return Err(Error::InvalidParams(format!(
                "dilation factor {c} is not a unit mod {}",
                m.n()
            )));
        }
        Ok(WeightSet {
            weights: self.weights.dilate(c),
        })
    }
}

impl Serialize for WeightSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.weights.serialize(serializer)
    }
}

/// An ordered sequence of elements of Z_n (repetition allowed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSequence {
    modulus: Modulus,
    elements: Vec<u64>,
}

impl GroupSequence {
    pub fn new<I: IntoIterator<Item = u64>>(modulus: Modulus, elements: I) -> Self {
        GroupSequence {
            modulus,
            elements: elements.into_iter().map(|x| x % modulus.n()).collect(),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the elements are nondecreasing.
    pub fn is_canonical(&self) -> bool {
        self.elements.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn canonical(&self) -> GroupSequence {
        let mut elements = self.elements.clone();
        elements.sort_unstable();
        GroupSequence {
            modulus: self.modulus,
            elements,
        }
    }
}

impl Serialize for GroupSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

/// `Z ∪ Ax ∪ (Z + Ax)`: the reachable sums after appending `x`.
fn extend_closure(closure: &ResidueSet, weights: &WeightSet, x: u64) -> ResidueSet {
    let scaled = weights.as_set().dilate(x);
    let shifted = closure.sumset(&scaled).expect("same modulus");
    closure
        .union(&scaled)
        .and_then(|u| u.union(&shifted))
        .expect("same modulus")
}

/// Every value `Σ a_j x_{i_j}` over nonempty subsequences and weights `a_j ∈ A`.
pub fn weighted_sum_closure(seq: &GroupSequence, weights: &WeightSet) -> Result<ResidueSet> {
    if seq.modulus != weights.modulus() {
        return Err(Error::ModulusMismatch {
            left: seq.modulus.n(),
            right: weights.modulus().n(),
        });
    }
    Ok(seq
        .elements
        .iter()
        .fold(ResidueSet::empty(seq.modulus), |z, &x| {
            extend_closure(&z, weights, x)
        }))
}

pub fn is_zero_sum_free(seq: &GroupSequence, weights: &WeightSet) -> Result<bool> {
    Ok(!weighted_sum_closure(seq, weights)?.contains(0))
}

/// Either the exact constant or a note that a zero-sum-free sequence of
/// length `cap` exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DavenportValue {
    Exact(u64),
    ExceedsCap { cap: u64 },
}

impl DavenportValue {
    pub fn exact(&self) -> Option<u64> {
        match self {
            DavenportValue::Exact(v) => Some(*v),
            DavenportValue::ExceedsCap { .. } => None,
        }
    }
}

impl Serialize for DavenportValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DavenportValue::Exact(v) => serializer.serialize_u64(*v),
            DavenportValue::ExceedsCap { .. } => serializer.serialize_str("exceeds-cap"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DavenportResult {
    pub value: DavenportValue,
    /// A longest zero-sum-free sequence found (length `value − 1`, or `cap`).
    pub witness: GroupSequence,
    pub nodes_explored: u64,
}

impl Serialize for DavenportResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DavenportResult", 3)?;
        st.serialize_field("nodes_explored", &self.nodes_explored)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("witness", &self.witness)?;
        st.end()
    }
}

/// Depth-first search state over nondecreasing sequences.
struct Search<'a> {
    weights: &'a WeightSet,
    depth_limit: usize,
    /// Stop at the first sequence of length `depth_limit`.
    stop_at_limit: bool,
    nodes: u64,
    best: Vec<u64>,
    hit_limit: bool,
}

impl Search<'_> {
    fn run(&mut self, seq: &mut Vec<u64>, closure: &ResidueSet) {
        if seq.len() > self.best.len() {
            self.best = seq.clone();
        }
        if seq.len() >= self.depth_limit {
            self.hit_limit = true;
            return;
        }
        let n = self.weights.modulus().n();
        let start = seq.last().copied().unwrap_or(1).max(1);
        for x in start..n {
            self.nodes += 1;
            let next = extend_closure(closure, self.weights, x);
            if next.contains(0) {
                continue;
            }
            debug_assert!(next.len() > closure.len());
            seq.push(x);
            self.run(seq, &next);
            seq.pop();
            if self.hit_limit && self.stop_at_limit {
                return;
            }
        }
    }
}

/// First-level subtrees of the search. For a prime modulus every
/// zero-sum-free sequence can be dilated so its least element is 1, so the
/// roots are `(1)` followed by each candidate second element.
fn roots(weights: &WeightSet) -> Vec<(Vec<u64>, ResidueSet)> {
    let m = weights.modulus();
    let empty = ResidueSet::empty(m);
    let mut out = Vec::new();
    if m.is_prime() {
        let first = extend_closure(&empty, weights, 1);
        debug_assert!(!first.contains(0));
        for x in 1..m.n() {
            let next = extend_closure(&first, weights, x);
            if !next.contains(0) {
                out.push((vec![1, x], next));
            }
        }
    } else {
        for x in 1..m.n() {
            let next = extend_closure(&empty, weights, x);
            if !next.contains(0) {
                out.push((vec![x], next));
            }
        }
    }
    out
}

struct BranchOutcome {
    best: Vec<u64>,
    nodes: u64,
    hit_limit: bool,
}

fn search_branches(weights: &WeightSet, limit: usize, stop_at_limit: bool) -> (Vec<BranchOutcome>, u64) {
    let m = weights.modulus();
    let root_nodes = if m.is_prime() { m.n() } else { m.n() - 1 };
    let outcomes = roots(weights)
        .into_par_iter()
        .map(|(mut seq, closure)| {
            let mut search = Search {
                weights,
                depth_limit: limit,
                stop_at_limit,
                nodes: 0,
                best: Vec::new(),
                hit_limit: false,
            };
            if seq.len() > limit {
                seq.truncate(limit);
                return BranchOutcome {
                    best: seq,
                    nodes: 0,
                    hit_limit: true,
                };
            }
            search.run(&mut seq, &closure);
            BranchOutcome {
                best: search.best,
                nodes: search.nodes,
                hit_limit: search.hit_limit,
            }
        })
        .collect();
    (outcomes, root_nodes)
}

/// Smallest zero-sum-free sequence of the length-1 kind: `(1)`, which is
/// always zero-sum-free since every weight is nonzero.
fn trivial_witness(weights: &WeightSet) -> Vec<u64> {
    let empty = ResidueSet::empty(weights.modulus());
    (1..weights.modulus().n())
        .find(|&x| !extend_closure(&empty, weights, x).contains(0))
        .map(|x| vec![x])
        .unwrap_or_default()
}

/// `D_A(Z_n)` = 1 + the maximum length of a zero-sum-free sequence.
///
/// If a zero-sum-free sequence of length `cap` exists the result is
/// [`DavenportValue::ExceedsCap`] with that sequence as witness. With
/// `cap ≥ n − 1` the answer is always exact: each appended element strictly
/// enlarges the reachable set unless it reaches 0, so zero-sum-free
/// sequences have length at most `n − 1`.
pub fn davenport_constant(weights: &WeightSet, cap: u64) -> DavenportResult {
    let m = weights.modulus();
    let cap = cap.max(1) as usize;
    let (outcomes, root_nodes) = search_branches(weights, cap, true);
    let mut best = trivial_witness(weights);
    best.truncate(cap);
    let mut nodes = root_nodes;
    let mut hit = best.len() >= cap;
    for o in &outcomes {
        nodes += o.nodes;
        if !hit && (o.best.len() > best.len() || o.hit_limit) {
            best = o.best.clone();
            hit = o.hit_limit;
        }
    }
    let value = if hit {
        DavenportValue::ExceedsCap { cap: cap as u64 }
    } else {
        DavenportValue::Exact(best.len() as u64 + 1)
    };
    DavenportResult {
        value,
        witness: GroupSequence::new(m, best),
        nodes_explored: nodes,
    }
}

/// A zero-sum-free sequence of length exactly `len`, if any exists.
pub fn find_zero_sum_free(weights: &WeightSet, len: usize) -> Option<GroupSequence> {
    let m = weights.modulus();
    if len == 0 {
        return Some(GroupSequence::new(m, []));
    }
    let short = trivial_witness(weights);
    if len == 1 {
        return Some(GroupSequence::new(m, short));
    }
    roots(weights)
        .into_par_iter()
        .find_map_first(|(mut seq, closure)| {
            if seq.len() >= len {
                seq.truncate(len);
                return Some(seq);
            }
            let mut search = Search {
                weights,
                depth_limit: len,
                stop_at_limit: true,
                nodes: 0,
                best: Vec::new(),
                hit_limit: false,
            };
            search.run(&mut seq, &closure);
            search.hit_limit.then_some(search.best)
        })
        .map(|s| GroupSequence::new(m, s))
}

/// `D_A(Z_n) ≤ k`, i.e. no zero-sum-free sequence of length `k` exists.
pub fn satisfies_bound(weights: &WeightSet, k: u64) -> bool {
    find_zero_sum_free(weights, k as usize).is_none()
}
