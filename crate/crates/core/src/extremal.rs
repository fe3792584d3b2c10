//! Exact values of `f(p, k) = min{|A| : D_A(F_p) ≤ k}` for small primes.
//!
//! `D_{cA} = D_A` for every unit `c`, so only one weight set per dilation
//! orbit is tested. Every orbit contains a set holding 1 (dilate by the
//! inverse of any member), and the lexicographically least sorted member of
//! an orbit always starts with 1, so candidates are subsets containing 1
//! that are lex-least among their `|A|` dilates sending a member to 1.

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::davenport::{satisfies_bound, WeightSet};
use crate::error::{Error, Result};
use crate::zmod::{Modulus, ResidueSet};

const BATCH: usize = 1 << 13;

/// Lexicographically least sorted member of `{cA : c ∈ F_p^*}`.
pub fn canonical_form(weights: &WeightSet) -> Result<WeightSet> {
    let m = weights.modulus();
    if !m.is_prime() {
        return Err(Error::NotPrime(m.n()));
    }
    Ok(WeightSet::from_set(ResidueSet::from_values(m, lex_least_dilate(&weights.to_vec(), m)))
        .expect("dilates of a weight set are weight sets"))
}

fn sorted_dilate(set: &[u64], c: u64, m: Modulus) -> Vec<u64> {
    let mut v: Vec<u64> = set.iter().map(|&a| m.mul(a, c)).collect();
    v.sort_unstable();
    v
}

fn lex_least_dilate(set: &[u64], m: Modulus) -> Vec<u64> {
    set.iter()
        .map(|&a| sorted_dilate(set, m.inv(a).expect("nonzero"), m))
        .min()
        .expect("nonempty")
}

/// True when the sorted set `set` is its own orbit representative.
fn is_orbit_representative(set: &[u64], m: Modulus) -> bool {
    if set.first() != Some(&1) {
        return false;
    }
    set.iter().skip(1).all(|&a| {
        let d = sorted_dilate(set, m.inv(a).expect("nonzero"), m);
        d.as_slice() >= set
    })
}

/// Size-`r` subsets of `0..m` in colexicographic order.
struct Colex {
    idx: Vec<usize>,
    m: usize,
    done: bool,
}

impl Colex {
    fn new(m: usize, r: usize) -> Self {
        Colex {
            idx: (0..r).collect(),
            m,
            done: r > m,
        }
    }
}

impl Iterator for Colex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let r = self.idx.len();
        let mut i = 0;
        loop {
            if i == r {
                self.done = true;
                break;
            }
            let limit = if i + 1 < r { self.idx[i + 1] } else { self.m };
            if self.idx[i] + 1 < limit {
                self.idx[i] += 1;
                for (j, slot) in self.idx.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

/// Orbit representatives of size `s` in colex order over `[2, p−1]`.
fn representatives(m: Modulus, s: usize) -> impl Iterator<Item = Vec<u64>> {
    let rest = (m.n() - 2) as usize;
    Colex::new(rest, s - 1).map(|c| {
        std::iter::once(1)
            .chain(c.into_iter().map(|i| i as u64 + 2))
            .collect::<Vec<u64>>()
    })
}

/// Scans size class `s` and returns the first passing representative plus
/// the number of representatives tested up to and including it.
fn scan_size_class<F>(m: Modulus, s: usize, pred: F) -> (Option<Vec<u64>>, u64)
where
    F: Fn(&[u64]) -> bool + Sync,
{
    let mut tested = 0u64;
    let mut iter = representatives(m, s).peekable();
    while iter.peek().is_some() {
        let batch: Vec<Vec<u64>> = iter.by_ref().take(BATCH).collect();
        let verdicts: Vec<Option<bool>> = batch
            .par_iter()
            .map(|set| is_orbit_representative(set, m).then(|| pred(set)))
            .collect();
        for (set, verdict) in batch.into_iter().zip(verdicts) {
            match verdict {
                Some(true) => return (Some(set), tested + 1),
                Some(false) => tested += 1,
                None => {}
            }
        }
    }
    (None, tested)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalValue {
    Exact(u64),
    InfiniteWithinCap { cap: u64 },
}

impl ExtremalValue {
    pub fn exact(&self) -> Option<u64> {
        match self {
            ExtremalValue::Exact(v) => Some(*v),
            ExtremalValue::InfiniteWithinCap { .. } => None,
        }
    }
}

impl std::fmt::Display for ExtremalValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtremalValue::Exact(v) => write!(f, "{v}"),
            ExtremalValue::InfiniteWithinCap { .. } => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtremalValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtremalValue::Exact(v) => serializer.serialize_u64(*v),
            ExtremalValue::InfiniteWithinCap { .. } => {
                serializer.serialize_str("infinite-within-cap")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalResult {
    pub p: u64,
    pub k: u64,
    pub value: ExtremalValue,
    pub witness: Option<WeightSet>,
    pub orbits_tested: u64,
}

impl Serialize for ExtremalResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ExtremalResult", 5)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("orbits_tested", &self.orbits_tested)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("witness", &self.witness)?;
        st.end()
    }
}

/// `ceil(4·(p ln p)^(1/k))`, clamped to `[1, p−1]`.
pub fn default_size_cap(p: u64, k: u64) -> u64 {
    let pf = p as f64;
    let cap = (4.0 * (pf * pf.ln()).powf(1.0 / k as f64)).ceil() as u64;
    cap.clamp(1, p.saturating_sub(1).max(1))
}

/// `ceil(p^(1/k) − 1)`, computed exactly as `min{q : q^k ≥ p} − 1`.
pub fn lower_bound(p: u64, k: u64) -> u64 {
    let k = k as u32;
    let mut q = 1u64;
    while q.checked_pow(k).is_some_and(|v| v < p) {
        q += 1;
    }
    q - 1
}

fn run_enumeration<F>(p: u64, k: u64, size_cap: u64, pred: F) -> Result<ExtremalResult>
where
    F: Fn(&WeightSet) -> bool + Sync,
{
    let m = Modulus::prime(p)?;
    let mut orbits = 0u64;
    let cap = size_cap.min(p - 1);
    for s in 1..=cap as usize {
        let (found, tested) = scan_size_class(m, s, |set| {
            pred(&WeightSet::new(m, set.iter().copied()).expect("valid weights"))
        });
        orbits += tested;
        if let Some(set) = found {
            return Ok(ExtremalResult {
                p,
                k,
                value: ExtremalValue::Exact(s as u64),
                witness: Some(WeightSet::new(m, set).expect("valid weights")),
                orbits_tested: orbits,
            });
        }
    }
    Ok(ExtremalResult {
        p,
        k,
        value: ExtremalValue::InfiniteWithinCap { cap },
        witness: None,
        orbits_tested: orbits,
    })
}

/// Exact `f(p, k)` by size-increasing enumeration of orbit representatives.
pub fn fd_exact(p: u64, k: u64, size_cap: u64) -> Result<ExtremalResult> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    run_enumeration(p, k, size_cap, |a| satisfies_bound(a, k))
}

/// Minimum `|A|` with `A/A ⊇ F_p^*`, by the same enumeration. This equals
/// `f(p, 2)`: `ax + by = 0` is solvable for all nonzero `x, y` exactly when
/// every nonzero ratio is a quotient of two weights.
pub fn fd_quotient_oracle(p: u64) -> Result<u64> {
    let r = run_enumeration(p, 2, p - 1, |a| {
        ResidueSet::quotient_set(a.as_set(), a.as_set())
            .expect("prime modulus")
            .covers_nonzero()
    })?;
    Ok(r.value.exact().expect("A = F_p^* always covers"))
}
