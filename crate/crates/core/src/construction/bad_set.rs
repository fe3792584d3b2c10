//! The set S of tuples `t ∈ (F_p^*)^d` for which `Σ_i t_i·A_i(j)` meets
//! `B = [−2L, 2L]` for some `j`, where `A_i(j) = [−h, h]` for `i ≠ j`,
//! `A_j(j) = [1, h]` and `h = floor(L/2)`. If `α` fails to be good for `t`
//! then `α·t ∈ S`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::ConstructionParams;
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::zmod::{materialize_interval, IntervalKind, IntervalSpec, Modulus, ResidueSet};

/// Largest universe `(p−1)^d` stored as an explicit bit vector.
pub const EXPLICIT_LIMIT: u64 = 1 << 28;

/// An element of `(F_p^*)^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TupleVec(pub Vec<u64>);

impl TupleVec {
    pub fn ones(d: usize) -> Self {
        TupleVec(vec![1; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    /// Checks dimension and that each component lies in `[1, p−1]`.
    pub fn validate(&self, d: usize, m: Modulus) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.dim(),
            });
        }
        match self.0.iter().find(|&&c| c == 0 || c >= m.n()) {
            Some(&c) => Err(Error::NonUnitComponent(c)),
            None => Ok(()),
        }
    }

    /// Componentwise product.
    pub fn mul(&self, other: &TupleVec, m: Modulus) -> TupleVec {
        TupleVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| m.mul(a, b))
                .collect(),
        )
    }

    /// Componentwise inverse; components must be units.
    pub fn inverse(&self, m: Modulus) -> TupleVec {
        TupleVec(
            self.0
                .iter()
                .map(|&a| m.inv(a).expect("tuple components are units"))
                .collect(),
        )
    }

    pub fn has_distinct_components(&self) -> bool {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }

    /// Position in the row-major enumeration of `(F_p^*)^d`.
    pub fn index(&self, p: u64) -> u64 {
        self.0.iter().fold(0, |acc, &c| acc * (p - 1) + (c - 1))
    }

    pub fn from_index(mut idx: u64, d: usize, p: u64) -> TupleVec {
        let mut v = vec![0; d];
        for slot in v.iter_mut().rev() {
            *slot = idx % (p - 1) + 1;
            idx /= p - 1;
        }
        TupleVec(v)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, p: u64) -> TupleVec {
        TupleVec((0..d).map(|_| rng.gen_range(1..p)).collect())
    }
}

/// `(p−1)^d`, saturating.
pub fn universe_size(p: u64, d: usize) -> u128 {
    (p as u128 - 1).saturating_pow(d as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BadSetRepr {
    /// Bit `i` is set iff `TupleVec::from_index(i)` is in S.
    Explicit {
        bits: Bits,
        size: u64,
        component_sizes: Vec<u64>,
    },
    /// Membership is computed per query.
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadSet {
    modulus: Modulus,
    d: usize,
    radius: u64,
    half: u64,
    repr: BadSetRepr,
}

impl BadSet {
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn repr(&self) -> &BadSetRepr {
        &self.repr
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.repr, BadSetRepr::Explicit { .. })
    }

    pub fn size(&self) -> Option<u64> {
        match &self.repr {
            BadSetRepr::Explicit { size, .. } => Some(*size),
            BadSetRepr::Oracle => None,
        }
    }

    pub fn universe_size(&self) -> u128 {
        universe_size(self.modulus.n(), self.d)
    }

    /// `3k·L^k·(p−1)^(k−2)` with `k = d + 1`.
    pub fn size_bound(&self) -> u128 {
        let k = self.d as u32 + 1;
        (3 * k as u128)
            .saturating_mul((self.radius as u128).saturating_pow(k))
            .saturating_mul((self.modulus.n() as u128 - 1).saturating_pow(k - 2))
    }

    pub fn contains(&self, t: &TupleVec) -> bool {
        match &self.repr {
            BadSetRepr::Explicit { bits, .. } => bits.get(t.index(self.modulus.n()) as usize),
            BadSetRepr::Oracle => self.predicate(t),
        }
    }

    /// Direct evaluation of the membership condition, independent of the
    /// representation.
    pub fn predicate(&self, t: &TupleVec) -> bool {
        (0..self.d).any(|j| self.component_predicate(t, j))
    }

    fn component_predicate(&self, t: &TupleVec, j: usize) -> bool {
        if self.half == 0 {
            return false;
        }
        let m = self.modulus;
        let b = ResidueSet::interval(m, -2 * self.radius as i64, 2 * self.radius as i64);
        let mut acc = materialize_interval(
            IntervalSpec {
                step: t.0[j],
                radius: self.half,
                kind: IntervalKind::Positive,
            },
            m,
        )
        .expect("unit step")
        .set;
        for (i, &ti) in t.0.iter().enumerate() {
            if i == j {
                continue;
            }
            let part = materialize_interval(IntervalSpec::full(ti, self.half), m)
                .expect("unit step")
                .set;
            acc = acc.sumset(&part).expect("same modulus");
        }
        acc.intersects(&b).expect("same modulus")
    }

    /// Members in index order (explicit representation only).
    pub fn iter(&self) -> Option<impl Iterator<Item = TupleVec> + '_> {
        match &self.repr {
            BadSetRepr::Explicit { bits, .. } => {
                let (d, p) = (self.d, self.modulus.n());
                Some(
                    bits.iter_ones()
                        .map(move |i| TupleVec::from_index(i as u64, d, p)),
                )
            }
            BadSetRepr::Oracle => None,
        }
    }

    pub fn component_sizes(&self) -> Option<&[u64]> {
        match &self.repr {
            BadSetRepr::Explicit {
                component_sizes, ..
            } => Some(component_sizes),
            BadSetRepr::Oracle => None,
        }
    }
}

fn explicit_d1(m: Modulus, radius: u64, half: u64) -> Bits {
    let p = m.n();
    let mut bits = Bits::new(p as usize - 1);
    let r = radius as i64;
    for a in 1..=half {
        let a_inv = m.inv(a % p).expect("a < p");
        for b in (-2 * r..=2 * r).filter(|&b| m.reduce(b) != 0) {
            let t = m.mul(m.reduce(b), a_inv);
            bits.set(t as usize - 1);
        }
    }
    bits
}

/// Component `j` of the d = 2 bad set: `t_j·a_j + t_o·a_o = b` with
/// `a_j ∈ [1, h]`, `a_o ∈ [−h, h]`, `b ∈ B`; solved for `t_j`.
fn explicit_d2_component(m: Modulus, radius: u64, half: u64, j: usize) -> Bits {
    let p = m.n();
    let len = ((p - 1) * (p - 1)) as usize;
    let r = radius as i64;
    let h = half as i64;
    (1..=h)
        .into_par_iter()
        .fold(
            || Bits::new(len),
            |mut bits, aj| {
                let aj_inv = m.inv(aj as u64 % p).expect("a < p");
                for ao in -h..=h {
                    let ao_r = m.reduce(ao);
                    for b in -2 * r..=2 * r {
                        let b_r = m.reduce(b);
                        for to in 1..p {
                            let tj = m.mul(m.sub(b_r, m.mul(to, ao_r)), aj_inv);
                            if tj == 0 {
                                continue;
                            }
                            let (t0, t1) = if j == 0 { (tj, to) } else { (to, tj) };
                            bits.set(((t0 - 1) * (p - 1) + (t1 - 1)) as usize);
                        }
                    }
                }
                bits
            },
        )
        .reduce(
            || Bits::new(len),
            |mut a, b| {
                a.or_assign(&b);
                a
            },
        )
}

/// Builds S for tuple dimension `d`. Dimensions 1 and 2 are enumerated
/// explicitly while `(p−1)^d ≤ EXPLICIT_LIMIT`; otherwise membership is
/// evaluated on demand.
pub fn build_bad_set(params: &ConstructionParams, d: usize) -> BadSet {
    let m = params.modulus();
    let (radius, half) = (params.radius, params.half());
    let explicit = d <= 2 && universe_size(m.n(), d) <= EXPLICIT_LIMIT as u128;
    let repr = if !explicit {
        BadSetRepr::Oracle
    } else if half == 0 {
        BadSetRepr::Explicit {
            bits: Bits::new(universe_size(m.n(), d) as usize),
            size: 0,
            component_sizes: vec![0; d],
        }
    } else if half >= m.n() {
        // A_j(j) contains a multiple of p, so 0 ∈ Σ t_i A_i(j) for every t.
        let len = universe_size(m.n(), d) as u64;
        BadSetRepr::Explicit {
            bits: Bits::full(len as usize),
            size: len,
            component_sizes: vec![len; d],
        }
    } else if d == 1 {
        let bits = explicit_d1(m, radius, half);
        let size = bits.count_ones() as u64;
        BadSetRepr::Explicit {
            bits,
            size,
            component_sizes: vec![size],
        }
    } else {
        let c0 = explicit_d2_component(m, radius, half, 0);
        let c1 = explicit_d2_component(m, radius, half, 1);
        let component_sizes = vec![c0.count_ones() as u64, c1.count_ones() as u64];
        let mut bits = c0;
        bits.or_assign(&c1);
        let size = bits.count_ones() as u64;
        BadSetRepr::Explicit {
            bits,
            size,
            component_sizes,
        }
    };
    BadSet {
        modulus: m,
        d,
        radius,
        half,
        repr,
    }
}

/// The same set with membership always computed per query.
pub fn oracle_bad_set(params: &ConstructionParams, d: usize) -> BadSet {
    BadSet {
        modulus: params.modulus(),
        d,
        radius: params.radius,
        half: params.half(),
        repr: BadSetRepr::Oracle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::params::{make_params, params_with_radius};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Triple loop over `a_1, a_2, b` for d = 2.
    fn naive_d2(t: &TupleVec, p: u64, radius: u64) -> bool {
        let h = (radius / 2) as i64;
        let r = radius as i64;
        let m = Modulus::new(p).unwrap();
        for j in 0..2 {
            for aj in 1..=h {
                for ao in -h..=h {
                    let (a0, a1) = if j == 0 { (aj, ao) } else { (ao, aj) };
                    let s = m.add(m.mul(t.0[0], m.reduce(a0)), m.mul(t.0[1], m.reduce(a1)));
                    if (-2 * r..=2 * r).any(|b| m.reduce(b) == s) {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn tuple_indexing_roundtrip() {
        for idx in 0..(12u64 * 12 * 12) {
            let t = TupleVec::from_index(idx, 3, 13);
            t.validate(3, Modulus::new(13).unwrap()).unwrap();
            assert_eq!(t.index(13), idx);
        }
    }

    #[test]
    fn d1_small_elements_are_bad() {
        let params = make_params(10007, 4, 9.0, 0).unwrap();
        let s = build_bad_set(&params, 1);
        assert!(s.contains(&TupleVec(vec![1])));
        assert!(s.predicate(&TupleVec(vec![1])));
        let size = s.size().unwrap();
        assert!((size as u128) < s.size_bound());
        assert_eq!(s.size_bound(), 6 * 91 * 91);
    }

    #[test]
    fn d1_explicit_matches_predicate() {
        let params = params_with_radius(211, 4, 9, 0).unwrap();
        let s = build_bad_set(&params, 1);
        for t in 1..211 {
            let t = TupleVec(vec![t]);
            assert_eq!(s.contains(&t), s.predicate(&t));
        }
    }

    #[test]
    fn d2_matches_naive_loop() {
        // L = 4 keeps S sparse enough that both outcomes occur.
        for radius in [12u64, 4] {
            let params = params_with_radius(499, 6, radius, 0).unwrap();
            let s = build_bad_set(&params, 2);
            assert!(s.is_explicit());
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut members = 0;
            for _ in 0..100 {
                let t = TupleVec::random(&mut rng, 2, 499);
                let naive = naive_d2(&t, 499, radius);
                assert_eq!(s.contains(&t), naive, "{t:?}");
                assert_eq!(s.predicate(&t), naive);
                members += usize::from(naive);
            }
            if radius == 4 {
                assert!(members > 0 && members < 100);
            }
            assert!((s.size().unwrap() as u128) < s.size_bound());
        }
    }

    #[test]
    fn radius_one_gives_empty_set() {
        let params = params_with_radius(101, 4, 1, 0).unwrap();
        let s = build_bad_set(&params, 1);
        assert_eq!(s.size(), Some(0));
        assert!(!s.predicate(&TupleVec(vec![1])));
    }
}
