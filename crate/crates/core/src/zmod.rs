//! Residues mod n and dense residue-set algebra.
//!
//! A [`ResidueSet`] is a bit vector of length n. Sumsets are computed by
//! OR-ing rotated copies of the larger operand, one per member of the
//! smaller operand, so the cost is `O(min(|S|, |T|) · n / 64)`.

use serde::{Deserialize, Serialize, Serializer};

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `lo..=hi` by a sieve of Eratosthenes.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let hi_us = hi as usize;
    let mut composite = vec![false; hi_us + 1];
    let mut i = 2usize;
    while i * i <= hi_us {
        if !composite[i] {
            let mut j = i * i;
            while j <= hi_us {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2)..=hi)
        .filter(|&v| !composite[v as usize])
        .collect()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    n: u64,
    is_prime: bool,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::ModulusTooSmall(n));
        }
        Ok(Modulus {
            n,
            is_prime: is_prime(n),
        })
    }

    pub fn prime(p: u64) -> Result<Self> {
        let m = Modulus::new(p)?;
        if !m.is_prime {
            return Err(Error::NotPrime(p));
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn is_prime(&self) -> bool {
        self.is_prime
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.n as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.n as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.n - b % self.n)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.n - a % self.n) % self.n
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.n as u128) as u64
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let (mut old_r, mut r) = (a as i128 % self.n as i128, self.n as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        (old_r == 1).then(|| old_s.rem_euclid(self.n as i128) as u64)
    }

    pub fn residue(&self, v: i64) -> Residue {
        Residue {
            value: self.reduce(v),
            modulus: *self,
        }
    }
}

/// An element of Z_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<Residue> {
        self.modulus.inv(self.value).map(|value| Residue {
            value,
            modulus: self.modulus,
        })
    }
}

impl std::ops::Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        Residue {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl std::ops::Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        Residue {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

/// Dense set of residues mod n with a cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ResidueSet {
    modulus: Modulus,
    bits: Bits,
    card: usize,
}

impl ResidueSet {
    pub fn empty(modulus: Modulus) -> Self {
        ResidueSet {
            modulus,
            bits: Bits::new(modulus.n() as usize),
            card: 0,
        }
    }

    pub fn full(modulus: Modulus) -> Self {
        ResidueSet {
            modulus,
            bits: Bits::full(modulus.n() as usize),
            card: modulus.n() as usize,
        }
    }

    /// Nonzero residues, i.e. F_p^* when n is prime.
    pub fn units_and_nonzero(modulus: Modulus) -> Self {
        Self::full(modulus).remove_zero()
    }

    /// Builds a set from signed values, reducing each mod n.
    pub fn from_signed<I: IntoIterator<Item = i64>>(modulus: Modulus, values: I) -> Self {
        let mut bits = Bits::new(modulus.n() as usize);
        for v in values {
            bits.set(modulus.reduce(v) as usize);
        }
        Self::from_bits(modulus, bits)
    }

    /// Builds a set from nonnegative values, reducing each mod n.
    pub fn from_values<I: IntoIterator<Item = u64>>(modulus: Modulus, values: I) -> Self {
        let mut bits = Bits::new(modulus.n() as usize);
        for v in values {
            bits.set((v % modulus.n()) as usize);
        }
        Self::from_bits(modulus, bits)
    }

    pub(crate) fn from_bits(modulus: Modulus, bits: Bits) -> Self {
        let card = bits.count_ones();
        ResidueSet {
            modulus,
            bits,
            card,
        }
    }

    /// The contiguous run `lo..=hi` (signed, reduced mod n).
    pub fn interval(modulus: Modulus, lo: i64, hi: i64) -> Self {
        let n = modulus.n() as i64;
        if hi < lo {
            return Self::empty(modulus);
        }
        if hi - lo + 1 >= n {
            return Self::full(modulus);
        }
        let mut bits = Bits::new(n as usize);
        let start = modulus.reduce(lo) as usize;
        let count = (hi - lo + 1) as usize;
        let first = count.min(n as usize - start);
        bits.set_range(start, start + first);
        bits.set_range(0, count - first);
        Self::from_bits(modulus, bits)
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.card
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        v < self.modulus.n() && self.bits.get(v as usize)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| i as u64)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    fn check_same(&self, other: &ResidueSet) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.n(),
                right: other.modulus.n(),
            });
        }
        Ok(())
    }

    /// `{c·s : s ∈ S}`.
    pub fn dilate(&self, c: u64) -> ResidueSet {
        let m = self.modulus;
        let c = c % m.n();
        if c == 1 {
            return self.clone();
        }
        let mut bits = Bits::new(m.n() as usize);
        for s in self.iter() {
            bits.set(m.mul(s, c) as usize);
        }
        Self::from_bits(m, bits)
    }

    /// `{s + c : s ∈ S}`.
    pub fn translate(&self, c: u64) -> ResidueSet {
        let mut bits = Bits::new(self.modulus.n() as usize);
        bits.or_rotated(&self.bits, (c % self.modulus.n()) as usize);
        ResidueSet {
            modulus: self.modulus,
            bits,
            card: self.card,
        }
    }

    pub fn negate(&self) -> ResidueSet {
        self.dilate(self.modulus.n() - 1)
    }

    pub fn sumset(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check_same(other)?;
        let (small, large) = if self.card <= other.card {
            (self, other)
        } else {
            (other, self)
        };
        let mut bits = Bits::new(self.modulus.n() as usize);
        for s in small.iter() {
            bits.or_rotated(&large.bits, s as usize);
        }
        Ok(Self::from_bits(self.modulus, bits))
    }

    /// `S − S`.
    pub fn difference_set(&self) -> ResidueSet {
        self.sumset(&self.negate())
            .expect("same modulus by construction")
    }

    /// `{a·b⁻¹ : a ∈ num, b ∈ den, b ≠ 0}`; requires a prime modulus.
    pub fn quotient_set(num: &ResidueSet, den: &ResidueSet) -> Result<ResidueSet> {
        num.check_same(den)?;
        let m = num.modulus;
        if !m.is_prime() {
            return Err(Error::NotPrime(m.n()));
        }
        let mut bits = Bits::new(m.n() as usize);
        let full = m.n() as usize;
        let mut card = 0;
        for b in den.iter().filter(|&b| b != 0) {
            let b_inv = m.inv(b).expect("nonzero in a prime field");
            for a in num.iter() {
                bits.set(m.mul(a, b_inv) as usize);
            }
            card = bits.count_ones();
            if card == full {
                break;
            }
        }
        Ok(ResidueSet {
            modulus: m,
            bits,
            card,
        })
    }

    /// `S \ {0}`.
    pub fn remove_zero(&self) -> ResidueSet {
        if !self.contains(0) {
            return self.clone();
        }
        let mut bits = self.bits.clone();
        bits.clear(0);
        ResidueSet {
            modulus: self.modulus,
            bits,
            card: self.card - 1,
        }
    }

    pub fn with_zero(&self) -> ResidueSet {
        if self.contains(0) {
            return self.clone();
        }
        let mut bits = self.bits.clone();
        bits.set(0);
        ResidueSet {
            modulus: self.modulus,
            bits,
            card: self.card + 1,
        }
    }

    pub fn union(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check_same(other)?;
        let mut bits = self.bits.clone();
        bits.or_assign(&other.bits);
        Ok(Self::from_bits(self.modulus, bits))
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check_same(other)?;
        let mut bits = self.bits.clone();
        bits.and_assign(&other.bits);
        Ok(Self::from_bits(self.modulus, bits))
    }

    pub fn intersects(&self, other: &ResidueSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.bits.intersects(&other.bits))
    }

    pub fn is_subset(&self, other: &ResidueSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// True iff every nonzero residue is a member.
    pub fn covers_nonzero(&self) -> bool {
        self.card + usize::from(!self.contains(0)) == self.modulus.n() as usize
    }
}

impl Serialize for ResidueSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Which part of `t·[−L, L]` an [`IntervalSpec`] denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    /// `t·[−L, L]`
    Full,
    /// `t·[0, L]`
    NonNegative,
    /// `t·[1, L]`
    Positive,
    /// `t·[−L, 0]`
    NonPositive,
}

impl IntervalKind {
    fn range(self, radius: i64) -> (i64, i64) {
        match self {
            IntervalKind::Full => (-radius, radius),
            IntervalKind::NonNegative => (0, radius),
            IntervalKind::Positive => (1, radius),
            IntervalKind::NonPositive => (-radius, 0),
        }
    }
}

/// The progression `{j·t : j ∈ range}` for a step `t` and radius `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntervalSpec {
    pub step: u64,
    pub radius: u64,
    pub kind: IntervalKind,
}

impl IntervalSpec {
    pub fn full(step: u64, radius: u64) -> Self {
        IntervalSpec {
            step,
            radius,
            kind: IntervalKind::Full,
        }
    }

    pub fn nominal_size(&self) -> usize {
        let r = self.radius as u128;
        let size = match self.kind {
            IntervalKind::Full => 2 * r + 1,
            IntervalKind::NonNegative | IntervalKind::NonPositive => r + 1,
            IntervalKind::Positive => r,
        };
        size.min(usize::MAX as u128) as usize
    }
}

/// Result of [`materialize_interval`]; `wrapped` is set when reduction mod n
/// made some multiples collide or the progression reaches all of Z_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Materialized {
    pub set: ResidueSet,
    pub wrapped: bool,
}

pub fn materialize_interval(spec: IntervalSpec, modulus: Modulus) -> Result<Materialized> {
    let step = spec.step % modulus.n();
    if step == 0 {
        return Err(Error::ZeroStep);
    }
    // Radii beyond n only repeat residues.
    let radius = spec.radius.min(modulus.n()) as i64;
    let (lo, hi) = spec.kind.range(radius);
    let set = if step == 1 {
        ResidueSet::interval(modulus, lo, hi)
    } else {
        let mut bits = Bits::new(modulus.n() as usize);
        let mut cur = modulus.mul(modulus.reduce(lo), step);
        for _ in lo..=hi {
            bits.set(cur as usize);
            cur = modulus.add(cur, step);
        }
        ResidueSet::from_bits(modulus, bits)
    };
    let nominal = spec.nominal_size();
    let wrapped = set.len() < nominal || nominal as u64 >= modulus.n();
    Ok(Materialized { set, wrapped })
}

/// A subset `Y` of a sum of symmetric progressions with `Y − Y` inside that sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricCore {
    pub core: ResidueSet,
    /// The full sumset the core was extracted from.
    pub target: ResidueSet,
    /// Chosen half per summand: `false` is `t·[0, L]`, `true` is `t·[−L, 0]`.
    pub signs: Vec<bool>,
}

/// Sum of the given full progressions (plus `I = [−L, L]` first when
/// `include_unit`, with `L` taken from the first spec).
fn summands(specs: &[IntervalSpec], include_unit: bool) -> Result<Vec<IntervalSpec>> {
    if specs.is_empty() {
        return Err(Error::EmptySpecList);
    }
    let mut all = Vec::with_capacity(specs.len() + 1);
    if include_unit {
        all.push(IntervalSpec::full(1, specs[0].radius));
    }
    all.extend(specs.iter().map(|s| IntervalSpec {
        kind: IntervalKind::Full,
        ..*s
    }));
    Ok(all)
}

fn sum_of(specs: &[IntervalSpec], modulus: Modulus) -> Result<ResidueSet> {
    let mut acc = ResidueSet::from_values(modulus, [0]);
    for spec in specs {
        acc = acc.sumset(&materialize_interval(*spec, modulus)?.set)?;
    }
    Ok(acc)
}

/// Picks, over all `2^r` choices of half-progressions `t_i·[0, L]` or
/// `t_i·[−L, 0]`, the sum of largest cardinality. Every element of the full
/// sumset lies in one of the `2^r` half-sums, so the winner has at least
/// `|target| / 2^r` elements, and `Y − Y` equals the full sumset because
/// `[0, L] − [0, L] = [−L, L]`. Ties go to the lexicographically least sign
/// pattern with `+` before `−`.
pub fn extract_symmetric_core(
    specs: &[IntervalSpec],
    include_unit: bool,
    modulus: Modulus,
) -> Result<SymmetricCore> {
    let all = summands(specs, include_unit)?;
    for s in &all {
        if s.step % modulus.n() == 0 {
            return Err(Error::ZeroStep);
        }
    }
    let target = sum_of(&all, modulus)?;
    let r = all.len();
    let mut best: Option<(ResidueSet, Vec<bool>)> = None;
    for mask in 0u32..(1 << r) {
        let signs: Vec<bool> = (0..r).map(|i| mask >> (r - 1 - i) & 1 == 1).collect();
        let halves: Vec<IntervalSpec> = all
            .iter()
            .zip(&signs)
            .map(|(s, &neg)| IntervalSpec {
                kind: if neg {
                    IntervalKind::NonPositive
                } else {
                    IntervalKind::NonNegative
                },
                ..*s
            })
            .collect();
        let y = sum_of(&halves, modulus)?;
        if best.as_ref().is_none_or(|(b, _)| y.len() > b.len()) {
            best = Some((y, signs));
        }
    }
    let (core, signs) = best.expect("at least one sign pattern");
    Ok(SymmetricCore {
        core,
        target,
        signs,
    })
}
