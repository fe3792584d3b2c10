//! Fixed-length bit vector used as the backing store for residue sets and
//! explicit bad sets.

const WORD: usize = 64;

#[inline]
fn low_mask(count: usize) -> u64 {
    if count >= WORD {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

/// Dense bit vector of a fixed length. Bits at positions `>= len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut bits = Bits {
            len,
            words: vec![u64::MAX; len.div_ceil(WORD)],
        };
        bits.trim();
        bits
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(rem);
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Positions of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn or_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Sets every bit in `start..end` (no wrap-around).
    pub fn set_range(&mut self, start: usize, end: usize) {
        debug_assert!(start <= end && end <= self.len);
        let mut pos = start;
        while pos < end {
            let off = pos % WORD;
            let take = (WORD - off).min(end - pos);
            self.words[pos / WORD] |= low_mask(take) << off;
            pos += take;
        }
    }

    /// The 64 bits starting at `pos`; positions past the end read as zero.
    #[inline]
    fn window(&self, pos: usize) -> u64 {
        let wi = pos / WORD;
        let off = pos % WORD;
        let lo = self.words.get(wi).copied().unwrap_or(0) >> off;
        if off == 0 {
            lo
        } else {
            lo | self.words.get(wi + 1).copied().unwrap_or(0) << (WORD - off)
        }
    }

    /// ORs `src[src_start..src_start + count]` into `self[dst_start..dst_start + count]`.
    pub fn or_copy_range(&mut self, src: &Bits, src_start: usize, dst_start: usize, count: usize) {
        debug_assert!(src_start + count <= src.len);
        debug_assert!(dst_start + count <= self.len);
        let mut done = 0;
        while done < count {
            let dpos = dst_start + done;
            let off = dpos % WORD;
            let take = (WORD - off).min(count - done);
            let chunk = src.window(src_start + done) & low_mask(take);
            self.words[dpos / WORD] |= chunk << off;
            done += take;
        }
    }

    /// `self |= rotate(src, shift)`, where bit `i` of `src` lands at `(i + shift) % len`.
    pub fn or_rotated(&mut self, src: &Bits, shift: usize) {
        assert_eq!(self.len, src.len);
        let n = self.len;
        if n == 0 {
            return;
        }
        let shift = shift % n;
        self.or_copy_range(src, 0, shift, n - shift);
        if shift > 0 {
            self.or_copy_range(src, n - shift, 0, shift);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_is_trimmed() {
        let b = Bits::full(70);
        assert_eq!(b.count_ones(), 70);
        assert_eq!(b.iter_ones().last(), Some(69));
    }

    #[test]
    fn set_range_crosses_words() {
        let mut b = Bits::new(200);
        b.set_range(60, 130);
        assert_eq!(b.count_ones(), 70);
        assert!(!b.get(59) && b.get(60) && b.get(129) && !b.get(130));
    }

    proptest! {
        #[test]
        fn rotation_matches_naive(len in 1usize..300, ones in proptest::collection::vec(0usize..300, 0..40), shift in 0usize..600) {
            let mut src = Bits::new(len);
            for &o in &ones {
                src.set(o % len);
            }
            let mut fast = Bits::new(len);
            fast.or_rotated(&src, shift);
            let mut naive = Bits::new(len);
            for i in src.iter_ones() {
                naive.set((i + shift) % len);
            }
            prop_assert_eq!(fast, naive);
        }
    }
}
