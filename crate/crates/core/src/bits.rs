//! Word-slice bitset helpers shared by the DAG bitmap, level sets and matrices.

pub const WORD: usize = 64;

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
pub fn test(words: &[u64], i: usize) -> bool {
    words[i / WORD] >> (i % WORD) & 1 == 1
}

#[inline]
pub fn set(words: &mut [u64], i: usize) {
    words[i / WORD] |= 1 << (i % WORD);
}

#[inline]
pub fn clear(words: &mut [u64], i: usize) {
    words[i / WORD] &= !(1 << (i % WORD));
}

#[inline]
pub fn count(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn is_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

/// Number of set bits strictly below `i`.
#[inline]
pub fn rank(words: &[u64], i: usize) -> usize {
    let full = i / WORD;
    let mut r: usize = words[..full].iter().map(|w| w.count_ones() as usize).sum();
    let rem = i % WORD;
    if rem != 0 {
        r += (words[full] & ((1u64 << rem) - 1)).count_ones() as usize;
    }
    r
}

#[inline]
pub fn or_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= *s;
    }
}

#[inline]
pub fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Ascending indices of set bits.
pub fn iter_ones(words: &[u64]) -> Ones<'_> {
    Ones { words, idx: 0, cur: words.first().copied().unwrap_or(0) }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// Descending indices of set bits.
pub fn iter_ones_rev(words: &[u64]) -> OnesRev<'_> {
    OnesRev { words, idx: words.len(), cur: 0 }
}

pub struct OnesRev<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for OnesRev<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = 63 - self.cur.leading_zeros() as usize;
                self.cur &= !(1u64 << t);
                return Some(self.idx * WORD + t);
            }
            if self.idx == 0 {
                return None;
            }
            self.idx -= 1;
            self.cur = self.words[self.idx];
        }
    }
}

/// Owned fixed-capacity bitset over state ids.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct StateSet {
    words: Vec<u64>,
}

impl StateSet {
    pub fn new(capacity: usize) -> Self {
        StateSet { words: vec![0; words_for(capacity)] }
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        StateSet { words }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn contains(&self, i: usize) -> bool {
        i / WORD < self.words.len() && test(&self.words, i)
    }

    pub fn insert(&mut self, i: usize) {
        set(&mut self.words, i)
    }

    pub fn remove(&mut self, i: usize) {
        clear(&mut self.words, i)
    }

    pub fn len(&self) -> usize {
        count(&self.words)
    }

    pub fn is_empty(&self) -> bool {
        is_zero(&self.words)
    }

    pub fn clear_all(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, other: &StateSet) {
        or_into(&mut self.words, &other.words)
    }

    pub fn iter(&self) -> Ones<'_> {
        iter_ones(&self.words)
    }
}

impl std::fmt::Debug for StateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Hints that the cache line holding `x` is read soon.
#[inline(always)]
pub fn prefetch<T>(x: &T) {
    #[cfg(target_arch = "x86_64")]
    unsafe {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        _mm_prefetch::<_MM_HINT_T0>(x as *const T as *const i8);
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = x;
}

/// A zeroed vector whose pages the kernel is asked to back with huge pages
/// when it is large enough to benefit.
pub fn zeroed_large<T: Copy + Default>(len: usize) -> Vec<T> {
    let v = vec![T::default(); len];
    #[cfg(target_os = "linux")]
    advise_huge(v.as_ptr() as usize, len * std::mem::size_of::<T>());
    v
}

#[cfg(target_os = "linux")]
fn advise_huge(addr: usize, bytes: usize) {
    const HUGE: usize = 2 << 20;
    if bytes < 4 * HUGE {
        return;
    }
    let start = addr.next_multiple_of(HUGE);
    let end = (addr + bytes) / HUGE * HUGE;
    if end > start {
        // Advisory only; failure leaves normal pages.
        unsafe {
            libc::madvise(start as *mut libc::c_void, end - start, libc::MADV_HUGEPAGE);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_both_directions() {
        let mut w = vec![0u64; 3];
        for i in [0, 5, 63, 64, 130] {
            set(&mut w, i);
        }
        assert_eq!(iter_ones(&w).collect::<Vec<_>>(), vec![0, 5, 63, 64, 130]);
        assert_eq!(iter_ones_rev(&w).collect::<Vec<_>>(), vec![130, 64, 63, 5, 0]);
        assert_eq!(rank(&w, 64), 3);
        assert_eq!(rank(&w, 131), 5);
        assert_eq!(count(&w), 5);
    }

    #[test]
    fn empty_slices() {
        assert_eq!(iter_ones(&[]).count(), 0);
        assert_eq!(iter_ones_rev(&[]).count(), 0);
    }
}
