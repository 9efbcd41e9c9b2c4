use crate::{Error, Result};

/// A point `ω ∈ {−1,+1}^n`, bit-packed with bit `k` set iff `ω_k = +1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    /// All coordinates equal to −1.
    pub fn all_minus(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn all_plus(len: usize) -> Self {
        let mut c = Self::all_minus(len);
        for w in c.words.iter_mut() {
            *w = u64::MAX;
        }
        c.mask_tail();
        c
    }

    /// Configuration whose `+1` coordinates are the set bits of `mask`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        debug_assert!(len <= 64);
        let mut c = Self::all_minus(len);
        if len > 0 {
            c.words[0] = mask;
            c.mask_tail();
        }
        c
    }

    /// Builds a configuration from explicit signs.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut c = Self::all_minus(signs.len());
        for (k, &s) in signs.iter().enumerate() {
            match s {
                1 => c.set(k, true),
                -1 => {}
                other => {
                    return Err(Error::Validation(format!(
                        "configuration entries must be ±1, got {other} at {k}"
                    )))
                }
            }
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_plus(&self, k: usize) -> bool {
        debug_assert!(k < self.len);
        (self.words[k >> 6] >> (k & 63)) & 1 == 1
    }

    /// `X_k(ω)` as ±1.0.
    #[inline]
    pub fn sign(&self, k: usize) -> f64 {
        if self.is_plus(k) {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    pub fn set(&mut self, k: usize, plus: bool) {
        debug_assert!(k < self.len);
        let bit = 1u64 << (k & 63);
        if plus {
            self.words[k >> 6] |= bit;
        } else {
            self.words[k >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, k: usize) {
        debug_assert!(k < self.len);
        self.words[k >> 6] ^= 1u64 << (k & 63);
    }

    /// Copy with coordinate `k` forced to the given value (`ω_±^k`).
    pub fn with(&self, k: usize, plus: bool) -> Self {
        let mut c = self.clone();
        c.set(k, plus);
        c
    }

    pub fn count_plus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of `+1` coordinates in `start..end`.
    pub fn count_plus_range(&self, start: usize, end: usize) -> usize {
        debug_assert!(start <= end && end <= self.len);
        if start >= end {
            return 0;
        }
        let (sw, sb) = (start >> 6, start & 63);
        let (ew, eb) = (end >> 6, end & 63);
        if sw == ew {
            let mask = (u64::MAX << sb) & ((1u64 << eb) - 1);
            return (self.words[sw] & mask).count_ones() as usize;
        }
        let mut total = (self.words[sw] & (u64::MAX << sb)).count_ones() as usize;
        for w in &self.words[sw + 1..ew] {
            total += w.count_ones() as usize;
        }
        if eb > 0 {
            total += (self.words[ew] & ((1u64 << eb) - 1)).count_ones() as usize;
        }
        total
    }

    /// Low 64 coordinates as a mask.
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Indices of the `+1` coordinates in increasing order.
    pub fn iter_plus(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len)
            .map(|k| if self.is_plus(k) { 1 } else { -1 })
            .collect()
    }

    pub(crate) fn mask_tail(&mut self) {
        let r = self.len & 63;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

/// Iterates over all `2^n` configurations in mask order.
pub fn all_configurations(n: usize) -> impl Iterator<Item = Configuration> {
    assert!(n < 64);
    (0..1u64 << n).map(move |m| Configuration::from_mask(n, m))
}
