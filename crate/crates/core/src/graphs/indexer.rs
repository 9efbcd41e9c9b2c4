use crate::{Error, Result};

/// Lexicographic numbering of the edges of `K_n`:
/// `(a, b)` with `a < b` has index `a(2n − a − 1)/2 + (b − a − 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeIndexer {
    n: usize,
    pairs: Vec<(u32, u32)>,
}

impl EdgeIndexer {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("need at least 2 vertices, got {n}")));
        }
        if n > 1 << 16 {
            return Err(Error::Capacity(format!("{n} vertices is too many")));
        }
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a as u32, b as u32));
            }
        }
        Ok(Self { n, pairs })
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> usize {
        self.pairs.len()
    }

    /// Index of the unordered pair `{a, b}`, `a ≠ b`.
    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a != b && a < self.n && b < self.n);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// First index of the edges `(a, b)` with `b > a`; they are contiguous.
    #[inline]
    pub fn row_start(&self, a: usize) -> usize {
        a * (2 * self.n - a - 1) / 2
    }

    #[inline]
    pub fn pair(&self, k: usize) -> (usize, usize) {
        let (a, b) = self.pairs[k];
        (a as usize, b as usize)
    }

    /// `|e_k ∩ e_ℓ|`.
    pub fn shared_vertices(&self, k: usize, l: usize) -> usize {
        let (a, b) = self.pair(k);
        let (c, d) = self.pair(l);
        [a == c, a == d, b == c, b == d].iter().filter(|x| **x).count()
    }

    /// Edges other than `k` sharing exactly one vertex with it.
    pub fn adjacent_edges(&self, k: usize) -> Vec<usize> {
        let (a, b) = self.pair(k);
        let mut out = Vec::with_capacity(2 * (self.n - 2));
        for c in 0..self.n {
            if c != a && c != b {
                out.push(self.index(a, c));
                out.push(self.index(b, c));
            }
        }
        out.sort_unstable();
        out
    }
}
