use super::{EdgeIndexer, GraphSpec};
use crate::malliavin::Configuration;
use crate::{Error, Result};

/// A realisation of `G(n, p)`: edge `e_k` is kept iff `ω_k = +1`.
#[derive(Clone, Debug)]
pub struct ERSample {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: usize,
}

impl ERSample {
    pub fn from_configuration(indexer: &EdgeIndexer, omega: &Configuration) -> Result<Self> {
        if omega.len() != indexer.edges() {
            return Err(Error::Validation(format!(
                "configuration has {} bits, K_{} has {} edges",
                omega.len(),
                indexer.vertices(),
                indexer.edges()
            )));
        }
        let n = indexer.vertices();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        let mut edges = 0;
        for k in omega.iter_plus() {
            let (a, b) = indexer.pair(k);
            rows[a * words + b / 64] |= 1 << (b % 64);
            rows[b * words + a / 64] |= 1 << (a % 64);
            edges += 1;
        }
        Ok(Self {
            n,
            words,
            rows,
            edges,
        })
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.rows[a * self.words..(a + 1) * self.words]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.row(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|a| self.degree(a)).collect()
    }

    fn triangles(&self) -> u64 {
        let mut total = 0u64;
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.has_edge(a, b) {
                    continue;
                }
                // Common neighbours c > b.
                let (ra, rb) = (self.row(a), self.row(b));
                for w in b / 64..self.words {
                    let mut x = ra[w] & rb[w];
                    if w == b / 64 {
                        x &= if b % 64 == 63 { 0 } else { u64::MAX << (b % 64 + 1) };
                    }
                    total += x.count_ones() as u64;
                }
            }
        }
        total
    }
}

/// Number of copies of `pattern` in the sample.
pub fn subgraph_count(sample: &ERSample, pattern: &GraphSpec) -> u64 {
    if pattern.vertex_count() > sample.vertices() {
        return 0;
    }
    if pattern.vertex_count() == 2 {
        return sample.edge_count() as u64;
    }
    if pattern.vertex_count() == 3 && pattern.edge_count() == 3 {
        return sample.triangles();
    }
    count_injections(pattern, sample.vertices(), &[], &|a, b| sample.has_edge(a, b))
        / pattern.automorphism_count()
}

/// Number of `V_i`: vertices of degree `i`.
pub fn degree_count(sample: &ERSample, i: usize) -> u64 {
    (0..sample.vertices()).filter(|&a| sample.degree(a) == i).count() as u64
}

/// Injections `φ: V(Γ) → [n]` mapping every pattern edge onto a present edge,
/// with the pattern vertices in `fixed` pinned to the given targets.
pub(crate) fn count_injections(
    pattern: &GraphSpec,
    n: usize,
    fixed: &[(usize, usize)],
    adj: &dyn Fn(usize, usize) -> bool,
) -> u64 {
    let v = pattern.vertex_count();
    let mut order: Vec<usize> = fixed.iter().map(|f| f.0).collect();
    for u in pattern.search_order() {
        if !order.contains(&u) {
            order.push(u);
        }
    }
    let mut image = vec![usize::MAX; v];
    for &(u, x) in fixed {
        image[u] = x;
    }
    for (i, &(u, x)) in fixed.iter().enumerate() {
        for &(w, y) in &fixed[..i] {
            if x == y || (pattern.adjacent(u, w) && !adj(x, y)) {
                return 0;
            }
        }
    }
    extend(pattern, n, &order, fixed.len(), &mut image, adj)
}

fn extend(
    pattern: &GraphSpec,
    n: usize,
    order: &[usize],
    depth: usize,
    image: &mut [usize],
    adj: &dyn Fn(usize, usize) -> bool,
) -> u64 {
    if depth == order.len() {
        return 1;
    }
    let u = order[depth];
    let placed = &order[..depth];
    let anchor = placed.iter().copied().find(|&w| pattern.adjacent(u, w));
    let mut total = 0;
    for x in 0..n {
        if let Some(w) = anchor {
            if x == image[w] || !adj(image[w], x) {
                continue;
            }
        }
        if placed.iter().any(|&w| image[w] == x) {
            continue;
        }
        if placed
            .iter()
            .all(|&w| !pattern.adjacent(u, w) || adj(image[w], x))
        {
            image[u] = x;
            total += extend(pattern, n, order, depth + 1, image, adj);
        }
    }
    image[u] = usize::MAX;
    total
}

/// Copies of `pattern` that contain edge `k` and are otherwise present in
/// `ω`; this is `X_Γ(ω_+^k) − X_Γ(ω_−^k)`.
pub(crate) fn copies_through_edge(
    indexer: &EdgeIndexer,
    omega: &Configuration,
    pattern: &GraphSpec,
    k: usize,
) -> u64 {
    let n = indexer.vertices();
    let (a, b) = indexer.pair(k);
    if pattern.vertex_count() == 2 {
        return 1;
    }
    if pattern.vertex_count() == 3 && pattern.edge_count() == 3 {
        return (0..n)
            .filter(|&c| {
                c != a && c != b && omega.is_plus(indexer.index(a, c)) && omega.is_plus(indexer.index(b, c))
            })
            .count() as u64;
    }
    let adj = |x: usize, y: usize| -> bool {
        let idx = indexer.index(x, y);
        idx == k || omega.is_plus(idx)
    };
    // Each injection whose image contains e_k sends exactly one pattern edge
    // onto it, in one of two orientations.
    let mut total = 0;
    for &(u, w) in pattern.edges() {
        total += count_injections(pattern, n, &[(u, a), (w, b)], &adj);
        total += count_injections(pattern, n, &[(u, b), (w, a)], &adj);
    }
    total / pattern.automorphism_count()
}

/// Degree of vertex `a` ignoring edge `skip`, which must be incident to `a`.
pub(crate) fn degree_without(
    indexer: &EdgeIndexer,
    omega: &Configuration,
    a: usize,
    skip: usize,
) -> usize {
    let n = indexer.vertices();
    let start = indexer.row_start(a);
    let mut d = omega.count_plus_range(start, start + (n - a - 1));
    for c in 0..a {
        d += omega.is_plus(indexer.index(c, a)) as usize;
    }
    d - omega.is_plus(skip) as usize
}
