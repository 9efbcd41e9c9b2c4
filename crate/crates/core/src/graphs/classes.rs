use std::collections::BTreeMap;

use super::EdgeIndexer;
use crate::bounds::{SingleClass, SymmetryClassSpec, TripleClass};
use crate::util::binomial_u64;
use crate::Result;

/// Orbit key of an ordered edge triple under vertex relabeling: the
/// lexicographically smallest first-appearance relabeling over all edge
/// orientations.
fn canonical(edges: [(usize, usize); 3]) -> [u8; 6] {
    let mut best = [u8::MAX; 6];
    for flips in 0..8u8 {
        let mut seq = [0usize; 6];
        for (e, &(a, b)) in edges.iter().enumerate() {
            let (x, y) = if flips >> e & 1 == 1 { (b, a) } else { (a, b) };
            seq[2 * e] = x;
            seq[2 * e + 1] = y;
        }
        let mut label = [u8::MAX; 6];
        let mut next = 0u8;
        let mut key = [0u8; 6];
        for (slot, &v) in seq.iter().enumerate() {
            if label[v] == u8::MAX {
                label[v] = next;
                next += 1;
            }
            key[slot] = label[v];
        }
        best = best.min(key);
    }
    best
}

/// Representative edge triple, its vertex count and its orbit size.
type Orbit = ([(usize, usize); 3], usize, u64);

/// Symmetry classes for functionals of `G(n, p)` that are invariant under
/// vertex relabeling.
///
/// All edges form one single class. Triples `(m, k, ℓ)` with `k, ℓ ≠ m` are
/// kept when `admits(|e_m ∩ e_k|)` and `admits(|e_m ∩ e_ℓ|)`, and grouped
/// into orbits; each orbit on `v` vertices has `C(n, v)` times as many
/// members as it has on a fixed `v`-set.
pub fn edge_triple_classes(indexer: &EdgeIndexer, admits: impl Fn(usize) -> bool) -> Result<SymmetryClassSpec> {
    let n = indexer.vertices();
    let singles = vec![SingleClass {
        rep: 0,
        multiplicity: indexer.edges() as u64,
    }];
    let small = EdgeIndexer::new(6)?;
    let shared = |x: (usize, usize), y: (usize, usize)| {
        usize::from(x.0 == y.0 || x.0 == y.1) + usize::from(x.1 == y.0 || x.1 == y.1)
    };
    let mut orbits: BTreeMap<[u8; 6], Orbit> = BTreeMap::new();
    for m in 0..small.edges() {
        let em = small.pair(m);
        for k in (0..small.edges()).filter(|&k| k != m) {
            let ek = small.pair(k);
            if !admits(shared(em, ek)) {
                continue;
            }
            for l in (0..small.edges()).filter(|&l| l != m) {
                let el = small.pair(l);
                if !admits(shared(em, el)) {
                    continue;
                }
                let mut vs = [em.0, em.1, ek.0, ek.1, el.0, el.1];
                vs.sort_unstable();
                let mut v = 1;
                for w in 1..6 {
                    if vs[w] != vs[w - 1] {
                        v += 1;
                    }
                }
                // Count on the fixed vertex set {0, …, v−1}.
                if vs[5] != v - 1 {
                    continue;
                }
                let entry = orbits
                    .entry(canonical([em, ek, el]))
                    .or_insert(([em, ek, el], v, 0));
                entry.2 += 1;
            }
        }
    }
    let triples = orbits
        .into_values()
        .filter(|&(_, v, _)| v <= n)
        .map(|(rep, v, count)| TripleClass {
            m: indexer.index(rep[0].0, rep[0].1),
            k: indexer.index(rep[1].0, rep[1].1),
            l: indexer.index(rep[2].0, rep[2].1),
            multiplicity: count * binomial_u64(n as u64, v as u64),
        })
        .collect();
    Ok(SymmetryClassSpec { singles, triples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_total(ix: &EdgeIndexer, admits: impl Fn(usize) -> bool) -> u64 {
        let mut total = 0;
        for m in 0..ix.edges() {
            let adm = (0..ix.edges())
                .filter(|&k| k != m && admits(ix.shared_vertices(m, k)))
                .count() as u64;
            total += adm * adm;
        }
        total
    }

    #[test]
    fn multiplicities_cover_all_triples() {
        for n in [3, 4, 5, 7, 9] {
            let ix = EdgeIndexer::new(n).unwrap();
            for admits in [|s: usize| s == 1, |s: usize| s >= 1, |_: usize| true] {
                let spec = edge_triple_classes(&ix, admits).unwrap();
                spec.validate(ix.edges()).unwrap();
                assert_eq!(spec.total_triples(), brute_total(&ix, admits), "n={n}");
            }
        }
    }

    #[test]
    fn orbit_counts() {
        // k = ℓ; k, ℓ at the same end of m; at opposite ends closing a
        // triangle; at opposite ends forming a path.
        let ix = EdgeIndexer::new(8).unwrap();
        let spec = edge_triple_classes(&ix, |s| s == 1).unwrap();
        assert_eq!(spec.triples.len(), 4);
        assert!(edge_triple_classes(&ix, |_| false).unwrap().triples.is_empty());
    }
}
