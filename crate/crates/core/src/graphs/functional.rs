use std::sync::Arc;

use super::formulas::{degree_probability, expected_degree_count, expected_subgraph_count};
use super::sample::{copies_through_edge, degree_without};
use super::{subgraph_count, ERSample, EdgeIndexer, GraphSpec};
use crate::malliavin::{Configuration, Functional, RademacherSpace};
use crate::Result;

/// `n^{1−v_Γ}(X_Γ − E[X_Γ])` on the `C(n, 2)` edge coordinates.
#[derive(Clone, Debug)]
pub struct SubgraphFunctional {
    indexer: Arc<EdgeIndexer>,
    pattern: GraphSpec,
    p: f64,
    mean: f64,
    scale: f64,
}

pub fn normalized_subgraph_functional(
    pattern: &GraphSpec,
    indexer: &Arc<EdgeIndexer>,
    p: f64,
) -> Result<SubgraphFunctional> {
    let n = indexer.vertices();
    Ok(SubgraphFunctional {
        indexer: Arc::clone(indexer),
        pattern: pattern.clone(),
        p,
        mean: expected_subgraph_count(n, p, pattern)?,
        scale: (n as f64).powi(1 - pattern.vertex_count() as i32),
    })
}

impl SubgraphFunctional {
    pub fn pattern(&self) -> &GraphSpec {
        &self.pattern
    }

    pub fn space(&self) -> Result<RademacherSpace> {
        RademacherSpace::homogeneous(self.indexer.edges(), self.p)
    }

    /// Whether `D_kD_ℓ` may be nonzero for edges sharing `shared` vertices.
    pub fn admits(&self, shared: usize) -> bool {
        subgraph_admits(&self.pattern, shared)
    }
}

pub(crate) fn subgraph_admits(pattern: &GraphSpec, shared: usize) -> bool {
    if pattern.edge_count() < 2 {
        return false;
    }
    // Disjoint edges can share a copy once Γ has four vertices.
    shared >= 1 || pattern.vertex_count() >= 4
}

impl Functional for SubgraphFunctional {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        let sample = ERSample::from_configuration(&self.indexer, omega)
            .expect("configuration length matches the edge count");
        (subgraph_count(&sample, &self.pattern) as f64 - self.mean) * self.scale
    }

    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        copies_through_edge(&self.indexer, omega, &self.pattern, k) as f64 * self.scale
    }

    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        if self.pattern.edge_count() < 2 {
            Some(Vec::new())
        } else if self.pattern.vertex_count() >= 4 {
            Some((0..self.indexer.edges()).filter(|&l| l != k).collect())
        } else {
            Some(self.indexer.adjacent_edges(k))
        }
    }
}

/// `(V_i − E[V_i])/sqrt(n)` with `p = θ/(n−1)`.
#[derive(Clone, Debug)]
pub struct DegreeFunctional {
    indexer: Arc<EdgeIndexer>,
    degree: usize,
    p: f64,
    mean: f64,
    scale: f64,
}

pub fn normalized_degree_functional(
    indexer: &Arc<EdgeIndexer>,
    theta: f64,
    degree: usize,
) -> Result<DegreeFunctional> {
    let n = indexer.vertices();
    let p = degree_probability(n, theta)?;
    Ok(DegreeFunctional {
        indexer: Arc::clone(indexer),
        degree,
        p,
        mean: expected_degree_count(n, p, degree)?,
        scale: 1.0 / (n as f64).sqrt(),
    })
}

impl DegreeFunctional {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn space(&self) -> Result<RademacherSpace> {
        RademacherSpace::homogeneous(self.indexer.edges(), self.p)
    }

    /// `|D_kF| ≤ 2 sqrt(pq)/sqrt(n)`.
    pub fn first_derivative_bound(&self) -> f64 {
        2.0 * (self.p * (1.0 - self.p)).sqrt() * self.scale
    }

    /// `|D_kD_ℓF| ≤ 2pq/sqrt(n)`.
    pub fn second_derivative_bound(&self) -> f64 {
        2.0 * self.p * (1.0 - self.p) * self.scale
    }
}

impl Functional for DegreeFunctional {
    fn evaluate(&self, omega: &Configuration) -> f64 {
        let n = self.indexer.vertices();
        let mut deg = vec![0usize; n];
        for k in omega.iter_plus() {
            let (a, b) = self.indexer.pair(k);
            deg[a] += 1;
            deg[b] += 1;
        }
        let count = deg.iter().filter(|&&x| x == self.degree).count();
        (count as f64 - self.mean) * self.scale
    }

    fn flip_difference(&self, omega: &Configuration, k: usize) -> f64 {
        let (a, b) = self.indexer.pair(k);
        let i = self.degree;
        let change = |d: usize| f64::from(u8::from(d + 1 == i)) - f64::from(u8::from(d == i));
        let da = degree_without(&self.indexer, omega, a, k);
        let db = degree_without(&self.indexer, omega, b, k);
        (change(da) + change(db)) * self.scale
    }

    fn second_derivative_support(&self, k: usize) -> Option<Vec<usize>> {
        Some(self.indexer.adjacent_edges(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malliavin::{first_derivative, second_derivative, all_configurations};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_flip<F: Functional>(f: &F, w: &Configuration, k: usize) -> f64 {
        f.evaluate(&w.with(k, true)) - f.evaluate(&w.with(k, false))
    }

    #[test]
    fn subgraph_functional_is_centered_and_local() {
        let ix = Arc::new(EdgeIndexer::new(5).unwrap());
        for g in [GraphSpec::edge(), GraphSpec::triangle(), GraphSpec::path(4).unwrap()] {
            let f = normalized_subgraph_functional(&g, &ix, 0.4).unwrap();
            let s = f.space().unwrap();
            let mut mean = 0.0;
            for w in all_configurations(10) {
                mean += s.weight(&w) * f.evaluate(&w);
                for k in 0..10 {
                    assert!((f.flip_difference(&w, k) - brute_flip(&f, &w, k)).abs() < 1e-12);
                }
            }
            assert!(mean.abs() < 1e-12);
        }
    }

    #[test]
    fn edge_functional_derivatives() {
        let ix = Arc::new(EdgeIndexer::new(6).unwrap());
        let f = normalized_subgraph_functional(&GraphSpec::edge(), &ix, 0.3).unwrap();
        let s = f.space().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let w = s.sample(&mut rng);
            let d = first_derivative(&f, &s, &w, 4).unwrap();
            assert!((d - (0.3f64 * 0.7).sqrt() / 6.0).abs() < 1e-15);
            assert_eq!(second_derivative(&f, &s, &w, 4, 7).unwrap(), 0.0);
        }
    }

    #[test]
    fn sparsity_oracles_are_sound() {
        let ix = Arc::new(EdgeIndexer::new(5).unwrap());
        let tri = normalized_subgraph_functional(&GraphSpec::triangle(), &ix, 0.5).unwrap();
        let deg = normalized_degree_functional(&ix, 0.5, 1).unwrap();
        let fs: Vec<Box<dyn Functional>> = vec![Box::new(tri), Box::new(deg)];
        for f in &fs {
            let s = RademacherSpace::homogeneous(10, 0.3).unwrap();
            for w in all_configurations(10).step_by(17) {
                for k in 0..10 {
                    let allowed = f.second_derivative_support(k).unwrap();
                    for l in 0..10 {
                        if l != k && !allowed.contains(&l) {
                            assert_eq!(second_derivative(f, &s, &w, k, l).unwrap(), 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degree_functional() {
        let ix = Arc::new(EdgeIndexer::new(5).unwrap());
        for i in 0..4 {
            let f = normalized_degree_functional(&ix, 0.5, i).unwrap();
            let s = f.space().unwrap();
            let mut mean = 0.0;
            for w in all_configurations(10) {
                mean += s.weight(&w) * f.evaluate(&w);
                for k in 0..10 {
                    assert!((f.flip_difference(&w, k) - brute_flip(&f, &w, k)).abs() < 1e-12);
                }
            }
            assert!(mean.abs() < 1e-12);
        }
    }

    #[test]
    fn degree_derivative_bounds() {
        let ix = Arc::new(EdgeIndexer::new(30).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..3 {
            let f = normalized_degree_functional(&ix, 0.5, i).unwrap();
            let s = f.space().unwrap();
            for _ in 0..1000 {
                let w = s.sample(&mut rng);
                let k = rand::Rng::random_range(&mut rng, 0..ix.edges());
                let l = ix.adjacent_edges(k)[rand::Rng::random_range(&mut rng, 0..56)];
                assert!(first_derivative(&f, &s, &w, k).unwrap().abs() <= f.first_derivative_bound() + 1e-15);
                assert!(second_derivative(&f, &s, &w, k, l).unwrap().abs() <= f.second_derivative_bound() + 1e-15);
            }
        }
    }
}
