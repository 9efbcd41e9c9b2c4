use crate::malliavin::Functional;
use crate::{Error, Result};

/// Default cap on the number of enumerated `(m, k, ℓ)` tuples.
pub const DEFAULT_TUPLE_BUDGET: u64 = 5_000_000;

/// A coordinate standing for `multiplicity` coordinates with identical
/// single-coordinate moments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SingleClass {
    pub rep: usize,
    pub multiplicity: u64,
}

/// A tuple `(m, k, ℓ)` standing for `multiplicity` tuples with identical
/// moments `E[(D_kF)²(D_ℓF)²]` and `E[(D_mD_kF)²(D_mD_ℓF)²]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TripleClass {
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub multiplicity: u64,
}

/// Orbit representatives for the sums in the second-order bound.
///
/// Triples only need to cover tuples where both `D_mD_k` and `D_mD_ℓ` can be
/// nonzero; all others contribute zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymmetryClassSpec {
    pub singles: Vec<SingleClass>,
    pub triples: Vec<TripleClass>,
}

impl SymmetryClassSpec {
    /// One class per coordinate and per admissible tuple, from the union of
    /// the functionals' sparsity oracles.
    pub fn full<F: Functional>(fs: &[F], n: usize, budget: u64) -> Result<Self> {
        let oracle_missing = (0..n).any(|m| fs.iter().any(|f| f.second_derivative_support(m).is_none()));
        if oracle_missing && (n as u64).saturating_pow(3) > budget {
            return Err(Error::Capacity(format!(
                "no sparsity oracle and n³ = {} tuples exceed the budget of {budget}",
                (n as u64).saturating_pow(3)
            )));
        }
        let singles = (0..n)
            .map(|rep| SingleClass {
                rep,
                multiplicity: 1,
            })
            .collect();
        let mut triples = Vec::new();
        for m in 0..n {
            let mut partners: Vec<usize> = Vec::new();
            for f in fs {
                match f.second_derivative_support(m) {
                    Some(s) => partners.extend(s),
                    None => partners.extend(0..n),
                }
            }
            partners.retain(|&k| k != m && k < n);
            partners.sort_unstable();
            partners.dedup();
            if (triples.len() + partners.len() * partners.len()) as u64 > budget {
                return Err(Error::Capacity(format!(
                    "more than {budget} (m, k, ℓ) tuples; supply symmetry classes"
                )));
            }
            for &k in &partners {
                for &l in &partners {
                    triples.push(TripleClass {
                        m,
                        k,
                        l,
                        multiplicity: 1,
                    });
                }
            }
        }
        Ok(Self { singles, triples })
    }

    pub fn total_singles(&self) -> u64 {
        self.singles.iter().map(|c| c.multiplicity).sum()
    }

    pub fn total_triples(&self) -> u64 {
        self.triples.iter().map(|c| c.multiplicity).sum()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |i: usize| i >= n;
        if self.singles.iter().any(|c| bad(c.rep)) {
            return Err(Error::Validation("single class outside the space".into()));
        }
        for t in &self.triples {
            if bad(t.m) || bad(t.k) || bad(t.l) {
                return Err(Error::Validation("triple class outside the space".into()));
            }
            if t.k == t.m || t.l == t.m {
                return Err(Error::Validation(format!(
                    "triple ({}, {}, {}) repeats m; D_mD_m vanishes",
                    t.m, t.k, t.l
                )));
            }
        }
        if self.total_singles() != n as u64 {
            return Err(Error::Validation(format!(
                "single-class multiplicities sum to {}, expected {n}",
                self.total_singles()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::malliavin::{Polynomial, RademacherSpace, TableFunctional};
    use rand::SeedableRng;

    #[test]
    fn full_spec_follows_oracle() {
        let s = RademacherSpace::homogeneous(4, 0.5).unwrap();
        let f = Polynomial::new(&s, vec![(1.0, vec![0, 1]), (1.0, vec![1, 2])]).unwrap();
        let spec = SymmetryClassSpec::full(&[f], 4, 1000).unwrap();
        spec.validate(4).unwrap();
        assert_eq!(spec.total_singles(), 4);
        // N(0) = {1}, N(1) = {0, 2}, N(2) = {1}, N(3) = {}.
        assert_eq!(spec.total_triples(), 1 + 4 + 1);
    }

    #[test]
    fn budget_without_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let f = TableFunctional::random(6, &mut rng);
        assert!(SymmetryClassSpec::full(&[&f], 6, 100).unwrap_err().is_capacity());
        let spec = SymmetryClassSpec::full(&[&f], 6, 1000).unwrap();
        assert_eq!(spec.total_triples(), 6 * 25);
    }
}
