use crate::{Error, Result};

/// Largest pattern handled by brute-force automorphism counting.
pub const MAX_PATTERN_VERTICES: usize = 8;

/// A small simple pattern graph with its automorphism count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpec {
    name: String,
    v: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<u16>,
    aut: u64,
}

impl GraphSpec {
    pub fn new(name: impl Into<String>, v: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if v > MAX_PATTERN_VERTICES {
            return Err(Error::Capacity(format!(
                "pattern has {v} vertices; automorphisms are brute-forced up to {MAX_PATTERN_VERTICES}"
            )));
        }
        if edges.is_empty() {
            return Err(Error::Validation("a pattern needs at least one edge".into()));
        }
        let mut adjacency = vec![0u16; v];
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a >= v || b >= v {
                return Err(Error::Validation(format!("edge ({a}, {b}) outside {v} vertices")));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at {a}")));
            }
            if adjacency[a] & (1 << b) != 0 {
                return Err(Error::Validation(format!("duplicate edge ({a}, {b})")));
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
            norm.push((a.min(b), a.max(b)));
        }
        let mut spec = Self {
            name: name.into(),
            v,
            edges: norm,
            adjacency,
            aut: 0,
        };
        spec.aut = spec.count_automorphisms();
        Ok(spec)
    }

    pub fn edge() -> Self {
        Self::new("edge", 2, vec![(0, 1)]).expect("valid pattern")
    }

    pub fn triangle() -> Self {
        Self::new("triangle", 3, vec![(0, 1), (1, 2), (0, 2)]).expect("valid pattern")
    }

    /// Path with `v` vertices.
    pub fn path(v: usize) -> Result<Self> {
        Self::new(format!("path{v}"), v, (1..v).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(v: usize) -> Result<Self> {
        if v < 3 {
            return Err(Error::Validation("a cycle needs at least 3 vertices".into()));
        }
        Self::new(format!("cycle{v}"), v, (0..v).map(|i| (i, (i + 1) % v)).collect())
    }

    /// Star with `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::new(format!("star{leaves}"), leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
    }

    pub fn complete(v: usize) -> Result<Self> {
        let mut e = Vec::new();
        for a in 0..v {
            for b in a + 1..v {
                e.push((a, b));
            }
        }
        Self::new(format!("k{v}"), v, e)
    }

    /// `edge`, `triangle`, `pathN`, `cycleN`, `starN`, `kN`.
    pub fn named(name: &str) -> Result<Self> {
        let num = |prefix: &str| -> Option<usize> { name.strip_prefix(prefix)?.parse().ok() };
        match name {
            "edge" => Ok(Self::edge()),
            "triangle" => Ok(Self::triangle()),
            _ => {
                if let Some(v) = num("path") {
                    Self::path(v)
                } else if let Some(v) = num("cycle") {
                    Self::cycle(v)
                } else if let Some(v) = num("star") {
                    Self::star(v)
                } else if let Some(v) = num("k") {
                    Self::complete(v)
                } else {
                    Err(Error::Validation(format!("unknown pattern name '{name}'")))
                }
            }
        }
    }

    /// Parses `v e` followed by `e` lines `u w` (0-based vertices).
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse_edge_list(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let pair = |(line, l): (usize, &str)| -> Result<(usize, usize)> {
            let mut it = l.split_whitespace().map(|t| t.parse::<usize>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Error::Parse {
                    line,
                    message: format!("expected two non-negative integers, got '{l}'"),
                }),
            }
        };
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty edge list".into(),
        })?;
        let header_line = header.0;
        let (v, e) = pair(header)?;
        let edges = lines.map(pair).collect::<Result<Vec<_>>>()?;
        if edges.len() != e {
            return Err(Error::Parse {
                line: header_line,
                message: format!("header announces {e} edges, found {}", edges.len()),
            });
        }
        Self::new(name, v, edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a] & (1 << b) != 0
    }

    pub fn automorphism_count(&self) -> u64 {
        self.aut
    }

    /// Vertex order in which every vertex after the first of its component
    /// has an earlier neighbour, which keeps injection search pruned.
    pub(crate) fn search_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.v);
        let mut seen = 0u16;
        while order.len() < self.v {
            let start = (0..self.v).find(|&u| seen & (1 << u) == 0).expect("unvisited vertex");
            seen |= 1 << start;
            order.push(start);
            let mut i = order.len() - 1;
            while i < order.len() {
                let u = order[i];
                for w in 0..self.v {
                    if self.adjacent(u, w) && seen & (1 << w) == 0 {
                        seen |= 1 << w;
                        order.push(w);
                    }
                }
                i += 1;
            }
        }
        order
    }

    fn count_automorphisms(&self) -> u64 {
        let order = self.search_order();
        let mut image = vec![usize::MAX; self.v];
        let mut used = 0u16;
        self.extend_automorphism(&order, 0, &mut image, &mut used)
    }

    fn extend_automorphism(
        &self,
        order: &[usize],
        depth: usize,
        image: &mut [usize],
        used: &mut u16,
    ) -> u64 {
        if depth == order.len() {
            return 1;
        }
        let u = order[depth];
        let mut total = 0;
        for x in 0..self.v {
            if *used & (1 << x) != 0 {
                continue;
            }
            // Preserve adjacency and non-adjacency with mapped vertices.
            let ok = order[..depth]
                .iter()
                .all(|&w| self.adjacent(u, w) == self.adjacent(x, image[w]));
            if ok {
                image[u] = x;
                *used |= 1 << x;
                total += self.extend_automorphism(order, depth + 1, image, used);
                *used &= !(1 << x);
            }
        }
        image[u] = usize::MAX;
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::factorial;

    #[test]
    fn automorphism_counts() {
        assert_eq!(GraphSpec::triangle().automorphism_count(), 6);
        assert_eq!(GraphSpec::edge().automorphism_count(), 2);
        assert_eq!(GraphSpec::path(3).unwrap().automorphism_count(), 2);
        assert_eq!(GraphSpec::cycle(4).unwrap().automorphism_count(), 8);
        assert_eq!(GraphSpec::star(3).unwrap().automorphism_count(), 6);
        assert_eq!(GraphSpec::complete(5).unwrap().automorphism_count(), 120);
        let two_edges = GraphSpec::new("m2", 4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(two_edges.automorphism_count(), 8);
        for g in [GraphSpec::path(5).unwrap(), GraphSpec::cycle(6).unwrap()] {
            assert_eq!(factorial(g.vertex_count() as u64) as u64 % g.automorphism_count(), 0);
        }
        assert!(GraphSpec::complete(9).unwrap_err().is_capacity());
    }

    #[test]
    fn parsing() {
        let g = GraphSpec::parse_edge_list("tri", "3 3\n0 1\n1 2\n# comment\n0 2\n").unwrap();
        assert_eq!(g.automorphism_count(), 6);
        assert!(matches!(
            GraphSpec::parse_edge_list("x", "3 2\n0 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            GraphSpec::parse_edge_list("x", "3 1\n0 a\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(GraphSpec::parse_edge_list("x", "2 1\n0 0\n").is_err());
        assert!(GraphSpec::parse_edge_list("x", "2 0\n").is_err());
        assert_eq!(GraphSpec::named("k4").unwrap().edge_count(), 6);
        assert!(GraphSpec::named("blob").is_err());
    }
}
