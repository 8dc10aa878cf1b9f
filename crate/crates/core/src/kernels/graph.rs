use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    // sorted, each pair stored as (min, max)
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("loop at vertex {u}")));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        let before = out.len();
        out.dedup();
        if out.len() != before {
            return Err(Error::InvalidInput("duplicate edge in simple graph".into()));
        }
        Ok(Self { n, edges: out })
    }

    /// Build from an upper-triangular bit code: bit `k` is the `k`-th pair
    /// `(i, j)`, `i < j`, in row-major order.
    pub fn from_code(n: usize, code: u64) -> Self {
        let edges = pairs(n)
            .enumerate()
            .filter(|(k, _)| code >> k & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        Self { n, edges }
    }

    /// Inverse of [`SimpleGraph::from_code`].
    pub fn code(&self) -> u64 {
        pairs(self.n)
            .enumerate()
            .filter(|(_, e)| self.has_edge(e.0, e.1))
            .fold(0u64, |acc, (k, _)| acc | 1 << k)
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        Self { n, edges: pairs(n).collect() }
    }

    pub fn path(n: usize) -> Self {
        Self {
            n,
            edges: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three vertices");
        let mut g = Self::path(n);
        g.edges.push((0, n - 1));
        g.edges.sort_unstable();
        g
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.edges {
                let w = if a == u { b } else if b == u { a } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_multigraph(&self) -> MultiGraph {
        MultiGraph {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| (u, v, 1)).collect(),
        }
    }
}

/// Unordered pairs `(i, j)`, `i < j`, in row-major order.
pub(crate) fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Loopless multigraph; used as a homomorphism-density probe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    n: usize,
    // sorted by pair, multiplicity >= 1
    edges: Vec<(usize, usize, u32)>,
}

impl MultiGraph {
    /// Repeated pairs are merged by adding their multiplicities.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, u32)>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (u, v, k) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("loop at vertex {u}")));
            }
            if k == 0 {
                return Err(Error::InvalidInput("edge multiplicity must be at least 1".into()));
            }
            *acc.entry((u.min(v), u.max(v))).or_default() += k;
        }
        Ok(Self {
            n,
            edges: acc.into_iter().map(|((u, v), k)| (u, v, k)).collect(),
        })
    }

    /// `M_k`: two vertices joined by `k` parallel edges.
    pub fn parallel(k: u32) -> Self {
        assert!(k >= 1);
        Self { n: 2, edges: vec![(0, 1, k)] }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.2 as usize).sum()
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| e.2 == 1)
    }

    pub fn to_simple(&self) -> Option<SimpleGraph> {
        self.is_simple().then(|| SimpleGraph {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v, _)| (u, v)).collect(),
        })
    }
}

impl From<&SimpleGraph> for MultiGraph {
    fn from(g: &SimpleGraph) -> Self {
        g.to_multigraph()
    }
}

impl From<SimpleGraph> for MultiGraph {
    fn from(g: SimpleGraph) -> Self {
        g.to_multigraph()
    }
}
