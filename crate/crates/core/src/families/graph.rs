use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

/// Undirected multigraph on vertices `0..num_vertices`; edges are the
/// ground-set elements, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges
            .iter()
            .find(|&&(u, v)| u >= num_vertices || v >= num_vertices)
        {
            return Err(Error::Input(format!(
                "edge ({u}, {v}) references a vertex outside 0..{num_vertices}"
            )));
        }
        Ok(Self {
            num_vertices,
            edges,
        })
    }

    pub fn complete(k: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..k {
            for v in u + 1..k {
                edges.push((u, v));
            }
        }
        Self {
            num_vertices: k,
            edges,
        }
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Self {
            num_vertices: 10,
            edges,
        }
    }

    pub fn cycle(k: usize) -> Self {
        let edges = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Self {
            num_vertices: k,
            edges,
        }
    }

    pub fn path(k: usize) -> Self {
        let edges = (1..k).map(|i| (i - 1, i)).collect();
        Self {
            num_vertices: k,
            edges,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::<usize>::new(self.num_vertices);
        let mut count = self.num_vertices;
        for &(u, v) in &self.edges {
            if uf.union(u, v) {
                count -= 1;
            }
        }
        count
    }
}
