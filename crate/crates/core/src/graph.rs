//! Abstract graphs given by flags, a boundary map and a glue involution.
//!
//! Flags and vertices are dense indices. An edge is a glue orbit: a fixed
//! flag is an unbounded end, a glued pair is an internal edge. Edges are
//! identified by the smaller flag of their orbit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("flag {0} occurs in more than one glue pair or is glued to itself")]
    GlueNotInvolution(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} is the boundary of no flag")]
    IsolatedVertex(usize),
    #[error("flag {0} is missing, duplicated or out of range")]
    BadFlag(usize),
    #[error("vertex {0} is out of range")]
    BadVertex(usize),
    #[error("graph has no vertices")]
    Empty,
}

/// A validated connected graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    boundary: Vec<usize>,
    glue: Vec<usize>,
    flags_at: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: usize,
    pub boundary: Vec<usize>,
    pub glue: Vec<usize>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;
    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        Graph::from_maps(raw.vertices, raw.boundary, raw.glue)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> RawGraph {
        RawGraph { vertices: g.vertex_count(), boundary: g.boundary, glue: g.glue }
    }
}

/// An edge as a glue orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    /// The smaller flag of the orbit.
    pub flag: usize,
    /// The other flag, for internal edges.
    pub opposite: Option<usize>,
}

impl Edge {
    pub fn is_end(&self) -> bool {
        self.opposite.is_none()
    }
}

/// Per-component result of removing open edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub vertices: Vec<usize>,
    pub has_loop: bool,
    pub unbounded_end_count: usize,
}

/// Builds a graph from `(flag, vertex)` incidences and glue pairs.
pub fn build_graph(
    vertex_count: usize,
    flag_assignments: &[(usize, usize)],
    glue_pairs: &[(usize, usize)],
) -> Result<Graph, GraphError> {
    let nf = flag_assignments.len();
    let mut boundary = vec![usize::MAX; nf];
    for &(f, v) in flag_assignments {
        if f >= nf || boundary[f] != usize::MAX {
            return Err(GraphError::BadFlag(f));
        }
        boundary[f] = v;
    }
    let mut glue: Vec<usize> = (0..nf).collect();
    let mut seen = vec![false; nf];
    for &(a, b) in glue_pairs {
        for f in [a, b] {
            if f >= nf {
                return Err(GraphError::BadFlag(f));
            }
            if seen[f] {
                return Err(GraphError::GlueNotInvolution(f));
            }
            seen[f] = true;
        }
        if a == b {
            return Err(GraphError::GlueNotInvolution(a));
        }
        glue[a] = b;
        glue[b] = a;
    }
    Graph::from_maps(vertex_count, boundary, glue)
}

impl Graph {
    /// Validates explicit boundary and glue maps.
    pub fn from_maps(
        vertex_count: usize,
        boundary: Vec<usize>,
        glue: Vec<usize>,
    ) -> Result<Graph, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        if glue.len() != boundary.len() {
            return Err(GraphError::BadFlag(glue.len().min(boundary.len())));
        }
        let mut flags_at = vec![Vec::new(); vertex_count];
        for (f, &v) in boundary.iter().enumerate() {
            if v >= vertex_count {
                return Err(GraphError::BadVertex(v));
            }
            flags_at[v].push(f);
        }
        for (f, &j) in glue.iter().enumerate() {
            if j >= glue.len() {
                return Err(GraphError::BadFlag(j));
            }
            if glue[j] != f {
                return Err(GraphError::GlueNotInvolution(f));
            }
        }
        if let Some(v) = flags_at.iter().position(|fs| fs.is_empty()) {
            return Err(GraphError::IsolatedVertex(v));
        }
        let g = Graph { boundary, glue, flags_at };
        if g.components(&[]).len() != 1 {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.flags_at.len()
    }

    pub fn flag_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn boundary(&self, f: usize) -> usize {
        self.boundary[f]
    }

    pub fn glue(&self, f: usize) -> usize {
        self.glue[f]
    }

    pub fn is_end_flag(&self, f: usize) -> bool {
        self.glue[f] == f
    }

    /// The representative (smaller) flag of the edge containing `f`.
    pub fn edge_id(&self, f: usize) -> usize {
        f.min(self.glue[f])
    }

    pub fn edge(&self, f: usize) -> Edge {
        let a = self.edge_id(f);
        let b = self.glue[a];
        Edge { flag: a, opposite: (a != b).then_some(b) }
    }

    pub fn flags_at(&self, v: usize) -> &[usize] {
        &self.flags_at[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.flags_at[v].len()
    }

    /// All edges ordered by representative flag.
    pub fn edges(&self) -> Vec<Edge> {
        (0..self.flag_count()).filter(|&f| self.edge_id(f) == f).map(|f| self.edge(f)).collect()
    }

    pub fn internal_edges(&self) -> Vec<Edge> {
        self.edges().into_iter().filter(|e| !e.is_end()).collect()
    }

    pub fn ends(&self) -> Vec<Edge> {
        self.edges().into_iter().filter(|e| e.is_end()).collect()
    }

    pub fn internal_edge_count(&self) -> usize {
        (0..self.flag_count()).filter(|&f| self.glue[f] > f).count()
    }

    pub fn end_count(&self) -> usize {
        (0..self.flag_count()).filter(|&f| self.glue[f] == f).count()
    }

    /// First Betti number: internal edges − vertices + 1.
    pub fn genus(&self) -> usize {
        self.internal_edge_count() + 1 - self.vertex_count()
    }

    /// Vertex at the other side of an internal flag.
    pub fn neighbor(&self, f: usize) -> Option<usize> {
        let j = self.glue[f];
        (j != f).then(|| self.boundary[j])
    }

    fn components(&self, removed_edges: &[usize]) -> Vec<Vec<usize>> {
        let nv = self.vertex_count();
        let mut uf = UnionFind::new(nv);
        for f in 0..self.flag_count() {
            let j = self.glue[f];
            if j > f && !removed_edges.contains(&f) {
                uf.union(self.boundary[f], self.boundary[j]);
            }
        }
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for v in 0..nv {
            by_root[uf.find(v)].push(v);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }

    /// Removes the open edges containing the given flags and reports each
    /// remaining component. Vertices are kept.
    pub fn complement_analysis(&self, removed_flags: &[usize]) -> Vec<ComponentReport> {
        let removed: Vec<usize> = removed_flags.iter().map(|&f| self.edge_id(f)).collect();
        let comps = self.components(&removed);
        let mut comp_of = vec![0; self.vertex_count()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut edges = vec![0usize; comps.len()];
        let mut ends = vec![0usize; comps.len()];
        for f in 0..self.flag_count() {
            if removed.contains(&self.edge_id(f)) {
                continue;
            }
            let j = self.glue[f];
            let c = comp_of[self.boundary[f]];
            if j == f {
                ends[c] += 1;
            } else if j > f {
                edges[c] += 1;
            }
        }
        comps
            .into_iter()
            .enumerate()
            .map(|(i, vertices)| ComponentReport {
                has_loop: edges[i] >= vertices.len(),
                unbounded_end_count: ends[i],
                vertices,
            })
            .collect()
    }
}

/// Disjoint-set forest with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two vertices joined by a double edge, two ends at each vertex.
    pub(crate) fn double_edge() -> Graph {
        let inc: Vec<(usize, usize)> =
            vec![(0, 0), (1, 0), (2, 1), (3, 1), (4, 0), (5, 0), (6, 1), (7, 1)];
        build_graph(2, &inc, &[(4, 7), (5, 6)]).unwrap()
    }

    #[test]
    fn double_edge_counts() {
        let g = double_edge();
        assert_eq!(g.end_count(), 4);
        assert_eq!(g.internal_edge_count(), 2);
        assert_eq!(g.genus(), 1);
    }

    #[test]
    fn star_has_three_ends() {
        let g = build_graph(1, &[(0, 0), (1, 0), (2, 0)], &[]).unwrap();
        assert_eq!(g.end_count(), 3);
        assert_eq!(g.internal_edge_count(), 0);
        assert_eq!(g.genus(), 0);
    }

    #[test]
    fn reused_flag_is_rejected() {
        let inc = [(0, 0), (1, 0), (2, 0), (3, 0)];
        assert_eq!(build_graph(1, &inc, &[(1, 2), (2, 3)]), Err(GraphError::GlueNotInvolution(2)));
    }

    #[test]
    fn disconnected_and_isolated() {
        let inc = [(0, 0), (1, 1)];
        assert_eq!(build_graph(2, &inc, &[]), Err(GraphError::Disconnected));
        assert_eq!(build_graph(3, &[(0, 0), (1, 1)], &[(0, 1)]), Err(GraphError::IsolatedVertex(2)));
    }

    #[test]
    fn theta_graph_genus_two() {
        let inc = [(0, 0), (1, 0), (2, 0), (3, 1), (4, 1), (5, 1)];
        let g = build_graph(2, &inc, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(g.genus(), 2);
    }

    #[test]
    fn complement_of_double_edge() {
        let g = double_edge();
        let one = g.complement_analysis(&[4]);
        assert_eq!(one.len(), 1);
        assert!(!one[0].has_loop);
        assert_eq!(one[0].unbounded_end_count, 4);
        let none = g.complement_analysis(&[]);
        assert!(none[0].has_loop);
        let both = g.complement_analysis(&[7, 5]);
        assert_eq!(both.len(), 2);
        assert!(both.iter().all(|c| !c.has_loop && c.unbounded_end_count == 2));
    }

    #[test]
    fn removing_an_end_deletes_it() {
        let g = build_graph(1, &[(0, 0), (1, 0), (2, 0)], &[]).unwrap();
        let r = g.complement_analysis(&[1]);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].unbounded_end_count, 2);
        assert_eq!(r[0].vertices, vec![0]);
    }
}
