//! Weighted, directed decorations of graphs and marked points on them.

use crate::graph::{Graph, GraphError};
use crate::lattice::{spans_plane, LatticeVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("degree contains the zero vector")]
    ZeroVector,
    #[error("degree vectors sum to {0}, not zero")]
    NonzeroSum(LatticeVector),
    #[error("degree is empty")]
    EmptyDegree,
    #[error("flag {0}: direction is not primitive")]
    NotPrimitive(usize),
    #[error("flag {0}: weight must be positive")]
    ZeroWeight(usize),
    #[error("flags {0} and {1} of one edge do not have opposite directions and equal weights")]
    EdgeMismatch(usize, usize),
    #[error("flag {0} closes a loop at its own vertex")]
    SelfLoop(usize),
    #[error("expected {expected} entries, found {found}")]
    Length { expected: usize, found: usize },
    #[error("vertex {0} has valence below 3")]
    LowValence(usize),
    #[error("balancing fails at vertices {0:?}")]
    Unbalanced(Vec<usize>),
    #[error("marked point {0} refers to a missing vertex or edge")]
    BadStratum(usize),
}

/// Multiset of nonzero lattice vectors summing to zero, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Degree {
    entries: Vec<(LatticeVector, usize)>,
}

impl Degree {
    pub fn new(vectors: impl IntoIterator<Item = LatticeVector>) -> Result<Degree, CurveError> {
        let mut vs: Vec<LatticeVector> = vectors.into_iter().collect();
        if vs.is_empty() {
            return Err(CurveError::EmptyDegree);
        }
        if vs.iter().any(|v| v.is_zero()) {
            return Err(CurveError::ZeroVector);
        }
        let sum: LatticeVector = vs.iter().copied().sum();
        if !sum.is_zero() {
            return Err(CurveError::NonzeroSum(sum));
        }
        vs.sort();
        let mut entries: Vec<(LatticeVector, usize)> = Vec::new();
        for v in vs {
            match entries.last_mut() {
                Some((w, k)) if *w == v => *k += 1,
                _ => entries.push((v, 1)),
            }
        }
        Ok(Degree { entries })
    }

    pub fn from_multiplicities(
        items: impl IntoIterator<Item = (LatticeVector, usize)>,
    ) -> Result<Degree, CurveError> {
        Degree::new(items.into_iter().flat_map(|(v, k)| std::iter::repeat(v).take(k)))
    }

    /// d copies each of (−1,0), (0,−1), (1,1).
    pub fn projective(d: usize) -> Degree {
        Degree::from_multiplicities([
            (LatticeVector::new(-1, 0), d),
            (LatticeVector::new(0, -1), d),
            (LatticeVector::new(1, 1), d),
        ])
        .expect("projective degree is balanced")
    }

    pub fn entries(&self) -> &[(LatticeVector, usize)] {
        &self.entries
    }

    /// All vectors with repetition, sorted.
    pub fn vectors(&self) -> Vec<LatticeVector> {
        self.entries.iter().flat_map(|&(v, k)| std::iter::repeat(v).take(k)).collect()
    }

    /// #Δ.
    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Σ ‖v‖∞ over Δ.
    pub fn direction_bound(&self) -> u64 {
        self.entries.iter().map(|&(v, k)| v.norm_inf() * k as u64).sum()
    }

    /// Short stable text form, used in cache keys and reports.
    pub fn key(&self) -> String {
        self.entries
            .iter()
            .map(|(v, k)| format!("{}x{}_{}", v.x, v.y, k))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(v, k)| if *k == 1 { v.to_string() } else { format!("{k}*{v}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// n = #Δ + g − 1.
pub fn minimum_marks(delta: &Degree, genus: usize) -> usize {
    delta.size() + genus - 1
}

/// A graph with a primitive direction and a weight on every flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedGraph {
    pub graph: Graph,
    dir: Vec<LatticeVector>,
    weight: Vec<u64>,
}

/// Balancing violation at one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexViolation {
    pub vertex: usize,
    pub sum: LatticeVector,
    pub spans: bool,
}

impl DecoratedGraph {
    /// Checks directions and weights edge by edge. Balancing is checked
    /// separately by [`DecoratedGraph::validate_balancing`].
    pub fn new(graph: Graph, dir: Vec<LatticeVector>, weight: Vec<u64>) -> Result<Self, CurveError> {
        let nf = graph.flag_count();
        for len in [dir.len(), weight.len()] {
            if len != nf {
                return Err(CurveError::Length { expected: nf, found: len });
            }
        }
        for f in 0..nf {
            if !dir[f].is_primitive() {
                return Err(CurveError::NotPrimitive(f));
            }
            if weight[f] == 0 {
                return Err(CurveError::ZeroWeight(f));
            }
            let j = graph.glue(f);
            if j != f {
                if dir[j] != -dir[f] || weight[j] != weight[f] {
                    return Err(CurveError::EdgeMismatch(f, j));
                }
                if graph.boundary(j) == graph.boundary(f) {
                    return Err(CurveError::SelfLoop(f));
                }
            }
        }
        Ok(DecoratedGraph { graph, dir, weight })
    }

    /// Builds from weighted vectors v(F), factoring each into ω·u.
    pub fn from_vectors(graph: Graph, v: &[LatticeVector]) -> Result<Self, CurveError> {
        let mut dir = Vec::with_capacity(v.len());
        let mut weight = Vec::with_capacity(v.len());
        for (f, w) in v.iter().enumerate() {
            let (u, c) = w.factor().ok_or(CurveError::ZeroWeight(f))?;
            dir.push(u);
            weight.push(c);
        }
        DecoratedGraph::new(graph, dir, weight)
    }

    /// Builds and checks balancing, spanning and valence.
    pub fn validated(graph: Graph, v: &[LatticeVector]) -> Result<Self, CurveError> {
        let d = DecoratedGraph::from_vectors(graph, v)?;
        d.check()?;
        Ok(d)
    }

    pub fn check(&self) -> Result<(), CurveError> {
        if let Some(v) = (0..self.graph.vertex_count()).find(|&v| self.graph.valence(v) < 3) {
            return Err(CurveError::LowValence(v));
        }
        let bad = self.validate_balancing();
        if !bad.is_empty() {
            return Err(CurveError::Unbalanced(bad.iter().map(|b| b.vertex).collect()));
        }
        Ok(())
    }

    /// u(F).
    pub fn dir(&self, f: usize) -> LatticeVector {
        self.dir[f]
    }

    /// ω([F]).
    pub fn weight(&self, f: usize) -> u64 {
        self.weight[f]
    }

    /// v(F) = ω·u.
    pub fn v(&self, f: usize) -> LatticeVector {
        (self.weight[f] as i64) * self.dir[f]
    }

    pub fn vectors_at(&self, vertex: usize) -> Vec<LatticeVector> {
        self.graph.flags_at(vertex).iter().map(|&f| self.v(f)).collect()
    }

    /// Lists vertices where balancing or spanning fails; empty means ok.
    pub fn validate_balancing(&self) -> Vec<VertexViolation> {
        (0..self.graph.vertex_count())
            .filter_map(|vertex| {
                let vs = self.vectors_at(vertex);
                let sum: LatticeVector = vs.iter().copied().sum();
                let spans = spans_plane(&vs);
                (!sum.is_zero() || !spans).then_some(VertexViolation { vertex, sum, spans })
            })
            .collect()
    }

    /// The multiset of v(F) over unbounded ends.
    pub fn degree_of(&self) -> Result<Degree, CurveError> {
        Degree::new(
            (0..self.graph.flag_count()).filter(|&f| self.graph.is_end_flag(f)).map(|f| self.v(f)),
        )
    }

    pub fn genus(&self) -> usize {
        self.graph.genus()
    }
}

/// Where a marked point lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stratum {
    Vertex(usize),
    /// Edge given by its representative (smaller) flag.
    Edge(usize),
}

impl Stratum {
    pub fn is_vertex(self) -> bool {
        matches!(self, Stratum::Vertex(_))
    }
}

/// Marked point i (0-based) lies on `strata[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkingMap {
    pub strata: Vec<Stratum>,
}

impl MarkingMap {
    pub fn new(strata: Vec<Stratum>) -> Self {
        MarkingMap { strata }
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn vertex_mark_count(&self) -> usize {
        self.strata.iter().filter(|s| s.is_vertex()).count()
    }

    pub fn edge_mark_count(&self) -> usize {
        self.strata.len() - self.vertex_mark_count()
    }

    /// Checks indices against a graph and normalizes edges to their
    /// representative flag.
    pub fn normalized(&self, g: &Graph) -> Result<MarkingMap, CurveError> {
        let strata = self
            .strata
            .iter()
            .enumerate()
            .map(|(i, s)| match *s {
                Stratum::Vertex(v) if v < g.vertex_count() => Ok(Stratum::Vertex(v)),
                Stratum::Edge(f) if f < g.flag_count() => Ok(Stratum::Edge(g.edge_id(f))),
                _ => Err(CurveError::BadStratum(i)),
            })
            .collect::<Result<_, _>>()?;
        Ok(MarkingMap { strata })
    }
}

/// Searches flag choices at vertex marks for one that leaves no loops and
/// at most one end per component. Returns the chosen flag for every mark.
pub fn is_valid_marking(d: &DecoratedGraph, s: &MarkingMap) -> Option<Vec<usize>> {
    valid_marking_witness(&d.graph, &s.strata)
}

pub(crate) fn valid_marking_witness(g: &Graph, strata: &[Stratum]) -> Option<Vec<usize>> {
    let mut choice: Vec<usize> = strata
        .iter()
        .map(|s| match *s {
            Stratum::Edge(f) => f,
            Stratum::Vertex(v) => g.flags_at(v)[0],
        })
        .collect();
    let vertex_marks: Vec<usize> = (0..strata.len()).filter(|&i| strata[i].is_vertex()).collect();
    let mut idx = vec![0usize; vertex_marks.len()];
    loop {
        let ok = g
            .complement_analysis(&choice)
            .iter()
            .all(|c| !c.has_loop && c.unbounded_end_count <= 1);
        if ok {
            return Some(choice);
        }
        // Odometer over flag choices at vertex marks.
        let mut k = 0;
        loop {
            if k == vertex_marks.len() {
                return None;
            }
            let i = vertex_marks[k];
            let Stratum::Vertex(v) = strata[i] else { unreachable!() };
            idx[k] += 1;
            if idx[k] < g.valence(v) {
                choice[i] = g.flags_at(v)[idx[k]];
                break;
            }
            idx[k] = 0;
            choice[i] = g.flags_at(v)[0];
            k += 1;
        }
    }
}
