//! Combinatorial types of marked curves.

pub mod canonical;
pub mod enumerate;
pub mod resolve;

use crate::curve::{minimum_marks, valid_marking_witness, CurveError, Degree, DecoratedGraph, MarkingMap, Stratum};
use crate::graph::Graph;
use crate::lattice::LatticeVector;
use canonical::{canonical_form, key_digest, MarkMode};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub use enumerate::{enumerate_types, enumerate_types_with, for_each_type, labelings, CatalogEntry, EnumerationOptions, TypeCatalog};
pub use resolve::resolutions;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("curve degree {found} differs from the required degree {expected}")]
    DegreeMismatch { expected: String, found: String },
    #[error("curve genus {curve} exceeds the target genus {target}")]
    GenusTooLarge { curve: usize, target: usize },
    #[error("expected {expected} marked points, found {found}")]
    WrongMarkCount { expected: usize, found: usize },
    #[error("{found} marks on vertices, at least {needed} required")]
    TooFewVertexMarks { needed: usize, found: usize },
    #[error("marked points do not cut the curve into admissible pieces")]
    InvalidMarking,
    #[error("type has codimension {0} and is not exceptional")]
    NotAWallType(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("enumeration exceeded the budget of {0} candidates")]
    EnumerationBudgetExceeded(usize),
}

/// The discrete data of a marked curve: graph, weights, directions, and
/// which stratum every marked point lies on, in a (g, Δ) context.
#[derive(Clone, Debug)]
pub struct CombinatorialType {
    curve: Arc<DecoratedGraph>,
    marking: MarkingMap,
    genus: usize,
    degree: Arc<Degree>,
}

/// Stable identifier of a type up to isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeKey(pub u128);

impl fmt::Display for TypeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl CombinatorialType {
    /// Validates every condition of a marked type in the (genus, degree) context.
    pub fn new(
        curve: Arc<DecoratedGraph>,
        marking: MarkingMap,
        genus: usize,
        degree: Arc<Degree>,
    ) -> Result<Self, TypeError> {
        curve.check()?;
        let marking = marking.normalized(&curve.graph)?;
        let found = curve.degree_of()?;
        if found != *degree {
            return Err(TypeError::DegreeMismatch { expected: degree.to_string(), found: found.to_string() });
        }
        let gc = curve.genus();
        if gc > genus {
            return Err(TypeError::GenusTooLarge { curve: gc, target: genus });
        }
        let n = minimum_marks(&degree, genus);
        if marking.len() != n {
            return Err(TypeError::WrongMarkCount { expected: n, found: marking.len() });
        }
        if marking.vertex_mark_count() < genus - gc {
            return Err(TypeError::TooFewVertexMarks { needed: genus - gc, found: marking.vertex_mark_count() });
        }
        if valid_marking_witness(&curve.graph, &marking.strata).is_none() {
            return Err(TypeError::InvalidMarking);
        }
        Ok(CombinatorialType { curve, marking, genus, degree })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts(curve: Arc<DecoratedGraph>, marking: MarkingMap, genus: usize, degree: Arc<Degree>) -> Self {
        CombinatorialType { curve, marking, genus, degree }
    }

    pub fn curve(&self) -> &DecoratedGraph {
        &self.curve
    }

    pub fn curve_arc(&self) -> &Arc<DecoratedGraph> {
        &self.curve
    }

    pub fn graph(&self) -> &Graph {
        &self.curve.graph
    }

    pub fn marking(&self) -> &MarkingMap {
        &self.marking
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.marking.strata
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn degree_arc(&self) -> &Arc<Degree> {
        &self.degree
    }

    /// Number of marked points.
    pub fn n(&self) -> usize {
        self.marking.len()
    }

    /// Genus of the underlying graph.
    pub fn curve_genus(&self) -> usize {
        self.curve.genus()
    }

    /// The same curve with another marking (not revalidated).
    pub fn with_marking(&self, marking: MarkingMap) -> CombinatorialType {
        CombinatorialType::from_parts(self.curve.clone(), marking, self.genus, self.degree.clone())
    }

    /// Σ(val V − 3) + (g − g(C)) + #marks on vertices.
    pub fn codimension(&self) -> usize {
        let g = self.graph();
        let excess: usize = (0..g.vertex_count()).map(|v| g.valence(v) - 3).sum();
        excess + (self.genus - self.curve_genus()) + self.marking.vertex_mark_count()
    }

    /// 2n − 2 + 2g(C) − #internal edges − #marks on edges.
    pub fn codimension_from_edges(&self) -> i64 {
        2 * self.n() as i64 - 2 + 2 * self.curve_genus() as i64
            - self.graph().internal_edge_count() as i64
            - self.marking.edge_mark_count() as i64
    }

    /// Codimension two with two 4-valent vertices joined by exactly two edges.
    pub fn is_exceptional(&self) -> bool {
        self.codimension() == 2 && self.double_edge_pair().is_some()
    }

    /// Two 4-valent vertices joined by exactly two edges, with those edges.
    pub fn double_edge_pair(&self) -> Option<(usize, usize, [usize; 2])> {
        let g = self.graph();
        let four: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.valence(v) == 4).collect();
        for (i, &a) in four.iter().enumerate() {
            for &b in &four[i + 1..] {
                let joining: Vec<usize> = g
                    .flags_at(a)
                    .iter()
                    .copied()
                    .filter(|&f| g.neighbor(f) == Some(b))
                    .collect();
                if joining.len() == 2 {
                    return Some((a, b, [g.edge_id(joining[0]), g.edge_id(joining[1])]));
                }
            }
        }
        None
    }

    /// Dimension of the stratum: dim A − rank of the loop-closure rows.
    pub fn stratum_dimension(&self) -> usize {
        crate::solver::AffineSystem::build(self).stratum_dimension()
    }

    /// v(F) for the flags at a vertex.
    pub fn vectors_at(&self, v: usize) -> Vec<LatticeVector> {
        self.curve.vectors_at(v)
    }

    /// Isomorphism key respecting mark labels.
    pub fn key(&self) -> TypeKey {
        TypeKey(key_digest(&self.key_vec(MarkMode::Labeled)))
    }

    /// Isomorphism key forgetting mark labels.
    pub fn shape_key(&self) -> TypeKey {
        TypeKey(key_digest(&self.key_vec(MarkMode::Unlabeled)))
    }

    pub fn key_vec(&self, mode: MarkMode) -> Vec<i32> {
        let mut k = canonical_form(&self.curve, &self.marking.strata, mode).key;
        k.push(self.genus as i32);
        for (v, m) in self.degree.entries() {
            k.extend([v.x as i32, v.y as i32, *m as i32]);
        }
        k
    }

    /// Isomorphic copy with vertices and flags in canonical order.
    pub fn canonicalized(&self, mode: MarkMode) -> CombinatorialType {
        let cf = canonical_form(&self.curve, &self.marking.strata, mode);
        relabel(self, &cf.vertex_order, &cf.flag_order)
    }
}

/// Renumbers vertices and flags: `vertex_order[new] = old`, `flag_order[new] = old`.
pub fn relabel(t: &CombinatorialType, vertex_order: &[usize], flag_order: &[usize]) -> CombinatorialType {
    let (curve, strata) = relabel_parts(t.curve(), &t.marking.strata, vertex_order, flag_order);
    CombinatorialType::from_parts(Arc::new(curve), MarkingMap::new(strata), t.genus, t.degree.clone())
}

pub(crate) fn relabel_parts(
    c: &DecoratedGraph,
    strata: &[Stratum],
    vertex_order: &[usize],
    flag_order: &[usize],
) -> (DecoratedGraph, Vec<Stratum>) {
    let g = &c.graph;
    let mut inv_v = vec![0; vertex_order.len()];
    for (new, &old) in vertex_order.iter().enumerate() {
        inv_v[old] = new;
    }
    let mut inv_f = vec![0; flag_order.len()];
    for (new, &old) in flag_order.iter().enumerate() {
        inv_f[old] = new;
    }
    let boundary: Vec<usize> = flag_order.iter().map(|&f| inv_v[g.boundary(f)]).collect();
    let glue: Vec<usize> = flag_order.iter().map(|&f| inv_f[g.glue(f)]).collect();
    let dir: Vec<LatticeVector> = flag_order.iter().map(|&f| c.dir(f)).collect();
    let weight: Vec<u64> = flag_order.iter().map(|&f| c.weight(f)).collect();
    let graph = Graph::from_maps(vertex_order.len(), boundary, glue).expect("relabeling preserves validity");
    let new_curve = DecoratedGraph::new(graph, dir, weight).expect("relabeling preserves validity");
    let strata = strata
        .iter()
        .map(|s| match *s {
            Stratum::Vertex(v) => Stratum::Vertex(inv_v[v]),
            Stratum::Edge(f) => Stratum::Edge(new_curve.graph.edge_id(inv_f[f])),
        })
        .collect();
    (new_curve, strata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Degree;
    use crate::graph::build_graph;

    fn lv(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    fn line_type(marks: [usize; 2]) -> CombinatorialType {
        let g = build_graph(1, &[(0, 0), (1, 0), (2, 0)], &[]).unwrap();
        let c = DecoratedGraph::validated(g, &[lv(-1, 0), lv(0, -1), lv(1, 1)]).unwrap();
        let m = MarkingMap::new(marks.iter().map(|&f| Stratum::Edge(f)).collect());
        CombinatorialType::new(Arc::new(c), m, 0, Arc::new(Degree::projective(1))).unwrap()
    }

    #[test]
    fn trivalent_codimension_zero() {
        let t = line_type([0, 1]);
        assert_eq!(t.codimension(), 0);
        assert_eq!(t.codimension_from_edges(), 0);
        assert!(!t.is_exceptional());
        assert_eq!(t.stratum_dimension(), 4);
    }

    #[test]
    fn keys_respect_labels_and_marked_ends() {
        let a = line_type([0, 1]);
        let b = line_type([1, 0]);
        let c = line_type([0, 2]);
        assert_ne!(a.key(), b.key());
        assert_eq!(a.shape_key(), b.shape_key());
        assert_ne!(a.key(), c.key());
        let perm = relabel(&a, &[0], &[2, 0, 1]);
        assert_eq!(perm.key(), a.key());
    }

    #[test]
    fn rejects_invalid_marking() {
        let g = build_graph(1, &[(0, 0), (1, 0), (2, 0)], &[]).unwrap();
        let c = DecoratedGraph::validated(g, &[lv(-1, 0), lv(0, -1), lv(1, 1)]).unwrap();
        let m = MarkingMap::new(vec![Stratum::Edge(0), Stratum::Edge(0)]);
        let r = CombinatorialType::new(Arc::new(c), m, 0, Arc::new(Degree::projective(1)));
        assert_eq!(r.unwrap_err(), TypeError::InvalidMarking);
    }
}
