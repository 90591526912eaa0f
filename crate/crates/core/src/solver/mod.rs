//! Affine coordinates on strata, the evaluation map, and exact solving.
//!
//! A stratum point is described by the root vertex position, the lattice
//! length ℓ of every internal edge (h(E) = ℓ·u), and for every mark on an
//! edge its offset t from the vertex of the edge's representative flag.

pub mod search;

use crate::curve::Stratum;
use crate::graph::UnionFind;
use crate::lattice::LatticeVector;
use crate::linalg::{LinearSolution, QMatrix, Q};
use crate::lp::{polyhedron_feasibility, Feasibility};
use crate::types::CombinatorialType;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("solutions of this type through the points form a positive-dimensional family")]
    DegenerateSystem,
    #[error("expected {expected} points, found {found}")]
    WrongPointCount { expected: usize, found: usize },
}

/// One affine coordinate of a stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coord {
    RootX,
    RootY,
    /// Lattice length of the internal edge with this representative flag.
    Length(usize),
    /// Offset of this marked point along its edge.
    Offset(usize),
}

/// n labeled points in Q².
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointConfiguration {
    pub points: Vec<[Q; 2]>,
}

impl PointConfiguration {
    pub fn new(points: Vec<[Q; 2]>) -> Self {
        PointConfiguration { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates as one vector (x₁, y₁, x₂, …).
    pub fn flat(&self) -> Vec<Q> {
        self.points.iter().flat_map(|p| p.iter().cloned()).collect()
    }

    pub fn from_flat(v: &[Q]) -> Self {
        PointConfiguration { points: v.chunks(2).map(|c| [c[0].clone(), c[1].clone()]).collect() }
    }

    pub fn has_coincident_points(&self) -> bool {
        let mut ps = self.points.clone();
        ps.sort();
        ps.windows(2).any(|w| w[0] == w[1])
    }

    /// Applies a permutation: point i moves to label perm[i].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = self.points.clone();
        for (i, &j) in perm.iter().enumerate() {
            out[j] = self.points[i].clone();
        }
        PointConfiguration { points: out }
    }

    pub fn translated(&self, dx: &Q, dy: &Q) -> Self {
        PointConfiguration { points: self.points.iter().map(|[x, y]| [x + dx, y + dy]).collect() }
    }
}

/// Evaluation rows, loop-closure rows and polyhedron inequalities of a stratum.
#[derive(Clone, Debug)]
pub struct AffineSystem {
    pub coords: Vec<Coord>,
    /// Rows 2i, 2i+1 give h(x_i).
    pub eval: Vec<Vec<i64>>,
    /// Two rows per independent cycle.
    pub loops: Vec<Vec<i64>>,
    /// Rows that must be strictly positive on the open stratum.
    pub ineq: Vec<Vec<i64>>,
    /// Vertex positions as linear forms in the coordinates.
    pub positions: Vec<[Vec<i64>; 2]>,
    /// Edges of the spanning tree, by representative flag.
    pub tree_edges: Vec<usize>,
    pub root: usize,
}

fn axpy(acc: &mut [i64], a: i64, x: &[i64]) {
    for (y, v) in acc.iter_mut().zip(x) {
        *y += a * v;
    }
}

impl AffineSystem {
    pub fn build(t: &CombinatorialType) -> AffineSystem {
        let order: Vec<usize> = t.graph().internal_edges().iter().map(|e| e.flag).collect();
        AffineSystem::build_with_edge_order(t, &order)
    }

    /// Builds the system using a spanning tree chosen greedily from
    /// internal edges in the given order.
    pub fn build_with_edge_order(t: &CombinatorialType, order: &[usize]) -> AffineSystem {
        let c = t.curve();
        let g = &c.graph;
        let internal: Vec<usize> = g.internal_edges().iter().map(|e| e.flag).collect();
        let mut coords = vec![Coord::RootX, Coord::RootY];
        let mut len_index = vec![usize::MAX; g.flag_count()];
        for &e in &internal {
            len_index[e] = coords.len();
            coords.push(Coord::Length(e));
        }
        let mut off_index = vec![usize::MAX; t.n()];
        for (i, s) in t.strata().iter().enumerate() {
            if let Stratum::Edge(_) = s {
                off_index[i] = coords.len();
                coords.push(Coord::Offset(i));
            }
        }
        let dim = coords.len();

        let mut uf = UnionFind::new(g.vertex_count());
        let mut tree_edges = Vec::new();
        for &e in order {
            let e = g.edge_id(e);
            if uf.union(g.boundary(e), g.boundary(g.glue(e))) {
                tree_edges.push(e);
            }
        }
        let root = 0;
        let mut positions: Vec<Option<[Vec<i64>; 2]>> = vec![None; g.vertex_count()];
        let mut rx = vec![0i64; dim];
        rx[0] = 1;
        let mut ry = vec![0i64; dim];
        ry[1] = 1;
        positions[root] = Some([rx, ry]);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &f in g.flags_at(v) {
                let Some(w) = g.neighbor(f) else { continue };
                if positions[w].is_some() || !tree_edges.contains(&g.edge_id(f)) {
                    continue;
                }
                let u = c.dir(f);
                let mut p = positions[v].clone().unwrap();
                p[0][len_index[g.edge_id(f)]] += u.x;
                p[1][len_index[g.edge_id(f)]] += u.y;
                positions[w] = Some(p);
                stack.push(w);
            }
        }
        let positions: Vec<[Vec<i64>; 2]> = positions.into_iter().map(|p| p.expect("graph is connected")).collect();

        let mut loops = Vec::new();
        for &e in &internal {
            if tree_edges.contains(&e) {
                continue;
            }
            let (a, b) = (g.boundary(e), g.boundary(g.glue(e)));
            let u = c.dir(e);
            for (k, uk) in [u.x, u.y].into_iter().enumerate() {
                let mut row = positions[a][k].clone();
                axpy(&mut row, -1, &positions[b][k]);
                row[len_index[e]] += uk;
                loops.push(row);
            }
        }

        let mut eval = Vec::with_capacity(2 * t.n());
        for (i, s) in t.strata().iter().enumerate() {
            match *s {
                Stratum::Vertex(v) => {
                    eval.push(positions[v][0].clone());
                    eval.push(positions[v][1].clone());
                }
                Stratum::Edge(f) => {
                    let u = c.dir(f);
                    let base = &positions[g.boundary(f)];
                    for (k, uk) in [u.x, u.y].into_iter().enumerate() {
                        let mut row = base[k].clone();
                        row[off_index[i]] += uk;
                        eval.push(row);
                    }
                }
            }
        }

        let mut ineq = Vec::new();
        for &e in &internal {
            let mut row = vec![0; dim];
            row[len_index[e]] = 1;
            ineq.push(row);
        }
        for (i, s) in t.strata().iter().enumerate() {
            if let Stratum::Edge(f) = *s {
                let mut row = vec![0; dim];
                row[off_index[i]] = 1;
                ineq.push(row);
                if !g.is_end_flag(f) {
                    let mut row = vec![0; dim];
                    row[len_index[f]] = 1;
                    row[off_index[i]] = -1;
                    ineq.push(row);
                }
            }
        }
        AffineSystem { coords, eval, loops, ineq, positions, tree_edges, root }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Evaluation rows followed by loop rows.
    pub fn matrix_rows(&self) -> Vec<Vec<i64>> {
        self.eval.iter().chain(&self.loops).cloned().collect()
    }

    pub fn loop_rank(&self) -> usize {
        crate::linalg::int_rank(&self.loops, self.dim())
    }

    pub fn stratum_dimension(&self) -> usize {
        self.dim() - self.loop_rank()
    }

    /// Rank of the evaluation map restricted to the stratum's affine hull.
    pub fn image_dimension(&self) -> usize {
        crate::linalg::int_rank(&self.matrix_rows(), self.dim()) - self.loop_rank()
    }

    /// True if the evaluation map has finite fibers on the stratum.
    pub fn is_injective(&self) -> bool {
        self.image_dimension() == self.stratum_dimension()
    }

    pub fn rhs(&self, p: &PointConfiguration) -> Vec<Q> {
        let mut b = p.flat();
        b.extend((0..self.loops.len()).map(|_| Q::zero()));
        b
    }

    pub fn coord_index(&self, c: Coord) -> Option<usize> {
        self.coords.iter().position(|&x| x == c)
    }

    /// Values of the inequality rows at a point.
    pub fn slacks(&self, x: &[Q]) -> Vec<Q> {
        self.ineq.iter().map(|r| dot_int(r, x)).collect()
    }

    pub fn evaluate(&self, x: &[Q]) -> PointConfiguration {
        PointConfiguration::from_flat(&self.eval.iter().map(|r| dot_int(r, x)).collect::<Vec<_>>())
    }

    pub fn loop_residual(&self, x: &[Q]) -> Vec<Q> {
        self.loops.iter().map(|r| dot_int(r, x)).collect()
    }
}

pub fn dot_int(row: &[i64], x: &[Q]) -> Q {
    row.iter()
        .zip(x)
        .filter(|(a, _)| **a != 0)
        .fold(Q::zero(), |acc, (a, b)| acc + b * Q::from_integer((*a).into()))
}

/// A point of a stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumCoordinates {
    pub root: [Q; 2],
    /// (edge representative flag, lattice length).
    pub lengths: Vec<(usize, Q)>,
    /// (mark label, offset).
    pub offsets: Vec<(usize, Q)>,
}

impl StratumCoordinates {
    pub fn from_vec(sys: &AffineSystem, x: &[Q]) -> Self {
        let mut lengths = Vec::new();
        let mut offsets = Vec::new();
        for (c, v) in sys.coords.iter().zip(x) {
            match *c {
                Coord::Length(e) => lengths.push((e, v.clone())),
                Coord::Offset(i) => offsets.push((i, v.clone())),
                _ => {}
            }
        }
        StratumCoordinates { root: [x[0].clone(), x[1].clone()], lengths, offsets }
    }

    pub fn to_vec(&self, sys: &AffineSystem) -> Vec<Q> {
        sys.coords
            .iter()
            .map(|c| match *c {
                Coord::RootX => self.root[0].clone(),
                Coord::RootY => self.root[1].clone(),
                Coord::Length(e) => self.lengths.iter().find(|l| l.0 == e).expect("length").1.clone(),
                Coord::Offset(i) => self.offsets.iter().find(|o| o.0 == i).expect("offset").1.clone(),
            })
            .collect()
    }
}

/// Result of solving one type through one configuration, on the closed stratum.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    NoSolution,
    /// Unique solution in the open stratum.
    Interior(Vec<Q>),
    /// Unique solution on the boundary of the stratum.
    Boundary(Vec<Q>),
    /// A positive-dimensional family meeting the open stratum.
    DegenerateInterior(Vec<Q>),
    /// A positive-dimensional family meeting only the boundary.
    DegenerateBoundary(Vec<Q>),
}

/// Solves the evaluation and loop equations exactly and locates the
/// solution relative to the polyhedron.
pub fn solve_closed(t: &CombinatorialType, p: &PointConfiguration) -> Result<SolveOutcome, SolverError> {
    let sys = AffineSystem::build(t);
    solve_system(&sys, p)
}

pub fn solve_system(sys: &AffineSystem, p: &PointConfiguration) -> Result<SolveOutcome, SolverError> {
    if 2 * p.len() != sys.eval.len() {
        return Err(SolverError::WrongPointCount { expected: sys.eval.len() / 2, found: p.len() });
    }
    let m = QMatrix::from_int_rows(&sys.matrix_rows(), sys.dim());
    let b = sys.rhs(p);
    Ok(match m.solve(&b) {
        LinearSolution::Inconsistent => SolveOutcome::NoSolution,
        LinearSolution::Unique(x) => {
            let s = sys.slacks(&x);
            if s.iter().any(|v| v.is_negative()) {
                SolveOutcome::NoSolution
            } else if s.iter().all(|v| v.is_positive()) {
                SolveOutcome::Interior(x)
            } else {
                SolveOutcome::Boundary(x)
            }
        }
        LinearSolution::Affine { .. } => {
            let g = QMatrix::from_int_rows(&sys.ineq, sys.dim());
            match polyhedron_feasibility(&m, &b, &g) {
                Feasibility::Empty => SolveOutcome::NoSolution,
                Feasibility::Closed(x) => SolveOutcome::DegenerateBoundary(x),
                Feasibility::Strict(x) => SolveOutcome::DegenerateInterior(x),
            }
        }
    })
}

/// All curves of type `t` in the open stratum whose marks map to `p`.
pub fn solve_curves(t: &CombinatorialType, p: &PointConfiguration) -> Result<Vec<StratumCoordinates>, SolverError> {
    let sys = AffineSystem::build(t);
    match solve_system(&sys, p)? {
        SolveOutcome::Interior(x) => Ok(vec![StratumCoordinates::from_vec(&sys, &x)]),
        SolveOutcome::DegenerateInterior(_) => Err(SolverError::DegenerateSystem),
        _ => Ok(vec![]),
    }
}

/// A point of the open stratum with every inequality strict, if any.
pub fn interior_point(t: &CombinatorialType) -> Option<Vec<Q>> {
    let sys = AffineSystem::build(t);
    let eq = QMatrix::from_int_rows(&sys.loops, sys.dim());
    let g = QMatrix::from_int_rows(&sys.ineq, sys.dim());
    let e = vec![Q::zero(); sys.loops.len()];
    match polyhedron_feasibility(&eq, &e, &g) {
        Feasibility::Strict(x) => Some(x),
        _ => None,
    }
}

/// A realized curve in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurve {
    pub vertices: Vec<[Q; 2]>,
    /// (from vertex, to vertex, weight) per internal edge.
    pub segments: Vec<(usize, usize, u64)>,
    /// (vertex, direction, weight) per end.
    pub rays: Vec<(usize, LatticeVector, u64)>,
    pub marks: Vec<[Q; 2]>,
}

/// Materializes h from stratum coordinates.
pub fn realize(t: &CombinatorialType, c: &StratumCoordinates) -> PlaneCurve {
    let sys = AffineSystem::build(t);
    let x = c.to_vec(&sys);
    let vertices = sys.positions.iter().map(|p| [dot_int(&p[0], &x), dot_int(&p[1], &x)]).collect();
    let g = t.graph();
    let mut segments = Vec::new();
    let mut rays = Vec::new();
    for e in g.edges() {
        let f = e.flag;
        match e.opposite {
            Some(j) => segments.push((g.boundary(f), g.boundary(j), t.curve().weight(f))),
            None => rays.push((g.boundary(f), t.curve().dir(f), t.curve().weight(f))),
        }
    }
    let marks = sys.evaluate(&x).points;
    PlaneCurve { vertices, segments, rays, marks }
}
