//! Walls and their resolutions, and the inverse operation of degenerating
//! a curve onto a boundary stratum.

use super::{CombinatorialType, TypeError};
use crate::curve::{DecoratedGraph, MarkingMap, Stratum};
use crate::graph::{Graph, UnionFind};
use crate::lattice::LatticeVector;
use crate::linalg::Q;
use crate::solver::{dot_int, AffineSystem, Coord};
use num_traits::Zero;
use std::collections::HashSet;
use std::sync::Arc;

/// How a wall type degenerates from codimension zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WallKind {
    /// One 4-valent vertex; flags in the order used by the resolutions.
    FourValent { vertex: usize, flags: [usize; 4] },
    /// A mark sitting on a 3-valent vertex.
    VertexMark { mark: usize, vertex: usize },
    /// Two 4-valent vertices joined by two edges.
    Exceptional { a: usize, b: usize, edges: [usize; 2] },
}

pub fn wall_kind(t: &CombinatorialType) -> Result<WallKind, TypeError> {
    if let (true, Some((a, b, edges))) = (t.is_exceptional(), t.double_edge_pair()) {
        return Ok(WallKind::Exceptional { a, b, edges });
    }
    let codim = t.codimension();
    if codim != 1 {
        return Err(TypeError::NotAWallType(codim));
    }
    let g = t.graph();
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.valence(v) == 4) {
        let f = g.flags_at(v);
        return Ok(WallKind::FourValent { vertex: v, flags: [f[0], f[1], f[2], f[3]] });
    }
    let (mark, vertex) = t
        .strata()
        .iter()
        .enumerate()
        .find_map(|(i, s)| match *s {
            Stratum::Vertex(v) => Some((i, v)),
            _ => None,
        })
        .expect("codimension one comes from a 4-valent vertex or a vertex mark");
    Ok(WallKind::VertexMark { mark, vertex })
}

/// Moves `group` to a new vertex joined to `v` by a new edge. Returns the
/// curve and the new edge's id.
fn split_vertex(c: &DecoratedGraph, v: usize, group: &[usize]) -> Option<(DecoratedGraph, usize)> {
    let g = &c.graph;
    let w = g.vertex_count();
    let nf = g.flag_count();
    let mut boundary: Vec<usize> = (0..nf).map(|f| g.boundary(f)).collect();
    let mut glue: Vec<usize> = (0..nf).map(|f| g.glue(f)).collect();
    let mut vs: Vec<LatticeVector> = (0..nf).map(|f| c.v(f)).collect();
    let s: LatticeVector = group.iter().map(|&f| c.v(f)).sum();
    if s.is_zero() {
        return None;
    }
    for &f in group {
        debug_assert_eq!(boundary[f], v);
        boundary[f] = w;
    }
    boundary.extend([v, w]);
    glue.extend([nf + 1, nf]);
    vs.extend([s, -s]);
    let graph = Graph::from_maps(w + 1, boundary, glue).ok()?;
    let curve = DecoratedGraph::from_vectors(graph, &vs).ok()?;
    curve.check().ok()?;
    Some((curve, nf))
}

fn finish(t: &CombinatorialType, curve: DecoratedGraph, strata: Vec<Stratum>) -> Option<CombinatorialType> {
    let r = CombinatorialType::new(Arc::new(curve), MarkingMap::new(strata), t.genus(), t.degree_arc().clone()).ok()?;
    (r.codimension() == 0).then_some(r)
}

/// Codimension-0 types having `t` in the boundary of their stratum, each
/// with its index: the partner of the fourth flag for a 4-valent vertex,
/// the flag the mark moves onto, or the combination number.
pub fn resolutions_indexed(t: &CombinatorialType) -> Result<Vec<(usize, CombinatorialType)>, TypeError> {
    let c = t.curve();
    let g = t.graph();
    let mut out = Vec::new();
    match wall_kind(t)? {
        WallKind::FourValent { vertex, flags } => {
            for i in 0..3 {
                if let Some((curve, _)) = split_vertex(c, vertex, &[flags[i], flags[3]]) {
                    if let Some(r) = finish(t, curve, t.strata().to_vec()) {
                        out.push((i, r));
                    }
                }
            }
        }
        WallKind::VertexMark { mark, vertex } => {
            for (i, &f) in g.flags_at(vertex).iter().enumerate() {
                let mut strata = t.strata().to_vec();
                strata[mark] = Stratum::Edge(g.edge_id(f));
                if let Some(r) = finish(t, c.clone(), strata) {
                    out.push((i, r));
                }
            }
        }
        WallKind::Exceptional { a, b, edges } => {
            let joining_a: Vec<usize> = g.flags_at(a).iter().copied().filter(|&f| g.neighbor(f) == Some(b)).collect();
            let other_a = g.flags_at(a).iter().copied().find(|f| !joining_a.contains(f)).unwrap();
            let other_b = g.flags_at(b).iter().copied().find(|&f| g.neighbor(f) != Some(a)).unwrap();
            debug_assert_eq!(joining_a.iter().map(|&f| g.edge_id(f)).collect::<HashSet<_>>(), edges.into_iter().collect());
            let mut seen = HashSet::new();
            for (k, (ja, jb)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                let Some((c1, _)) = split_vertex(c, a, &[other_a, joining_a[ja]]) else { continue };
                let jb_flag = g.glue(joining_a[jb]);
                let Some((c2, _)) = split_vertex(&c1, b, &[other_b, jb_flag]) else { continue };
                let Some(r) = finish(t, c2, t.strata().to_vec()) else { continue };
                if crate::solver::interior_point(&r).is_none() || r.stratum_dimension() != 2 * r.n() {
                    continue;
                }
                if seen.insert(r.key()) {
                    out.push((k, r));
                }
            }
        }
    }
    Ok(out)
}

pub fn resolutions(t: &CombinatorialType) -> Result<Vec<CombinatorialType>, TypeError> {
    Ok(resolutions_indexed(t)?.into_iter().map(|(_, r)| r).collect())
}

/// Result of contracting edges and moving marks onto vertices.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub ty: CombinatorialType,
    /// Old vertex → new vertex.
    pub vertex_map: Vec<usize>,
    /// Old flag → new flag, `None` for contracted flags.
    pub flag_map: Vec<Option<usize>>,
}

/// Contracts the given internal edges and moves the listed marks to the
/// given old vertices. Fails if the result is not a valid type.
pub fn contract(t: &CombinatorialType, edges: &[usize], moved: &[(usize, usize)]) -> Result<Contraction, TypeError> {
    let c = t.curve();
    let g = t.graph();
    let dead: HashSet<usize> = edges.iter().flat_map(|&e| [e, g.glue(e)]).collect();
    let mut uf = UnionFind::new(g.vertex_count());
    for &e in edges {
        uf.union(g.boundary(e), g.boundary(g.glue(e)));
    }
    let mut vertex_map = vec![usize::MAX; g.vertex_count()];
    let mut count = 0;
    for v in 0..g.vertex_count() {
        let r = uf.find(v);
        if vertex_map[r] == usize::MAX {
            vertex_map[r] = count;
            count += 1;
        }
        vertex_map[v] = vertex_map[r];
    }
    let mut flag_map = vec![None; g.flag_count()];
    let mut next = 0;
    for (f, slot) in flag_map.iter_mut().enumerate() {
        if !dead.contains(&f) {
            *slot = Some(next);
            next += 1;
        }
    }
    let kept: Vec<usize> = (0..g.flag_count()).filter(|f| !dead.contains(f)).collect();
    let boundary = kept.iter().map(|&f| vertex_map[g.boundary(f)]).collect();
    let glue = kept.iter().map(|&f| flag_map[g.glue(f)].unwrap()).collect();
    let dir = kept.iter().map(|&f| c.dir(f)).collect();
    let weight = kept.iter().map(|&f| c.weight(f)).collect();
    let graph = Graph::from_maps(count, boundary, glue).map_err(|e| TypeError::Curve(e.into()))?;
    let curve = DecoratedGraph::new(graph, dir, weight)?;
    let strata = t
        .strata()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if let Some(&(_, v)) = moved.iter().find(|m| m.0 == i) {
                return Stratum::Vertex(vertex_map[v]);
            }
            match *s {
                Stratum::Vertex(v) => Stratum::Vertex(vertex_map[v]),
                Stratum::Edge(e) if dead.contains(&e) => Stratum::Vertex(vertex_map[g.boundary(e)]),
                Stratum::Edge(e) => Stratum::Edge(flag_map[e].unwrap()),
            }
        })
        .collect();
    let ty = CombinatorialType::new(Arc::new(curve), MarkingMap::new(strata), t.genus(), t.degree_arc().clone())?;
    Ok(Contraction { ty, vertex_map, flag_map })
}

/// The type of the curve at a boundary point `x` of the closed stratum,
/// with the matching coordinates. `None` if the limit is not a valid type.
pub fn degenerate(t: &CombinatorialType, x: &[Q]) -> Option<(CombinatorialType, Vec<Q>)> {
    let sys = AffineSystem::build(t);
    let g = t.graph();
    let value = |c: Coord| x[sys.coord_index(c).unwrap()].clone();
    let zero_edges: Vec<usize> =
        g.internal_edges().iter().map(|e| e.flag).filter(|&e| value(Coord::Length(e)).is_zero()).collect();
    let mut moved = Vec::new();
    for (i, s) in t.strata().iter().enumerate() {
        if let Stratum::Edge(e) = *s {
            let o = value(Coord::Offset(i));
            if o.is_zero() {
                moved.push((i, g.boundary(e)));
            } else if !g.is_end_flag(e) && o == value(Coord::Length(e)) {
                moved.push((i, g.boundary(g.glue(e))));
            }
        }
    }
    let con = contract(t, &zero_edges, &moved).ok()?;
    let nsys = AffineSystem::build(&con.ty);
    let root_old = (0..g.vertex_count()).find(|&v| con.vertex_map[v] == 0).unwrap();
    let nx: Vec<Q> = nsys
        .coords
        .iter()
        .map(|c| match *c {
            Coord::RootX => dot_int(&sys.positions[root_old][0], x),
            Coord::RootY => dot_int(&sys.positions[root_old][1], x),
            Coord::Length(e) => {
                let old = con.flag_map.iter().position(|&f| f == Some(e)).unwrap();
                value(Coord::Length(g.edge_id(old)))
            }
            Coord::Offset(i) => value(Coord::Offset(i)),
        })
        .collect();
    debug_assert_eq!(nsys.evaluate(&nx), sys.evaluate(x));
    Some((con.ty, nx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Degree;
    use crate::graph::build_graph;

    fn lv(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    /// Conic with one 4-valent vertex joined to two trivalent ones.
    fn four_valent_conic() -> CombinatorialType {
        let g = build_graph(
            3,
            &[(0, 1), (1, 1), (2, 2), (3, 2), (4, 0), (5, 0), (6, 1), (7, 0), (8, 2), (9, 0)],
            &[(6, 7), (8, 9)],
        )
        .unwrap();
        let v = [lv(-1, 0), lv(0, -1), lv(1, 1), lv(0, -1), lv(-1, 0), lv(1, 1), lv(1, 1), lv(-1, -1), lv(-1, 0), lv(1, 0)];
        let c = DecoratedGraph::validated(g, &v).unwrap();
        assert_eq!(c.graph.valence(0), 4);
        let m = MarkingMap::new((0..5).map(Stratum::Edge).collect());
        CombinatorialType::new(Arc::new(c), m, 0, Arc::new(Degree::projective(2))).unwrap()
    }

    #[test]
    fn four_valent_round_trip() {
        let t = four_valent_conic();
        assert_eq!(t.codimension(), 1);
        let rs = resolutions_indexed(&t).unwrap();
        assert!(!rs.is_empty());
        for (_, r) in &rs {
            assert_eq!(r.codimension(), 0);
            let new_edge = r.graph().flag_count() - 2;
            let back = contract(r, &[new_edge], &[]).unwrap();
            assert_eq!(back.ty.key(), t.key());
        }
    }

    #[test]
    fn codim_zero_is_not_a_wall() {
        let g = build_graph(1, &[(0, 0), (1, 0), (2, 0)], &[]).unwrap();
        let c = DecoratedGraph::validated(g, &[lv(-1, 0), lv(0, -1), lv(1, 1)]).unwrap();
        let t = CombinatorialType::new(
            Arc::new(c),
            MarkingMap::new(vec![Stratum::Edge(0), Stratum::Edge(1)]),
            0,
            Arc::new(Degree::projective(1)),
        )
        .unwrap();
        assert_eq!(resolutions(&t).unwrap_err(), TypeError::NotAWallType(0));
    }
}
