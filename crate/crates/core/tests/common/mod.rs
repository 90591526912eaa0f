//! Independent oracles and fixtures shared by the integration tests. Nothing
//! here calls the library's solver, multiplicity, marking or key code.

#![allow(dead_code)]

use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use std::collections::HashSet;
use std::sync::Arc;
use tropcount::curve::{DecoratedGraph, Degree, MarkingMap, Stratum};
use tropcount::graph::build_graph;
use tropcount::{CombinatorialType, LatticeVector, PointConfiguration};

pub type R = Ratio<i128>;

pub fn lv(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

fn binom(n: i128, k: i128) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// N_1..=N_d for rational plane curves through 3d−1 points.
pub fn kontsevich(d: usize) -> Vec<i128> {
    let mut n = vec![0i128; d + 1];
    if d >= 1 {
        n[1] = 1;
    }
    for dd in 2..=d as i128 {
        let mut s = 0;
        for d1 in 1..dd {
            let d2 = dd - d1;
            s += n[d1 as usize] * n[d2 as usize] * d1 * d1 * d2
                * (d2 * binom(3 * dd - 4, 3 * d1 - 2) - d1 * binom(3 * dd - 4, 3 * d1 - 1));
        }
        n[dd as usize] = s;
    }
    n[1..].to_vec()
}

/// Rank of the monomial evaluation matrix of degree-d forms at the given
/// points.
pub fn monomial_rank(d: u32, pts: &[[BigRational; 2]]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|[x, y]| {
            let mut row = Vec::new();
            for i in 0..=d as i32 {
                for j in 0..=d as i32 - i {
                    row.push(x.pow(i) * y.pow(j));
                }
            }
            row
        })
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                for k in c..cols {
                    let sub = &f * &rows[r][k];
                    rows[i][k] -= sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Unique solution of a square system, or None when singular.
pub fn solve_square(mut a: Vec<Vec<R>>, mut b: Vec<R>) -> Option<Vec<R>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c] / a[c][c];
                for k in c..n {
                    let sub = f * a[c][k];
                    a[i][k] -= sub;
                }
                let sub = f * b[c];
                b[i] -= sub;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn to_r(q: &tropcount::Q) -> R {
    use num_traits::ToPrimitive;
    R::new(q.numer().to_i128().expect("small numerator"), q.denom().to_i128().expect("small denominator"))
}

/// Solves for a curve of type `t` through `p` in vertex coordinates:
/// unknown vertex positions, edge lengths and mark parameters. Returns the
/// vertex positions when the solution is unique and strictly interior.
pub fn vertex_oracle(t: &CombinatorialType, p: &PointConfiguration) -> Option<Vec<[R; 2]>> {
    let c = t.curve();
    let g = t.graph();
    let nv = g.vertex_count();
    let internal: Vec<usize> = (0..g.flag_count()).filter(|&f| g.glue(f) > f).collect();
    let on_edges: Vec<usize> = (0..t.n()).filter(|&i| !t.strata()[i].is_vertex()).collect();
    let cols = 2 * nv + internal.len() + on_edges.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut row = |entries: &[(usize, R)], rhs: R| {
        let mut r = vec![R::zero(); cols];
        for &(k, v) in entries {
            r[k] += v;
        }
        a.push(r);
        b.push(rhs);
    };
    let one = R::one();
    for (k, &f) in internal.iter().enumerate() {
        let (va, vb) = (g.boundary(f), g.boundary(g.glue(f)));
        let u = c.dir(f);
        let lcol = 2 * nv + k;
        for (axis, comp) in [u.x, u.y].into_iter().enumerate() {
            row(&[(2 * vb + axis, one), (2 * va + axis, -one), (lcol, R::from_integer(-(comp as i128)))], R::zero());
        }
    }
    let pts: Vec<[R; 2]> = p.points.iter().map(|[x, y]| [to_r(x), to_r(y)]).collect();
    for i in 0..t.n() {
        match t.strata()[i] {
            Stratum::Vertex(v) => {
                for axis in 0..2 {
                    row(&[(2 * v + axis, one)], pts[i][axis]);
                }
            }
            Stratum::Edge(f) => {
                let k = on_edges.iter().position(|&j| j == i).unwrap();
                let va = g.boundary(f);
                let u = c.dir(f);
                for (axis, comp) in [u.x, u.y].into_iter().enumerate() {
                    row(&[(2 * va + axis, one), (2 * nv + internal.len() + k, R::from_integer(comp as i128))], pts[i][axis]);
                }
            }
        }
    }
    if a.len() != cols {
        return None;
    }
    let x = solve_square(a, b)?;
    if (0..internal.len()).any(|k| !x[2 * nv + k].is_positive()) {
        return None;
    }
    for (k, &i) in on_edges.iter().enumerate() {
        let s = x[2 * nv + internal.len() + k];
        if !s.is_positive() {
            return None;
        }
        if let Stratum::Edge(f) = t.strata()[i] {
            if let Some(e) = internal.iter().position(|&j| j == f || g.glue(j) == f) {
                if s >= x[2 * nv + e] {
                    return None;
                }
            }
        }
    }
    Some((0..nv).map(|v| [x[2 * v], x[2 * v + 1]]).collect())
}

/// Product over vertices of |det| of two flag vectors (3-valent) or the
/// max over pairings (4-valent).
pub fn oracle_multiplicity(t: &CombinatorialType) -> u64 {
    let c = t.curve();
    let g = t.graph();
    let det = |a: LatticeVector, b: LatticeVector| (a.x * b.y - a.y * b.x).unsigned_abs();
    (0..g.vertex_count())
        .map(|v| {
            let vs: Vec<LatticeVector> = g.flags_at(v).iter().map(|&f| c.v(f)).collect();
            match vs.len() {
                3 => det(vs[0], vs[1]),
                4 => [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)]
                    .iter()
                    .map(|&(i, j, k, l)| det(vs[i], vs[j]) * det(vs[k], vs[l]))
                    .max()
                    .unwrap(),
                n => panic!("valence {n}"),
            }
        })
        .product()
}

/// Exhaustive search over flag choices for a removal leaving no loops and
/// at most one end per component.
pub fn brute_valid_marking(c: &DecoratedGraph, strata: &[Stratum]) -> bool {
    let g = &c.graph;
    let options: Vec<Vec<usize>> = strata
        .iter()
        .map(|s| match *s {
            Stratum::Edge(f) => vec![f],
            Stratum::Vertex(v) => g.flags_at(v).to_vec(),
        })
        .collect();
    let mut idx = vec![0; options.len()];
    loop {
        let removed: HashSet<usize> = idx.iter().zip(&options).map(|(&i, o)| o[i].min(g.glue(o[i]))).collect();
        if complement_ok(c, &removed) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return false;
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn complement_ok(c: &DecoratedGraph, removed: &HashSet<usize>) -> bool {
    let g = &c.graph;
    let nv = g.vertex_count();
    let mut comp: Vec<usize> = (0..nv).collect();
    fn find(comp: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while comp[r] != r {
            r = comp[r];
        }
        comp[x] = r;
        r
    }
    let mut kept_internal = Vec::new();
    for f in 0..g.flag_count() {
        let j = g.glue(f);
        if j > f && !removed.contains(&f) {
            kept_internal.push((g.boundary(f), g.boundary(j)));
            let (a, b) = (find(&mut comp, g.boundary(f)), find(&mut comp, g.boundary(j)));
            comp[a] = b;
        }
    }
    let roots: Vec<usize> = (0..nv).map(|v| find(&mut comp, v)).collect();
    let mut verts = vec![0usize; nv];
    let mut edges = vec![0usize; nv];
    let mut ends = vec![0usize; nv];
    for v in 0..nv {
        verts[roots[v]] += 1;
    }
    for (a, _) in kept_internal {
        edges[roots[a]] += 1;
    }
    for f in 0..g.flag_count() {
        if g.glue(f) == f && !removed.contains(&f) {
            ends[roots[g.boundary(f)]] += 1;
        }
    }
    (0..nv).filter(|&v| roots[v] == v).all(|r| edges[r] < verts[r] && ends[r] <= 1)
}

/// Cycle rank from a breadth-first spanning tree.
pub fn spanning_tree_genus(vertex_count: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![Vec::new(); vertex_count];
    for (k, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    let mut seen = vec![false; vertex_count];
    let mut tree = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                tree += 1;
                queue.push_back(w);
            }
        }
    }
    edges.len() - tree
}

/// Isomorphism by trying every vertex bijection and every vector-preserving
/// flag bijection at each vertex.
pub fn brute_isomorphic(a: &CombinatorialType, b: &CombinatorialType) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    let nv = ga.vertex_count();
    if nv != gb.vertex_count() || ga.flag_count() != gb.flag_count() || a.n() != b.n() {
        return false;
    }
    let mut perm: Vec<usize> = (0..nv).collect();
    let mut found = false;
    permutations(&mut perm, 0, &mut |sigma| {
        if !found && (0..nv).all(|v| ga.valence(v) == gb.valence(sigma[v])) {
            let mut phi = vec![usize::MAX; ga.flag_count()];
            found = flags_match(a, b, sigma, 0, &mut phi);
        }
    });
    found
}

fn flags_match(a: &CombinatorialType, b: &CombinatorialType, sigma: &[usize], v: usize, phi: &mut Vec<usize>) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    if v == ga.vertex_count() {
        let glue_ok = (0..ga.flag_count()).all(|f| phi[ga.glue(f)] == gb.glue(phi[f]));
        let marks_ok = (0..a.n()).all(|i| match (a.strata()[i], b.strata()[i]) {
            (Stratum::Vertex(x), Stratum::Vertex(y)) => sigma[x] == y,
            (Stratum::Edge(e), Stratum::Edge(f)) => {
                let m = phi[e];
                m == f || gb.glue(m) == f
            }
            _ => false,
        });
        return glue_ok && marks_ok;
    }
    let fa = ga.flags_at(v).to_vec();
    let mut fb = gb.flags_at(sigma[v]).to_vec();
    let mut ok = false;
    permutations(&mut fb, 0, &mut |order| {
        if ok || fa.iter().zip(order).any(|(&x, &y)| a.curve().v(x) != b.curve().v(y)) {
            return;
        }
        for (&x, &y) in fa.iter().zip(order) {
            phi[x] = y;
        }
        ok = flags_match(a, b, sigma, v + 1, phi);
    });
    ok
}

fn permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, f);
        items.swap(k, i);
    }
}

/// The 4-valent wall with ends (−1,0), (−1,−2), (0,1), (2,1), all but
/// end `free` marked.
pub fn four_valent_wall(free: usize) -> CombinatorialType {
    let vs = [lv(-1, 0), lv(-1, -2), lv(0, 1), lv(2, 1)];
    let g = build_graph(1, &[(0, 0), (1, 0), (2, 0), (3, 0)], &[]).unwrap();
    let c = DecoratedGraph::validated(g, &vs).unwrap();
    let strata = (0..4).filter(|&f| f != free).map(Stratum::Edge).collect();
    let degree = Degree::new(vs).unwrap();
    CombinatorialType::new(Arc::new(c), MarkingMap::new(strata), 0, Arc::new(degree)).unwrap()
}

/// Genus 3, degree (−4,−2)⊕(4,−2)⊕(0,4): a triangle with a trivalent centre,
/// three 4-valent corners, marks on the three corners and two spokes.
pub fn codim_six_fixture() -> CombinatorialType {
    // Vertices: 0 centre, 1 = A, 2 = B, 3 = C.
    // Flags: ends 0,1,2; spokes (3,4),(5,6),(7,8); sides AB (9,10), BC (11,12), CA (13,14).
    let assign = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 1), (5, 0), (6, 2), (7, 0), (8, 3), (9, 1), (10, 2), (11, 2), (12, 3), (13, 3), (14, 1)];
    let glue = [(3, 4), (5, 6), (7, 8), (9, 10), (11, 12), (13, 14)];
    let g = build_graph(4, &assign, &glue).unwrap();
    let v = [
        lv(-4, -2),
        lv(4, -2),
        lv(0, 4),
        lv(-2, -1),
        lv(2, 1),
        lv(2, -1),
        lv(-2, 1),
        lv(0, 2),
        lv(0, -2),
        lv(1, 0),
        lv(-1, 0),
        lv(-1, 1),
        lv(1, -1),
        lv(-1, -1),
        lv(1, 1),
    ];
    let c = DecoratedGraph::validated(g, &v).unwrap();
    let strata = vec![Stratum::Vertex(1), Stratum::Vertex(2), Stratum::Vertex(3), Stratum::Edge(3), Stratum::Edge(5)];
    let degree = Degree::new([lv(-4, -2), lv(4, -2), lv(0, 4)]).unwrap();
    CombinatorialType::new(Arc::new(c), MarkingMap::new(strata), 3, Arc::new(degree)).unwrap()
}

/// The degree (−2,0)⊕(0,−1)²⊕(1,1)².
pub fn non_primitive_degree() -> Degree {
    Degree::new([lv(-2, 0), lv(0, -1), lv(0, -1), lv(1, 1), lv(1, 1)]).unwrap()
}
