//! Frozen values checked against oracles that share no code with the
//! library's solver, search, multiplicity or canonical forms.

mod common;

use common::*;
use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use tropcount::counting::{random_configuration, Counter, WallPolicy};
use tropcount::curve::{is_valid_marking, DecoratedGraph, MarkingMap, Stratum};
use tropcount::graph::build_graph;
use tropcount::solver::AffineSystem;
use tropcount::types::{enumerate_types, labelings, relabel};
use tropcount::{CombinatorialType, Degree, PointConfiguration};

#[test]
fn kontsevich_numbers() {
    assert_eq!(kontsevich(5), vec![1, 1, 12, 620, 87304]);
}

/// Sum over every labeled codim-0 type of the oracle multiplicity of its
/// vertex-coordinate solution.
fn oracle_count(genus: usize, degree: &Degree, p: &PointConfiguration) -> (u64, BTreeSet<String>) {
    let cat = enumerate_types(genus, degree, 0).unwrap();
    let mut total = 0;
    let mut keys = BTreeSet::new();
    for e in cat.entries.iter().filter(|e| e.codim == 0) {
        for t in labelings(&e.ty) {
            if vertex_oracle(&t, p).is_some() {
                total += oracle_multiplicity(&t);
                keys.insert(t.key().to_string());
            }
        }
    }
    (total, keys)
}

#[test]
fn line_and_conic_match_the_vertex_oracle() {
    for (d, seeds) in [(1usize, 0..6u64), (2, 0..3)] {
        let degree = Degree::projective(d);
        let counter = Counter::new(0, &degree).unwrap();
        for seed in seeds {
            let p = random_configuration(counter.n(), 10, seed);
            let r = counter.count(&p, WallPolicy::Reject).unwrap();
            let (n, keys) = oracle_count(0, &degree, &p);
            assert_eq!(r.total, n, "degree {d} seed {seed}");
            assert_eq!(n as i128, kontsevich(d)[d - 1]);
            let found: BTreeSet<String> = r.curves.iter().map(|c| c.key.to_string()).collect();
            assert_eq!(found, keys);
            for c in &r.curves {
                assert_eq!(c.multiplicity, oracle_multiplicity(&c.ty));
            }
        }
    }
}

#[test]
fn cubic_count_matches_kontsevich() {
    let counter = Counter::new(0, &Degree::projective(3)).unwrap();
    let p = random_configuration(8, 24, 11);
    let r = counter.count(&p, WallPolicy::Reject).unwrap();
    assert_eq!(r.total as i128, kontsevich(3)[2]);
    for c in &r.curves {
        assert_eq!(c.multiplicity, oracle_multiplicity(&c.ty));
        assert!(vertex_oracle(&c.ty, &p).is_some(), "oracle rejects a reported curve");
    }
}

#[test]
fn nine_points_fix_one_cubic() {
    // Cubic forms span 10 dimensions; 9 general conditions leave a pencil of
    // dimension zero, so exactly one cubic passes through them.
    let p = random_configuration(9, 20, 4);
    assert_eq!(monomial_rank(3, &p.points), 9);
}

#[test]
fn line_catalog_by_brute_force() {
    let g = build_graph(1, &[(0, 0), (1, 0), (2, 0)], &[]).unwrap();
    let c = DecoratedGraph::validated(g, &[lv(-1, 0), lv(0, -1), lv(1, 1)]).unwrap();
    let strata = [Stratum::Vertex(0), Stratum::Edge(0), Stratum::Edge(1), Stratum::Edge(2)];
    let degree = Arc::new(Degree::projective(1));
    let mut classes: Vec<CombinatorialType> = Vec::new();
    for a in strata {
        for b in strata {
            let s = [a, b];
            if s.iter().any(|x| x.is_vertex()) || !brute_valid_marking(&c, &s) {
                continue;
            }
            let t = CombinatorialType::new(Arc::new(c.clone()), MarkingMap::new(s.to_vec()), 0, degree.clone()).unwrap();
            if !classes.iter().any(|u| brute_isomorphic(u, &t)) {
                classes.push(t);
            }
        }
    }
    assert_eq!(classes.len(), 6);
    let cat = enumerate_types(0, &Degree::projective(1), 0).unwrap();
    let catalog_keys: HashSet<_> = cat.entries.iter().flat_map(|e| labelings(&e.ty)).map(|t| t.key()).collect();
    let brute_keys: HashSet<_> = classes.iter().map(|t| t.key()).collect();
    assert_eq!(catalog_keys, brute_keys);
}

#[test]
fn marking_test_agrees_with_exhaustive_search() {
    let mut checked = 0;
    for (g, d) in [(0, 2), (1, 3)] {
        let cat = enumerate_types(g, &Degree::projective(d), 0).unwrap();
        for (k, e) in cat.entries.iter().enumerate().step_by(97).take(60) {
            let c = e.ty.curve();
            let graph = &c.graph;
            let mut strata: Vec<Stratum> = (0..graph.vertex_count()).map(Stratum::Vertex).collect();
            strata.extend(graph.edges().iter().map(|x| Stratum::Edge(x.flag)));
            // A deterministic spread of markings, valid and invalid.
            for shift in 0..8 {
                let s: Vec<Stratum> =
                    (0..e.ty.n()).map(|i| strata[(k * 7 + i * (shift + 2) + shift) % strata.len()]).collect();
                let fast = is_valid_marking(c, &MarkingMap::new(s.clone())).is_some();
                assert_eq!(fast, brute_valid_marking(c, &s), "marking {s:?}");
                checked += 1;
            }
            assert!(brute_valid_marking(c, e.ty.strata()));
        }
    }
    assert!(checked > 100);
}

#[test]
fn keys_agree_with_brute_force_isomorphism() {
    let cat = enumerate_types(0, &Degree::projective(2), 0).unwrap();
    let sample: Vec<&CombinatorialType> = cat.entries.iter().step_by(11).map(|e| &e.ty).collect();
    let mut pairs = 0;
    for t in sample.iter().take(12) {
        let labeled = labelings(t);
        // Every permutation of the marks lands in exactly one listed labeling.
        let mut perm: Vec<usize> = (0..t.n()).collect();
        let mut all = Vec::new();
        heap_permutations(&mut perm, t.n(), &mut |p| {
            all.push(t.with_marking(MarkingMap::new(p.iter().map(|&i| t.strata()[i]).collect())));
        });
        let mut classes: Vec<&CombinatorialType> = Vec::new();
        for u in &all {
            if !classes.iter().any(|c| brute_isomorphic(c, u)) {
                classes.push(u);
            }
        }
        assert_eq!(classes.len(), labeled.len());
        for (i, a) in labeled.iter().enumerate().take(6) {
            for b in labeled.iter().skip(i) {
                assert_eq!(a.key() == b.key(), brute_isomorphic(a, b));
                pairs += 1;
            }
            // Renumbering vertices and flags keeps the key.
            let nv = a.graph().vertex_count();
            let nf = a.graph().flag_count();
            let vo: Vec<usize> = (0..nv).rev().collect();
            let fo: Vec<usize> = (0..nf).map(|f| (f * 5 + 3) % nf).collect();
            if (0..nf).map(|f| (f * 5 + 3) % nf).collect::<HashSet<_>>().len() == nf {
                let r = relabel(a, &vo, &fo);
                assert!(brute_isomorphic(a, &r));
                assert_eq!(a.key(), r.key());
            }
        }
    }
    // Distinct shapes are never isomorphic.
    for (i, a) in sample.iter().enumerate().take(15) {
        for b in sample.iter().skip(i + 1).take(15) {
            assert_eq!(a.key() == b.key(), brute_isomorphic(a, b));
        }
    }
    assert!(pairs > 50);
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, f);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

#[test]
fn stratum_dimension_by_independent_rank() {
    // dim = 2 + #internal + #edge marks − rank of the loop rows, with the
    // loop rows rebuilt here from a spanning tree.
    for (g, d) in [(0, 2), (1, 3)] {
        let cat = enumerate_types(g, &Degree::projective(d), 1).unwrap();
        for e in cat.entries.iter().step_by(211).take(40) {
            let t = &e.ty;
            let graph = t.graph();
            let internal: Vec<usize> = (0..graph.flag_count()).filter(|&f| graph.glue(f) > f).collect();
            let mut rows = Vec::new();
            for cycle in fundamental_cycles(t) {
                for axis in 0..2 {
                    rows.push(
                        internal
                            .iter()
                            .map(|f| {
                                let s = cycle.iter().find(|c| c.0 == *f).map_or(0, |c| c.1);
                                let u = t.curve().dir(*f);
                                R::from_integer((s * if axis == 0 { u.x } else { u.y }) as i128)
                            })
                            .collect::<Vec<_>>(),
                    );
                }
            }
            let r = if rows.is_empty() { 0 } else { monomial_free_rank(rows) };
            let marks_on_edges = t.strata().iter().filter(|s| !s.is_vertex()).count();
            let dim = 2 + internal.len() + marks_on_edges - r;
            assert_eq!(dim, t.stratum_dimension());
            assert_eq!(dim, AffineSystem::build(t).stratum_dimension());
        }
    }
    let t = codim_six_fixture();
    assert_eq!(t.stratum_dimension(), 5);
}

fn monomial_free_rank(mut rows: Vec<Vec<R>>) -> usize {
    use num_traits::Zero;
    let cols = rows[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c] / rows[r][c];
                for k in c..cols {
                    let s = f * rows[r][k];
                    rows[i][k] -= s;
                }
            }
        }
        r += 1;
    }
    r
}

/// Signed internal-edge sequences (representative flag, ±1) of the
/// fundamental cycles of a breadth-first spanning tree.
fn fundamental_cycles(t: &CombinatorialType) -> Vec<Vec<(usize, i64)>> {
    let g = t.graph();
    let nv = g.vertex_count();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv];
    let mut seen = vec![false; nv];
    let mut tree = HashSet::new();
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &f in g.flags_at(v) {
            let j = g.glue(f);
            if j == f {
                continue;
            }
            let w = g.boundary(j);
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, f));
                tree.insert(f.min(j));
                queue.push_back(w);
            }
        }
    }
    // Path from the root to v as signed edges, oriented root→v.
    let path = |mut v: usize| {
        let mut p = Vec::new();
        while let Some((u, f)) = parent[v] {
            let rep = f.min(g.glue(f));
            p.push((rep, if rep == f { 1 } else { -1 }));
            v = u;
        }
        p
    };
    let mut cycles = Vec::new();
    for f in 0..g.flag_count() {
        let j = g.glue(f);
        if j <= f || tree.contains(&f) {
            continue;
        }
        // root→∂f, then f, then ∂j→root.
        let mut c: Vec<(usize, i64)> = path(g.boundary(f));
        c.push((f, 1));
        c.extend(path(g.boundary(j)).into_iter().map(|(e, s)| (e, -s)));
        let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
        for (e, s) in c {
            *acc.entry(e).or_default() += s;
        }
        cycles.push(acc.into_iter().filter(|x| x.1 != 0).collect());
    }
    cycles
}
