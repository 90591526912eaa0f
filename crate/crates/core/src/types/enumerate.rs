//! Finite enumeration of combinatorial types for a (g, Δ) context.
//!
//! Unmarked curves are built from planted trees over sub-multisets of Δ
//! (genus 0) or from a cycle with planted trees attached (genus 1). Edge
//! vectors are forced by balancing except the cycle offset w₀, which is a
//! convex combination of the cycle's prefix sums whenever the cycle closes,
//! so only lattice points of their bounding box are tried.
//!
//! Markings are generated from the minimal admissible cut sets: an acyclic
//! set F of kept internal edges whose components each touch an end, and one
//! kept end per component. Every admissible marking covers such a set.

use super::canonical::{canonical_form, has_symmetry, key_digest, MarkMode};
use super::{relabel_parts, CombinatorialType, TypeError};
use crate::curve::{minimum_marks, Degree, DecoratedGraph, MarkingMap, Stratum};
use crate::graph::{Graph, UnionFind};
use crate::lattice::{spans_plane, LatticeVector};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct EnumerationOptions {
    pub max_codim: usize,
    /// Upper bound on generated candidates before giving up.
    pub node_budget: usize,
    /// Also list exceptional types when `max_codim < 2`.
    pub include_exceptional: bool,
}

impl EnumerationOptions {
    pub fn new(max_codim: usize) -> Self {
        EnumerationOptions { max_codim, node_budget: 50_000_000, include_exceptional: true }
    }
}

/// One unlabeled shape; the stored type carries marks 0..n in slot order.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub ty: CombinatorialType,
    pub codim: usize,
    pub dim: usize,
    pub exceptional: bool,
    /// Index of the unmarked curve this shape decorates.
    pub curve_index: usize,
}

#[derive(Clone, Debug)]
pub struct TypeCatalog {
    pub genus: usize,
    pub degree: Arc<Degree>,
    pub max_codim: usize,
    /// Σ ‖v‖∞ over Δ; every edge vector obeys ‖v‖∞ ≤ bound.
    pub bound: u64,
    pub entries: Vec<CatalogEntry>,
}

impl TypeCatalog {
    pub fn by_codim(&self, c: usize) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(move |e| e.codim == c && !e.exceptional)
    }

    pub fn walls(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.codim == 1 || e.exceptional)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of marked points.
    pub fn n(&self) -> usize {
        minimum_marks(&self.degree, self.genus)
    }
}

/// All labeled types sharing the shape of `t`, one per isomorphism class.
pub fn labelings(t: &CombinatorialType) -> Vec<CombinatorialType> {
    fn rec(rest: &mut Vec<Stratum>, cur: &mut Vec<Stratum>, seen: &mut HashSet<Vec<Stratum>>) {
        if rest.is_empty() {
            seen.insert(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            if rest[..i].contains(&rest[i]) {
                continue;
            }
            let s = rest.remove(i);
            cur.push(s);
            rec(rest, cur, seen);
            cur.pop();
            rest.insert(i, s);
        }
    }
    let mut seen = HashSet::new();
    rec(&mut t.strata().to_vec(), &mut Vec::new(), &mut seen);
    let mut orders: Vec<Vec<Stratum>> = seen.into_iter().collect();
    orders.sort_unstable();
    let mut keys = HashSet::new();
    orders
        .into_iter()
        .map(|s| t.with_marking(MarkingMap::new(s)))
        .filter(|u| keys.insert(u.key()))
        .collect()
}

#[derive(Debug)]
struct Planted {
    sum: LatticeVector,
    excess: usize,
    node: Node,
}

#[derive(Debug)]
enum Node {
    Leaf(usize),
    Inner(Vec<Rc<Planted>>),
}

type Counts = Vec<u8>;

struct Generator {
    classes: Vec<LatticeVector>,
    max_excess: usize,
    trees: HashMap<Counts, Rc<Vec<Rc<Planted>>>>,
    attachments: HashMap<Counts, Rc<Vec<(Vec<Rc<Planted>>, usize)>>>,
    budget: usize,
    used: usize,
}

fn code(c: &[u8], radix: &[u8]) -> u64 {
    c.iter().zip(radix).fold(0u64, |acc, (&x, &r)| acc * (r as u64 + 1) + x as u64)
}

/// All sub-multisets of `c`, including empty and full.
fn submultisets(c: &[u8]) -> Vec<Counts> {
    let mut out = vec![Vec::new()];
    for &k in c {
        out = out
            .into_iter()
            .flat_map(|p| (0..=k).map(move |x| {
                let mut q = p.clone();
                q.push(x);
                q
            }))
            .collect();
    }
    out
}

fn size(c: &[u8]) -> usize {
    c.iter().map(|&x| x as usize).sum()
}

fn minus(a: &[u8], b: &[u8]) -> Counts {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Unordered partitions of `c` into `k` nonempty parts, parts in
/// non-decreasing code order.
fn partitions(c: &[u8], k: usize, radix: &[u8]) -> Vec<Vec<Counts>> {
    fn rec(rest: &[u8], k: usize, min: u64, radix: &[u8], cur: &mut Vec<Counts>, out: &mut Vec<Vec<Counts>>) {
        if k == 1 {
            if code(rest, radix) >= min {
                cur.push(rest.to_vec());
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let total = size(rest);
        for p in submultisets(rest) {
            let s = size(&p);
            if s == 0 || total - s < k - 1 {
                continue;
            }
            let cp = code(&p, radix);
            if cp < min {
                continue;
            }
            let r = minus(rest, &p);
            if code(&r, radix) < cp {
                continue;
            }
            cur.push(p);
            rec(&r, k - 1, cp, radix, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(c, k, 0, radix, &mut Vec::new(), &mut out);
    out
}

impl Generator {
    fn new(delta: &Degree, max_excess: usize, budget: usize) -> Self {
        Generator {
            classes: delta.entries().iter().map(|e| e.0).collect(),
            max_excess,
            trees: HashMap::new(),
            attachments: HashMap::new(),
            budget,
            used: 0,
        }
    }

    fn tick(&mut self, k: usize) -> Result<(), TypeError> {
        self.used += k;
        if self.used > self.budget {
            return Err(TypeError::EnumerationBudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn sum(&self, c: &[u8]) -> LatticeVector {
        c.iter().zip(&self.classes).map(|(&k, &v)| (k as i64) * v).sum()
    }

    /// Choices of one planted tree per part, identical parts in
    /// non-decreasing tree order, within an excess budget.
    fn combos(&mut self, parts: &[Counts], budget: usize) -> Vec<(Vec<Rc<Planted>>, usize)> {
        let lists: Vec<Rc<Vec<Rc<Planted>>>> = parts.iter().map(|p| self.trees_over(p)).collect();
        let mut out = Vec::new();
        fn rec(
            i: usize,
            parts: &[Counts],
            lists: &[Rc<Vec<Rc<Planted>>>],
            budget: usize,
            min_idx: usize,
            cur: &mut Vec<Rc<Planted>>,
            cur_idx: &mut Vec<usize>,
            spent: usize,
            out: &mut Vec<(Vec<Rc<Planted>>, usize)>,
        ) {
            if i == parts.len() {
                out.push((cur.clone(), spent));
                return;
            }
            let start = if i > 0 && parts[i] == parts[i - 1] { min_idx } else { 0 };
            for (j, t) in lists[i].iter().enumerate().skip(start) {
                if spent + t.excess > budget {
                    continue;
                }
                cur.push(t.clone());
                cur_idx.push(j);
                rec(i + 1, parts, lists, budget, j, cur, cur_idx, spent + t.excess, out);
                cur.pop();
                cur_idx.pop();
            }
        }
        rec(0, parts, &lists, budget, 0, &mut Vec::new(), &mut Vec::new(), 0, &mut out);
        out
    }

    fn trees_over(&mut self, c: &[u8]) -> Rc<Vec<Rc<Planted>>> {
        if let Some(t) = self.trees.get(c) {
            return t.clone();
        }
        let total = size(c);
        let sum = self.sum(c);
        let mut result = Vec::new();
        if sum.is_zero() {
            // A planted tree needs a nonzero stem.
        } else if total == 1 {
            let class = c.iter().position(|&x| x == 1).unwrap();
            result.push(Rc::new(Planted { sum, excess: 0, node: Node::Leaf(class) }));
        } else {
            let radix: Vec<u8> = c.to_vec();
            for k in 2..=total.min(2 + self.max_excess) {
                for parts in partitions(c, k, &radix) {
                    for (children, spent) in self.combos(&parts, self.max_excess - (k - 2)) {
                        let mut vs: Vec<LatticeVector> = children.iter().map(|t| t.sum).collect();
                        let ok = if k == 2 { vs[0].det(vs[1]) != 0 } else {
                            vs.push(-sum);
                            spans_plane(&vs)
                        };
                        if ok {
                            result.push(Rc::new(Planted { sum, excess: spent + k - 2, node: Node::Inner(children) }));
                        }
                    }
                }
            }
        }
        let rc = Rc::new(result);
        self.trees.insert(c.to_vec(), rc.clone());
        rc
    }

    /// Ways to hang planted trees over `c` from one cycle vertex.
    fn attachments_over(&mut self, c: &[u8]) -> Rc<Vec<(Vec<Rc<Planted>>, usize)>> {
        if let Some(a) = self.attachments.get(c) {
            return a.clone();
        }
        let total = size(c);
        let radix: Vec<u8> = c.to_vec();
        let mut out = Vec::new();
        for a in 1..=total.min(1 + self.max_excess) {
            for parts in partitions(c, a, &radix) {
                for (ts, spent) in self.combos(&parts, self.max_excess - (a - 1)) {
                    out.push((ts, spent + a - 1));
                }
            }
        }
        let rc = Rc::new(out);
        self.attachments.insert(c.to_vec(), rc.clone());
        rc
    }
}

/// Incremental builder for decorated graphs.
#[derive(Default)]
struct Builder {
    vertices: usize,
    boundary: Vec<usize>,
    glue: Vec<usize>,
    v: Vec<LatticeVector>,
}

impl Builder {
    fn vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    fn end(&mut self, at: usize, v: LatticeVector) {
        let f = self.boundary.len();
        self.boundary.push(at);
        self.glue.push(f);
        self.v.push(v);
    }

    fn edge(&mut self, a: usize, b: usize, v: LatticeVector) {
        let f = self.boundary.len();
        self.boundary.extend([a, b]);
        self.glue.extend([f + 1, f]);
        self.v.extend([v, -v]);
    }

    fn plant(&mut self, at: usize, t: &Planted, classes: &[LatticeVector]) {
        match &t.node {
            Node::Leaf(c) => self.end(at, classes[*c]),
            Node::Inner(children) => {
                let w = self.vertex();
                self.edge(at, w, t.sum);
                for ch in children {
                    self.plant(w, ch, classes);
                }
            }
        }
    }

    fn finish(self) -> DecoratedGraph {
        let g = Graph::from_maps(self.vertices, self.boundary, self.glue).expect("builder output is a valid graph");
        DecoratedGraph::from_vectors(g, &self.v).expect("builder output is a valid curve")
    }
}

/// True if some strictly positive combination of the vectors vanishes.
pub(crate) fn cycle_closes(ws: &[LatticeVector]) -> bool {
    for &w in ws {
        for s in [1i64, -1] {
            if ws.iter().all(|&x| s * w.det(x) >= 0) {
                // All in a closed half-plane bounded by the line through w.
                return ws.iter().all(|&x| w.det(x) == 0) && ws.iter().any(|&x| w.dot(x) < 0);
            }
        }
    }
    true
}

/// Unmarked curve with its valence excess and genus.
struct Unmarked {
    curve: Arc<DecoratedGraph>,
    excess: usize,
    genus: usize,
}

fn excess_of(c: &DecoratedGraph) -> usize {
    (0..c.graph.vertex_count()).map(|v| c.graph.valence(v) - 3).sum()
}

fn genus0_curves(delta: &Degree, max_excess: usize, budget: usize) -> Result<Vec<DecoratedGraph>, TypeError> {
    if delta.size() < 3 {
        return Ok(vec![]);
    }
    let mut gen = Generator::new(delta, max_excess, budget);
    let mut c: Counts = delta.entries().iter().map(|e| e.1 as u8).collect();
    c[0] -= 1;
    let root = gen.classes[0];
    let tops = gen.trees_over(&c);
    gen.tick(tops.len())?;
    let mut out = Vec::new();
    for t in tops.iter() {
        let Node::Inner(children) = &t.node else { continue };
        let mut b = Builder::default();
        let r = b.vertex();
        b.end(r, root);
        for ch in children {
            b.plant(r, ch, &gen.classes);
        }
        out.push(b.finish());
    }
    Ok(out)
}

fn genus1_curves(delta: &Degree, max_excess: usize, budget: usize) -> Result<Vec<DecoratedGraph>, TypeError> {
    let mut gen = Generator::new(delta, max_excess, budget);
    let full: Counts = delta.entries().iter().map(|e| e.1 as u8).collect();
    // Ordered compositions into cycle groups, the first holding class 0.
    let mut compositions: Vec<Vec<Counts>> = Vec::new();
    fn comp(rest: &[u8], cur: &mut Vec<Counts>, out: &mut Vec<Vec<Counts>>) {
        if size(rest) == 0 {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for p in submultisets(rest) {
            if size(&p) == 0 || (cur.is_empty() && p[0] == 0) {
                continue;
            }
            let r = minus(rest, &p);
            cur.push(p);
            comp(&r, cur, out);
            cur.pop();
        }
    }
    comp(&full, &mut Vec::new(), &mut compositions);
    let mut out = Vec::new();
    for groups in compositions {
        let k = groups.len();
        let sums: Vec<LatticeVector> = groups.iter().map(|g| gen.sum(g)).collect();
        let atts: Vec<Rc<Vec<(Vec<Rc<Planted>>, usize)>>> = groups.iter().map(|g| gen.attachments_over(g)).collect();
        if atts.iter().any(|a| a.is_empty()) {
            continue;
        }
        // Prefix sums P_i = T_1 + … + T_i; w_i = w_0 − P_i.
        let mut prefix = vec![LatticeVector::ZERO];
        for s in &sums[1..] {
            let last = *prefix.last().unwrap();
            prefix.push(last + *s);
        }
        let (x0, x1) = (prefix.iter().map(|p| p.x).min().unwrap(), prefix.iter().map(|p| p.x).max().unwrap());
        let (y0, y1) = (prefix.iter().map(|p| p.y).min().unwrap(), prefix.iter().map(|p| p.y).max().unwrap());
        let mut choice = vec![0usize; k];
        loop {
            let spent: usize = (0..k).map(|i| atts[i][choice[i]].1).sum();
            if spent <= max_excess {
                gen.tick(1)?;
                for wx in x0..=x1 {
                    for wy in y0..=y1 {
                        let w0 = LatticeVector::new(wx, wy);
                        let ws: Vec<LatticeVector> = prefix.iter().map(|&p| w0 - p).collect();
                        if ws.iter().any(|w| w.is_zero()) || !cycle_closes(&ws) {
                            continue;
                        }
                        let ok = (0..k).all(|i| {
                            let mut vs = vec![ws[i], -ws[(i + k - 1) % k]];
                            vs.extend(atts[i][choice[i]].0.iter().map(|t| t.sum));
                            if vs.len() == 3 {
                                vs[0].det(vs[1]) != 0
                            } else {
                                spans_plane(&vs)
                            }
                        });
                        if !ok {
                            continue;
                        }
                        let mut b = Builder::default();
                        let cyc: Vec<usize> = (0..k).map(|_| b.vertex()).collect();
                        for i in 0..k {
                            b.edge(cyc[i], cyc[(i + 1) % k], ws[i]);
                        }
                        for i in 0..k {
                            for t in &atts[i][choice[i]].0 {
                                b.plant(cyc[i], t, &gen.classes);
                            }
                        }
                        out.push(b.finish());
                    }
                }
            }
            // Odometer over attachment choices.
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                choice[i] += 1;
                if choice[i] < atts[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(out)
}

/// Unmarked curves of genus h and valence excess ≤ max_excess, up to
/// isomorphism, in canonical numbering and sorted by key.
fn unmarked_curves(delta: &Degree, h: usize, max_excess: usize, budget: usize) -> Result<Vec<Unmarked>, TypeError> {
    let raw = match h {
        0 => genus0_curves(delta, max_excess, budget)?,
        1 => genus1_curves(delta, max_excess, budget)?,
        _ => return Err(TypeError::Unsupported(format!("enumeration of curves of genus {h}"))),
    };
    let mut seen: BTreeMap<Vec<i32>, Unmarked> = BTreeMap::new();
    for c in raw {
        let cf = canonical_form(&c, &[], MarkMode::None);
        if seen.contains_key(&cf.key) {
            continue;
        }
        let (canon, _) = relabel_parts(&c, &[], &cf.vertex_order, &cf.flag_order);
        let excess = excess_of(&canon);
        seen.insert(cf.key, Unmarked { curve: Arc::new(canon), excess, genus: h });
    }
    Ok(seen.into_values().collect())
}

/// Minimal admissible cut sets, as sorted edge ids.
fn minimal_cut_sets(g: &Graph) -> Vec<Vec<usize>> {
    let internal: Vec<usize> = g.internal_edges().iter().map(|e| e.flag).collect();
    let ends: Vec<usize> = g.ends().iter().map(|e| e.flag).collect();
    let nv = g.vertex_count();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << internal.len()) {
        let mut uf = UnionFind::new(nv);
        let mut acyclic = true;
        for (i, &e) in internal.iter().enumerate() {
            if mask & (1 << i) != 0 && !uf.union(g.boundary(e), g.boundary(g.glue(e))) {
                acyclic = false;
                break;
            }
        }
        if !acyclic {
            continue;
        }
        let mut comp_ends: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &e in &ends {
            comp_ends.entry(uf.find(g.boundary(e))).or_default().push(e);
        }
        let roots: HashSet<usize> = (0..nv).map(|v| uf.find(v)).collect();
        if roots.len() != comp_ends.len() {
            continue;
        }
        let removed_internal: Vec<usize> =
            internal.iter().enumerate().filter(|(i, _)| mask & (1 << i) == 0).map(|(_, &e)| e).collect();
        let groups: Vec<&Vec<usize>> = comp_ends.values().collect();
        let mut pick = vec![0usize; groups.len()];
        loop {
            let kept: HashSet<usize> = groups.iter().zip(&pick).map(|(g, &i)| g[i]).collect();
            let mut r = removed_internal.clone();
            r.extend(ends.iter().filter(|e| !kept.contains(e)));
            r.sort_unstable();
            out.push(r);
            let mut i = 0;
            while i < groups.len() {
                pick[i] += 1;
                if pick[i] < groups[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == groups.len() {
                break;
            }
        }
    }
    out
}

fn endpoints(g: &Graph, e: usize) -> Vec<usize> {
    let a = g.boundary(e);
    match g.neighbor(e) {
        Some(b) => vec![a, b],
        None => vec![a],
    }
}

/// Markings of an unmarked curve with codimension within budget.
fn markings(u: &Unmarked, g: usize, max_codim: usize, include_exceptional: bool, exceptional_curve: bool) -> Vec<Vec<Stratum>> {
    let graph = &u.curve.graph;
    let d = g - u.genus;
    let base = u.excess + d;
    let allow_exceptional = include_exceptional && exceptional_curve && d == 0 && u.excess == 2;
    let max_b = if allow_exceptional { max_codim.saturating_sub(base) } else {
        if base > max_codim {
            return vec![];
        }
        max_codim - base
    };
    if base > max_codim && !allow_exceptional {
        return vec![];
    }
    let all_edges: Vec<usize> = graph.edges().iter().map(|e| e.flag).collect();
    let mut seen: HashSet<Vec<Stratum>> = HashSet::new();
    for r in minimal_cut_sets(graph) {
        // Each element of R is covered by an edge mark or a vertex mark at an endpoint.
        let mut partial: Vec<(Vec<Stratum>, usize)> = vec![(Vec::new(), 0)];
        for &e in &r {
            let mut next = Vec::new();
            for (s, b) in &partial {
                let mut s1 = s.clone();
                s1.push(Stratum::Edge(e));
                next.push((s1, *b));
                if b + 1 <= max_b {
                    for v in endpoints(graph, e) {
                        let mut s2 = s.clone();
                        s2.push(Stratum::Vertex(v));
                        next.push((s2, b + 1));
                    }
                }
            }
            partial = next;
        }
        for (s, b) in partial {
            let mut extras: Vec<(Vec<Stratum>, usize)> = vec![(s, b)];
            for _ in 0..d {
                let mut next = Vec::new();
                for (s, b) in &extras {
                    for &e in &all_edges {
                        let mut s1 = s.clone();
                        s1.push(Stratum::Edge(e));
                        next.push((s1, *b));
                    }
                    if b + 1 <= max_b {
                        for v in 0..graph.vertex_count() {
                            let mut s2 = s.clone();
                            s2.push(Stratum::Vertex(v));
                            next.push((s2, b + 1));
                        }
                    }
                }
                extras = next;
            }
            for (mut s, b) in extras {
                if b < d {
                    continue;
                }
                let codim = base + b;
                if codim > max_codim && !(allow_exceptional && b == 0) {
                    continue;
                }
                s.sort_unstable();
                seen.insert(s);
            }
        }
    }
    let mut all: Vec<Vec<Stratum>> = seen.into_iter().collect();
    all.sort_unstable();
    if !has_symmetry(&u.curve, &[], MarkMode::None) {
        return all;
    }
    // Keep the smallest marking in each orbit of the automorphism group.
    let mut orbit_rep: HashMap<Vec<i32>, Vec<Stratum>> = HashMap::new();
    for s in all {
        let key = canonical_form(&u.curve, &s, MarkMode::Unlabeled).key;
        orbit_rep.entry(key).or_insert(s);
    }
    let mut reps: Vec<Vec<Stratum>> = orbit_rep.into_values().collect();
    reps.sort_unstable();
    reps
}

fn is_exceptional_curve(c: &DecoratedGraph) -> bool {
    let g = &c.graph;
    (0..g.vertex_count()).filter(|&v| g.valence(v) == 4).any(|a| {
        let mut count: HashMap<usize, usize> = HashMap::new();
        for &f in g.flags_at(a) {
            if let Some(b) = g.neighbor(f) {
                if g.valence(b) == 4 {
                    *count.entry(b).or_default() += 1;
                }
            }
        }
        count.values().any(|&k| k == 2)
    })
}

/// Every type of codimension ≤ max_codim (and every exceptional type) up to
/// isomorphism, as unlabeled shapes.
pub fn enumerate_types(genus: usize, delta: &Degree, max_codim: usize) -> Result<TypeCatalog, TypeError> {
    enumerate_types_with(genus, delta, &EnumerationOptions::new(max_codim))
}

pub fn enumerate_types_with(genus: usize, delta: &Degree, opts: &EnumerationOptions) -> Result<TypeCatalog, TypeError> {
    let mut entries = Vec::new();
    for_each_type(genus, delta, opts, |e| entries.push(e))?;
    entries.sort_by(|a, b| {
        (a.codim, a.exceptional, a.curve_index, a.ty.strata()).cmp(&(b.codim, b.exceptional, b.curve_index, b.ty.strata()))
    });
    let degree = entries.first().map_or_else(|| Arc::new(delta.clone()), |e| e.ty.degree_arc().clone());
    Ok(TypeCatalog { genus, degree, max_codim: opts.max_codim, bound: delta.direction_bound(), entries })
}

/// Streams the catalog entries, grouped by unmarked curve, without storing them.
pub fn for_each_type(
    genus: usize,
    delta: &Degree,
    opts: &EnumerationOptions,
    mut visit: impl FnMut(CatalogEntry),
) -> Result<(), TypeError> {
    let degree = Arc::new(delta.clone());
    let n = minimum_marks(delta, genus);
    let mut curve_index = 0;
    for h in (0..=genus).rev() {
        let d = genus - h;
        // Genus defect d needs d vertex marks as well.
        if 2 * d > opts.max_codim {
            continue;
        }
        let mut max_excess = opts.max_codim - 2 * d;
        if d == 0 && h >= 1 && opts.include_exceptional {
            max_excess = max_excess.max(2);
        }
        let curves = unmarked_curves(delta, h, max_excess, opts.node_budget)?;
        for u in &curves {
            let exc_curve = is_exceptional_curve(&u.curve);
            if u.excess + 2 * d > opts.max_codim && !(exc_curve && u.excess == 2 && d == 0) {
                curve_index += 1;
                continue;
            }
            let sys_rank = {
                let probe = CombinatorialType::from_parts(u.curve.clone(), MarkingMap::new(vec![]), genus, degree.clone());
                crate::solver::AffineSystem::build(&probe).loop_rank()
            };
            for strata in markings(u, genus, opts.max_codim, opts.include_exceptional, exc_curve) {
                debug_assert_eq!(strata.len(), n);
                let ty = CombinatorialType::from_parts(u.curve.clone(), MarkingMap::new(strata), genus, degree.clone());
                let codim = ty.codimension();
                let exceptional = ty.is_exceptional();
                if codim > opts.max_codim && !exceptional {
                    continue;
                }
                let dim = 2 + u.curve.graph.internal_edge_count() + ty.marking().edge_mark_count() - sys_rank;
                visit(CatalogEntry { ty, codim, dim, exceptional, curve_index });
            }
            curve_index += 1;
        }
    }
    Ok(())
}

/// Digest of an unmarked curve, for tests and reports.
pub fn curve_digest(c: &DecoratedGraph) -> u128 {
    key_digest(&canonical_form(c, &[], MarkMode::None).key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_small_multiset() {
        // {a, a, b} into two parts: {a}|{a,b} and {b}|{a,a}.
        let p = partitions(&[2, 1], 2, &[2, 1]);
        assert_eq!(p.len(), 2);
        let p3 = partitions(&[1, 1, 1], 3, &[1, 1, 1]);
        assert_eq!(p3.len(), 1);
    }

    #[test]
    fn closing_cycles() {
        let v = LatticeVector::new;
        assert!(cycle_closes(&[v(1, 0), v(-2, 0)]));
        assert!(!cycle_closes(&[v(1, 0), v(2, 0)]));
        assert!(cycle_closes(&[v(1, 0), v(0, 1), v(-1, -1)]));
        assert!(!cycle_closes(&[v(1, 0), v(0, 1), v(-1, 1)]));
        assert!(!cycle_closes(&[v(1, 0), v(-1, 0), v(0, 1)]));
    }

    #[test]
    fn line_has_three_shapes() {
        let cat = enumerate_types(0, &Degree::projective(1), 0).unwrap();
        assert_eq!(cat.len(), 3);
        assert!(cat.entries.iter().all(|e| e.codim == 0 && e.dim == 4));
        let labeled: usize = cat.entries.iter().map(|e| labelings(&e.ty).len()).sum();
        assert_eq!(labeled, 6);
    }
}
