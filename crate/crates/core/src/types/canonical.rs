//! Canonical labelings of decorated graphs with marks.
//!
//! Color refinement on vertices followed by individualization over the
//! first non-singleton cell; the lexicographically smallest serialization
//! over all leaves is the key.

use crate::curve::{DecoratedGraph, Stratum};

/// How marked points enter the key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkMode {
    /// Marks ignored.
    None,
    /// Marks counted per stratum, labels forgotten.
    Unlabeled,
    /// Marks with their labels.
    Labeled,
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: Vec<i32>,
    /// Canonical position → original vertex.
    pub vertex_order: Vec<usize>,
    /// Canonical position → original flag.
    pub flag_order: Vec<usize>,
    /// Number of leaves attaining the minimal key.
    pub leaves_at_min: usize,
}

struct Ctx<'a> {
    curve: &'a DecoratedGraph,
    vertex_desc: Vec<Vec<i32>>,
    flag_desc: Vec<Vec<i32>>,
    flag_rank: Vec<u32>,
    best: Option<(Vec<i32>, Vec<usize>, Vec<usize>)>,
    leaves_at_min: usize,
}

fn dense_ranks<T: Ord + Clone>(items: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = items.to_vec();
    sorted.sort();
    sorted.dedup();
    items.iter().map(|x| sorted.binary_search(x).unwrap() as u32).collect()
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

impl<'a> Ctx<'a> {
    fn new(curve: &'a DecoratedGraph, strata: &[Stratum], mode: MarkMode) -> Self {
        let g = &curve.graph;
        let mut vertex_labels: Vec<Vec<i32>> = vec![Vec::new(); g.vertex_count()];
        let mut edge_labels: Vec<Vec<i32>> = vec![Vec::new(); g.flag_count()];
        if mode != MarkMode::None {
            for (i, s) in strata.iter().enumerate() {
                match *s {
                    Stratum::Vertex(v) => vertex_labels[v].push(i as i32),
                    Stratum::Edge(f) => edge_labels[g.edge_id(f)].push(i as i32),
                }
            }
        }
        let encode = |labels: &[i32]| -> Vec<i32> {
            match mode {
                MarkMode::None => vec![],
                MarkMode::Unlabeled => vec![labels.len() as i32],
                MarkMode::Labeled => {
                    let mut l = labels.to_vec();
                    l.sort_unstable();
                    let mut out = vec![l.len() as i32];
                    out.extend(l);
                    out
                }
            }
        };
        let vertex_desc: Vec<Vec<i32>> = vertex_labels.iter().map(|l| encode(l)).collect();
        let flag_desc: Vec<Vec<i32>> = (0..g.flag_count())
            .map(|f| {
                let u = curve.dir(f);
                let mut d = vec![u.x as i32, u.y as i32, curve.weight(f) as i32, g.is_end_flag(f) as i32];
                d.extend(encode(&edge_labels[g.edge_id(f)]));
                d
            })
            .collect();
        let flag_rank = dense_ranks(&flag_desc);
        Ctx { curve, vertex_desc, flag_desc, flag_rank, best: None, leaves_at_min: 0 }
    }

    fn initial_colors(&self) -> Vec<u32> {
        let g = &self.curve.graph;
        let sigs: Vec<(Vec<i32>, Vec<u32>)> = (0..g.vertex_count())
            .map(|v| {
                let mut fr: Vec<u32> = g.flags_at(v).iter().map(|&f| self.flag_rank[f]).collect();
                fr.sort_unstable();
                (self.vertex_desc[v].clone(), fr)
            })
            .collect();
        dense_ranks(&sigs)
    }

    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let g = &self.curve.graph;
        let mut count = distinct(&colors);
        loop {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..g.vertex_count())
                .map(|v| {
                    let mut nb: Vec<(u32, u32)> = g
                        .flags_at(v)
                        .iter()
                        .map(|&f| (self.flag_rank[f], g.neighbor(f).map_or(u32::MAX, |w| colors[w])))
                        .collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            colors = dense_ranks(&sigs);
            let c = distinct(&colors);
            if c == count {
                return colors;
            }
            count = c;
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let g = &self.curve.graph;
        let nv = g.vertex_count();
        let mut vertex_order = vec![0; nv];
        for v in 0..nv {
            vertex_order[colors[v] as usize] = v;
        }
        let mut key = vec![nv as i32, g.flag_count() as i32];
        let mut flag_order = Vec::with_capacity(g.flag_count());
        for &v in &vertex_order {
            key.extend(&self.vertex_desc[v]);
            key.push(g.valence(v) as i32);
            let mut fs: Vec<(u32, i32, usize)> = g
                .flags_at(v)
                .iter()
                .map(|&f| (self.flag_rank[f], g.neighbor(f).map_or(-1, |w| colors[w] as i32), f))
                .collect();
            fs.sort_unstable();
            for (_, nb, f) in fs {
                key.extend(&self.flag_desc[f]);
                key.push(nb);
                flag_order.push(f);
            }
        }
        match &self.best {
            Some((k, _, _)) if *k < key => {}
            Some((k, _, _)) if *k == key => self.leaves_at_min += 1,
            _ => {
                self.best = Some((key, vertex_order, flag_order));
                self.leaves_at_min = 1;
            }
        }
    }

    fn search(&mut self, colors: Vec<u32>) {
        let colors = self.refine(colors);
        let nv = colors.len();
        // First non-singleton cell by color value.
        let mut size = vec![0usize; nv];
        for &c in &colors {
            size[c as usize] += 1;
        }
        let Some(cell) = (0..nv).find(|&c| size[c] > 1) else {
            self.leaf(&colors);
            return;
        };
        let members: Vec<usize> = (0..nv).filter(|&v| colors[v] as usize == cell).collect();
        for &v in &members {
            let split: Vec<u32> = (0..nv)
                .map(|w| 2 * colors[w] + u32::from(colors[w] as usize == cell && w != v))
                .collect();
            self.search(dense_ranks(&split));
        }
    }
}

pub fn canonical_form(curve: &DecoratedGraph, strata: &[Stratum], mode: MarkMode) -> CanonicalForm {
    let mut ctx = Ctx::new(curve, strata, mode);
    let init = ctx.initial_colors();
    ctx.search(init);
    let (key, vertex_order, flag_order) = ctx.best.take().expect("at least one leaf");
    CanonicalForm { key, vertex_order, flag_order, leaves_at_min: ctx.leaves_at_min }
}

/// True if some automorphism respecting the given marks is not the identity.
pub fn has_symmetry(curve: &DecoratedGraph, strata: &[Stratum], mode: MarkMode) -> bool {
    let cf = canonical_form(curve, strata, mode);
    if cf.leaves_at_min > 1 {
        return true;
    }
    // Interchangeable flags at one vertex: equal descriptors and neighbors.
    let ctx = Ctx::new(curve, strata, mode);
    let g = &curve.graph;
    (0..g.vertex_count()).any(|v| {
        let fs = g.flags_at(v);
        fs.iter().enumerate().any(|(i, &a)| {
            fs[i + 1..].iter().any(|&b| {
                ctx.flag_rank[a] == ctx.flag_rank[b] && g.neighbor(a) == g.neighbor(b)
            })
        })
    })
}

/// 128-bit FNV-1a digest of a key, stable across platforms and releases.
pub fn key_digest(key: &[i32]) -> u128 {
    let mut h: u128 = 0x6c62272e07bb014262b821756295c58d;
    let prime: u128 = 0x0000000001000000000000000000013B;
    for x in key {
        for b in x.to_le_bytes() {
            h ^= b as u128;
            h = h.wrapping_mul(prime);
        }
    }
    h
}
