//! Solving a whole catalog of unlabeled shapes against one configuration.
//!
//! Each shape's system is eliminated once, symbolically in the right-hand
//! side, which yields linear functionals of the point coordinates: the
//! consistency conditions and the polyhedron inequalities. A depth-first
//! search then assigns point labels to mark slots and rejects a branch as
//! soon as some functional whose slots are all assigned fails.

use super::AffineSystem;
use crate::linalg::{ff_gauss_jordan_auto, ExactInt, FfElimination, FfResult};
use crate::types::CombinatorialType;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
struct Check {
    equality: bool,
    terms: Vec<(u8, i64)>,
    big: Option<Vec<(u8, BigInt)>>,
}

/// A shape with its eliminated system, ready for repeated searches.
#[derive(Clone, Debug)]
pub struct PreparedShape {
    pub entry: usize,
    n: usize,
    order: Vec<u8>,
    checks_at: Vec<Vec<Check>>,
    twins_at: Vec<Vec<(u8, u8)>>,
    /// The evaluation map is injective on the affine hull.
    pub full_rank: bool,
    /// Some inequality vanishes identically.
    always_boundary: bool,
}

/// A labeling of slots by points that satisfies all checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub entry: usize,
    /// Slot → point label.
    pub assignment: Vec<usize>,
    /// Some inequality is zero.
    pub boundary: bool,
    /// The shape is not injective; the leaf needs an exact solve.
    pub degenerate: bool,
}

/// Point coordinates scaled to integers by one positive common factor.
#[derive(Clone, Debug)]
pub struct ScaledPoints {
    small: Option<Vec<[i64; 2]>>,
    big: Vec<[BigInt; 2]>,
}

impl ScaledPoints {
    pub fn new(points: &[[BigRational; 2]]) -> Self {
        let l = points.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let big: Vec<[BigInt; 2]> = points
            .iter()
            .map(|[x, y]| [(x * BigRational::from_integer(l.clone())).to_integer(), (y * BigRational::from_integer(l.clone())).to_integer()])
            .collect();
        let small = big
            .iter()
            .map(|[x, y]| Some([x.to_i64()?, y.to_i64()?]))
            .collect::<Option<Vec<_>>>();
        ScaledPoints { small, big }
    }
}

fn extract<T: ExactInt>(e: &FfElimination<T>, sys: &AffineSystem, n2: usize) -> Option<(Vec<(bool, Vec<T>)>, bool)> {
    let dim = sys.dim();
    let rank = e.pivot_cols.len();
    let mut out = Vec::new();
    for row in &e.rows[rank..] {
        out.push((true, row[dim..dim + n2].to_vec()));
    }
    let full = rank == dim;
    if full {
        for g in &sys.ineq {
            let mut acc = vec![T::from_i64(0); n2];
            for (j, &gj) in g.iter().enumerate() {
                if gj == 0 {
                    continue;
                }
                let gj = T::from_i64(gj);
                for k in 0..n2 {
                    acc[k] = acc[k].add_mul(&gj, &e.rows[j][dim + k])?;
                }
            }
            out.push((false, acc));
        }
    }
    Some((out, full))
}

fn to_checks<T: ExactInt>(raw: Vec<(bool, Vec<T>)>) -> (Vec<Check>, bool) {
    let mut checks = Vec::new();
    let mut always_boundary = false;
    for (equality, coefs) in raw {
        let nz: Vec<(u8, &T)> = coefs.iter().enumerate().filter(|(_, c)| !c.is_nil()).map(|(i, c)| (i as u8, c)).collect();
        if nz.is_empty() {
            always_boundary |= !equality;
            continue;
        }
        let small: Option<Vec<(u8, i64)>> = nz.iter().map(|(i, c)| Some((*i, c.as_i64()?))).collect();
        let check = match small {
            Some(terms) => Check { equality, terms, big: None },
            None => Check { equality, terms: vec![], big: Some(nz.iter().map(|(i, c)| (*i, c.to_bigint())).collect()) },
        };
        checks.push(check);
    }
    (checks, always_boundary)
}

fn build_checks<T: ExactInt>(e: &FfElimination<T>, sys: &AffineSystem, n2: usize) -> Option<(Vec<Check>, bool, bool)> {
    let (raw, full) = extract(e, sys, n2)?;
    let (checks, always_boundary) = to_checks(raw);
    Some((checks, always_boundary, full))
}

fn slots_of(c: &Check) -> u64 {
    let idx: Box<dyn Iterator<Item = u8>> = match &c.big {
        Some(b) => Box::new(b.iter().map(|t| t.0)),
        None => Box::new(c.terms.iter().map(|t| t.0)),
    };
    idx.fold(0u64, |m, i| m | (1 << (i / 2)))
}

impl PreparedShape {
    pub fn new(entry: usize, t: &CombinatorialType) -> PreparedShape {
        let sys = AffineSystem::build(t);
        let n = t.n();
        assert!(n <= 64, "at most 64 marked points supported");
        let n2 = 2 * n;
        let dim = sys.dim();
        let rows: Vec<Vec<i64>> = sys
            .matrix_rows()
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..n2).map(|k| i64::from(k == i)));
                r
            })
            .collect();
        let (checks, always_boundary, full_rank) = match ff_gauss_jordan_auto(&rows, dim) {
            FfResult::Small(e) => build_checks(&e, &sys, n2).unwrap_or_else(|| {
                let big = FfElimination {
                    rows: e.rows.iter().map(|r| r.iter().map(|x| x.to_bigint()).collect()).collect(),
                    pivot_cols: e.pivot_cols.clone(),
                    det: e.det.to_bigint(),
                    coef_cols: e.coef_cols,
                };
                build_checks(&big, &sys, n2).expect("big integers do not overflow")
            }),
            FfResult::Big(e) => build_checks(&e, &sys, n2).expect("big integers do not overflow"),
        };

        // Visit slots so that checks complete as early as possible.
        let masks: Vec<u64> = checks.iter().map(slots_of).collect();
        let completed = |chosen: u64| masks.iter().filter(|&&m| m & !chosen == 0).count();
        let mut order: Vec<u8> = Vec::with_capacity(n);
        let mut chosen = 0u64;
        if n >= 2 {
            let mut best = (0usize, 0u8, 1u8);
            for a in 0..n {
                for b in a + 1..n {
                    let c = completed((1 << a) | (1 << b));
                    if c > best.0 {
                        best = (c, a as u8, b as u8);
                    }
                }
            }
            order.extend([best.1, best.2]);
            chosen = (1 << best.1) | (1 << best.2);
        }
        while order.len() < n {
            let base = completed(chosen);
            let s = (0..n)
                .filter(|&s| chosen & (1 << s) == 0)
                .max_by_key(|&s| {
                    let gain = completed(chosen | (1 << s)) - base;
                    let touch = masks.iter().filter(|&&m| m & (1 << s) != 0 && m & !chosen != 0).count();
                    (gain, touch, usize::MAX - s)
                })
                .unwrap();
            order.push(s as u8);
            chosen |= 1 << s;
        }
        let mut position = vec![0usize; n];
        for (d, &s) in order.iter().enumerate() {
            position[s as usize] = d;
        }
        let mut checks_at: Vec<Vec<Check>> = vec![Vec::new(); n.max(1)];
        for (c, m) in checks.into_iter().zip(&masks) {
            let depth = (0..n).filter(|&s| m & (1 << s) != 0).map(|s| position[s]).max().unwrap_or(0);
            checks_at[depth].push(c);
        }
        // Marks on one stratum are interchangeable: keep labels increasing.
        let mut twins_at: Vec<Vec<(u8, u8)>> = vec![Vec::new(); n.max(1)];
        let strata = t.strata();
        for a in 0..n {
            for b in a + 1..n {
                if strata[a] == strata[b] {
                    twins_at[position[a].max(position[b])].push((a as u8, b as u8));
                }
            }
        }
        PreparedShape { entry, n, order, checks_at, twins_at, full_rank, always_boundary }
    }

    /// All slot labelings passing the checks.
    pub fn search(&self, pts: &ScaledPoints, out: &mut Vec<Hit>) {
        assert_eq!(pts.big.len(), self.n);
        let mut assign = vec![usize::MAX; self.n];
        self.dfs(0, 0, self.always_boundary, &mut assign, pts, out);
    }

    fn dfs(&self, depth: usize, used: u64, boundary: bool, assign: &mut Vec<usize>, pts: &ScaledPoints, out: &mut Vec<Hit>) {
        if depth == self.n {
            out.push(Hit { entry: self.entry, assignment: assign.clone(), boundary, degenerate: !self.full_rank });
            return;
        }
        let slot = self.order[depth] as usize;
        'points: for p in 0..self.n {
            if used & (1 << p) != 0 {
                continue;
            }
            assign[slot] = p;
            for &(a, b) in &self.twins_at[depth] {
                if assign[a as usize] > assign[b as usize] {
                    continue 'points;
                }
            }
            let mut bnd = boundary;
            for c in &self.checks_at[depth] {
                match eval_sign(c, assign, pts) {
                    0 => {
                        if !c.equality {
                            bnd = true;
                        }
                    }
                    s if s < 0 || c.equality => continue 'points,
                    _ => {}
                }
            }
            self.dfs(depth + 1, used | (1 << p), bnd, assign, pts, out);
        }
        assign[slot] = usize::MAX;
    }
}

fn eval_sign(c: &Check, assign: &[usize], pts: &ScaledPoints) -> i32 {
    if c.big.is_none() {
        if let Some(small) = &pts.small {
            let mut acc: i128 = 0;
            let mut ok = true;
            for &(i, coef) in &c.terms {
                let v = small[assign[(i / 2) as usize]][(i % 2) as usize];
                match acc.checked_add(coef as i128 * v as i128) {
                    Some(a) => acc = a,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return acc.signum() as i32;
            }
        }
    }
    let mut acc = BigInt::zero();
    let big_terms: Vec<(u8, BigInt)> = match &c.big {
        Some(b) => b.clone(),
        None => c.terms.iter().map(|&(i, v)| (i, BigInt::from(v))).collect(),
    };
    for (i, coef) in &big_terms {
        acc += coef * &pts.big[assign[(*i / 2) as usize]][(*i % 2) as usize];
    }
    if acc.is_zero() {
        0
    } else if acc.is_positive() {
        1
    } else {
        -1
    }
}

/// Prepared shapes for a whole catalog.
#[derive(Clone, Debug, Default)]
pub struct PreparedCatalog {
    pub shapes: Vec<PreparedShape>,
}

impl PreparedCatalog {
    pub fn new<'a>(entries: impl IntoIterator<Item = (usize, &'a CombinatorialType)>) -> Self {
        PreparedCatalog { shapes: entries.into_iter().map(|(i, t)| PreparedShape::new(i, t)).collect() }
    }

    pub fn search(&self, points: &[[BigRational; 2]]) -> Vec<Hit> {
        let pts = ScaledPoints::new(points);
        let mut out = Vec::new();
        for s in &self.shapes {
            s.search(&pts, &mut out);
        }
        out
    }
}
