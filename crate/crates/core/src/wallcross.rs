//! Wall crossing: μ-signatures of 4-valent vertices, wall hyperplanes in
//! configuration space, and local and global invariance checks.

use crate::counting::{curve_multiplicity, random_general_count, CountError, Counter, WallPolicy};
use crate::curve::{Degree, Stratum};
use crate::lattice::{spans_plane, LatticeVector};
use crate::linalg::{primitive_integer_vector, LinearSolution, QMatrix, Q};
use crate::solver::{interior_point, solve_closed, AffineSystem, Coord, PointConfiguration, SolveOutcome};
use crate::types::resolve::{degenerate, resolutions_indexed, wall_kind, WallKind};
use crate::types::{CombinatorialType, TypeError};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum WallError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("all vectors at the vertex are collinear")]
    DegenerateVertex,
    #[error("image of the stratum has dimension {found}, expected {expected}")]
    UnexpectedImageDimension { expected: usize, found: usize },
    #[error("the stratum is empty")]
    EmptyStratum,
    #[error("no step along the wall normal keeps the other inequalities strict")]
    NoStraddle,
    #[error("invariance violated: {0}")]
    InvarianceViolation(String),
}

/// (μ̂₁, μ̂₂, μ̂₃); μ̂ᵢ belongs to the resolution pairing vᵢ with v₄.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MuSignature {
    pub mu_hat: [i64; 3],
}

impl MuSignature {
    pub fn sum(&self) -> i64 {
        self.mu_hat.iter().sum()
    }

    pub fn max_abs(&self) -> u64 {
        self.mu_hat.iter().map(|m| m.unsigned_abs()).max().unwrap()
    }
}

pub fn mu_signature(v: [LatticeVector; 4]) -> Result<MuSignature, WallError> {
    if !spans_plane(&v) {
        return Err(WallError::DegenerateVertex);
    }
    let [v1, v2, v3, _] = v;
    Ok(MuSignature {
        mu_hat: [
            v2.det(v3) * v1.det(v2 + v3),
            v3.det(v1) * v2.det(v3 + v1),
            v1.det(v2) * v3.det(v1 + v2),
        ],
    })
}

/// The hyperplane {p : normal · p = 0} containing the image of a wall
/// stratum. Evaluation is linear, so the hyperplane passes through 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallHyperplane {
    /// Primitive integer covector on (x₁, y₁, …, xₙ, yₙ).
    pub normal: Vec<Q>,
}

impl WallHyperplane {
    pub fn value(&self, p: &PointConfiguration) -> Q {
        self.normal.iter().zip(p.flat()).map(|(a, b)| a * b).sum()
    }

    pub fn contains(&self, p: &PointConfiguration) -> bool {
        self.value(p).is_zero()
    }

    /// p + t·normal.
    pub fn shift(&self, p: &PointConfiguration, t: &Q) -> PointConfiguration {
        let flat: Vec<Q> = p.flat().iter().zip(&self.normal).map(|(x, c)| x + c * t).collect();
        PointConfiguration::from_flat(&flat)
    }
}

fn loop_kernel(sys: &AffineSystem) -> Vec<Vec<Q>> {
    QMatrix::from_int_rows(&sys.loops, sys.dim()).kernel()
}

pub fn wall_normal(t: &CombinatorialType) -> Result<WallHyperplane, WallError> {
    wall_kind(t)?;
    let sys = AffineSystem::build(t);
    let k = loop_kernel(&sys);
    let eval = QMatrix::from_int_rows(&sys.eval, sys.dim());
    let basis = QMatrix::from_rows(&k, sys.dim()).transpose();
    let image = eval.mul(&basis);
    let n2 = sys.eval.len();
    let rank = image.rank();
    if rank != n2 - 1 {
        return Err(WallError::UnexpectedImageDimension { expected: n2 - 1, found: rank });
    }
    let left = image.left_kernel();
    let normal = primitive_integer_vector(&left[0]).into_iter().map(Q::from_integer).collect();
    Ok(WallHyperplane { normal })
}

/// Resolutions present on one side of the wall: (index, multiplicity).
pub type Side = Vec<(usize, u64)>;

#[derive(Clone, Debug)]
pub struct TrialReport {
    /// The point on the wall.
    pub wall_point: PointConfiguration,
    pub delta: Q,
    pub plus: Side,
    pub minus: Side,
}

impl TrialReport {
    pub fn sums(&self) -> (u64, u64) {
        (self.plus.iter().map(|s| s.1).sum(), self.minus.iter().map(|s| s.1).sum())
    }
}

#[derive(Clone, Debug)]
pub struct LocalReport {
    pub kind: WallKind,
    pub multiplicity: u64,
    pub mu: Option<MuSignature>,
    pub trials: Vec<TrialReport>,
}

fn vector_in(sys: &AffineSystem, x: &[Q], k: &[Vec<Q>], rng: &mut ChaCha8Rng) -> Vec<Q> {
    let coef: Vec<Q> = k.iter().map(|_| Q::from_integer(rng.gen_range(-100i64..=100).into())).collect();
    let dir: Vec<Q> = (0..sys.dim()).map(|i| k.iter().zip(&coef).map(|(b, c)| &b[i] * c).sum()).collect();
    let mut s = Q::one();
    for _ in 0..200 {
        let y: Vec<Q> = x.iter().zip(&dir).map(|(a, d)| a + d * &s).collect();
        if sys.slacks(&y).iter().all(|v| v.is_positive()) {
            return y;
        }
        s /= Q::from_integer(2.into());
    }
    x.to_vec()
}

/// Samples points on the wall of `t`, steps off it to both sides and
/// compares the resolutions found by exact solving.
pub fn verify_local_invariance(t: &CombinatorialType, trials: usize, seed: u64) -> Result<LocalReport, WallError> {
    let kind = wall_kind(t)?;
    let res = resolutions_indexed(t)?;
    let hyper = wall_normal(t)?;
    let multiplicity = curve_multiplicity(t)?;
    let mu = match kind {
        WallKind::FourValent { flags, .. } => {
            let c = t.curve();
            Some(mu_signature([c.v(flags[0]), c.v(flags[1]), c.v(flags[2]), c.v(flags[3])])?)
        }
        _ => None,
    };
    let sys = AffineSystem::build(t);
    let base = interior_point(t).ok_or(WallError::EmptyStratum)?;
    let kernel = loop_kernel(&sys);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let mut violations = Vec::new();
    let rsys: Vec<AffineSystem> = res.iter().map(|(_, r)| AffineSystem::build(r)).collect();
    let normal_points = PointConfiguration::from_flat(&hyper.normal);
    for trial in 0..trials {
        let x = vector_in(&sys, &base, &kernel, &mut rng);
        let q = sys.evaluate(&x);
        debug_assert!(hyper.contains(&q));
        // Each resolution sits on its boundary at q and moves linearly with the points.
        let mut lifts = Vec::new();
        for ((_, r), rs) in res.iter().zip(&rsys) {
            let at = match solve_closed(r, &q).map_err(CountError::from)? {
                SolveOutcome::Boundary(x) => x,
                other => {
                    return Err(WallError::InvarianceViolation(format!(
                        "resolution does not reach the wall point: {other:?}"
                    )))
                }
            };
            let m = QMatrix::from_int_rows(&rs.matrix_rows(), rs.dim());
            let d = match m.solve(&rs.rhs(&normal_points)) {
                LinearSolution::Unique(d) => d,
                _ => return Err(WallError::InvarianceViolation("resolution is not injective".into())),
            };
            lifts.push((rs.slacks(&at), rs.slacks(&d)));
        }
        let mut delta = Q::one();
        let ok = |delta: &Q| {
            lifts.iter().all(|(s0, ds)| {
                s0.iter().zip(ds).all(|(s, d)| s.is_zero() || ((s + d * delta).is_positive() && (s - d * delta).is_positive()))
            })
        };
        let mut found = false;
        for _ in 0..200 {
            if ok(&delta) {
                found = true;
                break;
            }
            delta /= Q::from_integer(2.into());
        }
        if !found {
            return Err(WallError::NoStraddle);
        }
        let mut sides = [Vec::new(), Vec::new()];
        for (side, sign) in [Q::one(), -Q::one()].iter().enumerate() {
            let p = hyper.shift(&q, &(sign * &delta));
            for (i, r) in &res {
                if let SolveOutcome::Interior(_) = solve_closed(r, &p).map_err(CountError::from)? {
                    sides[side].push((*i, curve_multiplicity(r)?));
                }
            }
        }
        let [plus, minus] = sides;
        let report = TrialReport { wall_point: q, delta, plus, minus };
        let (sp, sm) = report.sums();
        if sp != sm {
            violations.push(format!("trial {trial}: sides sum to {sp} and {sm}"));
        }
        match kind {
            WallKind::FourValent { flags, .. } => {
                if sp != multiplicity {
                    violations.push(format!("trial {trial}: side sum {sp} differs from the vertex multiplicity {multiplicity}"));
                }
                let c = t.curve();
                let v = [c.v(flags[0]), c.v(flags[1]), c.v(flags[2])];
                let generic = (0..3).all(|a| (a + 1..3).all(|b| !v[a].is_parallel(v[b])));
                let mu = mu.unwrap();
                if generic {
                    let pos: Vec<usize> = (0..3).filter(|&i| mu.mu_hat[i] > 0).collect();
                    let neg: Vec<usize> = (0..3).filter(|&i| mu.mu_hat[i] < 0).collect();
                    let ip: Vec<usize> = report.plus.iter().map(|s| s.0).collect();
                    let im: Vec<usize> = report.minus.iter().map(|s| s.0).collect();
                    if !((ip == pos && im == neg) || (ip == neg && im == pos)) {
                        violations.push(format!("trial {trial}: sides {ip:?}|{im:?} disagree with μ signs {:?}", mu.mu_hat));
                    }
                }
            }
            WallKind::VertexMark { .. } | WallKind::Exceptional { .. } => {
                if report.plus.len() != 1 || report.minus.len() != 1 {
                    violations.push(format!(
                        "trial {trial}: expected one resolution per side, found {} and {}",
                        report.plus.len(),
                        report.minus.len()
                    ));
                }
                if matches!(kind, WallKind::Exceptional { .. })
                    && report.plus.iter().chain(&report.minus).any(|s| s.1 != multiplicity)
                {
                    violations.push(format!("trial {trial}: resolution multiplicity differs from {multiplicity}"));
                }
            }
        }
        reports.push(report);
    }
    if !violations.is_empty() {
        return Err(WallError::InvarianceViolation(violations.join("; ")));
    }
    Ok(LocalReport { kind, multiplicity, mu, trials: reports })
}

#[derive(Clone, Debug)]
pub struct GlobalReport {
    /// The common value of N.
    pub n: u64,
    /// N at each random configuration.
    pub random_totals: Vec<u64>,
    /// N on both sides of each constructed wall.
    pub straddle_totals: Vec<(u64, u64)>,
}

/// A wall point obtained by shrinking one unmarked bounded edge of a
/// solved curve to length zero.
fn wall_from_curve(t: &CombinatorialType, x: &[Q]) -> Option<(CombinatorialType, PointConfiguration)> {
    let sys = AffineSystem::build(t);
    let marked: Vec<usize> = t.strata().iter().filter_map(|s| if let Stratum::Edge(e) = s { Some(*e) } else { None }).collect();
    for e in t.graph().internal_edges().iter().map(|e| e.flag) {
        if marked.contains(&e) {
            continue;
        }
        let mut y = x.to_vec();
        y[sys.coord_index(Coord::Length(e)).unwrap()] = Q::zero();
        if sys.loop_residual(&y).iter().any(|r| !r.is_zero()) {
            continue;
        }
        let slacks = sys.slacks(&y);
        if slacks.iter().filter(|s| s.is_zero()).count() != 1 || slacks.iter().any(|s| s.is_negative()) {
            continue;
        }
        if let Some((w, _)) = degenerate(t, &y) {
            if w.codimension() == 1 {
                return Some((w, sys.evaluate(&y)));
            }
        }
    }
    None
}

/// Counts at random configurations and on both sides of walls built from
/// the curves found; all totals must agree.
pub fn verify_global_invariance(genus: usize, delta: &Degree, trials: usize, seed: u64) -> Result<GlobalReport, WallError> {
    let counter = Counter::new(genus, delta)?;
    verify_global_invariance_with(&counter, trials, seed)
}

pub fn verify_global_invariance_with(counter: &Counter, trials: usize, seed: u64) -> Result<GlobalReport, WallError> {
    let mut random_totals = Vec::new();
    let mut straddle_totals = Vec::new();
    for i in 0..trials {
        let (_, report) = random_general_count(counter, 40, seed.wrapping_add(i as u64))?;
        random_totals.push(report.total);
        // One straddle per trial, from the first curve that yields a wall.
        for curve in &report.curves {
            let sys = AffineSystem::build(&curve.ty);
            let x = curve.coords.to_vec(&sys);
            let Some((w, q)) = wall_from_curve(&curve.ty, &x) else { continue };
            let hyper = wall_normal(&w)?;
            let mut step = Q::new(1.into(), 16.into());
            let mut pair = None;
            for _ in 0..40 {
                let a = counter.count(&hyper.shift(&q, &step), WallPolicy::Reject);
                let b = counter.count(&hyper.shift(&q, &-step.clone()), WallPolicy::Reject);
                if let (Ok(a), Ok(b)) = (a, b) {
                    pair = Some((a.total, b.total));
                    break;
                }
                step /= Q::from_integer(2.into());
            }
            if let Some(p) = pair {
                straddle_totals.push(p);
                break;
            }
        }
    }
    let n = random_totals.first().copied().unwrap_or(0);
    let all = random_totals.iter().copied().chain(straddle_totals.iter().flat_map(|&(a, b)| [a, b]));
    if let Some(bad) = all.clone().find(|&x| x != n) {
        return Err(WallError::InvarianceViolation(format!("found totals {n} and {bad}")));
    }
    Ok(GlobalReport { n, random_totals, straddle_totals })
}
