//! Multiplicities, the weighted count through a point configuration, and
//! the operational general-position test.
//!
//! Only codimension-0 shapes are searched. A configuration on the image of
//! a higher-codimension stratum shows up as a codimension-0 solution on the
//! boundary of its polyhedron; the limiting curve is then classified by its
//! own type: codimension 1 is a wall, exceptional types are counted, and
//! anything else is outside general position.

use crate::curve::{minimum_marks, Degree, MarkingMap};
use crate::lattice::LatticeVector;
use crate::linalg::Q;
use crate::solver::search::{Hit, PreparedCatalog};
use crate::solver::{solve_closed, AffineSystem, PointConfiguration, SolveOutcome, SolverError, StratumCoordinates};
use crate::types::resolve::degenerate;
use crate::types::{enumerate_types, CombinatorialType, TypeCatalog, TypeError, TypeKey};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CountError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("expected {expected} points, found {found}")]
    WrongPointCount { expected: usize, found: usize },
    #[error("two marked points coincide")]
    CoincidentPoints,
    #[error("configuration is not in general position: {0}")]
    NotGeneralPosition(Verdict),
    #[error("vertex of valence {0} has no multiplicity")]
    UnsupportedValence(usize),
}

/// |det(v₁,v₂)| at a 3-valent vertex, max over pairings of
/// |det(vᵢ,vⱼ)·det(vₖ,vₗ)| at a 4-valent one.
pub fn multiplicity_of_vectors(vs: &[LatticeVector]) -> Result<u64, CountError> {
    match vs.len() {
        3 => Ok(vs[0].det(vs[1]).unsigned_abs()),
        4 => Ok([[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]]
            .iter()
            .map(|p| (vs[p[0]].det(vs[p[1]]) as i128 * vs[p[2]].det(vs[p[3]]) as i128).unsigned_abs() as u64)
            .max()
            .unwrap()),
        k => Err(CountError::UnsupportedValence(k)),
    }
}

pub fn vertex_multiplicity(t: &CombinatorialType, v: usize) -> Result<u64, CountError> {
    multiplicity_of_vectors(&t.vectors_at(v))
}

/// Product of the vertex multiplicities.
pub fn curve_multiplicity(t: &CombinatorialType) -> Result<u64, CountError> {
    (0..t.graph().vertex_count()).try_fold(1u64, |acc, v| Ok(acc * vertex_multiplicity(t, v)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VerdictKind {
    General,
    /// On the image of a codimension-1 stratum.
    Wall,
    /// On the image of a codimension ≥ 2 non-exceptional stratum, or of a
    /// stratum where the evaluation map has positive-dimensional fibers.
    Excluded,
}

#[derive(Clone, Debug)]
pub struct Evidence {
    pub kind: VerdictKind,
    pub ty: Option<CombinatorialType>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub evidence: Vec<Evidence>,
}

impl Verdict {
    pub fn is_general(&self) -> bool {
        self.kind == VerdictKind::General
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.kind {
            VerdictKind::General => "general",
            VerdictKind::Wall => "wall",
            VerdictKind::Excluded => "excluded",
        };
        write!(f, "{name}")?;
        if let Some(e) = self.evidence.first() {
            write!(f, " ({})", e.reason)?;
        }
        Ok(())
    }
}

/// One curve through the configuration.
#[derive(Clone, Debug)]
pub struct CurveRecord {
    pub ty: CombinatorialType,
    pub key: TypeKey,
    pub coords: StratumCoordinates,
    pub multiplicity: u64,
    /// The curve's type is codimension 1 or exceptional.
    pub on_wall: bool,
}

#[derive(Clone, Debug)]
pub struct CountReport {
    pub total: u64,
    pub curves: Vec<CurveRecord>,
    pub general_position: Verdict,
}

/// What to do with configurations on a codimension-1 wall.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallPolicy {
    /// Fail with `NotGeneralPosition`.
    Reject,
    /// Count the limiting curves on the wall with their multiplicities.
    Count,
}

/// Counts curves for one (g, Δ) against many configurations.
#[derive(Clone, Debug)]
pub struct Counter {
    catalog: Arc<TypeCatalog>,
    prepared: PreparedCatalog,
}

/// Everything found at one configuration.
#[derive(Clone, Debug)]
struct Analysis {
    strict: Vec<CurveRecord>,
    wall: Vec<CurveRecord>,
    verdict: Verdict,
}

impl Counter {
    pub fn new(genus: usize, delta: &Degree) -> Result<Counter, CountError> {
        Ok(Counter::from_catalog(Arc::new(enumerate_types(genus, delta, 0)?)))
    }

    pub fn from_catalog(catalog: Arc<TypeCatalog>) -> Counter {
        let prepared =
            PreparedCatalog::new(catalog.entries.iter().enumerate().filter(|(_, e)| e.codim == 0).map(|(i, e)| (i, &e.ty)));
        Counter { catalog, prepared }
    }

    pub fn catalog(&self) -> &TypeCatalog {
        &self.catalog
    }

    pub fn n(&self) -> usize {
        minimum_marks(&self.catalog.degree, self.catalog.genus)
    }

    fn labeled(&self, hit: &Hit) -> CombinatorialType {
        let t = &self.catalog.entries[hit.entry].ty;
        let mut strata = t.strata().to_vec();
        for (slot, &point) in hit.assignment.iter().enumerate() {
            strata[point] = t.strata()[slot];
        }
        t.with_marking(MarkingMap::new(strata))
    }

    fn analyze(&self, p: &PointConfiguration) -> Result<Analysis, CountError> {
        let n = self.n();
        if p.len() != n {
            return Err(CountError::WrongPointCount { expected: n, found: p.len() });
        }
        if p.has_coincident_points() {
            return Err(CountError::CoincidentPoints);
        }
        let mut strict = Vec::new();
        let mut wall: BTreeMap<TypeKey, CurveRecord> = BTreeMap::new();
        let mut evidence = Vec::new();
        for hit in self.prepared.search(&p.points) {
            let t = self.labeled(&hit);
            let sys = AffineSystem::build(&t);
            match solve_closed(&t, p)? {
                SolveOutcome::NoSolution => {}
                SolveOutcome::Interior(x) => {
                    strict.push(CurveRecord {
                        key: t.key(),
                        coords: StratumCoordinates::from_vec(&sys, &x),
                        multiplicity: curve_multiplicity(&t)?,
                        ty: t,
                        on_wall: false,
                    });
                }
                SolveOutcome::Boundary(x) => match degenerate(&t, &x) {
                    Some((d, dx)) => {
                        let codim = d.codimension();
                        if codim == 1 || d.is_exceptional() {
                            let key = d.key();
                            if !wall.contains_key(&key) {
                                if codim == 1 {
                                    evidence.push(Evidence {
                                        kind: VerdictKind::Wall,
                                        ty: Some(d.clone()),
                                        reason: format!("curve of codimension-1 type {key} through the points"),
                                    });
                                }
                                let dsys = AffineSystem::build(&d);
                                wall.insert(
                                    key,
                                    CurveRecord {
                                        key,
                                        coords: StratumCoordinates::from_vec(&dsys, &dx),
                                        multiplicity: curve_multiplicity(&d)?,
                                        ty: d,
                                        on_wall: true,
                                    },
                                );
                            }
                        } else {
                            evidence.push(Evidence {
                                kind: VerdictKind::Excluded,
                                reason: format!("curve of codimension-{codim} type {} through the points", d.key()),
                                ty: Some(d),
                            });
                        }
                    }
                    None => evidence.push(Evidence {
                        kind: VerdictKind::Excluded,
                        ty: Some(t),
                        reason: "limit of a boundary solution is not a tropical curve type".into(),
                    }),
                },
                SolveOutcome::DegenerateInterior(_) | SolveOutcome::DegenerateBoundary(_) => evidence.push(Evidence {
                    kind: VerdictKind::Excluded,
                    ty: Some(t),
                    reason: "positive-dimensional family of curves through the points".into(),
                }),
            }
        }
        let kind = evidence.iter().map(|e| e.kind).max().unwrap_or(VerdictKind::General);
        evidence.sort_by_key(|e| std::cmp::Reverse(e.kind));
        Ok(Analysis { strict, wall: wall.into_values().collect(), verdict: Verdict { kind, evidence } })
    }

    /// The general-position verdict for `p`.
    pub fn verdict(&self, p: &PointConfiguration) -> Result<Verdict, CountError> {
        Ok(self.analyze(p)?.verdict)
    }

    /// N(p), the weighted number of curves through `p`.
    pub fn count(&self, p: &PointConfiguration, policy: WallPolicy) -> Result<CountReport, CountError> {
        let a = self.analyze(p)?;
        let mut curves = a.strict;
        match a.verdict.kind {
            VerdictKind::General => curves.extend(a.wall),
            VerdictKind::Wall if policy == WallPolicy::Count => curves.extend(a.wall),
            _ => return Err(CountError::NotGeneralPosition(a.verdict)),
        }
        let total = curves.iter().map(|c| c.multiplicity).sum();
        Ok(CountReport { total, curves, general_position: a.verdict })
    }
}

/// N(p) for points in general position.
pub fn count_curves(genus: usize, delta: &Degree, p: &PointConfiguration) -> Result<CountReport, CountError> {
    Counter::new(genus, delta)?.count(p, WallPolicy::Reject)
}

pub fn check_general_position(genus: usize, delta: &Degree, p: &PointConfiguration) -> Result<Verdict, CountError> {
    Counter::new(genus, delta)?.verdict(p)
}

const PERTURB_STEPS: i64 = 1 << 32;

/// Shifts every coordinate by an independent rational in [−ε, ε].
pub fn perturb(p: &PointConfiguration, eps: &Q, seed: u64) -> PointConfiguration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = eps / Q::from_integer(PERTURB_STEPS.into());
    let points = p
        .points
        .iter()
        .map(|pt| {
            let mut shift = || Q::from_integer(rng.gen_range(-PERTURB_STEPS..=PERTURB_STEPS).into()) * &scale;
            [&pt[0] + shift(), &pt[1] + shift()]
        })
        .collect();
    PointConfiguration::new(points)
}

/// n points with independent integer coordinates of at most `bits` bits.
pub fn random_configuration(n: usize, bits: u32, seed: u64) -> PointConfiguration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coord = || {
        let mut x = BigInt::from(0);
        let mut left = bits;
        while left > 0 {
            let take = left.min(32);
            x = (x << take) + BigInt::from(rng.gen_range(0u64..(1u64 << take)));
            left -= take;
        }
        if rng.gen_bool(0.5) {
            x = -x;
        }
        Q::from_integer(x)
    };
    PointConfiguration::new((0..n).map(|_| [coord(), coord()]).collect())
}

/// A random configuration in general position with its count, retrying
/// with fresh seeds derived from `seed`.
pub fn random_general_count(counter: &Counter, bits: u32, seed: u64) -> Result<(PointConfiguration, CountReport), CountError> {
    let mut last = None;
    for attempt in 0..32u64 {
        let p = random_configuration(counter.n(), bits, seed.wrapping_mul(1_000_003).wrapping_add(attempt));
        match counter.count(&p, WallPolicy::Reject) {
            Ok(r) => return Ok((p, r)),
            Err(CountError::NotGeneralPosition(v)) => last = Some(v),
            Err(CountError::CoincidentPoints) => {}
            Err(e) => return Err(e),
        }
    }
    Err(CountError::NotGeneralPosition(last.unwrap_or(Verdict { kind: VerdictKind::Excluded, evidence: vec![] })))
}
