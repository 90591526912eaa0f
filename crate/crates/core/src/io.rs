//! JSON formats: degrees, point configurations, types, count reports, and
//! the catalog cache (versioned JSON lines).

use crate::counting::{CountReport, CurveRecord, Verdict, VerdictKind};
use crate::curve::{CurveError, Degree, DecoratedGraph, MarkingMap, Stratum};
use crate::graph::Graph;
use crate::lattice::LatticeVector;
use crate::linalg::Q;
use crate::solver::{PlaneCurve, PointConfiguration, StratumCoordinates};
use crate::types::{CatalogEntry, CombinatorialType, TypeCatalog, TypeError};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

pub const CATALOG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("cannot parse {0:?} as a rational number")]
    Rational(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Parses "p/q", an integer, or an exact decimal such as "-1.25".
pub fn parse_rational(s: &str) -> Result<Q, IoError> {
    let err = || IoError::Rational(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d == BigInt::from(0) {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((i, f)) = t.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let negative = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches(['-', '+']), f);
        let mut n: BigInt = digits.parse().map_err(|_| err())?;
        if negative {
            n = -n;
        }
        return Ok(Q::new(n, BigInt::from(10).pow(f.len() as u32)));
    }
    Ok(Q::from_integer(t.parse().map_err(|_| err())?))
}

pub fn format_rational(q: &Q) -> String {
    q.to_string()
}

fn rational_value(v: &Value) -> Result<Q, IoError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().unwrap().into())),
        other => Err(IoError::Format(format!("expected a rational string, found {other}"))),
    }
}

/// `[{"v":[x,y],"mult":k}, …]` or `{"projective":d}`.
pub fn degree_from_json(v: &Value) -> Result<Degree, IoError> {
    if let Some(d) = v.get("projective") {
        let d = d.as_u64().ok_or_else(|| IoError::Format("projective degree must be a nonnegative integer".into()))?;
        return Ok(Degree::projective(d as usize));
    }
    let items = v.as_array().ok_or_else(|| IoError::Format("degree must be a list or {\"projective\":d}".into()))?;
    let mut out = Vec::new();
    for it in items {
        let xy = it
            .get("v")
            .and_then(|x| x.as_array())
            .filter(|a| a.len() == 2)
            .ok_or_else(|| IoError::Format(format!("degree entry {it} needs \"v\":[x,y]")))?;
        let x = xy[0].as_i64().ok_or_else(|| IoError::Format("vector entries must be integers".into()))?;
        let y = xy[1].as_i64().ok_or_else(|| IoError::Format("vector entries must be integers".into()))?;
        let mult = it.get("mult").map_or(Some(1), |m| m.as_u64()).ok_or_else(|| IoError::Format("mult must be a count".into()))?;
        out.push((LatticeVector::new(x, y), mult as usize));
    }
    Ok(Degree::from_multiplicities(out)?)
}

pub fn degree_to_json(d: &Degree) -> Value {
    Value::Array(d.entries().iter().map(|(v, m)| json!({"v": [v.x, v.y], "mult": m})).collect())
}

/// `[["p/q","p/q"], …]`.
pub fn points_from_json(v: &Value) -> Result<PointConfiguration, IoError> {
    let items = v.as_array().ok_or_else(|| IoError::Format("points must be a list of pairs".into()))?;
    let mut pts = Vec::new();
    for it in items {
        let pair = it.as_array().filter(|a| a.len() == 2).ok_or_else(|| IoError::Format(format!("point {it} is not a pair")))?;
        pts.push([rational_value(&pair[0])?, rational_value(&pair[1])?]);
    }
    Ok(PointConfiguration::new(pts))
}

pub fn points_to_json(p: &PointConfiguration) -> Value {
    Value::Array(p.points.iter().map(|[x, y]| json!([format_rational(x), format_rational(y)])).collect())
}

/// Serialized form of a marked type.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TypeRecord {
    pub vertices: usize,
    pub boundary: Vec<usize>,
    pub glue: Vec<usize>,
    /// v(F) = ω·u per flag.
    pub v: Vec<[i64; 2]>,
    /// "e<edge>" or "v<vertex>" per mark.
    pub strata: Vec<String>,
}

impl TypeRecord {
    pub fn of(t: &CombinatorialType) -> TypeRecord {
        let g = t.graph();
        TypeRecord {
            vertices: g.vertex_count(),
            boundary: (0..g.flag_count()).map(|f| g.boundary(f)).collect(),
            glue: (0..g.flag_count()).map(|f| g.glue(f)).collect(),
            v: (0..g.flag_count()).map(|f| t.curve().v(f)).map(|v| [v.x, v.y]).collect(),
            strata: t
                .strata()
                .iter()
                .map(|s| match s {
                    Stratum::Edge(e) => format!("e{e}"),
                    Stratum::Vertex(v) => format!("v{v}"),
                })
                .collect(),
        }
    }

    pub fn to_type(&self, genus: usize, degree: Arc<Degree>) -> Result<CombinatorialType, IoError> {
        let graph = Graph::from_maps(self.vertices, self.boundary.clone(), self.glue.clone()).map_err(CurveError::from)?;
        let vs: Vec<LatticeVector> = self.v.iter().map(|&[x, y]| LatticeVector::new(x, y)).collect();
        let curve = DecoratedGraph::from_vectors(graph, &vs)?;
        let strata = self
            .strata
            .iter()
            .map(|s| {
                let (k, i) = s.split_at(1);
                let i: usize = i.parse().map_err(|_| IoError::Format(format!("bad stratum {s:?}")))?;
                match k {
                    "e" => Ok(Stratum::Edge(i)),
                    "v" => Ok(Stratum::Vertex(i)),
                    _ => Err(IoError::Format(format!("bad stratum {s:?}"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CombinatorialType::new(Arc::new(curve), MarkingMap::new(strata), genus, degree)?)
    }
}

pub fn coords_to_json(c: &StratumCoordinates) -> Value {
    json!({
        "root": [format_rational(&c.root[0]), format_rational(&c.root[1])],
        "lengths": c.lengths.iter().map(|(e, l)| json!([e, format_rational(l)])).collect::<Vec<_>>(),
        "offsets": c.offsets.iter().map(|(i, o)| json!([i, format_rational(o)])).collect::<Vec<_>>(),
    })
}

pub fn verdict_to_json(v: &Verdict) -> Value {
    let name = |k: VerdictKind| match k {
        VerdictKind::General => "general",
        VerdictKind::Wall => "wall",
        VerdictKind::Excluded => "excluded",
    };
    json!({
        "verdict": name(v.kind),
        "evidence": v.evidence.iter().map(|e| json!({
            "kind": name(e.kind),
            "type": e.ty.as_ref().map(|t| t.key().to_string()),
            "reason": e.reason,
        })).collect::<Vec<_>>(),
    })
}

fn curve_to_json(c: &CurveRecord) -> Value {
    json!({
        "type": c.key.to_string(),
        "mult": c.multiplicity,
        "on_wall": c.on_wall,
        "coords": coords_to_json(&c.coords),
        "curve": TypeRecord::of(&c.ty),
    })
}

pub fn report_to_json(r: &CountReport) -> Value {
    json!({
        "N": r.total,
        "curves": r.curves.iter().map(curve_to_json).collect::<Vec<_>>(),
        "general_position": verdict_to_json(&r.general_position),
    })
}

pub fn plane_curve_to_json(c: &PlaneCurve) -> Value {
    let pt = |p: &[Q; 2]| json!([format_rational(&p[0]), format_rational(&p[1])]);
    json!({
        "vertices": c.vertices.iter().map(pt).collect::<Vec<_>>(),
        "segments": c.segments.iter().map(|(a, b, w)| json!([a, b, w])).collect::<Vec<_>>(),
        "rays": c.rays.iter().map(|(v, d, w)| json!([v, [d.x, d.y], w])).collect::<Vec<_>>(),
        "marks": c.marks.iter().map(pt).collect::<Vec<_>>(),
    })
}

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct CatalogHeader {
    format: String,
    version: u32,
    genus: usize,
    degree: Value,
    max_codim: usize,
    bound: u64,
    entries: usize,
}

#[derive(Serialize, Deserialize)]
struct EntryLine {
    codim: usize,
    dim: usize,
    exceptional: bool,
    curve: usize,
    #[serde(flatten)]
    ty: TypeRecord,
}

/// Cache file name for a context.
pub fn catalog_cache_path(dir: &Path, genus: usize, degree: &Degree, max_codim: usize) -> PathBuf {
    let key = format!("g{genus}-{}-c{max_codim}-b{}", degree.key(), degree.direction_bound());
    let digest = crate::types::canonical::key_digest(&key.bytes().map(i32::from).collect::<Vec<_>>());
    dir.join(format!("catalog-v{CATALOG_VERSION}-{digest:032x}.jsonl"))
}

pub fn write_catalog(path: &Path, cat: &TypeCatalog) -> Result<(), IoError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let header = CatalogHeader {
        format: "tropcount-catalog".into(),
        version: CATALOG_VERSION,
        genus: cat.genus,
        degree: degree_to_json(&cat.degree),
        max_codim: cat.max_codim,
        bound: cat.bound,
        entries: cat.entries.len(),
    };
    serde_json::to_writer(&mut w, &header)?;
    writeln!(w)?;
    for e in &cat.entries {
        let line = EntryLine { codim: e.codim, dim: e.dim, exceptional: e.exceptional, curve: e.curve_index, ty: TypeRecord::of(&e.ty) };
        serde_json::to_writer(&mut w, &line)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cached catalog; `Ok(None)` if the header belongs to another context.
pub fn read_catalog(path: &Path, genus: usize, degree: &Degree, max_codim: usize) -> Result<Option<TypeCatalog>, IoError> {
    let mut lines = BufReader::new(std::fs::File::open(path)?).lines();
    let Some(first) = lines.next() else { return Ok(None) };
    let header: CatalogHeader = serde_json::from_str(&first?)?;
    if header.format != "tropcount-catalog"
        || header.version != CATALOG_VERSION
        || header.genus != genus
        || degree_from_json(&header.degree)? != *degree
        || header.max_codim != max_codim
        || header.bound != degree.direction_bound()
    {
        return Ok(None);
    }
    let degree = Arc::new(degree.clone());
    let mut entries = Vec::with_capacity(header.entries);
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let e: EntryLine = serde_json::from_str(&line)?;
        entries.push(CatalogEntry {
            ty: e.ty.to_type(genus, degree.clone())?,
            codim: e.codim,
            dim: e.dim,
            exceptional: e.exceptional,
            curve_index: e.curve,
        });
    }
    if entries.len() != header.entries {
        return Err(IoError::Format(format!("catalog has {} entries, header says {}", entries.len(), header.entries)));
    }
    Ok(Some(TypeCatalog { genus, degree, max_codim, bound: header.bound, entries }))
}

/// Enumerates a catalog, going through the cache directory when given.
pub fn load_or_enumerate(cache_dir: Option<&Path>, genus: usize, degree: &Degree, max_codim: usize) -> Result<TypeCatalog, IoError> {
    let Some(dir) = cache_dir else {
        return Ok(crate::types::enumerate_types(genus, degree, max_codim)?);
    };
    let path = catalog_cache_path(dir, genus, degree, max_codim);
    if path.exists() {
        if let Some(cat) = read_catalog(&path, genus, degree, max_codim)? {
            return Ok(cat);
        }
    }
    let cat = crate::types::enumerate_types(genus, degree, max_codim)?;
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    write_catalog(&tmp, &cat)?;
    std::fs::rename(&tmp, &path)?;
    Ok(cat)
}
