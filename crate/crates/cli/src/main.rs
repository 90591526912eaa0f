use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use tropcount::counting::{perturb, random_configuration, CountError, Counter, CountReport, WallPolicy};
use tropcount::curve::minimum_marks;
use tropcount::io::{self, TypeRecord};
use tropcount::solver::{realize, PlaneCurve};
use tropcount::types::resolve::WallKind;
use tropcount::types::labelings;
use tropcount::wallcross::{verify_global_invariance_with, verify_local_invariance, WallError};
use tropcount::{Degree, PointConfiguration, Q};

/// Counts plane tropical curves through points and checks invariance of the count.
#[derive(Parser)]
#[command(name = "tropcount", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the combinatorial types with codim/dim/exceptional columns.
    Types {
        #[command(flatten)]
        job: Job,
        #[arg(long, default_value_t = 0)]
        max_codim: usize,
        /// One row per shape instead of per labeled type.
        #[arg(long)]
        shapes: bool,
    },
    /// Count curves through a point configuration.
    Count {
        #[command(flatten)]
        job: Job,
        #[command(flatten)]
        pts: PointArgs,
    },
    /// Check that the count agrees across random configurations and walls.
    Invariance {
        #[command(flatten)]
        job: Job,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Check local invariance across every wall type.
    Wall {
        #[command(flatten)]
        job: Job,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Draw the curves through a point configuration as SVG.
    Render {
        #[command(flatten)]
        job: Job,
        #[command(flatten)]
        pts: PointArgs,
    },
}

#[derive(Args)]
struct Job {
    #[arg(long, default_value_t = 0)]
    genus: usize,
    /// Inline JSON, a JSON file, or a projective degree d.
    #[arg(long)]
    degree: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    /// JSON file of ["p/q","p/q"] pairs; random integer points when absent.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Move the points by at most eps until they are in general position.
    #[arg(long, value_name = "EPS")]
    perturb: Option<String>,
}

enum Failure {
    Validation(anyhow::Error),
    Invariance(String),
    NotGeneral(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Validation(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invariance(msg)) => {
            eprintln!("invariance violated: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NotGeneral(msg)) => {
            eprintln!("not in general position: {msg} (use --perturb <eps>)");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Types { job, max_codim, shapes } => {
            let degree = parse_degree(&job.degree)?;
            let cat = io::load_or_enumerate(job.cache_dir.as_deref(), job.genus, &degree, max_codim).map_err(anyhow::Error::from)?;
            let mut out = String::new();
            for e in &cat.entries {
                let rows = if shapes { vec![e.ty.clone()] } else { labelings(&e.ty) };
                for t in rows {
                    let row = json!({
                        "codim": e.codim,
                        "dim": e.dim,
                        "exceptional": e.exceptional,
                        "key": t.key().to_string(),
                        "type": TypeRecord::of(&t),
                    });
                    writeln!(out, "{row}").unwrap();
                }
            }
            emit(&job, &out)
        }
        Command::Count { job, pts } => {
            let degree = parse_degree(&job.degree)?;
            let points = load_points(&job, &degree, &pts)?;
            let counter = counter(&job, &degree)?;
            let (points, report) = count_with_perturbation(&counter, points, &pts, job.seed)?;
            let mut v = io::report_to_json(&report);
            v["points"] = io::points_to_json(&points);
            emit(&job, &format!("{}\n", serde_json::to_string_pretty(&v).unwrap()))
        }
        Command::Invariance { job, trials } => {
            let degree = parse_degree(&job.degree)?;
            let counter = counter(&job, &degree)?;
            let r = verify_global_invariance_with(&counter, trials, job.seed).map_err(wall_failure)?;
            let v = json!({"N": r.n, "random_totals": r.random_totals, "straddle_totals": r.straddle_totals});
            emit(&job, &format!("{v}\n"))
        }
        Command::Wall { job, trials } => {
            let degree = parse_degree(&job.degree)?;
            let cat = io::load_or_enumerate(job.cache_dir.as_deref(), job.genus, &degree, 1).map_err(anyhow::Error::from)?;
            let mut out = String::new();
            for e in cat.walls() {
                let r = verify_local_invariance(&e.ty, trials, job.seed).map_err(wall_failure)?;
                let row = json!({
                    "key": e.ty.key().to_string(),
                    "kind": kind_name(&r.kind),
                    "multiplicity": r.multiplicity,
                    "mu": r.mu.map(|m| m.mu_hat),
                    "sides": r.trials.iter().map(|t| t.sums()).collect::<Vec<_>>(),
                });
                writeln!(out, "{row}").unwrap();
            }
            emit(&job, &out)
        }
        Command::Render { job, pts } => {
            let degree = parse_degree(&job.degree)?;
            let points = load_points(&job, &degree, &pts)?;
            let counter = counter(&job, &degree)?;
            let (_, report) = count_with_perturbation(&counter, points, &pts, job.seed)?;
            let curves: Vec<(PlaneCurve, u64)> =
                report.curves.iter().map(|c| (realize(&c.ty, &c.coords), c.multiplicity)).collect();
            emit(&job, &svg(&curves))
        }
    }
}

fn kind_name(k: &WallKind) -> &'static str {
    match k {
        WallKind::FourValent { .. } => "four-valent",
        WallKind::VertexMark { .. } => "vertex-mark",
        WallKind::Exceptional { .. } => "exceptional",
    }
}

fn wall_failure(e: WallError) -> Failure {
    match e {
        WallError::InvarianceViolation(msg) => Failure::Invariance(msg),
        WallError::Count(CountError::NotGeneralPosition(v)) => Failure::NotGeneral(v.to_string()),
        other => Failure::Validation(other.into()),
    }
}

fn parse_degree(s: &str) -> anyhow::Result<Degree> {
    if let Ok(d) = s.trim().parse::<usize>() {
        return Ok(Degree::projective(d));
    }
    let v: Value = match serde_json::from_str(s) {
        Ok(v) => v,
        Err(_) => {
            let text = std::fs::read_to_string(s).with_context(|| format!("degree {s:?} is neither JSON nor a readable file"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {s}"))?
        }
    };
    Ok(io::degree_from_json(&v)?)
}

fn load_points(job: &Job, degree: &Degree, pts: &PointArgs) -> anyhow::Result<PointConfiguration> {
    let n = minimum_marks(degree, job.genus);
    let p = match &pts.points {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            io::points_from_json(&serde_json::from_str(&text)?)?
        }
        None => random_configuration(n, 20, job.seed),
    };
    if p.len() != n {
        bail!("{} points given, but genus {} and degree of size {} need {n}", p.len(), job.genus, degree.size());
    }
    if p.has_coincident_points() {
        bail!("two points coincide");
    }
    Ok(p)
}

fn counter(job: &Job, degree: &Degree) -> anyhow::Result<Counter> {
    let cat = io::load_or_enumerate(job.cache_dir.as_deref(), job.genus, degree, 0)?;
    Ok(Counter::from_catalog(Arc::new(cat)))
}

fn count_with_perturbation(
    counter: &Counter,
    points: PointConfiguration,
    pts: &PointArgs,
    seed: u64,
) -> Result<(PointConfiguration, CountReport), Failure> {
    let eps = pts.perturb.as_deref().map(io::parse_rational).transpose().map_err(anyhow::Error::from)?;
    let mut p = points;
    for attempt in 0..32u64 {
        match counter.count(&p, WallPolicy::Reject) {
            Ok(r) => return Ok((p, r)),
            Err(CountError::NotGeneralPosition(v)) => match &eps {
                None => return Err(Failure::NotGeneral(v.to_string())),
                Some(eps) => p = perturb(&p, eps, seed.wrapping_add(attempt)),
            },
            Err(e) => return Err(Failure::Validation(e.into())),
        }
    }
    Err(Failure::Validation(anyhow!("no general configuration found within the perturbation radius")))
}

fn emit(job: &Job, text: &str) -> Result<(), Failure> {
    match &job.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

const PANEL: f64 = 240.0;
const COLUMNS: usize = 4;

fn f(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// One panel per curve, y pointing up, fitted to the vertices and marks.
fn svg(curves: &[(PlaneCurve, u64)]) -> String {
    let cols = curves.len().clamp(1, COLUMNS);
    let rows = curves.len().div_ceil(COLUMNS).max(1);
    let (w, h) = (cols as f64 * PANEL, rows as f64 * PANEL);
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    for (i, (c, mult)) in curves.iter().enumerate() {
        let (ox, oy) = ((i % COLUMNS) as f64 * PANEL, (i / COLUMNS) as f64 * PANEL);
        panel(&mut s, c, *mult, i, ox, oy);
    }
    s.push_str("</svg>\n");
    s
}

fn panel(s: &mut String, c: &PlaneCurve, mult: u64, i: usize, ox: f64, oy: f64) {
    let pts: Vec<(f64, f64)> = c.vertices.iter().chain(&c.marks).map(|p| (f(&p[0]), f(&p[1]))).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.2 * span;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let scale = PANEL / (span + 2.0 * pad);
    let tx = |x: f64| ox + PANEL / 2.0 + (x - cx) * scale;
    let ty = |y: f64| oy + PANEL / 2.0 - (y - cy) * scale;
    let vert = |v: usize| (f(&c.vertices[v][0]), f(&c.vertices[v][1]));

    writeln!(s, r#"<g><clipPath id="p{i}"><rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}"/></clipPath>"#).unwrap();
    writeln!(s, r#"<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" fill="none" stroke="lightgray"/>"#).unwrap();
    writeln!(s, r#"<g clip-path="url(#p{i})" stroke="black" stroke-width="1.5" fill="none">"#).unwrap();
    let mut labels = Vec::new();
    for &(a, b, w) in &c.segments {
        let ((ax, ay), (bx, by)) = (vert(a), vert(b));
        line(s, tx(ax), ty(ay), tx(bx), ty(by));
        if w > 1 {
            labels.push((tx((ax + bx) / 2.0), ty((ay + by) / 2.0), w));
        }
    }
    for &(v, d, w) in &c.rays {
        let (vx, vy) = vert(v);
        let norm = ((d.x * d.x + d.y * d.y) as f64).sqrt();
        let len = 3.0 * (span + 2.0 * pad);
        let (ex, ey) = (vx + d.x as f64 / norm * len, vy + d.y as f64 / norm * len);
        line(s, tx(vx), ty(vy), tx(ex), ty(ey));
        if w > 1 {
            let l = 0.6 * pad.max(span * 0.1);
            labels.push((tx(vx + d.x as f64 / norm * l), ty(vy + d.y as f64 / norm * l), w));
        }
    }
    s.push_str("</g>\n");
    for (x, y, w) in labels {
        writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="11" fill="blue">{w}</text>"#, x + 3.0, y - 3.0).unwrap();
    }
    for m in &c.marks {
        writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="red"/>"#, tx(f(&m[0])), ty(f(&m[1]))).unwrap();
    }
    writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="11">mult {mult}</text>"#, ox + 4.0, oy + 14.0).unwrap();
    s.push_str("</g>\n");
}

fn line(s: &mut String, ax: f64, ay: f64, bx: f64, by: f64) {
    writeln!(s, r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}"/>"#).unwrap();
}
