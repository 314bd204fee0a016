use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, Result};
use gmoat_core::arith::{sieve_octant_with, GaussianPrime, NormSegment, SieveOptions};
use gmoat_core::circlecount::{fit_error_exponent, lattice_count, octant_prime_density};
use gmoat_core::gapmodels::GapKind;
use gmoat_core::moat::{component, factorial_square_check, widest_escape, HopGraph, Region, StepBound};
use gmoat_core::paths::{
    audit_decomposition, build_paths_from, compare_count, isolation_radius, path_count_bound, triangle_audit,
};
use gmoat_core::persistence::{read_segment, verify_segment, write_segment, SegmentFlags};
use gmoat_core::walk::{dominance_table, run_walk, verify_walk, Strategy, WalkConfig};
use gmoat_core::PathDecomposition;
use serde_json::{json, Value};

use crate::args::*;
use crate::pathcsv;
use crate::report::{Report, Run, Table};
use crate::svg::{self, Layer};

/// A report whose hard invariants failed. Maps to exit code 2.
#[derive(Debug)]
pub struct Breach(pub String);

impl std::fmt::Display for Breach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invariant breach: {}", self.0)
    }
}

impl std::error::Error for Breach {}

/// Largest region for which `moat minimax` builds the all-pairs graph.
const ALL_PAIRS_REGION: u64 = 200_000;

pub fn dispatch(cmd: &Command, run: &mut Run) -> Result<()> {
    match cmd {
        Command::Sieve(a) => sieve(a, run),
        Command::Paths(c) => match c {
            PathsCmd::Build(a) => paths_build(a, run),
            PathsCmd::Audit(a) => paths_audit(a, run),
            PathsCmd::Bound(a) => paths_bound(a, run),
            PathsCmd::Compare(a) => paths_compare(a, run),
            PathsCmd::Isolate(a) => paths_isolate(a, run),
            PathsCmd::Triangles(a) => paths_triangles(a, run),
        },
        Command::Moat(c) => match c {
            MoatCmd::Component(a) => moat_component(a, run),
            MoatCmd::Escape(a) => moat_escape(a, run),
            MoatCmd::Minimax(a) => moat_minimax(a, run),
            MoatCmd::Factorial(a) => moat_factorial(a, run),
        },
        Command::Walk(c) => match c {
            WalkCmd::Run(a) => walk_run(a, run),
            WalkCmd::Dominance(a) => walk_dominance(a, run),
        },
        Command::Circle(c) => match c {
            CircleCmd::Count(a) => circle_count(a, run),
            CircleCmd::Density(a) => circle_density(a, run),
        },
        Command::Cache(c) => match c {
            CacheCmd::Write(a) => cache_write(a, run),
            CacheCmd::Read(a) => cache_read(a, run),
            CacheCmd::Verify(a) => cache_verify(a, run),
        },
    }
}

fn cache_root() -> PathBuf {
    std::env::var_os("GMOAT_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".gmoat-cache"))
}

fn resolve_cache_file(file: &FsPath) -> PathBuf {
    match std::env::var_os("GMOAT_CACHE_DIR") {
        Some(root) if file.is_relative() => PathBuf::from(root).join(file),
        _ => file.to_path_buf(),
    }
}

fn default_cache_file(segment: NormSegment, include_axis: bool) -> PathBuf {
    let axis = if include_axis { "axis" } else { "offaxis" };
    cache_root().join(format!("octant_{}_{}_{axis}.gmseg", segment.lo, segment.hi))
}

/// Sieves the segment, optionally through the on-disk cache.
fn primes_for(segment: NormSegment, include_axis: bool, cache: bool, run: &mut Run) -> Result<Vec<GaussianPrime>> {
    let opts = SieveOptions {
        include_axis,
        ..SieveOptions::default()
    };
    if !cache {
        return Ok(sieve_octant_with(segment, &opts)?);
    }
    let file = default_cache_file(segment, include_axis);
    if file.exists() {
        run.read_input(&file)?;
        let (seg, flags, primes) = read_segment(&file)?;
        if seg != segment || flags.include_axis != include_axis {
            bail!("cache file {} holds a different segment", file.display());
        }
        return Ok(primes);
    }
    let primes = sieve_octant_with(segment, &opts)?;
    write_segment(&file, &primes, segment, SegmentFlags { include_axis })?;
    Ok(primes)
}

fn prime_rows(primes: &[GaussianPrime]) -> Table {
    let mut t = Table::new(vec!["a", "b", "norm"]);
    for p in primes {
        t.push(vec![p.a.to_string(), p.b.to_string(), p.norm.to_string()]);
    }
    t
}

fn pairs(primes: &[GaussianPrime]) -> Vec<(u64, u64)> {
    primes.iter().map(|p| (p.a, p.b)).collect()
}

fn sieve(a: &SieveArgs, run: &mut Run) -> Result<()> {
    let primes = primes_for(a.segment, a.include_axis, a.cache, run)?;
    let mut table = prime_rows(&primes);
    table.meta.push(("segment".into(), format!("{}:{}", a.segment.lo, a.segment.hi)));
    let report = Report::new(json!({
        "segment": a.segment,
        "include_axis": a.include_axis,
        "count": primes.len(),
        "primes": primes.iter().map(|p| [p.a, p.b]).collect::<Vec<_>>(),
    }))?;
    run.emit(report.with_table(table), &a.output)
}

fn decomposition_summary(d: &PathDecomposition) -> Value {
    json!({
        "segment": d.segment,
        "model": d.model,
        "include_axis": d.include_axis,
        "path_count": d.count(),
        "total_members": d.total_members(),
        "sizes": d.sizes(),
    })
}

fn path_layers(d: &PathDecomposition) -> Vec<Layer> {
    let mut layers = Vec::new();
    for (i, p) in d.paths.iter().enumerate() {
        let points = pairs(&p.members);
        layers.push(Layer::Line {
            points: points.clone(),
            color: svg::palette(i),
        });
        layers.push(Layer::Dots {
            points,
            color: svg::palette(i),
            radius: 1.5,
        });
    }
    layers
}

fn paths_build(a: &PathsBuildArgs, run: &mut Run) -> Result<()> {
    let primes = primes_for(a.segment, a.include_axis, a.cache, run)?;
    let d = build_paths_from(&primes, a.segment, a.gap.model(), a.include_axis)?;
    let table = pathcsv::table(&d)?;
    if let Some(out) = &a.out {
        let rendered = crate::report::render_csv(&table, &run.manifest())?;
        crate::report::write_to(out, rendered.as_bytes())?;
    }
    let mut report = Report::new(decomposition_summary(&d))?.with_table(table);
    if let Some(path) = &a.svg {
        let title = format!("paths over [{}, {})", d.segment.lo, d.segment.hi);
        report.svg = Some((path.clone(), svg::render(&title, &path_layers(&d))));
    }
    run.emit(report, &a.output)
}

fn paths_audit(a: &PathsAuditArgs, run: &mut Run) -> Result<()> {
    let bytes = run.read_input(&a.input)?;
    let d = pathcsv::parse(&String::from_utf8(bytes)?)?;
    let audit = audit_decomposition(&d)?;
    let triangles = if d.paths.len() >= 2 {
        let t = triangle_audit(&d, a.m)?;
        Some(json!({
            "step_bound": t.step_bound,
            "triangles": t.records.len(),
            "within_bound": t.within_bound,
            "witnesses": t.witnesses,
            "max_cosine_residual": t.max_cosine_residual,
        }))
    } else {
        None
    };
    let mut table = Table::new(vec!["path_index", "size", "step_min", "step_max", "step_mean"]);
    for (i, size) in audit.sizes.iter().enumerate() {
        let stats = audit.step_stats.iter().find(|s| s.path_index == i + 1);
        let f = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
        table.push(vec![
            (i + 1).to_string(),
            size.to_string(),
            f(stats.map(|s| s.min)),
            f(stats.map(|s| s.max)),
            f(stats.map(|s| s.mean)),
        ]);
    }
    let hard = audit.hard_invariants_hold();
    let mut data = serde_json::to_value(&audit)?;
    let obj = data.as_object_mut().unwrap();
    obj.insert("hard_invariants_hold".into(), json!(hard));
    obj.insert("segment".into(), json!(d.segment));
    obj.insert("model".into(), json!(d.model));
    obj.insert("triangle_audit".into(), triangles.unwrap_or(Value::Null));
    run.emit(Report::new(data)?.with_table(table), &a.output)?;
    if !hard {
        return Err(Breach(format!(
            "disjoint={} coverage={} norm_violations={} step_violations={}",
            audit.disjoint, audit.coverage, audit.norm_increase_violations, audit.step_exclusion_violations
        ))
        .into());
    }
    Ok(())
}

fn paths_bound(a: &PathsBoundArgs, run: &mut Run) -> Result<()> {
    let b = path_count_bound(a.gap.gap.kind(), a.a, a.gap.gap_c, a.gap.gap_delta, a.error_const)?;
    run.emit(Report::new(b)?, &a.output)
}

fn infer_exponent(segment: NormSegment) -> Option<u32> {
    (1..=18).find(|&e| NormSegment::decade(e).is_ok_and(|d| d == segment))
}

fn paths_compare(a: &PathsCompareArgs, run: &mut Run) -> Result<()> {
    let exponent = match a.a.or_else(|| infer_exponent(a.segment)) {
        Some(e) => e,
        None => bail!("segment {} is not a decade; pass --A", a.segment),
    };
    let bound = path_count_bound(a.gap.gap.kind(), exponent, a.gap.gap_c, a.gap.gap_delta, a.error_const)?;
    let primes = primes_for(a.segment, false, false, run)?;
    let d = build_paths_from(&primes, a.segment, a.gap.model(), false)?;
    let cmp = compare_count(&d, &bound);
    let mut data = serde_json::to_value(&cmp)?;
    let obj = data.as_object_mut().unwrap();
    obj.insert("segment".into(), json!(a.segment));
    obj.insert("exponent".into(), json!(exponent));
    obj.insert("model".into(), json!(d.model));
    obj.insert("prime_count".into(), json!(primes.len()));
    run.emit(Report::new(data)?, &a.output)
}

fn paths_isolate(a: &PathsIsolateArgs, run: &mut Run) -> Result<()> {
    let p = GaussianPrime::new(a.point.0, a.point.1)?;
    let iso = isolation_radius(&p, a.bound)?;
    let data = json!({
        "point": [p.a, p.b],
        "search_bound": a.bound,
        "isolation": iso,
        "radius_at_least": iso.radius_at_least(),
    });
    run.emit(Report::new(data)?, &a.output)
}

fn paths_triangles(a: &PathsTrianglesArgs, run: &mut Run) -> Result<()> {
    let primes = primes_for(a.segment, false, false, run)?;
    let d = build_paths_from(&primes, a.segment, a.gap.model(), false)?;
    let audit = triangle_audit(&d, a.m)?;
    let mut table = Table::new(vec![
        "path_index",
        "member_index",
        "s1",
        "s2",
        "s3",
        "theta",
        "within_bound",
        "witness",
        "cosine_residual",
    ]);
    for r in &audit.records {
        table.push(vec![
            r.path_index.to_string(),
            r.member_index.to_string(),
            format!("{:.12}", r.s1),
            format!("{:.12}", r.s2),
            format!("{:.12}", r.s3),
            format!("{:.12}", r.theta),
            r.within_bound.to_string(),
            r.witness.to_string(),
            format!("{:.3e}", r.cosine_residual()),
        ]);
    }
    let data = json!({
        "segment": a.segment,
        "model": d.model,
        "path_count": d.count(),
        "step_bound": audit.step_bound,
        "triangles": audit.records.len(),
        "within_bound": audit.within_bound,
        "witnesses": audit.witnesses,
        "max_cosine_residual": audit.max_cosine_residual,
    });
    run.emit(Report::new(data)?.with_table(table), &a.output)
}

fn moat_component(a: &MoatComponentArgs, run: &mut Run) -> Result<()> {
    let region = Region::new(a.region, a.include_axis)?;
    let seed = GaussianPrime::new(a.seed.0, a.seed.1)?;
    let c = component(&seed, StepBound::new(a.k2)?, region)?;
    let mut table = prime_rows(&c.members);
    table.meta.push(("k2".into(), a.k2.to_string()));
    table.meta.push(("region".into(), a.region.to_string()));
    table.meta.push(("exhausted".into(), c.exhausted.to_string()));
    let data = json!({
        "seed": c.seed,
        "k_squared": a.k2,
        "region": c.region,
        "size": c.members.len(),
        "exhausted": c.exhausted,
        "boundary_gap_squared": c.boundary_gap_squared,
        "moat_width": c.moat_width(),
        "max_norm": c.members.last().map(|p| p.norm),
        "members": c.members.iter().map(|p| [p.a, p.b]).collect::<Vec<_>>(),
    });
    let mut report = Report::new(data)?.with_table(table);
    if let Some(path) = &a.svg {
        // Background: region primes out to a little past the component.
        let reach = c.members.last().map_or(4, |p| p.norm);
        let limit = (reach.isqrt() + 4 + a.k2.isqrt() * 2).pow(2).min(a.region).max(3);
        let background = sieve_octant_with(
            NormSegment::new(2, limit)?,
            &SieveOptions {
                include_axis: a.include_axis,
                ..SieveOptions::default()
            },
        )?;
        let layers = [
            Layer::Dots {
                points: pairs(&background),
                color: "#bbbbbb",
                radius: 1.5,
            },
            Layer::Dots {
                points: pairs(&c.members),
                color: "#d62728",
                radius: 2.5,
            },
        ];
        let title = format!("component of {} at k^2 = {}", c.seed, a.k2);
        report.svg = Some((path.clone(), svg::render(&title, &layers)));
    }
    run.emit(report, &a.output)
}

fn moat_escape(a: &MoatEscapeArgs, run: &mut Run) -> Result<()> {
    let region = Region::new(a.region, a.include_axis)?;
    let seed = GaussianPrime::new(a.seed.0, a.seed.1)?;
    run.emit(Report::new(widest_escape(&seed, region)?)?, &a.output)
}

fn moat_minimax(a: &MoatMinimaxArgs, run: &mut Run) -> Result<()> {
    let region = Region::new(a.region, a.include_axis)?;
    if a.cap.is_none() && a.region > ALL_PAIRS_REGION {
        bail!("region {} is too large for all pairs; pass --cap", a.region);
    }
    let p = GaussianPrime::new(a.from.0, a.from.1)?;
    let q = GaussianPrime::new(a.to.0, a.to.1)?;
    let graph = HopGraph::build(region, a.cap)?;
    let hop = graph.minimax(&p, &q)?;
    let data = json!({
        "from": [p.a, p.b],
        "to": [q.a, q.b],
        "region": region,
        "cap_squared": a.cap,
        "vertices": graph.len(),
        "hop": hop,
        "value": hop.value(),
    });
    run.emit(Report::new(data)?, &a.output)
}

fn moat_factorial(a: &MoatFactorialArgs, run: &mut Run) -> Result<()> {
    let r = factorial_square_check(a.n)?;
    let mut table = Table::new(vec!["a", "b"]);
    for (x, y) in &r.primes_in_square {
        table.push(vec![x.to_string(), y.to_string()]);
    }
    run.emit(Report::new(r)?.with_table(table), &a.output)
}

fn walk_run(a: &WalkRunArgs, run: &mut Run) -> Result<()> {
    let strategy = match a.strategy {
        StrategyChoice::Nearest => Strategy::Nearest,
        StrategyChoice::GreedyMaxNorm => Strategy::GreedyMaxNorm,
    };
    let mut cfg = WalkConfig::new(a.m, a.region, strategy);
    cfg.require_increasing_norm = !a.allow_norm_decrease;
    cfg.include_axis = a.include_axis;
    let decomposition = match &a.paths {
        Some(file) => {
            let bytes = run.read_input(file)?;
            Some(pathcsv::parse(&String::from_utf8(bytes)?)?)
        }
        None => None,
    };
    let start = GaussianPrime::new(a.start.0, a.start.1)?;
    let report = run_walk(&cfg, &start, decomposition.as_ref())?;
    if let Err(e) = verify_walk(&report) {
        return Err(Breach(format!("walk failed its own check: {e}")).into());
    }
    let mut table = Table::new(vec!["step_index", "a", "b", "norm", "step_squared", "path_index"]);
    for (i, p) in report.steps.iter().enumerate() {
        let sq = if i == 0 {
            String::new()
        } else {
            report.step_squared[i - 1].to_string()
        };
        let path = report
            .step_paths
            .as_ref()
            .and_then(|v| v[i])
            .map(|x| x.to_string())
            .unwrap_or_default();
        table.push(vec![i.to_string(), p.a.to_string(), p.b.to_string(), p.norm.to_string(), sq, path]);
    }
    table.meta.push(("terminated_reason".into(), serde_json::to_string(&report.terminated_reason)?));
    let svg_doc = a.svg.as_ref().map(|path| {
        let points = pairs(&report.steps);
        let layers = [
            Layer::Line {
                points: points.clone(),
                color: "#1f77b4",
            },
            Layer::Dots {
                points,
                color: "#d62728",
                radius: 2.0,
            },
        ];
        (path.clone(), svg::render(&format!("walk with M = {}", a.m), &layers))
    });
    let mut data = serde_json::to_value(&report)?;
    data.as_object_mut()
        .unwrap()
        .insert("step_count".into(), json!(report.step_squared.len()));
    let mut out = Report::new(data)?.with_table(table);
    out.svg = svg_doc;
    run.emit(out, &a.output)
}

fn walk_dominance(a: &WalkDominanceArgs, run: &mut Run) -> Result<()> {
    let kinds: Vec<GapKind> = match a.gap {
        Some(g) => vec![g.kind()],
        None => GapKind::BOUNDED.to_vec(),
    };
    let exponents: Vec<u32> = (a.a.0..=a.a.1).collect();
    let table = dominance_table(&exponents, &kinds, a.m, a.gap_c, a.gap_delta, a.error_const)?;
    let mut csv = Table::new(vec!["exponent", "kind", "lhs", "rhs", "log10_lhs", "log10_rhs", "dominates"]);
    for r in &table.rows {
        csv.push(vec![
            r.exponent.to_string(),
            r.kind.name().to_string(),
            format!("{:e}", r.lhs),
            format!("{:e}", r.rhs),
            format!("{:.12}", r.log10_lhs),
            format!("{:.12}", r.log10_rhs),
            r.dominates.to_string(),
        ]);
    }
    run.emit(Report::new(table)?.with_table(csv), &a.output)
}

fn circle_count(a: &CircleCountArgs, run: &mut Run) -> Result<()> {
    let c = lattice_count(a.r)?;
    let mut data = serde_json::to_value(c)?;
    let obj = data.as_object_mut().unwrap();
    obj.insert("error_bound".into(), json!(c.error_bound()));
    obj.insert("within_bound".into(), json!(c.within_bound()));
    if let Some((lo, hi)) = a.fit {
        let exponent = fit_error_exponent(lo as u64, hi as u64, 1)?;
        obj.insert("fit_range".into(), json!([lo, hi]));
        obj.insert("fitted_error_exponent".into(), json!(exponent));
    }
    run.emit(Report::new(data)?, &a.output)
}

fn circle_density(a: &CircleDensityArgs, run: &mut Run) -> Result<()> {
    run.emit(Report::new(octant_prime_density(a.segment)?)?, &a.output)
}

fn cache_write(a: &CacheWriteArgs, run: &mut Run) -> Result<()> {
    let file = match &a.file {
        Some(f) => resolve_cache_file(f),
        None => default_cache_file(a.segment, a.include_axis),
    };
    let primes = sieve_octant_with(
        a.segment,
        &SieveOptions {
            include_axis: a.include_axis,
            ..SieveOptions::default()
        },
    )?;
    write_segment(&file, &primes, a.segment, SegmentFlags {
        include_axis: a.include_axis,
    })?;
    let data = json!({
        "file": file.display().to_string(),
        "segment": a.segment,
        "include_axis": a.include_axis,
        "count": primes.len(),
    });
    run.emit(Report::new(data)?, &a.output)
}

fn cache_read(a: &CacheFileArgs, run: &mut Run) -> Result<()> {
    let file = resolve_cache_file(&a.file);
    run.read_input(&file)?;
    let (segment, flags, primes) = read_segment(&file)?;
    let data = json!({
        "file": file.display().to_string(),
        "segment": segment,
        "include_axis": flags.include_axis,
        "count": primes.len(),
        "primes": primes.iter().map(|p| [p.a, p.b]).collect::<Vec<_>>(),
    });
    run.emit(Report::new(data)?.with_table(prime_rows(&primes)), &a.output)
}

fn cache_verify(a: &CacheFileArgs, run: &mut Run) -> Result<()> {
    let file = resolve_cache_file(&a.file);
    run.read_input(&file)?;
    let (segment, flags, count) = verify_segment(&file)?;
    let data = json!({
        "file": file.display().to_string(),
        "segment": segment,
        "include_axis": flags.include_axis,
        "count": count,
        "matches_fresh_sieve": true,
    });
    run.emit(Report::new(data)?, &a.output)
}
