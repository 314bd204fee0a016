use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmoat_core::gapmodels::{GapKind, GapModel, LogBase};
use gmoat_core::NormSegment;
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "gmoat", version, about = "Gaussian-prime sieving, path classification and moat analysis")]
pub struct Cli {
    /// Cap on worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Enumerate first-octant Gaussian primes in a norm segment.
    Sieve(SieveArgs),
    #[command(subcommand)]
    Paths(PathsCmd),
    #[command(subcommand)]
    Moat(MoatCmd),
    #[command(subcommand)]
    Walk(WalkCmd),
    #[command(subcommand)]
    Circle(CircleCmd),
    #[command(subcommand)]
    Cache(CacheCmd),
}

impl Command {
    pub fn name(&self) -> String {
        let sub = match self {
            Command::Sieve(_) => return "sieve".into(),
            Command::Paths(c) => match c {
                PathsCmd::Build(_) => "paths build",
                PathsCmd::Audit(_) => "paths audit",
                PathsCmd::Bound(_) => "paths bound",
                PathsCmd::Compare(_) => "paths compare",
                PathsCmd::Isolate(_) => "paths isolate",
                PathsCmd::Triangles(_) => "paths triangles",
            },
            Command::Moat(c) => match c {
                MoatCmd::Component(_) => "moat component",
                MoatCmd::Escape(_) => "moat escape",
                MoatCmd::Minimax(_) => "moat minimax",
                MoatCmd::Factorial(_) => "moat factorial",
            },
            Command::Walk(c) => match c {
                WalkCmd::Run(_) => "walk run",
                WalkCmd::Dominance(_) => "walk dominance",
            },
            Command::Circle(c) => match c {
                CircleCmd::Count(_) => "circle count",
                CircleCmd::Density(_) => "circle density",
            },
            Command::Cache(c) => match c {
                CacheCmd::Write(_) => "cache write",
                CacheCmd::Read(_) => "cache read",
                CacheCmd::Verify(_) => "cache verify",
            },
        };
        sub.into()
    }
}

/// Where a report goes. `-` or a bare flag means stdout.
#[derive(Args, Debug, Serialize, Clone, Default)]
pub struct Output {
    /// Emit JSON (to FILE, or stdout).
    #[arg(long, num_args = 0..=1, default_missing_value = "-", value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Emit CSV (to FILE, or stdout).
    #[arg(long, num_args = 0..=1, default_missing_value = "-", value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct GapArgs {
    #[arg(long, value_enum, default_value = "cramer")]
    pub gap: GapChoice,
    /// Leading constant for rh/cramer.
    #[arg(long = "gap-c", default_value_t = 1.0)]
    pub gap_c: f64,
    /// Exponent offset for bhp.
    #[arg(long = "gap-delta", default_value_t = gmoat_core::gapmodels::DEFAULT_DELTA)]
    pub gap_delta: f64,
    /// Radius for the const model.
    #[arg(long = "gap-const", default_value_t = 1.0)]
    pub gap_const: f64,
    /// Use base-10 logarithms inside the gap functions.
    #[arg(long)]
    pub log10: bool,
}

#[derive(ValueEnum, Debug, Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GapChoice {
    Rh,
    Cramer,
    Bhp,
    Const,
}

impl GapChoice {
    pub fn kind(self) -> GapKind {
        match self {
            GapChoice::Rh => GapKind::Rh,
            GapChoice::Cramer => GapKind::Cramer,
            GapChoice::Bhp => GapKind::Bhp,
            GapChoice::Const => GapKind::Const,
        }
    }
}

impl GapArgs {
    pub fn model(&self) -> GapModel {
        GapModel {
            kind: self.gap.kind(),
            c: self.gap_c,
            delta: self.gap_delta,
            const_value: self.gap_const,
            log_base: if self.log10 { LogBase::Ten } else { LogBase::Natural },
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SieveArgs {
    /// Norm segment, e.g. `10^3:10^4` or `1000:10000`.
    #[arg(long, value_parser = parse_segment)]
    pub segment: NormSegment,
    #[arg(long)]
    pub include_axis: bool,
    /// Reuse or populate the segment cache under GMOAT_CACHE_DIR.
    #[arg(long)]
    pub cache: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum PathsCmd {
    /// Greedy path decomposition of a segment.
    Build(PathsBuildArgs),
    /// Audit a decomposition stored as CSV.
    Audit(PathsAuditArgs),
    /// Closed-form path-count bound for a decade exponent.
    Bound(PathsBoundArgs),
    /// Measured path count against the closed-form bound.
    Compare(PathsCompareArgs),
    /// Distance to the nearest other Gaussian prime.
    Isolate(PathsIsolateArgs),
    /// Law-of-cosines triangles between consecutive paths.
    Triangles(PathsTrianglesArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct PathsBuildArgs {
    #[arg(long, value_parser = parse_segment)]
    pub segment: NormSegment,
    #[command(flatten)]
    pub gap: GapArgs,
    #[arg(long)]
    pub include_axis: bool,
    #[arg(long)]
    pub cache: bool,
    /// CSV destination (path_index, member_index, a, b, norm, step_dist_prev).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
    /// Render the paths as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PathsAuditArgs {
    /// Decomposition CSV written by `paths build`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Step bound for the triangle audit.
    #[arg(long = "M", default_value_t = 10.0)]
    pub m: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct PathsBoundArgs {
    /// Decade exponent A (segment [10^(A-1), 10^A)).
    #[arg(long = "A")]
    pub a: u32,
    #[command(flatten)]
    pub gap: GapArgs,
    /// Stand-in for the error term E''.
    #[arg(long = "error-const", default_value_t = 0.0)]
    pub error_const: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct PathsCompareArgs {
    #[arg(long, value_parser = parse_segment)]
    pub segment: NormSegment,
    /// Exponent for the bound; inferred from a decade segment when omitted.
    #[arg(long = "A")]
    pub a: Option<u32>,
    #[command(flatten)]
    pub gap: GapArgs,
    #[arg(long = "error-const", default_value_t = 0.0)]
    pub error_const: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct PathsIsolateArgs {
    /// Lattice point `a,b`.
    #[arg(long, value_parser = parse_point)]
    pub point: (u64, u64),
    #[arg(long, default_value_t = 20.0)]
    pub bound: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct PathsTrianglesArgs {
    #[arg(long, value_parser = parse_segment)]
    pub segment: NormSegment,
    #[command(flatten)]
    pub gap: GapArgs,
    #[arg(long = "M", default_value_t = 10.0)]
    pub m: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum MoatCmd {
    /// Component of a seed under a squared step bound.
    Component(MoatComponentArgs),
    /// Widest step at which the seed's component stays finite.
    Escape(MoatEscapeArgs),
    /// Minimax hop between two primes.
    Minimax(MoatMinimaxArgs),
    /// Scan the square around n!+1 for Gaussian primes.
    Factorial(MoatFactorialArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct MoatComponentArgs {
    #[arg(long, value_parser = parse_point, default_value = "1,1")]
    pub seed: (u64, u64),
    #[arg(long)]
    pub k2: u64,
    #[arg(long, value_parser = parse_count, default_value = "1e8")]
    pub region: u64,
    #[arg(long)]
    pub include_axis: bool,
    #[command(flatten)]
    pub output: Output,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MoatEscapeArgs {
    #[arg(long, value_parser = parse_point, default_value = "1,1")]
    pub seed: (u64, u64),
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub region: u64,
    #[arg(long)]
    pub include_axis: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct MoatMinimaxArgs {
    #[arg(long, value_parser = parse_point)]
    pub from: (u64, u64),
    #[arg(long, value_parser = parse_point)]
    pub to: (u64, u64),
    #[arg(long, value_parser = parse_count, default_value = "1e4")]
    pub region: u64,
    /// Only consider hops with squared length up to this cap.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub include_axis: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct MoatFactorialArgs {
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum WalkCmd {
    /// Bounded-step increasing-norm walk.
    Run(WalkRunArgs),
    /// Gap growth against the path-count bound, per decade exponent.
    Dominance(WalkDominanceArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct WalkRunArgs {
    #[arg(long = "M")]
    pub m: f64,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    pub region: u64,
    #[arg(long, value_parser = parse_point, default_value = "1,1")]
    pub start: (u64, u64),
    #[arg(long, value_enum, default_value = "nearest")]
    pub strategy: StrategyChoice,
    /// Allow steps that do not increase the norm.
    #[arg(long)]
    pub allow_norm_decrease: bool,
    #[arg(long)]
    pub include_axis: bool,
    /// Decomposition CSV used to tag steps with path indices.
    #[arg(long)]
    pub paths: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Serialize, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyChoice {
    Nearest,
    GreedyMaxNorm,
}

#[derive(Args, Debug, Serialize)]
pub struct WalkDominanceArgs {
    #[arg(long = "M")]
    pub m: f64,
    /// Inclusive exponent range `lo:hi`.
    #[arg(long = "A", value_parser = parse_range, default_value = "2:50")]
    pub a: (u32, u32),
    /// Restrict to one model (default: rh, cramer and bhp).
    #[arg(long, value_enum)]
    pub gap: Option<GapChoice>,
    #[arg(long = "gap-c", default_value_t = 1.0)]
    pub gap_c: f64,
    #[arg(long = "gap-delta", default_value_t = gmoat_core::gapmodels::DEFAULT_DELTA)]
    pub gap_delta: f64,
    #[arg(long = "error-const", default_value_t = 0.0)]
    pub error_const: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum CircleCmd {
    /// Lattice points in the disk of radius R.
    Count(CircleCountArgs),
    /// Octant lattice points and Gaussian primes in a segment.
    Density(CircleDensityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CircleCountArgs {
    #[arg(long = "R")]
    pub r: f64,
    /// Also fit the error exponent over integer radii `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    pub fit: Option<(u32, u32)>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct CircleDensityArgs {
    #[arg(long, value_parser = parse_segment)]
    pub segment: NormSegment,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum CacheCmd {
    /// Sieve a segment and store it.
    Write(CacheWriteArgs),
    /// Load and validate a cache file.
    Read(CacheFileArgs),
    /// Validate a cache file and compare it with a fresh sieve.
    Verify(CacheFileArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CacheWriteArgs {
    #[arg(long, value_parser = parse_segment)]
    pub segment: NormSegment,
    #[arg(long)]
    pub include_axis: bool,
    /// Destination; relative paths resolve under GMOAT_CACHE_DIR when set.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct CacheFileArgs {
    /// Cache file; relative paths resolve under GMOAT_CACHE_DIR when set.
    #[arg(long)]
    pub file: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

/// Integers as `12345`, `1_000`, `10^6` or `1e6` / `2.5e3`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    let bad = || format!("invalid integer {s:?}");
    if let Some((base, exp)) = s.split_once('^') {
        let base: u64 = base.parse().map_err(|_| bad())?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        return base.checked_pow(exp).ok_or_else(|| format!("{s} overflows"));
    }
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let exp: i64 = exp.parse().map_err(|_| bad())?;
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let mut value: u128 = digits.parse().map_err(|_| bad())?;
        let shift = exp - frac.len() as i64;
        if shift < 0 {
            let div = 10u128.checked_pow((-shift) as u32).ok_or_else(bad)?;
            if value % div != 0 {
                return Err(format!("{s} is not an integer"));
            }
            value /= div;
        } else {
            value = 10u128
                .checked_pow(shift as u32)
                .and_then(|p| value.checked_mul(p))
                .ok_or_else(|| format!("{s} overflows"))?;
        }
        return u64::try_from(value).map_err(|_| format!("{s} overflows"));
    }
    s.parse().map_err(|_| bad())
}

/// `lo:hi` with each side accepted by [`parse_count`].
pub fn parse_segment(s: &str) -> Result<NormSegment, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("segment {s:?} must look like LO:HI, e.g. 10^3:10^4"))?;
    NormSegment::new(parse_count(lo)?, parse_count(hi)?).map_err(|e| e.to_string())
}

pub fn parse_point(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("point {s:?} must look like A,B"))?;
    Ok((parse_count(a)?, parse_count(b)?))
}

pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("range {s:?} must look like LO:HI"))?;
    let lo = u32::try_from(parse_count(lo)?).map_err(|e| e.to_string())?;
    let hi = u32::try_from(parse_count(hi)?).map_err(|e| e.to_string())?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}
