//! Bounded-step walks over the Gaussian primes, and the table comparing the
//! growth of each gap model with the path-count bound it induces.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{fold, GaussianPrime, NORM_CAP};
use crate::error::{Error, Result};
use crate::gapmodels::GapKind;
use crate::moat::Region;
use crate::paths::{offsets_within, path_count_bound, PathDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Shortest step, ties by `(norm, a, b)`.
    Nearest,
    /// Largest norm, ties by shortest step.
    GreedyMaxNorm,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Strategy::Nearest),
            "greedy-max-norm" | "greedy_max_norm" | "greedy" => Ok(Strategy::GreedyMaxNorm),
            other => Err(Error::precondition(format!("unknown walk strategy {other:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Nearest => "nearest",
            Strategy::GreedyMaxNorm => "greedy-max-norm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Step bound, Euclidean.
    pub max_step: f64,
    pub region_limit: u64,
    pub strategy: Strategy,
    pub require_increasing_norm: bool,
    pub include_axis: bool,
}

impl WalkConfig {
    pub fn new(max_step: f64, region_limit: u64, strategy: Strategy) -> Self {
        WalkConfig {
            max_step,
            region_limit,
            strategy,
            require_increasing_norm: true,
            include_axis: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_step > 0.0) || !self.max_step.is_finite() {
            return Err(Error::precondition("step bound M must be positive and finite"));
        }
        if self.region_limit < 5 || self.region_limit > NORM_CAP {
            return Err(Error::precondition("region limit must be in [5, 2^63]"));
        }
        Ok(())
    }

    /// Largest integer squared step allowed by `M`.
    pub fn max_step_squared(&self) -> u64 {
        (self.max_step * self.max_step).floor() as u64
    }

    fn region(&self) -> Region {
        Region {
            limit: self.region_limit,
            include_axis: self.include_axis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    NoCandidate,
    RegionExit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkReport {
    pub config: WalkConfig,
    /// Visited primes (folded to the first octant), starting point first.
    pub steps: Vec<GaussianPrime>,
    /// Squared length of each step.
    pub step_squared: Vec<u64>,
    pub max_norm_reached: u64,
    pub terminated_reason: Termination,
    /// Squared step length to number of steps.
    pub step_length_histogram: BTreeMap<u64, usize>,
    /// Path index of each visited prime, when a decomposition was supplied.
    pub step_paths: Option<Vec<Option<usize>>>,
    /// Path index to number of visits.
    pub path_revisits: Option<BTreeMap<usize, usize>>,
}

pub fn run_walk(
    config: &WalkConfig,
    start: &GaussianPrime,
    decomposition: Option<&PathDecomposition>,
) -> Result<WalkReport> {
    config.validate()?;
    let start = start.canonical();
    let region = config.region();
    if !crate::arith::gaussian_prime_unchecked(start.a, start.b) {
        return Err(Error::precondition(format!("{start} is not a Gaussian prime")));
    }
    if !region.is_vertex(start.a, start.b) {
        return Err(Error::precondition(format!("{start} is outside the walk region")));
    }

    let m2 = config.max_step_squared();
    let offsets = offsets_within(m2);
    let mut steps = vec![start];
    let mut step_squared = Vec::new();
    let mut visited: HashSet<GaussianPrime> = HashSet::from([start]);
    let mut cur = start;

    let terminated_reason = loop {
        if m2 > 0 && region.near_boundary(cur.norm, m2) {
            break Termination::RegionExit;
        }
        let mut best: Option<(GaussianPrime, u64)> = None;
        for &(dx, dy, d2) in &offsets {
            let (a, b) = fold(cur.a as i64 + dx, cur.b as i64 + dy);
            if a | b == 0 || !region.is_vertex(a, b) {
                continue;
            }
            let q = GaussianPrime::new_unchecked(a, b);
            if visited.contains(&q) || (config.require_increasing_norm && q.norm <= cur.norm) {
                continue;
            }
            let better = match (config.strategy, best) {
                (_, None) => true,
                (Strategy::Nearest, Some((bq, bd))) => (d2, q.sort_key()) < (bd, bq.sort_key()),
                (Strategy::GreedyMaxNorm, Some((bq, bd))) => {
                    (q.norm > bq.norm) || (q.norm == bq.norm && (d2, q.sort_key()) < (bd, bq.sort_key()))
                }
            };
            if better {
                best = Some((q, d2));
            }
        }
        match best {
            None => break Termination::NoCandidate,
            Some((q, d2)) => {
                steps.push(q);
                step_squared.push(d2);
                visited.insert(q);
                cur = q;
            }
        }
    };

    let mut step_length_histogram = BTreeMap::new();
    for &d2 in &step_squared {
        *step_length_histogram.entry(d2).or_insert(0) += 1;
    }
    let (step_paths, path_revisits) = match decomposition {
        None => (None, None),
        Some(d) => {
            let owner: HashMap<GaussianPrime, usize> = d.path_index_of();
            let tags: Vec<Option<usize>> = steps.iter().map(|p| owner.get(p).copied()).collect();
            let mut visits = BTreeMap::new();
            for idx in tags.iter().flatten() {
                *visits.entry(*idx).or_insert(0) += 1;
            }
            (Some(tags), Some(visits))
        }
    };

    Ok(WalkReport {
        config: *config,
        max_norm_reached: steps.iter().map(|p| p.norm).max().unwrap_or(start.norm),
        steps,
        step_squared,
        terminated_reason,
        step_length_histogram,
        step_paths,
        path_revisits,
    })
}

/// Re-checks a walk report from scratch: every visited point is a prime of
/// the region, every step respects the bound (allowing any lattice image),
/// norms increase when required, and the termination reason is consistent.
pub fn verify_walk(report: &WalkReport) -> std::result::Result<(), String> {
    let cfg = &report.config;
    let region = cfg.region();
    let m2 = cfg.max_step_squared();
    for p in &report.steps {
        if p.norm != p.a * p.a + p.b * p.b || !region.is_vertex(p.a, p.b) {
            return Err(format!("{p} is not a prime of the region"));
        }
    }
    if report.steps.len() != report.step_squared.len() + 1 {
        return Err("step count mismatch".into());
    }
    for (w, &d2) in report.steps.windows(2).zip(&report.step_squared) {
        let min_d2 = crate::arith::min_image_dist_squared(&w[0], &w[1]);
        if min_d2 > m2 || d2 > m2 || min_d2 > d2 {
            return Err(format!("step {} -> {} exceeds the bound", w[0], w[1]));
        }
        if cfg.require_increasing_norm && w[1].norm <= w[0].norm {
            return Err(format!("step {} -> {} does not increase the norm", w[0], w[1]));
        }
    }
    let last = report.steps.last().expect("walk has a start");
    let near = m2 > 0 && region.near_boundary(last.norm, m2);
    if near != (report.terminated_reason == Termination::RegionExit) {
        return Err("termination reason inconsistent with final position".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceRow {
    pub exponent: u32,
    pub kind: GapKind,
    pub lhs: f64,
    pub rhs: f64,
    pub log10_lhs: f64,
    pub log10_rhs: f64,
    pub dominates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceTable {
    pub max_step: f64,
    pub c: f64,
    pub delta: f64,
    pub error_const: f64,
    pub rows: Vec<DominanceRow>,
    /// Smallest exponent from which each model dominates for the rest of the range.
    pub flip_at: BTreeMap<String, Option<u32>>,
}

impl DominanceTable {
    pub fn rows_for(&self, kind: GapKind) -> impl Iterator<Item = &DominanceRow> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }
}

fn log10_sum(terms: &[f64]) -> f64 {
    // log10 of a sum of positive terms given as log10 values.
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| 10f64.powf(t - max)).sum::<f64>().log10()
}

/// `g(10^(A-1))` with `log 10^k = k`, against `(bound(A) + 1) * M`.
///
/// Values are compared through their base-10 logarithms so the table stays
/// meaningful where the raw quantities overflow.
pub fn dominance_row(kind: GapKind, exponent: u32, m: f64, c: f64, delta: f64, e: f64) -> Result<DominanceRow> {
    if exponent < 1 {
        return Err(Error::precondition("exponent A must be >= 1"));
    }
    if !(c > 0.0) || !(delta >= 0.0) {
        return Err(Error::precondition("need c > 0 and delta >= 0"));
    }
    let a = exponent as f64;
    let k = a - 1.0;
    let log10_lhs = match kind {
        GapKind::Rh => c.log10() + k / 2.0 + k.log10(),
        GapKind::Cramer => c.log10() + 2.0 * k.log10(),
        GapKind::Bhp => k * (0.5 + delta),
        GapKind::Const => return Err(Error::Unsupported("no dominance row for the constant model".into())),
    };
    let log_bound = match kind {
        GapKind::Rh => 1.27f64.log10() + c.log10() + a / 2.0,
        GapKind::Cramer => 1.27f64.log10() + c.log10() + a.log10(),
        GapKind::Bhp => 1.27f64.log10() + a / 2.0 + delta - a.log10(),
        GapKind::Const => unreachable!(),
    };
    // Keep the direct evaluation consistent with the closed form.
    let bound = path_count_bound(kind, exponent, c, delta, 0.0)?.bound_value;
    debug_assert!(!bound.is_finite() || (bound.log10() - log_bound).abs() < 1e-9);

    let mut terms = vec![log_bound, 0.0];
    if e > 0.0 {
        terms.push(e.log10());
    }
    let mut log10_rhs = log10_sum(&terms) + m.log10();
    if e < 0.0 {
        let inner = 10f64.powf(log10_sum(&terms)) + e;
        log10_rhs = if inner > 0.0 { inner.log10() + m.log10() } else { f64::NEG_INFINITY };
    }
    Ok(DominanceRow {
        exponent,
        kind,
        lhs: 10f64.powf(log10_lhs),
        rhs: 10f64.powf(log10_rhs),
        log10_lhs,
        log10_rhs,
        dominates: log10_lhs > log10_rhs,
    })
}

pub fn dominance_table(
    exponents: &[u32],
    kinds: &[GapKind],
    m: f64,
    c: f64,
    delta: f64,
    error_const: f64,
) -> Result<DominanceTable> {
    if exponents.is_empty() {
        return Err(Error::precondition("exponent range is empty"));
    }
    if !(m >= 0.0) {
        return Err(Error::precondition("M must be >= 0"));
    }
    let mut rows = Vec::new();
    let mut flip_at = BTreeMap::new();
    for &kind in kinds {
        let kind_rows: Vec<DominanceRow> = exponents
            .iter()
            .map(|&a| dominance_row(kind, a, m, c, delta, error_const))
            .collect::<Result<_>>()?;
        let flip = kind_rows
            .iter()
            .rposition(|r| !r.dominates)
            .map_or(Some(0), |i| kind_rows.get(i + 1).map(|_| i + 1))
            .map(|i| kind_rows[i].exponent);
        flip_at.insert(kind.name().to_string(), flip);
        rows.extend(kind_rows);
    }
    Ok(DominanceTable {
        max_step: m,
        c,
        delta,
        error_const,
        rows,
        flip_at,
    })
}
