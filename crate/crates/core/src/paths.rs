//! Greedy classification of the Gaussian primes of a norm segment into
//! "paths", and the audits that measure the claimed properties of that
//! classification.
//!
//! A path starts at the lowest unclassified prime. It is extended by the
//! lowest unclassified prime (order `(norm, a, b)`) of larger norm that lies
//! outside the open disk of radius `g(N(head))` around the current head.
//! When no such prime remains in the segment the path is closed and a new one
//! starts. Every prime of the segment ends up in exactly one path.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{euclid_gap_squared, sieve_octant_with, GaussianPrime, NormSegment, SieveOptions};
use crate::error::{Error, Result};
use crate::gapmodels::{GapKind, GapModel};

/// Coefficient shared by the path-count bounds (4/π rounded).
pub const BOUND_COEFFICIENT: f64 = 1.27;

/// True when `q` lies on or outside the circle of radius `radius` about `p`.
#[inline]
pub fn outside_disk(p: &GaussianPrime, q: &GaussianPrime, radius: f64) -> bool {
    (euclid_gap_squared(p, q) as f64).sqrt() >= radius
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    /// 1-based construction order.
    pub index: usize,
    pub members: Vec<GaussianPrime>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Euclidean length of each step, first to last.
    pub fn step_lengths(&self) -> Vec<f64> {
        self.members
            .windows(2)
            .map(|w| (euclid_gap_squared(&w[0], &w[1]) as f64).sqrt())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub segment: NormSegment,
    pub model: GapModel,
    pub include_axis: bool,
    pub paths: Vec<Path>,
}

impl PathDecomposition {
    pub fn count(&self) -> usize {
        self.paths.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.paths.iter().map(Path::len).collect()
    }

    pub fn total_members(&self) -> usize {
        self.paths.iter().map(Path::len).sum()
    }

    /// Maps each classified prime to the index of its path.
    pub fn path_index_of(&self) -> HashMap<GaussianPrime, usize> {
        let mut out = HashMap::with_capacity(self.total_members());
        for path in &self.paths {
            for p in &path.members {
                out.insert(*p, path.index);
            }
        }
        out
    }
}

/// Finds the next unclassified slot at or after `i`, compressing as it goes.
fn next_open(next: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while next[root] != root {
        root = next[root];
    }
    let mut cur = i;
    while next[cur] != root {
        let up = next[cur];
        next[cur] = root;
        cur = up;
    }
    root
}

/// Runs the greedy construction over an already sieved, sorted prime list.
pub fn build_paths_from(
    primes: &[GaussianPrime],
    segment: NormSegment,
    model: GapModel,
    include_axis: bool,
) -> Result<PathDecomposition> {
    model.validate()?;
    if primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("prime list must be strictly sorted by (norm, a, b)"));
    }
    if let Some(p) = primes.iter().find(|p| !segment.contains(p.norm)) {
        return Err(Error::precondition(format!("{p} lies outside {segment}")));
    }

    let n = primes.len();
    // next[i] == i means slot i is unclassified; slot n is a sentinel.
    let mut next: Vec<usize> = (0..=n).collect();
    let mut paths = Vec::new();

    let mut start = next_open(&mut next, 0);
    while start < n {
        next[start] = start + 1;
        let mut members = vec![primes[start]];
        let mut head = start;
        loop {
            let h = primes[head];
            let radius = model.eval(h.norm as f64);
            let mut i = next_open(&mut next, head + 1);
            while i < n && (primes[i].norm <= h.norm || !outside_disk(&h, &primes[i], radius)) {
                i = next_open(&mut next, i + 1);
            }
            if i == n {
                break;
            }
            next[i] = i + 1;
            members.push(primes[i]);
            head = i;
        }
        paths.push(Path {
            index: paths.len() + 1,
            members,
        });
        start = next_open(&mut next, 0);
    }

    Ok(PathDecomposition {
        segment,
        model,
        include_axis,
        paths,
    })
}

/// Sieves the segment (off-axis primes only) and classifies it into paths.
pub fn build_paths(segment: NormSegment, model: GapModel) -> Result<PathDecomposition> {
    build_paths_with(segment, model, &SieveOptions::default())
}

pub fn build_paths_with(
    segment: NormSegment,
    model: GapModel,
    opts: &SieveOptions,
) -> Result<PathDecomposition> {
    let primes = sieve_octant_with(segment, opts)?;
    build_paths_from(&primes, segment, model, opts.include_axis)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub path_index: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Measured properties of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub path_count: usize,
    pub prime_count: usize,
    pub sizes: Vec<usize>,
    pub disjoint: bool,
    pub coverage: bool,
    /// Consecutive members whose norm does not strictly increase.
    pub norm_increase_violations: usize,
    /// Consecutive members closer than `g` of the earlier one.
    pub step_exclusion_violations: usize,
    /// Members with some later member of the same path strictly inside their disk.
    pub forward_isolation_violations: usize,
    /// Members with some earlier member of the same path strictly inside their disk.
    pub backward_isolation_violations: usize,
    /// Whether `|P_i| >= |P_j|` for all `i < j`.
    pub monotone: bool,
    /// Number of pairs `i < j` with `|P_i| < |P_j|`.
    pub size_inversions: u64,
    /// Path indices `i` with `|P_i| < |P_(i+1)|`.
    pub adjacent_increases: Vec<usize>,
    pub step_stats: Vec<StepStats>,
}

impl AuditReport {
    /// Properties the construction guarantees; a failure here is a defect.
    pub fn hard_invariants_hold(&self) -> bool {
        self.disjoint
            && self.coverage
            && self.norm_increase_violations == 0
            && self.step_exclusion_violations == 0
    }
}

fn count_inversions(sizes: &[usize]) -> u64 {
    // Fenwick tree over size values: for each j, count earlier sizes < sizes[j].
    let max = sizes.iter().copied().max().unwrap_or(0);
    let mut tree = vec![0u64; max + 1];
    let mut total = 0;
    for &s in sizes {
        let mut i = s.saturating_sub(1);
        while i > 0 {
            total += tree[i];
            i &= i - 1;
        }
        let mut k = s;
        while k > 0 && k <= max {
            tree[k] += 1;
            k += k & k.wrapping_neg();
        }
    }
    total
}

/// Audits against a freshly sieved copy of the decomposition's segment.
pub fn audit_decomposition(d: &PathDecomposition) -> Result<AuditReport> {
    let opts = SieveOptions {
        include_axis: d.include_axis,
        ..SieveOptions::default()
    };
    let expected = sieve_octant_with(d.segment, &opts)?;
    Ok(audit_against(d, &expected))
}

/// Audits against an explicit list of the primes the paths should cover.
pub fn audit_against(d: &PathDecomposition, expected: &[GaussianPrime]) -> AuditReport {
    let mut seen: HashMap<GaussianPrime, usize> = HashMap::with_capacity(expected.len());
    let mut disjoint = true;
    for path in &d.paths {
        for p in &path.members {
            if seen.insert(*p, path.index).is_some() {
                disjoint = false;
            }
        }
    }
    let coverage = seen.len() == expected.len() && expected.iter().all(|p| seen.contains_key(p));

    let mut norm_increase_violations = 0;
    let mut step_exclusion_violations = 0;
    let mut forward_isolation_violations = 0;
    let mut backward_isolation_violations = 0;
    let mut step_stats = Vec::new();

    for path in &d.paths {
        let m = &path.members;
        for w in m.windows(2) {
            if w[1].norm <= w[0].norm {
                norm_increase_violations += 1;
            }
            if !outside_disk(&w[0], &w[1], d.model.eval(w[0].norm as f64)) {
                step_exclusion_violations += 1;
            }
        }

        let roots: Vec<f64> = m.iter().map(|p| (p.norm as f64).sqrt()).collect();
        for (k, p) in m.iter().enumerate() {
            let g = d.model.eval(p.norm as f64);
            // |sqrt(N_i) - sqrt(N_k)| is a lower bound on the distance; members
            // are sorted by norm so both scans can stop early.
            let forward = m[k + 1..]
                .iter()
                .zip(&roots[k + 1..])
                .take_while(|(_, r)| *r - roots[k] < g)
                .any(|(q, _)| !outside_disk(p, q, g));
            let backward = m[..k]
                .iter()
                .zip(&roots[..k])
                .rev()
                .take_while(|(_, r)| roots[k] - *r < g)
                .any(|(q, _)| !outside_disk(p, q, g));
            forward_isolation_violations += forward as usize;
            backward_isolation_violations += backward as usize;
        }

        let steps = path.step_lengths();
        if !steps.is_empty() {
            let min = steps.iter().copied().fold(f64::INFINITY, f64::min);
            let max = steps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = steps.iter().sum::<f64>() / steps.len() as f64;
            step_stats.push(StepStats {
                path_index: path.index,
                min,
                max,
                mean,
            });
        }
    }

    let sizes = d.sizes();
    let adjacent_increases: Vec<usize> = sizes
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] < w[1])
        .map(|(i, _)| i + 1)
        .collect();
    let size_inversions = count_inversions(&sizes);

    AuditReport {
        path_count: d.count(),
        prime_count: d.total_members(),
        monotone: size_inversions == 0,
        sizes,
        disjoint,
        coverage,
        norm_increase_violations,
        step_exclusion_violations,
        forward_isolation_violations,
        backward_isolation_violations,
        size_inversions,
        adjacent_increases,
        step_stats,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCountBound {
    pub kind: GapKind,
    pub exponent: u32,
    pub bound_value: f64,
    pub error_const: f64,
}

/// Closed-form upper bound on the number of paths covering the decade
/// `[10^(A-1), 10^A)`:
///
/// * RH: `1.27 c 10^(A/2) + E`
/// * Cramér: `1.27 c A + E`
/// * BHP: `1.27 10^(A/2 + delta) / A + E`
pub fn path_count_bound(
    kind: GapKind,
    exponent: u32,
    c: f64,
    delta: f64,
    error_const: f64,
) -> Result<PathCountBound> {
    if exponent < 1 {
        return Err(Error::precondition("segment exponent A must be >= 1"));
    }
    let a = exponent as f64;
    let bound_value = match kind {
        GapKind::Rh => BOUND_COEFFICIENT * c * 10f64.powf(a / 2.0),
        GapKind::Cramer => BOUND_COEFFICIENT * c * a,
        GapKind::Bhp => BOUND_COEFFICIENT * 10f64.powf(a / 2.0 + delta) / a,
        GapKind::Const => {
            return Err(Error::Unsupported("the constant gap model has no path-count bound".into()))
        }
    } + error_const;
    Ok(PathCountBound {
        kind,
        exponent,
        bound_value,
        error_const,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountComparison {
    pub measured: usize,
    pub bound: f64,
    pub satisfied: bool,
    pub ratio: f64,
}

impl CountComparison {
    pub fn new(measured: usize, bound: f64) -> Self {
        CountComparison {
            measured,
            bound,
            satisfied: (measured as f64) < bound,
            ratio: measured as f64 / bound,
        }
    }
}

pub fn compare_count(d: &PathDecomposition, b: &PathCountBound) -> CountComparison {
    CountComparison::new(d.count(), b.bound_value)
}

/// Result of an isolation query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Isolation {
    /// The nearest other Gaussian prime, at the reported distance.
    Nearest {
        dist_squared: u64,
        distance: f64,
        neighbor: (i64, i64),
    },
    /// No other Gaussian prime within the search bound.
    ExceedsBound { bound: f64 },
}

impl Isolation {
    /// Lower bound on the isolation radius implied by this result.
    pub fn radius_at_least(&self) -> f64 {
        match self {
            Isolation::Nearest { distance, .. } => *distance,
            Isolation::ExceedsBound { bound } => *bound,
        }
    }
}

/// Lattice offsets with `0 < dx^2 + dy^2 <= r2`, ordered by `(d^2, dx, dy)`.
pub(crate) fn offsets_within(r2: u64) -> Vec<(i64, i64, u64)> {
    let r = r2.isqrt() as i64;
    let mut out = Vec::new();
    for dx in -r..=r {
        for dy in -r..=r {
            let d2 = (dx * dx + dy * dy) as u64;
            if d2 > 0 && d2 <= r2 {
                out.push((dx, dy, d2));
            }
        }
    }
    out.sort_by_key(|&(dx, dy, d2)| (d2, dx, dy));
    out
}

/// Distance from `p` to the nearest other Gaussian prime anywhere in the
/// plane, searched up to `search_bound` by direct primality queries.
pub fn isolation_radius(p: &GaussianPrime, search_bound: f64) -> Result<Isolation> {
    if !(search_bound > 0.0) || !search_bound.is_finite() {
        return Err(Error::precondition("search bound must be positive and finite"));
    }
    let r = search_bound.floor() as u64;
    let reach = |c: u64| c as u128 + r as u128;
    let far = reach(p.a) * reach(p.a) + reach(p.b) * reach(p.b);
    if far >= crate::arith::NORM_CAP as u128 {
        return Err(Error::domain(format!(
            "disk of radius {search_bound} around {p} reaches norms beyond 2^63"
        )));
    }
    let r2 = (search_bound * search_bound).floor() as u64;
    let (x0, y0) = (p.a as i64, p.b as i64);
    for (dx, dy, d2) in offsets_within(r2) {
        let (x, y) = (x0 + dx, y0 + dy);
        if x == 0 && y == 0 {
            continue;
        }
        let (a, b) = crate::arith::fold(x, y);
        if crate::arith::gaussian_prime_unchecked(a, b) {
            return Ok(Isolation::Nearest {
                dist_squared: d2,
                distance: (d2 as f64).sqrt(),
                neighbor: (x, y),
            });
        }
    }
    Ok(Isolation::ExceedsBound { bound: search_bound })
}

/// One triangle `(p_(m,n), p_(m+1,n), p')` where `p'` is the member of path
/// `n+1` nearest to `p_(m,n)`. `theta` is the angle at `p_(m,n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleRecord {
    pub path_index: usize,
    pub member_index: usize,
    pub s1_sq: u64,
    pub s2_sq: u64,
    pub s3_sq: u64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub theta: f64,
    pub within_bound: bool,
    pub witness: bool,
}

impl TriangleRecord {
    /// `|s3^2 - (s1^2 + s2^2 - 2 s1 s2 cos theta)|`, relative to `max(1, s3^2)`.
    pub fn cosine_residual(&self) -> f64 {
        let rhs = self.s1 * self.s1 + self.s2 * self.s2 - 2.0 * self.s1 * self.s2 * self.theta.cos();
        (self.s3_sq as f64 - rhs).abs() / (self.s3_sq as f64).max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleAudit {
    pub step_bound: f64,
    pub records: Vec<TriangleRecord>,
    pub within_bound: usize,
    /// Triangles with `s1, s2 <= M` but `s3 > sqrt(2) M`.
    pub witnesses: usize,
    pub max_cosine_residual: f64,
}

/// Third side of a triangle with sides `s1`, `s2` enclosing angle `theta`.
pub fn law_of_cosines(s1: f64, s2: f64, theta: f64) -> f64 {
    (s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * theta.cos()).max(0.0).sqrt()
}

pub fn triangle_audit(d: &PathDecomposition, step_bound: f64) -> Result<TriangleAudit> {
    if d.paths.len() < 2 {
        return Err(Error::precondition("triangle audit needs at least two paths"));
    }
    let mut records = Vec::new();
    for pair in d.paths.windows(2) {
        let (cur, nxt) = (&pair[0], &pair[1]);
        for (m, w) in cur.members.windows(2).enumerate() {
            let (p, q) = (w[0], w[1]);
            let near = nxt
                .members
                .iter()
                .min_by_key(|r| (euclid_gap_squared(&p, r), r.sort_key()))
                .copied()
                .expect("paths are non-empty");
            let ux = q.a as f64 - p.a as f64;
            let uy = q.b as f64 - p.b as f64;
            let vx = near.a as f64 - p.a as f64;
            let vy = near.b as f64 - p.b as f64;
            let theta = (ux * vy - uy * vx).abs().atan2(ux * vx + uy * vy);
            let s1_sq = euclid_gap_squared(&p, &q);
            let s2_sq = euclid_gap_squared(&p, &near);
            let s3_sq = euclid_gap_squared(&q, &near);
            let (s1, s2, s3) = ((s1_sq as f64).sqrt(), (s2_sq as f64).sqrt(), (s3_sq as f64).sqrt());
            let within_bound = s1 <= step_bound && s2 <= step_bound;
            let witness = within_bound && s3_sq as f64 > 2.0 * step_bound * step_bound;
            records.push(TriangleRecord {
                path_index: cur.index,
                member_index: m + 1,
                s1_sq,
                s2_sq,
                s3_sq,
                s1,
                s2,
                s3,
                theta,
                within_bound,
                witness,
            });
        }
    }
    let max_cosine_residual = records.iter().map(TriangleRecord::cosine_residual).fold(0.0, f64::max);
    Ok(TriangleAudit {
        step_bound,
        within_bound: records.iter().filter(|r| r.within_bound).count(),
        witnesses: records.iter().filter(|r| r.witness).count(),
        max_cosine_residual,
        records,
    })
}
