//! Percolation over the Gaussian primes: connected components under a step
//! bound, the widest step at which the component of a seed stays finite,
//! minimax hops between two primes, and the factorial empty-square scan.
//!
//! Primes are stored folded into the first octant. Two folded primes are
//! adjacent when *any* lattice image of one lies within the step bound of the
//! other, so components here are exactly the folded plane components.
//! All distances are exact squared integers.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::arith::{
    fold, gaussian_prime_unchecked, is_prime_unchecked, min_image_dist_squared, sieve_octant_with,
    two_square_decomposition, GaussianPrime, NormSegment, SieveOptions, NORM_CAP,
};
use crate::error::{Error, Result};
use crate::paths::offsets_within;
use crate::unionfind::UnionFind;

/// Squared Euclidean step limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StepBound {
    pub k_squared: u64,
}

impl StepBound {
    pub fn new(k_squared: u64) -> Result<Self> {
        if k_squared == 0 {
            return Err(Error::precondition("step bound k^2 must be >= 1"));
        }
        Ok(StepBound { k_squared })
    }
}

/// The part of the plane a percolation query may look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// Exclusive norm ceiling.
    pub limit: u64,
    pub include_axis: bool,
}

impl Region {
    pub fn new(limit: u64, include_axis: bool) -> Result<Self> {
        if limit < 3 || limit > NORM_CAP {
            return Err(Error::domain(format!("region limit {limit} outside [3, 2^63]")));
        }
        Ok(Region { limit, include_axis })
    }

    /// Whether the folded point `(a, b)` (with `b <= a`) is a prime of the region.
    #[inline]
    pub fn is_vertex(&self, a: u64, b: u64) -> bool {
        if b == 0 && !self.include_axis {
            return false;
        }
        let n = a as u128 * a as u128 + b as u128 * b as u128;
        n < self.limit as u128 && gaussian_prime_unchecked(a, b)
    }

    /// Whether some point within distance `sqrt(k2)` of a point of norm
    /// `norm` has norm `>= limit`, i.e. `(sqrt(norm) + sqrt(k2))^2 >= limit`.
    pub fn near_boundary(&self, norm: u64, k2: u64) -> bool {
        let (n, k, l) = (norm as u128, k2 as u128, self.limit as u128);
        let s = n + k;
        if s >= l {
            return true;
        }
        let t = l - s;
        4 * n * k >= t * t
    }

    /// Smallest `k2 >= 1` for which [`Self::near_boundary`] holds.
    pub fn boundary_reach(&self, norm: u64) -> u64 {
        let guess = ((self.limit as f64).sqrt() - (norm as f64).sqrt()).max(0.0).powi(2) as u64;
        let mut t = guess.saturating_sub(2).max(1);
        while !self.near_boundary(norm, t) {
            t += 1;
        }
        while t > 1 && self.near_boundary(norm, t - 1) {
            t -= 1;
        }
        t
    }

    fn vertex_of(&self, p: &GaussianPrime) -> Result<GaussianPrime> {
        let c = p.canonical();
        if c.norm >= self.limit {
            return Err(Error::precondition(format!(
                "{p} has norm {} outside the region (limit {})",
                c.norm, self.limit
            )));
        }
        if !self.is_vertex(c.a, c.b) {
            return Err(Error::precondition(format!(
                "{p} is not a prime of this region (axis primes need include_axis)"
            )));
        }
        Ok(c)
    }

    fn sieve(&self) -> Result<Vec<GaussianPrime>> {
        sieve_octant_with(
            NormSegment::new(2, self.limit)?,
            &SieveOptions {
                include_axis: self.include_axis,
                ..SieveOptions::default()
            },
        )
    }
}

/// Iterates the region primes within squared distance `(lo, hi]` of `p`,
/// as `(prime, squared distance to that image)`, in increasing distance.
fn neighbors<'a>(
    region: &'a Region,
    p: GaussianPrime,
    offsets: &'a [(i64, i64, u64)],
) -> impl Iterator<Item = (GaussianPrime, u64)> + 'a {
    offsets.iter().filter_map(move |&(dx, dy, d2)| {
        let (a, b) = fold(p.a as i64 + dx, p.b as i64 + dy);
        (a | b != 0 && region.is_vertex(a, b)).then(|| (GaussianPrime::new_unchecked(a, b), d2))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoatComponent {
    pub seed: GaussianPrime,
    pub step: StepBound,
    pub region: Region,
    /// Members sorted by `(norm, a, b)`.
    pub members: Vec<GaussianPrime>,
    /// False when the closure reaches within the step bound of the region edge.
    pub exhausted: bool,
    /// Smallest squared distance from a member to a non-member region prime.
    /// Only computed for exhausted components.
    pub boundary_gap_squared: Option<u64>,
}

impl MoatComponent {
    pub fn moat_width(&self) -> Option<f64> {
        self.boundary_gap_squared.map(|g| (g as f64).sqrt())
    }
}

/// Closure of `seed` under hops of squared length `<= step.k_squared`.
pub fn component(seed: &GaussianPrime, step: StepBound, region: Region) -> Result<MoatComponent> {
    let seed = region.vertex_of(seed)?;
    let k2 = StepBound::new(step.k_squared)?.k_squared;
    let offsets = offsets_within(k2);

    let mut seen: HashSet<GaussianPrime> = HashSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    let mut exhausted = true;
    while let Some(p) = queue.pop_front() {
        if region.near_boundary(p.norm, k2) {
            exhausted = false;
        }
        for (q, _) in neighbors(&region, p, &offsets) {
            if seen.insert(q) {
                queue.push_back(q);
            }
        }
    }

    let boundary_gap_squared = if exhausted {
        boundary_gap(&region, &seen, k2)
    } else {
        None
    };
    let mut members: Vec<GaussianPrime> = seen.into_iter().collect();
    members.sort_unstable();
    Ok(MoatComponent {
        seed,
        step,
        region,
        members,
        exhausted,
        boundary_gap_squared,
    })
}

fn boundary_gap(region: &Region, members: &HashSet<GaussianPrime>, k2: u64) -> Option<u64> {
    let mut cap = 4 * k2 + 16;
    let ceiling = 4 * region.limit as u128;
    loop {
        let offsets: Vec<_> = offsets_within(cap).into_iter().filter(|o| o.2 > k2).collect();
        let mut best: Option<u64> = None;
        for &p in members {
            for (q, d2) in neighbors(region, p, &offsets) {
                if best.is_some_and(|b| d2 >= b) {
                    break;
                }
                if !members.contains(&q) {
                    best = Some(d2);
                    break;
                }
            }
        }
        if best.is_some() {
            return best;
        }
        if cap as u128 >= ceiling {
            return None;
        }
        cap *= 4;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub seed: GaussianPrime,
    pub region: Region,
    /// Largest realized squared distance whose component is finite.
    pub k_squared: u64,
    /// Smallest squared step at which the component reaches the region edge.
    pub escape_threshold: u64,
    pub component_size: usize,
    /// Squared width of the moat around the component at `k_squared`.
    pub moat_width_squared: Option<u64>,
}

/// Largest realized `k^2` for which the seed's component is exhausted.
///
/// Nodes are settled in order of their minimax distance from the seed; the
/// escape threshold is the smallest `max(minimax(u), reach(u))` over settled
/// nodes `u`, where `reach(u)` is the least `k^2` putting `u` near the edge.
pub fn widest_escape(seed: &GaussianPrime, region: Region) -> Result<EscapeReport> {
    let start = region.vertex_of(seed)?;
    let mut cap = 64u64;
    let threshold = loop {
        let t = escape_threshold(&region, start, cap);
        match t {
            Some(t) if t <= cap => break t,
            _ if cap as u128 >= 4 * region.limit as u128 => break t.unwrap_or(u64::MAX),
            _ => cap *= 4,
        }
    };

    let k_squared = largest_realized_below(&region, threshold)?.ok_or_else(|| {
        Error::Inconclusive(format!(
            "even the smallest step escapes region {} from {start}",
            region.limit
        ))
    })?;
    let comp = component(&start, StepBound::new(k_squared)?, region)?;
    if !comp.exhausted {
        return Err(Error::Invariant(format!(
            "component at k^2 = {k_squared} below threshold {threshold} is not exhausted"
        )));
    }
    Ok(EscapeReport {
        seed: start,
        region,
        k_squared,
        escape_threshold: threshold,
        component_size: comp.members.len(),
        moat_width_squared: comp.boundary_gap_squared,
    })
}

fn escape_threshold(region: &Region, start: GaussianPrime, cap: u64) -> Option<u64> {
    let offsets = offsets_within(cap);
    let mut settled: HashSet<GaussianPrime> = HashSet::new();
    let mut best_bottleneck: HashMap<GaussianPrime, u64> = HashMap::from([(start, 0)]);
    let mut heap = BinaryHeap::from([Reverse((0u64, start))]);
    let mut best: Option<u64> = None;
    while let Some(Reverse((b, p))) = heap.pop() {
        if best.is_some_and(|t| b >= t) {
            break;
        }
        if !settled.insert(p) {
            continue;
        }
        let t = b.max(region.boundary_reach(p.norm)).max(1);
        best = Some(best.map_or(t, |x| x.min(t)));
        for (q, d2) in neighbors(region, p, &offsets) {
            let nb = b.max(d2);
            if settled.contains(&q) {
                continue;
            }
            let e = best_bottleneck.entry(q).or_insert(u64::MAX);
            if nb < *e {
                *e = nb;
                heap.push(Reverse((nb, q)));
            }
        }
    }
    best
}

/// Whether some pair of region primes (with images) is exactly `sqrt(v)` apart.
fn realized(region: &Region, v: u64, candidates: &[GaussianPrime]) -> bool {
    let reps: Vec<(i64, i64)> = (0..=v.isqrt() as i64)
        .filter_map(|dx| {
            let rest = v - (dx * dx) as u64;
            let dy = rest.isqrt() as i64;
            ((dy * dy) as u64 == rest).then_some((dx, dy))
        })
        .collect();
    if reps.is_empty() {
        return false;
    }
    candidates.iter().any(|p| {
        reps.iter().any(|&(dx, dy)| {
            [(dx, dy), (dx, -dy), (-dx, dy), (-dx, -dy)].iter().any(|&(x, y)| {
                let (a, b) = fold(p.a as i64 + x, p.b as i64 + y);
                a | b != 0 && region.is_vertex(a, b)
            })
        })
    })
}

fn largest_realized_below(region: &Region, threshold: u64) -> Result<Option<u64>> {
    // Small distances are almost always realized near the origin, so probe a
    // bounded prefix of the region before scanning all of it.
    let probe = Region {
        limit: region.limit.min(1 << 20),
        ..*region
    };
    let mut passes = vec![probe.sieve()?];
    if probe.limit < region.limit {
        passes.push(Vec::new());
    }
    for pass in 0..passes.len() {
        if pass == 1 {
            passes[1] = region.sieve()?;
        }
        let found = (1..threshold).rev().find(|&v| realized(region, v, &passes[pass]));
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Answer of a minimax query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hop {
    /// The smallest possible largest hop, squared.
    Exact { hop_squared: u64 },
    /// Not connected using hops up to the graph's edge cap.
    Disconnected { cap_squared: Option<u64> },
}

impl Hop {
    pub fn value(&self) -> Option<f64> {
        match self {
            Hop::Exact { hop_squared } => Some((*hop_squared as f64).sqrt()),
            Hop::Disconnected { .. } => None,
        }
    }
}

/// Kruskal forest over the region primes. Union by rank without path
/// compression keeps each attach weight, so the minimax hop between two
/// primes is the largest attach weight on the way to their meeting point.
#[derive(Debug, Clone)]
pub struct HopGraph {
    pub region: Region,
    pub cap_squared: Option<u64>,
    pub vertices: Vec<GaussianPrime>,
    index: HashMap<GaussianPrime, usize>,
    parent: Vec<usize>,
    attach: Vec<u64>,
}

impl HopGraph {
    /// `cap_squared = None` uses every pair of primes (quadratic); otherwise
    /// only hops up to the cap are considered.
    pub fn build(region: Region, cap_squared: Option<u64>) -> Result<Self> {
        let vertices = region.sieve()?;
        let index: HashMap<GaussianPrime, usize> =
            vertices.iter().enumerate().map(|(i, p)| (*p, i)).collect();

        let mut edges: Vec<(u64, usize, usize)> = Vec::new();
        match cap_squared {
            None => {
                for i in 0..vertices.len() {
                    for j in i + 1..vertices.len() {
                        edges.push((min_image_dist_squared(&vertices[i], &vertices[j]), i, j));
                    }
                }
            }
            Some(cap) => {
                let offsets = offsets_within(cap);
                for (i, p) in vertices.iter().enumerate() {
                    for (q, d2) in neighbors(&region, *p, &offsets) {
                        let j = index[&q];
                        if i < j {
                            edges.push((d2, i, j));
                        }
                    }
                }
                // Several images of one pair may lie within the cap.
                edges.sort_unstable();
                edges.dedup_by_key(|e| (e.1, e.2));
            }
        }
        edges.sort_unstable();

        let mut uf = UnionFind::new(vertices.len());
        let mut attach = vec![u64::MAX; vertices.len()];
        for (w, i, j) in edges {
            if let Some((child, _)) = uf.union_no_compress(i, j) {
                attach[child] = w;
            }
        }
        Ok(HopGraph {
            region,
            cap_squared,
            index,
            parent: uf.into_parents(),
            vertices,
            attach,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn locate(&self, p: &GaussianPrime) -> Result<usize> {
        let c = p.canonical();
        self.index
            .get(&c)
            .copied()
            .ok_or_else(|| Error::precondition(format!("{p} is not a prime of the region")))
    }

    pub fn minimax(&self, p: &GaussianPrime, q: &GaussianPrime) -> Result<Hop> {
        let (mut x, mut y) = (self.locate(p)?, self.locate(q)?);
        let mut hop = 0;
        while x != y {
            // Climb from the side attached earlier; attach weights grow upwards.
            let (wx, wy) = (self.attach[x], self.attach[y]);
            if wx == u64::MAX && wy == u64::MAX {
                return Ok(Hop::Disconnected {
                    cap_squared: self.cap_squared,
                });
            }
            if wx <= wy {
                hop = hop.max(wx);
                x = self.parent[x];
            } else {
                hop = hop.max(wy);
                y = self.parent[y];
            }
        }
        Ok(Hop::Exact { hop_squared: hop })
    }
}

/// One-shot minimax query over all pairs of region primes.
pub fn minimax_hop(p: &GaussianPrime, q: &GaussianPrime, region: Region) -> Result<Hop> {
    HopGraph::build(region, None)?.minimax(p, q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorialReport {
    pub n: u64,
    pub factorial: u64,
    pub plus_one: u64,
    pub plus_one_prime: bool,
    pub plus_one_mod4: u64,
    pub minus_one_prime: bool,
    /// `n! + 1 = a^2 + b^2` with `a >= b >= 1`, when it exists.
    pub lift: Option<(u64, u64)>,
    /// Whether `n! + 1` is a prime `≡ 1 (mod 4)`.
    pub applicable: bool,
    /// Square `[x_lo, x_hi] x [y_lo, y_hi]`.
    pub square: [u64; 4],
    /// Gaussian primes found inside the square.
    pub primes_in_square: Vec<(u64, u64)>,
    /// True when nothing but (possibly) the lift lies in the square.
    pub empty_apart_from_lift: bool,
    pub notes: Vec<String>,
}

pub const MAX_FACTORIAL_N: u64 = 12;

/// Scans `[n! - n, n! + n] x [0, 2n]` for Gaussian primes.
pub fn factorial_square_check(n: u64) -> Result<FactorialReport> {
    if n == 0 || n > MAX_FACTORIAL_N {
        return Err(Error::domain(format!("n = {n} outside 1..={MAX_FACTORIAL_N}")));
    }
    let factorial: u64 = (1..=n).product();
    let plus_one = factorial + 1;
    let plus_one_prime = is_prime_unchecked(plus_one);
    let minus_one_prime = is_prime_unchecked(factorial - 1);
    let plus_one_mod4 = plus_one % 4;
    let lift = if plus_one_prime {
        two_square_decomposition(plus_one)
    } else {
        None
    };
    let applicable = plus_one_prime && plus_one_mod4 == 1;

    let mut notes = Vec::new();
    if !plus_one_prime {
        notes.push(format!("{n}!+1 = {plus_one} is not prime"));
    } else if plus_one_mod4 != 1 {
        notes.push(format!(
            "{n}!+1 = {plus_one} is ≡ {plus_one_mod4} (mod 4) and has no off-axis lift"
        ));
    }

    let square = [factorial.saturating_sub(n), factorial + n, 0, 2 * n];
    let mut primes_in_square = Vec::new();
    for x in square[0]..=square[1] {
        for y in square[2]..=square[3] {
            if (x, y) != (0, 0) && gaussian_prime_unchecked(x, y) {
                primes_in_square.push((x, y));
            }
        }
    }
    let empty_apart_from_lift = primes_in_square.iter().all(|&pt| Some(pt) == lift);
    if !primes_in_square.is_empty() {
        notes.push(format!("{} Gaussian primes inside the square", primes_in_square.len()));
    }
    Ok(FactorialReport {
        n,
        factorial,
        plus_one,
        plus_one_prime,
        plus_one_mod4,
        minus_one_prime,
        lift,
        applicable,
        square,
        primes_in_square,
        empty_apart_from_lift,
        notes,
    })
}
