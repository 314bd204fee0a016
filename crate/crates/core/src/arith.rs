//! Ordinary and Gaussian primality, octant folding and segmented sieving
//! over norm ranges.
//!
//! Off-axis primes are stored in canonical first-octant form `1 <= b <= a`.
//! Axis primes `(q, 0)` with `q ≡ 3 (mod 4)` are only produced when asked for.
//! Every norm handled here is strictly below [`NORM_CAP`].

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exclusive upper bound on every norm (and ordinary integer) in the domain.
pub const NORM_CAP: u64 = 1 << 63;

/// Default cap on the estimated size of a sieve result.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

const SIEVE_BLOCK: u64 = 1 << 18;

// Deterministic for all n < 3.3 * 10^24, far beyond the 2^63 domain.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Primality without the domain check. Correct for every `u64`.
pub(crate) fn is_prime_unchecked(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test for `0 <= n < 2^63`.
pub fn is_prime_u64(n: u64) -> Result<bool> {
    if n >= NORM_CAP {
        return Err(Error::domain(format!("{n} is outside [0, 2^63)")));
    }
    Ok(is_prime_unchecked(n))
}

fn norm_checked(a: u64, b: u64) -> Result<u64> {
    let n = a as u128 * a as u128 + b as u128 * b as u128;
    if n >= NORM_CAP as u128 {
        return Err(Error::domain(format!("norm of ({a}, {b}) exceeds 2^63")));
    }
    Ok(n as u64)
}

/// Classification of a non-negative lattice point whose norm is known to be
/// in the domain.
pub(crate) fn gaussian_prime_unchecked(a: u64, b: u64) -> bool {
    match (a, b) {
        (0, 0) => false,
        (0, q) | (q, 0) => q % 4 == 3 && is_prime_unchecked(q),
        (a, b) => is_prime_unchecked(a * a + b * b),
    }
}

/// Whether `a + bi` (with `a, b >= 0`) is a Gaussian prime.
///
/// Negative coordinates are rejected; fold by symmetry first (see [`fold`]).
pub fn is_gaussian_prime(a: i64, b: i64) -> Result<bool> {
    if a < 0 || b < 0 {
        return Err(Error::domain(format!(
            "({a}, {b}) has a negative coordinate; fold to the first quadrant first"
        )));
    }
    if a == 0 && b == 0 {
        return Err(Error::domain("the origin is not a Gaussian integer of interest"));
    }
    norm_checked(a as u64, b as u64)?;
    Ok(gaussian_prime_unchecked(a as u64, b as u64))
}

/// Folds an arbitrary lattice point into the closed first octant `0 <= y <= x`
/// using the eight symmetries of the square lattice.
#[inline]
pub fn fold(x: i64, y: i64) -> (u64, u64) {
    let (a, b) = (x.unsigned_abs(), y.unsigned_abs());
    if b > a {
        (b, a)
    } else {
        (a, b)
    }
}

/// A Gaussian prime `a + bi` with non-negative coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussianPrime {
    pub a: u64,
    pub b: u64,
    pub norm: u64,
}

impl GaussianPrime {
    /// Validates `(a, b)` as a Gaussian prime.
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a > i64::MAX as u64 || b > i64::MAX as u64 {
            return Err(Error::domain(format!("({a}, {b}) out of range")));
        }
        if !is_gaussian_prime(a as i64, b as i64)? {
            return Err(Error::precondition(format!("({a}, {b}) is not a Gaussian prime")));
        }
        Ok(Self::new_unchecked(a, b))
    }

    /// Builds the value without testing primality.
    #[inline]
    pub fn new_unchecked(a: u64, b: u64) -> Self {
        GaussianPrime { a, b, norm: a * a + b * b }
    }

    pub fn is_axis(&self) -> bool {
        self.a == 0 || self.b == 0
    }

    /// The first-octant representative of this prime's symmetry class.
    pub fn canonical(&self) -> Self {
        let (a, b) = fold(self.a as i64, self.b as i64);
        Self::new_unchecked(a, b)
    }

    pub fn dist_squared(&self, other: &GaussianPrime) -> u64 {
        euclid_gap_squared(self, other)
    }

    pub(crate) fn sort_key(&self) -> (u64, u64, u64) {
        (self.norm, self.a, self.b)
    }
}

impl Ord for GaussianPrime {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for GaussianPrime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GaussianPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Half-open range of norms `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormSegment {
    pub lo: u64,
    pub hi: u64,
}

impl NormSegment {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo < 2 || lo >= hi {
            return Err(Error::precondition(format!(
                "segment [{lo}, {hi}) must satisfy 2 <= lo < hi"
            )));
        }
        if hi > NORM_CAP {
            return Err(Error::domain(format!("segment upper bound {hi} exceeds 2^63")));
        }
        Ok(NormSegment { lo, hi })
    }

    /// The decade `[10^(A-1), 10^A)`. `A = 1` starts at 2 since norm 1 is a unit.
    pub fn decade(exponent: u32) -> Result<Self> {
        if exponent == 0 || exponent > 18 {
            return Err(Error::domain(format!("decade exponent {exponent} out of 1..=18")));
        }
        let hi = 10u64.pow(exponent);
        Self::new((hi / 10).max(2), hi)
    }

    pub fn contains(&self, norm: u64) -> bool {
        self.lo <= norm && norm < self.hi
    }

    pub fn width(&self) -> u64 {
        self.hi - self.lo
    }
}

impl fmt::Display for NormSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SieveOptions {
    pub include_axis: bool,
    /// Upper bound, in bytes, on the estimated output size.
    pub memory_budget: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            include_axis: false,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Simple Eratosthenes up to and including `limit`.
pub(crate) fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primality flags for `[start, end)`, given all primes up to `sqrt(end)`.
fn sieve_block(start: u64, end: u64, base: &[u64]) -> Vec<bool> {
    let len = (end - start) as usize;
    let mut flags = vec![true; len];
    for i in 0..len.min(2usize.saturating_sub(start as usize)) {
        flags[i] = false;
    }
    for &p in base {
        let pp = p * p;
        if pp >= end {
            break;
        }
        let first = pp.max(start.div_ceil(p) * p);
        let mut j = first;
        while j < end {
            flags[(j - start) as usize] = false;
            j += p;
        }
    }
    flags
}

fn blocks(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut s = lo;
    while s < hi {
        let e = hi.min(s.saturating_add(SIEVE_BLOCK));
        out.push((s, e));
        s = e;
    }
    out
}

/// Ordinary primes in `[lo, hi)`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if hi > NORM_CAP {
        return Err(Error::domain(format!("{hi} exceeds 2^63")));
    }
    if lo >= hi {
        return Ok(Vec::new());
    }
    let base = small_primes((hi - 1).isqrt());
    let parts: Vec<Vec<u64>> = blocks(lo, hi)
        .into_par_iter()
        .map(|(s, e)| {
            sieve_block(s, e, &base)
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .map(|(i, _)| s + i as u64)
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

fn estimated_sieve_bytes(segment: &NormSegment) -> u64 {
    let ln = (segment.lo.max(3) as f64).ln();
    let primes = segment.width() as f64 / ln / 2.0;
    (primes * std::mem::size_of::<GaussianPrime>() as f64) as u64
}

/// All first-octant Gaussian primes with `lo <= norm < hi`, sorted by
/// `(norm, a, b)`, using the default memory budget.
pub fn sieve_octant(segment: NormSegment, include_axis: bool) -> Result<Vec<GaussianPrime>> {
    sieve_octant_with(
        segment,
        &SieveOptions {
            include_axis,
            ..SieveOptions::default()
        },
    )
}

pub fn sieve_octant_with(segment: NormSegment, opts: &SieveOptions) -> Result<Vec<GaussianPrime>> {
    let NormSegment { lo, hi } = NormSegment::new(segment.lo, segment.hi)?;
    let requested = estimated_sieve_bytes(&segment);
    if requested > opts.memory_budget {
        return Err(Error::Resource {
            what: "octant sieve",
            requested,
            budget: opts.memory_budget,
        });
    }

    let base = small_primes((hi - 1).isqrt());
    let parts: Vec<Vec<GaussianPrime>> = blocks(lo, hi)
        .into_par_iter()
        .map(|(s, e)| {
            let prime = sieve_block(s, e, &base);
            let mut found = Vec::new();
            // Rows of the annulus s <= a^2 + b^2 < e with 1 <= b <= a.
            let a_lo = ceil_sqrt(s.div_ceil(2)).max(1);
            let a_hi = (e - 1).isqrt();
            for a in a_lo..=a_hi {
                let aa = a * a;
                let b_lo = if s > aa { ceil_sqrt(s - aa) } else { 1 }.max(1);
                if e - 1 < aa {
                    break;
                }
                let b_hi = a.min((e - 1 - aa).isqrt());
                for b in b_lo..=b_hi {
                    let n = aa + b * b;
                    if prime[(n - s) as usize] {
                        found.push(GaussianPrime { a, b, norm: n });
                    }
                }
            }
            found.sort_unstable();
            found
        })
        .collect();
    let mut out = parts.concat();

    if opts.include_axis {
        // Axis prime (q, 0) has norm q^2.
        let q_lo = ceil_sqrt(lo);
        let q_hi = ceil_sqrt(hi);
        let axis = primes_in_range(q_lo, q_hi)?
            .into_iter()
            .filter(|q| q % 4 == 3)
            .map(|q| GaussianPrime::new_unchecked(q, 0));
        out.extend(axis);
        out.sort_unstable();
    }
    Ok(out)
}

/// Counts of primes `p <= limit` with `p ≡ 1` and `p ≡ 3 (mod 4)`.
pub fn count_residue_classes(limit: u64) -> Result<(u64, u64)> {
    if limit >= NORM_CAP {
        return Err(Error::domain(format!("{limit} exceeds 2^63")));
    }
    if limit < 3 {
        return Ok((0, 0));
    }
    let base = small_primes(limit.isqrt());
    let counts = blocks(3, limit + 1)
        .into_par_iter()
        .map(|(s, e)| {
            let flags = sieve_block(s, e, &base);
            let mut c = (0u64, 0u64);
            for (i, &f) in flags.iter().enumerate() {
                if f {
                    match (s + i as u64) % 4 {
                        1 => c.0 += 1,
                        3 => c.1 += 1,
                        _ => {}
                    }
                }
            }
            c
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(counts)
}

/// Writes a prime `p = 2` or `p ≡ 1 (mod 4)` as `a^2 + b^2` with `a >= b >= 1`.
///
/// Uses a square root of -1 modulo `p` and the Hermite-Serret descent.
pub fn two_square_decomposition(p: u64) -> Option<(u64, u64)> {
    if p == 2 {
        return Some((1, 1));
    }
    if p % 4 != 1 || !is_prime_unchecked(p) {
        return None;
    }
    let mut c = 2;
    while pow_mod(c, (p - 1) / 2, p) != p - 1 {
        c += 1;
    }
    let x = pow_mod(c, (p - 1) / 4, p);
    let (mut r0, mut r1) = (p, x);
    while r1 as u128 * r1 as u128 > p as u128 {
        (r0, r1) = (r1, r0 % r1);
    }
    let a = r1;
    let b = (p - a * a).isqrt();
    debug_assert_eq!(a * a + b * b, p);
    Some((a.max(b), a.min(b)))
}

/// `|N(p) - N(q)|`.
pub fn norm_gap(p: &GaussianPrime, q: &GaussianPrime) -> u64 {
    p.norm.abs_diff(q.norm)
}

/// Exact squared Euclidean distance between the two lattice points.
pub fn euclid_gap_squared(p: &GaussianPrime, q: &GaussianPrime) -> u64 {
    let dx = p.a.abs_diff(q.a);
    let dy = p.b.abs_diff(q.b);
    dx * dx + dy * dy
}

/// Euclidean distance between the two lattice points.
pub fn euclid_gap(p: &GaussianPrime, q: &GaussianPrime) -> f64 {
    (euclid_gap_squared(p, q) as f64).sqrt()
}

/// Smallest squared distance from `p` to any of the eight lattice images of `q`.
pub fn min_image_dist_squared(p: &GaussianPrime, q: &GaussianPrime) -> u64 {
    let (pa, pb) = (p.a as i128, p.b as i128);
    let (qa, qb) = (q.a as i128, q.b as i128);
    let mut best = u128::MAX;
    for (x, y) in [(qa, qb), (qb, qa)] {
        for (sx, sy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let dx = pa - sx * x;
            let dy = pb - sy * y;
            best = best.min((dx * dx + dy * dy) as u128);
        }
    }
    best as u64
}
