//! Lattice points in a disk and the Gauss-circle error term.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{sieve_octant, NormSegment, NORM_CAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleCount {
    #[serde(rename = "R")]
    pub radius: f64,
    /// Lattice points with `x^2 + y^2 <= R^2`.
    #[serde(rename = "N")]
    pub count: u64,
    /// `N - pi R^2`.
    #[serde(rename = "E")]
    pub error: f64,
}

impl CircleCount {
    /// The classical bound `2 sqrt(2) pi R`.
    pub fn error_bound(&self) -> f64 {
        2.0 * SQRT_2 * PI * self.radius
    }

    pub fn within_bound(&self) -> bool {
        self.error.abs() <= self.error_bound()
    }
}

fn count_up_to_norm(n2: u64) -> u64 {
    let r = n2.isqrt();
    let rows: u64 = (1..=r)
        .into_par_iter()
        .map(|x| 2 * (n2 - x * x).isqrt() + 1)
        .sum();
    // Row x = 0 plus the mirrored rows x = ±1..±r.
    2 * r + 1 + 2 * rows
}

/// Exact lattice count in the closed disk of radius `radius`.
pub fn lattice_count(radius: f64) -> Result<CircleCount> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("radius {radius} must be finite and >= 0")));
    }
    let r2 = radius * radius;
    if r2 >= NORM_CAP as f64 {
        return Err(Error::domain(format!("R^2 = {r2} exceeds 2^63")));
    }
    // x^2 + y^2 is an integer, so the disk holds exactly the points of norm <= floor(R^2).
    let count = count_up_to_norm(r2.floor() as u64);
    Ok(CircleCount {
        radius,
        count,
        error: count as f64 - PI * r2,
    })
}

/// Points with `x >= 1, y >= 0` inside the disk; `N(R) = 1 + 4 * quarter(R)`.
pub fn quarter_count(radius: f64) -> Result<u64> {
    let r2 = (radius * radius).floor() as u64;
    let r = r2.isqrt();
    Ok((1..=r).map(|x| (r2 - x * x).isqrt() + 1).sum())
}

/// Least-squares slope of `log |E(R)|` against `log R` over integer radii in
/// `[lo, hi]` (stepping by `step`), skipping radii with `E(R) = 0`.
pub fn fit_error_exponent(lo: u64, hi: u64, step: u64) -> Result<f64> {
    if lo < 1 || hi <= lo || step == 0 {
        return Err(Error::precondition("need 1 <= lo < hi and step >= 1"));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .step_by(step as usize)
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|r| {
            let c = lattice_count(r as f64).ok()?;
            (c.error != 0.0).then(|| ((r as f64).ln(), c.error.abs().ln()))
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub segment: NormSegment,
    /// Lattice points `0 <= b <= a` with norm in the segment.
    pub lattice_points_octant: u64,
    /// Off-axis first-octant Gaussian primes with norm in the segment.
    pub gaussian_primes_octant: u64,
    /// `hi / (2 ln hi)`.
    pub pnt_estimate: f64,
    pub ratio_actual_vs_estimate: f64,
}

fn octant_points_below(n: u64) -> u64 {
    // Points 0 <= b <= a with a^2 + b^2 < n.
    if n == 0 {
        return 0;
    }
    let m = n - 1;
    let a_max = m.isqrt();
    (0..=a_max)
        .into_par_iter()
        .map(|a| {
            let rest = m - a * a;
            a.min(rest.isqrt()) + 1
        })
        .sum()
}

pub fn octant_prime_density(segment: NormSegment) -> Result<DensityReport> {
    let segment = NormSegment::new(segment.lo, segment.hi)?;
    let primes = sieve_octant(segment, false)?.len() as u64;
    let lattice = octant_points_below(segment.hi) - octant_points_below(segment.lo);
    let hi = segment.hi as f64;
    let pnt_estimate = hi / (2.0 * hi.ln());
    Ok(DensityReport {
        segment,
        lattice_points_octant: lattice,
        gaussian_primes_octant: primes,
        pnt_estimate,
        ratio_actual_vs_estimate: primes as f64 / pnt_estimate,
    })
}
