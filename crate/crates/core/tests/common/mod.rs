//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

pub fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Textbook Miller-Rabin with the first twelve prime bases.
pub fn miller_rabin(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Gaussian primality of `x + yi` straight from the definition.
pub fn is_gp(x: i64, y: i64, prime: impl Fn(u64) -> bool) -> bool {
    let (a, b) = (x.unsigned_abs(), y.unsigned_abs());
    match (a, b) {
        (0, 0) => false,
        (0, q) | (q, 0) => q % 4 == 3 && prime(q),
        _ => prime(a * a + b * b),
    }
}

pub fn fold(x: i64, y: i64) -> (u64, u64) {
    let (a, b) = (x.unsigned_abs(), y.unsigned_abs());
    (a.max(b), a.min(b))
}

/// Squared distance between the nearest images of two points under the
/// eight symmetries of the square lattice.
pub fn min_image_d2(p: (u64, u64), q: (u64, u64)) -> u64 {
    let (qa, qb) = (q.0 as i64, q.1 as i64);
    let mut best = u64::MAX;
    for (x, y) in [(qa, qb), (qb, qa)] {
        for (sx, sy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let dx = p.0 as i64 - sx * x;
            let dy = p.1 as i64 - sy * y;
            best = best.min((dx * dx + dy * dy) as u64);
        }
    }
    best
}

/// All Gaussian primes of the full plane with norm below `limit`.
pub fn plane_primes(limit: u64, include_axis: bool) -> Vec<(i64, i64)> {
    let r = (limit as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            if ((x * x + y * y) as u64) < limit
                && (include_axis || (x != 0 && y != 0))
                && is_gp(x, y, trial_division)
            {
                out.push((x, y));
            }
        }
    }
    out
}

/// Breadth-first closure in the full plane from every image of `seed`,
/// folded back to the first octant.
pub fn plane_component(points: &[(i64, i64)], seed: (u64, u64), k2: u64) -> HashSet<(u64, u64)> {
    let cell = (k2 as f64).sqrt().ceil().max(1.0) as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        grid.entry((x.div_euclid(cell), y.div_euclid(cell))).or_default().push(i);
    }
    let mut seen = vec![false; points.len()];
    let mut queue = VecDeque::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        if fold(x, y) == seed {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = points[i];
        let (cx, cy) = (x.div_euclid(cell), y.div_euclid(cell));
        for gx in cx - 1..=cx + 1 {
            for gy in cy - 1..=cy + 1 {
                for &j in grid.get(&(gx, gy)).into_iter().flatten() {
                    let (u, v) = points[j];
                    let d2 = ((u - x) * (u - x) + (v - y) * (v - y)) as u64;
                    if !seen[j] && d2 <= k2 {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    points
        .iter()
        .zip(&seen)
        .filter(|(_, s)| **s)
        .map(|(&(x, y), _)| fold(x, y))
        .collect()
}

/// Minimax (bottleneck) distances between all pairs, Floyd-Warshall style.
pub fn all_pairs_minimax(points: &[(u64, u64)]) -> Vec<Vec<u64>> {
    let n = points.len();
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0 } else { min_image_d2(points[i], points[j]) }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k].max(m[k][j]);
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    m
}
