//! Exact arithmetic for the doubling map `ρ(ξ) = 2ξ (mod 2π)` on `[-π, π)`
//! and its invariant cycles.
//!
//! Angles are carried as reduced rationals `ξ = 2π p/q` with odd `q`;
//! doubling and orbit detection stay in integer arithmetic and only the
//! final filter evaluation converts to floating point. Cycles of length
//! `l` are exactly the orbits of `2π m/(2^l - 1)`.

use crate::filter::{m0, DeltaTable, FilterConfig};
use crate::{Error, Result};
use std::collections::BTreeSet;
use std::f64::consts::PI;

/// Exact angle `ξ = 2π p/q ∈ [-π, π)`: `q` odd and positive, `gcd(|p|, q) = 1`,
/// `-q < 2p <= q - 1` (so `|p| <= (q-1)/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicAngle {
    p: i64,
    q: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl DyadicAngle {
    /// Reduced representative of `2π p/q`; fails when the reduced
    /// denominator is even (such angles are pre-periodic, never periodic).
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q <= 0 {
            return Err(Error::Domain {
                op: "DyadicAngle::new",
                detail: format!("denominator q = {q} must be positive"),
            });
        }
        let g = gcd(p, q).max(1);
        let (mut p, q) = (p / g, q / g);
        if q % 2 == 0 {
            return Err(Error::Domain {
                op: "DyadicAngle::new",
                detail: format!("reduced denominator {q} is even; the orbit is not periodic"),
            });
        }
        // Shift p by multiples of q into (-q/2, q/2); q odd leaves no tie.
        p = p.rem_euclid(q);
        if 2 * p > q {
            p -= q;
        }
        Ok(Self { p, q })
    }

    pub fn numerator(&self) -> i64 {
        self.p
    }

    pub fn denominator(&self) -> i64 {
        self.q
    }

    /// The angle in radians, converted only at this final step.
    pub fn to_radians(&self) -> f64 {
        (2.0 * PI * self.p as f64) / self.q as f64
    }
}

impl std::fmt::Display for DyadicAngle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "2π·{}/{}", self.p, self.q)
    }
}

/// One step of the doubling map, exactly.
pub fn doubling(a: DyadicAngle) -> DyadicAngle {
    let mut p = 2 * a.p;
    if 2 * p > a.q {
        p -= a.q;
    } else if 2 * p <= -a.q {
        p += a.q;
    }
    DyadicAngle { p, q: a.q }
}

/// Iterates the doubling map until the start recurs (a cycle, in order) or
/// `max_len` steps pass without return.
pub fn orbit(a: DyadicAngle, max_len: usize) -> (Vec<DyadicAngle>, bool) {
    let mut points = vec![a];
    let mut current = a;
    for _ in 0..max_len {
        current = doubling(current);
        if current == a {
            return (points, true);
        }
        points.push(current);
    }
    (points, false)
}

/// All distinct invariant cycles of length at most `max_len`, each rotated
/// to start at its smallest element and sorted by (length, denominator,
/// starting numerator).
pub fn enumerate_cycles(max_len: usize) -> Result<Vec<Vec<DyadicAngle>>> {
    if max_len == 0 || max_len > 24 {
        return Err(Error::Domain {
            op: "enumerate_cycles",
            detail: format!("max_len = {max_len} must lie in 1..=24"),
        });
    }
    let mut seen = BTreeSet::new();
    let mut cycles = Vec::new();
    for l in 1..=max_len as u32 {
        // Fixed points of ρ^l are 2π m / (2^l - 1).
        let q = (1i64 << l) - 1;
        for m in 0..q {
            let a = DyadicAngle::new(m, q).expect("2^l - 1 is odd");
            let (cycle, closed) = orbit(a, l as usize);
            debug_assert!(closed);
            if cycle.len() != l as usize {
                continue; // shorter period, found at its own length
            }
            let canonical = canonical_rotation(&cycle);
            if seen.insert(canonical.clone()) {
                cycles.push(canonical);
            }
        }
    }
    cycles.sort_by_key(|c| (c.len(), c[0].q, c[0].p));
    Ok(cycles)
}

/// Rotates a cycle so that its lexicographically smallest element leads.
fn canonical_rotation(cycle: &[DyadicAngle]) -> Vec<DyadicAngle> {
    let start = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, a)| (a.q, a.p))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut rotated = Vec::with_capacity(cycle.len());
    rotated.extend_from_slice(&cycle[start..]);
    rotated.extend_from_slice(&cycle[..start]);
    rotated
}

/// `m0` at every point of the cycle, at the exact angles.
pub fn cycle_factors(config: &FilterConfig, table: &DeltaTable, cycle: &[DyadicAngle]) -> Vec<f64> {
    cycle.iter().map(|a| m0(config, table, a.to_radians())).collect()
}

/// Product of `m0` over the cycle: 1 for the trivial cycle `{0}`, 0 for
/// every nontrivial cycle of this filter (each one meets the zero set
/// `{±2π/3} ∪ ±[4π/5, π]`).
pub fn cycle_product(config: &FilterConfig, table: &DeltaTable, cycle: &[DyadicAngle]) -> f64 {
    cycle_factors(config, table, cycle).iter().product()
}
