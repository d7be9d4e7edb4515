//! The low-pass filter `m0` with Lambert-W controlled decay at `2π/3`.
//!
//! Construction, for `sigma > 1` and a bump half-width `d` in `(0, π/6]`:
//!
//! ```text
//! gamma(eta)  = f_{1,sigma}(eta) for eta > 0, else 0
//! delta(xi)   = normalized cumulative integral of gamma(eta) gamma(1-eta)
//! theta(xi)   = (1 - delta((5 xi - π)/(3π))) * delta(|xi - 2π/3| / d)   on [π/2, π]
//! m0(xi)      = sin(π/2 * theta(xi))
//! ```
//!
//! `theta` extends to `[0, π/2)` by the reflection `theta(u) = 1 - theta(π - u)`
//! (forced by `theta(xi) + theta(xi + π) = 1` together with evenness and
//! 2π-periodicity), then evenly and 2π-periodically to the line. The
//! quadrature-mirror identity `m0²(xi) + m0²(xi + π) = 1` follows from the
//! sine/cosine split, so it holds to rounding error rather than to
//! quadrature error.

use crate::quad::{adaptive_simpson, gauss5};
use crate::scale::{f_rho_sigma, g};
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// `2π/3`, written exactly the way callers spell it so that the zero of
/// `m0` at this angle is bit-exact.
pub const ZERO_ANGLE: f64 = 2.0 * PI / 3.0;


/// Parameters fully determining `m0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Regularity index, `> 1`.
    pub sigma: f64,
    /// Bump half-width in radians, in `(0, π/6]`.
    pub d: f64,
    /// Absolute quadrature tolerance for the delta table.
    pub quad_tol: f64,
    /// Node count of the delta table on `[0, 1/2]`; odd, at least 257.
    pub table_n: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            sigma: 2.0,
            d: PI / 12.0,
            quad_tol: 1e-12,
            table_n: 2049,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 1.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma = {} must exceed 1", self.sigma)));
        }
        if !(self.d > 0.0 && self.d <= PI / 6.0) {
            return Err(Error::Config(format!(
                "d = {} must lie in (0, π/6 = {}]",
                self.d,
                PI / 6.0
            )));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-6) {
            return Err(Error::Config(format!(
                "quad_tol = {} must lie in (0, 1e-6]",
                self.quad_tol
            )));
        }
        if self.table_n < 257 || self.table_n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "table_n = {} must be odd and at least 257",
                self.table_n
            )));
        }
        Ok(())
    }
}

/// One-sided cut of the scale function: `f_{1,sigma}` on the positive axis,
/// zero at and below 0.
pub fn gamma(sigma: f64, eta: f64) -> f64 {
    if eta <= 0.0 {
        0.0
    } else {
        f_rho_sigma(1.0, sigma, eta)
    }
}

/// Precomputed cumulative integral of `gamma(eta) gamma(1 - eta)` on
/// `[0, 1/2]`, stored normalized so that the last entry is exactly `1/2`.
///
/// Evaluation anchors at the nearest node below and integrates the
/// remainder with a fixed Gauss rule, which keeps `delta` monotone and
/// accurate to the quadrature tolerance between nodes.
#[derive(Debug, Clone)]
pub struct DeltaTable {
    sigma: f64,
    h: f64,
    cumulative: Vec<f64>,
    /// Full integral of the integrand over `[0, 1]`.
    pub normalization: f64,
}

impl DeltaTable {
    fn integrand(&self, eta: f64) -> f64 {
        gamma(self.sigma, eta) * gamma(self.sigma, 1.0 - eta)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn node_count(&self) -> usize {
        self.cumulative.len()
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// Builds the delta table by per-cell adaptive Simpson quadrature.
pub fn build_delta_table(config: &FilterConfig) -> Result<DeltaTable> {
    config.validate()?;
    let cells = config.table_n - 1;
    let h = 0.5 / cells as f64;
    let sigma = config.sigma;
    let integrand = |eta: f64| gamma(sigma, eta) * gamma(sigma, 1.0 - eta);
    let cell_tol = config.quad_tol / (4.0 * cells as f64);

    let mut cumulative = Vec::with_capacity(config.table_n);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for k in 0..cells {
        let a = k as f64 * h;
        let b = if k + 1 == cells { 0.5 } else { (k + 1) as f64 * h };
        acc += adaptive_simpson(&integrand, a, b, cell_tol)?;
        cumulative.push(acc);
    }
    let half_mass = acc;
    if !(half_mass > 0.0 && half_mass.is_finite()) {
        return Err(Error::Config(format!(
            "degenerate delta table: half mass = {half_mass}"
        )));
    }
    // The integrand is symmetric about 1/2, so the full integral is twice
    // the half mass and the normalized last entry is exactly 1/2.
    let normalization = 2.0 * half_mass;
    for c in &mut cumulative {
        *c /= normalization;
    }
    Ok(DeltaTable {
        sigma,
        h,
        cumulative,
        normalization,
    })
}

fn delta_lower(table: &DeltaTable, xi: f64) -> f64 {
    debug_assert!(xi > 0.0 && xi < 0.5);
    let mut idx = ((xi / table.h) as usize).min(table.cumulative.len() - 2);
    let mut t0 = idx as f64 * table.h;
    if t0 > xi && idx > 0 {
        idx -= 1;
        t0 = idx as f64 * table.h;
    }
    let local = gauss5(&|eta| table.integrand(eta), t0, xi);
    table.cumulative[idx] + local / table.normalization
}

/// Normalized cumulative bump integral: 0 below 0, 1 above 1, with the
/// exact reflection `delta(xi) = 1 - delta(1 - xi)` on `(1/2, 1)`.
pub fn delta(table: &DeltaTable, xi: f64) -> f64 {
    if xi <= 0.0 {
        0.0
    } else if xi >= 1.0 {
        1.0
    } else if xi == 0.5 {
        0.5
    } else if xi > 0.5 {
        1.0 - delta_lower(table, 1.0 - xi)
    } else {
        delta_lower(table, xi)
    }
}

/// `1 - delta(xi)` without cancellation when the complement is tiny.
pub(crate) fn delta_complement(table: &DeltaTable, xi: f64) -> f64 {
    if xi <= 0.0 {
        1.0
    } else if xi >= 1.0 {
        0.0
    } else if xi == 0.5 {
        0.5
    } else if xi > 0.5 {
        delta_lower(table, 1.0 - xi)
    } else {
        1.0 - delta_lower(table, xi)
    }
}

/// Reduces `xi` into `[-π, π)` by subtracting the nearest multiple of the
/// f64 constant 2π.
///
/// `xi - k * TAU` is assembled from the exact FMA product error, so the
/// result is the correctly rounded remainder and the reduction is exactly
/// TAU-periodic: whenever `xi + TAU` is representable, `xi` and `xi + TAU`
/// reduce to identical bits. Everything downstream (the filter thresholds,
/// the dyadic product arguments) lives on the same `TAU` lattice, which
/// keeps zero and one values of `m0` bit-exact across octaves.
pub fn reduce_angle(xi: f64) -> f64 {
    if (-PI..PI).contains(&xi) {
        return xi;
    }
    let k = (xi / TAU).round();
    let p = k * TAU;
    let e = k.mul_add(TAU, -p); // exact product error via FMA
    let mut r = (xi - p) - e;
    if r < -PI {
        r += TAU;
    } else if r >= PI {
        r -= TAU;
    }
    r
}

fn theta_upper(config: &FilterConfig, table: &DeltaTable, u: f64) -> f64 {
    debug_assert!((FRAC_PI_2..=PI + 1e-9).contains(&u));
    let s1 = (5.0 * u - PI) / (3.0 * PI);
    let first = delta_complement(table, s1);
    if first == 0.0 {
        return 0.0;
    }
    first * delta(table, (u - ZERO_ANGLE).abs() / config.d)
}

/// The partition function: even, 2π-periodic, `theta(xi) + theta(xi + π) = 1`,
/// with range `[0, 1]`.
pub fn theta(config: &FilterConfig, table: &DeltaTable, xi: f64) -> f64 {
    let u = reduce_angle(xi).abs();
    let v = if u >= FRAC_PI_2 {
        theta_upper(config, table, u)
    } else {
        1.0 - theta_upper(config, table, PI - u)
    };
    v.clamp(0.0, 1.0)
}

/// The low-pass filter `m0(xi) = sin(π/2 * theta(xi))`.
///
/// The values 0 and 1 are returned exactly when `theta` hits 0 or 1, which
/// makes `m0` identically 1 on `[-π/5, π/5]` and identically 0 on the inner
/// part of `[4π/5, π]` at the bit level.
pub fn m0(config: &FilterConfig, table: &DeltaTable, xi: f64) -> f64 {
    let t = theta(config, table, xi);
    if t == 0.0 {
        0.0
    } else if t == 1.0 {
        1.0
    } else {
        (FRAC_PI_2 * t).sin()
    }
}

pub const DEFAULT_ENVELOPE_GRID: usize = 4001;

/// Empirical envelope exponents of `m0` around `2π/3`.
///
/// Over a punctured symmetric grid `xi = 2π/3 + t`, `0 < |t| <= eps`, this
/// computes `r(t) = -ln m0(2π/3 + t) / g_sigma(1/|t|)` (the local decay of
/// `m0` follows `f_{rho,sigma}(t) = exp(-rho g_sigma(1/t))`, so `r` is the
/// empirical `rho` with the constants absorbed) and returns `(min, max)`.
pub fn verify_envelope(
    config: &FilterConfig,
    table: &DeltaTable,
    eps: f64,
) -> Result<(f64, f64)> {
    verify_envelope_on_grid(config, table, eps, DEFAULT_ENVELOPE_GRID)
}

pub fn verify_envelope_on_grid(
    config: &FilterConfig,
    table: &DeltaTable,
    eps: f64,
    grid_n: usize,
) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < PI / 6.0) {
        return Err(Error::Domain {
            op: "verify_envelope",
            detail: format!("eps = {eps} must lie in (0, π/6)"),
        });
    }
    if grid_n < 3 {
        return Err(Error::Domain {
            op: "verify_envelope",
            detail: "grid_n must be at least 3".into(),
        });
    }
    let mut r_min = f64::INFINITY;
    let mut r_max = 0.0_f64;
    let steps = grid_n - 1;
    for i in 0..=steps {
        let t = -eps + 2.0 * eps * i as f64 / steps as f64;
        // Skip the puncture, including offsets that round back onto it.
        if t == 0.0 || ZERO_ANGLE + t == ZERO_ANGLE {
            continue;
        }
        let v = m0(config, table, ZERO_ANGLE + t);
        if v <= 0.0 {
            return Err(Error::Envelope(format!(
                "m0 vanished at xi = 2π/3 + {t}: support leaked into the window"
            )));
        }
        let r = -v.ln() / g(config.sigma, 1.0 / t.abs());
        if !r.is_finite() {
            return Err(Error::Envelope(format!("non-finite ratio at t = {t}")));
        }
        r_min = r_min.min(r);
        r_max = r_max.max(r);
    }
    if !(r_min > 0.0) {
        return Err(Error::Envelope(format!(
            "lower envelope ratio not positive: {r_min}"
        )));
    }
    Ok((r_min, r_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::g;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn table() -> &'static (FilterConfig, DeltaTable) {
        static CELL: OnceLock<(FilterConfig, DeltaTable)> = OnceLock::new();
        CELL.get_or_init(|| {
            let config = FilterConfig::default();
            let table = build_delta_table(&config).unwrap();
            (config, table)
        })
    }

    #[test]
    fn gamma_cutoff() {
        assert_eq!(gamma(2.0, -0.3), 0.0);
        assert_eq!(gamma(2.0, 0.0), 0.0);
        assert_relative_eq!(
            gamma(2.0, 1.0),
            (-g(2.0, 1.0)).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn delta_endpoints_exact() {
        let (_, t) = table();
        assert_eq!(delta(t, 0.0), 0.0);
        assert_eq!(delta(t, -2.0), 0.0);
        assert_eq!(delta(t, 0.5), 0.5);
        assert_eq!(delta(t, 1.0), 1.0);
        assert_eq!(delta(t, 2.0), 1.0);
    }

    #[test]
    fn delta_reflection_identity() {
        let (_, t) = table();
        for &x in &[0.1, 0.25, 0.3, 0.41, 0.49] {
            let s = delta(t, x) + delta(t, 1.0 - x);
            assert!((s - 1.0).abs() <= 1e-14, "x = {x}: sum = {s}");
        }
    }

    #[test]
    fn delta_monotone_and_in_range() {
        let (_, t) = table();
        let mut prev = 0.0;
        for i in 0..=5000 {
            let x = i as f64 / 5000.0;
            let v = delta(t, x);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev, "delta decreasing at x = {x}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn delta_table_doubling_self_convergence() {
        let base = FilterConfig {
            table_n: 513,
            ..FilterConfig::default()
        };
        let fine = FilterConfig {
            table_n: 1025,
            ..FilterConfig::default()
        };
        let tb = build_delta_table(&base).unwrap();
        let tf = build_delta_table(&fine).unwrap();
        let diff = (delta(&tb, 0.3) - delta(&tf, 0.3)).abs();
        assert!(diff < base.quad_tol, "delta(0.3) shifted by {diff:e}");
        assert_relative_eq!(tb.normalization, tf.normalization, max_relative = 1e-10);
    }

    #[test]
    fn theta_exact_points() {
        let (c, t) = table();
        assert_eq!(theta(c, t, ZERO_ANGLE), 0.0);
        assert_eq!(theta(c, t, -ZERO_ANGLE), 0.0);
        assert_eq!(theta(c, t, 0.1), 1.0);
        assert_eq!(theta(c, t, 0.9 * PI), 0.0);
        assert_eq!(theta(c, t, PI), 0.0);
        assert!((theta(c, t, FRAC_PI_2) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn theta_partition_of_unity() {
        let (c, t) = table();
        for i in 0..=2000 {
            let xi = -PI + TAU * i as f64 / 2000.0;
            let s = theta(c, t, xi) + theta(c, t, xi + PI);
            assert!((s - 1.0).abs() <= 1e-13, "xi = {xi}: sum = {s:.17}");
        }
    }

    #[test]
    fn evenness_and_periodicity_bitwise() {
        let (c, t) = table();
        // Dyadic abscissae keep xi + 2π exactly representable, so the
        // reduction maps xi and xi + 2π to identical bits.
        for i in 0..=64 {
            let xi = -3.0 + 6.0 * i as f64 / 64.0;
            assert_eq!(m0(c, t, xi).to_bits(), m0(c, t, -xi).to_bits());
            assert_eq!(m0(c, t, xi).to_bits(), m0(c, t, xi + TAU).to_bits());
            assert_eq!(m0(c, t, xi).to_bits(), m0(c, t, xi - TAU).to_bits());
        }
    }

    #[test]
    fn m0_fixed_values() {
        let (c, t) = table();
        assert_eq!(m0(c, t, 0.0), 1.0);
        assert_eq!(m0(c, t, 2.0 * PI / 3.0), 0.0);
        assert!((m0(c, t, PI / 3.0) - 1.0).abs() <= 1e-12);
        let bump = m0(c, t, 0.7 * PI);
        assert!(bump > 0.0 && bump < 1.0, "bump value {bump}");
    }

    #[test]
    fn m0_one_on_inner_band_exactly() {
        let (c, t) = table();
        for i in 0..=400 {
            let xi = (PI / 5.0) * 0.999 * i as f64 / 400.0;
            assert_eq!(m0(c, t, xi), 1.0, "m0 != 1 at xi = {xi}");
        }
    }

    #[test]
    fn m0_zero_on_outer_band() {
        let (c, t) = table();
        for i in 0..=400 {
            let xi = 4.0 * PI / 5.0 + (PI / 5.0) * i as f64 / 400.0;
            assert!(m0(c, t, xi).abs() <= 1e-12, "m0 != 0 at xi = {xi}");
        }
    }

    #[test]
    fn m0_positive_on_low_band() {
        // inf over [-π/3, π/3] stays well away from 0; the mirrored bump
        // makes it dip slightly below 1 between π/5 and π/3.
        let (c, t) = table();
        let mut min = f64::INFINITY;
        for i in 0..=2000 {
            let xi = -PI / 3.0 + (2.0 * PI / 3.0) * i as f64 / 2000.0;
            min = min.min(m0(c, t, xi));
        }
        assert!(min > 0.99, "min on the low band = {min}");
        assert!(min < 1.0, "the mirrored bump should dip below 1");
    }

    #[test]
    fn qmf_identity() {
        let (c, t) = table();
        let mut worst = 0.0_f64;
        for i in 0..=2000 {
            let xi = -PI + TAU * i as f64 / 2000.0;
            let a = m0(c, t, xi);
            let b = m0(c, t, xi + PI);
            worst = worst.max((a * a + b * b - 1.0).abs());
        }
        assert!(worst <= 1e-12, "QMF residual {worst:e}");
    }

    #[test]
    fn bump_positive() {
        let (c, t) = table();
        let mut max = 0.0_f64;
        for i in 1..400 {
            let xi = 2.0 * PI / 3.0 + (4.0 * PI / 5.0 - 2.0 * PI / 3.0) * i as f64 / 400.0;
            max = max.max(m0(c, t, xi));
        }
        assert!(max > 1e-6, "bump max = {max:e}");
    }

    #[test]
    fn reduce_angle_basics() {
        assert_eq!(reduce_angle(0.5), 0.5);
        assert_eq!(reduce_angle(-PI), -PI);
        assert!((reduce_angle(TAU)).abs() < 1e-15);
        assert!((reduce_angle(7.0) - (7.0 - TAU)).abs() < 1e-15);
        // Representation of the input itself limits the accuracy here: one
        // ulp at 2^20 π is about 5e-10.
        let big = 1048576.0 * PI + 0.3;
        assert!((reduce_angle(big) - 0.3).abs() < 1e-9, "{}", reduce_angle(big));
        for &xi in &[-9.0, -3.2, 3.2, 9.0, 1e6, -1e6] {
            let r = reduce_angle(xi);
            assert!((-PI..PI).contains(&r), "xi = {xi} -> {r}");
        }
    }

    #[test]
    fn envelope_ratio_behaves() {
        let (c, t) = table();
        let eps = 0.3;
        let (r_min, r_max) = verify_envelope(c, t, eps).unwrap();
        assert!(r_min > 0.0 && r_max.is_finite());
        // Symmetric points agree to 10% once |t| is small against d; the
        // asymmetry of the off-center factor decays like t / g(1/t).
        for i in 1..=20 {
            let s = c.d / 8.0 * i as f64 / 20.0;
            let rp = -m0(c, t, ZERO_ANGLE + s).ln() / g(c.sigma, 1.0 / s);
            let rm = -m0(c, t, ZERO_ANGLE - s).ln() / g(c.sigma, 1.0 / s);
            assert!(
                (rp - rm).abs() <= 0.1 * rp.max(rm),
                "s = {s}: {rp} vs {rm}"
            );
        }
        // Grid refinement stability.
        let coarse = verify_envelope_on_grid(c, t, eps, 2001).unwrap();
        let fine = verify_envelope_on_grid(c, t, eps, 4001).unwrap();
        assert!((coarse.0 - fine.0).abs() <= 0.05 * fine.0);
        assert!((coarse.1 - fine.1).abs() <= 0.05 * fine.1);
        // eps out of (0, π/6) is a domain error.
        assert!(verify_envelope(c, t, 0.6).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(FilterConfig::default().validate().is_ok());
        assert!(FilterConfig { sigma: 1.0, ..Default::default() }.validate().is_err());
        assert!(FilterConfig { d: 0.6, ..Default::default() }.validate().is_err());
        assert!(FilterConfig { quad_tol: 1e-3, ..Default::default() }.validate().is_err());
        assert!(FilterConfig { table_n: 258, ..Default::default() }.validate().is_err());
        assert!(FilterConfig { table_n: 129, ..Default::default() }.validate().is_err());
    }

    proptest! {
        #[test]
        fn prop_m0_range_and_evenness(xi in -50.0f64..50.0) {
            let (c, t) = table();
            let v = m0(c, t, xi);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v.to_bits(), m0(c, t, -xi).to_bits());
        }

        #[test]
        fn prop_delta_reflection(x in 0.0f64..1.0) {
            let (_, t) = table();
            let s = delta(t, x) + delta(t, 1.0 - x);
            prop_assert!((s - 1.0).abs() <= 1e-13);
        }
    }
}
