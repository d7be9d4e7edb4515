//! The scaling function, the wavelet, and time-domain synthesis.
//!
//! `phi_hat(xi) = prod_{j>=1} m0(2^-j xi)` truncates exactly: `m0` is
//! identically 1 on `[-π/5, π/5]`, so only `J(xi) = ceil(log2(5|xi|/π))`
//! factors differ from 1. The wavelet is
//! `psi_hat(xi) = e^(i xi/2) conj(m0(xi/2 + π)) phi_hat(xi/2)` and the time
//! wavelet comes from a trapezoid-rule inverse Fourier transform evaluated
//! with an FFT. Orthonormality witnesses (periodization, Calderón sum,
//! translate inner products) are provided for the verification suite.

use crate::filter::{m0, DeltaTable, FilterConfig};
use crate::quad::composite_simpson;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};

/// Spectral tail tolerance for synthesis: `|psi_hat|` must stay below this
/// outside `[-xi_max, xi_max]`.
pub const TAIL_TOL: f64 = 1e-10;

/// Number of product factors that can differ from 1 at frequency `xi`.
pub fn truncation_index(xi: f64) -> u32 {
    let a = 5.0 * xi.abs() / PI;
    if a <= 1.0 {
        0
    } else {
        a.log2().ceil().max(1.0) as u32
    }
}

/// `phi_hat(xi)` as a plain product; exact zeros propagate.
pub fn scaling_hat(config: &FilterConfig, table: &DeltaTable, xi: f64) -> f64 {
    let mut product = 1.0;
    for j in 1..=truncation_index(xi) {
        let factor = m0(config, table, xi * 2.0_f64.powi(-(j as i32)));
        if factor == 0.0 {
            return 0.0;
        }
        product *= factor;
    }
    product
}

/// Log-domain companion of [`scaling_hat`]: `(ln |phi_hat|, zero_flag)`.
///
/// The flag is set when some factor is exactly zero (then the log is
/// `-inf`). Decay analysis needs `|phi_hat|` far below the f64 underflow
/// threshold, hence the sum of logs.
pub fn log_scaling_hat(config: &FilterConfig, table: &DeltaTable, xi: f64) -> (f64, bool) {
    let mut log_abs = 0.0;
    for j in 1..=truncation_index(xi) {
        let factor = m0(config, table, xi * 2.0_f64.powi(-(j as i32)));
        if factor == 0.0 {
            return (f64::NEG_INFINITY, true);
        }
        if factor != 1.0 {
            log_abs += factor.ln();
        }
    }
    (log_abs, false)
}

/// `psi_hat(xi) = e^(i xi/2) conj(m0(xi/2 + π)) phi_hat(xi/2)`.
///
/// `m0` is real here, but the conjugate stays in the formula on purpose.
pub fn wavelet_hat(config: &FilterConfig, table: &DeltaTable, xi: f64) -> Complex64 {
    let half = 0.5 * xi;
    let carrier = Complex64::new(m0(config, table, half + PI), 0.0).conj();
    Complex64::from_polar(1.0, half) * carrier * scaling_hat(config, table, half)
}

/// A uniformly sampled real-valued quantity with provenance.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: SampleMeta,
}

#[derive(Debug, Clone)]
pub struct SampleMeta {
    pub quantity: String,
    pub sigma: f64,
    pub d: f64,
}

impl SampledFunction {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>, meta: SampleMeta) -> Self {
        assert_eq!(abscissae.len(), values.len());
        debug_assert!(abscissae.windows(2).all(|w| w[1] > w[0]));
        Self { abscissae, values, meta }
    }
}

/// Result of the inverse-transform synthesis of the time wavelet.
#[derive(Debug, Clone)]
pub struct SynthesizedWavelet {
    pub samples: SampledFunction,
    /// Largest imaginary residue over all samples; Hermitian symmetry of
    /// `psi_hat` makes the true wavelet real.
    pub max_imag: f64,
    /// Trapezoid-rule mass `∫ |psi|^2 dx` on the synthesis grid.
    pub l2_mass: f64,
    pub xi_max: f64,
}

/// Largest bump amplitude of `|phi_hat|` on the octave `[2^n π, 2^{n+1} π]`.
///
/// The cozero set of `phi_hat` inside that octave sits within `8π/15` of
/// `2^{n+2} π / 3`, so scanning that window is enough.
fn bump_max(config: &FilterConfig, table: &DeltaTable, n: i32) -> f64 {
    let center = 2.0_f64.powi(n + 2) * PI / 3.0;
    let halfwidth = 8.0 * PI / 15.0;
    let grid = 800;
    let mut max = 0.0_f64;
    for i in 0..=grid {
        let xi = center - halfwidth + 2.0 * halfwidth * i as f64 / grid as f64;
        max = max.max(scaling_hat(config, table, xi).abs());
    }
    max
}

/// Upper estimate of `sup_{|xi| >= xi_max} |psi_hat(xi)|`, via
/// `|psi_hat(xi)| <= |phi_hat(xi/2)|` and the octave bump scan.
///
/// Returns infinity when the bump amplitudes do not decrease over the
/// scanned horizon, so that callers fail toward larger `xi_max`.
pub fn spectral_tail_bound(config: &FilterConfig, table: &DeltaTable, xi_max: f64) -> f64 {
    let start = (0.5 * xi_max / PI).log2().floor().max(0.0) as i32;
    let mut worst = 0.0_f64;
    let mut prev = f64::INFINITY;
    let mut tail_decreases = true;
    for n in start..start + 12 {
        let b = bump_max(config, table, n);
        worst = worst.max(b);
        if n >= start + 8 && b > prev {
            tail_decreases = false;
        }
        prev = b;
    }
    if tail_decreases {
        worst
    } else {
        f64::INFINITY
    }
}

/// Smallest dyadic `xi_max` (doubling from `2^6 π`) whose spectral tail is
/// below [`TAIL_TOL`].
pub fn auto_xi_max(config: &FilterConfig, table: &DeltaTable) -> Result<f64> {
    let mut xi_max = 64.0 * PI;
    for _ in 0..12 {
        let tail = spectral_tail_bound(config, table, xi_max);
        if tail < TAIL_TOL {
            return Ok(xi_max);
        }
        xi_max *= 2.0;
    }
    Err(Error::Tail {
        xi_max,
        tol: TAIL_TOL,
        observed: spectral_tail_bound(config, table, xi_max),
    })
}

/// Synthesizes the time wavelet on the reciprocal grid `dx = π / xi_max`
/// with `n_samples` points centered at 0.
pub fn synthesize_time(
    config: &FilterConfig,
    table: &DeltaTable,
    xi_max: f64,
    n_samples: usize,
) -> Result<SynthesizedWavelet> {
    if n_samples < 16 || !n_samples.is_power_of_two() {
        return Err(Error::Config(format!(
            "n_samples = {n_samples} must be a power of two, at least 16"
        )));
    }
    if !(xi_max > 0.0 && xi_max.is_finite()) {
        return Err(Error::Config(format!("xi_max = {xi_max} must be positive")));
    }
    let tail = spectral_tail_bound(config, table, xi_max);
    if !(tail < TAIL_TOL) {
        return Err(Error::Tail {
            xi_max,
            tol: TAIL_TOL,
            observed: tail,
        });
    }

    let n = n_samples;
    let d_xi = 2.0 * xi_max / n as f64;
    // Trapezoid sum of (1/2π) ∫ psi_hat e^{i x xi} d xi, rearranged into a
    // plain inverse DFT: with xi_m = -xi_max + m d_xi and
    // x_k = (k - n/2) π / xi_max, the phases split into (-1)^m, (-1)^k and
    // the DFT kernel (n/2 is even for every power of two >= 4).
    let mut spectrum: Vec<Complex64> = (0..n)
        .map(|m| {
            let xi = -xi_max + m as f64 * d_xi;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            wavelet_hat(config, table, xi) * sign
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);

    let dx = PI / xi_max;
    let scale = d_xi / TAU;
    let mut abscissae = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut max_imag = 0.0_f64;
    let mut l2 = 0.0;
    for (k, z) in spectrum.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let v = sign * scale * z.re;
        max_imag = max_imag.max((scale * z.im).abs());
        abscissae.push((k as f64 - n as f64 / 2.0) * dx);
        values.push(v);
        l2 += v * v * dx;
    }
    Ok(SynthesizedWavelet {
        samples: SampledFunction::new(
            abscissae,
            values,
            SampleMeta {
                quantity: "psi".to_string(),
                sigma: config.sigma,
                d: config.d,
            },
        ),
        max_imag,
        l2_mass: l2,
        xi_max,
    })
}

/// Plancherel mass `(1/2π) ∫ |psi_hat|^2` over `[-xi_max, xi_max]` by
/// composite Simpson; independent of the FFT synthesis path.
pub fn plancherel_mass(
    config: &FilterConfig,
    table: &DeltaTable,
    xi_max: f64,
    intervals: usize,
) -> f64 {
    composite_simpson(
        &|xi| wavelet_hat(config, table, xi).norm_sqr(),
        -xi_max,
        xi_max,
        intervals,
    ) / TAU
}

/// Periodization sum `Σ_{|k| <= k_max} |phi_hat(xi + 2πk)|^2`; equals 1 for
/// an orthonormal scaling function.
pub fn periodization(config: &FilterConfig, table: &DeltaTable, xi: f64, k_max: u32) -> f64 {
    debug_assert!(k_max >= 32);
    let mut sum = 0.0;
    for k in -(k_max as i64)..=k_max as i64 {
        let v = scaling_hat(config, table, xi + TAU * k as f64);
        sum += v * v;
    }
    sum
}

/// Envelope-based bound on the periodization tail beyond `k_max`, from a
/// fitted `|phi_hat| <= C exp(-rho g_sigma)` decay.
pub fn periodization_tail_bound(sigma: f64, fitted_c: f64, fitted_rho: f64, k_max: u32) -> f64 {
    let mut tail = 0.0;
    for k in k_max + 1..k_max + 100_000 {
        let log_term =
            2.0 * (fitted_c.ln() - fitted_rho * crate::scale::g(sigma, TAU * f64::from(k) - PI));
        let term = log_term.exp();
        tail += 2.0 * term; // both signs of k
        if term < 1e-280 {
            break;
        }
    }
    tail
}

/// Calderón sum `Σ_{j_min..j_max} |psi_hat(2^j xi)|^2`; equals 1 a.e. for an
/// orthonormal wavelet.
pub fn calderon(
    config: &FilterConfig,
    table: &DeltaTable,
    xi: f64,
    j_min: i32,
    j_max: i32,
) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::Domain {
            op: "calderon",
            detail: "xi must be nonzero (the dyadic orbit of 0 is degenerate)".into(),
        });
    }
    debug_assert!(j_min <= -30 && j_max >= 30);
    let mut sum = 0.0;
    for j in j_min..=j_max {
        sum += wavelet_hat(config, table, xi * 2.0_f64.powi(j)).norm_sqr();
    }
    Ok(sum)
}

/// Inner products `(1/2π) ∫ |psi_hat|^2 e^{ik xi} d xi` for `k = 0..=k_max`;
/// `δ_{k0}` for orthonormal integer translates. The integration window comes
/// from the spectral tail criterion.
pub fn translate_inner_products(
    config: &FilterConfig,
    table: &DeltaTable,
    k_max: u32,
) -> Result<Vec<(i64, Complex64)>> {
    debug_assert!(k_max <= 16);
    let xi_bound = auto_xi_max(config, table)?;
    // Resolve e^{ik xi} for k up to 16: about 20 nodes per wavelength.
    let intervals = ((2.0 * xi_bound / 0.02).ceil() as usize).div_ceil(2) * 2;
    let h = 2.0 * xi_bound / intervals as f64;
    // Simpson weights over a shared |psi_hat|^2 sample vector.
    let density: Vec<f64> = (0..=intervals)
        .map(|i| {
            let xi = -xi_bound + i as f64 * h;
            let w = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * wavelet_hat(config, table, xi).norm_sqr()
        })
        .collect();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max as i64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, dens) in density.iter().enumerate() {
            let xi = -xi_bound + i as f64 * h;
            acc += Complex64::from_polar(*dens, k as f64 * xi);
        }
        out.push((k, acc * (h / 3.0) / TAU));
    }
    Ok(out)
}
