//! Quantifies the spectral decay of `phi_hat` against the envelope family
//! `C exp(-rho g_sigma)`.
//!
//! The probes sit at `xi_n = 2^{n+2} π / 3 - (-1)^n eps`, the points of the
//! dyadic bump windows where `phi_hat` provably stays nonzero. The suite
//! records the empirical exponents
//!
//! ```text
//! r(xi, s) = -ln |phi_hat(xi)| / g_s(xi)
//! ```
//!
//! at `s = sigma` (upper envelope: r stays in a narrow bracket) and at
//! `s = sigma_eta` (lower witness: r stays bounded), plus the exclusion
//! witness for small `s`, where the reciprocal `g_s / (-ln |phi_hat|)`
//! grows without bound. A finite-difference flatness check on
//! `f_{rho_sigma,sigma}` and the convergence dichotomy of the series
//! `Σ (W(a_j)/a_j)^eta` round out the harness.

use crate::filter::{verify_envelope, DeltaTable, FilterConfig};
use crate::lambert::w0;
use crate::scale::{f_prime, f_rho_sigma, g};
use crate::transform::log_scaling_hat;
use crate::{Error, Result};
use serde_json::{json, Value};
use std::f64::consts::PI;

/// `sigma_eta = (sigma + eta (sigma - 1)) / (1 + eta (sigma - 1))`, the
/// lower regularity index reachable by the witness at a given `eta > 1`.
pub fn sigma_eta(sigma: f64, eta: f64) -> Result<f64> {
    if !(sigma > 1.0) {
        return Err(Error::Domain {
            op: "sigma_eta",
            detail: format!("sigma = {sigma} must exceed 1"),
        });
    }
    if !(eta > 1.0) {
        return Err(Error::Domain {
            op: "sigma_eta",
            detail: format!("eta = {eta} must exceed 1 (the witness constant diverges otherwise)"),
        });
    }
    let t = eta * (sigma - 1.0);
    let value = (sigma + t) / (1.0 + t);
    debug_assert!(value > 1.0 && value < sigma.min(2.0));
    Ok(value)
}

/// Probe points `xi_n = 2^{n+2} π / 3 - (-1)^n eps ∈ [2^n π, 2^{n+1} π]`.
pub fn xi_n(n: u32, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 8.0 * PI / 15.0) {
        return Err(Error::Domain {
            op: "xi_n",
            detail: format!("eps = {eps} must lie in (0, 8π/15)"),
        });
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(2.0_f64.powi(n as i32 + 2) * PI / 3.0 - sign * eps)
}

/// Empirical decay exponent `-ln |phi_hat(xi)| / g_{sigma_ref}(xi)`.
///
/// Infinite when `phi_hat(xi)` is exactly zero; such points are excluded
/// from envelope fits.
pub fn decay_ratio(
    config: &FilterConfig,
    table: &DeltaTable,
    xi: f64,
    sigma_ref: f64,
) -> f64 {
    let (log_abs, zero) = log_scaling_hat(config, table, xi);
    if zero {
        f64::INFINITY
    } else {
        -log_abs / g(sigma_ref, xi)
    }
}

#[derive(Debug, Clone)]
pub struct DecaySample {
    pub n: u32,
    pub xi: f64,
    /// `ln |phi_hat(xi_n)|`; meaningful only when `zero` is false.
    pub log_abs_phi_hat: f64,
    pub zero: bool,
    pub r_upper: f64,
    pub r_lower: f64,
}

/// Decay suite outcome; `pass` is the conjunction of the three criteria
/// listed on [`run_decay_suite`].
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub sigma: f64,
    pub eta: f64,
    pub sigma_eta: f64,
    pub eps: f64,
    pub samples: Vec<DecaySample>,
    pub fitted_rho: f64,
    pub fitted_c: f64,
    pub all_nonzero: bool,
    /// max/min of `r_upper` across the samples.
    pub upper_bracket_ratio: f64,
    /// `r_lower(n) <= 2 r_lower(n_min)` for all n.
    pub lower_bound_ok: bool,
    /// Window half-width on which the local envelope was verified.
    pub envelope_window: f64,
    pub envelope_r: (f64, f64),
    pub pass: bool,
}

impl DecayReport {
    pub fn to_json(&self) -> Value {
        let samples: Vec<Value> = self
            .samples
            .iter()
            .map(|s| {
                json!({
                    "n": s.n,
                    "xi": s.xi,
                    "log_abs_phi_hat": if s.zero { 0.0 } else { s.log_abs_phi_hat },
                    "zero": s.zero,
                    "r_upper": s.r_upper,
                    "r_lower": s.r_lower,
                })
            })
            .collect();
        json!({
            "sigma": self.sigma,
            "eta": self.eta,
            "sigma_eta": self.sigma_eta,
            "eps": self.eps,
            "samples": samples,
            "fitted_rho": self.fitted_rho,
            "fitted_c": self.fitted_c,
            "all_nonzero": self.all_nonzero,
            "upper_bracket_ratio": self.upper_bracket_ratio,
            "lower_bound_ok": self.lower_bound_ok,
            "envelope_window": self.envelope_window,
            "envelope_r_min": self.envelope_r.0,
            "envelope_r_max": self.envelope_r.1,
            "pass": self.pass,
        })
    }
}

/// Half-width on which the local envelope can be verified: capped by the
/// operation's domain and by the start of the zero plateau at `4π/5`.
pub fn envelope_window(eps: f64, d: f64) -> f64 {
    let plateau_gap = 4.0 * PI / 5.0 - 2.0 * PI / 3.0;
    (3.0 * d).min(eps).min(0.95 * plateau_gap)
}

/// Runs the decay suite over `n = n_min..=n_max`:
///
/// * (a) `phi_hat(xi_n)` never vanishes (the filter is not band-limited);
/// * (b) the upper exponents `r_upper` stay in a bracket of ratio <= 10;
/// * (c) the lower exponents obey `r_lower(n) <= 2 r_lower(n_min)`.
pub fn run_decay_suite(
    config: &FilterConfig,
    table: &DeltaTable,
    eps: f64,
    n_min: u32,
    n_max: u32,
    eta: f64,
) -> Result<DecayReport> {
    if n_min < 3 || n_max > 20 || n_min > n_max {
        return Err(Error::Domain {
            op: "run_decay_suite",
            detail: format!("n range {n_min}..={n_max} must sit inside 3..=20"),
        });
    }
    let s_eta = sigma_eta(config.sigma, eta)?;
    let window = envelope_window(eps, config.d);
    let envelope_r = verify_envelope(config, table, window)?;

    let mut samples = Vec::with_capacity((n_max - n_min + 1) as usize);
    let mut all_nonzero = true;
    for n in n_min..=n_max {
        let xi = xi_n(n, eps)?;
        let (log_abs, zero) = log_scaling_hat(config, table, xi);
        all_nonzero &= !zero;
        let (r_upper, r_lower) = if zero {
            (f64::INFINITY, f64::INFINITY)
        } else {
            (-log_abs / g(config.sigma, xi), -log_abs / g(s_eta, xi))
        };
        samples.push(DecaySample {
            n,
            xi,
            log_abs_phi_hat: log_abs,
            zero,
            r_upper,
            r_lower,
        });
    }

    // Least-squares envelope fit ln|phi_hat| ~ ln C - rho g_sigma.
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in samples.iter().filter(|s| !s.zero) {
        let x = g(config.sigma, s.xi);
        sx += x;
        sy += s.log_abs_phi_hat;
        sxx += x * x;
        sxy += x * s.log_abs_phi_hat;
        count += 1.0;
    }
    let (fitted_rho, fitted_c) = if count >= 2.0 {
        let slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        let intercept = (sy - slope * sx) / count;
        (-slope, intercept.exp())
    } else {
        (f64::NAN, f64::NAN)
    };

    let finite_upper: Vec<f64> = samples
        .iter()
        .filter(|s| !s.zero)
        .map(|s| s.r_upper)
        .collect();
    let upper_bracket_ratio = if finite_upper.is_empty() {
        f64::INFINITY
    } else {
        let max = finite_upper.iter().cloned().fold(0.0_f64, f64::max);
        let min = finite_upper.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    };
    let r_lower_first = samples.first().map(|s| s.r_lower).unwrap_or(f64::INFINITY);
    let lower_bound_ok = all_nonzero
        && samples.iter().all(|s| s.r_lower <= 2.0 * r_lower_first);

    let pass = all_nonzero && upper_bracket_ratio <= 10.0 && lower_bound_ok;
    Ok(DecayReport {
        sigma: config.sigma,
        eta,
        sigma_eta: s_eta,
        eps,
        samples,
        fitted_rho,
        fitted_c,
        all_nonzero,
        upper_bracket_ratio,
        lower_bound_ok,
        envelope_window: window,
        envelope_r,
        pass,
    })
}

/// Central finite-difference estimates of the `j`-th derivative of
/// `f_{rho_sigma,sigma}` (with `rho_sigma = exp(-1/sigma)`) at each point of
/// `x_list`, step `h = x/20`. The magnitudes must decrease along a
/// decreasing `x_list`: the function is flat to all orders at 0.
pub fn flatness_check(sigma: f64, j: u32, x_list: &[f64]) -> Result<Vec<f64>> {
    if j == 0 || j > 5 {
        return Err(Error::Domain {
            op: "flatness_check",
            detail: format!("derivative order j = {j} must lie in 1..=5"),
        });
    }
    let decreasing = x_list.windows(2).all(|w| w[1] < w[0]);
    if x_list.is_empty() || !decreasing || x_list.iter().any(|&x| x < 1e-3) {
        return Err(Error::Domain {
            op: "flatness_check",
            detail: "x_list must be positive, strictly decreasing, min >= 1e-3".into(),
        });
    }
    let rho = (-1.0 / sigma).exp();
    let binom: Vec<f64> = (0..=j).map(|i| binomial(j, i)).collect();
    let estimates = x_list
        .iter()
        .map(|&x| {
            let h = x / 20.0;
            let mut acc = 0.0;
            for (i, b) in binom.iter().enumerate() {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let offset = j as f64 / 2.0 - i as f64;
                acc += sign * b * f_rho_sigma(rho, sigma, x + offset * h);
            }
            acc / h.powi(j as i32)
        })
        .collect();
    Ok(estimates)
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut value = 1.0;
    for i in 0..k {
        value = value * f64::from(n - i) / f64::from(i + 1);
    }
    value
}

/// Analytic first derivative of `f_{rho_sigma,sigma}`, the oracle for the
/// order-one flatness estimate.
pub fn flatness_analytic_first(sigma: f64, x: f64) -> Result<f64> {
    f_prime((-1.0 / sigma).exp(), sigma, x)
}

/// `a_j = ln(1 + 2^j / eps)` without overflow for large `j`.
fn a_j(eps: f64, j: u64) -> f64 {
    if j <= 900 {
        (2.0_f64.powi(j as i32) / eps).ln_1p()
    } else {
        j as f64 * std::f64::consts::LN_2 - eps.ln()
    }
}

/// Term `(W(a_j)/a_j)^eta` of the witness-constant series.
pub fn c_eta_term(eps: f64, eta: f64, j: u64) -> f64 {
    let a = a_j(eps, j);
    let w = w0(a);
    (eta * (w.ln() - a.ln())).exp()
}

/// Partial sum `Σ_{j=1}^{j_max} (W(a_j)/a_j)^eta`.
pub fn c_eta_partial_sum(eps: f64, eta: f64, j_max: u64) -> f64 {
    (1..=j_max).map(|j| c_eta_term(eps, eta, j)).sum()
}

/// Integral-comparison estimate of the tail `Σ_{j > j_from} (W(a_j)/a_j)^eta`
/// for `eta > 1`: substituting `u = W(a)` turns the tail into
/// `(1/ln 2) ∫ (1+u) e^{-(eta-1)u} du` from `W(a_{j_from})`.
pub fn c_eta_tail_estimate(eps: f64, eta: f64, j_from: u64) -> f64 {
    assert!(eta > 1.0);
    let u0 = w0(a_j(eps, j_from));
    let em = eta - 1.0;
    (-em * u0).exp() * ((1.0 + u0) / em + 1.0 / (em * em)) / std::f64::consts::LN_2
}
