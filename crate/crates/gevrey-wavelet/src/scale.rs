//! Scale functions and weight sequences controlling the spectral decay.
//!
//! The building blocks, for `sigma > 1`:
//!
//! ```text
//! omega_sigma(x) = x^(sigma/(sigma-1)) / W(x)^(1/(sigma-1)),  omega_sigma(0) = 0,
//! g_sigma(x)     = omega_sigma(ln(1 + |x|)),
//! f_{rho,sigma}(x) = exp(-rho * g_sigma(1/x)),
//! ```
//!
//! together with the sequence `M_p = p^(tau * p^sigma)` (handled in the log
//! domain; it overflows doubles near p = 30 already for tau = 1, sigma = 2),
//! its associated function `T(x) = sup_p ln(x^p / M_p)`, and
//! `h(x) = exp(-T(1/x)) = inf_p M_p x^p`.

use crate::lambert::{lambert_w_prime, w0};
use crate::{Error, Result};

/// Parameter triple shared by the scale functions: `sigma > 1`, `rho > 0`,
/// `tau > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreyParams {
    pub sigma: f64,
    pub rho: f64,
    pub tau: f64,
}

impl GevreyParams {
    pub fn new(sigma: f64, rho: f64, tau: f64) -> Result<Self> {
        let params = Self { sigma, rho, tau };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 1.0) {
            return Err(Error::Config(format!("sigma = {} must exceed 1", self.sigma)));
        }
        if !(self.rho > 0.0) {
            return Err(Error::Config(format!("rho = {} must be positive", self.rho)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!("tau = {} must be positive", self.tau)));
        }
        Ok(())
    }
}

/// `omega_sigma(x)` for `x >= 0`.
///
/// Evaluated as `x * exp(W(x) / (sigma - 1))`, which equals the defining
/// quotient by `x / W(x) = exp(W(x))` and stays stable down to `x = 0`.
pub fn omega(sigma: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            op: "omega",
            detail: format!("x = {x} must be nonnegative (callers pass |x|)"),
        });
    }
    Ok(omega_inner(sigma, x))
}

pub(crate) fn omega_inner(sigma: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x * (w0(x) / (sigma - 1.0)).exp()
}

/// Derivative of `omega_sigma`, used by the analytic envelope slopes:
/// `omega' = exp(W/(sigma-1)) * (1 + x W'(x) / (sigma-1))`.
fn omega_prime(sigma: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let wp = lambert_w_prime(x).expect("omega_prime: x > 0");
    (w0(x) / (sigma - 1.0)).exp() * (1.0 + x * wp / (sigma - 1.0))
}

/// `g_sigma(x) = omega_sigma(ln(1 + |x|))`; even, vanishing at 0, strictly
/// increasing on `x >= 0`.
pub fn g(sigma: f64, x: f64) -> f64 {
    omega_inner(sigma, x.abs().ln_1p())
}

/// Derivative of `g_sigma` on `x > 0`.
pub(crate) fn g_prime(sigma: f64, x: f64) -> f64 {
    omega_prime(sigma, x.ln_1p()) / (1.0 + x)
}

/// `f_{rho,sigma}(x) = exp(-rho * g_sigma(1/|x|))` with `f(0) = 0`.
pub fn f(params: &GevreyParams, x: f64) -> f64 {
    f_rho_sigma(params.rho, params.sigma, x)
}

pub fn f_rho_sigma(rho: f64, sigma: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let t = 1.0 / x.abs();
    if !t.is_finite() {
        return 0.0;
    }
    (-rho * g(sigma, t)).exp()
}

/// Analytic first derivative of `f_{rho,sigma}` on `x > 0`:
/// `f'(x) = f(x) * rho * g_sigma'(1/x) / x^2`.
pub fn f_prime(rho: f64, sigma: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            op: "f_prime",
            detail: format!("x = {x} must be positive"),
        });
    }
    let fx = f_rho_sigma(rho, sigma, x);
    Ok(fx * rho * g_prime(sigma, 1.0 / x) / (x * x))
}

/// `ln M_p` for `M_p = p^(tau p^sigma)`, with `M_0 = M_1 = 1`.
pub fn log_m(tau: f64, sigma: f64, p: u32) -> f64 {
    if p <= 1 {
        return 0.0;
    }
    let pf = f64::from(p);
    tau * pf.powf(sigma) * pf.ln()
}

/// How many consecutive decreasing terms end the `sup_p` scan. The terms
/// `p ln x - tau p^sigma ln p` are eventually strictly decreasing; the
/// hysteresis guards against flat stretches at small p.
const SCAN_HYSTERESIS: u32 = 8;
const SCAN_CAP: u32 = 10_000;

/// Associated function `T(x) = max(0, sup_p (p ln x - ln M_p))` for `x > 0`.
pub fn associated_t(tau: f64, sigma: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let lx = x.ln();
    let mut best = 0.0_f64; // p = 0 term
    let mut prev = 0.0_f64;
    let mut decreasing = 0;
    for p in 1..=SCAN_CAP {
        let term = f64::from(p) * lx - log_m(tau, sigma, p);
        if term > best {
            best = term;
        }
        if term < prev {
            decreasing += 1;
            if decreasing >= SCAN_HYSTERESIS {
                break;
            }
        } else {
            decreasing = 0;
        }
        prev = term;
    }
    best
}

/// `h(x) = exp(-T(1/x)) = inf_p M_p x^p` for `x > 0`.
pub fn h(tau: f64, sigma: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            op: "h",
            detail: format!("x = {x} must be positive"),
        });
    }
    Ok((-associated_t(tau, sigma, 1.0 / x)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambert::lambert_w;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn omega_special_values() {
        // W(e) = 1 forces omega_2(e) = e^2 / 1.
        assert_relative_eq!(omega(2.0, E).unwrap(), E * E, max_relative = 1e-14);
        assert_eq!(omega(2.0, 0.0).unwrap(), 0.0);
        assert_eq!(omega(3.0, 0.0).unwrap(), 0.0);
        assert!(omega(2.0, -0.1).is_err());
    }

    #[test]
    fn omega_small_argument_series_oracle() {
        // omega_sigma(x) ~ x near 0; oracle replaces W by its 3-term series.
        let x = 1e-6_f64;
        let w_series = x * (1.0 + x * (-1.0 + 1.5 * x));
        let oracle = x * (x / w_series).powf(1.0_f64);
        let got = omega(2.0, x).unwrap();
        assert!((got - x).abs() / x <= 0.005, "omega_2(1e-6) = {got}");
        assert_relative_eq!(got, oracle, max_relative = 1e-9);
    }

    #[test]
    fn omega_agrees_with_quotient_form() {
        for &sigma in &[1.5, 2.0, 3.0] {
            for &x in &[0.2, 1.0, 4.0, 50.0, 3000.0] {
                let w = lambert_w(x).unwrap();
                let quotient = x.powf(sigma / (sigma - 1.0)) / w.powf(1.0 / (sigma - 1.0));
                assert_relative_eq!(
                    omega(sigma, x).unwrap(),
                    quotient,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn omega_strictly_increasing() {
        let mut prev = 0.0;
        for i in 1..=500 {
            let x = i as f64 * 0.05;
            let v = omega(2.0, x).unwrap();
            assert!(v > prev, "omega not increasing at x = {x}");
            prev = v;
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g(2.0, 0.0), 0.0);
        assert_eq!(g(3.0, 0.0), 0.0);
        // ln(1 + (e^e - 1)) = e and W(e) = 1 force g = e^2.
        assert_relative_eq!(g(2.0, E.exp() - 1.0), E * E, max_relative = 1e-13);
        // Composition oracle.
        assert_relative_eq!(
            g(2.0, 100.0),
            omega(2.0, 101.0_f64.ln()).unwrap(),
            max_relative = 1e-15
        );
        // Even and strictly increasing on the positive axis.
        assert_eq!(g(2.0, -100.0), g(2.0, 100.0));
        let mut prev = 0.0;
        for i in 1..=300 {
            let x = i as f64 * 0.1;
            let v = g(2.0, x);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn f_examples() {
        let p = GevreyParams::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(f(&p, 0.0), 0.0);
        let x = 1.0 / (E.exp() - 1.0);
        assert_relative_eq!(f(&p, x), (-E * E).exp(), max_relative = 1e-12);
    }

    #[test]
    fn f_power_law_in_rho() {
        // f_{rho,sigma} = (f_{rho_sigma,sigma})^(rho/rho_sigma).
        for &sigma in &[1.5, 2.0, 3.0] {
            let rho_sigma = (-1.0_f64 / sigma).exp();
            for &rho in &[0.4, 1.0, 2.5] {
                for &x in &[0.1, 1.0, 10.0] {
                    let lhs = f_rho_sigma(rho, sigma, x);
                    let rhs = f_rho_sigma(rho_sigma, sigma, x).powf(rho / rho_sigma);
                    assert!(
                        (lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300),
                        "sigma={sigma} rho={rho} x={x}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn f_range_and_monotonicity() {
        let p = GevreyParams::new(2.0, 1.0, 1.0).unwrap();
        let mut prev = 0.0;
        for i in 1..=400 {
            let x = i as f64 * 0.05;
            let v = f(&p, x);
            assert!((0.0..1.0).contains(&v));
            assert!(v > prev, "f not increasing at x = {x}");
            prev = v;
        }
        // Large arguments approach 1 from below.
        assert!(f(&p, 1e12) < 1.0);
        assert!(f(&p, 1e12) > 0.999);
        // Evenness.
        assert_eq!(f(&p, -0.7), f(&p, 0.7));
    }

    #[test]
    fn f_monotone_in_parameters() {
        for &x in &[0.3, 1.0, 5.0] {
            // Nonincreasing in rho.
            let mut prev = f64::INFINITY;
            for &rho in &[0.5, 1.0, 2.0] {
                let v = f_rho_sigma(rho, 2.0, x);
                assert!(v <= prev, "f increasing in rho at x = {x}");
                prev = v;
            }
            // Nondecreasing in sigma.
            let mut prev = 0.0;
            for &sigma in &[1.5, 2.0, 3.0] {
                let v = f_rho_sigma(1.0, sigma, x);
                assert!(v >= prev, "f decreasing in sigma at x = {x}");
                prev = v;
            }
        }
    }

    #[test]
    fn f_prime_matches_central_difference() {
        for &x in &[0.2, 0.5, 1.5] {
            let h = 1e-6 * x;
            let fd = (f_rho_sigma(1.0, 2.0, x + h) - f_rho_sigma(1.0, 2.0, x - h)) / (2.0 * h);
            let an = f_prime(1.0, 2.0, x).unwrap();
            assert_relative_eq!(an, fd, max_relative = 1e-6);
        }
        assert!(f_prime(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn exp_minus_omega_dominates_exponentials() {
        // exp(x - omega_2(x)) decreasing toward 0 (checked in log form so
        // that underflow at x = 100 and 1000 cannot mask the trend).
        let logs: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&x| x - omega(2.0, x).unwrap())
            .collect();
        assert!(logs[0] > logs[1] && logs[1] > logs[2]);
        assert!(logs[2] < 1e-10_f64.ln());
    }

    #[test]
    fn log_m_examples() {
        assert_eq!(log_m(1.0, 2.0, 0), 0.0);
        assert_eq!(log_m(1.0, 2.0, 1), 0.0);
        assert_relative_eq!(log_m(1.0, 2.0, 2), 4.0 * 2.0_f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(log_m(1.0, 2.0, 2).exp(), 16.0, max_relative = 1e-13);
    }

    #[test]
    fn sequence_log_convexity() {
        // (M.1): M_p^2 <= M_{p-1} M_{p+1}.
        for &(tau, sigma) in &[(1.0, 1.5), (1.0, 2.0), (0.5, 3.0), (2.0, 2.0)] {
            for p in 1..=100 {
                let lhs = 2.0 * log_m(tau, sigma, p);
                let rhs = log_m(tau, sigma, p - 1) + log_m(tau, sigma, p + 1);
                assert!(lhs <= rhs + 1e-9, "(M.1) fails at p = {p}, sigma = {sigma}");
            }
        }
    }

    #[test]
    fn sequence_ratio_series_converges() {
        // (M.3)': sum of M_{p-1}/M_p converges; the term at p = 50 is
        // already negligible and partial sums are increasing by positivity.
        for &sigma in &[1.5, 2.0, 3.0] {
            let mut sum = 0.0;
            for p in 1..=50u32 {
                // Deep terms underflow to zero; that is the correct limit.
                let term = (log_m(1.0, sigma, p - 1) - log_m(1.0, sigma, p)).exp();
                assert!(term >= 0.0 && term.is_finite());
                sum += term;
            }
            let tail_term = (log_m(1.0, sigma, 49) - log_m(1.0, sigma, 50)).exp();
            assert!(tail_term < 1e-12, "sigma = {sigma}: term {tail_term:e}");
            assert!(sum.is_finite() && sum > 0.0);
        }
    }

    #[test]
    fn sequence_separation_between_sigmas() {
        // h^(p^s1) M_p^{tau0,s1} <= C M_p^{tau,s2} for s2 > s1: the log gap
        // becomes and stays negative.
        let (s1, s2, h_base) = (1.5, 2.0, 10.0_f64);
        let gap = |p: u32| {
            f64::from(p).powf(s1) * h_base.ln() + log_m(1.0, s1, p) - log_m(1.0, s2, p)
        };
        let first_negative = (1..=200).find(|&p| gap(p) < 0.0).expect("gap never negative");
        assert!(first_negative < 200);
        for p in first_negative..=200 {
            assert!(gap(p) < 0.0, "gap positive again at p = {p}");
        }
    }

    /// Exhaustive-scan oracle for the associated function.
    fn brute_t(tau: f64, sigma: f64, x: f64, p_max: u32) -> f64 {
        (0..=p_max)
            .map(|p| f64::from(p) * x.ln() - log_m(tau, sigma, p))
            .fold(0.0_f64, f64::max)
    }

    #[test]
    fn associated_t_examples() {
        // Vanishes for small arguments.
        for &(tau, sigma) in &[(1.0, 2.0), (0.3, 1.5), (2.0, 3.0)] {
            assert_eq!(associated_t(tau, sigma, 0.5), 0.0);
        }
        let x = 10.0_f64.exp2().exp(); // unusual but fixed large value
        let _ = x;
        let big = (10.0_f64).exp();
        assert_relative_eq!(
            associated_t(1.0, 2.0, big),
            brute_t(1.0, 2.0, big, 200),
            max_relative = 1e-14
        );
        // Monotone in x.
        let mut prev = -1.0;
        for i in 0..100 {
            let x = (0.2 * i as f64).exp();
            let t = associated_t(1.0, 2.0, x);
            assert!(t >= prev);
            prev = t;
        }
    }

    #[test]
    fn h_examples() {
        // p = 0 wins for x >= 1.
        assert_eq!(h(1.0, 2.0, 1.0).unwrap(), 1.0);
        assert_eq!(h(1.0, 2.0, 7.5).unwrap(), 1.0);
        // Brute-force inf oracle at x = 1e-4.
        let x = 1e-4_f64;
        let oracle = (0..=200u32)
            .map(|p| log_m(1.0, 2.0, p) + f64::from(p) * x.ln())
            .fold(f64::INFINITY, f64::min)
            .exp();
        assert_relative_eq!(h(1.0, 2.0, x).unwrap(), oracle, max_relative = 1e-12);
        // The p = 1 term bounds the inf for x <= 1.
        for &x in &[1e-6, 1e-3, 0.1, 1.0] {
            assert!(h(1.0, 2.0, x).unwrap() <= x * (1.0 + 1e-14));
        }
        assert!(h(1.0, 2.0, 0.0).is_err());
        assert!(h(1.0, 2.0, -3.0).is_err());
    }

    #[test]
    fn f_sandwiched_between_h_scales() {
        // A h_{tau1} <= f_{1,2} <= B h_{tau2}: the ratio against a small tau
        // stays bounded below by a positive constant, against a large tau
        // bounded above, on a log grid of (0, 1].
        let mut min_low = f64::INFINITY;
        let mut max_high = 0.0_f64;
        for i in 0..=300 {
            let x = 1e-6_f64 * (1.0_f64 / 1e-6).powf(i as f64 / 300.0);
            let fx = f_rho_sigma(1.0, 2.0, x);
            let ratio_low = fx / h(0.2, 2.0, x).unwrap();
            let ratio_high = fx / h(5.0, 2.0, x).unwrap();
            min_low = min_low.min(ratio_low);
            max_high = max_high.max(ratio_high);
        }
        assert!(min_low > 0.0, "lower sandwich ratio collapsed: {min_low:e}");
        assert!(max_high.is_finite(), "upper sandwich ratio diverged");
    }

    #[test]
    fn moment_bounds_grow_like_the_sequence() {
        // sup_x f(x)/x^p is finite and its log is dominated by a fitted
        // tau* p^sigma ln p + c: fit on p <= 20, verify through p = 40.
        let sigma = 2.0;
        let grid: Vec<f64> = (0..=1200)
            .map(|i| 1e-12_f64 * (1.0_f64 / 1e-12).powf(i as f64 / 1200.0))
            .collect();
        let log_sup = |p: u32| -> f64 {
            grid.iter()
                .map(|&x| -g(sigma, 1.0 / x) - f64::from(p) * x.ln())
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let basis = |p: u32| f64::from(p).powf(sigma) * f64::from(p).ln();
        // Least squares fit log_sup ~ tau* basis + c on p = 2..=20.
        let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for p in 2..=20 {
            let (bx, by) = (basis(p), log_sup(p));
            sx += bx;
            sy += by;
            sxx += bx * bx;
            sxy += bx * by;
            n += 1.0;
        }
        let tau_star = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let c = (sy - tau_star * sx) / n;
        let fit_resid = (2..=20u32)
            .map(|p| log_sup(p) - tau_star * basis(p) - c)
            .fold(f64::NEG_INFINITY, f64::max);
        for p in 1..=40u32 {
            let ls = log_sup(p);
            assert!(ls.is_finite(), "sup diverged at p = {p}");
            assert!(
                ls <= tau_star * basis(p) + c + fit_resid + 1e-6,
                "moment growth beyond fitted envelope at p = {p}"
            );
        }
    }

    #[test]
    fn associated_t_tracks_g() {
        // T_{1,2}(x) / g_2(x) stays in a fixed bracket and varies by less
        // than a factor 4 over [1e2, 1e8].
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for i in 0..=120 {
            let x = 1e2_f64 * (1e8_f64 / 1e2).powf(i as f64 / 120.0);
            let ratio = associated_t(1.0, 2.0, x) / g(2.0, x);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        assert!(lo >= 0.05 && hi <= 20.0, "bracket [{lo}, {hi}]");
        assert!(hi / lo < 4.0, "ratio varies too much: [{lo}, {hi}]");
    }

    #[test]
    fn params_validation() {
        assert!(GevreyParams::new(1.0, 1.0, 1.0).is_err());
        assert!(GevreyParams::new(2.0, 0.0, 1.0).is_err());
        assert!(GevreyParams::new(2.0, 1.0, -1.0).is_err());
        assert!(GevreyParams::new(1.5, 0.3, 2.0).is_ok());
    }
}
