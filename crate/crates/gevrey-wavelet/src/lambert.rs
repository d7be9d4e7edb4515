//! Principal branch of the Lambert W function on the real domain.
//!
//! `W(x)` is the inverse of `w -> w * exp(w)` on `[-1/e, inf)`. Evaluation
//! uses Halley's method with region-dependent initial guesses so that the
//! iteration converges in a handful of steps everywhere, plus a branch-point
//! series where the derivative blows up. Higher derivatives come from the
//! recurrence polynomials `p_n`:
//!
//! ```text
//! W^(n)(x) = W^n(x) * p_n(W(x)) / (x^n * (1 + W(x))^(2n-1)),
//! p_{n+1}(x) = (1 + x) p_n'(x) - (n x + 3n - 1) p_n(x),   p_1 = 1.
//! ```

use crate::{Error, Result};
use std::f64::consts::E;

/// Left endpoint of the real domain, `-1/e`.
pub const BRANCH_POINT: f64 = -1.0 / E;

/// Width of the window next to the branch point where Halley's method
/// stalls (`W'` blows up) and the square-root series is used instead.
const BRANCH_WINDOW: f64 = 1e-6;

const MAX_ITER: u32 = 50;

/// Principal branch `W(x)` for `x >= -1/e`.
///
/// The returned `w` satisfies `|w * exp(w) - x| <= 1e-14 * max(|x|, 1e-300)`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if !(x >= BRANCH_POINT) {
        return Err(Error::Domain {
            op: "lambert_w",
            detail: format!("x = {x} is below the branch point -1/e = {BRANCH_POINT}"),
        });
    }
    Ok(w0(x))
}

/// Unchecked evaluation; callers guarantee `x >= -1/e`.
pub(crate) fn w0(x: f64) -> f64 {
    debug_assert!(x >= BRANCH_POINT);
    if x == 0.0 {
        return 0.0;
    }
    if x - BRANCH_POINT <= BRANCH_WINDOW {
        return branch_series(x);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        // f = w e^w - x, fused to keep the residual sharp near the root.
        let f = w.mul_add(ew, -x);
        if f.abs() <= 1e-15 * x.abs().max(1e-300) {
            return w.max(-1.0);
        }
        // Halley step: denom = f' - f f'' / (2 f') with
        // f' = e^w (w + 1), f'' = e^w (w + 2).
        let wp1 = w + 1.0;
        let denom = ew * wp1 - f * (w + 2.0) / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        // Step below one ulp of w: the iterate is pinned to the nearest
        // representable root even when the residual check cannot resolve it.
        if step.abs() <= f64::EPSILON * w.abs() {
            return w.max(-1.0);
        }
    }
    panic!("lambert_w: Halley iteration cap exceeded at x = {x}");
}

fn initial_guess(x: f64) -> f64 {
    if x.abs() < 0.3 {
        // Series around 0: W(x) = x - x^2 + 3/2 x^3 + O(x^4).
        x * (1.0 + x * (-1.0 + 1.5 * x))
    } else if x >= E {
        let l = x.ln();
        l - l.ln()
    } else if x > 0.0 {
        // Chord between W(0.3) and W(e) = 1.
        const W03: f64 = 0.23675531078855933;
        W03 + (1.0 - W03) * (x - 0.3) / (E - 0.3)
    } else {
        // (-1/e + window, -0.3]: seed with the branch-point series.
        branch_series(x)
    }
}

/// Expansion in `p = sqrt(2 (e x + 1))` around the branch point.
fn branch_series(x: f64) -> f64 {
    let p2 = 2.0 * E.mul_add(x, 1.0).max(0.0);
    let p = p2.sqrt();
    -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)))
}

/// First derivative `W'(x) = W(x) / (x (1 + W(x)))` for `x > 0`.
pub fn lambert_w_prime(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            op: "lambert_w_prime",
            detail: format!("x = {x} must be positive"),
        });
    }
    let w = w0(x);
    Ok(w / (x * (1.0 + w)))
}

/// Polynomial `p_n` from the derivative recurrence, stored by ascending
/// power with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambertPolynomial {
    coefficients: Vec<i128>,
}

impl LambertPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[i128] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc.mul_add(x, c as f64))
    }
}

/// `p_n` by exact application of the recurrence.
pub fn p_polynomial(n: u32) -> Result<LambertPolynomial> {
    if n == 0 {
        return Err(Error::Domain {
            op: "p_polynomial",
            detail: "n must be at least 1 (p_1 = 1)".into(),
        });
    }
    let mut coeffs: Vec<i128> = vec![1];
    for m in 1..n {
        coeffs = step_recurrence(&coeffs, m).ok_or(Error::Overflow {
            op: "p_polynomial",
            n: m + 1,
        })?;
    }
    Ok(LambertPolynomial { coefficients: coeffs })
}

/// One step `p_{m+1} = (1 + x) p_m' - (m x + 3m - 1) p_m`.
fn step_recurrence(p: &[i128], m: u32) -> Option<Vec<i128>> {
    let m = m as i128;
    let mut next = vec![0i128; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        let ki = k as i128;
        if k >= 1 {
            // x^{k-1} term of p' and the (1+x) spread of it.
            next[k - 1] = next[k - 1].checked_add(ki.checked_mul(c)?)?;
        }
        next[k] = next[k].checked_add(ki.checked_mul(c)?)?;
        // -(3m - 1) p_m
        next[k] = next[k].checked_sub((3 * m - 1).checked_mul(c)?)?;
        // -m x p_m
        next[k + 1] = next[k + 1].checked_sub(m.checked_mul(c)?)?;
    }
    while next.len() > 1 && *next.last().unwrap() == 0 {
        next.pop();
    }
    Some(next)
}

/// `n`-th derivative of `W` at `x > 0`.
///
/// Above order 10 the powers `x^n` and `(1+W)^(2n-1)` are combined in the
/// log domain so that large arguments do not overflow.
pub fn lambert_w_derivative(x: f64, n: u32) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            op: "lambert_w_derivative",
            detail: format!("x = {x} must be positive"),
        });
    }
    if n == 0 {
        return Err(Error::Domain {
            op: "lambert_w_derivative",
            detail: "derivative order must be at least 1".into(),
        });
    }
    let w = w0(x);
    let p = p_polynomial(n)?;
    let pn = p.eval(w);
    let n_i = n as i32;
    if n <= 10 {
        Ok(w.powi(n_i) * pn / (x.powi(n_i) * (1.0 + w).powi(2 * n_i - 1)))
    } else {
        let log_mag = f64::from(n) * (w.ln() - x.ln()) + pn.abs().ln()
            - f64::from(2 * n - 1) * (1.0 + w).ln();
        Ok(pn.signum() * log_mag.exp())
    }
}
