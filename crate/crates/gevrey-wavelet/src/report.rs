//! The bundled verification suite: every identity and estimate the
//! construction makes checkable, evaluated into a machine-readable report.
//!
//! Each check carries the measured value, the threshold it was held
//! against, and a pass flag; the report passes when every check does. The
//! JSON serialization is deterministic (sorted keys, no NaN; exact zeros
//! are flagged through booleans upstream).

use crate::cycles::{cycle_factors, enumerate_cycles};
use crate::decay::{
    c_eta_partial_sum, c_eta_tail_estimate, flatness_analytic_first, flatness_check,
    run_decay_suite,
};
use crate::filter::{build_delta_table, delta, m0, DeltaTable, FilterConfig, ZERO_ANGLE};
use crate::lambert::{lambert_w, BRANCH_POINT};
use crate::scale::f_rho_sigma;
use crate::transform::{
    calderon, log_scaling_hat, periodization, periodization_tail_bound, plancherel_mass,
    scaling_hat, synthesize_time, translate_inner_products, truncation_index,
    SynthesizedWavelet,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::f64::consts::{E, PI, TAU};

/// One named verification entry.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    /// Measured residual, bracket, or witness value.
    pub value: f64,
    /// Threshold the value was compared against.
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn residual(name: &'static str, value: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name,
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
            detail,
        }
    }

    fn witness(name: &'static str, value: f64, threshold: f64, detail: String) -> Self {
        Self {
            name,
            value,
            tolerance: threshold,
            pass: value.is_finite() && value >= threshold,
            detail,
        }
    }
}

/// Full-suite outcome with the configuration snapshot.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub config: FilterConfig,
    pub eps: f64,
    pub eta: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": if c.value.is_finite() { c.value } else { f64::MAX },
                    "value_finite": c.value.is_finite(),
                    "tolerance": c.tolerance,
                    "pass": c.pass,
                    "detail": c.detail,
                })
            })
            .collect();
        json!({
            "config": {
                "sigma": self.config.sigma,
                "d": self.config.d,
                "quad_tol": self.config.quad_tol,
                "table_n": self.config.table_n,
                "eps": self.eps,
                "eta": self.eta,
            },
            "checks": checks,
            "pass": self.pass,
        })
    }
}

/// Order-stable map over a slice with a fixed-size worker pool.
pub(crate) fn parallel_map<T, U, F>(jobs: usize, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    if jobs <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    let mut out: Vec<Option<U>> = Vec::new();
    out.resize_with(items.len(), || None);
    std::thread::scope(|scope| {
        for (slots, inputs) in out.chunks_mut(chunk).zip(items.chunks(chunk)) {
            let f = &f;
            scope.spawn(move || {
                for (slot, item) in slots.iter_mut().zip(inputs) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("worker filled slot")).collect()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Runs every check of the verification suite.
pub fn run_full_verification(
    config: &FilterConfig,
    eps: f64,
    eta: f64,
    jobs: usize,
) -> Result<VerificationReport> {
    config.validate()?;
    if !(eps > 0.0 && eps < 8.0 * PI / 15.0) {
        return Err(Error::Config(format!("eps = {eps} must lie in (0, 8π/15)")));
    }
    if !(eta > 1.0) {
        return Err(Error::Config(format!("eta = {eta} must exceed 1")));
    }
    let table = build_delta_table(config)?;
    let mut checks = Vec::new();

    let decay_report = run_decay_suite(config, &table, eps, 3, 18, eta)?;

    checks.push(lambert_residual_check());
    checks.push(lambert_bounds_check());
    checks.push(qmf_check(config, &table, jobs));
    checks.extend(support_checks(config, &table));
    checks.extend(delta_checks(config, &table));
    checks.extend(scaling_checks(config, &table));
    checks.push(periodization_check(config, &table, jobs, &decay_report));
    checks.push(calderon_check(config, &table, jobs));
    checks.extend(translate_checks(config, &table)?);
    let synth = synthesize_time(config, &table, 256.0 * PI, 1 << 15)?;
    checks.extend(synthesis_checks(config, &table, &synth));
    checks.push(support_refinement_check(config, &table));
    checks.push(window_product_check(config, &table));
    checks.extend(decay_checks(config, &table, eps, &decay_report));
    checks.extend(flatness_checks(config.sigma));
    checks.extend(c_eta_checks(eps));
    checks.extend(cycle_checks(config, &table));
    checks.extend(figure_checks(config, &table, &synth));

    let pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        config: *config,
        eps,
        eta,
        checks,
        pass,
    })
}

fn lambert_residual_check() -> Check {
    let n = 10_000;
    let lo = 1e-6_f64;
    let hi = 1e10 + 1.0 / E;
    let mut worst = 0.0_f64;
    for i in 0..=n {
        let x = BRANCH_POINT + lo * (hi / lo).powf(i as f64 / n as f64);
        let w = lambert_w(x).expect("grid inside domain");
        worst = worst.max((w * w.exp() - x).abs() / x.abs().max(1.0));
    }
    Check::residual(
        "lambert_residual",
        worst,
        1e-14,
        format!("max |W e^W - x| / max(|x|, 1) over {} log-grid points", n + 1),
    )
}

fn lambert_bounds_check() -> Check {
    let n = 10_000;
    let mut worst = 0.0_f64;
    for i in 0..=n {
        let x = E * (1e10_f64 / E).powf(i as f64 / n as f64);
        let w = lambert_w(x).expect("x >= e");
        let (l, ll) = (x.ln(), x.ln().ln());
        worst = worst.max(l - ll - w).max(w - (l - 0.5 * ll));
    }
    Check::residual(
        "lambert_w3_bounds",
        worst.max(0.0),
        1e-13,
        "max violation of ln x - ln ln x <= W <= ln x - (1/2) ln ln x on x >= e".into(),
    )
}

fn qmf_check(config: &FilterConfig, table: &DeltaTable, jobs: usize) -> Check {
    let grid = linspace(-PI, PI, 10_001);
    let residuals = parallel_map(jobs, &grid, |&xi| {
        let a = m0(config, table, xi);
        let b = m0(config, table, xi + PI);
        (a * a + b * b - 1.0).abs()
    });
    let worst = residuals.into_iter().fold(0.0_f64, f64::max);
    Check::residual(
        "qmf_identity",
        worst,
        1e-12,
        "max |m0²(ξ) + m0²(ξ+π) - 1| over 10001 points of [-π, π]".into(),
    )
}

fn support_checks(config: &FilterConfig, table: &DeltaTable) -> Vec<Check> {
    let mut flat = 0.0_f64;
    for xi in linspace(0.0, PI / 5.0, 2001) {
        flat = flat.max((m0(config, table, xi) - 1.0).abs());
    }
    let mut outer = 0.0_f64;
    for xi in linspace(4.0 * PI / 5.0, PI, 2001) {
        outer = outer.max(m0(config, table, xi).abs());
    }
    let at_zero_angle = m0(config, table, 2.0 * PI / 3.0).abs();
    let at_third = (m0(config, table, PI / 3.0) - 1.0).abs();
    let residual = flat.max(outer).max(at_third);
    let mut bump = 0.0_f64;
    for xi in linspace(ZERO_ANGLE + 1e-4, 4.0 * PI / 5.0 - 1e-4, 2001) {
        bump = bump.max(m0(config, table, xi));
    }
    let mut low_band_min = f64::INFINITY;
    for xi in linspace(-PI / 3.0, PI / 3.0, 2001) {
        low_band_min = low_band_min.min(m0(config, table, xi));
    }
    vec![
        Check::residual(
            "support_plateaus",
            residual,
            1e-12,
            "m0 = 1 on [0, π/5], m0 = 0 on [4π/5, π], m0(π/3) = 1".into(),
        ),
        Check::residual(
            "support_zero_at_2pi_over_3",
            at_zero_angle,
            0.0,
            "m0(2π/3) vanishes exactly".into(),
        ),
        Check::witness(
            "support_bump_positive",
            bump,
            1e-6,
            "max of m0 over (2π/3, 4π/5) stays strictly positive".into(),
        ),
        Check::witness(
            "support_low_band_positive",
            low_band_min,
            0.99,
            "inf of m0 over [-π/3, π/3] stays away from 0 (the mirrored bump dips it below 1)"
                .into(),
        ),
    ]
}

fn delta_checks(config: &FilterConfig, table: &DeltaTable) -> Vec<Check> {
    let exact = [
        delta(table, 0.0) - 0.0,
        delta(table, 1.0) - 1.0,
        delta(table, 0.5) - 0.5,
    ]
    .iter()
    .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let mut monotone = true;
    let mut prev = -1.0;
    for x in linspace(-0.1, 1.1, 10_000) {
        let v = delta(table, x);
        if v < prev {
            monotone = false;
        }
        prev = v;
    }
    let doubled = FilterConfig {
        table_n: 2 * (config.table_n - 1) + 1,
        ..*config
    };
    let refined = build_delta_table(&doubled).expect("refined table");
    let drift = (delta(table, 0.3) - delta(&refined, 0.3)).abs();
    vec![
        Check::residual(
            "delta_endpoints",
            exact,
            0.0,
            "δ(0) = 0, δ(1/2) = 1/2, δ(1) = 1 exactly".into(),
        ),
        Check {
            name: "delta_monotone",
            value: if monotone { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: monotone,
            detail: "δ nondecreasing across a 10^4 grid".into(),
        },
        Check::residual(
            "delta_self_convergence",
            drift,
            1e-12,
            format!(
                "doubling table_n from {} to {} moves δ(0.3) by this much",
                config.table_n, doubled.table_n
            ),
        ),
    ]
}

fn scaling_checks(config: &FilterConfig, table: &DeltaTable) -> Vec<Check> {
    let mut plateau = (scaling_hat(config, table, 0.0) - 1.0).abs();
    for xi in linspace(-2.0 * PI / 5.0, 2.0 * PI / 5.0, 2001) {
        plateau = plateau.max((scaling_hat(config, table, xi) - 1.0).abs());
    }
    let mut at_lattice = 0.0_f64;
    for k in 1..=8 {
        at_lattice = at_lattice.max(scaling_hat(config, table, TAU * k as f64).abs());
        at_lattice = at_lattice.max(scaling_hat(config, table, -TAU * k as f64).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut exact = true;
    for _ in 0..100 {
        let xi: f64 = rng.gen_range(-4000.0..4000.0);
        let mut extended = 1.0;
        for j in 1..=truncation_index(xi) + 5 {
            let factor = m0(config, table, xi * 2.0_f64.powi(-(j as i32)));
            if factor == 0.0 {
                extended = 0.0;
                break;
            }
            extended *= factor;
        }
        exact &= extended.to_bits() == scaling_hat(config, table, xi).to_bits();
    }
    vec![
        Check::residual(
            "scaling_plateau",
            plateau,
            1e-14,
            "phi_hat = 1 on [-2π/5, 2π/5] and at 0".into(),
        ),
        Check::residual(
            "scaling_lattice_zeros",
            at_lattice,
            0.0,
            "phi_hat(2πk) = 0 for 1 <= |k| <= 8".into(),
        ),
        Check {
            name: "scaling_truncation_exact",
            value: if exact { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: exact,
            detail: "adding factors beyond J(ξ) leaves the product bit-identical (100 draws)"
                .into(),
        },
    ]
}

fn periodization_check(
    config: &FilterConfig,
    table: &DeltaTable,
    jobs: usize,
    decay: &crate::decay::DecayReport,
) -> Check {
    let grid = linspace(-PI, PI, 1000);
    let worst = parallel_map(jobs, &grid, |&xi| {
        (periodization(config, table, xi, 64) - 1.0).abs()
    })
    .into_iter()
    .fold(0.0_f64, f64::max);
    let tail = periodization_tail_bound(config.sigma, decay.fitted_c, decay.fitted_rho, 64);
    Check::residual(
        "periodization",
        worst,
        1e-8,
        format!(
            "Σ_k |phi_hat(ξ+2πk)|² over |k| <= 64 at 1000 points; fitted-envelope tail estimate {tail:.3e}"
        ),
    )
}

fn calderon_check(config: &FilterConfig, table: &DeltaTable, jobs: usize) -> Check {
    let grid: Vec<f64> = (0..100)
        .map(|i| 2.0_f64.powf(i as f64 / 99.0))
        .collect();
    let worst = parallel_map(jobs, &grid, |&xi| {
        (calderon(config, table, xi, -40, 40).expect("xi > 0") - 1.0).abs()
    })
    .into_iter()
    .fold(0.0_f64, f64::max);
    Check::residual(
        "calderon",
        worst,
        1e-8,
        "Σ_j |psi_hat(2^j ξ)|² over j in [-40, 40] at 100 log-uniform ξ in [1, 2]".into(),
    )
}

fn translate_checks(config: &FilterConfig, table: &DeltaTable) -> Result<Vec<Check>> {
    let products = translate_inner_products(config, table, 8)?;
    let mut worst = 0.0_f64;
    let mut worst_imag = 0.0_f64;
    for (k, v) in &products {
        let expected = if *k == 0 { 1.0 } else { 0.0 };
        worst = worst.max((v.re - expected).abs());
        worst_imag = worst_imag.max(v.im.abs());
    }
    Ok(vec![
        Check::residual(
            "translate_orthonormality",
            worst,
            1e-6,
            "(1/2π) ∫ |psi_hat|² e^{ikξ} = δ_{k0} for k <= 8".into(),
        ),
        Check::residual(
            "translate_imag_residue",
            worst_imag,
            1e-10,
            "imaginary parts of the translate inner products".into(),
        ),
    ])
}

fn synthesis_checks(
    config: &FilterConfig,
    table: &DeltaTable,
    synth: &SynthesizedWavelet,
) -> Vec<Check> {
    let oracle = plancherel_mass(config, table, synth.xi_max, 40_000);
    vec![
        Check::residual(
            "synthesis_imag_residue",
            synth.max_imag,
            1e-10,
            "largest imaginary part of the synthesized wavelet".into(),
        ),
        Check::residual(
            "synthesis_l2_mass",
            (synth.l2_mass - 1.0).abs(),
            1e-6,
            format!("∫|psi|² = {}; Plancherel oracle = {oracle}", synth.l2_mass),
        ),
        Check::residual(
            "synthesis_plancherel_agreement",
            (synth.l2_mass - oracle).abs(),
            1e-6,
            "time-grid mass against the independent quadrature oracle".into(),
        ),
    ]
}

fn support_refinement_check(config: &FilterConfig, table: &DeltaTable) -> Check {
    let halfwidth = 8.0 * PI / 15.0;
    let floor = (1e-300_f64).ln();
    let mut ok = true;
    let mut worst_excess = 0.0_f64;
    for n in 3..=12i32 {
        let center = 2.0_f64.powi(n + 2) * PI / 3.0;
        let lo = 2.0_f64.powi(n) * PI;
        let hi = 2.0_f64.powi(n + 1) * PI;
        for xi in linspace(lo, hi, 2048) {
            let (log_abs, zero) = log_scaling_hat(config, table, xi);
            if !zero && log_abs > floor {
                let excess = (xi - center).abs() - halfwidth;
                if excess >= 0.0 {
                    ok = false;
                    worst_excess = worst_excess.max(excess);
                }
            }
        }
    }
    Check {
        name: "support_refinement",
        value: worst_excess,
        tolerance: 0.0,
        pass: ok,
        detail: "coz phi_hat ∩ [2^n π, 2^{n+1} π] within 8π/15 of 2^{n+2}π/3, n = 3..12".into(),
    }
}

fn window_product_check(config: &FilterConfig, table: &DeltaTable) -> Check {
    let n = 4i32;
    let center = 2.0_f64.powi(n + 2) * PI / 3.0;
    let a_lo = PI / 3.0 - 4.0 * PI / 64.0;
    let a_hi = PI / 3.0 + 2.0 * PI / 64.0;
    let mut inf_m0 = f64::INFINITY;
    for xi in linspace(a_lo, a_hi, 4001) {
        inf_m0 = inf_m0.min(m0(config, table, xi));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut ok = true;
    let mut samples = 0;
    while samples < 50 {
        let t: f64 = rng.gen_range(-4.0 * PI / 15.0..4.0 * PI / 15.0);
        if t.abs() < 1e-3 {
            continue;
        }
        samples += 1;
        let xi = center + t;
        let shift = xi - center;
        let phi = scaling_hat(config, table, xi).abs();
        let mut product = 1.0;
        for j in 1..=(n + 1) {
            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            product *= m0(config, table, 2.0 * PI / 3.0 - sign * shift * 2.0_f64.powi(-j));
        }
        ok &= phi <= product * (1.0 + 1e-8);
        ok &= phi >= inf_m0 * product * (1.0 - 1e-8);
    }
    Check {
        name: "window_product_bound",
        value: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        pass: ok,
        detail: "two-sided dyadic product bound at 50 window samples, octave n = 4".into(),
    }
}

fn decay_checks(
    config: &FilterConfig,
    table: &DeltaTable,
    eps: f64,
    report: &crate::decay::DecayReport,
) -> Vec<Check> {
    let mut checks = vec![
        Check {
            name: "decay_not_band_limited",
            value: if report.all_nonzero { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: report.all_nonzero,
            detail: "phi_hat(ξ_n) != 0 for n = 3..18".into(),
        },
        Check::residual(
            "decay_upper_bracket",
            report.upper_bracket_ratio,
            10.0,
            format!(
                "spread of -ln|phi_hat(ξ_n)| / g_sigma(ξ_n); fitted rho = {:.4}, C = {:.4e}",
                report.fitted_rho, report.fitted_c
            ),
        ),
        Check {
            name: "decay_lower_witness",
            value: if report.lower_bound_ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: report.lower_bound_ok,
            detail: "r_lower(n) <= 2 r_lower(3) along the probes".into(),
        },
        Check::witness(
            "decay_envelope_rho_min",
            report.envelope_r.0,
            1e-6,
            format!(
                "local envelope exponents on ±{:.4}: [{:.4}, {:.4}]",
                report.envelope_window, report.envelope_r.0, report.envelope_r.1
            ),
        ),
    ];
    // Exclusion witness: the envelope gap against g_{1.01} must grow.
    let first = xi_witness(config, table, 3, eps);
    let last = xi_witness(config, table, 18, eps);
    let mut monotone = true;
    let mut prev = 0.0;
    for n in 3..=18 {
        let w = xi_witness(config, table, n, eps);
        if w <= prev {
            monotone = false;
        }
        prev = w;
    }
    checks.push(Check::witness(
        "decay_exclusion_growth",
        if monotone { last / first } else { 0.0 },
        1.5,
        "g_{1.01}(ξ_n) / -ln|phi_hat(ξ_n)| grows monotonically by at least 1.5x".into(),
    ));
    checks
}

fn xi_witness(config: &FilterConfig, table: &DeltaTable, n: u32, eps: f64) -> f64 {
    let xi = crate::decay::xi_n(n, eps).expect("eps validated");
    1.0 / crate::decay::decay_ratio(config, table, xi, 1.01)
}

fn flatness_checks(sigma: f64) -> Vec<Check> {
    let windows: [(u32, &[f64]); 3] = [
        (1, &[0.2, 0.1, 0.05, 0.02]),
        (2, &[0.04, 0.02, 0.01, 0.005]),
        (3, &[0.0045, 0.003, 0.002, 0.0012]),
    ];
    let mut monotone = true;
    for (j, xs) in windows {
        let est = flatness_check(sigma, j, xs).expect("valid windows");
        monotone &= est.windows(2).all(|w| w[1].abs() < w[0].abs());
    }
    let exact = flatness_analytic_first(sigma, 0.2).expect("x > 0");
    let h = 0.2 * 1e-4;
    let rho = (-1.0 / sigma).exp();
    let fine = (f_rho_sigma(rho, sigma, 0.2 + h) - f_rho_sigma(rho, sigma, 0.2 - h)) / (2.0 * h);
    vec![
        Check {
            name: "flatness_decay",
            value: if monotone { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: monotone,
            detail: "finite-difference derivative magnitudes shrink below each order's peak"
                .into(),
        },
        Check::residual(
            "flatness_analytic_first",
            ((fine - exact) / exact).abs(),
            1e-6,
            "fine-step central difference against the chain-rule derivative at x = 0.2".into(),
        ),
    ]
}

fn c_eta_checks(eps: f64) -> Vec<Check> {
    // eta = 2: convergent (shrinking Cauchy increments, vanishing tail).
    let inc1 = c_eta_partial_sum(eps, 2.0, 2_000) - c_eta_partial_sum(eps, 2.0, 1_000);
    let inc2 = c_eta_partial_sum(eps, 2.0, 4_000) - c_eta_partial_sum(eps, 2.0, 2_000);
    let deep_tail = c_eta_tail_estimate(eps, 2.0, 1_000_000);
    // eta = 1: divergent (partial sums keep growing).
    let s3 = c_eta_partial_sum(eps, 1.0, 1_000);
    let s6 = c_eta_partial_sum(eps, 1.0, 1_000_000);
    vec![
        Check {
            name: "c_eta_convergent_at_two",
            value: deep_tail,
            tolerance: 1e-3,
            pass: inc2 < inc1 && deep_tail < 1e-3,
            detail: format!(
                "Cauchy increments {inc1:.3e} -> {inc2:.3e}; integral tail at depth 10^6"
            ),
        },
        Check::witness(
            "c_eta_divergent_at_one",
            s6 / s3,
            1.2,
            format!("partial sums S(10^3) = {s3:.4}, S(10^6) = {s6:.4}"),
        ),
    ]
}

fn cycle_checks(config: &FilterConfig, table: &DeltaTable) -> Vec<Check> {
    let cycles = enumerate_cycles(8).expect("max_len within range");
    let mut ok = true;
    let mut worst = 0.0_f64;
    for cycle in &cycles {
        let factors = cycle_factors(config, table, cycle);
        let product: f64 = factors.iter().product();
        if cycle.len() == 1 && cycle[0].numerator() == 0 {
            ok &= product == 1.0;
            continue;
        }
        worst = worst.max(product.abs());
        let (idx, _) = factors
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite factors"))
            .expect("nonempty cycle");
        let xi = cycle[idx].to_radians().abs();
        ok &= (xi - 2.0 * PI / 3.0).abs() < 1e-12 || xi >= 4.0 * PI / 5.0 - 1e-12;
    }
    vec![Check {
        name: "invariant_cycles",
        value: worst,
        tolerance: 1e-12,
        pass: ok && worst <= 1e-12,
        detail: format!(
            "{} cycles of length <= 8: products vanish off the trivial cycle, zeros on \
             {{2π/3}} ∪ [4π/5, π]",
            cycles.len()
        ),
    }]
}

fn figure_checks(
    config: &FilterConfig,
    table: &DeltaTable,
    synth: &SynthesizedWavelet,
) -> Vec<Check> {
    let figs = figure_series_with_synth(config, table, synth);
    let fig1 = &figs[0].series;
    let one_at_zero = fig1
        .iter()
        .find(|(x, _)| *x == 0.0)
        .map(|(_, y)| (*y - 1.0).abs())
        .unwrap_or(f64::INFINITY);
    let zero_at_third = fig1
        .iter()
        .find(|(x, _)| *x == 2.0 * PI / 3.0)
        .map(|(_, y)| y.abs())
        .unwrap_or(f64::INFINITY);
    let psi_peak = figs[4]
        .series
        .iter()
        .map(|(_, y)| y.abs())
        .fold(0.0_f64, f64::max);
    let all_finite = figs
        .iter()
        .all(|f| f.series.iter().all(|(x, y)| x.is_finite() && y.is_finite()));
    vec![
        Check::residual(
            "figure_filter_anchors",
            one_at_zero.max(zero_at_third),
            0.0,
            "filter series carries m0(0) = 1 and m0(2π/3) = 0 exactly".into(),
        ),
        Check {
            name: "figure_wavelet_amplitude",
            value: psi_peak,
            tolerance: 2.0,
            pass: all_finite && psi_peak > 0.5 && psi_peak < 2.0,
            detail: "synthesized wavelet peak amplitude sits in (0.5, 2)".into(),
        },
    ]
}

/// One figure: a name (used for the output file), a title, and the series.
#[derive(Debug, Clone)]
pub struct FigureSeries {
    pub name: &'static str,
    pub title: String,
    pub series: Vec<(f64, f64)>,
}

/// The five standard figures. Synthesis runs once internally.
pub fn figure_series(config: &FilterConfig, table: &DeltaTable) -> Result<Vec<FigureSeries>> {
    let synth = synthesize_time(config, table, 256.0 * PI, 1 << 15)?;
    Ok(figure_series_with_synth(config, table, &synth))
}

fn figure_series_with_synth(
    config: &FilterConfig,
    table: &DeltaTable,
    synth: &SynthesizedWavelet,
) -> Vec<FigureSeries> {
    // The filter grid carries the anchor angles exactly.
    let mut grid = linspace(-PI, PI, 1201);
    grid.extend_from_slice(&[-2.0 * PI / 3.0, 0.0, 2.0 * PI / 3.0]);
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    let fig1: Vec<(f64, f64)> = grid.iter().map(|&xi| (xi, m0(config, table, xi))).collect();

    let fig2: Vec<(f64, f64)> = linspace(-8.0 * PI, 8.0 * PI, 2001)
        .into_iter()
        .map(|xi| (xi, scaling_hat(config, table, xi)))
        .collect();
    let fig3: Vec<(f64, f64)> = linspace(2.0 * PI, 32.0 * PI, 3001)
        .into_iter()
        .map(|xi| (xi, scaling_hat(config, table, xi)))
        .collect();
    let fig4: Vec<(f64, f64)> = linspace(-16.0 * PI, 16.0 * PI, 2001)
        .into_iter()
        .map(|xi| {
            (
                xi,
                crate::transform::wavelet_hat(config, table, xi).norm(),
            )
        })
        .collect();
    let fig5: Vec<(f64, f64)> = synth
        .samples
        .abscissae
        .iter()
        .zip(&synth.samples.values)
        .filter(|(x, _)| (-10.0..=11.0).contains(*x))
        .map(|(x, v)| (*x, *v))
        .collect();

    vec![
        FigureSeries {
            name: "fig1_m0",
            title: format!("low-pass filter m0, sigma = {}, d = {:.6}", config.sigma, config.d),
            series: fig1,
        },
        FigureSeries {
            name: "fig2_phi_hat",
            title: "scaling function phi_hat".into(),
            series: fig2,
        },
        FigureSeries {
            name: "fig3_phi_hat_bumps",
            title: "phi_hat beyond the first zero: bumps at the cycle points".into(),
            series: fig3,
        },
        FigureSeries {
            name: "fig4_psi_hat",
            title: "|psi_hat|".into(),
            series: fig4,
        },
        FigureSeries {
            name: "fig5_psi",
            title: "synthesized wavelet psi".into(),
            series: fig5,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_is_order_stable() {
        let items: Vec<i64> = (0..1003).collect();
        let sequential = parallel_map(1, &items, |&x| x * x);
        for jobs in [2, 3, 8] {
            assert_eq!(parallel_map(jobs, &items, |&x| x * x), sequential);
        }
    }

    #[test]
    fn full_suite_passes_at_defaults() {
        let config = FilterConfig::default();
        let report = run_full_verification(&config, PI / 4.0, 2.0, 2).unwrap();
        for check in &report.checks {
            assert!(check.pass, "{} failed: {} (value {:e})", check.name, check.detail, check.value);
        }
        assert!(report.pass);
        // Deterministic serialization with sorted keys.
        let a = serde_json::to_string(&report.to_json()).unwrap();
        let b = serde_json::to_string(&report.to_json()).unwrap();
        assert_eq!(a, b);
        let parsed: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["pass"], Value::Bool(true));
    }

    #[test]
    fn figures_have_expected_shape() {
        let config = FilterConfig::default();
        let table = build_delta_table(&config).unwrap();
        let figs = figure_series(&config, &table).unwrap();
        assert_eq!(figs.len(), 5);
        let names: Vec<&str> = figs.iter().map(|f| f.name).collect();
        assert_eq!(
            names,
            ["fig1_m0", "fig2_phi_hat", "fig3_phi_hat_bumps", "fig4_psi_hat", "fig5_psi"]
        );
        for f in &figs {
            assert!(f.series.len() > 100, "{} too short", f.name);
        }
    }
}
