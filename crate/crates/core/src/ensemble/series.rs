//! Closed-form ensemble bounds: the genus series on complete `q`-local
//! graphs, the genus-zero SYK bound and the `sqrt(log N)` bound.
//!
//! All of them are even in `t`: the coupling laws are symmetric, and
//! flipping every coupling reverses time.

use std::f64::consts::E;

use serde::Serialize;

use crate::ensemble::EnsembleError;

const FS_CONSTANT: f64 = 6144.0;

/// `48 J sqrt((q-1)/q)`.
pub fn lambda_star(q: usize, j: f64) -> f64 {
    48.0 * j * ((q as f64 - 1.0) / q as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenusSeries {
    pub value: f64,
    /// Contribution of genus `g` at index `g`.
    pub terms: Vec<f64>,
    /// `6144 e^4 (q-1)^3 / (q N) (J t)^2 e^{lambda t}`.
    pub base: f64,
    /// `e^{lambda t} / N`.
    pub prefactor: f64,
    /// Geometric majorant `q e^{lambda t} / N / (1 - y)`, infinite once
    /// `y = 6144 e^4 (q-1)^2 (J t)^2 e^{lambda t}` reaches 1.
    pub majorant: f64,
    /// Time where `y = 1`.
    pub divergence_time: f64,
}

fn check_qnj(n: f64, q: usize, j: f64) -> Result<(), EnsembleError> {
    if q < 2 || !(n >= 1.0) || !(j >= 0.0) || !j.is_finite() {
        return Err(EnsembleError::InvalidParams(format!("N = {n}, q = {q}, J = {j}")));
    }
    Ok(())
}

fn majorant_y(q: usize, j: f64, t: f64) -> f64 {
    let qm = q as f64 - 1.0;
    FS_CONSTANT * E.powi(4) * qm * qm * (j * t).powi(2) * (lambda_star(q, j) * t).exp()
}

/// Genus-truncated series with terms `e^{lambda t}/N * g! * base^g` for
/// `g = 0..=g_max`.
pub fn theorem_fs_series(n: usize, q: usize, j: f64, t: f64, g_max: usize) -> Result<GenusSeries, EnsembleError> {
    check_qnj(n as f64, q, j)?;
    if g_max + 1 > n {
        return Err(EnsembleError::GenusOutOfRange { g_max, n });
    }
    let t = t.abs();
    let (nf, qf) = (n as f64, q as f64);
    let growth = (lambda_star(q, j) * t).exp();
    let prefactor = growth / nf;
    let base = FS_CONSTANT * E.powi(4) * (qf - 1.0).powi(3) / (qf * nf) * (j * t).powi(2) * growth;
    let mut terms = Vec::with_capacity(g_max + 1);
    let mut ln_fact = 0.0;
    for g in 0..=g_max {
        if g > 0 {
            ln_fact += (g as f64).ln();
        }
        let term = if g == 0 {
            prefactor
        } else if base == 0.0 {
            0.0
        } else {
            (prefactor.ln() + ln_fact + g as f64 * base.ln()).exp()
        };
        terms.push(term);
    }
    let value = terms.iter().sum();
    let y = majorant_y(q, j, t);
    let majorant = if y < 1.0 { qf * prefactor / (1.0 - y) } else { f64::INFINITY };
    Ok(GenusSeries { value, terms, base, prefactor, majorant, divergence_time: fs_divergence_time(q, j) })
}

fn fs_divergence_time(q: usize, j: f64) -> f64 {
    if j == 0.0 {
        return f64::INFINITY;
    }
    let mut hi = 1.0 / j;
    while majorant_y(q, j, hi) < 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if majorant_y(q, j, mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Growth rate `2 sqrt(2(q-1)/q) J` of the genus-zero SYK bound.
pub fn syk_bound_rate(q: usize, j: f64) -> f64 {
    2.0 * (2.0 * (q as f64 - 1.0) / q as f64).sqrt() * j
}

/// Exact large-`q` growth rate `2 J`.
pub fn syk_largeq_exact_rate(j: f64) -> f64 {
    2.0 * j
}

/// Bound rate over its own `q -> inf` value: `sqrt((q-1)/q)`.
pub fn syk_rate_ratio(q: usize) -> f64 {
    ((q as f64 - 1.0) / q as f64).sqrt()
}

/// Bound rate over the exact large-`q` rate: `sqrt(2(q-1)/q)`, tending to
/// `sqrt 2`.
pub fn syk_rate_over_exact(q: usize) -> f64 {
    syk_bound_rate(q, 1.0) / syk_largeq_exact_rate(1.0)
}

/// `cosh(2 sqrt(2(q-1)/q) J t) / N`.
pub fn syk_genus0_bound(n: f64, q: usize, j: f64, t: f64) -> Result<f64, EnsembleError> {
    if q <= 2 || q % 2 == 1 {
        return Err(EnsembleError::BadQ(q));
    }
    check_qnj(n, q, j)?;
    Ok((syk_bound_rate(q, j) * t).cosh() / n)
}

/// Large-`q` exact growth `cosh(2 J t) / N`, for comparison only.
pub fn syk_largeq_exact_bound(n: f64, j: f64, t: f64) -> f64 {
    (syk_largeq_exact_rate(j) * t).cosh() / n
}

/// `(1/N)[cosh(4 sqrt(r) J t) - 1] + 2(q-1)(e-1)/N^2 (e^{u} - 1) u e^{u}`
/// with `r = (q-1)/q` and `u = r (4 J t)^2`.
pub fn sqrtlogn_bound(n: f64, q: usize, j: f64, t: f64) -> f64 {
    let r = (q as f64 - 1.0) / q as f64;
    let u = r * (4.0 * j * t).powi(2);
    // cosh(x) - 1 = 2 sinh(x/2)^2 keeps precision near t = 0.
    let first = 2.0 * (2.0 * r.sqrt() * j * t).sinh().powi(2) / n;
    let second = 2.0 * (q as f64 - 1.0) * (E - 1.0) / (n * n) * u.exp_m1() * u * u.exp();
    first + second
}
