//! Scrambling times from exact curves or from bounds on `E[C^2]`.

use serde::{Deserialize, Serialize};

use crate::curve::BoundCurve;
use crate::ensemble::EnsembleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrambleMode {
    ExactCurve,
    BoundCrossing,
}

fn check_delta(delta: f64) -> Result<(), EnsembleError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(EnsembleError::InvalidParams(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(())
}

/// First grid time at which every pair has reached `delta` at some earlier
/// time: per-pair running maxima, then the minimum over pairs. All curves
/// must share one ascending time grid.
pub fn scrambling_time_exact(curves: &[BoundCurve<f64>], delta: f64) -> Result<f64, EnsembleError> {
    check_delta(delta)?;
    let first = curves.first().ok_or_else(|| EnsembleError::InvalidParams("no curves".into()))?;
    if curves.iter().any(|c| c.times != first.times) {
        return Err(EnsembleError::InvalidParams("curves on different time grids".into()));
    }
    if first.times.windows(2).any(|w| w[1] < w[0]) {
        return Err(EnsembleError::InvalidParams("time grid not ascending".into()));
    }
    let mut running = vec![f64::NEG_INFINITY; curves.len()];
    for (k, &t) in first.times.iter().enumerate() {
        for (r, c) in running.iter_mut().zip(curves) {
            *r = r.max(c.values[k]);
        }
        if running.iter().all(|&r| r >= delta) {
            return Ok(t);
        }
    }
    Err(EnsembleError::NeverReached { from: first.times[0], to: *first.times.last().unwrap() })
}

/// First `t` in `[0, t_max]` with `bound(t) >= delta^2`, found on a scan of
/// `scan` points and refined by bisection to `1e-8`. By Markov's inequality
/// `P[C^2 >= delta^2] <= E[C^2] / delta^2`, so this lower-bounds the
/// scrambling time when `bound` dominates `E[C^2]`.
pub fn scrambling_time_bound(bound: impl Fn(f64) -> f64, delta: f64, t_max: f64, scan: usize) -> Result<f64, EnsembleError> {
    check_delta(delta)?;
    if !(t_max > 0.0) || scan < 2 {
        return Err(EnsembleError::InvalidParams(format!("t_max = {t_max}, scan = {scan}")));
    }
    let target = delta * delta;
    if bound(0.0) >= target {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..scan {
        let t = t_max * k as f64 / (scan - 1) as f64;
        if bound(t) >= target {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let mut hi = hi.ok_or(EnsembleError::NeverReached { from: 0.0, to: t_max })?;
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
