//! Monte-Carlo estimate of `E[C_ij(t)^2]` over an ensemble.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::BoundCurve;
use crate::ensemble::spec::{sample_hamiltonian, EnsembleSpec};
use crate::ensemble::EnsembleError;
use crate::graph::NodeId;
use crate::sim::{c_ij_exact, Method, OperatorVector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCResult {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `sqrt(n)`.
    pub stderr: Vec<f64>,
    pub n_samples: usize,
}

impl MCResult {
    /// `mean + k * stderr` at each time.
    pub fn upper(&self, k: f64) -> Vec<f64> {
        self.mean.iter().zip(&self.stderr).map(|(m, s)| m + k * s).collect()
    }

    pub fn to_curve(&self) -> BoundCurve<f64> {
        BoundCurve::new("mc_c2", self.times.clone(), self.mean.clone()).with_meta("samples", self.n_samples)
    }
}

/// Sum in a fixed binary-tree order, so the result does not depend on how
/// the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean of `C_ij(t)^2` with `a` as the initial operator on site `i`.
/// Sample `k` uses substream `k` of the spec's seed, and samples are
/// reduced in index order, so results do not depend on the thread count.
pub fn mc_expect_c2(
    spec: &EnsembleSpec,
    i: NodeId,
    j: NodeId,
    a: &OperatorVector,
    times: &[f64],
    n_samples: usize,
    method: Method,
) -> Result<MCResult, EnsembleError> {
    if n_samples == 0 {
        return Err(EnsembleError::InvalidParams("no samples".into()));
    }
    let per_sample: Vec<Vec<f64>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let h = sample_hamiltonian(spec, k)?;
            let c = c_ij_exact(&h, i, j, a, times, method)?;
            Ok(c.values.iter().map(|v| v * v).collect())
        })
        .collect::<Result<_, EnsembleError>>()?;
    let n = n_samples as f64;
    let mut mean = Vec::with_capacity(times.len());
    let mut stderr = Vec::with_capacity(times.len());
    let mut column = vec![0.0; n_samples];
    for k in 0..times.len() {
        for (c, s) in column.iter_mut().zip(&per_sample) {
            *c = s[k];
        }
        let m = pairwise_sum(&column) / n;
        let se = if n_samples > 1 {
            let dev: Vec<f64> = column.iter().map(|x| (x - m).powi(2)).collect();
            (pairwise_sum(&dev) / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        stderr.push(se);
    }
    Ok(MCResult { times: times.to_vec(), mean, stderr, n_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::spec::{default_initial, CouplingLaw};
    use crate::graph::{FactorGraph, Factor};
    use crate::sim::BasisKind;

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|k| (k as f64).sin()).collect();
        assert!((pairwise_sum(&xs) - xs.iter().sum::<f64>()).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn zero_time_and_deterministic() {
        let g = FactorGraph::new(2, vec![Factor::new(vec![0, 1], 0)]).unwrap();
        let spec = EnsembleSpec::pauli_factors(&g, &["ZZ".into()], &[0.7], CouplingLaw::Rademacher, 3).unwrap();
        let a = default_initial(BasisKind::Pauli, 2, 0).unwrap();
        let times = [0.0, 0.3, 0.9];
        let r = mc_expect_c2(&spec, 0, 1, &a, &times, 64, Method::Dense).unwrap();
        assert_eq!(r.mean[0], 0.0);
        assert_eq!(r.stderr[0], 0.0);
        // C^2 = sin^2(2 J t) is even in J, so the sign flips do not matter.
        for k in 1..3 {
            let want = (2.0 * 0.7 * times[k]).sin().powi(2);
            assert!((r.mean[k] - want).abs() < 1e-12);
            assert!(r.stderr[k] < 1e-12);
        }
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let spec = EnsembleSpec::syk(8, 4, 1.0, CouplingLaw::Gaussian, 11).unwrap();
        let a = default_initial(BasisKind::Majorana, 8, 0).unwrap();
        let times = [0.5, 1.0];
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let r1 = one.install(|| mc_expect_c2(&spec, 0, 3, &a, &times, 12, Method::Dense).unwrap());
        let r4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| mc_expect_c2(&spec, 0, 3, &a, &times, 12, Method::Dense).unwrap());
        assert_eq!(r1, r4);
        assert!(r1.mean.iter().all(|m| (0.0..=1.0).contains(m)));
    }
}
