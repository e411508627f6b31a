//! Bounds driven by the interaction matrix `h` and its degree-shifted form.

use crate::bounds::BoundError;
use crate::graph::{NodeId, WeightedFactorGraph};
use crate::linalg::{expm_nonnegative, sym_eigen, SquareMatrix, SymEigen};
use crate::scalar::Real;

/// `h_ij = sum of ||H_X|| over factors containing both i and j` (zero on the
/// diagonal) and `h~`, equal to `h` with the row sums on its diagonal.
#[derive(Clone, Debug)]
pub struct HMatrices<T> {
    pub h: SquareMatrix<T>,
    pub h_tilde: SquareMatrix<T>,
    pub h_eigen: SymEigen<T>,
    pub h_tilde_eigen: SymEigen<T>,
}

impl<T: Real> HMatrices<T> {
    pub fn new(wg: &WeightedFactorGraph<T>) -> Self {
        let g = wg.graph();
        let n = g.num_nodes();
        let mut h = SquareMatrix::zeros(n);
        for (fid, f) in g.factors().iter().enumerate() {
            let w = wg.weight(fid);
            for &a in &f.nodes {
                for &b in &f.nodes {
                    if a != b {
                        h.add_at(a, b, w);
                    }
                }
            }
        }
        let mut h_tilde = h.clone();
        for i in 0..n {
            let s: T = h.row(i).iter().copied().sum();
            h_tilde.set(i, i, s);
        }
        let h_eigen = sym_eigen(&h);
        let h_tilde_eigen = sym_eigen(&h_tilde);
        Self { h, h_tilde, h_eigen, h_tilde_eigen }
    }

    pub fn h_max(&self) -> T {
        self.h_eigen.max_value()
    }

    pub fn h_tilde_max(&self) -> T {
        self.h_tilde_eigen.max_value()
    }
}

/// How the entries of `exp(2|t| h)` are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExpMethod {
    /// Scaled Taylor series on the non-negative matrix; keeps relative
    /// accuracy in entries far below the norm.
    #[default]
    NonNegativeSeries,
    /// Spectral sum over the stored eigenvectors.
    Eigen,
}

/// `exp(2|t| h)_{ij}`.
pub fn corollary6_bound<T: Real>(hm: &HMatrices<T>, i: NodeId, j: NodeId, t: T) -> T {
    corollary6_bound_with(hm, i, j, t, ExpMethod::NonNegativeSeries)
}

pub fn corollary6_bound_with<T: Real>(hm: &HMatrices<T>, i: NodeId, j: NodeId, t: T, method: ExpMethod) -> T {
    let s = T::lit(2.0) * t.abs();
    match method {
        ExpMethod::NonNegativeSeries => expm_nonnegative(&hm.h, s).get(i, j),
        ExpMethod::Eigen => hm.h_eigen.apply_entry(i, j, |x| (s * x).exp()),
    }
}

/// The whole matrix `exp(2|t| h)`; convenient when many pairs are needed.
pub fn corollary6_matrix<T: Real>(hm: &HMatrices<T>, t: T) -> SquareMatrix<T> {
    expm_nonnegative(&hm.h, T::lit(2.0) * t.abs())
}

/// Choice of the free parameter `alpha > 1` in the exponential-decay bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha<T> {
    Fixed(T),
    /// Minimise over `alpha` at each time.
    Optimize,
}

pub const ALPHA_RANGE: (f64, f64) = (1.0 + 1e-6, 1e3);

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}

/// `(exp(2 alpha h~_max |t|) - 1) alpha^{-d}` for reduced distance `d`.
pub fn lr_bound_at<T: Real>(h_tilde_max: T, d: usize, t: T, alpha: T) -> T {
    let x = T::lit(2.0) * alpha * h_tilde_max * t.abs();
    x.exp_m1() * (-(T::from_usize_exact(d)) * alpha.ln()).exp()
}

/// Exponential-decay bound; with [`Alpha::Optimize`] the minimum over
/// `alpha` found by golden-section search on `ln alpha`.
pub fn lr_bound<T: Real>(hm: &HMatrices<T>, d: usize, t: T, alpha: Alpha<T>) -> Result<(T, T), BoundError> {
    let hmax = hm.h_tilde_max();
    match alpha {
        Alpha::Fixed(a) => {
            if !(a > T::one()) {
                return Err(BoundError::InvalidParams(format!("alpha must exceed 1, got {a}")));
            }
            Ok((lr_bound_at(hmax, d, t, a), a))
        }
        Alpha::Optimize => {
            let lo = T::lit(ALPHA_RANGE.0).ln();
            let hi = T::lit(ALPHA_RANGE.1).ln();
            let tol = T::lit(1e-10).max(T::epsilon().sqrt());
            // Work with the logarithm so the search does not see overflow.
            let log_f = |la: T| {
                let a = la.exp();
                let x = T::lit(2.0) * a * hmax * t.abs();
                let lead = if x > T::lit(30.0) { x } else { x.exp_m1().ln() };
                lead - T::from_usize_exact(d) * la
            };
            let (la, _) = golden_section_min(log_f, lo, hi, tol);
            let best = [lo, la, hi]
                .into_iter()
                .map(|l| (lr_bound_at(hmax, d, t, l.exp()), l.exp()))
                .fold(None, |acc: Option<(T, T)>, x| match acc {
                    Some(a) if a.0 <= x.0 => Some(a),
                    _ => Some(x),
                })
                .expect("three candidates");
            Ok(best)
        }
    }
}

/// `(2e h~_max, 2e h_max)`: the velocity from the exponential-decay bound
/// and the one from the matrix-exponential bound.
pub fn velocities<T: Real>(hm: &HMatrices<T>) -> (T, T) {
    let two_e = T::lit(2.0 * std::f64::consts::E);
    (two_e * hm.h_tilde_max(), two_e * hm.h_max())
}

/// Bound on the pair average `(1/N^2) sum_{ij}` of the matrix-exponential
/// bound for a regular graph: `exp(2a|t|)/N`.
///
/// Requires every `||H_X|| <= N a / (q (q-1) |F|)`, which keeps every row
/// sum of `h` at or below `a`.
pub fn tfm_sum_bound<T: Real>(wg: &WeightedFactorGraph<T>, a: T, t: T) -> Result<T, BoundError> {
    let g = wg.graph();
    let r = g.regularity();
    if !r.is_regular || r.q < 2 {
        return Err(BoundError::NotRegular);
    }
    let n = T::from_usize_exact(g.num_nodes());
    let cap = n * a / T::from_usize_exact(r.q * (r.q - 1) * g.num_factors());
    let slack = T::one() + T::lit(64.0) * T::epsilon();
    if let Some(&w) = wg.weights().iter().find(|&&w| w > cap * slack) {
        return Err(BoundError::WeightTooLarge { weight: w.to_f64_lossy(), cap: cap.to_f64_lossy() });
    }
    Ok((T::lit(2.0) * a * t.abs()).exp() / n)
}

/// Direction of a conversion between the two correlator definitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prop1Direction {
    /// From the commutator-norm correlator to the projector one.
    HatToPlain,
    /// From the projector correlator to the commutator-norm one.
    PlainToHat,
}

/// Closed interval returned by [`prop1_convert`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn contains(&self, x: T, slack: T) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

/// Range of one correlator given the other, for local dimension `d`,
/// clipped to `[0, 1]`.
pub fn prop1_convert<T: Real>(value: T, d: usize, direction: Prop1Direction) -> Result<Interval<T>, BoundError> {
    if d < 2 {
        return Err(BoundError::BadDimension(d));
    }
    let d2 = T::from_usize_exact(d * d);
    let lower = (d2 - T::one()).sqrt();
    let upper = (T::lit(2.0) * (T::one() - T::one() / d2)).sqrt();
    let clip = |x: T| x.max(T::zero()).min(T::one());
    let (lo, hi) = match direction {
        Prop1Direction::HatToPlain => (value / lower, value * upper),
        Prop1Direction::PlainToHat => (value / upper, value * lower),
    };
    Ok(Interval { lo: clip(lo), hi: clip(hi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{standard_graph, Factor, FactorGraph, GraphKind};
    use proptest::prelude::*;

    #[test]
    fn two_node_graph_gives_sinh() {
        let h = 0.6f64;
        let wg = WeightedFactorGraph::uniform(standard_graph(&GraphKind::Chain { n: 2 }).unwrap(), h);
        let hm = HMatrices::new(&wg);
        for &t in &[0.0, 0.1, 0.7, 2.0] {
            let want = (2.0 * h * t).sinh();
            assert!((corollary6_bound(&hm, 0, 1, t) - want).abs() <= 1e-14 * want.max(1.0));
            assert!((corollary6_bound_with(&hm, 0, 1, t, ExpMethod::Eigen) - want).abs() <= 1e-13 * want.max(1.0));
        }
    }

    #[test]
    fn star_leaf_to_leaf() {
        let (n, h) = (6usize, 0.4);
        let wg = WeightedFactorGraph::uniform(standard_graph(&GraphKind::Star { n }).unwrap(), h);
        let hm = HMatrices::new(&wg);
        let m = (n - 1) as f64;
        for &t in &[0.05, 0.5, 1.5] {
            let want = ((2.0 * h * t * m.sqrt()).cosh() - 1.0) / m;
            let got = corollary6_bound(&hm, 0, 1, t);
            assert!((got / want - 1.0).abs() < 1e-12, "{got} {want}");
        }
    }

    #[test]
    fn h_tilde_diagonal_is_row_sum() {
        let fs = vec![Factor::new(vec![0, 1, 2], 0), Factor::new(vec![1, 2], 1)];
        let wg = WeightedFactorGraph::new(FactorGraph::new(3, fs).unwrap(), vec![2.0, 0.5]).unwrap();
        let hm = HMatrices::new(&wg);
        assert_eq!(hm.h.get(1, 2), 2.5);
        assert_eq!(hm.h.get(0, 1), 2.0);
        assert_eq!(hm.h_tilde.get(1, 1), 4.5);
        assert_eq!(hm.h.get(1, 1), 0.0);
    }

    #[test]
    fn lr_optimum_not_worse_than_fixed() {
        let wg = WeightedFactorGraph::uniform(standard_graph(&GraphKind::Chain { n: 9 }).unwrap(), 1.0);
        let hm = HMatrices::new(&wg);
        for &t in &[0.1, 0.5, 1.0, 3.0] {
            let (fixed, _) = lr_bound(&hm, 4, t, Alpha::Fixed(std::f64::consts::E)).unwrap();
            let (opt, a) = lr_bound(&hm, 4, t, Alpha::Optimize).unwrap();
            assert!(opt <= fixed * (1.0 + 1e-12));
            assert!(a >= ALPHA_RANGE.0 && a <= ALPHA_RANGE.1);
        }
        assert!(lr_bound(&hm, 4, 1.0, Alpha::Fixed(1.0)).is_err());
    }

    #[test]
    fn golden_section_finds_e() {
        let (x, fx) = golden_section_min(|a: f64| a / a.ln(), 1.5, 10.0, 1e-10);
        assert!((x - std::f64::consts::E).abs() < 1e-6);
        assert!((fx - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn tfm_requires_regular_graph() {
        let wg = WeightedFactorGraph::uniform(standard_graph(&GraphKind::Chain { n: 4 }).unwrap(), 0.1);
        assert_eq!(tfm_sum_bound(&wg, 1.0, 0.5), Err(BoundError::NotRegular));
        let k = standard_graph(&GraphKind::Complete { n: 5, q: 2, m: 1 }).unwrap();
        let wg = WeightedFactorGraph::uniform(k, 1.0);
        assert!(matches!(tfm_sum_bound(&wg, 1.0, 0.5), Err(BoundError::WeightTooLarge { .. })));
    }

    #[test]
    fn tfm_bounds_pair_average_on_complete_graph() {
        let (n, a) = (6usize, 1.3);
        let g = standard_graph(&GraphKind::Complete { n, q: 2, m: 1 }).unwrap();
        let w = n as f64 * a / (2.0 * g.num_factors() as f64);
        let wg = WeightedFactorGraph::uniform(g, w);
        let hm = HMatrices::new(&wg);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let m = corollary6_matrix(&hm, t);
            let avg: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m.get(i, j)).sum::<f64>()
                / (n * n) as f64;
            let b = tfm_sum_bound(&wg, a, t).unwrap();
            assert!(avg <= b * (1.0 + 1e-12), "t={t}: {avg} > {b}");
        }
    }

    #[test]
    fn prop1_intervals() {
        let iv = prop1_convert(0.3, 2, Prop1Direction::HatToPlain).unwrap();
        assert!((iv.lo - 0.3 / 3f64.sqrt()).abs() < 1e-15);
        assert!((iv.hi - 0.3 * 1.5f64.sqrt()).abs() < 1e-15);
        let iv = prop1_convert(0.9, 2, Prop1Direction::PlainToHat).unwrap();
        assert_eq!(iv.hi, 1.0);
        assert_eq!(prop1_convert(0.5, 1, Prop1Direction::HatToPlain), Err(BoundError::BadDimension(1)));
    }

    fn arb_weighted() -> impl Strategy<Value = WeightedFactorGraph<f64>> {
        (2usize..7).prop_flat_map(|n| {
            prop::collection::btree_set(prop::collection::btree_set(0..n, 2..=3), 1..8).prop_flat_map(move |sets| {
                let fs: Vec<Factor> = sets.into_iter().map(|s| Factor::new(s.into_iter().collect(), 0)).collect();
                let nf = fs.len();
                prop::collection::vec(0.05f64..2.0, nf).prop_map(move |w| {
                    WeightedFactorGraph::new(FactorGraph::new(n, fs.clone()).unwrap(), w).unwrap()
                })
            })
        })
    }

    proptest! {
        #[test]
        fn h_tilde_dominates_twice_h(wg in arb_weighted()) {
            let hm = HMatrices::new(&wg);
            prop_assert!(hm.h_tilde_max() >= 2.0 * hm.h_max() - 1e-12 * hm.h_tilde_max().max(1.0));
            prop_assert!(hm.h.is_symmetric() && hm.h_tilde.is_symmetric());
        }

        #[test]
        fn matrix_exponential_routes_agree(wg in arb_weighted(), t in 0.0f64..1.5) {
            let hm = HMatrices::new(&wg);
            let n = wg.graph().num_nodes();
            for i in 0..n {
                for j in 0..n {
                    let a = corollary6_bound(&hm, i, j, t);
                    let b = corollary6_bound_with(&hm, i, j, t, ExpMethod::Eigen);
                    let scale = corollary6_bound(&hm, i, i, t).max(corollary6_bound(&hm, j, j, t));
                    prop_assert!((a - b).abs() <= 1e-11 * scale, "{} {}", a, b);
                }
            }
        }

        #[test]
        fn bounds_ordered(wg in arb_weighted(), t in 0.0f64..2.0) {
            use crate::bounds::paths::theorem3_bound;
            let hm = HMatrices::new(&wg);
            let g = wg.graph();
            let n = g.num_nodes();
            for j in 1..n {
                let Ok(d) = g.node_distance(0, j) else { continue };
                let p = theorem3_bound(&wg, 0, j, t).unwrap();
                let c = corollary6_bound(&hm, 0, j, t);
                let (lr, _) = lr_bound(&hm, d, t, Alpha::Fixed(std::f64::consts::E)).unwrap();
                prop_assert!(p <= c * (1.0 + 1e-12) + 1e-300, "thm3 {} > cor6 {}", p, c);
                prop_assert!(c <= lr * (1.0 + 1e-12), "cor6 {} > lr {}", c, lr);
            }
        }

        #[test]
        fn monotone_in_time(wg in arb_weighted(), t in 0.0f64..1.0, dt in 0.0f64..1.0) {
            let hm = HMatrices::new(&wg);
            let n = wg.graph().num_nodes();
            let a = corollary6_matrix(&hm, t);
            let b = corollary6_matrix(&hm, t + dt);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(b.get(i, j) >= a.get(i, j));
                }
            }
        }

        #[test]
        fn sandwich_is_consistent(c in 0.0f64..1.0, d in 2usize..6) {
            let up = prop1_convert(c, d, Prop1Direction::HatToPlain).unwrap();
            prop_assert!(up.lo <= up.hi);
            let down = prop1_convert(c, d, Prop1Direction::PlainToHat).unwrap();
            prop_assert!(down.lo <= down.hi);
        }
    }
}
