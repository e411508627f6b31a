//! Numerical check that the resummed series over insertions equals the
//! time-ordered integral over the simplex.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Highest total power `sum m_k` kept in the series.
pub const SERIES_ORDER: usize = 40;
const MAX_DEPTH: u32 = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct SkReport {
    pub max_diff: f64,
    /// Quadrature estimate of the simplex volume minus `t^l / l!`.
    pub volume_error: f64,
    pub passed: bool,
}

// Kronrod abscissae on [-1, 1], largest first, and weights; the Gauss rule
// uses the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &dyn Fn(f64) -> DMatrix<f64>, a: f64, b: f64) -> (DMatrix<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = &fc * WGK[7];
    let mut gauss = &fc * WG[3];
    for k in 0..7 {
        let pair = f(c - h * XGK[k]) + f(c + h * XGK[k]);
        kron += &pair * WGK[k];
        if k % 2 == 1 {
            gauss += &pair * WG[k / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    let err = (&kron - gauss).amax();
    (kron, err)
}

/// Adaptive Gauss-Kronrod integral of a matrix-valued function. Each cell
/// is accepted once its error estimate is below `tol / 10` scaled by its
/// share of `[a, b]`.
pub fn integrate_matrix(f: &dyn Fn(f64) -> DMatrix<f64>, a: f64, b: f64, tol: f64) -> DMatrix<f64> {
    fn rec(f: &dyn Fn(f64) -> DMatrix<f64>, a: f64, b: f64, cell_tol: f64, depth: u32) -> DMatrix<f64> {
        let (val, err) = gk15(f, a, b);
        if err <= cell_tol || depth >= MAX_DEPTH {
            return val;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * cell_tol, depth + 1) + rec(f, m, b, 0.5 * cell_tol, depth + 1)
    }
    if b == a {
        let d = f(a);
        return DMatrix::zeros(d.nrows(), d.ncols());
    }
    rec(f, a, b, tol / 10.0, 0)
}

/// `sum_{m_0..m_l} t^(l+M)/(l+M)! F_l^{m_l} A_l ... A_1 F_0^{m_0}` with
/// `M = sum m_k <= SERIES_ORDER`.
pub fn series(fs: &[DMatrix<f64>], as_: &[DMatrix<f64>], t: f64) -> DMatrix<f64> {
    let l = as_.len();
    assert_eq!(fs.len(), l + 1);
    let d = fs[0].nrows();
    // p[m] = sum over m_0..m_k with total m of F_k^{m_k} A_k ... F_0^{m_0}.
    let mut p: Vec<DMatrix<f64>> = Vec::with_capacity(SERIES_ORDER + 1);
    let mut pow = DMatrix::identity(d, d);
    for _ in 0..=SERIES_ORDER {
        p.push(pow.clone());
        pow = &fs[0] * pow;
    }
    for k in 1..=l {
        let mut powers = vec![DMatrix::identity(d, d)];
        for a in 1..=SERIES_ORDER {
            powers.push(&fs[k] * &powers[a - 1]);
        }
        let ap: Vec<DMatrix<f64>> = p.iter().map(|m| &as_[k - 1] * m).collect();
        p = (0..=SERIES_ORDER)
            .map(|m| {
                let mut acc = DMatrix::zeros(d, d);
                for a in 0..=m {
                    acc += &powers[a] * &ap[m - a];
                }
                acc
            })
            .collect();
    }
    let mut out = DMatrix::zeros(d, d);
    let mut coef = 1.0;
    for n in 1..=l {
        coef *= t / n as f64;
    }
    for (m, pm) in p.iter().enumerate() {
        out += pm * coef;
        coef *= t / (l + m + 1) as f64;
    }
    out
}

/// The simplex integral, evaluated as nested one-dimensional integrals
/// `J_k(s) = int_0^s e^{F_k (s-u)} A_k J_{k-1}(u) du`, `J_0(s) = e^{F_0 s}`.
pub fn simplex_integral(fs: &[DMatrix<f64>], as_: &[DMatrix<f64>], t: f64, tol: f64) -> DMatrix<f64> {
    fn j(fs: &[DMatrix<f64>], as_: &[DMatrix<f64>], k: usize, s: f64, tol: f64) -> DMatrix<f64> {
        if k == 0 {
            return (&fs[0] * s).exp();
        }
        let f = |u: f64| (&fs[k] * (s - u)).exp() * &as_[k - 1] * j(fs, as_, k - 1, u, tol);
        integrate_matrix(&f, 0.0, s, tol)
    }
    j(fs, as_, as_.len(), t, tol)
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..=1.0))
}

/// Draws `F_0..F_l`, `A_1..A_l` with entries uniform in `[-1, 1]` and
/// compares the series against the simplex integral.
pub fn schwinger_karplus_check(l: usize, dim: usize, t: f64, seed: u64, tol: f64) -> SkReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<_> = (0..=l).map(|_| random_matrix(&mut rng, dim)).collect();
    let as_: Vec<_> = (0..l).map(|_| random_matrix(&mut rng, dim)).collect();
    check_matrices(&fs, &as_, t, tol)
}

pub fn check_matrices(fs: &[DMatrix<f64>], as_: &[DMatrix<f64>], t: f64, tol: f64) -> SkReport {
    let l = as_.len();
    let lhs = series(fs, as_, t);
    let rhs = simplex_integral(fs, as_, t, tol);
    let max_diff = (lhs - rhs).amax();
    let zero: Vec<_> = (0..=l).map(|_| DMatrix::zeros(1, 1)).collect();
    let one: Vec<_> = (0..l).map(|_| DMatrix::identity(1, 1)).collect();
    let vol = simplex_integral(&zero, &one, t, tol)[(0, 0)];
    let exact = (1..=l).fold(1.0, |acc, n| acc * t / n as f64);
    let volume_error = vol - exact;
    SkReport { max_diff, volume_error, passed: max_diff <= tol && volume_error.abs() <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn base_case_is_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_matrix(&mut rng, 3);
        let s = series(&[f.clone()], &[], 0.8);
        assert!((s - (&f * 0.8).exp()).amax() < 1e-12);
        assert!(schwinger_karplus_check(0, 3, 0.8, 3, 1e-10).passed);
    }

    #[test]
    fn zero_insertion_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fs = vec![random_matrix(&mut rng, 3), random_matrix(&mut rng, 3)];
        let as_ = vec![DMatrix::zeros(3, 3)];
        assert!(series(&fs, &as_, 0.5).amax() == 0.0);
        assert!(simplex_integral(&fs, &as_, 0.5, 1e-8).amax() == 0.0);
    }

    #[test]
    fn commuting_scalars() {
        // 1x1: int_0^t e^{b(t-u)} e^{a u} du = (e^{bt} - e^{at}) / (b - a).
        let (a, b, t): (f64, f64, f64) = (0.3, -0.7, 0.9);
        let fs = vec![DMatrix::from_element(1, 1, a), DMatrix::from_element(1, 1, b)];
        let as_ = vec![DMatrix::identity(1, 1)];
        let want = ((b * t).exp() - (a * t).exp()) / (b - a);
        assert_relative_eq!(series(&fs, &as_, t)[(0, 0)], want, epsilon = 1e-13);
        assert_relative_eq!(simplex_integral(&fs, &as_, t, 1e-10)[(0, 0)], want, epsilon = 1e-11);
    }

    #[test]
    fn two_insertions_dim_four() {
        let rep = schwinger_karplus_check(2, 4, 0.7, 11, 1e-6);
        assert!(rep.passed, "{rep:?}");
        assert!(rep.volume_error.abs() < 1e-12);
    }

    #[test]
    fn one_insertion_various_seeds() {
        for seed in 0..4 {
            let rep = schwinger_karplus_check(1, 6, 1.0, seed, 1e-7);
            assert!(rep.passed, "seed {seed}: {rep:?}");
        }
    }
}
