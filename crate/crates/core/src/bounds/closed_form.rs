//! Closed-form bound curves for chains and complete graphs.

use crate::scalar::{pow_over_factorial, Real};

/// Modified Bessel function `I_n(x)` by its power series, summed until the
/// next term is below `1e-12` of the running total (or machine precision for
/// narrower types).
pub fn bessel_i<T: Real>(n: usize, x: T) -> T {
    let half = x / T::lit(2.0);
    let mut term = pow_over_factorial(half, n);
    if term == T::zero() {
        return T::zero();
    }
    let q = half * half;
    let rel = T::lit(1e-12).max(T::epsilon());
    let mut sum = term;
    for k in 1..10_000usize {
        term = term * q / (T::from_usize_exact(k) * T::from_usize_exact(k + n));
        sum = sum + term;
        if term <= rel * sum && T::from_usize_exact(k) > half {
            break;
        }
    }
    sum
}

/// Families with a closed-form expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedForm<T> {
    /// `(2 h t)^D / D!`: the single path on a chain.
    ChainThm3 { h: T, delta: usize },
    /// `I_D(4 h t)`: the matrix exponential on an infinite chain.
    ChainBessel { h: T, delta: usize },
    /// `(exp(8 h alpha t) - 1) alpha^{-D}`: the exponential-decay bound on a chain.
    ChainLr { h: T, delta: usize, alpha: T },
    /// `((1 + 2 a t/(N-1))^{N-1} - 1)/(N-1)`: the path sum on `K_N` with pair weight `a/(N-1)`.
    CompleteTfm { a: T, n: usize },
}

impl<T: Real> ClosedForm<T> {
    pub fn eval(&self, t: T) -> T {
        let t = t.abs();
        match *self {
            ClosedForm::ChainThm3 { h, delta } => pow_over_factorial(T::lit(2.0) * h * t, delta),
            ClosedForm::ChainBessel { h, delta } => bessel_i(delta, T::lit(4.0) * h * t),
            ClosedForm::ChainLr { h, delta, alpha } => {
                (T::lit(8.0) * h * alpha * t).exp_m1() * (-(T::from_usize_exact(delta)) * alpha.ln()).exp()
            }
            ClosedForm::CompleteTfm { a, n } => {
                let m = T::from_usize_exact(n - 1);
                ((T::one() + T::lit(2.0) * a * t / m).powf(m) - T::one()) / m
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClosedForm::ChainThm3 { .. } => "chain_thm3",
            ClosedForm::ChainBessel { .. } => "chain_bessel",
            ClosedForm::ChainLr { .. } => "chain_lr",
            ClosedForm::CompleteTfm { .. } => "complete_tfm",
        }
    }
}
