use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real scalar used by the bound evaluators.
pub trait Real: Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `ln(n!)` summed directly; exact enough for the factorial weights used here.
pub fn ln_factorial<T: Real>(n: usize) -> T {
    (2..=n).map(|k| T::from_usize_exact(k).ln()).sum()
}

/// `x^n / n!` without intermediate overflow.
pub fn pow_over_factorial<T: Real>(x: T, n: usize) -> T {
    let mut acc = T::one();
    for k in 1..=n {
        acc = acc * x / T::from_usize_exact(k);
    }
    acc
}
