use crate::scalar::Real;

/// A bound or measured quantity sampled on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve<T> {
    pub times: Vec<T>,
    pub values: Vec<T>,
    pub label: String,
    /// Set when some contribution was cut off, so `values` are partial sums.
    pub truncated: bool,
    /// Free-form provenance: truncation order, sample count, and so on.
    pub meta: Vec<(String, String)>,
}

impl<T: Real> BoundCurve<T> {
    pub fn new(label: impl Into<String>, times: Vec<T>, values: Vec<T>) -> Self {
        assert_eq!(times.len(), values.len(), "one value per time");
        Self { times, values, label: label.into(), truncated: false, meta: Vec::new() }
    }

    pub fn from_fn(label: impl Into<String>, times: &[T], f: impl FnMut(T) -> T) -> Self {
        Self::new(label, times.to_vec(), times.iter().copied().map(f).collect())
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// `steps + 1` evenly spaced times on `[0, tmax]`.
pub fn time_grid<T: Real>(tmax: T, steps: usize) -> Vec<T> {
    if steps == 0 {
        return vec![T::zero()];
    }
    (0..=steps)
        .map(|k| tmax * T::from_usize_exact(k) / T::from_usize_exact(steps))
        .collect()
}
