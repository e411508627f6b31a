//! Small dense symmetric-matrix routines generic over [`Real`].

use crate::scalar::Real;

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = self.data[i * self.n + j] + v;
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest absolute row sum (the induced infinity norm).
    pub fn row_sum_norm(&self) -> T {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<T>())
            .fold(T::zero(), |m, x| m.max(x))
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// `vectors.get(i, k)` is component `i` of eigenvector `k`.
    pub vectors: SquareMatrix<T>,
}

impl<T: Real> SymEigen<T> {
    pub fn max_value(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    /// `f(M)_{ij}` for the decomposed matrix `M`.
    pub fn apply_entry(&self, i: usize, j: usize, f: impl Fn(T) -> T) -> T {
        (0..self.values.len())
            .map(|k| self.vectors.get(i, k) * self.vectors.get(j, k) * f(self.values[k]))
            .sum()
    }
}

/// Cyclic Jacobi rotations. Accurate to working precision for the small
/// matrices that appear here (a few dozen rows).
pub fn sym_eigen<T: Real>(m: &SquareMatrix<T>) -> SymEigen<T> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = SquareMatrix::identity(n);
    let eps = T::epsilon();
    let frob: T = a.data.iter().map(|&x| x * x).sum::<T>();

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j) * a.get(i, j))
            .sum();
        if off <= eps * eps * frob || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, T::zero());
                a.set(q, p, T::zero());
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.get(x, x).partial_cmp(&a.get(y, y)).expect("finite eigenvalue"));
    let values = order.iter().map(|&k| a.get(k, k)).collect();
    let mut vectors = SquareMatrix::zeros(n);
    for (new_k, &old_k) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, new_k, v.get(i, old_k));
        }
    }
    SymEigen { values, vectors }
}

/// `exp(s * M)` for an entrywise non-negative `M` and `s >= 0`.
///
/// Taylor series after scaling, then repeated squaring. Every intermediate
/// is a sum of non-negative terms, so each entry keeps its relative accuracy
/// even when it is many orders of magnitude below the matrix norm.
pub fn expm_nonnegative<T: Real>(m: &SquareMatrix<T>, s: T) -> SquareMatrix<T> {
    let n = m.dim();
    debug_assert!(s >= T::zero());
    let norm = m.row_sum_norm() * s;
    let mut squarings = 0usize;
    let mut scaled = s;
    let half = T::lit(0.5);
    let mut cur = norm;
    while cur > half {
        cur = cur * half;
        scaled = scaled * half;
        squarings += 1;
    }
    let a = m.scale(scaled);
    let mut result = SquareMatrix::identity(n);
    let mut term = SquareMatrix::identity(n);
    for k in 1..200 {
        term = term.matmul(&a).scale(T::one() / T::from_usize_exact(k));
        let mut small = true;
        for idx in 0..n * n {
            let t = term.data[idx];
            result.data[idx] = result.data[idx] + t;
            if t > result.data[idx] * T::epsilon() {
                small = false;
            }
        }
        if small {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}
