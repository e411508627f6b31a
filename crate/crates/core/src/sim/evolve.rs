//! Heisenberg evolution `|O(t)) = e^{Lt}|O)`, i.e. `O(t) = e^{iHt} O e^{-iHt}`.
//!
//! The dense route diagonalizes `H` in Hilbert space and expands the result
//! back into strings with a Walsh-Hadamard transform per X-pattern. The
//! Krylov route runs Arnoldi on the real antisymmetric `L` directly in
//! operator space.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sim::majorana::pauli_to_majorana_table;
use crate::sim::operator::{BasisKind, Hamiltonian, Key, OperatorVector};
use crate::sim::pauli::{i_pow, PauliString};
use crate::sim::SimError;

pub const DENSE_QUBIT_LIMIT: usize = 10;
pub const DENSE_MAJORANA_LIMIT: usize = 16;
pub const KRYLOV_TERM_LIMIT: usize = 4_000_000;
pub const KRYLOV_TOL: f64 = 1e-10;
const KRYLOV_DIM: usize = 40;
const MIN_SUBSTEP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Krylov,
}

impl std::str::FromStr for Method {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "dense" => Ok(Method::Dense),
            "krylov" => Ok(Method::Krylov),
            _ => Err(SimError::InvalidParams(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evolved {
    pub time: f64,
    pub op: OperatorVector,
    /// Estimated 2-norm error: truncation or round-off plus pruned weight.
    pub error_estimate: f64,
}

/// Eigendecomposition of `H`, shared read-only across time points.
pub struct DenseEvolver {
    kind: BasisKind,
    n: usize,
    qubits: usize,
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
    to_majorana: Option<HashMap<Key, (f64, u64)>>,
}

impl DenseEvolver {
    pub fn new(h: &Hamiltonian) -> Result<Self, SimError> {
        let limit_ok = match h.kind {
            BasisKind::Pauli => h.n <= DENSE_QUBIT_LIMIT,
            BasisKind::Majorana => h.n <= DENSE_MAJORANA_LIMIT,
        };
        if !limit_ok {
            return Err(SimError::TooLarge(format!("{} sites for dense evolution", h.n)));
        }
        let hp = h.to_pauli()?;
        let dense = hp.operator().dense()?;
        let eig = dense.symmetric_eigen();
        let to_majorana = match h.kind {
            BasisKind::Majorana => Some(pauli_to_majorana_table(h.n)?),
            BasisKind::Pauli => None,
        };
        Ok(Self {
            kind: h.kind,
            n: h.n,
            qubits: hp.n,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
            to_majorana,
        })
    }

    fn check(&self, a: &OperatorVector) -> Result<(), SimError> {
        if a.kind != self.kind || a.n != self.n {
            return Err(SimError::BasisMismatch(format!(
                "operator {:?}({}) vs Hamiltonian {:?}({})",
                a.kind, a.n, self.kind, self.n
            )));
        }
        Ok(())
    }

    pub fn evolve(&self, a: &OperatorVector, t: f64) -> Result<Evolved, SimError> {
        Ok(self.evolve_times(a, &[t])?.pop().expect("one time"))
    }

    pub fn evolve_times(&self, a: &OperatorVector, times: &[f64]) -> Result<Vec<Evolved>, SimError> {
        self.check(a)?;
        let ad = a.to_pauli()?.dense()?;
        let v = &self.vectors;
        let rotated = v.adjoint() * ad * v;
        times
            .par_iter()
            .map(|&t| {
                if t == 0.0 {
                    return Ok(Evolved { time: t, op: a.clone(), error_estimate: a.dropped.sqrt() });
                }
                let d = rotated.nrows();
                let phases: Vec<Complex64> = self.energies.iter().map(|&e| Complex64::from_polar(1.0, e * t)).collect();
                let mut m = rotated.clone();
                for c in 0..d {
                    for r in 0..d {
                        m[(r, c)] *= phases[r] * phases[c].conj();
                    }
                }
                let at = v * m * v.adjoint();
                let (op, imag) = self.expand(&at)?;
                Ok(Evolved { time: t, error_estimate: imag + (op.dropped + a.dropped).sqrt(), op })
            })
            .collect()
    }

    /// String coefficients of a Hermitian matrix, and the norm of the
    /// imaginary parts that were discarded.
    fn expand(&self, m: &DMatrix<Complex64>) -> Result<(OperatorVector, f64), SimError> {
        let d = 1usize << self.qubits;
        let mut out = OperatorVector::zero(self.kind, self.n)?;
        let mut imag = 0.0;
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for x in 0..d {
            for (r, b) in buf.iter_mut().enumerate() {
                *b = m[(r, r ^ x)];
            }
            walsh_hadamard(&mut buf);
            for (z, &w) in buf.iter().enumerate() {
                let p = PauliString { x: x as u64, z: z as u64 };
                let c = i_pow((p.x & p.z).count_ones()) * w / d as f64;
                imag += c.im * c.im;
                if c.re.abs() < crate::sim::operator::PRUNE {
                    out.dropped += c.re * c.re;
                    continue;
                }
                match &self.to_majorana {
                    None => out.add(p.to_key(), c.re),
                    Some(t) => {
                        let (s, mask) = t[&p.to_key()];
                        out.add(mask as Key, s * c.re);
                    }
                }
            }
        }
        Ok((out, imag.sqrt()))
    }
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// One Krylov propagation of `v` by `dt`, retried on halves when the
/// subspace does not converge. Returns the result and its error estimate.
fn krylov_propagate(h: &Hamiltonian, v: &OperatorVector, dt: f64) -> Result<(OperatorVector, f64), SimError> {
    if dt == 0.0 || v.is_empty() {
        return Ok((v.clone(), 0.0));
    }
    match krylov_try(h, v, dt)? {
        Some(r) => Ok(r),
        None => {
            if dt.abs() < MIN_SUBSTEP {
                return Err(SimError::KrylovNotConverged { t: dt, estimate: f64::NAN });
            }
            let (mid, e1) = krylov_propagate(h, v, dt / 2.0)?;
            let (end, e2) = krylov_propagate(h, &mid, dt / 2.0)?;
            Ok((end, e1 + e2))
        }
    }
}

fn krylov_try(h: &Hamiltonian, v: &OperatorVector, dt: f64) -> Result<Option<(OperatorVector, f64)>, SimError> {
    let beta = v.norm();
    let mut basis = vec![{
        let mut q = v.clone();
        q.scale(1.0 / beta);
        q
    }];
    let mut hess = DMatrix::<f64>::zeros(KRYLOV_DIM + 1, KRYLOV_DIM);
    for k in 0..KRYLOV_DIM {
        let mut w = h.apply(&basis[k])?;
        if w.len() > KRYLOV_TERM_LIMIT {
            return Err(SimError::TooLarge(format!("{} operator-space terms", w.len())));
        }
        // Two passes of Gram-Schmidt.
        for _ in 0..2 {
            for (j, q) in basis.iter().enumerate() {
                let c = q.dot(&w)?;
                hess[(j, k)] += c;
                w.axpy(-c, q)?;
            }
        }
        let b = w.norm();
        let m = k + 1;
        let small = hess.view((0, 0), (m, m)).into_owned() * dt;
        let e = small.exp();
        let estimate = beta * b * e[(m - 1, 0)].abs();
        let invariant = b < 1e-13 * beta.max(1.0);
        if invariant || estimate < KRYLOV_TOL * beta {
            let coeffs: DVector<f64> = e.column(0).into_owned() * beta;
            let mut out = OperatorVector::zero(v.kind, v.n)?;
            for (c, q) in coeffs.iter().zip(&basis) {
                out.axpy(*c, q)?;
            }
            out.dropped += v.dropped;
            return Ok(Some((out, if invariant { 0.0 } else { estimate })));
        }
        hess[(m, k)] = b;
        w.scale(1.0 / b);
        basis.push(w);
    }
    Ok(None)
}

pub fn evolve_operator(h: &Hamiltonian, a: &OperatorVector, t: f64, method: Method) -> Result<Evolved, SimError> {
    Ok(evolve_times(h, a, &[t], method)?.pop().expect("one time"))
}

/// `A(t)` at every requested time. Krylov steps from one time to the next.
pub fn evolve_times(h: &Hamiltonian, a: &OperatorVector, times: &[f64], method: Method) -> Result<Vec<Evolved>, SimError> {
    if a.kind != h.kind || a.n != h.n {
        return Err(SimError::BasisMismatch(format!(
            "operator {:?}({}) vs Hamiltonian {:?}({})",
            a.kind, a.n, h.kind, h.n
        )));
    }
    match method {
        Method::Dense => DenseEvolver::new(h)?.evolve_times(a, times),
        Method::Krylov => {
            let mut out = Vec::with_capacity(times.len());
            let (mut cur, mut t_cur, mut err) = (a.clone(), 0.0, 0.0);
            for &t in times {
                let (next, e) = krylov_propagate(h, &cur, t - t_cur)?;
                err += e;
                cur = next;
                t_cur = t;
                out.push(Evolved { time: t, error_estimate: err + cur.dropped.sqrt(), op: cur.clone() });
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::models::random_pauli_model;
    use crate::sim::operator::HamiltonianTerm;
    use crate::graph::{standard_graph, GraphKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_h(n: usize, seed: u64) -> Hamiltonian {
        let g = standard_graph(&GraphKind::ErdosRenyi { n, q: 2, k: 3.0, m: 1, seed }).unwrap();
        random_pauli_model(&g, &vec![1.0; g.num_factors()], seed).unwrap()
    }

    fn diff(a: &OperatorVector, b: &OperatorVector) -> f64 {
        let mut d = a.clone();
        d.axpy(-1.0, b).unwrap();
        d.norm()
    }

    #[test]
    fn zero_time_and_commuting() {
        let h = random_h(4, 1);
        let a = OperatorVector::pauli("ZIII").unwrap();
        for m in [Method::Dense, Method::Krylov] {
            let e = evolve_operator(&h, &a, 0.0, m).unwrap();
            assert!(diff(&e.op, &a) < 1e-12);
        }
        let zz = HamiltonianTerm { factor: Some(0), key: PauliString::parse("ZZ").unwrap().to_key(), coupling: 1.3 };
        let h2 = Hamiltonian::new(BasisKind::Pauli, 2, vec![zz]).unwrap();
        let z = OperatorVector::pauli("ZI").unwrap();
        for m in [Method::Dense, Method::Krylov] {
            assert!(diff(&evolve_operator(&h2, &z, 2.5, m).unwrap().op, &z) < 1e-12);
        }
    }

    #[test]
    fn single_term_rotation() {
        // e^{Lt} X = cos(2t) X - sin(2t) Y under H = Z.
        let z = HamiltonianTerm { factor: None, key: PauliString::parse("Z").unwrap().to_key(), coupling: 1.0 };
        let h = Hamiltonian::new(BasisKind::Pauli, 1, vec![z]).unwrap();
        let x = OperatorVector::pauli("X").unwrap();
        let t: f64 = 0.37;
        for m in [Method::Dense, Method::Krylov] {
            let e = evolve_operator(&h, &x, t, m).unwrap().op;
            assert!((e.get(PauliString::parse("X").unwrap().to_key()) - (2.0 * t).cos()).abs() < 1e-12);
            assert!((e.get(PauliString::parse("Y").unwrap().to_key()) + (2.0 * t).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_preserved_and_dense_matches_krylov() {
        let times: Vec<f64> = (0..=12).map(|k| 0.25 * k as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..3 {
            let h = random_h(6, seed);
            let site = rng.gen_range(0..6);
            let a = OperatorVector::basis(BasisKind::Pauli, 6, PauliString::single(site, 'X').unwrap().to_key()).unwrap();
            let dense = evolve_times(&h, &a, &times, Method::Dense).unwrap();
            let kry = evolve_times(&h, &a, &times, Method::Krylov).unwrap();
            for (d, k) in dense.iter().zip(&kry) {
                assert!((d.op.norm() - 1.0).abs() < 1e-10, "drift {}", d.op.norm() - 1.0);
                assert!((k.op.norm() - 1.0).abs() < 1e-9);
                assert!(diff(&d.op, &k.op) < 1e-8, "t={} diff {}", d.time, diff(&d.op, &k.op));
                assert!(k.error_estimate < 1e-8);
            }
        }
    }

    #[test]
    fn time_additivity() {
        let h = random_h(5, 4);
        let a = OperatorVector::pauli("IIYII").unwrap();
        let ev = DenseEvolver::new(&h).unwrap();
        let (t1, t2) = (0.4, 0.9);
        let first = ev.evolve(&a, t1).unwrap().op;
        let both = ev.evolve(&first, t2).unwrap().op;
        let direct = ev.evolve(&a, t1 + t2).unwrap().op;
        assert!(diff(&both, &direct) < 1e-9);
        let k = evolve_operator(&h, &first, t2, Method::Krylov).unwrap().op;
        assert!(diff(&k, &direct) < 1e-9);
    }

    #[test]
    fn majorana_dense_matches_krylov() {
        let h = crate::sim::models::build_syk_hamiltonian(8, 4, 1.0, 3).unwrap();
        let a = OperatorVector::majorana(8, &[0]).unwrap();
        let times = [0.3, 0.8];
        let d = evolve_times(&h, &a, &times, Method::Dense).unwrap();
        let k = evolve_times(&h, &a, &times, Method::Krylov).unwrap();
        for (x, y) in d.iter().zip(&k) {
            assert!(diff(&x.op, &y.op) < 1e-8);
            assert!((x.op.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn limits() {
        let h = Hamiltonian::new(BasisKind::Pauli, 11, vec![]).unwrap();
        assert!(matches!(DenseEvolver::new(&h), Err(SimError::TooLarge(_))));
        let a = OperatorVector::pauli("X").unwrap();
        assert!(matches!(evolve_operator(&h, &a, 1.0, Method::Krylov), Err(SimError::BasisMismatch(_))));
    }
}
