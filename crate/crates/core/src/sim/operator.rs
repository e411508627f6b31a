//! Sparse real vectors in operator space and Hamiltonians built from
//! weighted basis strings.
//!
//! Both bases are orthonormal under the normalized Hilbert-Schmidt product
//! `(A|B) = tr(A^dag B) / tr(1)`, so `(O|O)` is the sum of squared
//! coefficients.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::graph::FactorId;
use crate::sim::majorana::{self, gamma_commute, gamma_mul};
use crate::sim::pauli::{i_pow, PauliString};
use crate::sim::SimError;

/// Pauli strings pack `(x << 64) | z`; Majorana strings use the index mask.
pub type Key = u128;

/// Coefficients below this magnitude are dropped.
pub const PRUNE: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Pauli,
    Majorana,
}

impl BasisKind {
    /// `a * b = i^k c`.
    pub fn mul(self, a: Key, b: Key) -> (u32, Key) {
        match self {
            BasisKind::Pauli => {
                let (k, c) = PauliString::from_key(a).mul(&PauliString::from_key(b));
                (k, c.to_key())
            }
            BasisKind::Majorana => {
                let (k, c) = gamma_mul(a as u64, b as u64);
                (k, c as Key)
            }
        }
    }

    pub fn commutes(self, a: Key, b: Key) -> bool {
        match self {
            BasisKind::Pauli => PauliString::from_key(a).commutes_with(&PauliString::from_key(b)),
            BasisKind::Majorana => gamma_commute(a as u64, b as u64),
        }
    }

    /// Sites (qubits or Majorana indices) a string acts on.
    pub fn support(self, key: Key) -> u64 {
        match self {
            BasisKind::Pauli => PauliString::from_key(key).support(),
            BasisKind::Majorana => key as u64,
        }
    }

    /// `i[a, b]` for basis strings, as a coefficient on a single string.
    pub fn commutator(self, a: Key, b: Key) -> Option<(f64, Key)> {
        if self.commutes(a, b) {
            return None;
        }
        // Anticommuting Hermitian strings multiply to an anti-Hermitian one,
        // so k is odd and i[a, b] = 2 i^{k+1} c is real.
        let (k, c) = self.mul(a, b);
        debug_assert!(k % 2 == 1);
        Some((if k == 1 { -2.0 } else { 2.0 }, c))
    }

    fn check_key(self, n: usize, key: Key) -> Result<(), SimError> {
        let limit = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        let ok = match self {
            BasisKind::Pauli => {
                let p = PauliString::from_key(key);
                p.x & !limit == 0 && p.z & !limit == 0
            }
            BasisKind::Majorana => key >> 64 == 0 && (key as u64) & !limit == 0,
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::SizeMismatch(format!("string {key:#x} does not fit {n} sites")))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorVector {
    pub kind: BasisKind,
    /// Qubits for Pauli strings, Majorana modes otherwise.
    pub n: usize,
    coeffs: BTreeMap<Key, f64>,
    /// Squared weight removed by pruning so far.
    pub dropped: f64,
}

impl OperatorVector {
    pub fn zero(kind: BasisKind, n: usize) -> Result<Self, SimError> {
        if n == 0 || n > 64 {
            return Err(SimError::TooLarge(format!("{n} sites")));
        }
        Ok(Self { kind, n, coeffs: BTreeMap::new(), dropped: 0.0 })
    }

    pub fn basis(kind: BasisKind, n: usize, key: Key) -> Result<Self, SimError> {
        Self::from_terms(kind, n, [(key, 1.0)])
    }

    pub fn from_terms(kind: BasisKind, n: usize, terms: impl IntoIterator<Item = (Key, f64)>) -> Result<Self, SimError> {
        let mut v = Self::zero(kind, n)?;
        for (k, c) in terms {
            kind.check_key(n, k)?;
            v.add(k, c);
        }
        v.prune();
        Ok(v)
    }

    /// Single Pauli string from a label like `"IXZ"`.
    pub fn pauli(label: &str) -> Result<Self, SimError> {
        Self::basis(BasisKind::Pauli, label.len(), PauliString::parse(label)?.to_key())
    }

    /// `Gamma_S` for the given (not necessarily ascending) indices.
    pub fn majorana(n: usize, indices: &[usize]) -> Result<Self, SimError> {
        let s = majorana::MajoranaString::new(indices, n)?;
        Self::from_terms(BasisKind::Majorana, n, [(s.mask as Key, s.sign as f64)])
    }

    pub fn add(&mut self, key: Key, c: f64) {
        *self.coeffs.entry(key).or_insert(0.0) += c;
    }

    pub fn get(&self, key: Key) -> f64 {
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Key, f64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn prune(&mut self) {
        let mut dropped = 0.0;
        self.coeffs.retain(|_, c| {
            if c.abs() < PRUNE {
                dropped += *c * *c;
                false
            } else {
                true
            }
        });
        self.dropped += dropped;
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    fn same_space(&self, o: &Self) -> Result<(), SimError> {
        if self.kind != o.kind || self.n != o.n {
            return Err(SimError::BasisMismatch(format!(
                "{:?}({}) vs {:?}({})",
                self.kind, self.n, o.kind, o.n
            )));
        }
        Ok(())
    }

    pub fn dot(&self, o: &Self) -> Result<f64, SimError> {
        self.same_space(o)?;
        let (small, big) = if self.len() <= o.len() { (self, o) } else { (o, self) };
        Ok(small.iter().map(|(k, c)| c * big.get(k)).sum())
    }

    pub fn scale(&mut self, s: f64) {
        for c in self.coeffs.values_mut() {
            *c *= s;
        }
        self.prune();
    }

    /// `self += a * o`.
    pub fn axpy(&mut self, a: f64, o: &Self) -> Result<(), SimError> {
        self.same_space(o)?;
        for (k, c) in o.iter() {
            self.add(k, a * c);
        }
        self.prune();
        Ok(())
    }

    pub fn identity_component(&self) -> f64 {
        self.get(0)
    }

    /// Union of the supports of all strings present.
    pub fn support(&self) -> u64 {
        self.coeffs.keys().fold(0, |acc, &k| acc | self.kind.support(k))
    }

    /// Jordan-Wigner image on `n / 2` qubits.
    pub fn to_pauli(&self) -> Result<Self, SimError> {
        match self.kind {
            BasisKind::Pauli => Ok(self.clone()),
            BasisKind::Majorana => {
                if self.n % 2 == 1 {
                    return Err(SimError::SizeMismatch(format!("odd Majorana count {}", self.n)));
                }
                let mut v = Self::zero(BasisKind::Pauli, self.n / 2)?;
                for (k, c) in self.iter() {
                    let (s, p) = majorana::to_pauli(k as u64);
                    v.add(p.to_key(), s * c);
                }
                v.dropped = self.dropped;
                Ok(v)
            }
        }
    }

    /// Dense `2^n x 2^n` matrix of a Pauli-kind vector.
    pub fn dense(&self) -> Result<DMatrix<Complex64>, SimError> {
        if self.kind != BasisKind::Pauli {
            return self.to_pauli()?.dense();
        }
        if self.n > 12 {
            return Err(SimError::TooLarge(format!("{} qubits for a dense matrix", self.n)));
        }
        let d = 1usize << self.n;
        let mut m = DMatrix::zeros(d, d);
        for (k, c) in self.iter() {
            let p = PauliString::from_key(k);
            let ph = i_pow((p.x & p.z).count_ones()) * c;
            for r in 0..d as u64 {
                let s = if (p.z & r).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[((r ^ p.x) as usize, r as usize)] += ph * s;
            }
        }
        Ok(m)
    }
}

/// `i[a, b]`; bilinear and antisymmetric.
pub fn pauli_commutator(a: &OperatorVector, b: &OperatorVector) -> Result<OperatorVector, SimError> {
    a.same_space(b)?;
    let mut out = OperatorVector::zero(a.kind, a.n)?;
    for (ka, ca) in a.iter() {
        for (kb, cb) in b.iter() {
            if let Some((s, k)) = a.kind.commutator(ka, kb) {
                out.add(k, s * ca * cb);
            }
        }
    }
    out.prune();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    pub factor: Option<FactorId>,
    pub key: Key,
    pub coupling: f64,
}

/// `H = sum_X J_X H_X` with each `H_X` a single basis string, so that
/// `||H_X|| = |J_X|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub kind: BasisKind,
    pub n: usize,
    terms: Vec<HamiltonianTerm>,
}

impl Hamiltonian {
    pub fn new(kind: BasisKind, n: usize, terms: Vec<HamiltonianTerm>) -> Result<Self, SimError> {
        OperatorVector::zero(kind, n)?;
        for t in &terms {
            kind.check_key(n, t.key)?;
            if !t.coupling.is_finite() {
                return Err(SimError::InvalidParams(format!("coupling {}", t.coupling)));
            }
        }
        Ok(Self { kind, n, terms })
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn operator(&self) -> OperatorVector {
        let mut v = OperatorVector::zero(self.kind, self.n).expect("validated size");
        for t in &self.terms {
            v.add(t.key, t.coupling);
        }
        v.prune();
        v
    }

    /// Terms attached to factor `f`.
    pub fn factor_terms(&self, f: FactorId) -> impl Iterator<Item = &HamiltonianTerm> {
        self.terms.iter().filter(move |t| t.factor == Some(f))
    }

    /// Largest total coupling magnitude `sum |J|` over the terms of one factor.
    pub fn factor_norm_bound(&self, f: FactorId) -> f64 {
        self.factor_terms(f).map(|t| t.coupling.abs()).sum()
    }

    fn apply_iter<'a>(
        &self,
        terms: impl Iterator<Item = &'a HamiltonianTerm>,
        o: &OperatorVector,
    ) -> Result<OperatorVector, SimError> {
        if o.kind != self.kind || o.n != self.n {
            return Err(SimError::BasisMismatch(format!(
                "Hamiltonian {:?}({}) vs operator {:?}({})",
                self.kind, self.n, o.kind, o.n
            )));
        }
        let mut out = OperatorVector::zero(self.kind, self.n)?;
        for t in terms {
            for (k, c) in o.iter() {
                if let Some((s, r)) = self.kind.commutator(t.key, k) {
                    out.add(r, s * t.coupling * c);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// `L|O) = |i[H, O])`.
    pub fn apply(&self, o: &OperatorVector) -> Result<OperatorVector, SimError> {
        self.apply_iter(self.terms.iter(), o)
    }

    /// `L_X|O)` for the terms of factor `f`.
    pub fn apply_factor(&self, f: FactorId, o: &OperatorVector) -> Result<OperatorVector, SimError> {
        self.apply_iter(self.factor_terms(f), o)
    }

    /// Same Hamiltonian in the qubit basis.
    pub fn to_pauli(&self) -> Result<Self, SimError> {
        match self.kind {
            BasisKind::Pauli => Ok(self.clone()),
            BasisKind::Majorana => {
                if self.n % 2 == 1 {
                    return Err(SimError::SizeMismatch(format!("odd Majorana count {}", self.n)));
                }
                let terms = self
                    .terms
                    .iter()
                    .map(|t| {
                        let (s, p) = majorana::to_pauli(t.key as u64);
                        HamiltonianTerm { factor: t.factor, key: p.to_key(), coupling: s * t.coupling }
                    })
                    .collect();
                Self::new(BasisKind::Pauli, self.n / 2, terms)
            }
        }
    }
}

/// `sum_X i[J_X H_X, O]`.
pub fn liouvillian_apply(h: &Hamiltonian, o: &OperatorVector) -> Result<OperatorVector, SimError> {
    h.apply(o)
}
