//! Concrete Hamiltonians: random Pauli-string models on a factor graph,
//! the alternating XX/YY chain, and SYK.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::graph::FactorGraph;
use crate::sim::operator::{BasisKind, Hamiltonian, HamiltonianTerm, Key};
use crate::sim::pauli::PauliString;
use crate::sim::SimError;

/// One term per factor: `keys[X]` with coupling `couplings[X]`. Each string
/// must act only inside its factor.
pub fn factor_model(g: &FactorGraph, kind: BasisKind, keys: &[Key], couplings: &[f64]) -> Result<Hamiltonian, SimError> {
    if keys.len() != g.num_factors() || couplings.len() != g.num_factors() {
        return Err(SimError::SizeMismatch(format!(
            "{} factors, {} strings, {} couplings",
            g.num_factors(),
            keys.len(),
            couplings.len()
        )));
    }
    let mut terms = Vec::with_capacity(keys.len());
    for (f, (&key, &c)) in keys.iter().zip(couplings).enumerate() {
        let inside: u64 = g.factor(f).nodes.iter().fold(0, |m, &v| m | 1 << v);
        if kind.support(key) & !inside != 0 {
            return Err(SimError::InvalidParams(format!("string for factor {f} leaves the factor")));
        }
        terms.push(HamiltonianTerm { factor: Some(f), key, coupling: c });
    }
    Hamiltonian::new(kind, g.num_nodes(), terms)
}

/// Every factor gets a Pauli string drawn uniformly among those acting
/// non-trivially on exactly its nodes.
pub fn random_pauli_model(g: &FactorGraph, couplings: &[f64], seed: u64) -> Result<Hamiltonian, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<Key> = g
        .factors()
        .iter()
        .map(|f| {
            let mut p = PauliString::IDENTITY;
            for &v in &f.nodes {
                let s = PauliString::single(v, ['X', 'Y', 'Z'][rng.gen_range(0..3)]).expect("valid label");
                p.x |= s.x;
                p.z |= s.z;
            }
            p.to_key()
        })
        .collect();
    factor_model(g, BasisKind::Pauli, &keys, couplings)
}

/// Chain with `X_b X_{b+1}` on even bonds and `Y_b Y_{b+1}` on odd ones.
/// Starting from `Z_0`, every step along the chain anticommutes, so the
/// leading-order growth saturates the path bound.
pub fn tightness_chain(n: usize) -> Result<(FactorGraph, Hamiltonian), SimError> {
    let g = crate::graph::standard_graph(&crate::graph::GraphKind::Chain { n })
        .map_err(|e| SimError::InvalidParams(e.to_string()))?;
    let keys: Vec<Key> = (0..n - 1)
        .map(|b| {
            let c = if b % 2 == 0 { 'X' } else { 'Y' };
            let (p, q) = (PauliString::single(b, c).unwrap(), PauliString::single(b + 1, c).unwrap());
            PauliString { x: p.x | q.x, z: p.z | q.z }.to_key()
        })
        .collect();
    let h = factor_model(&g, BasisKind::Pauli, &keys, &vec![1.0; n - 1])?;
    Ok((g, h))
}

/// `E[J^2] = (q-1)! J^2 / (2 q N^{q-1})` for Majoranas normalized to
/// `psi^2 = 1`.
pub fn syk_variance(n: usize, q: usize, j: f64) -> f64 {
    let fact: f64 = (1..q).map(|k| k as f64).product();
    fact * j * j / (2.0 * q as f64 * (n as f64).powi(q as i32 - 1))
}

fn syk_subsets(n: usize, q: usize) -> Result<Vec<u64>, SimError> {
    if q % 2 == 1 {
        return Err(SimError::OddQ(q));
    }
    if q == 0 || q > n {
        return Err(SimError::InvalidParams(format!("q = {q} with {n} Majoranas")));
    }
    if n > 64 {
        return Err(SimError::TooLarge(format!("{n} Majoranas")));
    }
    // Lexicographic order of the ascending index lists.
    fn rec(start: usize, n: usize, left: usize, mask: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(mask);
            return;
        }
        for v in start..=n - left {
            rec(v + 1, n, left - 1, mask | 1 << v, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, q, 0, &mut out);
    Ok(out)
}

/// `H = sum_S J_S Gamma_S` over `q`-subsets in lexicographic order, with the
/// given couplings.
pub fn syk_from_couplings(n: usize, q: usize, couplings: &[f64]) -> Result<Hamiltonian, SimError> {
    let subsets = syk_subsets(n, q)?;
    if couplings.len() != subsets.len() {
        return Err(SimError::SizeMismatch(format!("{} couplings for {} subsets", couplings.len(), subsets.len())));
    }
    let terms = subsets
        .iter()
        .zip(couplings)
        .enumerate()
        .map(|(f, (&m, &c))| HamiltonianTerm { factor: Some(f), key: m as Key, coupling: c })
        .collect();
    Hamiltonian::new(BasisKind::Majorana, n, terms)
}

/// Gaussian SYK couplings with the standard variance, deterministic in `seed`.
pub fn build_syk_hamiltonian(n: usize, q: usize, j: f64, seed: u64) -> Result<Hamiltonian, SimError> {
    let count = syk_subsets(n, q)?.len();
    let normal = Normal::new(0.0, syk_variance(n, q, j).sqrt()).map_err(|e| SimError::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let couplings: Vec<f64> = (0..count).map(|_| normal.sample(&mut rng)).collect();
    syk_from_couplings(n, q, &couplings)
}
