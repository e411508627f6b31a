//! Majorana monomials `Gamma_S = i^{m(m-1)/2} psi_{s_1} ... psi_{s_m}`
//! (ascending, `m = |S|`), stored as bit masks. Each `Gamma_S` is Hermitian
//! and squares to one.

use std::collections::HashMap;

use crate::sim::pauli::PauliString;
use crate::sim::SimError;

pub const MAX_MAJORANAS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MajoranaString {
    pub mask: u64,
    /// Overall sign in front of `Gamma_mask`.
    pub sign: i8,
}

fn hermitian_phase(m: u32) -> u32 {
    (m * m.saturating_sub(1) / 2) % 4
}

/// Number of pairs `(s, t)` with `s` in `a`, `t` in `b`, `s > t`.
fn inversions(a: u64, b: u64) -> u32 {
    let mut count = 0;
    let mut rest = a;
    while rest != 0 {
        let s = rest.trailing_zeros();
        rest &= rest - 1;
        count += (b & ((1u64 << s) - 1)).count_ones();
    }
    count
}

/// `Gamma_a * Gamma_b = i^k Gamma_{a ^ b}`, returned as `(k mod 4, a ^ b)`.
pub fn gamma_mul(a: u64, b: u64) -> (u32, u64) {
    let c = a ^ b;
    let k = hermitian_phase(a.count_ones()) + hermitian_phase(b.count_ones()) + 2 * (inversions(a, b) % 2) + 4
        - hermitian_phase(c.count_ones());
    (k % 4, c)
}

pub fn gamma_commute(a: u64, b: u64) -> bool {
    (a.count_ones() * b.count_ones() - (a & b).count_ones()) % 2 == 0
}

impl MajoranaString {
    pub fn new(indices: &[usize], n: usize) -> Result<Self, SimError> {
        let mut mask = 0u64;
        for &k in indices {
            if k >= n || n > MAX_MAJORANAS {
                return Err(SimError::SizeMismatch(format!("index {k} with {n} Majoranas")));
            }
            if mask >> k & 1 == 1 {
                return Err(SimError::InvalidParams(format!("repeated Majorana index {k}")));
            }
            mask |= 1 << k;
        }
        // The string stands for i^{m(m-1)/2} psi_{given order}; sorting the
        // given order costs its inversion parity.
        let mut inv = 0;
        for a in 0..indices.len() {
            for b in a + 1..indices.len() {
                if indices[a] > indices[b] {
                    inv += 1;
                }
            }
        }
        Ok(Self { mask, sign: if inv % 2 == 0 { 1 } else { -1 } })
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..64).filter(|k| self.mask >> k & 1 == 1).collect()
    }

    /// `self * o = i^k * result`.
    pub fn mul(&self, o: &Self) -> (u32, Self) {
        let (k, c) = gamma_mul(self.mask, o.mask);
        let s = self.sign * o.sign;
        (k, Self { mask: c, sign: s })
    }
}

/// Jordan-Wigner image of `Gamma_mask` on `n / 2` qubits:
/// `psi_{2k} = Z_0..Z_{k-1} X_k`, `psi_{2k+1} = Z_0..Z_{k-1} Y_k`.
pub fn to_pauli(mask: u64) -> (f64, PauliString) {
    let mut k_total = 0u32;
    let mut acc = PauliString::IDENTITY;
    let mut rest = mask;
    while rest != 0 {
        let m = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let q = m / 2;
        let zs = (1u64 << q) - 1;
        let site = if m % 2 == 0 { PauliString { x: 1 << q, z: zs } } else { PauliString { x: 1 << q, z: zs | (1 << q) } };
        // Y_k = i X_k Z_k in our convention; the Z-string times X/Y has
        // phase i^{|x&z|} of the site alone, which `mul` tracks.
        let (k, p) = acc.mul(&site);
        k_total += k;
        acc = p;
    }
    let k = (k_total + hermitian_phase(mask.count_ones())) % 4;
    assert!(k % 2 == 0, "Jordan-Wigner image must be real");
    (if k == 0 { 1.0 } else { -1.0 }, acc)
}

/// Inverse Jordan-Wigner table for `n` Majoranas: Pauli key to `(sign, mask)`.
pub fn pauli_to_majorana_table(n: usize) -> Result<HashMap<u128, (f64, u64)>, SimError> {
    if n > 24 || n % 2 == 1 {
        return Err(SimError::TooLarge(format!("{n} Majoranas")));
    }
    let mut t = HashMap::with_capacity(1 << n);
    for mask in 0..1u64 << n {
        let (s, p) = to_pauli(mask);
        t.insert(p.to_key(), (s, mask));
    }
    Ok(t)
}
