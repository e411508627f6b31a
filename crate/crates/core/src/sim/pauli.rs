//! Pauli strings as bit masks: `P(x, z) = i^{|x & z|} X^x Z^z`, which is
//! Hermitian and squares to one. Bit `k` is qubit `k`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::sim::SimError;

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

/// `i^k` for `k` mod 4.
pub fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: Self = Self { x: 0, z: 0 };

    pub fn single(site: usize, label: char) -> Result<Self, SimError> {
        let bit = 1u64 << site;
        match label {
            'I' => Ok(Self::IDENTITY),
            'X' => Ok(Self { x: bit, z: 0 }),
            'Y' => Ok(Self { x: bit, z: bit }),
            'Z' => Ok(Self { x: 0, z: bit }),
            c => Err(SimError::InvalidParams(format!("unknown Pauli label {c:?}"))),
        }
    }

    /// Parses labels such as `"XIZY"`, character `k` acting on qubit `k`.
    pub fn parse(label: &str) -> Result<Self, SimError> {
        if label.len() > MAX_QUBITS {
            return Err(SimError::TooLarge(format!("{} qubits", label.len())));
        }
        let mut p = Self::IDENTITY;
        for (k, c) in label.chars().enumerate() {
            let s = Self::single(k, c)?;
            p.x |= s.x;
            p.z |= s.z;
        }
        Ok(p)
    }

    pub fn label(&self, n: usize) -> String {
        (0..n)
            .map(|k| match ((self.x >> k) & 1, (self.z >> k) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            })
            .collect()
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn acts_on(&self, site: usize) -> bool {
        (self.support() >> site) & 1 == 1
    }

    pub fn commutes_with(&self, o: &Self) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 0
    }

    /// `self * o = i^k * r`, returned as `(k mod 4, r)`.
    pub fn mul(&self, o: &Self) -> (u32, Self) {
        let x = self.x ^ o.x;
        let z = self.z ^ o.z;
        let k = (self.x & self.z).count_ones() + (o.x & o.z).count_ones() + 2 * (self.z & o.x).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        (k % 4, Self { x, z })
    }

    pub fn to_key(self) -> u128 {
        ((self.x as u128) << 64) | self.z as u128
    }

    pub fn from_key(key: u128) -> Self {
        Self { x: (key >> 64) as u64, z: key as u64 }
    }

    /// Dense `2^n x 2^n` matrix; entry `(r ^ x, r)` is `i^{|x&z|} (-1)^{|z&r|}`.
    pub fn dense(&self, n: usize) -> DMatrix<Complex64> {
        let d = 1usize << n;
        let mut m = DMatrix::zeros(d, d);
        let ph = i_pow((self.x & self.z).count_ones());
        for r in 0..d as u64 {
            let s = if (self.z & r).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[((r ^ self.x) as usize, r as usize)] = ph * s;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(n: usize) -> Vec<PauliString> {
        let mut v = Vec::new();
        for x in 0..1u64 << n {
            for z in 0..1u64 << n {
                v.push(PauliString { x, z });
            }
        }
        v
    }

    #[test]
    fn labels_round_trip() {
        let p = PauliString::parse("XIZY").unwrap();
        assert_eq!(p.label(4), "XIZY");
        assert_eq!(p.weight(), 3);
        assert!(PauliString::parse("XQ").is_err());
    }

    #[test]
    fn single_qubit_matrices() {
        let x = PauliString::parse("X").unwrap().dense(1);
        let y = PauliString::parse("Y").unwrap().dense(1);
        let z = PauliString::parse("Z").unwrap().dense(1);
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(x[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(y[(0, 1)], -i);
        assert_eq!(y[(1, 0)], i);
        assert_eq!(z[(1, 1)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn products_match_dense() {
        let n = 2;
        for a in all(n) {
            let da = a.dense(n);
            assert!((da.adjoint() - &da).camax() < 1e-15);
            for b in all(n) {
                let (k, c) = a.mul(&b);
                let want = &da * b.dense(n);
                let got = c.dense(n) * i_pow(k);
                assert!((want - got).camax() < 1e-14, "{} {}", a.label(n), b.label(n));
                let comm = (da.clone() * b.dense(n) - b.dense(n) * da.clone()).camax() < 1e-14;
                assert_eq!(comm, a.commutes_with(&b));
            }
        }
    }

    #[test]
    fn keys() {
        let p = PauliString { x: 5, z: 3 };
        assert_eq!(PauliString::from_key(p.to_key()), p);
    }
}
