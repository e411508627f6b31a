//! `N(b, l)`: creeping sequences of `l` factors whose causal tree has `b`
//! branches (leaves).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::causal::CausalError;

pub const BRUTEFORCE_LIMIT: usize = 8;
pub const SERIES_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NblMethod {
    BruteForce,
    GeneratingFunction,
}

pub fn nbl(b: usize, l: usize, method: NblMethod) -> Result<BigUint, CausalError> {
    let row = match method {
        NblMethod::BruteForce => bruteforce_row(l)?,
        NblMethod::GeneratingFunction => series_row(l)?,
    };
    Ok(row.get(b).cloned().unwrap_or_default())
}

/// One tree shape met during brute-force enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeClass {
    /// Sorted nested-parentheses encoding of the rooted tree.
    pub code: String,
    pub leaves: usize,
    /// Attachment sequences producing this shape.
    pub sequences: u64,
}

fn encode(children: &[Vec<usize>], v: usize) -> String {
    let mut parts: Vec<String> = children[v].iter().map(|&c| encode(children, c)).collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// Every way of growing `l` factors one at a time, each hanging off the
/// root or an earlier factor, grouped by the shape of the resulting tree.
pub fn tree_classes(l: usize) -> Result<Vec<TreeClass>, CausalError> {
    if l > BRUTEFORCE_LIMIT {
        return Err(CausalError::TooLarge(format!("l = {l} above {BRUTEFORCE_LIMIT}")));
    }
    let mut classes: BTreeMap<String, TreeClass> = BTreeMap::new();
    // parent[k] < k + 1 for factor k + 1; vertex 0 is the root.
    let mut parent = vec![0usize; l];
    loop {
        let mut children = vec![Vec::new(); l + 1];
        for (k, &p) in parent.iter().enumerate() {
            children[p].push(k + 1);
        }
        let leaves = if l == 0 { 0 } else { (1..=l).filter(|&v| children[v].is_empty()).count() };
        let code = encode(&children, 0);
        classes
            .entry(code.clone())
            .or_insert(TreeClass { code, leaves, sequences: 0 })
            .sequences += 1;
        // Odometer over parent[k] in 0..=k.
        let mut k = l;
        loop {
            if k == 0 {
                return Ok(classes.into_values().collect());
            }
            k -= 1;
            parent[k] += 1;
            if parent[k] <= k {
                break;
            }
            parent[k] = 0;
        }
    }
}

fn bruteforce_row(l: usize) -> Result<Vec<BigUint>, CausalError> {
    // The empty sequence carries no branches; the series has no t^0 term either.
    if l == 0 {
        return Ok(vec![BigUint::zero()]);
    }
    let mut row = vec![BigUint::zero(); l + 1];
    for c in tree_classes(l)? {
        row[c.leaves] += BigUint::from(c.sequences);
    }
    Ok(row)
}

type Poly = Vec<BigRational>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_assign(a: &mut Poly, b: &Poly, sign: i32) {
    if a.len() < b.len() {
        a.resize(b.len(), BigRational::zero());
    }
    for (x, y) in a.iter_mut().zip(b) {
        if sign >= 0 {
            *x += y;
        } else {
            *x -= y;
        }
    }
}

/// `x (1 + x + ... + x^(m-1)) / n!`
fn shifted_geometric(m: usize, n_fact: &BigInt) -> Poly {
    let mut p = vec![BigRational::zero(); m + 1];
    for c in p.iter_mut().skip(1) {
        *c = BigRational::new(BigInt::one(), n_fact.clone());
    }
    p
}

/// Taylor coefficients in `t` of `(x e^t - x e^{tx}) / (e^{tx} - x e^t)`,
/// each a polynomial in `x`, through order `l`. Numerator and denominator
/// share the factor `1 - x`; dividing it out leaves a denominator with
/// constant term one, which is inverted as a power series in `t`.
pub fn eulerian_series(l: usize) -> Vec<Poly> {
    let mut fact = vec![BigInt::one()];
    for n in 1..=l {
        let next = &fact[n - 1] * BigInt::from(n);
        fact.push(next);
    }
    // num_n = x [n]_x / n!, den_n = -x [n-1]_x / n! (n >= 2), den_0 = 1.
    let num: Vec<Poly> = (0..=l).map(|n| if n == 0 { Vec::new() } else { shifted_geometric(n, &fact[n]) }).collect();
    let den: Vec<Poly> = (0..=l)
        .map(|n| match n {
            0 => vec![BigRational::one()],
            1 => Vec::new(),
            _ => shifted_geometric(n - 1, &fact[n]).into_iter().map(|c| -c).collect(),
        })
        .collect();
    let mut inv: Vec<Poly> = vec![vec![BigRational::one()]];
    for n in 1..=l {
        let mut acc: Poly = Vec::new();
        for k in 1..=n {
            poly_add_assign(&mut acc, &poly_mul(&den[k], &inv[n - k]), -1);
        }
        inv.push(acc);
    }
    (0..=l)
        .map(|n| {
            let mut acc: Poly = Vec::new();
            for k in 0..=n {
                poly_add_assign(&mut acc, &poly_mul(&num[k], &inv[n - k]), 1);
            }
            acc
        })
        .collect()
}

fn series_row(l: usize) -> Result<Vec<BigUint>, CausalError> {
    if l > SERIES_LIMIT {
        return Err(CausalError::TooLarge(format!("l = {l} above {SERIES_LIMIT}")));
    }
    let coeffs = eulerian_series(l);
    let lf: BigInt = (1..=l).map(BigInt::from).product();
    let mut row = vec![BigUint::zero(); l + 1];
    for (b, c) in coeffs[l].iter().enumerate().take(l + 1) {
        let v = c * BigRational::from_integer(lf.clone());
        assert!(v.is_integer(), "non-integral coefficient {v}");
        row[b] = v.to_integer().to_biguint().expect("nonnegative");
    }
    Ok(row)
}

/// Whole row `N(., l)` from the generating function.
pub fn nbl_row(l: usize) -> Result<Vec<BigUint>, CausalError> {
    series_row(l)
}

/// `(a+b)! <= 2^(a+b) a! b!`, in exact integers.
pub fn factorial_inequality_holds(a: u32, b: u32) -> bool {
    let f = |n: u32| -> BigUint { (1..=n).map(BigUint::from).product() };
    f(a + b) <= (BigUint::one() << (a + b) as usize) * f(a) * f(b)
}

/// Ratio `N(b, l) / b^l` as a float, for reporting.
pub fn nbl_ratio(n: &BigUint, b: usize, l: usize) -> f64 {
    let p = BigUint::from(b).pow(l as u32);
    if p.is_zero() {
        return f64::NAN;
    }
    let (n, p) = (n.to_f64().unwrap_or(f64::INFINITY), p.to_f64().unwrap_or(f64::INFINITY));
    n / p
}
