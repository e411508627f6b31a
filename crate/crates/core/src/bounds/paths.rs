//! Irreducible paths between two nodes and the path-sum bound built on them.

use std::collections::HashMap;

use crate::bounds::BoundError;
use crate::graph::{FactorGraph, FactorId, NodeId, WeightedFactorGraph};
use crate::scalar::{pow_over_factorial, Real};

/// Above this many factors a length cap must be given explicitly.
pub const EXHAUSTIVE_FACTOR_LIMIT: usize = 24;

/// A sequence of distinct factors leading from `i` to `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreduciblePath {
    pub factors: Vec<FactorId>,
    /// One choice of distinct nodes linking consecutive factors.
    pub connectors: Vec<NodeId>,
}

impl IrreduciblePath {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct PathEnumeration {
    pub paths: Vec<IrreduciblePath>,
    pub max_len: usize,
    /// Some partial path reached `max_len` while it could still be extended.
    pub truncated: bool,
}

impl PathEnumeration {
    /// Number of paths of each length, indexed by length.
    pub fn counts_by_length(&self) -> Vec<usize> {
        let mut c = vec![0; self.max_len + 1];
        for p in &self.paths {
            c[p.len()] += 1;
        }
        c
    }
}

/// Distinct representatives for `sets`, or `None` if there are none.
/// Kuhn's augmenting paths; the sets here have a handful of elements.
fn distinct_representatives(sets: &[Vec<NodeId>]) -> Option<Vec<NodeId>> {
    let mut owner: HashMap<NodeId, usize> = HashMap::new();
    fn augment(k: usize, sets: &[Vec<NodeId>], owner: &mut HashMap<NodeId, usize>, seen: &mut Vec<NodeId>) -> bool {
        for &v in &sets[k] {
            if seen.contains(&v) {
                continue;
            }
            seen.push(v);
            let free = match owner.get(&v) {
                None => true,
                Some(&other) => augment(other, sets, owner, seen),
            };
            if free {
                owner.insert(v, k);
                return true;
            }
        }
        false
    }
    for k in 0..sets.len() {
        if !augment(k, sets, &mut owner, &mut Vec::new()) {
            return None;
        }
    }
    let mut reps = vec![0; sets.len()];
    for (v, k) in owner {
        reps[k] = v;
    }
    Some(reps)
}

struct Search<'a> {
    g: &'a FactorGraph,
    i: NodeId,
    j: NodeId,
    max_len: usize,
    stack: Vec<FactorId>,
    used: Vec<bool>,
    out: Vec<IrreduciblePath>,
    truncated: bool,
    reach_memo: HashMap<(FactorId, Vec<u64>), bool>,
}

impl Search<'_> {
    fn used_key(&self) -> Vec<u64> {
        let mut key = vec![0u64; self.used.len().div_ceil(64)];
        for (f, &u) in self.used.iter().enumerate() {
            if u {
                key[f / 64] |= 1 << (f % 64);
            }
        }
        key
    }

    /// Can the path ending at `last` still be completed to a `j` factor
    /// through unused factors that avoid `i`?
    fn can_finish(&mut self, last: FactorId) -> bool {
        let key = (last, self.used_key());
        if let Some(&r) = self.reach_memo.get(&key) {
            return r;
        }
        let mut seen = self.used.clone();
        let mut frontier = vec![last];
        let mut ok = false;
        'bfs: while let Some(f) = frontier.pop() {
            for &v in &self.g.factor(f).nodes {
                if v == self.i || v == self.j {
                    continue;
                }
                for &y in self.g.factors_of(v) {
                    if seen[y] || self.g.factor(y).contains(self.i) {
                        continue;
                    }
                    if self.g.factor(y).contains(self.j) {
                        ok = true;
                        break 'bfs;
                    }
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        self.reach_memo.insert(key, ok);
        ok
    }

    fn connector_sets(&self) -> Vec<Vec<NodeId>> {
        self.stack
            .windows(2)
            .map(|w| self.g.factor(w[0]).intersection(self.g.factor(w[1])))
            .collect()
    }

    fn extend(&mut self) {
        let last = *self.stack.last().expect("non-empty stack");
        if self.stack.len() == self.max_len {
            if self.can_finish(last) {
                self.truncated = true;
            }
            return;
        }
        if !self.can_finish(last) {
            return;
        }
        let mut candidates: Vec<FactorId> = self
            .g
            .factor(last)
            .nodes
            .iter()
            .filter(|&&v| v != self.i && v != self.j)
            .flat_map(|&v| self.g.factors_of(v).iter().copied())
            .filter(|&y| !self.used[y] && !self.g.factor(y).contains(self.i))
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        for y in candidates {
            self.stack.push(y);
            let sets = self.connector_sets();
            if let Some(reps) = distinct_representatives(&sets) {
                if self.g.factor(y).contains(self.j) {
                    self.out.push(IrreduciblePath { factors: self.stack.clone(), connectors: reps });
                } else {
                    self.used[y] = true;
                    self.extend();
                    self.used[y] = false;
                }
            }
            self.stack.pop();
        }
    }
}

/// All irreducible paths from `i` to `j` with at most `max_len` factors.
///
/// Without a cap every length is explored, which is only allowed for graphs
/// with at most [`EXHAUSTIVE_FACTOR_LIMIT`] factors.
pub fn enumerate_irreducible_paths(
    g: &FactorGraph,
    i: NodeId,
    j: NodeId,
    max_len: Option<usize>,
) -> Result<PathEnumeration, BoundError> {
    let n = g.num_nodes();
    if i >= n || j >= n {
        return Err(BoundError::InvalidParams(format!("nodes {i}, {j} out of range for N={n}")));
    }
    if i == j {
        return Err(BoundError::InvalidParams("paths need distinct endpoints".into()));
    }
    let max_len = match max_len {
        Some(l) => l.min(g.num_factors()),
        None if g.num_factors() > EXHAUSTIVE_FACTOR_LIMIT => {
            return Err(BoundError::NeedsLengthLimit(g.num_factors()))
        }
        None => g.num_factors(),
    };
    let mut s = Search {
        g,
        i,
        j,
        max_len,
        stack: Vec::new(),
        used: vec![false; g.num_factors()],
        out: Vec::new(),
        truncated: false,
        reach_memo: HashMap::new(),
    };
    if max_len > 0 {
        for &x in g.factors_of(i) {
            s.stack.push(x);
            if g.factor(x).contains(j) {
                s.out.push(IrreduciblePath { factors: vec![x], connectors: vec![] });
            } else {
                s.used[x] = true;
                s.extend();
                s.used[x] = false;
            }
            s.stack.pop();
        }
    }
    let truncated = s.truncated;
    Ok(PathEnumeration { paths: s.out, max_len, truncated })
}

/// Path weights grouped by length: `coeffs[l]` is the sum over length-`l`
/// paths of the product of factor norms along the path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPolynomial<T> {
    pub coeffs: Vec<T>,
    pub truncated: bool,
}

impl<T: Real> PathPolynomial<T> {
    pub fn new(wg: &WeightedFactorGraph<T>, i: NodeId, j: NodeId, max_len: Option<usize>) -> Result<Self, BoundError> {
        let e = enumerate_irreducible_paths(wg.graph(), i, j, max_len)?;
        let mut coeffs = vec![T::zero(); e.max_len + 1];
        for p in &e.paths {
            let w = p.factors.iter().fold(T::one(), |acc, &f| acc * wg.weight(f));
            coeffs[p.len()] = coeffs[p.len()] + w;
        }
        Ok(Self { coeffs, truncated: e.truncated })
    }

    /// `sum_l coeffs[l] (2|t|)^l / l!`.
    pub fn eval(&self, t: T) -> T {
        let x = T::lit(2.0) * t.abs();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, &c)| if c == T::zero() { T::zero() } else { c * pow_over_factorial(x, l) })
            .sum()
    }
}

/// Sum over irreducible paths of `(2|t|)^l / l!` times the product of factor norms.
pub fn theorem3_bound<T: Real>(wg: &WeightedFactorGraph<T>, i: NodeId, j: NodeId, t: T) -> Result<T, BoundError> {
    Ok(PathPolynomial::new(wg, i, j, None)?.eval(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{standard_graph, Factor, GraphKind};
    use proptest::prelude::*;

    #[test]
    fn chain_has_one_path() {
        let g = standard_graph(&GraphKind::Chain { n: 5 }).unwrap();
        let e = enumerate_irreducible_paths(&g, 0, 2, None).unwrap();
        assert_eq!(e.paths.len(), 1);
        assert_eq!(e.paths[0].factors, vec![0, 1]);
        assert_eq!(e.paths[0].connectors, vec![1]);
    }

    #[test]
    fn complete_pair_graph_counts() {
        let g = standard_graph(&GraphKind::Complete { n: 4, q: 2, m: 1 }).unwrap();
        let e = enumerate_irreducible_paths(&g, 0, 1, None).unwrap();
        assert_eq!(e.counts_by_length(), vec![0, 1, 2, 2, 0, 0, 0]);
        assert!(!e.truncated);
    }

    #[test]
    fn star_path_goes_through_hub() {
        let g = standard_graph(&GraphKind::Star { n: 4 }).unwrap();
        let e = enumerate_irreducible_paths(&g, 0, 1, None).unwrap();
        assert_eq!(e.paths.len(), 1);
        assert_eq!(e.paths[0].connectors, vec![3]);
    }

    #[test]
    fn chain_bound_value() {
        let wg = WeightedFactorGraph::uniform(standard_graph(&GraphKind::Chain { n: 5 }).unwrap(), 1.0f64);
        let b = theorem3_bound(&wg, 0, 2, 0.5).unwrap();
        assert!((b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn star_bound_value() {
        let a = 0.7f64;
        let t = 0.3;
        let wg = WeightedFactorGraph::uniform(standard_graph(&GraphKind::Star { n: 6 }).unwrap(), a);
        let b = theorem3_bound(&wg, 0, 1, t).unwrap();
        assert!((b - 2.0 * a * a * t * t).abs() < 1e-15);
    }

    #[test]
    fn shared_connector_is_rejected() {
        // Three factors meeting only at node 1 cannot form a length-3 path.
        let fs = vec![Factor::new(vec![0, 1], 0), Factor::new(vec![1, 2], 0), Factor::new(vec![1, 3], 0)];
        let g = FactorGraph::new(4, fs).unwrap();
        let e = enumerate_irreducible_paths(&g, 0, 3, None).unwrap();
        assert_eq!(e.paths.len(), 1);
        assert_eq!(e.paths[0].factors, vec![0, 2]);
    }

    #[test]
    fn cap_reports_truncation() {
        let g = standard_graph(&GraphKind::Chain { n: 6 }).unwrap();
        let e = enumerate_irreducible_paths(&g, 0, 5, Some(3)).unwrap();
        assert!(e.paths.is_empty() && e.truncated);
        let full = enumerate_irreducible_paths(&g, 0, 5, Some(5)).unwrap();
        assert!(!full.truncated && full.paths.len() == 1);
    }

    #[test]
    fn large_graph_needs_cap() {
        let g = standard_graph(&GraphKind::Chain { n: 30 }).unwrap();
        assert!(matches!(enumerate_irreducible_paths(&g, 0, 3, None), Err(BoundError::NeedsLengthLimit(29))));
        assert!(enumerate_irreducible_paths(&g, 0, 3, Some(29)).is_ok());
    }

    /// Independent check: every factor sequence of bounded length, tested
    /// against the definition directly.
    fn brute_force_paths(g: &FactorGraph, i: NodeId, j: NodeId) -> Vec<Vec<FactorId>> {
        fn sdr_exists(sets: &[Vec<NodeId>], used: &mut Vec<NodeId>) -> bool {
            match sets.split_first() {
                None => true,
                Some((first, rest)) => first.iter().any(|&v| {
                    if used.contains(&v) {
                        return false;
                    }
                    used.push(v);
                    let ok = sdr_exists(rest, used);
                    used.pop();
                    ok
                }),
            }
        }
        let nf = g.num_factors();
        let mut out = Vec::new();
        let mut seq: Vec<FactorId> = Vec::new();
        fn rec(g: &FactorGraph, i: NodeId, j: NodeId, nf: usize, seq: &mut Vec<FactorId>, out: &mut Vec<Vec<FactorId>>) {
            if !seq.is_empty() {
                let l = seq.len();
                let ok = g.factor(seq[0]).contains(i)
                    && seq[1..].iter().all(|&x| !g.factor(x).contains(i))
                    && g.factor(seq[l - 1]).contains(j)
                    && seq[..l - 1].iter().all(|&x| !g.factor(x).contains(j))
                    && seq.windows(2).all(|w| g.factor(w[0]).intersects(g.factor(w[1])));
                let sets: Vec<Vec<NodeId>> = seq
                    .windows(2)
                    .map(|w| {
                        g.factor(w[0])
                            .intersection(g.factor(w[1]))
                            .into_iter()
                            .filter(|&v| v != i && v != j)
                            .collect()
                    })
                    .collect();
                if ok && sdr_exists(&sets, &mut Vec::new()) {
                    out.push(seq.clone());
                }
            }
            if seq.len() == nf {
                return;
            }
            for x in 0..nf {
                if !seq.contains(&x) {
                    seq.push(x);
                    rec(g, i, j, nf, seq, out);
                    seq.pop();
                }
            }
        }
        rec(g, i, j, nf, &mut seq, &mut out);
        out.sort();
        out
    }

    fn arb_small_graph() -> impl Strategy<Value = FactorGraph> {
        (3usize..6).prop_flat_map(|n| {
            prop::collection::btree_set((prop::collection::btree_set(0..n, 2..=3), 0u32..2), 1..7).prop_map(move |fs| {
                let fs: Vec<Factor> = fs.into_iter().map(|(s, fl)| Factor::new(s.into_iter().collect(), fl)).collect();
                let mut dedup = fs.clone();
                dedup.sort();
                dedup.dedup();
                FactorGraph::new(n, dedup).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn enumeration_matches_brute_force(g in arb_small_graph()) {
            let (i, j) = (0, g.num_nodes() - 1);
            let mut got: Vec<Vec<FactorId>> = enumerate_irreducible_paths(&g, i, j, None)
                .unwrap()
                .paths
                .into_iter()
                .map(|p| p.factors)
                .collect();
            got.sort();
            prop_assert_eq!(got, brute_force_paths(&g, i, j));
        }

        #[test]
        fn paths_satisfy_invariants(g in arb_small_graph()) {
            let (i, j) = (0, g.num_nodes() - 1);
            for p in enumerate_irreducible_paths(&g, i, j, None).unwrap().paths {
                let l = p.len();
                prop_assert!(g.factor(p.factors[0]).contains(i));
                prop_assert!(g.factor(p.factors[l - 1]).contains(j));
                let mut c = p.connectors.clone();
                c.sort_unstable();
                c.dedup();
                prop_assert_eq!(c.len(), l - 1);
                for (k, &v) in p.connectors.iter().enumerate() {
                    prop_assert!(g.factor(p.factors[k]).contains(v) && g.factor(p.factors[k + 1]).contains(v));
                    prop_assert!(v != i && v != j);
                }
            }
        }

        #[test]
        fn bound_monotone_in_time(g in arb_small_graph(), t1 in 0.0f64..2.0, dt in 0.0f64..2.0) {
            let wg = WeightedFactorGraph::uniform(g, 0.8);
            let j = wg.graph().num_nodes() - 1;
            let a = theorem3_bound(&wg, 0, j, t1).unwrap();
            let b = theorem3_bound(&wg, 0, j, t1 + dt).unwrap();
            prop_assert!(b >= a);
        }
    }
}
