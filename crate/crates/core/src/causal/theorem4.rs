//! Brute-force evaluation of the disorder-averaged bound: a sum over
//! irreducible tree pairs and their doubled orderings.

use rayon::prelude::*;

use crate::causal::pair::{build_causal_tree_pair, is_irreducible};
use crate::causal::CausalError;
use crate::graph::{FactorGraph, FactorId, NodeId, WeightedFactorGraph};

pub const FACTOR_LIMIT: usize = 12;
pub const SHELL_LIMIT: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem4Report {
    /// Sum over every projector position `r` of `1 / (r! (2l - r)!)`.
    pub value: f64,
    /// Contribution of the balanced split `r = l` only.
    pub balanced: f64,
    /// `value` broken down by the number `l` of distinct factors.
    pub shells: Vec<f64>,
    pub last_shell: f64,
    pub l_max: usize,
    /// Doubled orderings counted, per shell.
    pub orderings: Vec<u64>,
    /// Larger shells exist that were not summed.
    pub truncated: bool,
}

/// Orderings of `set`, each factor twice, whose forward reading creeps and
/// whose backward reading creeps, forming an irreducible pair.
fn count_valid(g: &FactorGraph, i: NodeId, j: NodeId, set: &[FactorId]) -> u64 {
    fn rec(
        g: &FactorGraph,
        i: NodeId,
        j: NodeId,
        set: &[FactorId],
        rem: &mut [u8],
        seq: &mut Vec<FactorId>,
        count: &mut u64,
    ) {
        if seq.len() == 2 * set.len() {
            if let Ok(p) = build_causal_tree_pair(g, i, j, seq) {
                if is_irreducible(g, &p) {
                    *count += 1;
                }
            }
            return;
        }
        for k in 0..set.len() {
            if rem[k] == 0 {
                continue;
            }
            let x = set[k];
            if rem[k] == 2 {
                let fx = g.factor(x);
                if !fx.contains(i) && !seq.iter().any(|&p| g.factor(p).intersects(fx)) {
                    continue;
                }
            }
            rem[k] -= 1;
            seq.push(x);
            rec(g, i, j, set, rem, seq, count);
            seq.pop();
            rem[k] += 1;
        }
    }
    let mut rem = vec![2u8; set.len()];
    let mut count = 0;
    rec(g, i, j, set, &mut rem, &mut Vec::new(), &mut count);
    count
}

/// Factor subsets of size `l` that are connected to `i` and contain `j`.
fn candidate_sets(g: &FactorGraph, i: NodeId, j: NodeId, l: usize) -> Vec<Vec<FactorId>> {
    let nf = g.num_factors();
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..l).collect();
    if l > nf {
        return out;
    }
    loop {
        let set: Vec<FactorId> = pick.clone();
        let has_j = set.iter().any(|&x| g.factor(x).contains(j));
        if has_j && connected(g, i, &set) {
            out.push(set);
        }
        // Next combination.
        let mut k = l;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if pick[k] < nf - l + k {
                pick[k] += 1;
                for m in k + 1..l {
                    pick[m] = pick[m - 1] + 1;
                }
                break;
            }
        }
    }
}

fn connected(g: &FactorGraph, i: NodeId, set: &[FactorId]) -> bool {
    let mut reached = vec![i];
    let mut left: Vec<FactorId> = set.to_vec();
    loop {
        let before = left.len();
        left.retain(|&x| {
            if g.factor(x).nodes.iter().any(|v| reached.contains(v)) {
                reached.extend(g.factor(x).nodes.iter().copied());
                false
            } else {
                true
            }
        });
        if left.is_empty() {
            return true;
        }
        if left.len() == before {
            return false;
        }
    }
}

/// Sums `prod_X (2 J_X t)^2 / (r! (2l - r)!)` over irreducible pairs with at
/// most `l_max` distinct factors, every doubled ordering of them, and every
/// projector position `r`. Factor weights are the standard deviations `J_X`.
pub fn theorem4_bound_bruteforce(
    wg: &WeightedFactorGraph<f64>,
    i: NodeId,
    j: NodeId,
    t: f64,
    l_max: usize,
) -> Result<Theorem4Report, CausalError> {
    let g = wg.graph();
    for v in [i, j] {
        if v >= g.num_nodes() {
            return Err(CausalError::UnknownNode(v));
        }
    }
    if i == j {
        return Err(CausalError::SameNode);
    }
    if g.num_factors() > FACTOR_LIMIT || l_max > SHELL_LIMIT {
        return Err(CausalError::TooLarge(format!("{} factors, l_max {l_max}", g.num_factors())));
    }
    let l_top = l_max.min(g.num_factors());
    let mut shells = vec![0.0; l_top + 1];
    let mut balanced = 0.0;
    let mut orderings = vec![0u64; l_top + 1];
    for l in 1..=l_top {
        let sets = candidate_sets(g, i, j, l);
        let counts: Vec<u64> = sets.par_iter().map(|s| count_valid(g, i, j, s)).collect();
        // (2l)! and l! for the split weights.
        let f2l: f64 = (1..=2 * l).map(|k| k as f64).product();
        let fl: f64 = (1..=l).map(|k| k as f64).product();
        let all_splits = 4f64.powi(l as i32) / f2l;
        for (s, &c) in sets.iter().zip(&counts) {
            if c == 0 {
                continue;
            }
            let w: f64 = s.iter().map(|&x| (2.0 * wg.weight(x) * t).powi(2)).product();
            shells[l] += c as f64 * w * all_splits;
            balanced += c as f64 * w / (fl * fl);
            orderings[l] += c;
        }
    }
    let value = shells.iter().sum();
    Ok(Theorem4Report {
        value,
        balanced,
        last_shell: *shells.last().unwrap_or(&0.0),
        shells,
        l_max,
        orderings,
        truncated: l_max < g.num_factors(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::for_each_word;
    use crate::graph::{standard_graph, Factor, GraphKind};
    use approx::assert_relative_eq;

    /// Oracle: walk every word of length 2l and keep irreducible pairs
    /// that use each factor exactly twice.
    fn word_oracle(wg: &WeightedFactorGraph<f64>, i: NodeId, j: NodeId, t: f64, l_max: usize) -> f64 {
        let g = wg.graph();
        let mut total = 0.0;
        for l in 1..=l_max {
            let f2l: f64 = (1..=2 * l).map(|k| k as f64).product();
            for_each_word(g.num_factors(), 2 * l, |w| {
                let mut counts = vec![0; g.num_factors()];
                for &x in w {
                    counts[x] += 1;
                }
                if counts.iter().any(|&c| c != 0 && c != 2) {
                    return;
                }
                if let Ok(p) = build_causal_tree_pair(g, i, j, w) {
                    if is_irreducible(g, &p) {
                        let prod: f64 = p.factor_set().iter().map(|&x| (2.0 * wg.weight(x) * t).powi(2)).product();
                        // sum_r 1 / (r! (2l-r)!) = 2^(2l) / (2l)!
                        total += prod * 4f64.powi(l as i32) / f2l;
                    }
                }
            });
        }
        total
    }

    #[test]
    fn single_factor() {
        let g = FactorGraph::new(2, vec![Factor::new(vec![0, 1], 0)]).unwrap();
        let jv: f64 = 0.7;
        let wg = WeightedFactorGraph::new(g, vec![jv]).unwrap();
        let t = 0.3;
        let rep = theorem4_bound_bruteforce(&wg, 0, 1, t, 3).unwrap();
        assert_relative_eq!(rep.balanced, 4.0 * jv * jv * t * t, max_relative = 1e-14);
        assert_relative_eq!(rep.value, 8.0 * jv * jv * t * t, max_relative = 1e-14);
        assert_eq!(rep.orderings[1], 1);
        assert!(!rep.truncated);
        assert_eq!(theorem4_bound_bruteforce(&wg, 0, 1, 0.0, 3).unwrap().value, 0.0);
        assert_eq!(theorem4_bound_bruteforce(&wg, 0, 0, 0.3, 3), Err(CausalError::SameNode));
    }

    #[test]
    fn two_factor_chain() {
        let g = standard_graph(&GraphKind::Chain { n: 3 }).unwrap();
        let wg = WeightedFactorGraph::new(g, vec![0.5, 1.5]).unwrap();
        let t = 0.4;
        let rep = theorem4_bound_bruteforce(&wg, 0, 2, t, 2).unwrap();
        let path = (2.0 * 0.5 * t as f64).powi(2) * (2.0 * 1.5 * t as f64).powi(2);
        assert!(rep.balanced >= path / 4.0);
        assert!(rep.value >= path / 4.0);
        assert_relative_eq!(rep.value, word_oracle(&wg, 0, 2, t, 2), max_relative = 1e-13);
    }

    #[test]
    fn matches_word_oracle() {
        let graphs = vec![
            standard_graph(&GraphKind::Star { n: 4 }).unwrap(),
            FactorGraph::new(
                4,
                vec![Factor::new(vec![0, 1], 0), Factor::new(vec![0, 2], 0), Factor::new(vec![1, 3], 0), Factor::new(vec![2, 3], 0)],
            )
            .unwrap(),
            FactorGraph::new(4, vec![Factor::new(vec![0, 1, 2], 0), Factor::new(vec![1, 3], 0), Factor::new(vec![2, 3], 0)]).unwrap(),
        ];
        for g in graphs {
            let nf = g.num_factors();
            let w: Vec<f64> = (0..nf).map(|k| 0.4 + 0.3 * k as f64).collect();
            let wg = WeightedFactorGraph::new(g, w).unwrap();
            for j in 1..4 {
                let rep = theorem4_bound_bruteforce(&wg, 0, j, 0.5, 3).unwrap();
                assert_relative_eq!(rep.value, word_oracle(&wg, 0, j, 0.5, 3), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn monotone_in_shells() {
        let g = standard_graph(&GraphKind::Star { n: 4 }).unwrap();
        let wg = WeightedFactorGraph::uniform(g, 1.0);
        let mut prev = 0.0;
        for l in 1..=3 {
            let v = theorem4_bound_bruteforce(&wg, 0, 1, 0.5, l).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }
}
