//! Two-sided sequences `(i, X_1, ..., X_n)` read from both ends: the right
//! tree grows from `X_1` onwards, the left tree from `X_n` backwards.

use std::collections::{BTreeMap, BTreeSet};

use crate::causal::forest::{connector_candidates, grow, irreducible_path_of_tree, Attach, CausalForest};
use crate::causal::single::forbidden_vertices_single;
use crate::causal::CausalError;
use crate::graph::{FactorGraph, FactorId, NodeId};

/// Largest factor set the exhaustive routines accept.
pub const PAIR_FACTOR_LIMIT: usize = 8;
/// Connector assignments tried per causal graph before falling back to the
/// first candidate everywhere.
pub const EMBEDDING_SEARCH_LIMIT: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalTreePair {
    pub root: NodeId,
    pub target: NodeId,
    pub seq: Vec<FactorId>,
    pub left: CausalForest,
    pub right: CausalForest,
}

impl CausalTreePair {
    pub fn factor_set(&self) -> BTreeSet<FactorId> {
        self.right.factor_set()
    }

    pub fn num_factors(&self) -> usize {
        self.right.len()
    }

    /// Both trees have the same shape as in `other`.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.target == other.target && self.left.same_shape(&other.left) && self.right.same_shape(&other.right)
    }

    fn restrict(&self, keep: &BTreeSet<FactorId>) -> Self {
        Self {
            root: self.root,
            target: self.target,
            seq: self.seq.iter().copied().filter(|f| keep.contains(f)).collect(),
            left: self.left.restrict(keep),
            right: self.right.restrict(keep),
        }
    }

    /// Factors reached from `f` by following parents in either tree.
    pub fn closure(&self, f: FactorId) -> BTreeSet<FactorId> {
        let mut out = BTreeSet::from([f]);
        let mut stack = vec![f];
        while let Some(x) = stack.pop() {
            for t in [&self.left, &self.right] {
                if let Attach::Factor(p) = t.parent[&x] {
                    if out.insert(p) {
                        stack.push(p);
                    }
                }
            }
        }
        out
    }

    pub fn target_factors<'a>(&'a self, g: &'a FactorGraph) -> impl Iterator<Item = FactorId> + 'a {
        self.right.order.iter().copied().filter(move |&f| g.factor(f).contains(self.target))
    }
}

fn validate(g: &FactorGraph, i: NodeId, j: NodeId, seq: &[FactorId]) -> Result<(), CausalError> {
    for v in [i, j] {
        if v >= g.num_nodes() {
            return Err(CausalError::UnknownNode(v));
        }
    }
    if let Some(&bad) = seq.iter().find(|&&x| x >= g.num_factors()) {
        return Err(CausalError::UnknownFactor(bad));
    }
    Ok(())
}

fn multiplicities(seq: &[FactorId]) -> BTreeMap<FactorId, usize> {
    let mut m = BTreeMap::new();
    for &x in seq {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

/// Checks membership of the two-sided sequence: every factor at least
/// twice, some factor contains `j`, and both readings creep from `i`.
pub fn build_causal_tree_pair(g: &FactorGraph, i: NodeId, j: NodeId, seq: &[FactorId]) -> Result<CausalTreePair, CausalError> {
    validate(g, i, j, seq)?;
    if let Some((&x, _)) = multiplicities(seq).iter().find(|(_, &c)| c < 2) {
        return Err(CausalError::UnrepeatedFactor(x));
    }
    if !seq.iter().any(|&x| g.factor(x).contains(j)) {
        return Err(CausalError::TargetAbsent);
    }
    let right = grow(g, i, seq);
    let rev: Vec<FactorId> = seq.iter().rev().copied().collect();
    let left = grow(g, i, &rev);
    if !right.is_tree() || !left.is_tree() {
        return Err(CausalError::NotCreeping);
    }
    Ok(CausalTreePair { root: i, target: j, seq: seq.to_vec(), left, right })
}

/// Every factor containing `j` pulls in the whole pair through parents.
pub fn is_irreducible(g: &FactorGraph, pair: &CausalTreePair) -> bool {
    let all = pair.factor_set();
    pair.target_factors(g).all(|f| pair.closure(f) == all)
}

/// Factor subsets that carry a valid sub-pair: closed under parents in both
/// trees and containing a factor with `j`. Inclusion-minimal ones, sorted
/// by size and then lexicographically.
pub fn minimal_subpairs(g: &FactorGraph, pair: &CausalTreePair) -> Vec<BTreeSet<FactorId>> {
    let mut cands: Vec<BTreeSet<FactorId>> = pair.target_factors(g).map(|f| pair.closure(f)).collect();
    cands.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
    cands.dedup();
    let mut out: Vec<BTreeSet<FactorId>> = Vec::new();
    for c in cands {
        if !out.iter().any(|m| m.is_subset(&c)) {
            out.push(c);
        }
    }
    out
}

/// Drops factors until the pair is irreducible. When several minimal
/// sub-pairs exist the smallest, then lexicographically first, is kept.
pub fn reduce_to_irreducible_pair(g: &FactorGraph, pair: &CausalTreePair) -> Result<CausalTreePair, CausalError> {
    if pair.num_factors() > PAIR_FACTOR_LIMIT {
        return Err(CausalError::TooLarge(format!("{} factors", pair.num_factors())));
    }
    let keep = minimal_subpairs(g, pair).into_iter().next().ok_or(CausalError::TargetAbsent)?;
    Ok(pair.restrict(&keep))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingCounts {
    pub n_left: u64,
    pub n_right: u64,
    /// Orderings using each factor exactly twice whose two trees match.
    pub psi: u64,
    /// `(2l)! / (l!)^2 * n_left * n_right`.
    pub bound: u128,
}

impl OrderingCounts {
    pub fn holds(&self) -> bool {
        (self.psi as u128) <= self.bound
    }
}

/// Number of orderings of the factors of `tree`, each once, that grow into
/// a tree of the same shape.
pub fn creeping_orderings(g: &FactorGraph, tree: &CausalForest) -> u64 {
    fn rec(g: &FactorGraph, tree: &CausalForest, seq: &mut Vec<FactorId>, left: &mut Vec<FactorId>) -> u64 {
        if left.is_empty() {
            return 1;
        }
        let mut total = 0;
        for k in 0..left.len() {
            let x = left[k];
            // Parent under the prefix must be the parent in `tree`.
            let fx = g.factor(x);
            let attach = if fx.contains(tree.root) {
                Attach::Root
            } else if let Some(&p) = seq.iter().find(|&&p| g.factor(p).intersects(fx)) {
                Attach::Factor(p)
            } else {
                Attach::Isolated
            };
            if attach != tree.parent[&x] {
                continue;
            }
            left.swap_remove(k);
            seq.push(x);
            total += rec(g, tree, seq, left);
            seq.pop();
            left.push(x);
            let last = left.len() - 1;
            left.swap(k, last);
        }
        total
    }
    let mut left = tree.order.clone();
    rec(g, tree, &mut Vec::new(), &mut left)
}

/// Calls `f` on every sequence using each factor of `set` exactly twice
/// whose forward reading grows into `right` (checked as it is built).
fn for_each_doubled_ordering(g: &FactorGraph, right: &CausalForest, mut f: impl FnMut(&[FactorId])) {
    let set: Vec<FactorId> = right.order.clone();
    let mut remaining: BTreeMap<FactorId, u8> = set.iter().map(|&x| (x, 2)).collect();
    let mut seq = Vec::with_capacity(2 * set.len());
    fn rec(
        g: &FactorGraph,
        right: &CausalForest,
        set: &[FactorId],
        remaining: &mut BTreeMap<FactorId, u8>,
        seq: &mut Vec<FactorId>,
        f: &mut dyn FnMut(&[FactorId]),
    ) {
        if seq.len() == 2 * set.len() {
            f(seq);
            return;
        }
        for &x in set {
            let r = remaining[&x];
            if r == 0 {
                continue;
            }
            if r == 2 {
                let fx = g.factor(x);
                let attach = if fx.contains(right.root) {
                    Attach::Root
                } else {
                    let mut seen = BTreeSet::new();
                    let mut a = Attach::Isolated;
                    for &p in seq.iter() {
                        if seen.insert(p) && g.factor(p).intersects(fx) {
                            a = Attach::Factor(p);
                            break;
                        }
                    }
                    a
                };
                if attach != right.parent[&x] {
                    continue;
                }
            }
            remaining.insert(x, r - 1);
            seq.push(x);
            rec(g, right, set, remaining, seq, f);
            seq.pop();
            remaining.insert(x, r);
        }
    }
    rec(g, right, &set, &mut remaining, &mut seq, &mut f);
}

fn central_binomial(l: usize) -> u128 {
    // (2l)! / (l!)^2
    let mut c: u128 = 1;
    for k in 0..l as u128 {
        c = c * (2 * l as u128 - k) / (k + 1);
    }
    c
}

pub fn count_orderings(g: &FactorGraph, pair: &CausalTreePair) -> Result<OrderingCounts, CausalError> {
    let l = pair.num_factors();
    if l > PAIR_FACTOR_LIMIT {
        return Err(CausalError::TooLarge(format!("{l} factors")));
    }
    let n_left = creeping_orderings(g, &pair.left);
    let n_right = creeping_orderings(g, &pair.right);
    let mut psi = 0u64;
    for_each_doubled_ordering(g, &pair.right, |s| {
        let rev: Vec<FactorId> = s.iter().rev().copied().collect();
        if grow(g, pair.root, &rev).same_shape(&pair.left) {
            psi += 1;
        }
    });
    let bound = central_binomial(l) * n_left as u128 * n_right as u128;
    Ok(OrderingCounts { n_left, n_right, psi, bound })
}

/// All doubled orderings of the factors of `pair` with the same two trees.
pub fn psi_orderings(g: &FactorGraph, pair: &CausalTreePair) -> Result<Vec<Vec<FactorId>>, CausalError> {
    if pair.num_factors() > PAIR_FACTOR_LIMIT {
        return Err(CausalError::TooLarge(format!("{} factors", pair.num_factors())));
    }
    let mut out = Vec::new();
    for_each_doubled_ordering(g, &pair.right, |s| {
        let rev: Vec<FactorId> = s.iter().rev().copied().collect();
        if grow(g, pair.root, &rev).same_shape(&pair.left) {
            out.push(s.to_vec());
        }
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalGraphProps {
    pub genus: usize,
    /// Nodes of the ambient graph.
    pub num_graph_nodes: usize,
    pub num_factors: usize,
    /// Vertices (nodes and factors) of degree above two in the union, the
    /// left tree and the right tree.
    pub high_degree_union: usize,
    pub high_degree_left: usize,
    pub high_degree_right: usize,
    /// Chosen connector per tree edge, `(factor, node)` pairs.
    pub edges: BTreeSet<(FactorId, NodeId)>,
    pub prop13: bool,
    pub prop14: bool,
    pub prop15: bool,
}

fn tree_edges(g: &FactorGraph, tree: &CausalForest, j: NodeId, choice: &[NodeId]) -> BTreeSet<(FactorId, NodeId)> {
    let mut e = BTreeSet::new();
    for (&x, &c) in tree.order.iter().zip(choice) {
        e.insert((x, c));
        if let Attach::Factor(p) = tree.parent[&x] {
            e.insert((p, c));
        }
    }
    if let Some(f) = tree.first_containing(g, j) {
        e.insert((f, j));
    }
    e
}

fn genus_of(edges: &BTreeSet<(FactorId, NodeId)>) -> usize {
    let nodes: BTreeSet<NodeId> = edges.iter().map(|e| e.1).collect();
    let factors: BTreeSet<FactorId> = edges.iter().map(|e| e.0).collect();
    (edges.len() + 1).saturating_sub(nodes.len() + factors.len())
}

fn high_degree(edges: &BTreeSet<(FactorId, NodeId)>) -> usize {
    let mut fdeg: BTreeMap<FactorId, usize> = BTreeMap::new();
    let mut vdeg: BTreeMap<NodeId, usize> = BTreeMap::new();
    for &(f, v) in edges {
        *fdeg.entry(f).or_insert(0) += 1;
        *vdeg.entry(v).or_insert(0) += 1;
    }
    fdeg.values().chain(vdeg.values()).filter(|&&d| d > 2).count()
}

/// Embeds both trees in the graph, picking connector nodes so that the
/// union has the least genus (first such assignment in lexicographic
/// order), and evaluates the genus and degree statements on it.
pub fn causal_graph_props(g: &FactorGraph, pair: &CausalTreePair) -> Result<CausalGraphProps, CausalError> {
    if !is_irreducible(g, pair) {
        return Err(CausalError::NotIrreducible);
    }
    let cands: Vec<Vec<NodeId>> = pair
        .right
        .order
        .iter()
        .map(|&x| connector_candidates(g, &pair.right, x))
        .chain(pair.left.order.iter().map(|&x| connector_candidates(g, &pair.left, x)))
        .collect();
    let nr = pair.right.len();
    let total = cands.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len().max(1)));
    let exhaustive = total.is_some_and(|t| t <= EMBEDDING_SEARCH_LIMIT);
    let mut idx = vec![0usize; cands.len()];
    let mut best: Option<(usize, BTreeSet<_>, BTreeSet<_>, BTreeSet<_>)> = None;
    loop {
        let choice: Vec<NodeId> = idx.iter().zip(&cands).map(|(&k, c)| c[k]).collect();
        let er = tree_edges(g, &pair.right, pair.target, &choice[..nr]);
        let el = tree_edges(g, &pair.left, pair.target, &choice[nr..]);
        let union: BTreeSet<_> = er.union(&el).copied().collect();
        let genus = genus_of(&union);
        if best.as_ref().map_or(true, |b| genus < b.0) {
            best = Some((genus, union, el, er));
        }
        if !exhaustive || genus == 0 {
            break;
        }
        let mut k = idx.len();
        let mut done = true;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] < cands[k].len() {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if done {
            break;
        }
    }
    let (genus, union, el, er) = best.expect("at least one assignment");
    let n = g.num_nodes();
    let (hu, hl, hr) = (high_degree(&union), high_degree(&el), high_degree(&er));
    let nf = pair.num_factors();
    Ok(CausalGraphProps {
        genus,
        num_graph_nodes: n,
        num_factors: nf,
        high_degree_union: hu,
        high_degree_left: hl,
        high_degree_right: hr,
        edges: union,
        prop13: genus < n.max(1),
        prop14: hu <= 2 * genus && hl <= 2 * genus && hr <= 2 * genus,
        prop15: genus == 0 || nf > genus,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForbiddenVariant {
    Standard,
    Primed,
}

/// Forbidden nodes and factors for each slot `k = 0..=len(psi)`; slot `k`
/// sits after the `k`-th factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenSets {
    pub vertices: Vec<BTreeSet<NodeId>>,
    pub factors: Vec<BTreeSet<FactorId>>,
}

/// First and last one-based positions of each factor in `psi`.
fn positions(psi: &[FactorId]) -> BTreeMap<FactorId, (usize, usize)> {
    let mut m = BTreeMap::new();
    for (p, &x) in psi.iter().enumerate() {
        m.entry(x).and_modify(|e: &mut (usize, usize)| e.1 = p + 1).or_insert((p + 1, p + 1));
    }
    m
}

pub fn forbidden_sets_pair(
    g: &FactorGraph,
    i: NodeId,
    j: NodeId,
    psi: &[FactorId],
    variant: ForbiddenVariant,
) -> Result<ForbiddenSets, CausalError> {
    validate(g, i, j, psi)?;
    if let Some((&x, &c)) = multiplicities(psi).iter().find(|(_, &c)| c != 2) {
        return Err(CausalError::InvalidOrdering(format!("factor {x} appears {c} times")));
    }
    let pair = build_causal_tree_pair(g, i, j, psi).map_err(|e| CausalError::InvalidOrdering(e.to_string()))?;
    let n = psi.len();
    let pos = positions(psi);
    let j_pos: Vec<usize> = (1..=n).filter(|&p| g.factor(psi[p - 1]).contains(j)).collect();
    let (min_j, max_j) = (j_pos[0], *j_pos.last().expect("target present"));

    let vertices: Vec<BTreeSet<NodeId>> = match variant {
        ForbiddenVariant::Standard => (0..=n)
            .map(|k| {
                let mut v = BTreeSet::new();
                let seen_before: BTreeSet<NodeId> =
                    psi[..k].iter().flat_map(|&x| g.factor(x).nodes.iter().copied()).collect();
                let seen_after: BTreeSet<NodeId> =
                    psi[k..].iter().flat_map(|&x| g.factor(x).nodes.iter().copied()).collect();
                for (&x, &(lo, hi)) in &pos {
                    for &u in &g.factor(x).nodes {
                        if u == i {
                            continue;
                        }
                        if lo > k + 1 && !seen_before.contains(&u) {
                            v.insert(u);
                        }
                        if hi < k && !seen_after.contains(&u) {
                            v.insert(u);
                        }
                    }
                }
                if k < min_j || k >= max_j {
                    v.insert(j);
                }
                v
            })
            .collect(),
        ForbiddenVariant::Primed => {
            let gr = irreducible_path_of_tree(g, &pair.right, j)?;
            let gl = irreducible_path_of_tree(g, &pair.left, j)?;
            let first = |x: FactorId| pos[&x].0;
            (0..=n)
                .map(|k| -> Result<BTreeSet<NodeId>, CausalError> {
                    if min_j <= k && k < max_j {
                        return Ok(BTreeSet::new());
                    }
                    for p in 0..gr.len() {
                        let lo = if p == 0 { 0 } else { first(gr[p - 1]) };
                        if lo <= k && k < first(gr[p]) {
                            return forbidden_vertices_single(g, &gr, j, p);
                        }
                    }
                    let ll = gl.len();
                    if ll >= 2 && pos[&gl[ll - 1]].1 <= k && k < first(gl[ll - 2]) {
                        return Ok(BTreeSet::from([j]));
                    }
                    for p in 0..ll {
                        let hi = if p == 0 { n + 1 } else { first(gl[p - 1]) };
                        if first(gl[p]) <= k && k < hi {
                            return forbidden_vertices_single(g, &gl, j, p);
                        }
                    }
                    Ok(BTreeSet::new())
                })
                .collect::<Result<_, _>>()?
        }
    };
    let factors = vertices
        .iter()
        .enumerate()
        .map(|(k, v)| {
            (0..g.num_factors())
                .filter(|&x| {
                    g.factor(x).nodes.iter().any(|u| v.contains(u))
                        || pos.get(&x).is_some_and(|&(lo, hi)| lo > k || hi <= k)
                })
                .collect()
        })
        .collect();
    Ok(ForbiddenSets { vertices, factors })
}
