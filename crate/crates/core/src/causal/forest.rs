use std::collections::{BTreeMap, BTreeSet};

use crate::causal::CausalError;
use crate::graph::{FactorGraph, FactorId, NodeId};

/// Where a factor hangs in a causal forest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attach {
    /// Contains the root node.
    Root,
    /// Child of the earliest earlier factor it meets.
    Factor(FactorId),
    /// Meets nothing that came before; starts a new component.
    Isolated,
}

/// Forest grown by reading a factor sequence from the root outwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalForest {
    pub root: NodeId,
    /// Distinct factors in order of first appearance.
    pub order: Vec<FactorId>,
    pub parent: BTreeMap<FactorId, Attach>,
}

impl CausalForest {
    pub fn components(&self) -> usize {
        1 + self.parent.values().filter(|a| **a == Attach::Isolated).count()
    }

    /// One component: the sequence creeps out from the root.
    pub fn is_tree(&self) -> bool {
        self.components() == 1
    }

    pub fn factor_set(&self) -> BTreeSet<FactorId> {
        self.order.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Same root and same parent relation; the order siblings were added in
    /// does not matter.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.root == other.root && self.parent == other.parent
    }

    pub fn first_containing(&self, g: &FactorGraph, v: NodeId) -> Option<FactorId> {
        self.order.iter().copied().find(|&f| g.factor(f).contains(v))
    }

    pub fn children(&self, f: Option<FactorId>) -> Vec<FactorId> {
        let want = match f {
            None => Attach::Root,
            Some(p) => Attach::Factor(p),
        };
        self.order.iter().copied().filter(|x| self.parent[x] == want).collect()
    }

    /// Keeps only `keep`, which must be closed under taking parents.
    pub fn restrict(&self, keep: &BTreeSet<FactorId>) -> Self {
        let order: Vec<FactorId> = self.order.iter().copied().filter(|f| keep.contains(f)).collect();
        let parent = order.iter().map(|&f| (f, self.parent[&f])).collect();
        Self { root: self.root, order, parent }
    }

    /// Factors on the way from `f` up to the root, `f` first.
    pub fn ancestors(&self, f: FactorId) -> Vec<FactorId> {
        let mut out = vec![f];
        let mut cur = f;
        while let Attach::Factor(p) = self.parent[&cur] {
            out.push(p);
            cur = p;
        }
        out
    }
}

/// Grows the causal forest of `(root, seq...)`.
pub fn build_causal_forest(g: &FactorGraph, root: NodeId, seq: &[FactorId]) -> Result<CausalForest, CausalError> {
    if let Some(&bad) = seq.iter().find(|&&x| x >= g.num_factors()) {
        return Err(CausalError::UnknownFactor(bad));
    }
    Ok(grow(g, root, seq))
}

pub(crate) fn grow(g: &FactorGraph, root: NodeId, seq: &[FactorId]) -> CausalForest {
    let mut order: Vec<FactorId> = Vec::new();
    let mut parent = BTreeMap::new();
    for &x in seq {
        if parent.contains_key(&x) {
            continue;
        }
        let fx = g.factor(x);
        let attach = if fx.contains(root) {
            Attach::Root
        } else if let Some(&p) = order.iter().find(|&&p| g.factor(p).intersects(fx)) {
            Attach::Factor(p)
        } else {
            Attach::Isolated
        };
        parent.insert(x, attach);
        order.push(x);
    }
    CausalForest { root, order, parent }
}

/// False for sequences naming factors outside `g`.
pub fn is_creeping(g: &FactorGraph, root: NodeId, seq: &[FactorId]) -> bool {
    build_causal_forest(g, root, seq).map(|f| f.is_tree()).unwrap_or(false)
}

/// The factors leading from the root to `j`, ending at the first factor
/// (in order of appearance) that contains `j`.
pub fn irreducible_path_of_tree(g: &FactorGraph, tree: &CausalForest, j: NodeId) -> Result<Vec<FactorId>, CausalError> {
    if !tree.is_tree() {
        return Err(CausalError::NotCreeping);
    }
    let last = tree.first_containing(g, j).ok_or(CausalError::TargetAbsent)?;
    let mut path = tree.ancestors(last);
    path.reverse();
    Ok(path)
}

/// Nodes a tree edge from `parent` to `f` may pass through.
pub fn connector_candidates(g: &FactorGraph, tree: &CausalForest, f: FactorId) -> Vec<NodeId> {
    match tree.parent[&f] {
        Attach::Root => vec![tree.root],
        Attach::Factor(p) => g.factor(p).intersection(g.factor(f)),
        Attach::Isolated => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{standard_graph, Factor, GraphKind};

    #[test]
    fn chain_forest() {
        let g = standard_graph(&GraphKind::Chain { n: 4 }).unwrap();
        let f = build_causal_forest(&g, 0, &[0, 1, 0, 2]).unwrap();
        assert!(f.is_tree());
        assert_eq!(f.parent[&0], Attach::Root);
        assert_eq!(f.parent[&1], Attach::Factor(0));
        assert_eq!(f.parent[&2], Attach::Factor(1));
        assert_eq!(irreducible_path_of_tree(&g, &f, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn out_of_order_is_not_creeping() {
        let g = standard_graph(&GraphKind::Chain { n: 4 }).unwrap();
        let f = build_causal_forest(&g, 0, &[1, 0]).unwrap();
        assert_eq!(f.components(), 2);
        assert!(!is_creeping(&g, 0, &[1, 0]));
        assert_eq!(irreducible_path_of_tree(&g, &f, 2), Err(CausalError::NotCreeping));
        assert!(is_creeping(&g, 0, &[]));
        assert_eq!(build_causal_forest(&g, 0, &[]).unwrap().components(), 1);
        assert_eq!(build_causal_forest(&g, 0, &[7]), Err(CausalError::UnknownFactor(7)));
    }

    #[test]
    fn attaches_to_earliest_neighbour() {
        // {0,1}, {1,2}, {1,3}: {1,3} meets both earlier factors and hangs off {0,1}.
        let fs = vec![Factor::new(vec![0, 1], 0), Factor::new(vec![1, 2], 0), Factor::new(vec![1, 3], 0)];
        let g = FactorGraph::new(4, fs).unwrap();
        let f = build_causal_forest(&g, 0, &[0, 1, 2]).unwrap();
        assert_eq!(f.parent[&2], Attach::Factor(0));
        assert_eq!(f.children(Some(0)), vec![1, 2]);
        assert_eq!(connector_candidates(&g, &f, 2), vec![1]);
    }

    #[test]
    fn path_ends_at_first_target_factor() {
        let fs = vec![Factor::new(vec![0, 1], 0), Factor::new(vec![1, 2], 0), Factor::new(vec![1, 2], 1)];
        let g = FactorGraph::new(3, fs).unwrap();
        let f = build_causal_forest(&g, 0, &[0, 2, 1]).unwrap();
        assert_eq!(irreducible_path_of_tree(&g, &f, 2).unwrap(), vec![0, 2]);
        let f = build_causal_forest(&g, 0, &[0, 1, 2]).unwrap();
        assert_eq!(irreducible_path_of_tree(&g, &f, 2).unwrap(), vec![0, 1]);
        assert_eq!(irreducible_path_of_tree(&g, &grow(&g, 0, &[0]), 2), Err(CausalError::TargetAbsent));
    }
}
