//! Combinatorics of factor sequences: causal forests and tree pairs,
//! forbidden sets, ordering counts and brute-force checks of the sequence
//! identities behind the bounds.

pub mod forest;
pub mod nbl;
pub mod pair;
pub mod schwinger;
pub mod single;
pub mod theorem4;

use thiserror::Error;

use crate::graph::{FactorGraph, FactorId, NodeId};

pub use forest::{build_causal_forest, irreducible_path_of_tree, is_creeping, Attach, CausalForest};
pub use nbl::{factorial_inequality_holds, nbl, nbl_row, NblMethod};
pub use pair::{
    build_causal_tree_pair, causal_graph_props, count_orderings, forbidden_sets_pair, is_irreducible,
    reduce_to_irreducible_pair, CausalGraphProps, CausalTreePair, ForbiddenSets, ForbiddenVariant, OrderingCounts,
};
pub use schwinger::{schwinger_karplus_check, SkReport};
pub use theorem4::{theorem4_bound_bruteforce, Theorem4Report};
pub use single::{forbidden_vertices_single, lemma4_bijection_check, Lemma4Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CausalError {
    #[error("factor {0} is not in the graph")]
    UnknownFactor(FactorId),
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("sequence does not creep out from the root")]
    NotCreeping,
    #[error("no factor contains the target")]
    TargetAbsent,
    #[error("factor {0} appears only once")]
    UnrepeatedFactor(FactorId),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("tree pair is not irreducible")]
    NotIrreducible,
    #[error("ordering is not valid for this pair: {0}")]
    InvalidOrdering(String),
    #[error("root and target coincide")]
    SameNode,
}

/// `(i, X_1, ..., X_n)`, optionally with a target `j` and the position `r`
/// of the projector: `X_1..X_r` is the left half, the rest the right half.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSequence {
    pub root: NodeId,
    pub factors: Vec<FactorId>,
    pub target: Option<(NodeId, usize)>,
}

impl FactorSequence {
    pub fn new(g: &FactorGraph, root: NodeId, factors: Vec<FactorId>) -> Result<Self, CausalError> {
        if root >= g.num_nodes() {
            return Err(CausalError::UnknownNode(root));
        }
        if let Some(&bad) = factors.iter().find(|&&x| x >= g.num_factors()) {
            return Err(CausalError::UnknownFactor(bad));
        }
        Ok(Self { root, factors, target: None })
    }

    pub fn with_target(mut self, g: &FactorGraph, j: NodeId, r: usize) -> Result<Self, CausalError> {
        if j >= g.num_nodes() {
            return Err(CausalError::UnknownNode(j));
        }
        if r > self.factors.len() {
            return Err(CausalError::IndexOutOfRange { index: r, limit: self.factors.len() });
        }
        self.target = Some((j, r));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn forest(&self, g: &FactorGraph) -> Result<CausalForest, CausalError> {
        build_causal_forest(g, self.root, &self.factors)
    }

    /// `(left, right)` halves around the projector.
    pub fn halves(&self) -> Option<(&[FactorId], &[FactorId])> {
        self.target.map(|(_, r)| self.factors.split_at(r))
    }
}

/// Calls `f` on every length-`n` word over `0..alphabet`.
pub(crate) fn for_each_word(alphabet: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut w = vec![0usize; n];
    if n > 0 && alphabet == 0 {
        return;
    }
    loop {
        f(&w);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            w[k] += 1;
            if w[k] < alphabet {
                break;
            }
            w[k] = 0;
        }
    }
}
