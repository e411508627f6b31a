//! Factor graphs: nodes, factors and the bipartite incidence between them.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

pub type NodeId = usize;
pub type FactorId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("factor {0} has no nodes")]
    EmptyFactor(usize),
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("factor {0:?} listed twice with the same flavor")]
    DuplicateFactor(Vec<NodeId>),
    #[error("factor {0:?} lists a node more than once")]
    RepeatedNode(Vec<NodeId>),
    #[error("vertices are in different components")]
    Disconnected,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("inclusion probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("malformed graph json: {0}")]
    Json(String),
}

/// A factor: a set of nodes plus a flavor label that tells apart factors on
/// the same node set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub nodes: Vec<NodeId>,
    #[serde(default)]
    pub flavor: u32,
}

impl Factor {
    pub fn new(mut nodes: Vec<NodeId>, flavor: u32) -> Self {
        nodes.sort_unstable();
        Self { nodes, flavor }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn intersects(&self, other: &Factor) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.nodes.len() && b < other.nodes.len() {
            match self.nodes[a].cmp(&other.nodes[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn intersection(&self, other: &Factor) -> Vec<NodeId> {
        self.nodes.iter().copied().filter(|&v| other.contains(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Either side of the bipartite graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    Node(NodeId),
    Factor(FactorId),
}

/// Factor graph with factors kept in sorted order; a [`FactorId`] is the
/// position in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    n: usize,
    factors: Vec<Factor>,
    incident: Vec<Vec<FactorId>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    #[serde(rename = "N")]
    n: usize,
    factors: Vec<Factor>,
}

impl FactorGraph {
    pub fn new(n: usize, factors: Vec<Factor>) -> Result<Self, GraphError> {
        let mut fs = Vec::with_capacity(factors.len());
        for (idx, f) in factors.into_iter().enumerate() {
            if f.nodes.is_empty() {
                return Err(GraphError::EmptyFactor(idx));
            }
            let f = Factor::new(f.nodes, f.flavor);
            if f.nodes.windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphError::RepeatedNode(f.nodes));
            }
            if let Some(&bad) = f.nodes.iter().find(|&&v| v >= n) {
                return Err(GraphError::NodeOutOfRange { node: bad, n });
            }
            fs.push(f);
        }
        fs.sort();
        if let Some(w) = fs.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateFactor(w[0].nodes.clone()));
        }
        let mut incident = vec![Vec::new(); n];
        for (fid, f) in fs.iter().enumerate() {
            for &v in &f.nodes {
                incident[v].push(fid);
            }
        }
        Ok(Self { n, factors: fs, incident })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Number of bipartite edges, `sum_X |X|`.
    pub fn num_edges(&self) -> usize {
        self.factors.iter().map(Factor::len).sum()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, id: FactorId) -> &Factor {
        &self.factors[id]
    }

    /// Factors containing node `v`, ascending.
    pub fn factors_of(&self, v: NodeId) -> &[FactorId] {
        &self.incident[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.incident[v].len()
    }

    pub fn find_factor(&self, f: &Factor) -> Option<FactorId> {
        self.factors.binary_search(f).ok()
    }

    fn neighbors(&self, x: Vertex) -> Vec<Vertex> {
        match x {
            Vertex::Node(v) => self.incident[v].iter().map(|&f| Vertex::Factor(f)).collect(),
            Vertex::Factor(f) => self.factors[f].nodes.iter().map(|&v| Vertex::Node(v)).collect(),
        }
    }

    fn index(&self, x: Vertex) -> usize {
        match x {
            Vertex::Node(v) => v,
            Vertex::Factor(f) => self.n + f,
        }
    }

    fn check_vertex(&self, x: Vertex) -> Result<(), GraphError> {
        match x {
            Vertex::Node(v) if v >= self.n => Err(GraphError::NodeOutOfRange { node: v, n: self.n }),
            Vertex::Factor(f) if f >= self.factors.len() => {
                Err(GraphError::InvalidParams(format!("factor id {f} out of range")))
            }
            _ => Ok(()),
        }
    }

    /// Breadth-first distances (in bipartite edges) from `src` to every vertex.
    fn bfs(&self, src: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n + self.factors.len()];
        let mut queue = VecDeque::new();
        dist[self.index(src)] = Some(0);
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            let d = dist[self.index(x)].expect("queued vertices are labelled");
            for y in self.neighbors(x) {
                let iy = self.index(y);
                if dist[iy].is_none() {
                    dist[iy] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Length of the shortest path between two vertices of the bipartite graph.
    pub fn distance(&self, a: Vertex, b: Vertex) -> Result<usize, GraphError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        self.bfs(a)[self.index(b)].ok_or(GraphError::Disconnected)
    }

    /// Node-to-node distance counted in factors crossed (half the bipartite distance).
    pub fn node_distance(&self, i: NodeId, j: NodeId) -> Result<usize, GraphError> {
        Ok(self.distance(Vertex::Node(i), Vertex::Node(j))? / 2)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs(Vertex::Node(0)).iter().all(Option::is_some)
    }

    /// `|E| + 1 - |V| - |F|`, the number of independent cycles.
    pub fn genus(&self) -> Result<usize, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.num_edges() + 1 - self.n - self.factors.len())
    }

    pub fn regularity(&self) -> Regularity {
        let k = self.n.checked_sub(1).map(|_| self.degree(0));
        let q = self.factors.first().map(Factor::len);
        let degree_regular = k.is_some_and(|k| (0..self.n).all(|v| self.degree(v) == k));
        let uniform = q.is_some_and(|q| self.factors.iter().all(|f| f.len() == q));
        let (k, q) = (k.unwrap_or(0), q.unwrap_or(0));
        Regularity {
            is_regular: degree_regular && uniform,
            k,
            q,
            count_identity_holds: q * self.factors.len() == k * self.n,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson { n: self.n, factors: self.factors.clone() })
            .expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        let g: GraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        Self::new(g.n, g.factors)
    }
}

/// Outcome of [`FactorGraph::regularity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Regularity {
    /// Every node has degree `k` and every factor has `q` nodes.
    pub is_regular: bool,
    pub k: usize,
    pub q: usize,
    /// `q |F| == k N`.
    pub count_identity_holds: bool,
}

/// Named graph families.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    /// Factors `{n, n+1}`.
    Chain { n: usize },
    /// Factors `{v, N-1}` for every `v < N-1`; node `N-1` is the hub.
    Star { n: usize },
    /// Every `q`-subset, each with `m` flavors.
    Complete { n: usize, q: usize, m: usize },
    /// Every flavored `q`-subset kept independently, mean node degree `k`.
    ErdosRenyi { n: usize, q: usize, k: f64, m: usize, seed: u64 },
}

fn combinations(n: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(q);
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < q - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, q, cur, out);
            cur.pop();
        }
    }
    rec(0, n, q, &mut cur, &mut out);
    out
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Inclusion probability for [`GraphKind::ErdosRenyi`]:
/// `(q-1)! (N-q)! k / ((N-1)! m)`, which makes the expected degree exactly `k`.
pub fn erdos_renyi_probability(n: usize, q: usize, k: f64, m: usize) -> f64 {
    k / (m as f64 * binomial_f64(n - 1, q - 1))
}

pub fn standard_graph(kind: &GraphKind) -> Result<FactorGraph, GraphError> {
    match *kind {
        GraphKind::Chain { n } => {
            if n < 2 {
                return Err(GraphError::InvalidParams("chain needs at least 2 nodes".into()));
            }
            FactorGraph::new(n, (0..n - 1).map(|v| Factor::new(vec![v, v + 1], 0)).collect())
        }
        GraphKind::Star { n } => {
            if n < 2 {
                return Err(GraphError::InvalidParams("star needs at least 2 nodes".into()));
            }
            FactorGraph::new(n, (0..n - 1).map(|v| Factor::new(vec![v, n - 1], 0)).collect())
        }
        GraphKind::Complete { n, q, m } => {
            if q == 0 || q > n || m == 0 {
                return Err(GraphError::InvalidParams(format!("complete graph with N={n}, q={q}, m={m}")));
            }
            let fs = combinations(n, q)
                .into_iter()
                .flat_map(|c| (0..m).map(move |fl| Factor::new(c.clone(), fl as u32)))
                .collect();
            FactorGraph::new(n, fs)
        }
        GraphKind::ErdosRenyi { n, q, k, m, seed } => {
            if q == 0 || q > n || m == 0 || !(k >= 0.0) {
                return Err(GraphError::InvalidParams(format!("random graph with N={n}, q={q}, k={k}, m={m}")));
            }
            let p = erdos_renyi_probability(n, q, k, m);
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::ProbabilityOutOfRange(p));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut fs = Vec::new();
            for c in combinations(n, q) {
                for fl in 0..m {
                    if rng.gen::<f64>() < p {
                        fs.push(Factor::new(c.clone(), fl as u32));
                    }
                }
            }
            FactorGraph::new(n, fs)
        }
    }
}

/// Factor graph with a non-negative weight `||H_X||` on every factor.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedFactorGraph<T> {
    graph: FactorGraph,
    weights: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct WeightedFactorJson {
    nodes: Vec<NodeId>,
    #[serde(default)]
    flavor: u32,
    #[serde(default = "unit_weight")]
    weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct WeightedGraphJson {
    #[serde(rename = "N")]
    n: usize,
    factors: Vec<WeightedFactorJson>,
}

impl<T: Real> WeightedFactorGraph<T> {
    /// `weights[f]` belongs to factor `f` of `graph` (sorted order).
    pub fn new(graph: FactorGraph, weights: Vec<T>) -> Result<Self, GraphError> {
        if weights.len() != graph.num_factors() {
            return Err(GraphError::InvalidParams(format!(
                "{} weights for {} factors",
                weights.len(),
                graph.num_factors()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero()) || !w.is_finite()) {
            return Err(GraphError::InvalidParams(format!("weight {w} is not a finite non-negative number")));
        }
        Ok(Self { graph, weights })
    }

    pub fn uniform(graph: FactorGraph, w: T) -> Self {
        let weights = vec![w; graph.num_factors()];
        Self { graph, weights }
    }

    /// Builds from `(factor, weight)` pairs given in any order.
    pub fn from_pairs(n: usize, pairs: Vec<(Factor, T)>) -> Result<Self, GraphError> {
        let graph = FactorGraph::new(n, pairs.iter().map(|(f, _)| f.clone()).collect())?;
        let mut weights = vec![T::zero(); graph.num_factors()];
        for (f, w) in pairs {
            let f = Factor::new(f.nodes, f.flavor);
            weights[graph.find_factor(&f).expect("factor just inserted")] = w;
        }
        Self::new(graph, weights)
    }

    pub fn graph(&self) -> &FactorGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, f: FactorId) -> T {
        self.weights[f]
    }

    pub fn to_json(&self) -> String {
        let factors = self
            .graph
            .factors()
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| WeightedFactorJson { nodes: f.nodes.clone(), flavor: f.flavor, weight: w.to_f64_lossy() })
            .collect();
        serde_json::to_string(&WeightedGraphJson { n: self.graph.num_nodes(), factors }).expect("graph serializes")
    }

    /// Accepts the plain graph format too; missing weights default to 1.
    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        let g: WeightedGraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        let pairs = g
            .factors
            .into_iter()
            .map(|f| (Factor::new(f.nodes, f.flavor), T::lit(f.weight)))
            .collect();
        Self::from_pairs(g.n, pairs)
    }
}

/// Distinct node sets among the factors, used when flavors should be merged.
pub fn support_sets(g: &FactorGraph) -> BTreeSet<Vec<NodeId>> {
    g.factors().iter().map(|f| f.nodes.clone()).collect()
}
