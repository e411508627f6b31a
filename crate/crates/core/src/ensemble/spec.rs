//! Simple random Hamiltonian ensembles: fixed unit-norm strings per factor,
//! independent zero-mean couplings.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::graph::{standard_graph, FactorGraph, FactorId, GraphKind, NodeId};
use crate::sim::models::{random_pauli_model, syk_variance};
use crate::sim::{BasisKind, Hamiltonian, HamiltonianTerm, Key, MajoranaString, OperatorVector, PauliString, SimError};
use crate::ensemble::EnsembleError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingLaw {
    #[default]
    Gaussian,
    Rademacher,
}

impl CouplingLaw {
    fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            CouplingLaw::Gaussian => rng.sample(StandardNormal),
            CouplingLaw::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// A Pauli label such as `"XZI"` or a list of Majorana indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermOp {
    Pauli(String),
    Majorana(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleTerm {
    #[serde(default)]
    pub factor: Option<FactorId>,
    pub op: TermOp,
    /// Standard deviation of the coupling.
    pub std: f64,
    /// Terms with the same group share one coupling draw.
    #[serde(default)]
    pub group: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: BasisKind,
    pub n: usize,
    #[serde(default)]
    pub law: CouplingLaw,
    pub seed: u64,
    pub terms: Vec<EnsembleTerm>,
}

impl EnsembleSpec {
    /// One term per factor with the given Pauli labels and deviations.
    pub fn pauli_factors(
        g: &FactorGraph,
        labels: &[String],
        stds: &[f64],
        law: CouplingLaw,
        seed: u64,
    ) -> Result<Self, EnsembleError> {
        if labels.len() != g.num_factors() || stds.len() != g.num_factors() {
            return Err(EnsembleError::InvalidParams(format!(
                "{} factors, {} labels, {} deviations",
                g.num_factors(),
                labels.len(),
                stds.len()
            )));
        }
        let terms = labels
            .iter()
            .zip(stds)
            .enumerate()
            .map(|(f, (l, &s))| EnsembleTerm { factor: Some(f), op: TermOp::Pauli(l.clone()), std: s, group: None })
            .collect();
        let spec = Self { kind: BasisKind::Pauli, n: g.num_nodes(), law, seed, terms };
        spec.compile()?;
        Ok(spec)
    }

    /// Random Pauli string on each factor (drawn once from `op_seed`),
    /// deviations `stds`.
    pub fn random_pauli(g: &FactorGraph, stds: &[f64], law: CouplingLaw, seed: u64, op_seed: u64) -> Result<Self, EnsembleError> {
        let h = random_pauli_model(g, &vec![1.0; g.num_factors()], op_seed)?;
        let labels: Vec<String> = h.terms().iter().map(|t| PauliString::from_key(t.key).label(g.num_nodes())).collect();
        Self::pauli_factors(g, &labels, stds, law, seed)
    }

    /// SYK on `n` Majoranas with the standard variance.
    pub fn syk(n: usize, q: usize, j: f64, law: CouplingLaw, seed: u64) -> Result<Self, EnsembleError> {
        let g = standard_graph(&GraphKind::Complete { n, q, m: 1 }).map_err(|e| EnsembleError::InvalidParams(e.to_string()))?;
        if q % 2 == 1 {
            return Err(SimError::OddQ(q).into());
        }
        let std = syk_variance(n, q, j).sqrt();
        let terms = g
            .factors()
            .iter()
            .enumerate()
            .map(|(f, x)| EnsembleTerm { factor: Some(f), op: TermOp::Majorana(x.nodes.clone()), std, group: None })
            .collect();
        Ok(Self { kind: BasisKind::Majorana, n, law, seed, terms })
    }

    /// Random SU(2) Heisenberg model on the complete graph: factors
    /// `X^a_u X^a_v` for the three flavors `a` of every pair share the
    /// pair's coupling, with `E[J^2] = 1/N`.
    pub fn su2_heisenberg(n: usize, law: CouplingLaw, seed: u64) -> Result<Self, EnsembleError> {
        let g = standard_graph(&GraphKind::Complete { n, q: 2, m: 3 }).map_err(|e| EnsembleError::InvalidParams(e.to_string()))?;
        let std = (1.0 / n as f64).sqrt();
        let terms = g
            .factors()
            .iter()
            .enumerate()
            .map(|(f, x)| {
                let (u, v) = (x.nodes[0], x.nodes[1]);
                let c = ['X', 'Y', 'Z'][x.flavor as usize];
                let label: String = (0..n).map(|k| if k == u || k == v { c } else { 'I' }).collect();
                let group = u * n + v;
                EnsembleTerm { factor: Some(f), op: TermOp::Pauli(label), std, group: Some(group) }
            })
            .collect();
        Ok(Self { kind: BasisKind::Pauli, n, law, seed, terms })
    }

    /// Basis key and sign of every term.
    pub fn compile(&self) -> Result<Vec<(Key, f64)>, SimError> {
        self.terms
            .iter()
            .map(|t| match (&t.op, self.kind) {
                (TermOp::Pauli(l), BasisKind::Pauli) => {
                    if l.chars().count() != self.n {
                        return Err(SimError::SizeMismatch(format!("label {l:?} for {} qubits", self.n)));
                    }
                    Ok((PauliString::parse(l)?.to_key(), 1.0))
                }
                (TermOp::Majorana(idx), BasisKind::Majorana) => {
                    let s = MajoranaString::new(idx, self.n)?;
                    Ok((s.mask as Key, s.sign as f64))
                }
                _ => Err(SimError::BasisMismatch(format!("term {:?} in a {:?} ensemble", t.op, self.kind))),
            })
            .collect()
    }

    /// Couplings of sample `index`, drawn from the substream `index` of the
    /// generator seeded with `seed`.
    pub fn sample_couplings(&self, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let mut groups: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        self.terms
            .iter()
            .map(|t| {
                let xi = match t.group {
                    Some(gid) => *groups.entry(gid).or_insert_with(|| self.law.draw(&mut rng)),
                    None => self.law.draw(&mut rng),
                };
                t.std * xi
            })
            .collect()
    }
}

pub fn sample_hamiltonian(spec: &EnsembleSpec, index: u64) -> Result<Hamiltonian, EnsembleError> {
    let keys = spec.compile()?;
    let js = spec.sample_couplings(index);
    let terms = spec
        .terms
        .iter()
        .zip(keys)
        .zip(js)
        .map(|((t, (key, sign)), j)| HamiltonianTerm { factor: t.factor, key, coupling: sign * j })
        .collect();
    Ok(Hamiltonian::new(spec.kind, spec.n, terms)?)
}

/// `X_i` for qubits, `psi_i` for Majoranas.
pub fn default_initial(kind: BasisKind, n: usize, i: NodeId) -> Result<OperatorVector, SimError> {
    match kind {
        BasisKind::Pauli => OperatorVector::basis(kind, n, PauliString::single(i, 'X')?.to_key()),
        BasisKind::Majorana => OperatorVector::majorana(n, &[i]),
    }
}
