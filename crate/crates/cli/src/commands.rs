use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lightcone::bounds::matrices::ALPHA_RANGE;
use lightcone::bounds::{bound_curves, golden_section_min, Alpha, BoundError, BoundKind, ClosedForm, CurveOptions};
use lightcone::curve::time_grid;
use lightcone::ensemble::{default_initial, mc_expect_c2, syk_rate_over_exact, syk_rate_ratio, EnsembleSpec, EnsembleTerm, TermOp};
use lightcone::graph::{standard_graph, FactorGraph, GraphError, GraphKind, WeightedFactorGraph};
use lightcone::sim::{c_ij_exact, hatc_ij_exact, random_pauli_model, BasisKind, Hamiltonian, HamiltonianTerm, Method, SimError};
use lightcone::Curve;

use crate::error::{CliError, Result};
use crate::output::{emit, Cell, Format, Table};

#[derive(Args, Serialize, Clone, Debug)]
pub struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct TimeArgs {
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    /// Number of intervals; the grid has steps + 1 points.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
}

impl TimeArgs {
    pub fn grid(&self) -> Result<Vec<f64>> {
        grid(self.tmax, self.steps)
    }
}

pub fn grid(tmax: f64, steps: usize) -> Result<Vec<f64>> {
    if !tmax.is_finite() || tmax < 0.0 {
        return Err(CliError::Config(format!("--tmax must be finite and nonnegative, got {tmax}")));
    }
    if steps == 0 || steps > 1_000_000 {
        return Err(CliError::Config(format!("--steps must be in 1..=1000000, got {steps}")));
    }
    Ok(time_grid(tmax, steps))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<WeightedFactorGraph<f64>> {
    WeightedFactorGraph::from_json(&read(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i >= n || j >= n {
        return Err(CliError::Config(format!("pair ({i}, {j}) out of range for {n} nodes")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Chain,
    Star,
    Complete,
    ErdosRenyi,
}

#[derive(Args, Serialize, Debug)]
pub struct GraphArgs {
    #[arg(long, value_enum, conflicts_with = "input", required_unless_present = "input")]
    pub kind: Option<KindArg>,
    /// Graph JSON to read instead of generating one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Factor size, for complete and Erdos-Renyi graphs.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Flavors per node set.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Mean node degree for Erdos-Renyi graphs.
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Required for Erdos-Renyi graphs.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Weight given to every generated factor.
    #[arg(long, default_value_t = 1.0)]
    pub weight: f64,
    /// Emit a one-row table of graph statistics instead of the graph.
    #[arg(long)]
    pub summary: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn graph_kind(a: &GraphArgs, kind: KindArg) -> Result<GraphKind> {
    Ok(match kind {
        KindArg::Chain => GraphKind::Chain { n: a.n },
        KindArg::Star => GraphKind::Star { n: a.n },
        KindArg::Complete => GraphKind::Complete { n: a.n, q: a.q, m: a.m },
        KindArg::ErdosRenyi => {
            let seed = a.seed.ok_or_else(|| CliError::config("erdos-renyi graphs need --seed"))?;
            GraphKind::ErdosRenyi { n: a.n, q: a.q, k: a.k, m: a.m, seed }
        }
    })
}

pub fn graph(a: &GraphArgs) -> Result<()> {
    let wg = match (&a.input, a.kind) {
        (Some(p), _) => load_graph(p)?,
        (None, Some(kind)) => {
            if !a.weight.is_finite() || a.weight < 0.0 {
                return Err(CliError::Config(format!("--weight must be finite and nonnegative, got {}", a.weight)));
            }
            let g = standard_graph(&graph_kind(a, kind)?).map_err(CliError::config)?;
            WeightedFactorGraph::uniform(g, a.weight)
        }
        (None, None) => unreachable!("clap requires --kind or --input"),
    };
    if !a.summary {
        let mut text = wg.to_json();
        text.push('\n');
        return match &a.output.out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        };
    }
    let g = wg.graph();
    let reg = g.regularity();
    let mut t = Table::new("graph", a, &["nodes", "factors", "edges", "genus", "connected", "regular", "k", "q"]);
    let genus = match g.genus() {
        Ok(x) => Cell::Int(x as u64),
        Err(_) => Cell::Text("NA".into()),
    };
    let flag = |b: bool| Cell::Text(b.to_string());
    t.push(vec![
        g.num_nodes().into(),
        g.num_factors().into(),
        g.num_edges().into(),
        genus,
        flag(g.is_connected()),
        flag(reg.is_regular),
        reg.k.into(),
        reg.q.into(),
    ]);
    emit(&t, a.output.format, a.output.out.as_deref())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSel {
    Thm3,
    Cor6,
    Lr,
    All,
}

impl BoundSel {
    fn kinds(self) -> Vec<BoundKind> {
        match self {
            BoundSel::Thm3 => vec![BoundKind::Thm3],
            BoundSel::Cor6 => vec![BoundKind::Cor6],
            BoundSel::Lr => vec![BoundKind::Lr],
            BoundSel::All => vec![BoundKind::Thm3, BoundKind::Cor6, BoundKind::Lr],
        }
    }
}

fn parse_alpha(s: &str) -> Result<Alpha<f64>> {
    match s {
        "e" => Ok(Alpha::Fixed(std::f64::consts::E)),
        "optimize" => Ok(Alpha::Optimize),
        _ => match s.parse::<f64>() {
            Ok(a) if a > 1.0 && a.is_finite() => Ok(Alpha::Fixed(a)),
            _ => Err(CliError::Config(format!("--alpha must be e, optimize or a number above 1, got {s:?}"))),
        },
    }
}

#[derive(Args, Serialize, Debug)]
pub struct BoundArgs {
    /// Weighted graph JSON.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
    #[command(flatten)]
    pub time: TimeArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub bound: BoundSel,
    /// e, optimize, or a fixed value above 1.
    #[arg(long, default_value = "e")]
    pub alpha: String,
    /// Longest path summed; needed on graphs with many factors.
    #[arg(long)]
    pub max_path_len: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn bound_error(e: BoundError) -> CliError {
    match e {
        BoundError::NeedsLengthLimit(_) | BoundError::InvalidParams(_) | BoundError::Graph(GraphError::Disconnected) => {
            CliError::config(e)
        }
        _ => CliError::compute(e),
    }
}

/// Rows `(t, value, label)` ordered by time, then by curve.
fn long_table(command: &str, config: &impl Serialize, curves: &[Curve]) -> Table {
    let mut t = Table::new(command, config, &["t", "value", "label"]);
    if let Some(first) = curves.first() {
        for (k, &time) in first.times.iter().enumerate() {
            for c in curves {
                t.push(vec![time.into(), c.values[k].into(), c.label.as_str().into()]);
            }
        }
    }
    t
}

pub fn bound(a: &BoundArgs) -> Result<()> {
    let times = a.time.grid()?;
    let alpha = parse_alpha(&a.alpha)?;
    let wg = load_graph(&a.graph)?;
    check_pair(wg.graph().num_nodes(), a.i, a.j)?;
    let opts = CurveOptions { max_path_len: a.max_path_len, alpha };
    let curves = bound_curves(&wg, a.i, a.j, &times, &a.bound.kinds(), opts).map_err(bound_error)?;
    for c in curves.iter().filter(|c| c.truncated) {
        eprintln!("lightcone: warning: {} is a partial sum (paths cut at the length cap)", c.label);
    }
    emit(&long_table("bound", a, &curves), a.output.format, a.output.out.as_deref())
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Dense,
    Krylov,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dense => Method::Dense,
            MethodArg::Krylov => Method::Krylov,
        }
    }
}

/// One Hamiltonian term: a Pauli label or Majorana index list on a factor.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub factor: usize,
    pub op: TermOp,
    pub coupling: f64,
}

#[derive(Args, Serialize, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// JSON list of {factor, op, coupling}; without it a random Pauli model
    /// with the graph weights as couplings is drawn from --seed.
    #[arg(long, required_unless_present = "seed")]
    pub terms: Option<PathBuf>,
    #[arg(long, conflicts_with = "terms")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
    #[command(flatten)]
    pub time: TimeArgs,
    #[arg(long, value_enum, default_value = "dense")]
    pub method: MethodArg,
    /// Also emit the single-qubit commutator norm (qubits only).
    #[arg(long)]
    pub hatc: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::BasisMismatch(_)
        | SimError::BadInitialOperator(_)
        | SimError::SizeMismatch(_)
        | SimError::OddQ(_)
        | SimError::InvalidParams(_)
        | SimError::TooLarge(_) => CliError::config(e),
        SimError::KrylovNotConverged { .. } => CliError::compute(e),
    }
}

/// Builds the Hamiltonian from explicit terms, each confined to its factor.
pub fn hamiltonian_from_terms(g: &FactorGraph, terms: &[TermJson]) -> Result<Hamiltonian> {
    let kind = match terms.first() {
        None => return Err(CliError::config("no terms given")),
        Some(TermJson { op: TermOp::Majorana(_), .. }) => BasisKind::Majorana,
        Some(_) => BasisKind::Pauli,
    };
    let n = g.num_nodes();
    let spec = EnsembleSpec {
        kind,
        n,
        law: Default::default(),
        seed: 0,
        terms: terms
            .iter()
            .map(|t| EnsembleTerm { factor: Some(t.factor), op: t.op.clone(), std: 1.0, group: None })
            .collect(),
    };
    let keys = spec.compile().map_err(sim_error)?;
    let mut out = Vec::with_capacity(terms.len());
    for (t, (key, sign)) in terms.iter().zip(keys) {
        if t.factor >= g.num_factors() {
            return Err(CliError::Config(format!("factor {} out of range", t.factor)));
        }
        let mask: u64 = g.factor(t.factor).nodes.iter().map(|&v| 1u64 << v).sum();
        if kind.support(key) & !mask != 0 {
            return Err(CliError::Config(format!("term {:?} reaches outside factor {}", t.op, t.factor)));
        }
        out.push(HamiltonianTerm { factor: Some(t.factor), key, coupling: sign * t.coupling });
    }
    Hamiltonian::new(kind, n, out).map_err(sim_error)
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let times = a.time.grid()?;
    let wg = load_graph(&a.graph)?;
    let g = wg.graph();
    check_pair(g.num_nodes(), a.i, a.j)?;
    let h = match (&a.terms, a.seed) {
        (Some(p), _) => {
            let terms: Vec<TermJson> =
                serde_json::from_str(&read(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            hamiltonian_from_terms(g, &terms)?
        }
        (None, Some(seed)) => random_pauli_model(g, wg.weights(), seed).map_err(sim_error)?,
        (None, None) => unreachable!("clap requires --terms or --seed"),
    };
    if a.hatc && h.kind != BasisKind::Pauli {
        return Err(CliError::config("--hatc needs a qubit Hamiltonian"));
    }
    let init = default_initial(h.kind, h.n, a.i).map_err(sim_error)?;
    let method = Method::from(a.method);
    let mut curves = vec![c_ij_exact(&h, a.i, a.j, &init, &times, method).map_err(sim_error)?];
    if a.hatc {
        curves.push(hatc_ij_exact(&h, a.i, a.j, &init, &times, method).map_err(sim_error)?);
    }
    emit(&long_table("simulate", a, &curves), a.output.format, a.output.out.as_deref())
}

#[derive(Args, Serialize, Debug)]
pub struct EnsembleArgs {
    /// Ensemble spec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
    #[command(flatten)]
    pub time: TimeArgs,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Replaces the seed stored in the spec.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "dense")]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn ensemble(a: &EnsembleArgs) -> Result<()> {
    let times = a.time.grid()?;
    if a.samples == 0 {
        return Err(CliError::config("--samples must be positive"));
    }
    let mut spec: EnsembleSpec =
        serde_json::from_str(&read(&a.spec)?).map_err(|e| CliError::Config(format!("{}: {e}", a.spec.display())))?;
    spec.seed = a.seed;
    check_pair(spec.n, a.i, a.j)?;
    spec.compile().map_err(sim_error)?;
    let init = default_initial(spec.kind, spec.n, a.i).map_err(sim_error)?;
    let mc = mc_expect_c2(&spec, a.i, a.j, &init, &times, a.samples, a.method.into()).map_err(CliError::compute)?;
    let mut t = Table::new("ensemble", a, &["t", "mean", "stderr"]);
    for k in 0..mc.times.len() {
        t.push(vec![mc.times[k].into(), mc.mean[k].into(), mc.stderr[k].into()]);
    }
    emit(&t, a.output.format, a.output.out.as_deref())
}

#[derive(Subcommand, Serialize, Debug)]
pub enum FiguresCommand {
    /// Chain bounds at fixed separation: path sum, Bessel and exponential decay.
    Lr(LrArgs),
    /// SYK growth-rate ratios against q.
    Syk(SykArgs),
}

#[derive(Args, Serialize, Debug)]
pub struct LrArgs {
    /// Separation between the two sites.
    #[arg(long, default_value_t = 12)]
    pub delta: usize,
    /// Bond strength.
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, default_value_t = 5.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Serialize, Debug)]
pub struct SykArgs {
    /// Largest even q tabulated.
    #[arg(long, default_value_t = 64)]
    pub q_max: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Minimises the chain exponential-decay bound over `alpha`, searching in
/// `ln alpha` on the log of the bound.
pub fn chain_lr_optimal(h: f64, delta: usize, t: f64) -> (f64, f64) {
    let (lo, hi) = (ALPHA_RANGE.0.ln(), ALPHA_RANGE.1.ln());
    if t == 0.0 {
        // Every alpha gives zero; the minimiser runs off to the top as t -> 0.
        return (0.0, ALPHA_RANGE.1);
    }
    let log_f = |u: f64| (8.0 * h * u.exp() * t.abs()).exp_m1().ln() - delta as f64 * u;
    let (u, _) = golden_section_min(log_f, lo, hi, 1e-12);
    let alpha = u.exp();
    (ClosedForm::ChainLr { h, delta, alpha }.eval(t), alpha)
}

pub fn figures(f: &FiguresCommand) -> Result<()> {
    match f {
        FiguresCommand::Lr(a) => {
            if !a.h.is_finite() || a.h <= 0.0 {
                return Err(CliError::Config(format!("--h must be positive, got {}", a.h)));
            }
            let times = grid(a.tmax, a.steps)?;
            let (h, delta) = (a.h, a.delta);
            let mut t = Table::new(
                "figures lr",
                a,
                &["t", "thm3", "cor6", "lr_alpha_e", "lr_alpha_opt", "alpha_opt"],
            );
            for &time in &times {
                let (opt, alpha) = chain_lr_optimal(h, delta, time);
                t.push(vec![
                    time.into(),
                    ClosedForm::ChainThm3 { h, delta }.eval(time).into(),
                    ClosedForm::ChainBessel { h, delta }.eval(time).into(),
                    ClosedForm::ChainLr { h, delta, alpha: std::f64::consts::E }.eval(time).into(),
                    opt.into(),
                    alpha.into(),
                ]);
            }
            emit(&t, a.output.format, a.output.out.as_deref())
        }
        FiguresCommand::Syk(a) => {
            if a.q_max < 2 {
                return Err(CliError::Config(format!("--q-max must be at least 2, got {}", a.q_max)));
            }
            let mut t = Table::new("figures syk", a, &["q", "rate_ratio_bound", "rate_ratio_largeq_exact"]);
            for q in (2..=a.q_max).step_by(2) {
                t.push(vec![q.into(), syk_rate_ratio(q).into(), syk_rate_over_exact(q).into()]);
            }
            emit(&t, a.output.format, a.output.out.as_deref())
        }
    }
}
