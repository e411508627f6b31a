//! Quick invariant suites behind `lightcone check`.

use clap::{Args, ValueEnum};

use lightcone::bounds::{
    bound_curves, golden_section_min, velocities, BoundKind, ClosedForm, CurveOptions, HMatrices, PathPolynomial,
};
use lightcone::causal::{
    build_causal_tree_pair, causal_graph_props, factorial_inequality_holds, lemma4_bijection_check, nbl,
    nbl_row, reduce_to_irreducible_pair, schwinger_karplus_check, theorem4_bound_bruteforce, NblMethod,
};
use lightcone::ensemble::{default_initial, mc_expect_c2, theorem_fs_series, CouplingLaw, EnsembleSpec};
use lightcone::graph::{standard_graph, Factor, FactorGraph, GraphKind, WeightedFactorGraph};
use lightcone::sim::{c_ij_exact, random_pauli_model, BasisKind, Method};

use num_bigint::BigUint;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Combinatorics,
    Bounds,
    Sim,
    Ensemble,
    All,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(value_enum, default_value = "all")]
    pub suite: Suite,
}

type Check = (&'static str, fn() -> std::result::Result<String, String>);

fn ensure(ok: bool, detail: String) -> std::result::Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn branched() -> FactorGraph {
    FactorGraph::new(4, vec![Factor::new(vec![0, 1], 0), Factor::new(vec![1, 2], 0), Factor::new(vec![1, 3], 0)])
        .expect("valid graph")
}

fn small_graphs() -> Vec<FactorGraph> {
    let mut gs = vec![
        standard_graph(&GraphKind::Chain { n: 5 }).unwrap(),
        standard_graph(&GraphKind::Star { n: 5 }).unwrap(),
        standard_graph(&GraphKind::Complete { n: 4, q: 2, m: 1 }).unwrap(),
        branched(),
    ];
    for seed in 0..4 {
        let g = standard_graph(&GraphKind::ErdosRenyi { n: 5, q: 2, k: 2.5, m: 1, seed }).unwrap();
        if g.is_connected() {
            gs.push(g);
        }
    }
    gs
}

fn nbl_methods_agree() -> std::result::Result<String, String> {
    let mut bad = Vec::new();
    for l in 0..=4 {
        for b in 0..=l + 1 {
            if nbl(b, l, NblMethod::BruteForce).map_err(|e| e.to_string())?
                != nbl(b, l, NblMethod::GeneratingFunction).map_err(|e| e.to_string())?
            {
                bad.push((b, l));
            }
        }
    }
    ensure(bad.is_empty(), format!("brute force vs generating function for l <= 4, mismatches {bad:?}"))
}

fn nbl_sizes() -> std::result::Result<String, String> {
    let mut bad = Vec::new();
    for l in 1..=8usize {
        let row = nbl_row(l).map_err(|e| e.to_string())?;
        if row.get(1) != Some(&BigUint::from(1u32)) {
            bad.push((1, l));
        }
        for (b, n) in row.iter().enumerate().skip(2) {
            let pow = BigUint::from(b).pow(l as u32);
            if *n >= pow || *n > &pow - BigUint::from(b - 1).pow(l as u32) {
                bad.push((b, l));
            }
        }
    }
    ensure(bad.is_empty(), format!("N(1,l) = 1 and N(b,l) <= b^l - (b-1)^l < b^l for b >= 2, l <= 8, failures {bad:?}"))
}

fn factorial_inequality() -> std::result::Result<String, String> {
    let bad = (0..=20u32).flat_map(|a| (0..=20u32).map(move |b| (a, b))).filter(|&(a, b)| !factorial_inequality_holds(a, b)).count();
    ensure(bad == 0, format!("(a+b)! <= 2^(a+b) a! b! for a, b <= 20, {bad} failures"))
}

fn lemma4() -> std::result::Result<String, String> {
    let mut out = Vec::new();
    let mut ok = true;
    for g in [standard_graph(&GraphKind::Chain { n: 3 }).unwrap(), branched()] {
        let id = |nodes: &[usize]| g.find_factor(&Factor::new(nodes.to_vec(), 0)).expect("factor exists");
        let gamma = vec![id(&[0, 1]), id(&[1, 2])];
        let r = lemma4_bijection_check(&g, 0, 2, &gamma, 4).map_err(|e| e.to_string())?;
        ok &= r.passed;
        out.push(format!("{} words, {} mismatches", r.words_checked, r.mismatches));
    }
    ensure(ok, out.join("; "))
}

fn schwinger_karplus() -> std::result::Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for l in 0..=2 {
        for seed in 0..3 {
            let r = schwinger_karplus_check(l, 3, 0.7, seed, 1e-6);
            ok &= r.passed;
            worst = worst.max(r.max_diff);
        }
    }
    ensure(ok, format!("nested integrals vs series, max diff {worst:.2e}"))
}

/// Every word of length <= 4 that forms a tree pair reduces to an
/// irreducible one satisfying the genus and degree statements.
fn pair_reduction() -> std::result::Result<String, String> {
    let mut pairs = 0;
    let mut bad = 0;
    for g in [standard_graph(&GraphKind::Chain { n: 4 }).unwrap(), branched()] {
        let f = g.num_factors();
        for len in 1..=4u32 {
            for code in 0..f.pow(len) {
                let word: Vec<usize> = (0..len).map(|k| code / f.pow(k) % f).collect();
                for i in 0..g.num_nodes() {
                    for j in (0..g.num_nodes()).filter(|&j| j != i) {
                        let Ok(p) = build_causal_tree_pair(&g, i, j, &word) else { continue };
                        pairs += 1;
                        let r = reduce_to_irreducible_pair(&g, &p).map_err(|e| e.to_string())?;
                        let props = causal_graph_props(&g, &r).map_err(|e| e.to_string())?;
                        if !(props.prop13 && props.prop14 && props.prop15) {
                            bad += 1;
                        }
                    }
                }
            }
        }
    }
    ensure(bad == 0 && pairs > 0, format!("{pairs} tree pairs, {bad} violations"))
}

fn bound_ordering() -> std::result::Result<String, String> {
    let times: Vec<f64> = (0..=10).map(|k| 0.2 * k as f64).collect();
    let mut points = 0;
    let mut bad = 0;
    for g in small_graphs() {
        let wg = WeightedFactorGraph::uniform(g, 0.7);
        let n = wg.graph().num_nodes();
        for j in 1..n {
            let kinds = [BoundKind::Thm3, BoundKind::Cor6, BoundKind::Lr];
            let c = bound_curves(&wg, 0, j, &times, &kinds, CurveOptions::default()).map_err(|e| e.to_string())?;
            for k in 0..times.len() {
                points += 1;
                let (a, b, l) = (c[0].values[k], c[1].values[k], c[2].values[k]);
                if a > b * (1.0 + 1e-10) + 1e-300 || b > l * (1.0 + 1e-10) + 1e-300 {
                    bad += 1;
                }
            }
        }
    }
    ensure(bad == 0, format!("thm3 <= cor6 <= lr at {points} points, {bad} violations"))
}

fn chain_closed_forms() -> std::result::Result<String, String> {
    let delta = 6;
    let wg = WeightedFactorGraph::uniform(standard_graph(&GraphKind::Chain { n: 7 }).unwrap(), 1.0);
    let poly = PathPolynomial::new(&wg, 0, delta, None).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let t = 0.3 * k as f64;
        let want = ClosedForm::ChainThm3 { h: 1.0, delta }.eval(t);
        worst = worst.max((poly.eval(t) - want).abs() / want);
    }
    ensure(worst < 1e-12, format!("path sum on a chain vs (2ht)^D/D!, max rel. dev. {worst:.2e}"))
}

fn velocity_minimum() -> std::result::Result<String, String> {
    let mut worst: f64 = 0.0;
    for g in small_graphs() {
        let nf = g.num_factors();
        let weights: Vec<f64> = (0..nf).map(|f| 0.3 + 0.1 * (f % 5) as f64).collect();
        let wg = WeightedFactorGraph::new(g, weights).map_err(|e| e.to_string())?;
        let hm = HMatrices::new(&wg);
        let ht = hm.h_tilde_max();
        let (_, v) = golden_section_min(|a: f64| 2.0 * ht * a / a.ln(), 1.05, 50.0, 1e-10);
        worst = worst.max((v - velocities(&hm).0).abs() / v);
    }
    ensure(worst < 1e-9, format!("numerical minimum of the velocity vs 2e h, max rel. dev. {worst:.2e}"))
}

fn sim_below_path_bound() -> std::result::Result<String, String> {
    let times: Vec<f64> = (0..=10).map(|k| 0.15 * k as f64).collect();
    let mut worst = f64::NEG_INFINITY;
    for (s, g) in small_graphs().into_iter().enumerate() {
        let n = g.num_nodes();
        let h = random_pauli_model(&g, &vec![1.0; g.num_factors()], s as u64).map_err(|e| e.to_string())?;
        let wg = WeightedFactorGraph::uniform(g, 1.0);
        let a = default_initial(BasisKind::Pauli, n, 0).map_err(|e| e.to_string())?;
        for j in 1..n {
            let poly = PathPolynomial::new(&wg, 0, j, None).map_err(|e| e.to_string())?;
            let c = c_ij_exact(&h, 0, j, &a, &times, Method::Dense).map_err(|e| e.to_string())?;
            for (&t, &v) in times.iter().zip(&c.values) {
                worst = worst.max(v - poly.eval(t));
            }
        }
    }
    ensure(worst <= 1e-8, format!("max(C - path bound) {worst:.2e}"))
}

fn dense_matches_krylov() -> std::result::Result<String, String> {
    let g = standard_graph(&GraphKind::Chain { n: 6 }).unwrap();
    let h = random_pauli_model(&g, &[0.9, 1.1, 0.8, 1.0, 1.2], 3).map_err(|e| e.to_string())?;
    let a = default_initial(BasisKind::Pauli, 6, 0).map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
    let d = c_ij_exact(&h, 0, 5, &a, &times, Method::Dense).map_err(|e| e.to_string())?;
    let k = c_ij_exact(&h, 0, 5, &a, &times, Method::Krylov).map_err(|e| e.to_string())?;
    let worst = d.values.iter().zip(&k.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-8, format!("dense vs Krylov, max diff {worst:.2e}"))
}

fn mc_below_tree_sum() -> std::result::Result<String, String> {
    let g = branched();
    let stds = vec![0.3; 3];
    let wg = WeightedFactorGraph::new(g.clone(), stds.clone()).map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..=5).map(|k| 0.2 * k as f64).collect();
    let a = default_initial(BasisKind::Pauli, 4, 0).map_err(|e| e.to_string())?;
    let mut bad = 0;
    for law in [CouplingLaw::Gaussian, CouplingLaw::Rademacher] {
        let spec = EnsembleSpec::random_pauli(&g, &stds, law, 9, 1).map_err(|e| e.to_string())?;
        let mc = mc_expect_c2(&spec, 0, 2, &a, &times, 200, Method::Dense).map_err(|e| e.to_string())?;
        for (k, &t) in times.iter().enumerate() {
            let b = theorem4_bound_bruteforce(&wg, 0, 2, t, 3).map_err(|e| e.to_string())?;
            if mc.mean[k] > b.value + 3.0 * mc.stderr[k] {
                bad += 1;
            }
        }
    }
    ensure(bad == 0, format!("ensemble mean below the tree-pair sum, {bad} violations"))
}

fn mc_deterministic() -> std::result::Result<String, String> {
    let g = standard_graph(&GraphKind::Chain { n: 4 }).unwrap();
    let spec = EnsembleSpec::random_pauli(&g, &[0.5; 3], CouplingLaw::Gaussian, 4, 2).map_err(|e| e.to_string())?;
    let a = default_initial(BasisKind::Pauli, 4, 0).map_err(|e| e.to_string())?;
    let times = [0.0, 0.5, 1.0];
    let x = mc_expect_c2(&spec, 0, 3, &a, &times, 32, Method::Dense).map_err(|e| e.to_string())?;
    let y = mc_expect_c2(&spec, 0, 3, &a, &times, 32, Method::Dense).map_err(|e| e.to_string())?;
    ensure(x == y, "repeated runs with one seed agree bit for bit".into())
}

fn genus_series_majorant() -> std::result::Result<String, String> {
    let mut bad = 0;
    for &(n, q) in &[(12usize, 4usize), (30, 2), (20, 3)] {
        let td = theorem_fs_series(n, q, 1.0, 0.0, 0).map_err(|e| e.to_string())?.divergence_time;
        for k in 0..10 {
            let t = td * k as f64 / 10.0;
            let s = theorem_fs_series(n, q, 1.0, t, n - 1).map_err(|e| e.to_string())?;
            if !(s.majorant.is_finite() && s.value <= s.majorant * (1.0 + 1e-12)) {
                bad += 1;
            }
        }
    }
    ensure(bad == 0, format!("genus series below its geometric majorant, {bad} violations"))
}

fn suite(s: Suite) -> Vec<Check> {
    let combinatorics: Vec<Check> = vec![
        ("nbl methods agree", nbl_methods_agree),
        ("nbl size bounds", nbl_sizes),
        ("factorial inequality", factorial_inequality),
        ("single-path bijection", lemma4),
        ("nested commutator expansion", schwinger_karplus),
        ("tree pair reduction", pair_reduction),
    ];
    let bounds: Vec<Check> = vec![
        ("bound ordering", bound_ordering),
        ("chain closed form", chain_closed_forms),
        ("velocity minimum", velocity_minimum),
    ];
    let sim: Vec<Check> = vec![("simulation below path bound", sim_below_path_bound), ("dense vs krylov", dense_matches_krylov)];
    let ensemble: Vec<Check> = vec![
        ("ensemble below tree-pair sum", mc_below_tree_sum),
        ("ensemble determinism", mc_deterministic),
        ("genus series majorant", genus_series_majorant),
    ];
    match s {
        Suite::Combinatorics => combinatorics,
        Suite::Bounds => bounds,
        Suite::Sim => sim,
        Suite::Ensemble => ensemble,
        Suite::All => [combinatorics, bounds, sim, ensemble].concat(),
    }
}

pub fn run(a: &CheckArgs) -> Result<()> {
    for (name, check) in suite(a.suite) {
        match check() {
            Ok(detail) => println!("ok   {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                return Err(CliError::Compute(format!("check {name:?} failed")));
            }
        }
    }
    Ok(())
}
