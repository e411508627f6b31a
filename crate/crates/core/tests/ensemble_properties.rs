use lightcone::causal::{build_causal_tree_pair, theorem4_bound_bruteforce};
use lightcone::ensemble::{
    default_initial, mc_expect_c2, sample_hamiltonian, theorem_fs_series, CouplingLaw, EnsembleSpec, EnsembleTerm,
    TermOp,
};
use lightcone::graph::{standard_graph, Factor, FactorGraph, GraphKind, WeightedFactorGraph};
use lightcone::sim::{syk_variance, BasisKind, Hamiltonian, HamiltonianTerm, Method, OperatorVector, PauliString};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every Pauli string supported inside `nodes`, identity excluded.
fn strings_inside(n: usize, nodes: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    let k = nodes.len();
    for code in 1..4usize.pow(k as u32) {
        let mut label = vec!['I'; n];
        let mut c = code;
        for &v in nodes {
            label[v] = ['I', 'X', 'Y', 'Z'][c % 4];
            c /= 4;
        }
        out.push(label.into_iter().collect());
    }
    out
}

/// Each factor carries a fixed generic operator `sum_s c_s P_s`; all its
/// strings share one coupling draw.
fn generic_spec(g: &FactorGraph, seed: u64, op_seed: u64) -> EnsembleSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(op_seed);
    let mut terms = Vec::new();
    for (f, x) in g.factors().iter().enumerate() {
        for s in strings_inside(g.num_nodes(), &x.nodes) {
            terms.push(EnsembleTerm { factor: Some(f), op: TermOp::Pauli(s), std: rng.gen_range(0.2..1.0), group: Some(f) });
        }
    }
    EnsembleSpec { kind: BasisKind::Pauli, n: g.num_nodes(), law: CouplingLaw::Gaussian, seed, terms }
}

fn project(o: &OperatorVector, j: usize) -> OperatorVector {
    let terms = o.iter().filter(|&(k, _)| PauliString::from_key(k).acts_on(j));
    OperatorVector::from_terms(o.kind, o.n, terms).unwrap()
}

/// `(A| L_{X_n} ... L_{X_{r+1}} P_j L_{X_r} ... L_{X_1} |A)`.
fn amplitude(h: &Hamiltonian, a: &OperatorVector, j: usize, word: &[usize], r: usize) -> f64 {
    let mut ket = a.clone();
    for &x in &word[..r] {
        ket = h.apply_factor(x, &ket).unwrap();
    }
    let mut bra = a.clone();
    for &x in word[r..].iter().rev() {
        bra = h.apply_factor(x, &bra).unwrap();
    }
    // L is antisymmetric in the real inner product.
    let sign = if (word.len() - r) % 2 == 0 { 1.0 } else { -1.0 };
    sign * bra.dot(&project(&ket, j)).unwrap()
}

fn gaussian_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        (1..k).step_by(2).map(|m| m as f64).product()
    }
}

#[test]
fn tree_pairs_match_nonzero_averages() {
    let g = FactorGraph::new(
        4,
        vec![Factor::new(vec![0, 1], 0), Factor::new(vec![1, 2], 0), Factor::new(vec![2, 3], 0), Factor::new(vec![1, 3], 0)],
    )
    .unwrap();
    let (i, j) = (0, 2);
    let spec = generic_spec(&g, 5, 17);
    let a = OperatorVector::from_terms(
        BasisKind::Pauli,
        4,
        [('X', 0.6), ('Y', -0.48), ('Z', 0.64)].map(|(c, v)| (PauliString::single(i, c).unwrap().to_key(), v)),
    )
    .unwrap();

    // Words in which every factor occurs twice.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut words = Vec::new();
    while words.len() < 120 {
        // Factor 0 is the only one touching i, so it opens both readings.
        let mut set: Vec<usize> = (1..g.num_factors()).collect();
        set.shuffle(&mut rng);
        set.truncate(rng.gen_range(0..=2));
        let mut w: Vec<usize> = set.iter().flat_map(|&x| [x, x]).collect();
        w.shuffle(&mut rng);
        w.insert(0, 0);
        w.push(0);
        let r = rng.gen_range(0..=w.len());
        words.push((w, r));
    }

    let n_samples = 2000u64;
    let samples: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let h = sample_hamiltonian(&spec, k).unwrap();
            words.iter().map(|(w, r)| amplitude(&h, &a, j, w, *r)).collect()
        })
        .collect();

    // Every draw set to one.
    let unit_h = {
        let terms = spec
            .compile()
            .unwrap()
            .into_iter()
            .zip(&spec.terms)
            .map(|((key, sign), t)| HamiltonianTerm { factor: t.factor, key, coupling: sign * t.std })
            .collect();
        Hamiltonian::new(BasisKind::Pauli, 4, terms).unwrap()
    };

    let mut accepted_nonzero = 0;
    for (k, (w, r)) in words.iter().enumerate() {
        let col: Vec<f64> = samples.iter().map(|s| s[k]).collect();
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let se = (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        let accepted = build_causal_tree_pair(&g, i, j, w).is_ok();
        let mut counts = vec![0; g.num_factors()];
        for &x in w {
            counts[x] += 1;
        }
        let moment: f64 = counts.iter().map(|&c| gaussian_moment(c)).product();
        let m0 = amplitude(&unit_h, &a, j, w, *r);
        if accepted {
            let want = moment * m0;
            assert!((mean - want).abs() <= 3.0 * se + 1e-12, "{w:?} r={r}: {mean} vs {want} (se {se})");
            if want.abs() > 1e-9 {
                accepted_nonzero += 1;
            }
        } else {
            assert_eq!(m0, 0.0, "{w:?} r={r} rejected but nonzero");
            assert!(mean.abs() <= 3.0 * se + 1e-12, "{w:?} r={r}: mean {mean}");
        }
    }
    eprintln!("accepted nonzero: {accepted_nonzero}");
    assert!(accepted_nonzero >= 5);
}

#[test]
fn nonzero_words_are_tree_pairs() {
    // Any word, odd counts included: a nonzero amplitude needs an accepted pair.
    let g = standard_graph(&GraphKind::Chain { n: 3 }).unwrap();
    let spec = generic_spec(&g, 1, 2);
    let h = sample_hamiltonian(&spec, 0).unwrap();
    let a = default_initial(BasisKind::Pauli, 3, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nonzero = 0;
    for _ in 0..4000 {
        let len = rng.gen_range(1..=6);
        let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..g.num_factors())).collect();
        let r = rng.gen_range(0..=len);
        let amp = amplitude(&h, &a, 2, &w, r);
        let mut counts = vec![0; g.num_factors()];
        for &x in &w {
            counts[x] += 1;
        }
        if amp.abs() > 1e-12 && counts.iter().all(|c| c % 2 == 0) {
            nonzero += 1;
            assert!(build_causal_tree_pair(&g, 0, 2, &w).is_ok(), "{w:?}");
        }
    }
    eprintln!("nonzero: {nonzero}");
    assert!(nonzero > 0);
}

#[test]
fn mc_below_theorem4_on_tiny_graphs() {
    let graphs = [
        standard_graph(&GraphKind::Chain { n: 4 }).unwrap(),
        standard_graph(&GraphKind::Star { n: 5 }).unwrap(),
        FactorGraph::new(3, vec![Factor::new(vec![0, 1], 0), Factor::new(vec![1, 2], 0), Factor::new(vec![0, 2], 0)]).unwrap(),
    ];
    let times: Vec<f64> = (0..=8).map(|k| 0.15 * k as f64).collect();
    for (gi, g) in graphs.iter().enumerate() {
        let stds: Vec<f64> = (0..g.num_factors()).map(|f| 0.25 + 0.05 * f as f64).collect();
        let wg = WeightedFactorGraph::new(g.clone(), stds.clone()).unwrap();
        let (i, j) = (0, g.num_nodes() - 1);
        let a = default_initial(BasisKind::Pauli, g.num_nodes(), i).unwrap();
        for law in [CouplingLaw::Gaussian, CouplingLaw::Rademacher] {
            let spec = EnsembleSpec::random_pauli(g, &stds, law, 10 + gi as u64, 3).unwrap();
            let mc = mc_expect_c2(&spec, i, j, &a, &times, 400, Method::Dense).unwrap();
            for (k, &t) in times.iter().enumerate() {
                let b = theorem4_bound_bruteforce(&wg, i, j, t, g.num_factors()).unwrap();
                assert!(!b.truncated);
                assert!(mc.mean[k] <= b.value + 3.0 * mc.stderr[k], "graph {gi} {law:?} t={t}: {} > {}", mc.mean[k], b.value);
            }
        }
    }
}

#[test]
fn mc_below_genus_series() {
    // Complete q-local spin graphs with the series' variance.
    for &(n, q) in &[(5usize, 2usize), (6, 2), (5, 3)] {
        let g = standard_graph(&GraphKind::Complete { n, q, m: 1 }).unwrap();
        let fact: f64 = (1..q).map(|k| k as f64).product();
        let std = (fact / (q as f64 * (n as f64).powi(q as i32 - 1))).sqrt();
        let spec = EnsembleSpec::random_pauli(&g, &vec![std; g.num_factors()], CouplingLaw::Gaussian, 21, 8).unwrap();
        let td = theorem_fs_series(n, q, 1.0, 0.0, 0).unwrap().divergence_time;
        let times: Vec<f64> = (0..=6).map(|k| td * k as f64 / 6.5).collect();
        let a = default_initial(BasisKind::Pauli, n, 0).unwrap();
        let mc = mc_expect_c2(&spec, 0, 1, &a, &times, 100, Method::Dense).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let s = theorem_fs_series(n, q, 1.0, t, n - 1).unwrap();
            assert!(s.majorant.is_finite());
            assert!(mc.mean[k] <= s.value + 3.0 * mc.stderr[k], "N={n} q={q} t={t}");
        }
    }
    // SYK, where the series variance is twice the model's.
    let (n, q) = (10, 4);
    assert!(syk_variance(n, q, 1.0) <= 6.0 / (q as f64 * (n as f64).powi(3)));
    let spec = EnsembleSpec::syk(n, q, 1.0, CouplingLaw::Gaussian, 4).unwrap();
    let a = default_initial(BasisKind::Majorana, n, 0).unwrap();
    let td = theorem_fs_series(n, q, 1.0, 0.0, 0).unwrap().divergence_time;
    let times: Vec<f64> = (0..=4).map(|k| td * k as f64 / 4.5).collect();
    let mc = mc_expect_c2(&spec, 0, 1, &a, &times, 20, Method::Dense).unwrap();
    for (k, &t) in times.iter().enumerate() {
        let s = theorem_fs_series(n, q, 1.0, t, n - 1).unwrap();
        assert!(mc.mean[k] <= s.value + 3.0 * mc.stderr[k]);
    }
}

