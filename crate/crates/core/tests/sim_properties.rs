use lightcone::bounds::theorem3_bound;
use lightcone::causal::is_creeping;
use lightcone::graph::{standard_graph, FactorGraph, GraphKind, WeightedFactorGraph};
use lightcone::sim::{
    c_ij_exact, random_pauli_model, BasisKind, Hamiltonian, Key, Method, OperatorVector, PauliString,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_keys(n: usize) -> Vec<Key> {
    let mut v = Vec::new();
    for x in 0..1u64 << n {
        for z in 0..1u64 << n {
            v.push(PauliString { x, z }.to_key());
        }
    }
    v
}

/// Matrix of `L_X` on the full string basis.
fn liouvillian_matrix(h: &Hamiltonian, f: usize, keys: &[Key]) -> DMatrix<f64> {
    let d = keys.len();
    let mut m = DMatrix::zeros(d, d);
    for (c, &k) in keys.iter().enumerate() {
        let v = OperatorVector::basis(BasisKind::Pauli, h.n, k).unwrap();
        let out = h.apply_factor(f, &v).unwrap();
        for (kk, val) in out.iter() {
            let r = keys.iter().position(|&q| q == kk).unwrap();
            m[(r, c)] = val;
        }
    }
    m
}

fn projector_matrix(j: usize, keys: &[Key]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        keys.len(),
        keys.iter().map(|&k| if PauliString::from_key(k).acts_on(j) { 1.0 } else { 0.0 }),
    ))
}

#[test]
fn three_simple_identities() {
    let n = 3;
    let g = FactorGraph::new(
        n,
        vec![
            lightcone::graph::Factor::new(vec![0, 1], 0),
            lightcone::graph::Factor::new(vec![1, 2], 0),
            lightcone::graph::Factor::new(vec![2], 0),
            lightcone::graph::Factor::new(vec![0], 0),
        ],
    )
    .unwrap();
    let keys = all_keys(n);
    for seed in 0..5 {
        let h = random_pauli_model(&g, &[1.0, 0.7, 1.3, 0.4], seed).unwrap();
        let ls: Vec<_> = (0..g.num_factors()).map(|f| liouvillian_matrix(&h, f, &keys)).collect();
        for (f, l) in ls.iter().enumerate() {
            let fac = g.factor(f);
            for i in 0..n {
                for c in ['X', 'Y', 'Z'] {
                    let o = OperatorVector::basis(BasisKind::Pauli, n, PauliString::single(i, c).unwrap().to_key()).unwrap();
                    let lo = h.apply_factor(f, &o).unwrap();
                    if !fac.contains(i) {
                        assert!(lo.is_empty());
                    }
                }
            }
            for j in 0..n {
                let p = projector_matrix(j, &keys);
                let comm = &p * l - l * &p;
                // A one-site term never moves weight on or off its own site,
                // so only multi-site factors break the commutation.
                let moves = fac.contains(j) && fac.len() > 1;
                assert_eq!(comm.amax() < 1e-14, !moves, "factor {f} site {j}");
            }
            for (f2, l2) in ls.iter().enumerate() {
                if !fac.intersects(g.factor(f2)) {
                    assert!((l * l2 - l2 * l).amax() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn non_creeping_products_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut zero_checks = 0;
    for seed in 0..30 {
        let g = standard_graph(&GraphKind::ErdosRenyi { n: 5, q: 2, k: 2.0, m: 1, seed }).unwrap();
        if g.num_factors() == 0 {
            continue;
        }
        let h = random_pauli_model(&g, &vec![1.0; g.num_factors()], seed).unwrap();
        for _ in 0..40 {
            let i = rng.gen_range(0..5);
            let len = rng.gen_range(1..=4);
            let seq: Vec<usize> = (0..len).map(|_| rng.gen_range(0..g.num_factors())).collect();
            let c = ['X', 'Y', 'Z'][rng.gen_range(0..3)];
            let mut o = OperatorVector::basis(BasisKind::Pauli, 5, PauliString::single(i, c).unwrap().to_key()).unwrap();
            for &x in &seq {
                o = h.apply_factor(x, &o).unwrap();
            }
            if !is_creeping(&g, i, &seq) {
                assert!(o.is_empty(), "sequence {seq:?} from {i}");
                zero_checks += 1;
            }
        }
    }
    assert!(zero_checks > 100);
}

#[test]
fn exact_below_path_bound_small() {
    let times: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
    for seed in 0..4 {
        let g = standard_graph(&GraphKind::ErdosRenyi { n: 5, q: 2, k: 2.0, m: 1, seed: 100 + seed }).unwrap();
        let h = random_pauli_model(&g, &vec![1.0; g.num_factors()], seed).unwrap();
        let wg = WeightedFactorGraph::uniform(g, 1.0);
        let a = OperatorVector::pauli("XIIII").unwrap();
        for j in 1..5 {
            let c = c_ij_exact(&h, 0, j, &a, &times, Method::Dense).unwrap();
            for (&t, &v) in times.iter().zip(&c.values) {
                let b = theorem3_bound(&wg, 0, j, t).unwrap_or(0.0);
                assert!(v <= b + 1e-8, "seed {seed} j {j} t {t}: {v} > {b}");
            }
        }
    }
}
