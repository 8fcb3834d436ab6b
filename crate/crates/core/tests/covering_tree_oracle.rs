mod common;

use planar_mrf::covering_tree::{CoveringTree, TreeParams};
use planar_mrf::model::{MrfProblem, Labeling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem<R: Rng>(rng: &mut R, n: usize, extra: usize, d: usize) -> MrfProblem {
    let emb = common::random_planar_embedding(n, extra, rng);
    let mut p = MrfProblem::zeros(d, emb).unwrap();
    for i in 0..n {
        for u in 0..d {
            p.set_unary(i, u, rng.gen_range(-1.0..1.0));
        }
    }
    for (i, j) in p.edges().to_vec() {
        for u in 0..d {
            for v in 0..d {
                p.set_pairwise(i, j, u, v, rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
    }
    p
}

/// Energy of a copy assignment computed from the edge/copy incidence alone.
fn copy_energy(tree: &CoveringTree, params: &TreeParams, x: &[usize]) -> f64 {
    let d = tree.num_states();
    let mut e: f64 = x.iter().enumerate().map(|(c, &s)| params.unary[c * d + s]).sum();
    for k in 0..params.pairwise.len() / (d * d) {
        let (ci, cj) = tree.edge_copies(k);
        e += params.pairwise[k * d * d + x[ci] * d + x[cj]];
    }
    e
}

fn enumerate_min(tree: &CoveringTree, params: &TreeParams) -> f64 {
    let m = tree.num_copies();
    let d = tree.num_states();
    let mut best = f64::INFINITY;
    for code in 0..d.pow(m as u32) {
        let x: Vec<usize> = (0..m).map(|c| code / d.pow(c as u32) % d).collect();
        best = best.min(copy_energy(tree, params, &x));
    }
    best
}

#[test]
fn three_node_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let emb = planar_mrf::embedding::Embedding::new(vec![vec![1], vec![0, 2], vec![1]]).unwrap();
    for _ in 0..20 {
        let mut p = MrfProblem::zeros(3, emb.clone()).unwrap();
        for i in 0..3 {
            for u in 0..3 {
                p.set_unary(i, u, rng.gen_range(-1.0..1.0));
            }
        }
        for (i, j) in [(0, 1), (1, 2)] {
            for u in 0..3 {
                for v in 0..3 {
                    p.set_pairwise(i, j, u, v, rng.gen_range(-1.0..1.0)).unwrap();
                }
            }
        }
        let tree = CoveringTree::build(&p).unwrap();
        assert_eq!(tree.num_duplicates(), 0);
        let sol = tree.solve(&tree.uniform_params(&p)).unwrap();
        let (map, _) = common::brute_force_map(&p);
        assert!((sol.min_energy - map).abs() < 1e-12);
        assert!((p.energy(&tree.decode(&sol)).unwrap() - map).abs() < 1e-12);
    }
}

#[test]
fn two_by_two_grid_copy_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let emb = planar_mrf::embedding::Embedding::grid(2);
    let p = MrfProblem::zeros(3, emb).unwrap();
    let tree = CoveringTree::build(&p).unwrap();
    assert_eq!(tree.num_copies(), 5);
    for _ in 0..20 {
        let params = TreeParams {
            unary: (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            pairwise: (0..36).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let sol = tree.solve(&params).unwrap();
        assert!((sol.min_energy - enumerate_min(&tree, &params)).abs() < 1e-12);
        assert!((copy_energy(&tree, &params, &sol.copy_assignment) - sol.min_energy).abs() < 1e-12);
    }
}

#[test]
fn small_trees_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(2..=5);
        let extra = rng.gen_range(0..=2);
        let d = rng.gen_range(2..=3);
        let p = random_problem(&mut rng, n, extra, d);
        let tree = CoveringTree::build(&p).unwrap();
        assert_eq!(tree.num_duplicates() + n, p.num_edges() + 1);
        if tree.num_copies() > 6 {
            continue;
        }
        let copies = tree.num_copies();
        let params = TreeParams {
            unary: (0..copies * d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            pairwise: (0..p.num_edges() * d * d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let sol = tree.solve(&params).unwrap();
        assert!((sol.min_energy - enumerate_min(&tree, &params)).abs() < 1e-12);
        checked += 1;
    }
}

#[test]
fn decoding_bounds_the_tree_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let extra = rng.gen_range(0..=n);
        let p = random_problem(&mut rng, n, extra, 3);
        let tree = CoveringTree::build(&p).unwrap();
        let sol = tree.solve(&tree.uniform_params(&p)).unwrap();
        let x: Labeling = tree.decode(&sol);
        assert!(p.energy(&x).unwrap() >= sol.min_energy - 1e-12);
        assert_eq!(tree.num_duplicates(), p.num_edges() + 1 - n);
        for i in 0..n {
            assert!(tree.is_spanning(tree.copies_of(i)[0]));
        }
    }
}
