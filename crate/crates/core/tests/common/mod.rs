//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the solver paths it is used to check.

#![allow(dead_code)]

use planar_mrf::embedding::{Dart, Embedding};
use planar_mrf::model::{Labeling, MrfProblem};
use rand::Rng;

/// Minimum total weight over all perfect matchings, by recursion on the
/// lowest unmatched vertex. `None` when no perfect matching exists.
pub fn enumerate_matchings<W>(n: usize, edges: &[(usize, usize, W)]) -> Option<W>
where
    W: Copy + PartialOrd + std::ops::Add<Output = W> + Default,
{
    fn rec<W: Copy + PartialOrd + std::ops::Add<Output = W> + Default>(
        used: &mut Vec<bool>,
        adj: &[Vec<(usize, W)>],
    ) -> Option<W> {
        let Some(v) = used.iter().position(|&u| !u) else {
            return Some(W::default());
        };
        used[v] = true;
        let mut best: Option<W> = None;
        for &(w, wt) in &adj[v] {
            if used[w] {
                continue;
            }
            used[w] = true;
            if let Some(rest) = rec(used, adj) {
                let total = wt + rest;
                if best.is_none_or(|b| total < b) {
                    best = Some(total);
                }
            }
            used[w] = false;
        }
        used[v] = false;
        best
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    rec(&mut vec![false; n], &adj)
}

/// Minimum of `sum_e w_e [x_i != x_j] + c` over all `2^n` binary labelings.
pub fn enumerate_cuts(n: usize, edges: &[(usize, usize)], weights: &[f64], c: f64) -> f64 {
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << n) {
        let mut e = 0.0;
        for (k, &(i, j)) in edges.iter().enumerate() {
            if (mask >> i & 1) != (mask >> j & 1) {
                e += weights[k];
            }
        }
        best = best.min(e + c);
    }
    best
}

/// Term-by-term energy straight from the accessors.
pub fn direct_energy(p: &MrfProblem, x: &[usize]) -> f64 {
    let mut e = 0.0;
    for (i, &u) in x.iter().enumerate() {
        e += p.unary(i, u);
    }
    for &(i, j) in p.edges() {
        e += p.pairwise(i, j, x[i], x[j]).unwrap();
    }
    e
}

/// Exhaustive MAP by odometer enumeration over all `D^N` labelings.
pub fn brute_force_map(p: &MrfProblem) -> (f64, Labeling) {
    let n = p.num_nodes();
    let d = p.num_states();
    let mut x = vec![0usize; n];
    let mut best = (f64::INFINITY, x.clone());
    loop {
        let e = direct_energy(p, &x);
        if e < best.0 {
            best = (e, x.clone());
        }
        let mut k = 0;
        while k < n {
            x[k] += 1;
            if x[k] < d {
                break;
            }
            x[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    (best.0, Labeling(best.1))
}

/// A random connected planar embedding on `n` nodes: a random tree grown by
/// inserting each new node into a random corner of an existing node, then
/// chords added inside faces at random. Each chord splits a face, so the
/// embedding stays planar by construction.
pub fn random_planar_embedding<R: Rng>(n: usize, extra_edges: usize, rng: &mut R) -> Embedding {
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let pos = rng.gen_range(0..=rot[u].len());
        rot[u].insert(pos, v);
        rot[v].push(u);
    }
    let mut added = 0;
    for _ in 0..10 * extra_edges {
        if added == extra_edges {
            break;
        }
        let emb = Embedding::new(rot.clone()).unwrap();
        let faces = emb.faces();
        let face = &faces[rng.gen_range(0..faces.len())];
        if face.len() < 3 {
            continue;
        }
        let a = rng.gen_range(0..face.len());
        let b = rng.gen_range(0..face.len());
        if a == b {
            continue;
        }
        let (da, db) = (face[a], face[b]);
        let (u, w) = (da.from, db.from);
        if u == w || rot[u].contains(&w) {
            continue;
        }
        // Insert w into u's rotation right after the corner where face
        // dart da leaves u, and symmetrically for w.
        insert_in_corner(&mut rot, u, face, a, w);
        insert_in_corner(&mut rot, w, face, b, u);
        added += 1;
    }
    Embedding::new(rot).expect("chord insertion keeps planarity")
}

fn insert_in_corner(rot: &mut [Vec<usize>], node: usize, face: &[Dart], at: usize, new: usize) {
    // The face arrives at `node` from `prev.from` and leaves towards
    // `face[at].to`, which directly follows it in the rotation. The corner
    // between them is where the chord goes.
    let prev = face[(at + face.len() - 1) % face.len()];
    debug_assert_eq!(prev.to, node);
    let k = rot[node].iter().position(|&x| x == face[at].to).unwrap();
    rot[node].insert(k, new);
}
