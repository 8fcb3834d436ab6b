//! Seeded synthetic instance families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MrfProblem, ModelError};
use crate::embedding::Embedding;

const GRID_STATES: usize = 3;

fn grid(n: usize) -> Result<MrfProblem, ModelError> {
    if n < 2 {
        return Err(ModelError::GridSize(n));
    }
    MrfProblem::zeros(GRID_STATES, Embedding::grid(n))
}

/// Type-I grid: `D = 3`, zero unaries, every pairwise entry i.i.d. `U[-1, 1]`.
pub fn gen_type1(n: usize, seed: u64) -> Result<MrfProblem, ModelError> {
    let mut p = grid(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in p.pairwise.iter_mut() {
        *v = rng.gen_range(-1.0..=1.0);
    }
    Ok(p)
}

/// Type-II grid: `D = 3`, unaries `U[-1, 1]`; pairwise entries are `0` on the
/// diagonal, `U[-2, 2]` between adjacent states and `16` between states 1
/// and 3.
pub fn gen_type2(n: usize, seed: u64) -> Result<MrfProblem, ModelError> {
    let mut p = grid(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in p.unary.iter_mut() {
        *v = rng.gen_range(-1.0..=1.0);
    }
    let d = GRID_STATES;
    for table in p.pairwise.chunks_mut(d * d) {
        for u in 0..d {
            for v in 0..d {
                table[u * d + v] = match u.abs_diff(v) {
                    0 => 0.0,
                    1 => rng.gen_range(-2.0..=2.0),
                    _ => 16.0,
                };
            }
        }
    }
    Ok(p)
}

/// A random tree on `num_nodes` nodes (each node attached to a uniformly
/// chosen earlier node) with all potentials i.i.d. `U[-1, 1]`.
pub fn random_tree(num_nodes: usize, num_states: usize, seed: u64) -> Result<MrfProblem, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rotation = vec![Vec::new(); num_nodes];
    for v in 1..num_nodes {
        let parent = rng.gen_range(0..v);
        rotation[parent].push(v);
        rotation[v].push(parent);
    }
    let mut p = MrfProblem::zeros(num_states, Embedding::new(rotation)?)?;
    for v in p.unary.iter_mut().chain(p.pairwise.iter_mut()) {
        *v = rng.gen_range(-1.0..=1.0);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type1_shape() {
        let p = gen_type1(10, 7).unwrap();
        assert_eq!(p.num_nodes(), 100);
        assert_eq!(p.num_edges(), 180);
        assert_eq!(p.num_states(), 3);
        assert!(p.unary_table().iter().all(|&v| v == 0.0));
        assert!(p.pairwise_table().iter().all(|&v| (-1.0..=1.0).contains(&v)));
    }

    #[test]
    fn type2_pattern() {
        let p = gen_type2(6, 11).unwrap();
        for e in 0..p.num_edges() {
            let t = p.edge_table(e);
            for u in 0..3usize {
                for v in 0..3 {
                    match u.abs_diff(v) {
                        0 => assert_eq!(t[u * 3 + v], 0.0),
                        1 => assert!((-2.0..=2.0).contains(&t[u * 3 + v])),
                        _ => assert_eq!(t[u * 3 + v], 16.0),
                    }
                }
            }
        }
        assert!(p.unary_table().iter().all(|&v| (-1.0..=1.0).contains(&v)));
    }

    #[test]
    fn deterministic_given_seed() {
        assert_eq!(gen_type1(5, 3).unwrap(), gen_type1(5, 3).unwrap());
        assert_eq!(gen_type2(5, 3).unwrap(), gen_type2(5, 3).unwrap());
        assert_ne!(gen_type1(5, 3).unwrap(), gen_type1(5, 4).unwrap());
    }

    #[test]
    fn small_grids_rejected() {
        assert_eq!(gen_type1(1, 0), Err(ModelError::GridSize(1)));
        assert_eq!(gen_type2(0, 0), Err(ModelError::GridSize(0)));
    }

    #[test]
    fn random_tree_is_a_tree() {
        let p = random_tree(50, 3, 1).unwrap();
        assert_eq!(p.num_edges(), 49);
        assert!(p.embedding().is_connected());
    }
}
