//! Combinatorial embeddings of planar graphs.
//!
//! An [`Embedding`] is a rotation system: for every node, the cyclic order of
//! its neighbours around it. Faces are traced from the rotation system and
//! planarity is checked with Euler's formula `V - E + F = 2` on every
//! connected component.

use std::collections::HashSet;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("node {node} lists itself as a neighbour")]
    SelfLoop { node: usize },
    #[error("node {node} refers to node {neighbour}, which does not exist")]
    UnknownNode { node: usize, neighbour: usize },
    #[error("node {node} lists neighbour {neighbour} more than once")]
    DuplicateNeighbour { node: usize, neighbour: usize },
    #[error("edge ({node}, {neighbour}) appears in the rotation of {node} but not of {neighbour}")]
    Asymmetric { node: usize, neighbour: usize },
    #[error("rotation system is not planar: V - E + F = {euler}, expected {expected}")]
    NotPlanar { euler: i64, expected: i64 },
}

/// A directed half of an undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub from: usize,
    pub to: usize,
}

/// A planar rotation system over nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    rotation: Vec<Vec<usize>>,
    /// `position[v][k]` is the index of `v` inside `rotation[rotation[v][k]]`.
    position: Vec<Vec<usize>>,
    num_edges: usize,
}

impl Embedding {
    /// Validates `rotation` and checks that it describes a planar embedding.
    pub fn new(rotation: Vec<Vec<usize>>) -> Result<Self, EmbeddingError> {
        let n = rotation.len();
        let mut num_darts = 0;
        for (v, nbrs) in rotation.iter().enumerate() {
            let mut seen = HashSet::with_capacity(nbrs.len());
            for &w in nbrs {
                if w == v {
                    return Err(EmbeddingError::SelfLoop { node: v });
                }
                if w >= n {
                    return Err(EmbeddingError::UnknownNode { node: v, neighbour: w });
                }
                if !seen.insert(w) {
                    return Err(EmbeddingError::DuplicateNeighbour { node: v, neighbour: w });
                }
            }
            num_darts += nbrs.len();
        }

        let mut position = Vec::with_capacity(n);
        for (v, nbrs) in rotation.iter().enumerate() {
            let mut pos = Vec::with_capacity(nbrs.len());
            for &w in nbrs {
                match rotation[w].iter().position(|&x| x == v) {
                    Some(p) => pos.push(p),
                    None => return Err(EmbeddingError::Asymmetric { node: v, neighbour: w }),
                }
            }
            position.push(pos);
        }

        let embedding = Embedding {
            rotation,
            position,
            num_edges: num_darts / 2,
        };
        let faces = embedding.faces().len() as i64;
        let euler = n as i64 - embedding.num_edges as i64 + faces;
        // Face tracing gives every component its own outer face.
        let expected = 2 * embedding.num_components() as i64;
        if euler != expected {
            return Err(EmbeddingError::NotPlanar { euler, expected });
        }
        Ok(embedding)
    }

    /// The canonical embedding of an `n x n` 4-connected grid. Node `(r, c)`
    /// has index `r * n + c`; neighbours are listed north, east, south, west.
    pub fn grid(n: usize) -> Self {
        let idx = |r: usize, c: usize| r * n + c;
        let mut rotation = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut nbrs = Vec::with_capacity(4);
                if r > 0 {
                    nbrs.push(idx(r - 1, c));
                }
                if c + 1 < n {
                    nbrs.push(idx(r, c + 1));
                }
                if r + 1 < n {
                    nbrs.push(idx(r + 1, c));
                }
                if c > 0 {
                    nbrs.push(idx(r, c - 1));
                }
                rotation.push(nbrs);
            }
        }
        Embedding::new(rotation).expect("grid embedding is planar")
    }

    pub fn num_nodes(&self) -> usize {
        self.rotation.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Cyclic neighbour order of `v`.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .rotation
            .iter()
            .enumerate()
            .flat_map(|(v, nbrs)| nbrs.iter().filter(move |&&w| v < w).map(move |&w| (v, w)))
            .collect();
        edges.sort_unstable();
        edges
    }

    /// The dart that follows `d` around its face.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        let k = self.rotation[d.from]
            .iter()
            .position(|&w| w == d.to)
            .expect("dart belongs to the embedding");
        let back = self.position[d.from][k];
        let around = &self.rotation[d.to];
        Dart {
            from: d.to,
            to: around[(back + 1) % around.len()],
        }
    }

    /// All faces, each as the cyclic sequence of darts bounding it.
    /// Isolated nodes contribute one empty face each.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let mut visited: Vec<Vec<bool>> = self.rotation.iter().map(|n| vec![false; n.len()]).collect();
        let mut faces = Vec::new();
        for v in 0..self.rotation.len() {
            if self.rotation[v].is_empty() {
                faces.push(Vec::new());
                continue;
            }
            for k in 0..self.rotation[v].len() {
                if visited[v][k] {
                    continue;
                }
                let start = Dart { from: v, to: self.rotation[v][k] };
                let mut face = Vec::new();
                let mut d = start;
                loop {
                    let slot = self.rotation[d.from].iter().position(|&w| w == d.to).unwrap();
                    visited[d.from][slot] = true;
                    face.push(d);
                    d = self.next_in_face(d);
                    if d == start {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }

    pub fn num_components(&self) -> usize {
        let n = self.rotation.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &self.rotation[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }
}
