//! Binary planar subproblems and their exact ground states.
//!
//! A subproblem assigns every node a proper subset `S_i` of the states and
//! every edge a disagreement weight `w_ij`. Its binary energy is
//! `sum_ij w_ij [b_i != b_j] + C` where `b_i = [x_i in S_i]`.
//!
//! Ground states are found through the planar dual: the cut edges of any
//! binary labeling form an even subgraph of the dual graph and vice versa,
//! which turns the minimum cut into a minimum T-join, solved by perfect
//! matching between odd faces.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;

use ordered_float::OrderedFloat;
use thiserror::Error;

use crate::embedding::{Dart, Embedding};
use crate::matching::{min_weight_perfect_matching, MatchingError, WeightedGraph};
use crate::model::{Labeling, MAX_STATES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanarError {
    #[error("subset for node {node} must be a nonempty proper subset of the {num_states} states")]
    ImproperSubset { node: usize, num_states: usize },
    #[error("edge {edge} is not of planar binary type")]
    NotBinaryType { edge: usize },
    #[error("node {node} has a nonzero unary term")]
    NonzeroUnary { node: usize },
    #[error("expected {expected} entries, got {got}")]
    Size { expected: usize, got: usize },
    #[error("matching failed: {0}")]
    Matching(#[from] MatchingError),
}

/// A subset of `0..D` as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(u32);

impl StateSet {
    pub const fn empty() -> Self {
        StateSet(0)
    }

    pub fn singleton(u: usize) -> Self {
        debug_assert!(u < MAX_STATES);
        StateSet(1 << u)
    }

    pub fn from_states(states: impl IntoIterator<Item = usize>) -> Self {
        StateSet(states.into_iter().fold(0, |m, u| m | (1 << u)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, u: usize) -> bool {
        self.0 >> u & 1 == 1
    }

    pub fn complement(self, num_states: usize) -> Self {
        StateSet(!self.0 & full_mask(num_states))
    }

    pub fn is_proper(self, num_states: usize) -> bool {
        self.0 != 0 && self.0 != full_mask(num_states) && self.0 & !full_mask(num_states) == 0
    }

    /// Smallest member, if any.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }
}

fn full_mask(num_states: usize) -> u32 {
    if num_states >= 32 {
        u32::MAX
    } else {
        (1u32 << num_states) - 1
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries((0..32).filter(|&u| self.contains(u)).map(|u| u + 1)).finish()
    }
}

/// Per-node partition of the state space into `S_i` and its complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryProjection {
    num_states: usize,
    sets: Vec<StateSet>,
}

impl BinaryProjection {
    pub fn new(num_states: usize, sets: Vec<StateSet>) -> Result<Self, PlanarError> {
        if let Some(node) = sets.iter().position(|s| !s.is_proper(num_states)) {
            return Err(PlanarError::ImproperSubset { node, num_states });
        }
        Ok(BinaryProjection { num_states, sets })
    }

    /// `S_i = {x_i}` for every node.
    pub fn one_vs_all(x: &Labeling, num_states: usize) -> Self {
        BinaryProjection { num_states, sets: x.states().iter().map(|&u| StateSet::singleton(u)).collect() }
    }

    /// `S_i = {state}` for every node.
    pub fn uniform(num_nodes: usize, num_states: usize, state: usize) -> Self {
        BinaryProjection { num_states, sets: vec![StateSet::singleton(state); num_nodes] }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn sets(&self) -> &[StateSet] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> StateSet {
        self.sets[i]
    }

    /// `b_i = [u in S_i]`.
    #[inline]
    pub fn bit(&self, i: usize, u: usize) -> bool {
        self.sets[i].contains(u)
    }

    /// Binary image of a full labeling.
    pub fn project(&self, x: &Labeling) -> BinaryLabeling {
        BinaryLabeling(x.states().iter().enumerate().map(|(i, &u)| self.bit(i, u)).collect())
    }

    /// Whether every node's partition is the same as in `other`, treating a
    /// set and its complement as the same partition.
    pub fn same_partition(&self, other: &BinaryProjection) -> bool {
        self.num_states == other.num_states
            && self.sets.len() == other.sets.len()
            && self
                .sets
                .iter()
                .zip(&other.sets)
                .all(|(&a, &b)| a == b || a == b.complement(self.num_states))
    }
}

/// One bit per node: `true` when the node's state lies in `S_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryLabeling(pub Vec<bool>);

impl BinaryLabeling {
    pub fn flipped(&self) -> Self {
        BinaryLabeling(self.0.iter().map(|b| !b).collect())
    }
}

/// A subproblem of planar binary type: disagreement weights per problem
/// edge (in canonical edge order) plus a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarSubproblem {
    pub projection: BinaryProjection,
    pub weights: Vec<f64>,
    pub constant: f64,
}

impl PlanarSubproblem {
    /// A subproblem with all weights zero.
    pub fn zero(projection: BinaryProjection, num_edges: usize) -> Self {
        PlanarSubproblem { projection, weights: vec![0.0; num_edges], constant: 0.0 }
    }

    /// `[b_i != b_j]` for edge `(i, j)` under `x`.
    #[inline]
    pub fn is_cut(&self, i: usize, j: usize, xi: usize, xj: usize) -> bool {
        self.projection.bit(i, xi) ^ self.projection.bit(j, xj)
    }

    /// Binary energy `sum w [b_i != b_j] + C`.
    pub fn binary_energy(&self, edges: &[(usize, usize)], b: &BinaryLabeling) -> f64 {
        let cut: f64 = edges
            .iter()
            .zip(&self.weights)
            .filter(|(&(i, j), _)| b.0[i] != b.0[j])
            .map(|(_, &w)| w)
            .sum();
        cut + self.constant
    }

    /// Energy of a full labeling under the expanded pairwise potentials.
    pub fn energy(&self, edges: &[(usize, usize)], x: &Labeling) -> f64 {
        self.binary_energy(edges, &self.projection.project(x))
    }

    /// Pairwise tables (`E x D x D`): `w_ij` where the projected endpoints
    /// disagree, zero elsewhere. The constant is not represented.
    pub fn expand(&self, edges: &[(usize, usize)]) -> Vec<f64> {
        let d = self.projection.num_states;
        let mut out = vec![0.0; edges.len() * d * d];
        for (e, &(i, j)) in edges.iter().enumerate() {
            for u in 0..d {
                for v in 0..d {
                    if self.is_cut(i, j, u, v) {
                        out[e * d * d + u * d + v] = self.weights[e];
                    }
                }
            }
        }
        out
    }
}

/// Extracts the disagreement weights from potentials of planar binary type.
/// `unary` is `N x D` and must be zero; each pairwise table must equal one
/// value on the disagreement pattern of `projection` and zero elsewhere.
pub fn binarize(
    edges: &[(usize, usize)],
    unary: &[f64],
    pairwise: &[f64],
    projection: BinaryProjection,
) -> Result<PlanarSubproblem, PlanarError> {
    let d = projection.num_states;
    let n = projection.sets.len();
    if unary.len() != n * d {
        return Err(PlanarError::Size { expected: n * d, got: unary.len() });
    }
    if pairwise.len() != edges.len() * d * d {
        return Err(PlanarError::Size { expected: edges.len() * d * d, got: pairwise.len() });
    }
    if let Some(k) = unary.iter().position(|&v| v != 0.0) {
        return Err(PlanarError::NonzeroUnary { node: k / d });
    }
    let mut weights = Vec::with_capacity(edges.len());
    for (e, &(i, j)) in edges.iter().enumerate() {
        let table = &pairwise[e * d * d..(e + 1) * d * d];
        let mut weight = None;
        for u in 0..d {
            for v in 0..d {
                let value = table[u * d + v];
                if projection.bit(i, u) ^ projection.bit(j, v) {
                    match weight {
                        None => weight = Some(value),
                        Some(w) if w == value => {}
                        Some(_) => return Err(PlanarError::NotBinaryType { edge: e }),
                    }
                } else if value != 0.0 {
                    return Err(PlanarError::NotBinaryType { edge: e });
                }
            }
        }
        weights.push(weight.unwrap_or(0.0));
    }
    Ok(PlanarSubproblem { projection, weights, constant: 0.0 })
}

/// Maps a binary labeling back to states: the smallest member of `S_i`
/// when the bit is set, the smallest member of its complement otherwise.
pub fn lift(b: &BinaryLabeling, projection: &BinaryProjection) -> Labeling {
    let d = projection.num_states;
    Labeling(
        b.0.iter()
            .zip(&projection.sets)
            .map(|(&bit, &s)| {
                let side = if bit { s } else { s.complement(d) };
                side.min().expect("proper subsets have nonempty sides")
            })
            .collect(),
    )
}

/// Precomputed dual structure of an embedded graph, reusable across any
/// number of weight settings.
#[derive(Debug, Clone)]
pub struct PlanarIsing {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    /// Faces on the two sides of every edge; equal for bridges.
    edge_faces: Vec<(usize, usize)>,
    /// Per face: `(neighbouring face, edge)`, bridges excluded.
    dual_adjacency: Vec<Vec<(usize, usize)>>,
    /// Spanning forest `(child, parent, edge)` in BFS order for labeling
    /// reconstruction.
    forest: Vec<(usize, usize, usize)>,
}

impl PlanarIsing {
    pub fn new(embedding: &Embedding) -> Self {
        let edges = embedding.edges();
        let edge_of: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(e, &ij)| (ij, e)).collect();
        let faces = embedding.faces();
        let mut face_of: HashMap<Dart, usize> = HashMap::new();
        for (f, face) in faces.iter().enumerate() {
            for &d in face {
                face_of.insert(d, f);
            }
        }

        let mut edge_faces = Vec::with_capacity(edges.len());
        let mut dual_adjacency = vec![Vec::new(); faces.len()];
        for (e, &(i, j)) in edges.iter().enumerate() {
            let f1 = face_of[&Dart { from: i, to: j }];
            let f2 = face_of[&Dart { from: j, to: i }];
            edge_faces.push((f1, f2));
            if f1 != f2 {
                dual_adjacency[f1].push((f2, e));
                dual_adjacency[f2].push((f1, e));
            }
        }

        let n = embedding.num_nodes();
        let mut forest = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in embedding.neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        forest.push((w, v, edge_of[&(v.min(w), v.max(w))]));
                        queue.push_back(w);
                    }
                }
            }
        }

        PlanarIsing { num_nodes: n, edges, edge_faces, dual_adjacency, forest }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_faces(&self) -> usize {
        self.dual_adjacency.len()
    }

    /// Minimises `sum_ij w_ij [b_i != b_j] + C` exactly. Node 0 of every
    /// connected component is labelled `false`.
    ///
    /// Start from cutting exactly the negative edges. That set is a valid
    /// cut iff every face meets an even number of its edges; the cheapest
    /// repair flips a minimum T-join of the dual, `T` being the odd faces,
    /// where flipping edge `e` costs `|w_e|`. The T-join is a minimum-weight
    /// perfect matching of `T` under dual shortest-path distances.
    pub fn ground_state(&self, sp: &PlanarSubproblem) -> Result<(BinaryLabeling, f64), PlanarError> {
        let weights = &sp.weights;
        if weights.len() != self.edges.len() {
            return Err(PlanarError::Size { expected: self.edges.len(), got: weights.len() });
        }
        let mut cut: Vec<bool> = weights.iter().map(|&w| w < 0.0).collect();
        let terminals = self.odd_faces(&cut);
        if !terminals.is_empty() {
            let trees: Vec<(Vec<f64>, Vec<usize>)> =
                terminals.iter().map(|&t| self.shortest_paths(t, weights)).collect();
            let mut medges = Vec::new();
            for (a, (dist, _)) in trees.iter().enumerate() {
                for (b, &f) in terminals.iter().enumerate().skip(a + 1) {
                    if dist[f].is_finite() {
                        medges.push((a, b, dist[f]));
                    }
                }
            }
            let graph = WeightedGraph::new(terminals.len(), medges)?;
            let m = min_weight_perfect_matching(&graph)?;
            for (a, &b) in m.mate.iter().enumerate() {
                if a > b {
                    continue;
                }
                let pred = &trees[a].1;
                let mut f = terminals[b];
                while f != terminals[a] {
                    let e = pred[f];
                    cut[e] ^= true;
                    let (f1, f2) = self.edge_faces[e];
                    f = if f == f1 { f2 } else { f1 };
                }
            }
        }

        let mut bits = vec![false; self.num_nodes];
        for &(child, parent, e) in &self.forest {
            bits[child] = bits[parent] ^ cut[e];
        }
        let b = BinaryLabeling(bits);
        let energy = sp.binary_energy(&self.edges, &b);
        Ok((b, energy))
    }

    /// Faces meeting an odd number of edges of `cut`. There is always an
    /// even number of them in every component of the dual.
    pub fn odd_faces(&self, cut: &[bool]) -> Vec<usize> {
        let mut odd = vec![false; self.num_faces()];
        for (&(f1, f2), _) in self.edge_faces.iter().zip(cut).filter(|(_, &c)| c) {
            odd[f1] ^= true;
            odd[f2] ^= true;
        }
        (0..odd.len()).filter(|&f| odd[f]).collect()
    }

    /// Dijkstra over the dual with lengths `|w_e|`: distances and the edge
    /// leading into each reached face.
    fn shortest_paths(&self, source: usize, weights: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let mut dist = vec![f64::INFINITY; self.num_faces()];
        let mut pred = vec![usize::MAX; self.num_faces()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((OrderedFloat(0.0), source)));
        while let Some(Reverse((OrderedFloat(d), f))) = heap.pop() {
            if d > dist[f] {
                continue;
            }
            for &(g, e) in &self.dual_adjacency[f] {
                let nd = d + weights[e].abs();
                if nd < dist[g] {
                    dist[g] = nd;
                    pred[g] = e;
                    heap.push(Reverse((OrderedFloat(nd), g)));
                }
            }
        }
        (dist, pred)
    }
}
