//! Pairwise MRF instances on planar graphs.
//!
//! States are stored 0-based (`0..D`) in memory. The text format and the
//! command line present them 1-based.

mod generate;
mod io;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::embedding::{Embedding, EmbeddingError};

pub use generate::{gen_type1, gen_type2, random_tree};
pub use io::{read_problem, write_problem, ParseError, ParseErrorKind};

/// Largest supported state count; state subsets are stored as `u32` masks.
pub const MAX_STATES: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("labeling has {got} entries, problem has {expected} nodes")]
    LabelingLength { expected: usize, got: usize },
    #[error("node {node} has state {state}, outside 0..{num_states}")]
    StateOutOfRange { node: usize, state: usize, num_states: usize },
    #[error("state count {0} outside 2..={MAX_STATES}")]
    StateCount(usize),
    #[error("grid side {0} is too small, need at least 2")]
    GridSize(usize),
    #[error("expected {expected} {what} entries, got {got}")]
    TableSize { what: &'static str, expected: usize, got: usize },
    #[error("({0}, {1}) is not an edge of the embedding")]
    NoSuchEdge(usize, usize),
    #[error("potential {value} is not an integer")]
    NotIntegral { value: f64 },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// An assignment of one state (0-based) to every node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling(pub Vec<usize>);

impl Labeling {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Labeling {
    /// 1-based, space separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

/// A pairwise MRF with `D` states per node over a planar embedded graph.
///
/// Edges are stored once as `(i, j)` with `i < j`; the pairwise table of an
/// edge is indexed `[u * D + v]` where `u` is the state of `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MrfProblem {
    num_states: usize,
    embedding: Embedding,
    edges: Vec<(usize, usize)>,
    edge_lookup: HashMap<(usize, usize), usize>,
    unary: Vec<f64>,
    pairwise: Vec<f64>,
}

impl MrfProblem {
    /// A problem with all potentials zero.
    pub fn zeros(num_states: usize, embedding: Embedding) -> Result<Self, ModelError> {
        if !(2..=MAX_STATES).contains(&num_states) {
            return Err(ModelError::StateCount(num_states));
        }
        let edges = embedding.edges();
        let edge_lookup = edges.iter().enumerate().map(|(e, &ij)| (ij, e)).collect();
        let n = embedding.num_nodes();
        Ok(MrfProblem {
            num_states,
            unary: vec![0.0; n * num_states],
            pairwise: vec![0.0; edges.len() * num_states * num_states],
            embedding,
            edges,
            edge_lookup,
        })
    }

    /// Builds a problem from flat tables: `unary` node-major (`N x D`), and
    /// `pairwise` in the canonical edge order of [`Embedding::edges`]
    /// (`E x D x D`).
    pub fn new(
        num_states: usize,
        embedding: Embedding,
        unary: Vec<f64>,
        pairwise: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let mut p = Self::zeros(num_states, embedding)?;
        if unary.len() != p.unary.len() {
            return Err(ModelError::TableSize { what: "unary", expected: p.unary.len(), got: unary.len() });
        }
        if pairwise.len() != p.pairwise.len() {
            return Err(ModelError::TableSize {
                what: "pairwise",
                expected: p.pairwise.len(),
                got: pairwise.len(),
            });
        }
        p.unary = unary;
        p.pairwise = pairwise;
        Ok(p)
    }

    pub fn num_nodes(&self) -> usize {
        self.embedding.num_nodes()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Index of the edge joining `i` and `j`, in either orientation.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_lookup.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn unary(&self, i: usize, u: usize) -> f64 {
        self.unary[i * self.num_states + u]
    }

    pub fn unary_table(&self) -> &[f64] {
        &self.unary
    }

    pub fn node_unary(&self, i: usize) -> &[f64] {
        let d = self.num_states;
        &self.unary[i * d..(i + 1) * d]
    }

    /// Pairwise table of edge `e`, oriented as `edges()[e]`.
    pub fn edge_table(&self, e: usize) -> &[f64] {
        let dd = self.num_states * self.num_states;
        &self.pairwise[e * dd..(e + 1) * dd]
    }

    pub fn pairwise_table(&self) -> &[f64] {
        &self.pairwise
    }

    /// `θ_ij(u, v)`; the orientation of `(i, j)` does not matter.
    pub fn pairwise(&self, i: usize, j: usize, u: usize, v: usize) -> Result<f64, ModelError> {
        let e = self.edge_index(i, j).ok_or(ModelError::NoSuchEdge(i, j))?;
        let (u, v) = if i < j { (u, v) } else { (v, u) };
        Ok(self.edge_table(e)[u * self.num_states + v])
    }

    pub fn set_unary(&mut self, i: usize, u: usize, value: f64) {
        self.unary[i * self.num_states + u] = value;
    }

    pub fn set_pairwise(&mut self, i: usize, j: usize, u: usize, v: usize, value: f64) -> Result<(), ModelError> {
        let e = self.edge_index(i, j).ok_or(ModelError::NoSuchEdge(i, j))?;
        let (u, v) = if i < j { (u, v) } else { (v, u) };
        let d = self.num_states;
        self.pairwise[e * d * d + u * d + v] = value;
        Ok(())
    }

    pub fn check_labeling(&self, x: &Labeling) -> Result<(), ModelError> {
        if x.len() != self.num_nodes() {
            return Err(ModelError::LabelingLength { expected: self.num_nodes(), got: x.len() });
        }
        for (node, &state) in x.0.iter().enumerate() {
            if state >= self.num_states {
                return Err(ModelError::StateOutOfRange { node, state, num_states: self.num_states });
            }
        }
        Ok(())
    }

    pub fn energy(&self, x: &Labeling) -> Result<f64, ModelError> {
        self.check_labeling(x)?;
        Ok(self.energy_unchecked(x.states()))
    }

    pub(crate) fn energy_unchecked(&self, x: &[usize]) -> f64 {
        let d = self.num_states;
        let unary: f64 = x.iter().enumerate().map(|(i, &u)| self.unary[i * d + u]).sum();
        let pairwise: f64 = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(i, j))| self.pairwise[e * d * d + x[i] * d + x[j]])
            .sum();
        unary + pairwise
    }

    /// Smallest and largest potential value over all tables.
    pub fn potential_range(&self) -> (f64, f64) {
        self.unary
            .iter()
            .chain(&self.pairwise)
            .fold((0.0_f64, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn is_integral(&self) -> bool {
        self.unary.iter().chain(&self.pairwise).all(|v| v.fract() == 0.0 && v.abs() < 2f64.powi(52))
    }
}

/// A problem whose potentials are exact integers after scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerScaledProblem {
    base: MrfProblem,
    scale: i64,
}

/// Scale factor applied by [`scale_and_round`].
pub const INTEGER_SCALE: i64 = 100;

/// Multiplies every potential by 100 and rounds to the nearest integer,
/// halves away from zero.
pub fn scale_and_round(problem: &MrfProblem) -> IntegerScaledProblem {
    let scale = INTEGER_SCALE as f64;
    let mut base = problem.clone();
    for v in base.unary.iter_mut().chain(base.pairwise.iter_mut()) {
        *v = (*v * scale).round();
    }
    IntegerScaledProblem { base, scale: INTEGER_SCALE }
}

impl IntegerScaledProblem {
    /// Wraps a problem that is already integer valued, e.g. one read back
    /// from a file written after scaling.
    pub fn from_integral(problem: MrfProblem, scale: i64) -> Result<Self, ModelError> {
        if let Some(&value) = problem.unary.iter().chain(&problem.pairwise).find(|v| v.fract() != 0.0) {
            return Err(ModelError::NotIntegral { value });
        }
        Ok(IntegerScaledProblem { base: problem, scale })
    }

    pub fn problem(&self) -> &MrfProblem {
        &self.base
    }

    pub fn into_problem(self) -> MrfProblem {
        self.base
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Energy computed in integer arithmetic.
    pub fn energy_exact(&self, x: &Labeling) -> Result<i64, ModelError> {
        let p = &self.base;
        p.check_labeling(x)?;
        let d = p.num_states;
        let x = x.states();
        let unary: i64 = x.iter().enumerate().map(|(i, &u)| p.unary[i * d + u] as i64).sum();
        let pairwise: i64 = p
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(i, j))| p.pairwise[e * d * d + x[i] * d + x[j]] as i64)
            .sum();
        Ok(unary + pairwise)
    }
}
