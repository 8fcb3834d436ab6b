//! Covering trees: a single tree over copies of the problem's nodes that
//! contains every original edge exactly once.
//!
//! A BFS spanning tree from node 0 is built first; its copies (one per node,
//! with copy id equal to the node id) form the designated spanning subtree
//! used for decoding. Every non-tree edge `(i, j)`, `i < j`, then receives a
//! fresh copy of `j` hanging as a leaf off the spanning copy of `i`, so the
//! number of duplicated copies is `E - V + 1`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::{Labeling, MrfProblem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("problem graph is disconnected")]
    Disconnected,
    #[error("expected {expected} {what} parameters, got {got}")]
    IncompleteParameters { what: &'static str, expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCopy {
    pub node: usize,
    /// 0 for the spanning copy, then 1, 2, ... for duplicates.
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct CoveringTree {
    num_states: usize,
    copies: Vec<NodeCopy>,
    copies_of: Vec<Vec<usize>>,
    /// Per original edge `(i, j)`: the copy of `i` and the copy of `j` joined
    /// by that edge in the tree.
    edge_copies: Vec<(usize, usize)>,
    /// Original edge endpoints, oriented `i < j` as in the problem.
    edge_nodes: Vec<(usize, usize)>,
    /// Copies in an order where every parent precedes its children.
    order: Vec<usize>,
    /// `(parent copy, original edge)` for every copy except the root.
    parent: Vec<Option<(usize, usize)>>,
}

/// Parameters of the tree-structured subproblem: a unary table per copy
/// (`copies x D`) and a pairwise table per original edge (`E x D x D`,
/// oriented as the problem's edges).
#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    pub unary: Vec<f64>,
    pub pairwise: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeSolution {
    pub copy_assignment: Vec<usize>,
    pub min_energy: f64,
}

impl CoveringTree {
    pub fn build(problem: &MrfProblem) -> Result<Self, TreeError> {
        let emb = problem.embedding();
        let n = problem.num_nodes();
        if !emb.is_connected() {
            return Err(TreeError::Disconnected);
        }

        let mut copies: Vec<NodeCopy> = (0..n).map(|node| NodeCopy { node, index: 0 }).collect();
        let mut copies_of: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut in_tree_edge = vec![false; problem.num_edges()];

        if n > 0 {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in emb.neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        let e = problem.edge_index(v, w).expect("rotation edges are problem edges");
                        in_tree_edge[e] = true;
                        parent[w] = Some((v, e));
                        queue.push_back(w);
                    }
                }
            }
        }

        let mut edge_copies = Vec::with_capacity(problem.num_edges());
        for (e, &(i, j)) in problem.edges().iter().enumerate() {
            if in_tree_edge[e] {
                edge_copies.push((i, j));
            } else {
                let c = copies.len();
                copies.push(NodeCopy { node: j, index: copies_of[j].len() });
                copies_of[j].push(c);
                parent.push(Some((i, e)));
                order.push(c);
                edge_copies.push((i, c));
            }
        }

        Ok(CoveringTree {
            num_states: problem.num_states(),
            copies,
            copies_of,
            edge_copies,
            edge_nodes: problem.edges().to_vec(),
            order,
            parent,
        })
    }

    pub fn num_copies(&self) -> usize {
        self.copies.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.copies_of.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn copies(&self) -> &[NodeCopy] {
        &self.copies
    }

    /// Copy ids of node `i`; the first is its spanning copy.
    pub fn copies_of(&self, i: usize) -> &[usize] {
        &self.copies_of[i]
    }

    /// `d_i`, the number of copies of node `i`.
    pub fn copy_count(&self, i: usize) -> usize {
        self.copies_of[i].len()
    }

    pub fn num_duplicates(&self) -> usize {
        self.copies.len() - self.copies_of.len()
    }

    /// `(t_ij, t_ji)` for original edge `e = (i, j)`.
    pub fn edge_copies(&self, e: usize) -> (usize, usize) {
        self.edge_copies[e]
    }

    pub fn is_spanning(&self, copy: usize) -> bool {
        self.copies[copy].index == 0
    }

    /// Tree edges as `(parent copy, child copy, original edge)`.
    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(c, p)| p.map(|(pc, e)| (pc, c, e)))
    }

    /// The allocation used before any optimisation: each node's unary split
    /// evenly across its copies, pairwise tables copied verbatim.
    pub fn uniform_params(&self, problem: &MrfProblem) -> TreeParams {
        let d = self.num_states;
        let mut unary = vec![0.0; self.copies.len() * d];
        for (c, copy) in self.copies.iter().enumerate() {
            let share = self.copies_of[copy.node].len() as f64;
            for u in 0..d {
                unary[c * d + u] = problem.unary(copy.node, u) / share;
            }
        }
        TreeParams { unary, pairwise: problem.pairwise_table().to_vec() }
    }

    fn check_params(&self, params: &TreeParams) -> Result<(), TreeError> {
        let d = self.num_states;
        let expected = self.copies.len() * d;
        if params.unary.len() != expected {
            return Err(TreeError::IncompleteParameters { what: "unary", expected, got: params.unary.len() });
        }
        let expected = self.edge_copies.len() * d * d;
        if params.pairwise.len() != expected {
            return Err(TreeError::IncompleteParameters { what: "pairwise", expected, got: params.pairwise.len() });
        }
        Ok(())
    }

    /// Pairwise cost of edge `e` with `state_of(i)` for the copy of the
    /// lower-indexed endpoint.
    #[inline]
    fn edge_cost(&self, params: &TreeParams, e: usize, lower: usize, upper: usize) -> f64 {
        let d = self.num_states;
        params.pairwise[e * d * d + lower * d + upper]
    }

    /// Energy of a copy assignment under `params`.
    pub fn evaluate(&self, params: &TreeParams, assignment: &[usize]) -> Result<f64, TreeError> {
        self.check_params(params)?;
        let d = self.num_states;
        let unary: f64 = assignment.iter().enumerate().map(|(c, &s)| params.unary[c * d + s]).sum();
        let pairwise: f64 = self
            .edge_copies
            .iter()
            .enumerate()
            .map(|(e, &(ci, cj))| self.edge_cost(params, e, assignment[ci], assignment[cj]))
            .sum();
        Ok(unary + pairwise)
    }

    /// Exact minimisation by min-sum dynamic programming rooted at the
    /// spanning copy of node 0. Ties go to the lowest state index.
    pub fn solve(&self, params: &TreeParams) -> Result<TreeSolution, TreeError> {
        self.check_params(params)?;
        let d = self.num_states;
        let m = self.copies.len();
        if m == 0 {
            return Ok(TreeSolution { copy_assignment: Vec::new(), min_energy: 0.0 });
        }
        let mut cost = params.unary.clone();
        // best[c * d + s]: state of copy c when its parent takes state s.
        let mut best = vec![0usize; m * d];

        for &c in self.order.iter().rev() {
            let Some((p, e)) = self.parent[c] else { continue };
            let child_is_lower = self.edge_nodes[e].0 == self.copies[c].node;
            for s in 0..d {
                let mut arg = 0;
                let mut val = f64::INFINITY;
                for t in 0..d {
                    let pair = if child_is_lower {
                        self.edge_cost(params, e, t, s)
                    } else {
                        self.edge_cost(params, e, s, t)
                    };
                    let v = pair + cost[c * d + t];
                    if v < val {
                        val = v;
                        arg = t;
                    }
                }
                best[c * d + s] = arg;
                cost[p * d + s] += val;
            }
        }

        let root = self.order[0];
        let mut assignment = vec![0usize; m];
        let mut min_energy = f64::INFINITY;
        for s in 0..d {
            if cost[root * d + s] < min_energy {
                min_energy = cost[root * d + s];
                assignment[root] = s;
            }
        }
        for &c in &self.order[1..] {
            let (p, _) = self.parent[c].expect("non-root copies have parents");
            assignment[c] = best[c * d + assignment[p]];
        }
        Ok(TreeSolution { copy_assignment: assignment, min_energy })
    }

    /// Reads each node's state off its spanning copy.
    pub fn decode(&self, sol: &TreeSolution) -> Labeling {
        Labeling(self.copies_of.iter().map(|c| sol.copy_assignment[c[0]]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Embedding;
    use crate::model::{gen_type1, random_tree};

    fn cycle(n: usize) -> MrfProblem {
        let rot = (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect();
        MrfProblem::zeros(2, Embedding::new(rot).unwrap()).unwrap()
    }

    fn check_structure(t: &CoveringTree, p: &MrfProblem) {
        assert_eq!(t.num_copies(), t.tree_edges().count() + 1);
        assert_eq!(t.num_copies(), p.num_edges() + 1);
        assert_eq!(t.num_duplicates(), p.num_edges() + 1 - p.num_nodes());
        let total: usize = (0..p.num_nodes()).map(|i| t.copy_count(i)).sum();
        assert_eq!(total, t.num_copies());
        // every original edge covered exactly once, by copies of its endpoints
        let mut covered = vec![0; p.num_edges()];
        for (a, b, e) in t.tree_edges() {
            covered[e] += 1;
            let (i, j) = p.edges()[e];
            let mut ends = [t.copies()[a].node, t.copies()[b].node];
            ends.sort();
            assert_eq!(ends, [i, j]);
        }
        assert!(covered.iter().all(|&c| c == 1));
        // spanning copies: one per node, connected via spanning-only edges
        let spanning: Vec<_> = t.tree_edges().filter(|&(a, b, _)| t.is_spanning(a) && t.is_spanning(b)).collect();
        assert_eq!(spanning.len(), p.num_nodes() - 1);
        for i in 0..p.num_nodes() {
            assert_eq!(t.copies_of(i).iter().filter(|&&c| t.is_spanning(c)).count(), 1);
        }
    }

    #[test]
    fn tree_input_has_no_duplicates() {
        let p = random_tree(30, 3, 4).unwrap();
        let t = CoveringTree::build(&p).unwrap();
        assert_eq!(t.num_duplicates(), 0);
        check_structure(&t, &p);
    }

    #[test]
    fn four_cycle_duplicates_one_node() {
        let p = cycle(4);
        let t = CoveringTree::build(&p).unwrap();
        assert_eq!(t.num_duplicates(), 1);
        assert_eq!(t.num_copies(), 5);
        check_structure(&t, &p);
        // the chain has two leaves and three internal copies
        let mut degree = vec![0; 5];
        for (a, b, _) in t.tree_edges() {
            degree[a] += 1;
            degree[b] += 1;
        }
        degree.sort();
        assert_eq!(degree, vec![1, 1, 2, 2, 2]);
    }

    #[test]
    fn grid_duplicates() {
        for n in 2..7 {
            let p = gen_type1(n, 0).unwrap();
            let t = CoveringTree::build(&p).unwrap();
            assert_eq!(t.num_duplicates(), (n - 1) * (n - 1));
            check_structure(&t, &p);
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let p = MrfProblem::zeros(2, Embedding::new(vec![vec![1], vec![0], vec![]]).unwrap()).unwrap();
        assert_eq!(CoveringTree::build(&p).unwrap_err(), TreeError::Disconnected);
    }

    #[test]
    fn single_edge_potts() {
        let mut p = MrfProblem::zeros(2, Embedding::new(vec![vec![1], vec![0]]).unwrap()).unwrap();
        p.set_pairwise(0, 1, 0, 1, 1.0).unwrap();
        p.set_pairwise(0, 1, 1, 0, 1.0).unwrap();
        let t = CoveringTree::build(&p).unwrap();
        let sol = t.solve(&t.uniform_params(&p)).unwrap();
        assert_eq!(sol.min_energy, 0.0);
        assert_eq!(sol.copy_assignment, vec![0, 0]);
    }

    #[test]
    fn incomplete_parameters() {
        let p = cycle(4);
        let t = CoveringTree::build(&p).unwrap();
        let mut params = t.uniform_params(&p);
        params.unary.pop();
        assert!(matches!(t.solve(&params), Err(TreeError::IncompleteParameters { what: "unary", .. })));
    }

    #[test]
    fn decode_of_tree_problem_is_tight() {
        let p = random_tree(20, 3, 9).unwrap();
        let t = CoveringTree::build(&p).unwrap();
        let sol = t.solve(&t.uniform_params(&p)).unwrap();
        let x = t.decode(&sol);
        assert!((p.energy(&x).unwrap() - sol.min_energy).abs() < 1e-12);
    }
}
