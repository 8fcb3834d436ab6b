//! Dual decomposition over one covering tree and a growing set of binary
//! planar subproblems.
//!
//! The original potentials are split so that
//!
//! * the tree copies' unaries sum to each node's unary,
//! * the tree's pairwise tables plus the expanded planar subproblems sum to
//!   each edge's pairwise table.
//!
//! Any such split gives a lower bound on the MAP energy: the sum of the
//! independent subproblem minima. Projected subgradient steps move the split
//! towards the tightest bound.
//!
//! The tree's pairwise tables are additionally tracked through a ledger of
//! disagreement costs: one entry per edge and per subset pair `(s1, s2)`
//! used by some planar subproblem on that edge, holding the amount shifted
//! between the tree and the subproblems sharing that pair.

mod inner;
mod schedule;
mod trace;

use rayon::prelude::*;
use thiserror::Error;

use crate::covering_tree::{CoveringTree, TreeError, TreeParams, TreeSolution};
use crate::model::{Labeling, MrfProblem};
use crate::planar_ising::{BinaryLabeling, BinaryProjection, PlanarError, PlanarIsing, PlanarSubproblem, StateSet};

pub use inner::{optimize_inner, Incumbent, InnerConfig, InnerOutcome, StopReason};
pub use schedule::StepSchedule;
pub use trace::{BoundTrace, TraceRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error("projection covers {got} nodes, problem has {expected}")]
    ProjectionSize { expected: usize, got: usize },
}

/// Everything about a problem that stays fixed while the dual parameters
/// move: the problem itself, its covering tree and the planar dual
/// structure used for ground states.
#[derive(Debug, Clone)]
pub struct Decomposition<'p> {
    pub problem: &'p MrfProblem,
    pub tree: CoveringTree,
    pub ising: PlanarIsing,
}

impl<'p> Decomposition<'p> {
    pub fn new(problem: &'p MrfProblem) -> Result<Self, DualError> {
        Ok(Decomposition {
            problem,
            tree: CoveringTree::build(problem)?,
            ising: PlanarIsing::new(problem.embedding()),
        })
    }
}

/// Disagreement cost shared between the tree and the subproblems whose
/// partition on an edge is `subsets`.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    /// `(S_i, S_j)` oriented like the edge `(i, j)`, `i < j`.
    pub subsets: (StateSet, StateSet),
    /// Subproblems using exactly this pair on the edge.
    pub members: Vec<usize>,
    /// The tree's share of the disagreement cost.
    pub cost: f64,
}

impl LedgerEntry {
    #[inline]
    fn disagrees(&self, u: usize, v: usize) -> bool {
        self.subsets.0.contains(u) ^ self.subsets.1.contains(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    num_states: usize,
    tree: TreeParams,
    planar: Vec<PlanarSubproblem>,
    ledger: Vec<Vec<LedgerEntry>>,
    /// Per edge and state pair `u * D + v`: ledger entries whose subset pair
    /// separates `u` from `v`.
    subset_index: Vec<Vec<Vec<usize>>>,
}

/// Exact minimisers of every subproblem for the current parameters.
#[derive(Debug, Clone)]
pub struct Solutions {
    pub tree: TreeSolution,
    pub planar: Vec<(BinaryLabeling, f64)>,
}

impl Solutions {
    /// Sum of the subproblem minima.
    pub fn lower_bound(&self) -> f64 {
        self.tree.min_energy + self.planar.iter().map(|(_, e)| e).sum::<f64>()
    }
}

/// Which subproblem endpoints ended up on different sides of their binary
/// partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisagreementIndicators {
    /// Per edge, per ledger entry: the tree's copies across the edge
    /// disagree with respect to the entry's subset pair.
    pub tree: Vec<Vec<bool>>,
    /// Per subproblem, per edge: the edge is cut in that subproblem.
    pub planar: Vec<Vec<bool>>,
}

/// Largest violations of the reparameterisation constraints.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvariantReport {
    /// `|sum_t theta^t_i - theta_i|` over nodes and states.
    pub unary: f64,
    /// `|theta^0_ij + sum_k theta^k_ij - theta_ij|` over edges and state pairs.
    pub pairwise: f64,
    /// `|theta^0_ij - theta_ij - sum ledger costs|` over edges and state pairs.
    pub ledger_consistency: f64,
    /// `|ledger cost + sum of member weights|` over ledger entries.
    pub ledger_balance: f64,
}

impl InvariantReport {
    pub fn max(&self) -> f64 {
        self.unary.max(self.pairwise).max(self.ledger_consistency).max(self.ledger_balance)
    }
}

impl DualState {
    /// Unaries split evenly over copies, pairwise tables entirely on the
    /// tree, no planar subproblems.
    pub fn new(decomp: &Decomposition<'_>) -> Self {
        let d = decomp.problem.num_states();
        let e = decomp.problem.num_edges();
        DualState {
            num_states: d,
            tree: decomp.tree.uniform_params(decomp.problem),
            planar: Vec::new(),
            ledger: vec![Vec::new(); e],
            subset_index: vec![vec![Vec::new(); d * d]; e],
        }
    }

    pub fn tree_params(&self) -> &TreeParams {
        &self.tree
    }

    pub fn planar(&self) -> &[PlanarSubproblem] {
        &self.planar
    }

    pub fn ledger(&self, edge: usize) -> &[LedgerEntry] {
        &self.ledger[edge]
    }

    /// Ledger entries in `S_ij;uv` for edge `edge`.
    pub fn subset_index(&self, edge: usize, u: usize, v: usize) -> &[usize] {
        &self.subset_index[edge][u * self.num_states + v]
    }

    pub fn num_subproblems(&self) -> usize {
        self.planar.len()
    }

    pub fn has_projection(&self, projection: &BinaryProjection) -> bool {
        self.planar.iter().any(|sp| &sp.projection == projection)
    }

    /// Adds a planar subproblem with all weights zero, which leaves every
    /// constraint and the bound unchanged.
    pub fn add_subproblem(&mut self, problem: &MrfProblem, projection: BinaryProjection) -> Result<usize, DualError> {
        if projection.sets().len() != problem.num_nodes() {
            return Err(DualError::ProjectionSize { expected: problem.num_nodes(), got: projection.sets().len() });
        }
        let k = self.planar.len();
        let d = self.num_states;
        for (e, &(i, j)) in problem.edges().iter().enumerate() {
            let pair = (projection.set(i), projection.set(j));
            let entries = &mut self.ledger[e];
            match entries.iter_mut().find(|entry| entry.subsets == pair) {
                Some(entry) => entry.members.push(k),
                None => {
                    let id = entries.len();
                    let entry = LedgerEntry { subsets: pair, members: vec![k], cost: 0.0 };
                    for u in 0..d {
                        for v in 0..d {
                            if entry.disagrees(u, v) {
                                self.subset_index[e][u * d + v].push(id);
                            }
                        }
                    }
                    entries.push(entry);
                }
            }
        }
        self.planar.push(PlanarSubproblem::zero(projection, problem.num_edges()));
        Ok(k)
    }

    /// Minimises every subproblem: dynamic programming on the tree, perfect
    /// matching for each planar subproblem. Independent solves run in
    /// parallel.
    pub fn solve_all(&self, decomp: &Decomposition<'_>) -> Result<Solutions, DualError> {
        let (tree, planar) = rayon::join(
            || decomp.tree.solve(&self.tree),
            || {
                self.planar
                    .par_iter()
                    .map(|sp| decomp.ising.ground_state(sp))
                    .collect::<Result<Vec<_>, _>>()
            },
        );
        Ok(Solutions { tree: tree?, planar: planar? })
    }

    pub fn indicators(&self, decomp: &Decomposition<'_>, sol: &Solutions) -> DisagreementIndicators {
        let x = &sol.tree.copy_assignment;
        let tree = (0..self.ledger.len())
            .map(|e| {
                let (ci, cj) = decomp.tree.edge_copies(e);
                self.ledger[e].iter().map(|entry| entry.disagrees(x[ci], x[cj])).collect()
            })
            .collect();
        let edges = decomp.problem.edges();
        let planar = sol
            .planar
            .iter()
            .map(|(b, _)| edges.iter().map(|&(i, j)| b.0[i] != b.0[j]).collect())
            .collect();
        DisagreementIndicators { tree, planar }
    }

    /// One projected subgradient step of size `step`.
    ///
    /// Copy unaries move towards agreement with the average over a node's
    /// copies. On every edge and ledger entry, the tree and each member
    /// subproblem move their disagreement cost by the gap between their own
    /// disagreement indicator and the group average. Both updates sum to
    /// zero, so the reparameterisation constraints are preserved.
    pub fn subgradient_step(
        &mut self,
        decomp: &Decomposition<'_>,
        sol: &Solutions,
        ind: &DisagreementIndicators,
        step: f64,
    ) {
        let d = self.num_states;
        let tree = &decomp.tree;
        let x = &sol.tree.copy_assignment;

        let mut counts = vec![0usize; d];
        for i in 0..tree.num_nodes() {
            let copies = tree.copies_of(i);
            if copies.len() < 2 {
                continue;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for &c in copies {
                counts[x[c]] += 1;
            }
            let share = copies.len() as f64;
            for &c in copies {
                for (u, &count) in counts.iter().enumerate() {
                    let own = if x[c] == u { 1.0 } else { 0.0 };
                    self.tree.unary[c * d + u] += step * (own - count as f64 / share);
                }
            }
        }

        let mut deltas = Vec::new();
        for e in 0..self.ledger.len() {
            if self.ledger[e].is_empty() {
                continue;
            }
            deltas.clear();
            for (entry, &tree_cut) in self.ledger[e].iter_mut().zip(&ind.tree[e]) {
                let tree_cut = f64::from(u8::from(tree_cut));
                let cut_sum: f64 =
                    entry.members.iter().map(|&k| f64::from(u8::from(ind.planar[k][e]))).sum::<f64>() + tree_cut;
                let average = cut_sum / (entry.members.len() + 1) as f64;
                for &k in &entry.members {
                    let own = f64::from(u8::from(ind.planar[k][e]));
                    self.planar[k].weights[e] += step * (own - average);
                }
                let delta = step * (tree_cut - average);
                entry.cost += delta;
                deltas.push(delta);
            }
            let table = &mut self.tree.pairwise[e * d * d..(e + 1) * d * d];
            for (uv, ids) in self.subset_index[e].iter().enumerate() {
                table[uv] += ids.iter().map(|&id| deltas[id]).sum::<f64>();
            }
        }
    }

    /// Measures how far the parameters are from satisfying every
    /// reparameterisation constraint.
    pub fn check_invariants(&self, decomp: &Decomposition<'_>) -> InvariantReport {
        let problem = decomp.problem;
        let d = self.num_states;
        let mut report = InvariantReport::default();
        for i in 0..problem.num_nodes() {
            for u in 0..d {
                let total: f64 = decomp.tree.copies_of(i).iter().map(|&c| self.tree.unary[c * d + u]).sum();
                report.unary = report.unary.max((total - problem.unary(i, u)).abs());
            }
        }
        let expanded: Vec<Vec<f64>> = self.planar.iter().map(|sp| sp.expand(problem.edges())).collect();
        for e in 0..problem.num_edges() {
            let original = problem.edge_table(e);
            for uv in 0..d * d {
                let tree = self.tree.pairwise[e * d * d + uv];
                let planar: f64 = expanded.iter().map(|t| t[e * d * d + uv]).sum();
                report.pairwise = report.pairwise.max((tree + planar - original[uv]).abs());
                let ledger: f64 = self.subset_index[e][uv].iter().map(|&id| self.ledger[e][id].cost).sum();
                report.ledger_consistency = report.ledger_consistency.max((tree - original[uv] - ledger).abs());
            }
            for entry in &self.ledger[e] {
                let members: f64 = entry.members.iter().map(|&k| self.planar[k].weights[e]).sum();
                report.ledger_balance = report.ledger_balance.max((entry.cost + members).abs());
            }
        }
        report
    }

    /// Spanning-tree decoding of a tree solution.
    pub fn decode(&self, decomp: &Decomposition<'_>, sol: &Solutions) -> Labeling {
        decomp.tree.decode(&sol.tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Embedding;
    use crate::model::{gen_type1, gen_type2};

    fn four_cycle() -> MrfProblem {
        let rot = (0..4).map(|v| vec![(v + 3) % 4, (v + 1) % 4]).collect();
        let mut p = MrfProblem::zeros(2, Embedding::new(rot).unwrap()).unwrap();
        for (i, j) in [(0, 1), (1, 2), (2, 3)] {
            p.set_pairwise(i, j, 0, 1, 1.0).unwrap();
            p.set_pairwise(i, j, 1, 0, 1.0).unwrap();
        }
        p.set_pairwise(0, 3, 0, 0, 1.0).unwrap();
        p.set_pairwise(0, 3, 1, 1, 1.0).unwrap();
        p
    }

    #[test]
    fn initial_split() {
        let mut p = four_cycle();
        p.set_unary(2, 1, 4.0);
        p.set_unary(0, 0, 3.0);
        let dec = Decomposition::new(&p).unwrap();
        let s = DualState::new(&dec);
        // BFS from node 0 leaves (1, 2) as the non-tree edge, duplicating node 2
        assert_eq!(dec.tree.copy_count(2), 2);
        assert_eq!(dec.tree.num_duplicates(), 1);
        for &c in dec.tree.copies_of(2) {
            assert_eq!(s.tree_params().unary[c * 2 + 1], 2.0);
        }
        assert_eq!(s.tree_params().unary[dec.tree.copies_of(0)[0] * 2], 3.0);
        assert_eq!(s.check_invariants(&dec).max(), 0.0);
        assert_eq!(s.num_subproblems(), 0);
    }

    #[test]
    fn invariants_hold_on_grid() {
        let p = gen_type2(3, 1).unwrap();
        let dec = Decomposition::new(&p).unwrap();
        let s = DualState::new(&dec);
        assert_eq!(s.check_invariants(&dec).max(), 0.0);
    }

    #[test]
    fn agreement_leaves_state_unchanged() {
        let p = gen_type1(3, 2).unwrap();
        let dec = Decomposition::new(&p).unwrap();
        let mut s = DualState::new(&dec);
        s.add_subproblem(&p, BinaryProjection::uniform(9, 3, 0)).unwrap();
        // Everything in state 0: all copies agree, nothing is cut.
        let sol = Solutions {
            tree: TreeSolution { copy_assignment: vec![0; dec.tree.num_copies()], min_energy: 0.0 },
            planar: vec![(BinaryLabeling(vec![false; 9]), 0.0)],
        };
        let ind = s.indicators(&dec, &sol);
        let before = s.clone();
        s.subgradient_step(&dec, &sol, &ind, 0.7);
        assert_eq!(s, before);
    }

    #[test]
    fn unary_update_on_disagreeing_duplicate() {
        let p = four_cycle();
        let dec = Decomposition::new(&p).unwrap();
        let mut s = DualState::new(&dec);
        let copies = dec.tree.copies_of(2).to_vec();
        let mut x = vec![0; dec.tree.num_copies()];
        x[copies[1]] = 1;
        let sol = Solutions { tree: TreeSolution { copy_assignment: x, min_energy: 0.0 }, planar: vec![] };
        let ind = s.indicators(&dec, &sol);
        s.subgradient_step(&dec, &sol, &ind, 0.5);
        let un = &s.tree_params().unary;
        // copy in state 0: +λ/2 on state 0, -λ/2 on state 1; the other copy mirrored
        assert_eq!(un[copies[0] * 2], 0.25);
        assert_eq!(un[copies[0] * 2 + 1], -0.25);
        assert_eq!(un[copies[1] * 2], -0.25);
        assert_eq!(un[copies[1] * 2 + 1], 0.25);
        assert_eq!(s.check_invariants(&dec).max(), 0.0);
    }

    #[test]
    fn planar_cut_shifts_cost_from_tree() {
        let p = four_cycle();
        let dec = Decomposition::new(&p).unwrap();
        let mut s = DualState::new(&dec);
        let proj = BinaryProjection::uniform(4, 2, 0);
        s.add_subproblem(&p, proj).unwrap();
        // tree uncut everywhere, planar cuts edge (0, 1) only
        let sol = Solutions {
            tree: TreeSolution { copy_assignment: vec![0; 5], min_energy: 0.0 },
            planar: vec![(BinaryLabeling(vec![true, false, false, false]), 0.0)],
        };
        let mut ind = s.indicators(&dec, &sol);
        // (0, 3) is cut too by that labeling; keep only edge (0, 1) cut
        let e01 = p.edge_index(0, 1).unwrap();
        let e03 = p.edge_index(0, 3).unwrap();
        ind.planar[0][e03] = false;
        let lambda = 0.8;
        s.subgradient_step(&dec, &sol, &ind, lambda);
        assert!((s.planar()[0].weights[e01] - lambda / 2.0).abs() < 1e-15);
        assert_eq!(s.ledger(e01)[0].cost, -lambda / 2.0);
        let t = &s.tree_params().pairwise[e01 * 4..e01 * 4 + 4];
        // disagreement pattern of ({1}, {1}) is (1,2) and (2,1)
        assert_eq!(t, &[0.0, 1.0 - lambda / 2.0, 1.0 - lambda / 2.0, 0.0]);
        assert!(s.check_invariants(&dec).max() < 1e-15);
    }

    #[test]
    fn shared_subset_pairs_share_a_ledger_entry() {
        let p = gen_type1(2, 0).unwrap();
        let dec = Decomposition::new(&p).unwrap();
        let mut s = DualState::new(&dec);
        s.add_subproblem(&p, BinaryProjection::uniform(4, 3, 0)).unwrap();
        s.add_subproblem(&p, BinaryProjection::uniform(4, 3, 0)).unwrap();
        s.add_subproblem(&p, BinaryProjection::uniform(4, 3, 2)).unwrap();
        for e in 0..p.num_edges() {
            assert_eq!(s.ledger(e).len(), 2);
            assert_eq!(s.ledger(e)[0].members, vec![0, 1]);
            // (u, v) = (0, 1): separated by ({0},{0}) but not by ({2},{2})
            assert_eq!(s.subset_index(e, 0, 1), &[0]);
            assert_eq!(s.subset_index(e, 2, 2), &[] as &[usize]);
            assert_eq!(s.subset_index(e, 0, 2), &[0, 1]);
        }
        assert!(matches!(
            s.add_subproblem(&p, BinaryProjection::uniform(3, 3, 0)),
            Err(DualError::ProjectionSize { .. })
        ));
    }
}
