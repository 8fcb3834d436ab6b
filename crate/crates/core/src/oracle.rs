//! Exhaustive MAP search for validation on small instances.

use thiserror::Error;

use crate::model::{Labeling, MrfProblem};

/// `3^16` labelings: a 4x4 grid with three states.
pub const DEFAULT_BUDGET: f64 = 43_046_721.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{configurations:e} labelings exceed the oracle budget of {budget:e}")]
    OverBudget { configurations: f64, budget: f64 },
}

/// Number of labelings of `problem`, as a float so that it cannot overflow.
pub fn search_space(problem: &MrfProblem) -> f64 {
    (problem.num_states() as f64).powi(problem.num_nodes() as i32)
}

/// Exact MAP energy and the lexicographically first minimiser, by
/// depth-first enumeration with a simple remaining-cost bound.
///
/// Refuses instances with more than `budget` labelings; `None` removes the
/// limit.
pub fn exact_map(problem: &MrfProblem, budget: Option<f64>) -> Result<(f64, Labeling), OracleError> {
    if let Some(budget) = budget {
        let configurations = search_space(problem);
        if configurations > budget {
            return Err(OracleError::OverBudget { configurations, budget });
        }
    }
    let n = problem.num_nodes();
    let d = problem.num_states();

    // Edges are charged when their larger endpoint is assigned.
    let mut back: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(i, j)) in problem.edges().iter().enumerate() {
        back[j].push((e, i));
    }
    let mut rest = vec![0.0; n + 1];
    for k in (0..n).rev() {
        let unary = problem.node_unary(k).iter().copied().fold(f64::INFINITY, f64::min);
        let pairwise: f64 = back[k]
            .iter()
            .map(|&(e, _)| problem.edge_table(e).iter().copied().fold(f64::INFINITY, f64::min))
            .sum();
        rest[k] = rest[k + 1] + unary + pairwise;
    }

    let mut search = Search { problem, back, rest, d, x: vec![0; n], best: f64::INFINITY, best_x: vec![0; n] };
    search.descend(0, 0.0);
    Ok((search.best, Labeling(search.best_x)))
}

struct Search<'a> {
    problem: &'a MrfProblem,
    back: Vec<Vec<(usize, usize)>>,
    rest: Vec<f64>,
    d: usize,
    x: Vec<usize>,
    best: f64,
    best_x: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, k: usize, partial: f64) {
        if k == self.x.len() {
            if partial < self.best {
                self.best = partial;
                self.best_x.copy_from_slice(&self.x);
            }
            return;
        }
        let slack = 1e-9 * (1.0 + self.best.abs());
        for u in 0..self.d {
            let mut value = partial + self.problem.unary(k, u);
            for &(e, i) in &self.back[k] {
                value += self.problem.edge_table(e)[self.x[i] * self.d + u];
            }
            if value + self.rest[k + 1] > self.best + slack {
                continue;
            }
            self.x[k] = u;
            self.descend(k + 1, value);
        }
    }
}
