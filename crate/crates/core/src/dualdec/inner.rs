use super::{BoundTrace, Decomposition, DualError, DualState, StepSchedule};
use crate::model::Labeling;

/// Stopping rule for one inner phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    /// Relative improvement of the best bound below which the phase stops.
    pub tolerance: f64,
    /// Number of iterations the improvement is measured over.
    pub window: usize,
    pub max_iterations: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig { tolerance: 1e-4, window: 20, max_iterations: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The caller's gap test succeeded.
    GapClosed,
    /// The best bound stalled over the window.
    Converged,
    IterationCap,
}

/// Best decoding found so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub energy: f64,
    pub labeling: Labeling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerOutcome {
    pub best_lower: f64,
    /// Decoding of the last solved iterate.
    pub last_decoding: Labeling,
    pub iterations: usize,
    pub steps: usize,
    pub reason: StopReason,
}

/// Alternates exact subproblem solves and subgradient steps until the
/// stopping rule fires, then restores the parameters that gave the best
/// bound.
///
/// `incumbent` is updated with every decoding that improves on it.
/// `gap_closed(upper, lower)` is checked after every solve; `observer` sees
/// the state after every step.
#[allow(clippy::too_many_arguments)]
pub fn optimize_inner(
    state: &mut DualState,
    decomp: &Decomposition<'_>,
    schedule: &StepSchedule,
    config: &InnerConfig,
    incumbent: &mut Option<Incumbent>,
    gap_closed: &dyn Fn(f64, f64) -> bool,
    trace: &mut BoundTrace,
    observer: &mut dyn FnMut(&DualState),
) -> Result<InnerOutcome, DualError> {
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_state: Option<DualState> = None;
    let mut history = Vec::new();
    let mut last_decoding = None;
    let mut steps = 0;
    let mut reason = StopReason::IterationCap;

    for m in 0..config.max_iterations.max(1) {
        let sol = state.solve_all(decomp)?;
        let lower = sol.lower_bound();
        if lower > best_lower {
            best_lower = lower;
            best_state = Some(state.clone());
        }

        let x = state.decode(decomp, &sol);
        let energy = decomp.problem.energy_unchecked(x.states());
        if incumbent.as_ref().is_none_or(|inc| energy < inc.energy) {
            *incumbent = Some(Incumbent { energy, labeling: x.clone() });
        }
        last_decoding = Some(x);
        let upper = incumbent.as_ref().map(|inc| inc.energy);
        trace.record(lower, best_lower, upper, state.num_subproblems());

        if upper.is_some_and(|u| gap_closed(u, best_lower)) {
            reason = StopReason::GapClosed;
            break;
        }
        history.push(best_lower);
        if history.len() > config.window {
            let before = history[history.len() - 1 - config.window];
            if best_lower - before <= config.tolerance * best_lower.abs() {
                reason = StopReason::Converged;
                break;
            }
        }
        if m + 1 == config.max_iterations {
            break;
        }

        let ind = state.indicators(decomp, &sol);
        state.subgradient_step(decomp, &sol, &ind, schedule.step(m));
        steps += 1;
        observer(state);
    }

    if let Some(best) = best_state {
        *state = best;
    }
    Ok(InnerOutcome {
        best_lower,
        last_decoding: last_decoding.expect("at least one iteration"),
        iterations: history.len() + usize::from(reason == StopReason::GapClosed),
        steps,
        reason,
    })
}
