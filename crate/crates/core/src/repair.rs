//! The outer cycle-repair loop.
//!
//! Each round optimises the current decomposition, decodes an upper bound
//! and either certifies it or adds a one-versus-all planar subproblem built
//! from the decoding.

use std::fmt;

use thiserror::Error;

use crate::dualdec::{
    optimize_inner, BoundTrace, Decomposition, DualError, DualState, Incumbent, InnerConfig, StepSchedule,
};
use crate::model::{Labeling, ModelError, MrfProblem};
use crate::planar_ising::BinaryProjection;

/// Margin below one that an integer duality gap must stay under.
pub const INTEGER_GAP_MARGIN: f64 = 1e-6;
/// Relative gap accepted as closed for real-valued potentials.
pub const REAL_GAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepairError {
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("integer certificates need integer potentials")]
    NotIntegerMode,
}

/// How a duality gap is judged closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapMode {
    /// Upper and lower bound agree to a relative tolerance.
    #[default]
    Real,
    /// All energies are integers, so a gap below one proves optimality.
    Integer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairConfig {
    /// Subproblems the loop may add; hot-start subproblems are not counted.
    pub max_subproblems: usize,
    pub hot_start: bool,
    pub inner: InnerConfig,
    /// `None` derives the schedule from the potentials.
    pub schedule: Option<StepSchedule>,
    pub mode: GapMode,
    /// Seed the next subproblem with the last decoding instead of the best.
    pub literal_recent: bool,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            max_subproblems: 10,
            hot_start: false,
            inner: InnerConfig::default(),
            schedule: None,
            mode: GapMode::Real,
            literal_recent: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    CertifiedOptimal,
    BudgetExhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::CertifiedOptimal => "certified-optimal",
            Status::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairResult {
    pub status: Status,
    pub labeling: Labeling,
    pub energy: f64,
    /// Best lower bound over the whole run.
    pub lower_bound: f64,
    /// Subproblems added by the loop, hot start excluded.
    pub subproblems_added: usize,
    pub hot_start_subproblems: usize,
    /// The loop stopped because its next projection was already present.
    pub repeated_projection: bool,
    pub trace: BoundTrace,
}

impl RepairResult {
    pub fn gap(&self) -> f64 {
        self.energy - self.lower_bound
    }

    /// One-line `key=value` summary.
    pub fn summary(&self) -> String {
        format!(
            "status={} upper={} lower={} gap={} subproblems={} hot_start={}",
            self.status,
            self.energy,
            self.lower_bound,
            self.gap(),
            self.subproblems_added,
            self.hot_start_subproblems
        )
    }
}

/// The `D` uniform one-versus-all projections `S_i = {k}`.
pub fn hot_start_subproblems(num_nodes: usize, num_states: usize) -> Vec<BinaryProjection> {
    (0..num_states).map(|k| BinaryProjection::uniform(num_nodes, num_states, k)).collect()
}

/// Integer optimality certificate: `best_upper - lower < 1 - 1e-6`.
pub fn certificate(mode: GapMode, best_upper: i64, lower: f64) -> Result<bool, RepairError> {
    match mode {
        GapMode::Integer => Ok((best_upper as f64) - lower < 1.0 - INTEGER_GAP_MARGIN),
        GapMode::Real => Err(RepairError::NotIntegerMode),
    }
}

fn gap_closed(mode: GapMode, upper: f64, lower: f64) -> bool {
    match mode {
        GapMode::Integer => certificate(mode, upper.round() as i64, lower).unwrap_or(false),
        GapMode::Real => upper - lower <= REAL_GAP_TOLERANCE * upper.abs().max(1.0),
    }
}

pub fn run(problem: &MrfProblem, config: &RepairConfig) -> Result<RepairResult, RepairError> {
    run_with_observer(problem, config, &mut |_, _| {})
}

/// [`run`], calling `observer` after every subgradient step.
pub fn run_with_observer(
    problem: &MrfProblem,
    config: &RepairConfig,
    observer: &mut dyn FnMut(&Decomposition<'_>, &DualState),
) -> Result<RepairResult, RepairError> {
    if config.mode == GapMode::Integer && !problem.is_integral() {
        return Err(RepairError::NotIntegerMode);
    }
    let decomp = Decomposition::new(problem)?;
    let mut state = DualState::new(&decomp);
    let schedule = config.schedule.unwrap_or_else(|| StepSchedule::for_problem(problem));
    let mode = config.mode;
    let closed = move |upper: f64, lower: f64| gap_closed(mode, upper, lower);

    let mut hot_start_count = 0;
    if config.hot_start {
        for projection in hot_start_subproblems(problem.num_nodes(), problem.num_states()) {
            state.add_subproblem(problem, projection)?;
            hot_start_count += 1;
        }
    }

    let mut trace = BoundTrace::new();
    let mut incumbent: Option<Incumbent> = None;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut added = 0;
    let mut repeated = false;
    let status = loop {
        let outcome = optimize_inner(
            &mut state,
            &decomp,
            &schedule,
            &config.inner,
            &mut incumbent,
            &closed,
            &mut trace,
            &mut |s| observer(&decomp, s),
        )?;
        lower_bound = lower_bound.max(outcome.best_lower);
        let best = incumbent.as_ref().expect("inner loop decodes at least once");
        if closed(best.energy, lower_bound) {
            break Status::CertifiedOptimal;
        }
        if added >= config.max_subproblems {
            break Status::BudgetExhausted;
        }
        let seed = if config.literal_recent { &outcome.last_decoding } else { &best.labeling };
        let projection = BinaryProjection::one_vs_all(seed, problem.num_states());
        // Equal partitions up to complement give the same subproblem family.
        if state.planar().iter().any(|sp| sp.projection.same_partition(&projection)) {
            repeated = true;
            break Status::BudgetExhausted;
        }
        state.add_subproblem(problem, projection)?;
        added += 1;
        trace.mark_event();
    };

    let best = incumbent.expect("inner loop decodes at least once");
    Ok(RepairResult {
        status,
        energy: best.energy,
        labeling: best.labeling,
        lower_bound,
        subproblems_added: added,
        hot_start_subproblems: hot_start_count,
        repeated_projection: repeated,
        trace,
    })
}
