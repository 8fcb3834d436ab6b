use crate::model::MrfProblem;

/// Diminishing step sizes `λ_m = λ_0 / (1 + m / τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    initial: f64,
    horizon: f64,
}

impl StepSchedule {
    pub const DEFAULT_HORIZON: f64 = 50.0;

    /// `None` unless both parameters are finite and positive.
    pub fn new(initial: f64, horizon: f64) -> Option<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        (ok(initial) && ok(horizon)).then_some(StepSchedule { initial, horizon })
    }

    /// `λ_0 = 0.5 * (max θ - min θ) / E`, so that the iterates scale with
    /// the potentials. Constant or edgeless problems fall back to `λ_0 = 0.5`.
    pub fn for_problem(problem: &MrfProblem) -> Self {
        let (lo, hi) = problem.potential_range();
        let span = hi - lo;
        let initial = if problem.num_edges() > 0 && span > 0.0 {
            0.5 * span / problem.num_edges() as f64
        } else {
            0.5
        };
        StepSchedule { initial, horizon: Self::DEFAULT_HORIZON }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step(&self, m: usize) -> f64 {
        self.initial / (1.0 + m as f64 / self.horizon)
    }
}
