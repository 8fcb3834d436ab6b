use std::io::{self, Write};

/// One inner iteration's bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Subproblem solves performed so far, tree included.
    pub solver_steps: usize,
    pub lower_bound: f64,
    pub best_lower_bound: f64,
    /// `None` until a labeling has been decoded.
    pub best_upper_bound: Option<f64>,
    pub subproblems: usize,
    /// Set on the first row after a subproblem was added.
    pub event: bool,
}

/// Append-only record of a whole run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundTrace {
    rows: Vec<TraceRow>,
    solver_steps: usize,
    pending_event: bool,
}

impl BoundTrace {
    pub const HEADER: &'static str =
        "iteration,solver_steps,lower_bound,best_lower_bound,best_upper_bound,subproblems,event";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Flags the next recorded row as following a subproblem addition.
    pub fn mark_event(&mut self) {
        self.pending_event = true;
    }

    pub fn record(&mut self, lower: f64, best_lower: f64, best_upper: Option<f64>, subproblems: usize) {
        self.solver_steps += 1 + subproblems;
        let event = std::mem::take(&mut self.pending_event);
        self.rows.push(TraceRow {
            iteration: self.rows.len(),
            solver_steps: self.solver_steps,
            lower_bound: lower,
            best_lower_bound: best_lower,
            best_upper_bound: best_upper,
            subproblems,
            event,
        });
    }

    /// Comma-separated rows under [`Self::HEADER`], optionally followed by a
    /// `#`-prefixed summary line.
    pub fn write_csv<W: Write>(&self, mut out: W, summary: Option<&str>) -> io::Result<()> {
        writeln!(out, "{}", Self::HEADER)?;
        for r in &self.rows {
            let upper = r.best_upper_bound.map(|u| u.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.iteration,
                r.solver_steps,
                r.lower_bound,
                r.best_lower_bound,
                upper,
                r.subproblems,
                u8::from(r.event)
            )?;
        }
        if let Some(s) = summary {
            writeln!(out, "# {s}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self, summary: Option<&str>) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, summary).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}
