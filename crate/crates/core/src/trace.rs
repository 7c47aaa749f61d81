//! Per-iteration solver records.
//!
//! Row `k` of a trace describes iterate `x^k`: the objective there, the
//! fixed-point residual certified at that point, and the step used to leave
//! it. A solver that stops at row `k` returns `x^k`.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::linalg::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub objective: f64,
    pub residual: f64,
    pub gap: Option<f64>,
    pub step: f64,
    pub elapsed_ms: f64,
    /// Regularization parameter of the inner solve, for continuation runs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    /// Distance to the configured reference solution.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distance: Option<f64>,
}

/// Summary of one inner solve of a continuation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub gamma: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub distance_to_reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterTrace {
    pub records: Vec<IterRecord>,
    /// Iterates `x^0, x^1, ...`, kept when requested (always for Newton methods).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterates: Vec<Vector>,
    /// FISTA momentum parameters `τ_0, τ_1, ...`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub momentum: Vec<f64>,
    /// Condition estimate of each Newton system solved.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<Stage>,
    pub status: SolveStatus,
    /// Regularization parameter at which a continuation run gave up.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_gamma: Option<f64>,
}

impl IterTrace {
    pub fn is_converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Index of the last recorded iterate.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.residual).collect()
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.residual)
    }

    /// `‖x^k − x_ref‖` for every stored iterate.
    pub fn distances_to(&self, x_ref: &Vector) -> Vec<f64> {
        self.iterates.iter().map(|x| x.distance(x_ref)).collect()
    }

    /// CSV with header `iter,objective,residual,gap,step,ms`, plus a `gamma`
    /// column when any row carries one. Reals use 17 significant digits;
    /// missing gaps are empty fields.
    pub fn to_csv(&self) -> String {
        let with_gamma = self.records.iter().any(|r| r.gamma.is_some());
        let mut out = String::from("iter,objective,residual,gap,step,ms");
        if with_gamma {
            out.push_str(",gamma");
        }
        out.push('\n');
        for r in &self.records {
            let gap = r.gap.map(|g| format!("{g:.16e}")).unwrap_or_default();
            let _ = write!(
                out,
                "{},{:.16e},{:.16e},{},{:.16e},{:.3}",
                r.iter, r.objective, r.residual, gap, r.step, r.elapsed_ms
            );
            if with_gamma {
                let g = r.gamma.map(|g| format!("{g:.16e}")).unwrap_or_default();
                let _ = write!(out, ",{g}");
            }
            out.push('\n');
        }
        out
    }

    /// Appends another trace's rows, renumbering them to continue this one.
    pub(crate) fn append(&mut self, mut other: IterTrace, gamma: f64) {
        let offset = self.records.last().map_or(0, |r| r.iter + 1);
        for r in &mut other.records {
            r.iter += offset;
            r.gamma = Some(gamma);
        }
        self.records.append(&mut other.records);
        self.iterates.append(&mut other.iterates);
        self.conditions.append(&mut other.conditions);
    }
}

/// Accumulates a trace while a solver runs.
pub(crate) struct Recorder {
    start: Instant,
    keep_iterates: bool,
    reference: Option<Vector>,
    trace: IterTrace,
}

impl Recorder {
    pub fn new(keep_iterates: bool, reference: Option<Vector>) -> Self {
        Self {
            start: Instant::now(),
            keep_iterates,
            reference,
            trace: IterTrace {
                records: Vec::new(),
                iterates: Vec::new(),
                momentum: Vec::new(),
                conditions: Vec::new(),
                stages: Vec::new(),
                status: SolveStatus::MaxIterations,
                failed_gamma: None,
            },
        }
    }

    pub fn record(&mut self, iter: usize, x: &Vector, objective: f64, residual: f64, gap: Option<f64>, step: f64) {
        let distance = self.reference.as_ref().map(|r| x.distance(r));
        self.trace.records.push(IterRecord {
            iter,
            objective,
            residual,
            gap,
            step,
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
            gamma: None,
            distance,
        });
        if self.keep_iterates {
            self.trace.iterates.push(x.clone());
        }
    }

    pub fn momentum(&mut self, tau: f64) {
        self.trace.momentum.push(tau);
    }

    pub fn condition(&mut self, estimate: f64) {
        self.trace.conditions.push(estimate);
    }

    pub fn finish(mut self, status: SolveStatus) -> IterTrace {
        self.trace.status = status;
        self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut rec = Recorder::new(true, None);
        let x = Vector::from_slice(&[1.0]);
        rec.record(0, &x, 1.5, 0.25, None, 1.0);
        rec.record(1, &x, 1.0, 0.0, Some(0.0), 1.0);
        let trace = rec.finish(SolveStatus::Converged);
        let csv = trace.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "iter,objective,residual,gap,step,ms");
        assert!(lines[1].starts_with("0,1.5000000000000000e0,2.5000000000000000e-1,,1.0000000000000000e0,"));
        assert!(lines[2].contains(",0.0000000000000000e0,1.0"));
        assert_eq!(trace.iterates.len(), 2);
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn gamma_column_appears_for_continuation() {
        let x = Vector::from_slice(&[0.0]);
        let mut a = Recorder::new(false, None);
        a.record(0, &x, 0.0, 0.0, None, 1.0);
        let mut outer = Recorder::new(false, None).finish(SolveStatus::Converged);
        outer.append(a.finish(SolveStatus::Converged), 0.5);
        let csv = outer.to_csv();
        assert!(csv.starts_with("iter,objective,residual,gap,step,ms,gamma\n"));
        assert!(csv.lines().nth(1).unwrap().ends_with(",5.0000000000000000e-1"));
    }
}
