//! Run descriptions and the per-iteration reports both engines emit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Baseline,
    FastRz,
    FastKickback,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Baseline, Method::FastRz, Method::FastKickback];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::FastRz => "fast-rz",
            Method::FastKickback => "fast-kickback",
        }
    }

    /// Oracle queries charged per amplification iteration.
    pub fn queries_per_iteration(&self) -> u64 {
        match self {
            Method::Baseline => 4,
            Method::FastRz => 2,
            Method::FastKickback => 1,
        }
    }

    /// Queries outside the iteration loop: preparation for the baseline,
    /// ancilla disentangling for the fast routes.
    pub fn fixed_queries(&self) -> u64 {
        match self {
            Method::Baseline => 2,
            Method::FastRz => 2,
            Method::FastKickback => 1,
        }
    }

    /// Closed-form end-to-end query count for `k` iterations.
    pub fn total_queries(&self, k: u64) -> u64 {
        self.fixed_queries() + self.queries_per_iteration() * k
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    #[default]
    None,
    /// Extra ancilla that shrinks the good-state amplitude (baseline only).
    Prakash,
    /// Reflection phases scaled inside the oracle query (fast routes only).
    Scaled,
}

impl Exactness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Exactness::None => "none",
            Exactness::Prakash => "prakash",
            Exactness::Scaled => "scaled",
        }
    }
}

/// Iteration count: chosen from the Grover angle, or fixed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IterationsRepr", into = "IterationsRepr")]
pub enum Iterations {
    #[default]
    Auto,
    Fixed(u64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum IterationsRepr {
    Count(u64),
    Word(String),
}

impl TryFrom<IterationsRepr> for Iterations {
    type Error = Error;

    fn try_from(r: IterationsRepr) -> Result<Self> {
        match r {
            IterationsRepr::Count(k) => Ok(Iterations::Fixed(k)),
            IterationsRepr::Word(w) if w == "auto" => Ok(Iterations::Auto),
            IterationsRepr::Word(w) => Err(Error::Config(format!(
                "iterations: expected \"auto\" or an integer, got {w:?}"
            ))),
        }
    }
}

impl From<Iterations> for IterationsRepr {
    fn from(i: Iterations) -> Self {
        match i {
            Iterations::Auto => IterationsRepr::Word("auto".into()),
            Iterations::Fixed(k) => IterationsRepr::Count(k),
        }
    }
}

impl Iterations {
    pub fn resolve(self, auto: u64) -> u64 {
        match self {
            Iterations::Auto => auto,
            Iterations::Fixed(k) => k,
        }
    }
}

/// Everything an engine needs to execute one run besides the oracle table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunPlan {
    pub method: Method,
    pub exactness: Exactness,
    /// Phase-register width; used by the kickback route only.
    pub phase_width: usize,
    pub iterations: Iterations,
}

impl RunPlan {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            exactness: Exactness::None,
            phase_width: 0,
            iterations: Iterations::Auto,
        }
    }

    pub fn with_exactness(mut self, exactness: Exactness) -> Self {
        self.exactness = exactness;
        self
    }

    pub fn with_phase_width(mut self, q: usize) -> Self {
        self.phase_width = q;
        self
    }

    pub fn with_iterations(mut self, iterations: Iterations) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match (self.method, self.exactness) {
            (Method::Baseline, Exactness::Scaled) => {
                return Err(Error::Config(
                    "exactness: scaled requires a fast method".into(),
                ))
            }
            (Method::FastRz | Method::FastKickback, Exactness::Prakash) => {
                return Err(Error::Config(
                    "exactness: prakash requires method baseline".into(),
                ))
            }
            _ => {}
        }
        if self.method == Method::FastKickback && self.phase_width == 0 {
            return Err(Error::Config("q: kickback route needs q >= 1".into()));
        }
        Ok(())
    }

    /// Queries charged per iteration and outside the loop for this plan.
    pub fn query_costs(&self) -> (u64, u64) {
        (self.method.queries_per_iteration(), self.method.fixed_queries())
    }
}

/// Snapshot after preparation (iteration 0) and after each iteration.
///
/// `queries_cumulative` counts every query needed to produce this row's
/// post-selected output, so for the fast routes it includes the
/// disentangling step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub queries_cumulative: u64,
    pub p_success: f64,
    pub overlap_omega: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub iterations: u64,
    pub total_queries: u64,
    pub p_success: f64,
    pub fidelity: f64,
    /// False when the final post-selection had (numerically) zero probability.
    pub succeeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

/// Extra figures reported by the exact variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSummary {
    pub theta: f64,
    pub theta_bar: f64,
    pub k_bar: u64,
    /// Angle scale applied inside the oracle (1 for the extra-ancilla method).
    pub scale: f64,
    /// Grover angle actually realized by the scaled reflection.
    pub theta_effective: f64,
    pub fidelity_original: f64,
    pub fidelity_scaled: f64,
    /// Bisection steps used to find `scale` (0 when not bisected).
    pub bisection_steps: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub exactness: Exactness,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub records: Vec<IterationRecord>,
    pub summary: RunSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSummary>,
}

impl RunReport {
    pub fn final_record(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

/// A finished run: its report and, when post-selection succeeded, the
/// prepared index-register state.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub output: Option<StateVector>,
}
