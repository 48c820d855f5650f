//! Reduced simulator for states of the form `Σᵢ |i⟩|0⟩(aᵢ|0⟩ + bᵢ|1⟩)`.
//!
//! Between oracle sandwiches both pipelines stay in this form, so a run only
//! needs the `2N` amplitudes `(aᵢ, bᵢ)` and `O(N)` work per iteration. Each
//! sandwich is replaced by its closed-form per-index 2×2 action; kickback is
//! emulated by quantizing the phases to the `q`-bit grid.

use num_complex::Complex64;

use crate::baseline::iterations_auto;
use crate::error::{Error, Result};
use crate::fastprep::{choose_theta_bar, solve_scale};
use crate::oracle::{
    code_phase, grover_angle, kickback_scale, scaled_code, AngleProfile, OracleTable, PhaseTarget,
};
use crate::report::{
    ExactSummary, Exactness, IterationRecord, Method, RunPlan, RunReport, RunSummary,
};
use crate::simcore::{
    chunked_sum, for_each_block, ExecPolicy, Register, RegisterLayout, StateVector, POSTSELECT_EPS,
};

/// `2N` amplitudes stored as `[a₀, b₀, a₁, b₁, …]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    amps: Vec<Complex64>,
    policy: ExecPolicy,
}

impl ReducedState {
    /// State from `(aᵢ, bᵢ)` pairs; must be normalized within 1e-10.
    pub fn from_pairs(pairs: &[(Complex64, Complex64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Config("reduced state needs at least one entry".into()));
        }
        let state = Self {
            amps: pairs.iter().flat_map(|&(a, b)| [a, b]).collect(),
            policy: ExecPolicy::default(),
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Reads the value = 0, phase = 0 slice of a dense state.
    pub fn from_dense(state: &StateVector) -> Result<Self> {
        let anc = state.layout().span(Register::Ancilla)?;
        let n = 1usize << state.layout().index_width();
        let pairs: Vec<_> = (0..n)
            .map(|i| (state.amplitude(i), state.amplitude(anc.write(i, 1))))
            .collect();
        Ok(Self {
            amps: pairs.iter().flat_map(|&(a, b)| [a, b]).collect(),
            policy: state.policy(),
        })
    }

    pub fn with_policy(mut self, policy: ExecPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Number of index entries `N`.
    pub fn len(&self) -> usize {
        self.amps.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn pair(&self, i: usize) -> (Complex64, Complex64) {
        (self.amps[2 * i], self.amps[2 * i + 1])
    }

    pub fn norm(&self) -> f64 {
        chunked_sum::<f64, _>(self.amps.len(), self.policy, |j| self.amps[j].norm_sqr()).sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &ReducedState) -> Complex64 {
        chunked_sum(self.amps.len(), self.policy, |j| self.amps[j].conj() * other.amps[j])
    }

    pub fn distance(&self, other: &ReducedState) -> f64 {
        chunked_sum::<f64, _>(self.amps.len(), self.policy, |j| {
            (self.amps[j] - other.amps[j]).norm_sqr()
        })
        .sqrt()
    }

    /// Dense state in `layout` with every non-index register except the
    /// ancilla at 0.
    pub fn embed(&self, layout: RegisterLayout) -> Result<StateVector> {
        if layout.index_width() >= usize::BITS as usize || 1usize << layout.index_width() != self.len() {
            return Err(Error::LayoutMismatch);
        }
        let anc = layout.span(Register::Ancilla)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        for i in 0..self.len() {
            amps[i] = self.amps[2 * i];
            amps[anc.write(i, 1)] = self.amps[2 * i + 1];
        }
        StateVector::from_amplitudes(layout, amps).map(|s| s.with_policy(self.policy))
    }

    fn map_pairs<F>(&mut self, f: F)
    where
        F: Fn(usize, &mut Complex64, &mut Complex64) + Sync + Send,
    {
        for_each_block(&mut self.amps, 2, self.policy, |i, pair| {
            let (a, b) = pair.split_at_mut(1);
            f(i, &mut a[0], &mut b[0]);
        });
    }

    /// `ψ ↦ ψ − 2⟨s|ψ⟩ s`
    fn reflect_about(&mut self, s: &ReducedState) {
        let overlap = s.inner(self);
        let factor = overlap * 2.0;
        let src = &s.amps;
        self.map_pairs(|i, a, b| {
            *a -= factor * src[2 * i];
            *b -= factor * src[2 * i + 1];
        });
    }
}

/// Uniform `aᵢ = bᵢ = 1/√(2N)`.
pub fn reduced_prepare_s(entries: usize) -> Result<ReducedState> {
    if entries == 0 {
        return Err(Error::Config("reduced state needs at least one entry".into()));
    }
    let amp = Complex64::new(1.0 / (2.0 * entries as f64).sqrt(), 0.0);
    Ok(ReducedState {
        amps: vec![amp; 2 * entries],
        policy: ExecPolicy::default(),
    })
}

/// `(aᵢ, bᵢ) ↦ (e^(iγᵢ) bᵢ, e^(−iγᵢ) aᵢ)`, the per-index `X · diag(e^(−iγᵢ), e^(iγᵢ))`.
pub fn reduced_u_omega_phases(state: &mut ReducedState, gammas: &[f64]) -> Result<()> {
    if gammas.len() != state.len() {
        return Err(Error::LayoutMismatch);
    }
    state.map_pairs(|i, a, b| {
        let up = Complex64::from_polar(1.0, gammas[i]);
        let (na, nb) = (up * *b, up.conj() * *a);
        *a = na;
        *b = nb;
    });
    Ok(())
}

/// Good-state reflection with unquantized phases `γᵢ = 2cφᵢ`.
pub fn reduced_u_omega(state: &mut ReducedState, angles: &AngleProfile, scale: f64) -> Result<()> {
    let gammas: Vec<f64> = angles.phis.iter().map(|p| 2.0 * scale * p).collect();
    reduced_u_omega_phases(state, &gammas)
}

/// Reflection about the uniform start state.
pub fn reduced_u_s(state: &mut ReducedState) -> Result<()> {
    let s = reduced_prepare_s(state.len())?.with_policy(state.policy);
    state.reflect_about(&s);
    Ok(())
}

/// Per-index ancilla phases for one sandwich of `plan`'s route.
fn route_phases(table: &OracleTable, plan: &RunPlan, scale: f64, target: PhaseTarget) -> Vec<f64> {
    let factor = match target {
        PhaseTarget::Reflection => 2.0,
        PhaseTarget::HalfAngle => 1.0,
    };
    match plan.method {
        Method::FastKickback => {
            let q = plan.phase_width;
            let s = kickback_scale(table, scale, target);
            table
                .values()
                .iter()
                .map(|&v| code_phase(scaled_code(v, s, table.value_width(), q), q))
                .collect()
        }
        _ => table.angles().phis.iter().map(|p| factor * scale * p).collect(),
    }
}

/// Post-selection probability and fidelity to `target` of the index
/// amplitudes `out`.
fn probe(out: &[Complex64], target: &[f64], policy: ExecPolicy) -> (f64, f64) {
    let p = chunked_sum::<f64, _>(out.len(), policy, |i| out[i].norm_sqr());
    if p < POSTSELECT_EPS {
        return (p, 0.0);
    }
    let overlap: Complex64 = chunked_sum(out.len(), policy, |i| out[i] * target[i]);
    (p.min(1.0), (overlap.norm_sqr() / p).min(1.0))
}

/// Index amplitudes with ancilla = 1 after the half-angle phase and `H`.
fn finalized_amplitudes(state: &ReducedState, half: &[f64]) -> Vec<Complex64> {
    (0..state.len())
        .map(|i| {
            let (a, b) = state.pair(i);
            let up = Complex64::from_polar(1.0, half[i]);
            (up.conj() * a - up * b) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect()
}

struct Trace {
    records: Vec<IterationRecord>,
    final_out: Vec<Complex64>,
}

fn fast_trace(
    table: &OracleTable,
    plan: &RunPlan,
    scale: f64,
    k: u64,
    policy: ExecPolicy,
) -> Result<Trace> {
    let reflect = route_phases(table, plan, scale, PhaseTarget::Reflection);
    let half = route_phases(table, plan, scale, PhaseTarget::HalfAngle);
    let target = table.target_state().amplitudes;
    let (per_iter, fixed) = plan.query_costs();

    let phis = table.angles().phis;
    let omega_pairs: Vec<_> = phis
        .iter()
        .map(|p| {
            let phi = p * scale;
            let up = Complex64::from_polar(1.0, phi);
            (up * phi.sin(), -up.conj() * phi.sin())
        })
        .collect();
    let omega_norm = (2.0 * phis.iter().map(|p| (p * scale).sin().powi(2)).sum::<f64>()).sqrt();
    let omega = ReducedState {
        amps: omega_pairs.iter().flat_map(|&(a, b)| [a / omega_norm, b / omega_norm]).collect(),
        policy,
    };

    let mut state = reduced_prepare_s(table.len())?.with_policy(policy);
    let mut records = Vec::with_capacity(k as usize + 1);
    let mut final_out = Vec::new();
    for step in 0..=k {
        if step > 0 {
            reduced_u_omega_phases(&mut state, &reflect)?;
            reduced_u_s(&mut state)?;
        }
        let out = finalized_amplitudes(&state, &half);
        let (p, fidelity) = probe(&out, &target, policy);
        records.push(IterationRecord {
            iteration: step,
            queries_cumulative: fixed + per_iter * step,
            p_success: p,
            overlap_omega: omega.inner(&state).norm(),
            fidelity,
        });
        final_out = out;
    }
    Ok(Trace { records, final_out })
}

fn baseline_trace(table: &OracleTable, k: u64, policy: ExecPolicy) -> Result<Trace> {
    let phis = table.angles().phis;
    let target = table.target_state().amplitudes;
    let root = (table.len() as f64).sqrt();
    let s = ReducedState {
        amps: phis
            .iter()
            .flat_map(|p| [Complex64::new(p.sin() / root, 0.0), Complex64::new(p.cos() / root, 0.0)])
            .collect(),
        policy,
    };
    let good_norm = phis.iter().map(|p| p.sin().powi(2)).sum::<f64>().sqrt();

    let mut state = s.clone();
    let mut records = Vec::with_capacity(k as usize + 1);
    let mut final_out = Vec::new();
    for step in 0..=k {
        if step > 0 {
            state.map_pairs(|_, a, _| *a = -*a);
            state.reflect_about(&s);
        }
        let out: Vec<Complex64> = (0..state.len()).map(|i| state.pair(i).0).collect();
        let (p, fidelity) = probe(&out, &target, policy);
        let overlap: Complex64 = chunked_sum(out.len(), policy, |i| out[i] * phis[i].sin());
        records.push(IterationRecord {
            iteration: step,
            queries_cumulative: Method::Baseline.total_queries(step),
            p_success: p,
            overlap_omega: overlap.norm() / good_norm,
            fidelity,
        });
        final_out = out;
    }
    Ok(Trace { records, final_out })
}

/// Runs `plan` on the reduced engine. The extra-ancilla exact variant is
/// not available here.
pub fn reduced_run(table: &OracleTable, plan: &RunPlan) -> Result<RunReport> {
    reduced_run_with(table, plan, ExecPolicy::default())
}

pub fn reduced_run_with(table: &OracleTable, plan: &RunPlan, policy: ExecPolicy) -> Result<RunReport> {
    plan.validate()?;
    let angles = table.angles();
    let (trace, k, exact) = match (plan.method, plan.exactness) {
        (_, Exactness::Prakash) => {
            return Err(Error::Config(
                "exactness: prakash is only available on the dense engine".into(),
            ))
        }
        (Method::Baseline, _) => {
            let k = plan.iterations.resolve(iterations_auto(angles.theta));
            (baseline_trace(table, k, policy)?, k, None)
        }
        (_, Exactness::None) => {
            let k = plan.iterations.resolve(iterations_auto(angles.theta));
            (fast_trace(table, plan, 1.0, k, policy)?, k, None)
        }
        (_, Exactness::Scaled) => {
            let (theta_bar, k_bar) = choose_theta_bar(angles.theta);
            let (scale, steps) = solve_scale(&angles.phis, theta_bar);
            let k = plan.iterations.resolve(k_bar);
            let trace = fast_trace(table, plan, scale, k, policy)?;
            let scaled_target = angles.scaled(scale);
            let scaled_target = crate::oracle::TargetState::from_phis(&scaled_target.phis).amplitudes;
            let (_, fidelity_scaled) = probe(&trace.final_out, &scaled_target, policy);
            let summary = ExactSummary {
                theta: angles.theta,
                theta_bar,
                k_bar,
                scale,
                theta_effective: grover_angle(&angles.phis, scale),
                fidelity_original: trace.records.last().map_or(0.0, |r| r.fidelity),
                fidelity_scaled,
                bisection_steps: steps,
            };
            (trace, k, Some(summary))
        }
    };
    let last = trace.records.last().expect("at least one record").clone();
    Ok(RunReport {
        method: plan.method,
        exactness: plan.exactness,
        n: table.index_width(),
        m: table.value_width(),
        q: if plan.method == Method::FastKickback { plan.phase_width } else { 0 },
        summary: RunSummary {
            iterations: k,
            total_queries: last.queries_cumulative,
            p_success: last.p_success,
            fidelity: last.fidelity,
            succeeded: last.p_success >= POSTSELECT_EPS,
            wall_ms: None,
        },
        records: trace.records,
        exact,
    })
}
