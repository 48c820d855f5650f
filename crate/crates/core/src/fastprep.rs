//! Phase-encoded amplitude amplification.
//!
//! The good-state reflection is a per-index ancilla phase `diag(e^(−iβᵢ),
//! e^(iβᵢ))` followed by `X`, with `βᵢ = 2φᵢ`. The phase is produced either
//! by a value-register sandwich `U_f⁻¹ · phase · U_f` (two queries) or by
//! phase kickback from a dedicated register (one query). The reflection
//! about the start state needs no oracle at all.
//!
//! The amplified state still carries the ancilla phases `e^(±iφᵢ)`;
//! [`finalize`] removes them with one half-angle sandwich and a Hadamard.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::baseline::{hadamard_index, iterations_auto, pinned_outcomes, probe_output, run_reference};
use crate::error::{Error, Result};
use crate::oracle::{
    apply_uf, apply_uf_scaled, apply_uf_scaled_signed, grover_angle, kickback_scale, OracleDirection,
    OracleTable, PhaseTarget, QueryLedger, TargetState,
};
use crate::report::{ExactSummary, Exactness, Iterations, Method, RunOutcome};
use crate::report::IterationRecord;
use crate::simcore::{
    fidelity_mod_phase, ExecPolicy, GateKind, GateSpec, Matrix2, QftDirection, Register, RegisterLayout,
    StateVector, POSTSELECT_EPS,
};

/// Tolerance for "register is |0⟩" contract checks.
const CLEAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Value-register sandwich, two queries per reflection.
    Rz,
    /// Phase kickback, one query per reflection.
    Kickback,
}

/// How the kickback direction follows the ancilla.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KickbackMode {
    /// Forward QFT where the ancilla is 1, inverse QFT where it is 0.
    #[default]
    ControlledQft,
    /// Plain QFT with an ancilla-signed addition.
    SignedAdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FastMethod {
    pub route: Route,
    /// Phase-register width (kickback only).
    pub phase_width: usize,
    pub mode: KickbackMode,
}

impl FastMethod {
    pub fn rz() -> Self {
        Self {
            route: Route::Rz,
            phase_width: 0,
            mode: KickbackMode::default(),
        }
    }

    pub fn kickback(phase_width: usize) -> Self {
        Self {
            route: Route::Kickback,
            phase_width,
            mode: KickbackMode::default(),
        }
    }

    pub fn with_mode(mut self, mode: KickbackMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn method(&self) -> Method {
        match self.route {
            Route::Rz => Method::FastRz,
            Route::Kickback => Method::FastKickback,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.route == Route::Kickback && self.phase_width == 0 {
            return Err(Error::Config("q: kickback route needs q >= 1".into()));
        }
        Ok(())
    }
}

/// Normalized good state and its complement. `omega_perp` is absent when
/// every entry sits at `|φ| = π/2`.
#[derive(Clone, Debug)]
pub struct OmegaPair {
    pub omega: StateVector,
    pub omega_perp: Option<StateVector>,
}

/// Index and ancilla, plus the value register (rz) or the phase register
/// (kickback).
pub fn fast_layout(table: &OracleTable, method: &FastMethod) -> Result<RegisterLayout> {
    method.validate()?;
    match method.route {
        Route::Rz => RegisterLayout::new(table.index_width(), table.value_width(), 1, 0),
        Route::Kickback => RegisterLayout::new(table.index_width(), 0, 1, method.phase_width),
    }
}

/// `H^⊗n ⊗ I ⊗ H` on the all-zeros state; no queries.
pub fn prepare_s_fast(layout: RegisterLayout) -> Result<StateVector> {
    let mut state = StateVector::zero(layout);
    hadamard_index(&mut state)?;
    let anc = layout.qubit(Register::Ancilla)?;
    state.apply_gate(&GateSpec::new(GateKind::H, anc))?;
    Ok(state)
}

fn require_clear(state: &StateVector, register: Register) -> Result<()> {
    let p = state.register_probability(register, 0)?;
    if p < 1.0 - CLEAR_TOL {
        return Err(Error::Contract(format!(
            "{register:?} register must be |0> outside the oracle sandwich (p = {p})"
        )));
    }
    Ok(())
}

/// Ancilla phase `diag(e^(−iγ), e^(iγ))` with `γ = angle_scale · φ(v)`,
/// sandwiched between `U_f` and `U_f⁻¹`.
fn rz_sandwich(
    state: &mut StateVector,
    table: &OracleTable,
    angle_scale: f64,
    ledger: &mut QueryLedger,
) -> Result<()> {
    require_clear(state, Register::Value)?;
    apply_uf(state, table, OracleDirection::Forward, Register::Value, ledger)?;
    let value = state.layout().span(Register::Value)?;
    let anc = state.layout().qubit(Register::Ancilla)?;
    let mats: Vec<Matrix2> = (0..1u64 << table.value_width())
        .map(|code| Matrix2::phase_pair(angle_scale * table.angle_of_code(code)))
        .collect();
    state.apply_conditioned(anc, |lo| Some(mats[value.read(lo) as usize]))?;
    apply_uf(state, table, OracleDirection::Inverse, Register::Value, ledger)
}

/// Same ancilla phase, quantized, kicked back from the phase register with
/// a single scaled query.
fn kickback_sandwich(
    state: &mut StateVector,
    table: &OracleTable,
    oracle_scale: f64,
    mode: KickbackMode,
    ledger: &mut QueryLedger,
) -> Result<()> {
    require_clear(state, Register::Phase)?;
    let anc = state.layout().qubit(Register::Ancilla)?;
    state.x_register(Register::Phase)?;
    match mode {
        KickbackMode::ControlledQft => {
            state.controlled_qft_register(Register::Phase, QftDirection::Forward, (anc, true))?;
            state.controlled_qft_register(Register::Phase, QftDirection::Inverse, (anc, false))?;
            apply_uf_scaled(
                state,
                table,
                oracle_scale,
                Register::Phase,
                OracleDirection::Forward,
                ledger,
            )?;
            state.controlled_qft_register(Register::Phase, QftDirection::Inverse, (anc, true))?;
            state.controlled_qft_register(Register::Phase, QftDirection::Forward, (anc, false))?;
        }
        KickbackMode::SignedAdd => {
            state.qft_register(Register::Phase, QftDirection::Forward)?;
            apply_uf_scaled_signed(state, table, oracle_scale, Register::Phase, anc, ledger)?;
            state.qft_register(Register::Phase, QftDirection::Inverse)?;
        }
    }
    state.x_register(Register::Phase)
}

fn phase_sandwich(
    state: &mut StateVector,
    table: &OracleTable,
    method: &FastMethod,
    scale: f64,
    target: PhaseTarget,
    ledger: &mut QueryLedger,
) -> Result<()> {
    match method.route {
        Route::Rz => {
            let factor = match target {
                PhaseTarget::Reflection => 2.0,
                PhaseTarget::HalfAngle => 1.0,
            };
            rz_sandwich(state, table, factor * scale, ledger)
        }
        Route::Kickback => {
            check_scale(scale)?;
            let oracle_scale = kickback_scale(table, scale, target);
            kickback_sandwich(state, table, oracle_scale, method.mode, ledger)
        }
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Config(format!("angle scale must be positive, got {scale}")));
    }
    Ok(())
}

fn ancilla_x(state: &mut StateVector) -> Result<()> {
    let anc = state.layout().qubit(Register::Ancilla)?;
    state.apply_gate(&GateSpec::new(GateKind::X, anc))
}

/// Reflection about the complement of the good state, two queries.
pub fn u_omega_rz(state: &mut StateVector, table: &OracleTable, ledger: &mut QueryLedger) -> Result<()> {
    u_omega_rz_scaled(state, table, 1.0, ledger)
}

/// [`u_omega_rz`] with every `βᵢ` multiplied by `scale`.
pub fn u_omega_rz_scaled(
    state: &mut StateVector,
    table: &OracleTable,
    scale: f64,
    ledger: &mut QueryLedger,
) -> Result<()> {
    u_omega(state, table, &FastMethod::rz(), scale, ledger)
}

/// Kickback form of [`u_omega_rz`], one query. The phase register width
/// comes from the state layout.
pub fn u_omega_kickback(
    state: &mut StateVector,
    table: &OracleTable,
    scale: f64,
    ledger: &mut QueryLedger,
) -> Result<()> {
    u_omega_kickback_with(state, table, scale, KickbackMode::default(), ledger)
}

pub fn u_omega_kickback_with(
    state: &mut StateVector,
    table: &OracleTable,
    scale: f64,
    mode: KickbackMode,
    ledger: &mut QueryLedger,
) -> Result<()> {
    let q = state.layout().span(Register::Phase)?.width;
    u_omega(state, table, &FastMethod::kickback(q).with_mode(mode), scale, ledger)
}

/// Good-state reflection on the route chosen by `method`.
pub fn u_omega(
    state: &mut StateVector,
    table: &OracleTable,
    method: &FastMethod,
    scale: f64,
    ledger: &mut QueryLedger,
) -> Result<()> {
    phase_sandwich(state, table, method, scale, PhaseTarget::Reflection, ledger)?;
    ancilla_x(state)
}

/// `(H_index ⊗ H_anc) R₀ (H_index ⊗ H_anc)`; no queries.
pub fn u_s_fast(state: &mut StateVector) -> Result<()> {
    let anc = state.layout().qubit(Register::Ancilla)?;
    let regs: Vec<Register> = [Register::Index, Register::Ancilla]
        .into_iter()
        .filter(|r| state.layout().has(*r))
        .collect();
    hadamard_index(state)?;
    state.apply_gate(&GateSpec::new(GateKind::H, anc))?;
    state.reflect_zero(&regs)?;
    hadamard_index(state)?;
    state.apply_gate(&GateSpec::new(GateKind::H, anc))
}

/// Half-angle sandwich and `H` on the ancilla: the good branch ends at
/// ancilla 1, the complement at ancilla 0.
fn disentangle(
    state: &mut StateVector,
    table: &OracleTable,
    method: &FastMethod,
    scale: f64,
    ledger: &mut QueryLedger,
) -> Result<()> {
    phase_sandwich(state, table, method, scale, PhaseTarget::HalfAngle, ledger)?;
    let anc = state.layout().qubit(Register::Ancilla)?;
    state.apply_gate(&GateSpec::new(GateKind::H, anc))
}

/// Disentangles the ancilla and post-selects ancilla = 1 with every other
/// non-index register at 0. Returns the probability and the index state.
pub fn finalize(
    state: &mut StateVector,
    table: &OracleTable,
    method: &FastMethod,
    ledger: &mut QueryLedger,
) -> Result<(f64, StateVector)> {
    finalize_scaled(state, table, method, 1.0, ledger)
}

pub fn finalize_scaled(
    state: &mut StateVector,
    table: &OracleTable,
    method: &FastMethod,
    scale: f64,
    ledger: &mut QueryLedger,
) -> Result<(f64, StateVector)> {
    disentangle(state, table, method, scale, ledger)?;
    let pinned = pinned_outcomes(state.layout(), 1);
    let p = state.joint_probability(&pinned)?;
    if p < POSTSELECT_EPS {
        return Err(Error::ImpossiblePostselection {
            register: Register::Ancilla,
            outcome: 1,
        });
    }
    Ok((p.min(1.0), state.slice(Register::Index, &pinned)?))
}

/// `ω ∝ Σ sin(cφᵢ)|i⟩(e^(icφᵢ)|0⟩ − e^(−icφᵢ)|1⟩)` and
/// `ω⊥ ∝ Σ cos(cφᵢ)|i⟩(e^(icφᵢ)|0⟩ + e^(−icφᵢ)|1⟩)`, all other registers 0.
pub fn omega_pair_fast(table: &OracleTable, layout: RegisterLayout, scale: f64) -> Result<OmegaPair> {
    let anc = layout.span(Register::Ancilla)?;
    let mut good = vec![Complex64::new(0.0, 0.0); layout.dim()];
    let mut bad = good.clone();
    for (i, phi) in table.angles().phis.iter().enumerate() {
        let phi = phi * scale;
        let up = Complex64::from_polar(1.0, phi);
        let down = up.conj();
        good[i] = up * phi.sin();
        good[anc.write(i, 1)] = -down * phi.sin();
        bad[i] = up * phi.cos();
        bad[anc.write(i, 1)] = down * phi.cos();
    }
    let omega_perp = if bad.iter().any(|a| a.norm() > 1e-15) {
        Some(StateVector::normalized(layout, bad)?)
    } else {
        None
    };
    Ok(OmegaPair {
        omega: StateVector::normalized(layout, good)?,
        omega_perp,
    })
}

/// Largest `θ̄ ≤ θ` with `(2k̄+1)θ̄ = π/2`.
pub fn choose_theta_bar(theta: f64) -> (f64, u64) {
    let ratio = PI / (2.0 * theta);
    let mut odd = ((ratio - 1e-9).ceil() as u64).max(1);
    if odd % 2 == 0 {
        odd += 1;
    }
    (PI / (2.0 * odd as f64), (odd - 1) / 2)
}

/// Bisection for `c ∈ (0, 1]` with `arcsin √(Σ sin²(cφᵢ)/N) = θ̄`.
/// Returns the scale and the number of halvings performed.
pub fn solve_scale(phis: &[f64], theta_bar: f64) -> (f64, u32) {
    const TOL: f64 = 1e-12;
    if (grover_angle(phis, 1.0) - theta_bar).abs() <= TOL {
        return (1.0, 0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = 0.5;
    for step in 1..=60 {
        mid = 0.5 * (lo + hi);
        let theta = grover_angle(phis, mid);
        if (theta - theta_bar).abs() <= TOL {
            return (mid, step);
        }
        if theta < theta_bar {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (mid, 60)
}

/// How the exact-scaled variant picks its angle scale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScaleRule {
    /// Solve `θ_c = θ̄` by bisection.
    #[default]
    Bisection,
    /// `c = θ̄/θ`, without correcting for the nonlinearity of `sin`.
    Literal,
}

/// Preparation, `k` iterations of `U_s · U_ω`, then [`finalize`].
/// Queries: `2k + 2` (rz) or `k + 1` (kickback).
pub fn run_fast(table: &OracleTable, method: &FastMethod, iterations: Iterations) -> Result<RunOutcome> {
    run_fast_with(table, method, iterations, 1.0, ExecPolicy::default())
}

pub(crate) fn run_fast_with(
    table: &OracleTable,
    method: &FastMethod,
    iterations: Iterations,
    scale: f64,
    policy: ExecPolicy,
) -> Result<RunOutcome> {
    check_scale(scale)?;
    let layout = fast_layout(table, method)?;
    let phis = table.angles().phis;
    let k = iterations.resolve(iterations_auto(grover_angle(&phis, scale)));
    let target = table.target_state().to_state()?;
    let omega = omega_pair_fast(table, layout, scale)?.omega;
    let pinned = pinned_outcomes(&layout, 1);
    let finalize_cost = method.method().fixed_queries();

    let mut ledger = QueryLedger::new();
    let mut state = prepare_s_fast(layout)?.with_policy(policy);
    let mut records = Vec::with_capacity(k as usize + 1);
    let mut last = None;
    for step in 0..=k {
        if step > 0 {
            u_omega(&mut state, table, method, scale, &mut ledger)?;
            u_s_fast(&mut state)?;
        }
        let overlap_omega = omega.inner(&state)?.norm();
        let queries_cumulative = ledger.total() + finalize_cost;
        let probe = if step == k {
            disentangle(&mut state, table, method, scale, &mut ledger)?;
            probe_output(&state, &pinned, &target)?
        } else {
            // Diagnostic only; its queries are not charged to the run.
            let mut scratch = state.clone();
            disentangle(&mut scratch, table, method, scale, &mut QueryLedger::new())?;
            probe_output(&scratch, &pinned, &target)?
        };
        records.push(IterationRecord {
            iteration: step,
            queries_cumulative,
            p_success: probe.0,
            overlap_omega,
            fidelity: probe.1,
        });
        last = Some(probe);
    }
    let (p, fidelity, output) = last.expect("at least one record");
    Ok(RunOutcome {
        report: crate::report::RunReport {
            method: method.method(),
            exactness: Exactness::None,
            n: table.index_width(),
            m: table.value_width(),
            q: method.phase_width,
            records,
            summary: crate::report::RunSummary {
                iterations: k,
                total_queries: ledger.total(),
                p_success: p,
                fidelity,
                succeeded: output.is_some(),
                wall_ms: None,
            },
            exact: None,
        },
        output,
    })
}

/// Reference pipeline with an extra ancilla that shrinks the good amplitude
/// to `sin θ̄`; `k̄` iterations reach the target with probability one.
pub fn run_exact_prakash(table: &OracleTable) -> Result<RunOutcome> {
    run_reference(table, Iterations::Auto, true, ExecPolicy::default())
}

/// Fast pipeline with every oracle phase scaled by `c` so that the
/// effective Grover angle is `θ̄`; runs `k̄` iterations.
pub fn run_exact_scaled(table: &OracleTable, method: &FastMethod, rule: ScaleRule) -> Result<RunOutcome> {
    run_exact_scaled_with(table, method, rule, Iterations::Auto, ExecPolicy::default())
}

pub(crate) fn run_exact_scaled_with(
    table: &OracleTable,
    method: &FastMethod,
    rule: ScaleRule,
    iterations: Iterations,
    policy: ExecPolicy,
) -> Result<RunOutcome> {
    let angles = table.angles();
    let (theta_bar, k_bar) = choose_theta_bar(angles.theta);
    let (scale, bisection_steps) = match rule {
        ScaleRule::Bisection => solve_scale(&angles.phis, theta_bar),
        ScaleRule::Literal => ((theta_bar / angles.theta).min(1.0), 0),
    };
    let k = iterations.resolve(k_bar);
    let mut outcome = run_fast_with(table, method, Iterations::Fixed(k), scale, policy)?;
    let scaled_target = TargetState::from_phis(&angles.scaled(scale).phis).to_state()?;
    let fidelity_scaled = match &outcome.output {
        Some(out) => fidelity_mod_phase(out, &scaled_target)?,
        None => 0.0,
    };
    let report = &mut outcome.report;
    report.exactness = Exactness::Scaled;
    report.exact = Some(ExactSummary {
        theta: angles.theta,
        theta_bar,
        k_bar,
        scale,
        theta_effective: grover_angle(&angles.phis, scale),
        fidelity_original: report.summary.fidelity,
        fidelity_scaled,
        bisection_steps,
    });
    Ok(outcome)
}
