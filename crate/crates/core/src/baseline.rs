//! Reference amplitude amplification: value-conditioned `Ry` on an ancilla,
//! reflection about the start state through `U_r R₀ U_r⁻¹`, and `XZX` on
//! the ancilla as the good-state flip. Four oracle queries per iteration.
//!
//! The optional extra ancilla implements the exact (probability-one)
//! variant: it shrinks the good amplitude so that a whole number of
//! iterations lands exactly on the target.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::fastprep::{choose_theta_bar, OmegaPair};
use crate::oracle::{apply_uf, OracleDirection, OracleTable, QueryLedger};
use crate::report::{
    ExactSummary, Exactness, IterationRecord, Iterations, Method, RunOutcome, RunReport, RunSummary,
};
use crate::simcore::{
    fidelity_mod_phase, ExecPolicy, GateKind, GateSpec, Matrix2, Register, RegisterLayout, StateVector,
    POSTSELECT_EPS,
};

/// Index, value and one ancilla; a second ancilla when `extra` is set.
pub fn baseline_layout(table: &OracleTable, extra: bool) -> Result<RegisterLayout> {
    RegisterLayout::new(
        table.index_width(),
        table.value_width(),
        1 + usize::from(extra),
        0,
    )
}

/// Every register of `layout` present, for reflections over the whole space.
pub(crate) fn all_registers(layout: &RegisterLayout) -> Vec<Register> {
    [
        Register::Index,
        Register::Value,
        Register::Ancilla,
        Register::Extra,
        Register::Phase,
    ]
    .into_iter()
    .filter(|r| layout.has(*r))
    .collect()
}

pub(crate) fn hadamard_index(state: &mut StateVector) -> Result<()> {
    if state.layout().has(Register::Index) {
        state.hadamard_register(Register::Index)?;
    }
    Ok(())
}

/// Every non-index register pinned: the ancilla to `ancilla`, the rest to 0.
pub(crate) fn pinned_outcomes(layout: &RegisterLayout, ancilla: u64) -> Vec<(Register, u64)> {
    [
        (Register::Value, 0),
        (Register::Ancilla, ancilla),
        (Register::Extra, 0),
        (Register::Phase, 0),
    ]
    .into_iter()
    .filter(|(r, _)| layout.has(*r))
    .collect()
}

/// Success probability, fidelity to `target` and the post-selected index
/// state (when the probability is non-negligible).
pub(crate) fn probe_output(
    state: &StateVector,
    pinned: &[(Register, u64)],
    target: &StateVector,
) -> Result<(f64, f64, Option<StateVector>)> {
    let p = state.joint_probability(pinned)?;
    if p < POSTSELECT_EPS {
        return Ok((p, 0.0, None));
    }
    let out = state.slice(Register::Index, pinned)?;
    let fidelity = fidelity_mod_phase(&out, target)?;
    Ok((p.min(1.0), fidelity, Some(out)))
}

fn conditioned_ry_matrices(table: &OracleTable, adjoint: bool) -> Vec<Matrix2> {
    (0..1u64 << table.value_width())
        .map(|code| {
            let m = Matrix2::ry(PI - 2.0 * table.angle_of_code(code));
            if adjoint {
                m.adjoint()
            } else {
                m
            }
        })
        .collect()
}

fn apply_conditioned_ry(state: &mut StateVector, table: &OracleTable, adjoint: bool) -> Result<()> {
    let value = state.layout().span(Register::Value)?;
    let ancilla = state.layout().qubit(Register::Ancilla)?;
    let mats = conditioned_ry_matrices(table, adjoint);
    state.apply_conditioned(ancilla, |lo| Some(mats[value.read(lo) as usize]))
}

/// Rotates the ancilla by `Ry(π − 2φ(v))` for value-register content `v`:
/// `|0⟩ ↦ sin φ|0⟩ + cos φ|1⟩`, `|1⟩ ↦ −cos φ|0⟩ + sin φ|1⟩`.
pub fn conditioned_ry(state: &mut StateVector, table: &OracleTable) -> Result<()> {
    apply_conditioned_ry(state, table, false)
}

/// `U_r = U_f⁻¹ · Ry · U_f · H^⊗n`, followed by the extra-ancilla rotation
/// when present.
fn u_r(
    state: &mut StateVector,
    table: &OracleTable,
    extra: Option<f64>,
    ledger: &mut QueryLedger,
) -> Result<()> {
    hadamard_index(state)?;
    apply_uf(state, table, OracleDirection::Forward, Register::Value, ledger)?;
    conditioned_ry(state, table)?;
    apply_uf(state, table, OracleDirection::Inverse, Register::Value, ledger)?;
    if let Some(angle) = extra {
        let q = state.layout().qubit(Register::Extra)?;
        state.apply_gate(&GateSpec::new(GateKind::Ry(angle), q))?;
    }
    Ok(())
}

fn u_r_inverse(
    state: &mut StateVector,
    table: &OracleTable,
    extra: Option<f64>,
    ledger: &mut QueryLedger,
) -> Result<()> {
    if let Some(angle) = extra {
        let q = state.layout().qubit(Register::Extra)?;
        state.apply_gate(&GateSpec::new(GateKind::Ry(-angle), q))?;
    }
    apply_uf(state, table, OracleDirection::Forward, Register::Value, ledger)?;
    apply_conditioned_ry(state, table, true)?;
    apply_uf(state, table, OracleDirection::Inverse, Register::Value, ledger)?;
    hadamard_index(state)
}

fn u_s_with(
    state: &mut StateVector,
    table: &OracleTable,
    extra: Option<f64>,
    ledger: &mut QueryLedger,
) -> Result<()> {
    u_r_inverse(state, table, extra, ledger)?;
    let regs = all_registers(state.layout());
    state.reflect_zero(&regs)?;
    u_r(state, table, extra, ledger)
}

/// Fresh `|s⟩ = U_r |0⟩`; two queries.
pub fn prepare_s(table: &OracleTable, ledger: &mut QueryLedger) -> Result<StateVector> {
    let mut state = StateVector::zero(baseline_layout(table, false)?);
    u_r(&mut state, table, None, ledger)?;
    Ok(state)
}

/// Reflection about `|s⟩`: `U_r R₀ U_r⁻¹` with `R₀` over every register.
/// Four queries.
pub fn u_s(state: &mut StateVector, table: &OracleTable, ledger: &mut QueryLedger) -> Result<()> {
    u_s_with(state, table, None, ledger)
}

/// Good-state flip. `XZX` on the ancilla; with the extra ancilla present,
/// the sign flip of the joint `|00⟩` ancilla state.
pub fn u_omega(state: &mut StateVector) -> Result<()> {
    if state.layout().has(Register::Extra) {
        return state.reflect_zero(&[Register::Ancilla, Register::Extra]);
    }
    let q = state.layout().qubit(Register::Ancilla)?;
    for kind in [GateKind::X, GateKind::Z, GateKind::X] {
        state.apply_gate(&GateSpec::new(kind, q))?;
    }
    Ok(())
}

/// One amplification step `U_s · U_ω`.
pub fn iterate(state: &mut StateVector, table: &OracleTable, ledger: &mut QueryLedger) -> Result<()> {
    u_omega(state)?;
    u_s(state, table, ledger)
}

/// Normalized good state `∝ Σ sin φᵢ |i⟩|0⟩|0⟩` and its complement
/// `∝ Σ cos φᵢ |i⟩|0⟩|1⟩` in `layout` (extra ancilla, if any, at 0).
pub fn omega_pair_in(table: &OracleTable, layout: RegisterLayout) -> Result<OmegaPair> {
    let phis = table.angles().phis;
    let ancilla = layout.span(Register::Ancilla)?;
    let mut good = vec![Complex64::new(0.0, 0.0); layout.dim()];
    let mut bad = good.clone();
    for (i, phi) in phis.iter().enumerate() {
        good[i] = Complex64::new(phi.sin(), 0.0);
        bad[ancilla.write(i, 1)] = Complex64::new(phi.cos(), 0.0);
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

pub fn omega_pair(table: &OracleTable) -> Result<OmegaPair> {
    omega_pair_in(table, baseline_layout(table, false)?)
}

/// Iteration count maximizing `sin²((2k+1)θ)`; ties go to the smaller `k`.
pub fn iterations_auto(theta: f64) -> u64 {
    let x = (PI / (4.0 * theta) - 0.5).max(0.0);
    let (lo, hi) = (x.floor() as u64, x.ceil() as u64);
    let gain = |k: u64| ((2 * k + 1) as f64 * theta).sin().powi(2);
    if gain(hi) > gain(lo) + 1e-12 {
        hi
    } else {
        lo
    }
}

pub(crate) fn run_reference(
    table: &OracleTable,
    iterations: Iterations,
    exact: bool,
    policy: ExecPolicy,
) -> Result<RunOutcome> {
    let angles = table.angles();
    let target = table.target_state().to_state()?;
    let layout = baseline_layout(table, exact)?;

    let (extra, exact_summary, auto) = if exact {
        let (theta_bar, k_bar) = choose_theta_bar(angles.theta);
        let ratio = (theta_bar.sin() / angles.theta.sin()).powi(2).min(1.0);
        let summary = ExactSummary {
            theta: angles.theta,
            theta_bar,
            k_bar,
            scale: 1.0,
            theta_effective: (angles.theta.sin() * ratio.sqrt()).asin(),
            fidelity_original: 0.0,
            fidelity_scaled: 0.0,
            bisection_steps: 0,
        };
        (Some(2.0 * ratio.sqrt().acos()), Some(summary), k_bar)
    } else {
        (None, None, iterations_auto(angles.theta))
    };
    let k = iterations.resolve(auto);

    let omega = omega_pair_in(table, layout)?.omega;
    let pinned = pinned_outcomes(&layout, 0);
    let mut ledger = QueryLedger::new();
    let mut state = StateVector::zero(layout).with_policy(policy);
    u_r(&mut state, table, extra, &mut ledger)?;

    let mut records = Vec::with_capacity(k as usize + 1);
    let mut last = None;
    for step in 0..=k {
        if step > 0 {
            u_omega(&mut state)?;
            u_s_with(&mut state, table, extra, &mut ledger)?;
        }
        let (p, fidelity, out) = probe_output(&state, &pinned, &target)?;
        records.push(IterationRecord {
            iteration: step,
            queries_cumulative: ledger.total(),
            p_success: p,
            overlap_omega: omega.inner(&state)?.norm(),
            fidelity,
        });
        last = Some((p, fidelity, out));
    }
    let (p, fidelity, output) = last.expect("at least one record");
    let exact_summary = exact_summary.map(|mut s| {
        s.fidelity_original = fidelity;
        s.fidelity_scaled = fidelity;
        s
    });
    Ok(RunOutcome {
        report: RunReport {
            method: Method::Baseline,
            exactness: if exact { Exactness::Prakash } else { Exactness::None },
            n: table.index_width(),
            m: table.value_width(),
            q: 0,
            records,
            summary: RunSummary {
                iterations: k,
                total_queries: ledger.total(),
                p_success: p,
                fidelity,
                succeeded: output.is_some(),
                wall_ms: None,
            },
            exact: exact_summary,
        },
        output,
    })
}

/// Preparation plus `k` iterations, then post-selection of value = 0 and
/// ancilla = 0. Queries: `2 + 4k`.
pub fn run_baseline(table: &OracleTable, iterations: Iterations) -> Result<RunOutcome> {
    run_reference(table, iterations, false, ExecPolicy::default())
}
