//! Oracle model: function tables, derived angles, the modular-addition
//! oracle `|x⟩|y⟩ ↦ |x⟩|y + f(x)⟩` and its fixed-point phase-code variant,
//! and the query ledger that every oracle application is charged to.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{Register, RegisterLayout, StateVector};

/// Value functions `f: [0, 2ⁿ) → ℤ` stored as two's-complement `m`-bit codes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OracleFile", into = "OracleFile")]
pub struct OracleTable {
    index_width: usize,
    value_width: usize,
    values: Vec<i64>,
    max_abs: i64,
}

/// On-disk JSON shape of an oracle table.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct OracleFile {
    n: usize,
    m: usize,
    values: Vec<i64>,
}

impl TryFrom<OracleFile> for OracleTable {
    type Error = Error;

    fn try_from(f: OracleFile) -> Result<Self> {
        OracleTable::new(f.n, f.m, f.values)
    }
}

impl From<OracleTable> for OracleFile {
    fn from(t: OracleTable) -> Self {
        OracleFile {
            n: t.index_width,
            m: t.value_width,
            values: t.values,
        }
    }
}

/// Largest magnitude representable by the table's `m`-bit values.
pub fn value_limit(value_width: usize) -> i64 {
    if value_width == 0 {
        0
    } else {
        (1i64 << (value_width - 1)) - 1
    }
}

impl OracleTable {
    pub fn new(index_width: usize, value_width: usize, values: Vec<i64>) -> Result<Self> {
        if index_width > 30 || value_width > 30 {
            return Err(Error::InvalidTable(format!(
                "widths n={index_width}, m={value_width} are too large"
            )));
        }
        let expected = 1usize << index_width;
        if values.len() != expected {
            return Err(Error::InvalidTable(format!(
                "expected 2^{index_width} = {expected} values, got {}",
                values.len()
            )));
        }
        let limit = value_limit(value_width);
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.abs() > limit) {
            return Err(Error::InvalidTable(format!(
                "value f[{i}] = {v} exceeds the {value_width}-bit limit {limit}"
            )));
        }
        let max_abs = values.iter().map(|v| v.abs()).max().unwrap_or(0);
        if max_abs == 0 {
            return Err(Error::InvalidTable("all values are zero".into()));
        }
        Ok(Self {
            index_width,
            value_width,
            values,
            max_abs,
        })
    }

    /// Tabulates a functional oracle.
    pub fn from_fn(index_width: usize, value_width: usize, f: impl Fn(usize) -> i64) -> Result<Self> {
        Self::new(index_width, value_width, (0..1usize << index_width).map(f).collect())
    }

    pub fn index_width(&self) -> usize {
        self.index_width
    }

    pub fn value_width(&self) -> usize {
        self.value_width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> i64 {
        self.values[index]
    }

    /// `F = maxᵢ |fᵢ|`
    pub fn max_abs(&self) -> i64 {
        self.max_abs
    }

    /// Two's-complement code of `v` in `m` bits.
    pub fn encode(&self, v: i64) -> u64 {
        v.rem_euclid(1i64 << self.value_width) as u64
    }

    /// Signed value of an `m`-bit register content.
    pub fn decode(&self, code: u64) -> i64 {
        let m = self.value_width;
        let code = (code & ((1u64 << m) - 1)) as i64;
        if code >= 1i64 << (m - 1) {
            code - (1i64 << m)
        } else {
            code
        }
    }

    /// `φ(v) = π·v/(2F)` for a value-register content `v`.
    pub fn angle_of_code(&self, code: u64) -> f64 {
        FRAC_PI_2 * (self.decode(code) as f64 / self.max_abs as f64)
    }

    pub fn angles(&self) -> AngleProfile {
        let f = self.max_abs as f64;
        AngleProfile::from_phis(
            self.values
                .iter()
                .map(|&v| FRAC_PI_2 * (v as f64 / f))
                .collect(),
        )
    }

    pub fn target_state(&self) -> TargetState {
        TargetState::from_phis(&self.angles().phis)
    }

    /// Parses either the JSON form `{"n", "m", "values"}` or plain text with
    /// one signed integer per line. Plain text carries no `m`; it is taken
    /// from `value_width` or else the smallest width (at least 2) holding
    /// every value.
    pub fn parse(content: &str, value_width: Option<usize>) -> Result<Self> {
        if content.trim_start().starts_with('{') {
            let table: OracleTable = serde_json::from_str(content)?;
            if let Some(m) = value_width {
                if m != table.value_width {
                    return Err(Error::WidthMismatch {
                        expected: m,
                        found: table.value_width,
                    });
                }
            }
            return Ok(table);
        }
        let values = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.parse::<i64>()
                    .map_err(|e| Error::InvalidTable(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() || !values.len().is_power_of_two() {
            return Err(Error::InvalidTable(format!(
                "{} values is not a power of two",
                values.len()
            )));
        }
        let n = values.len().trailing_zeros() as usize;
        let m = match value_width {
            Some(m) => m,
            None => {
                let max = values.iter().map(|v| v.abs()).max().unwrap_or(0);
                (2..=30).find(|&m| value_limit(m) >= max).unwrap_or(31)
            }
        };
        Self::new(n, m, values)
    }

    pub fn load(path: impl AsRef<Path>, value_width: Option<usize>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, value_width)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("oracle table serializes")
    }
}

/// Per-entry angles `φᵢ = π·fᵢ/(2F)` and the Grover angle
/// `θ = arcsin √(Σ sin²φᵢ / N)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleProfile {
    pub phis: Vec<f64>,
    pub theta: f64,
}

impl AngleProfile {
    pub fn from_phis(phis: Vec<f64>) -> Self {
        let theta = grover_angle(&phis, 1.0);
        Self { phis, theta }
    }

    /// Profile with every `φᵢ` multiplied by `scale`.
    pub fn scaled(&self, scale: f64) -> Self {
        Self::from_phis(self.phis.iter().map(|p| p * scale).collect())
    }
}

/// `arcsin √(Σ sin²(c·φᵢ) / N)`
pub fn grover_angle(phis: &[f64], scale: f64) -> f64 {
    let mean = phis.iter().map(|p| (p * scale).sin().powi(2)).sum::<f64>() / phis.len() as f64;
    mean.sqrt().min(1.0).asin()
}

/// Real amplitudes `∝ sin φᵢ` over the index register.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetState {
    pub amplitudes: Vec<f64>,
}

impl TargetState {
    pub fn from_phis(phis: &[f64]) -> Self {
        let raw: Vec<f64> = phis.iter().map(|p| p.sin()).collect();
        let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
        Self {
            amplitudes: raw.into_iter().map(|a| a / norm).collect(),
        }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        let n = self.amplitudes.len().trailing_zeros() as usize;
        StateVector::from_amplitudes(
            RegisterLayout::new(n, 0, 0, 0)?,
            self.amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }
}

/// Builds a table whose post-selected target reproduces `alphas` up to
/// quantization: `fᵢ = round((2F/π)·arcsin(αᵢ / max|α|))` with
/// `F = 2^(m−1) − 1`.
pub fn arcsin_encode(alphas: &[f64], value_width: usize) -> Result<OracleTable> {
    if alphas.is_empty() || !alphas.len().is_power_of_two() {
        return Err(Error::InvalidTable(format!(
            "{} amplitudes is not a power of two",
            alphas.len()
        )));
    }
    let max = alphas.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    if max == 0.0 || !max.is_finite() {
        return Err(Error::InvalidTable("amplitude vector is zero".into()));
    }
    let full = value_limit(value_width) as f64;
    let values = alphas
        .iter()
        .map(|a| ((2.0 * full / PI) * (a / max).clamp(-1.0, 1.0).asin()).round() as i64)
        .collect();
    OracleTable::new(alphas.len().trailing_zeros() as usize, value_width, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleDirection {
    Forward,
    Inverse,
}

/// Exact tally of oracle applications.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    forward: u64,
    inverse: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, direction: OracleDirection) {
        match direction {
            OracleDirection::Forward => self.forward += 1,
            OracleDirection::Inverse => self.inverse += 1,
        }
    }

    pub fn forward_count(&self) -> u64 {
        self.forward
    }

    pub fn inverse_count(&self) -> u64 {
        self.inverse
    }

    pub fn total(&self) -> u64 {
        self.forward + self.inverse
    }
}

fn check_index_register(state: &StateVector, table: &OracleTable) -> Result<()> {
    let found = state.layout().index_width();
    if found != table.index_width {
        return Err(Error::WidthMismatch {
            expected: table.index_width,
            found,
        });
    }
    Ok(())
}

/// `|x⟩|y⟩ ↦ |x⟩|y ± f(x) mod 2^m⟩` on `target`; one ledger entry.
pub fn apply_uf(
    state: &mut StateVector,
    table: &OracleTable,
    direction: OracleDirection,
    target: Register,
    ledger: &mut QueryLedger,
) -> Result<()> {
    check_index_register(state, table)?;
    let span = state.layout().span(target)?;
    if span.width != table.value_width {
        return Err(Error::WidthMismatch {
            expected: table.value_width,
            found: span.width,
        });
    }
    let codes: Vec<u64> = table.values.iter().map(|&v| table.encode(v)).collect();
    add_codes(state, target, &codes, direction)?;
    ledger.record(direction);
    Ok(())
}

/// Fixed-point code added by a scaled query:
/// `round(c · f · 2^q / 2^m) mod 2^q`.
pub fn scaled_code(value: i64, scale: f64, value_width: usize, phase_width: usize) -> u64 {
    let raw = (scale * value as f64 * (phase_width as f64 - value_width as f64).exp2()).round() as i64;
    raw.rem_euclid(1i64 << phase_width) as u64
}

/// Which per-branch phase a kickback query should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseTarget {
    /// `c·βᵢ = c·2φᵢ`, used by the reflection.
    Reflection,
    /// `c·φᵢ`, used when disentangling the ancilla.
    HalfAngle,
}

/// Scale handed to [`apply_uf_scaled`] so that the added code is
/// `round(c·βᵢ·2^q/(2π))` (or its half-angle counterpart).
pub fn kickback_scale(table: &OracleTable, angle_scale: f64, target: PhaseTarget) -> f64 {
    let shift = match target {
        PhaseTarget::Reflection => 1,
        PhaseTarget::HalfAngle => 2,
    };
    angle_scale * ((table.value_width as f64) - shift as f64).exp2() / table.max_abs as f64
}

/// Codes `gᵢ` added by one scaled query.
pub fn scaled_codes(table: &OracleTable, scale: f64, phase_width: usize) -> Vec<u64> {
    table
        .values
        .iter()
        .map(|&v| scaled_code(v, scale, table.value_width, phase_width))
        .collect()
}

/// Phase `2π·g/2^q` produced by kicking back code `g`.
pub fn code_phase(code: u64, phase_width: usize) -> f64 {
    2.0 * PI * code as f64 / (phase_width as f64).exp2()
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Config(format!("oracle scale must be positive, got {scale}")));
    }
    Ok(())
}

/// Adds `scaled_code(f(x), c, m, q)` into the `q`-qubit register `target`;
/// one ledger entry.
pub fn apply_uf_scaled(
    state: &mut StateVector,
    table: &OracleTable,
    scale: f64,
    target: Register,
    direction: OracleDirection,
    ledger: &mut QueryLedger,
) -> Result<()> {
    check_scale(scale)?;
    check_index_register(state, table)?;
    let width = state.layout().span(target)?.width;
    add_codes(state, target, &scaled_codes(table, scale, width), direction)?;
    ledger.record(direction);
    Ok(())
}

/// Scaled query whose sign follows a control qubit: adds `gᵢ` where the
/// control is 1 and subtracts it where the control is 0. Counts as one
/// forward query.
pub fn apply_uf_scaled_signed(
    state: &mut StateVector,
    table: &OracleTable,
    scale: f64,
    target: Register,
    control: usize,
    ledger: &mut QueryLedger,
) -> Result<()> {
    check_scale(scale)?;
    check_index_register(state, table)?;
    let span = state.layout().span(target)?;
    if control >= state.layout().total_width() || span.mask() & (1 << control) != 0 {
        return Err(Error::InvalidQubits(format!("control {control} overlaps {target:?}")));
    }
    let codes = scaled_codes(table, scale, span.width);
    let index = state.layout().span(Register::Index)?;
    let modulus = span.dim() as u64;
    state.permute_register(target, |idx, v| {
        let g = codes[index.read(idx) as usize];
        if idx & (1 << control) != 0 {
            (v + modulus - g) % modulus
        } else {
            (v + g) % modulus
        }
    })?;
    ledger.record(OracleDirection::Forward);
    Ok(())
}

fn add_codes(
    state: &mut StateVector,
    target: Register,
    codes: &[u64],
    direction: OracleDirection,
) -> Result<()> {
    let index = state.layout().span(Register::Index).ok();
    let modulus = state.layout().span(target)?.dim() as u64;
    state.permute_register(target, |idx, v| {
        let x = index.map_or(0, |s| s.read(idx) as usize);
        let g = codes[x] % modulus;
        // Gather form: the amplitude now at `v` came from `v ∓ g`.
        match direction {
            OracleDirection::Forward => (v + modulus - g) % modulus,
            OracleDirection::Inverse => (v + g) % modulus,
        }
    })
}
