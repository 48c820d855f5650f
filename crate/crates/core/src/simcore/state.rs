use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::gate::{GateKind, GateSpec, Matrix2};
use super::kernel::{self, ExecPolicy};
use super::layout::{Register, RegisterLayout, Span};
use crate::error::{Error, Result};

/// Post-selection outcomes with probability below this are impossible.
pub const POSTSELECT_EPS: f64 = 1e-15;
const NORM_TOL: f64 = 1e-10;
const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QftDirection {
    /// Maps `|j⟩` to `(1/√M) Σₖ e^(+2πi·jk/M) |k⟩`; the all-ones input picks
    /// up phases `e^(−2πik/M)`.
    Forward,
    Inverse,
}

impl QftDirection {
    pub fn reversed(self) -> Self {
        match self {
            QftDirection::Forward => QftDirection::Inverse,
            QftDirection::Inverse => QftDirection::Forward,
        }
    }
}

/// Dense complex amplitude vector over a [`RegisterLayout`].
#[derive(Clone, Debug)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
    policy: ExecPolicy,
}

impl StateVector {
    /// All-zeros state `|0…0⟩`.
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self {
            layout,
            amps,
            policy: ExecPolicy::default(),
        }
    }

    pub fn new_basis_state(layout: RegisterLayout, basis: usize) -> Result<Self> {
        let dim = layout.dim();
        if basis >= dim {
            return Err(Error::BasisOutOfRange { index: basis, dim });
        }
        let mut state = Self::zero(layout);
        state.amps.swap(0, basis);
        Ok(state)
    }

    /// Wraps raw amplitudes; they must already be normalized.
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::Config(format!(
                "expected {} amplitudes, got {}",
                layout.dim(),
                amps.len()
            )));
        }
        let state = Self {
            layout,
            amps,
            policy: ExecPolicy::default(),
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Normalizes `amps` and wraps them; fails on a zero vector.
    pub fn normalized(layout: RegisterLayout, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(layout, amps)
    }

    pub fn with_policy(mut self, policy: ExecPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn set_policy(&mut self, policy: ExecPolicy) {
        self.policy = policy;
    }

    pub fn policy(&self) -> ExecPolicy {
        self.policy
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, basis: usize) -> Complex64 {
        self.amps[basis]
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        let amps = &self.amps;
        kernel::chunked_sum::<f64, _>(amps.len(), self.policy, |i| amps[i].norm_sqr()).sqrt()
    }

    fn check_same_layout(&self, other: &StateVector) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_layout(other)?;
        let (a, b) = (&self.amps, &other.amps);
        Ok(kernel::chunked_sum(a.len(), self.policy, |i| a[i].conj() * b[i]))
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_same_layout(other)?;
        let (a, b) = (&self.amps, &other.amps);
        Ok(kernel::chunked_sum::<f64, _>(a.len(), self.policy, |i| (a[i] - b[i]).norm_sqr()).sqrt())
    }

    /// Largest entry-wise deviation `maxᵢ |selfᵢ − otherᵢ|`.
    pub fn max_deviation(&self, other: &StateVector) -> Result<f64> {
        self.check_same_layout(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn scale(&mut self, factor: Complex64) {
        kernel::for_each_indexed(&mut self.amps, self.policy, |_, a| *a *= factor);
    }

    pub fn apply_gate(&mut self, gate: &GateSpec) -> Result<()> {
        let m = gate.validate(self.layout.total_width())?;
        let (mask, expected) = gate.control_mask();
        kernel::for_each_pair(&mut self.amps, gate.target, self.policy, |lo, a, b| {
            if lo & mask == expected {
                m.apply(a, b);
            }
        });
        Ok(())
    }

    /// Applies a 2×2 unitary on `target` whose matrix depends on the basis
    /// index of the pair (target bit cleared). `None` leaves the pair alone.
    ///
    /// The matrices are not checked for unitarity.
    pub fn apply_conditioned<F>(&mut self, target: usize, matrix_for: F) -> Result<()>
    where
        F: Fn(usize) -> Option<Matrix2> + Sync + Send,
    {
        if target >= self.layout.total_width() {
            return Err(Error::InvalidQubits(format!("target {target} out of range")));
        }
        kernel::for_each_pair(&mut self.amps, target, self.policy, |lo, a, b| {
            if let Some(m) = matrix_for(lo) {
                m.apply(a, b);
            }
        });
        Ok(())
    }

    /// Multiplies each amplitude by `phase(basis)`.
    pub fn apply_diagonal<F>(&mut self, phase: F)
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        kernel::for_each_indexed(&mut self.amps, self.policy, |i, a| *a *= phase(i));
    }

    fn single_qubit_on_register(&mut self, register: Register, kind: GateKind) -> Result<()> {
        let span = self.layout.span(register)?;
        for q in span.offset..span.offset + span.width {
            self.apply_gate(&GateSpec::new(kind, q))?;
        }
        Ok(())
    }

    pub fn hadamard_register(&mut self, register: Register) -> Result<()> {
        self.single_qubit_on_register(register, GateKind::H)
    }

    pub fn x_register(&mut self, register: Register) -> Result<()> {
        self.single_qubit_on_register(register, GateKind::X)
    }

    pub fn qft_register(&mut self, register: Register, direction: QftDirection) -> Result<()> {
        self.qft_impl(register, direction, None)
    }

    /// QFT on `register`, applied only where qubit `control.0` equals `control.1`.
    pub fn controlled_qft_register(
        &mut self,
        register: Register,
        direction: QftDirection,
        control: (usize, bool),
    ) -> Result<()> {
        self.qft_impl(register, direction, Some(control))
    }

    fn qft_impl(
        &mut self,
        register: Register,
        direction: QftDirection,
        control: Option<(usize, bool)>,
    ) -> Result<()> {
        let span = self.layout.span(register)?;
        if let Some((q, _)) = control {
            if q >= self.layout.total_width() || span.mask() & (1 << q) != 0 {
                return Err(Error::InvalidQubits(format!(
                    "control {q} overlaps {register:?} or is out of range"
                )));
            }
        }
        let size = span.dim();
        let fft: Arc<dyn Fft<f64>> = {
            let mut planner = FftPlanner::new();
            match direction {
                // rustfft's inverse transform carries the e^(+2πi jk/M) kernel.
                QftDirection::Forward => planner.plan_fft_inverse(size),
                QftDirection::Inverse => planner.plan_fft_forward(size),
            }
        };
        let norm = 1.0 / (size as f64).sqrt();
        let low_mask = (1usize << span.offset) - 1;
        let column_base = move |r: usize| ((r >> span.offset) << (span.offset + span.width)) | (r & low_mask);
        let (cmask, cexpected) = match control {
            Some((q, bit)) => (1usize << q, if bit { 1usize << q } else { 0 }),
            None => (0, 0),
        };

        let src = &self.amps;
        let mut columns = vec![Complex64::new(0.0, 0.0); src.len()];
        kernel::for_each_block(&mut columns, size, self.policy, |r, col| {
            let base = column_base(r);
            for (v, slot) in col.iter_mut().enumerate() {
                *slot = src[base | (v << span.offset)];
            }
            if base & cmask == cexpected {
                fft.process(col);
                col.iter_mut().for_each(|a| *a *= norm);
            }
        });
        let cols_per_high = 1usize << span.offset;
        self.amps = kernel::gather(&columns, self.policy, |idx| {
            let v = span.read(idx) as usize;
            let r = ((idx >> (span.offset + span.width)) * cols_per_high) | (idx & low_mask);
            r * size + v
        });
        Ok(())
    }

    /// Negates every amplitude whose `registers` are all zero.
    pub fn reflect_zero(&mut self, registers: &[Register]) -> Result<()> {
        let mut mask = 0usize;
        for &r in registers {
            mask |= self.layout.span(r)?.mask();
        }
        kernel::for_each_indexed(&mut self.amps, self.policy, |i, a| {
            if i & mask == 0 {
                *a = -*a;
            }
        });
        Ok(())
    }

    /// Rewrites `register` as a per-basis bijection given by its inverse:
    /// the new amplitude at register value `v` comes from register value
    /// `source_value(basis, v)` with all other qubits unchanged.
    pub fn permute_register<F>(&mut self, register: Register, source_value: F) -> Result<()>
    where
        F: Fn(usize, u64) -> u64 + Sync + Send,
    {
        let span = self.layout.span(register)?;
        self.amps = kernel::gather(&self.amps, self.policy, |idx| {
            span.write(idx, source_value(idx, span.read(idx)))
        });
        Ok(())
    }

    /// Born probability of reading `outcome` from `register`.
    pub fn register_probability(&self, register: Register, outcome: u64) -> Result<f64> {
        let span = self.layout.span(register)?;
        if outcome >= span.dim() as u64 {
            return Err(Error::BasisOutOfRange {
                index: outcome as usize,
                dim: span.dim(),
            });
        }
        let amps = &self.amps;
        Ok(kernel::chunked_sum::<f64, _>(amps.len(), self.policy, |i| {
            if span.read(i) == outcome {
                amps[i].norm_sqr()
            } else {
                0.0
            }
        }))
    }

    /// Probability that every `(register, value)` pair reads as given.
    pub fn joint_probability(&self, pinned: &[(Register, u64)]) -> Result<f64> {
        let mut mask = 0usize;
        let mut expected = 0usize;
        for &(r, v) in pinned {
            let span = self.layout.span(r)?;
            if v >= span.dim() as u64 {
                return Err(Error::BasisOutOfRange {
                    index: v as usize,
                    dim: span.dim(),
                });
            }
            mask |= span.mask();
            expected = span.write(expected, v);
        }
        let amps = &self.amps;
        Ok(kernel::chunked_sum::<f64, _>(amps.len(), self.policy, |i| {
            if i & mask == expected {
                amps[i].norm_sqr()
            } else {
                0.0
            }
        }))
    }

    /// Projects `register` onto `outcome` and renormalizes. The register
    /// stays in the layout, pinned to the outcome.
    pub fn postselect(&self, register: Register, outcome: u64) -> Result<(f64, StateVector)> {
        let probability = self.register_probability(register, outcome)?;
        if probability < POSTSELECT_EPS {
            return Err(Error::ImpossiblePostselection { register, outcome });
        }
        let span = self.layout.span(register)?;
        let scale = 1.0 / probability.sqrt();
        let mut collapsed = self.clone();
        kernel::for_each_indexed(&mut collapsed.amps, self.policy, |i, a| {
            if span.read(i) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        });
        Ok((probability.min(1.0), collapsed))
    }

    /// Normalized sub-state of `keep` with every register in `fixed` pinned
    /// to its value and all remaining registers at zero. The result has a
    /// single-register layout. An absent `keep` register yields a
    /// one-amplitude state.
    pub fn slice(&self, keep: Register, fixed: &[(Register, u64)]) -> Result<StateVector> {
        let keep_span = self.layout.span(keep).unwrap_or(Span { offset: 0, width: 0 });
        let mut base = 0usize;
        for &(r, v) in fixed {
            base = self.layout.span(r)?.write(base, v);
        }
        let amps: Vec<Complex64> = (0..keep_span.dim())
            .map(|i| self.amps[keep_span.write(base, i as u64)])
            .collect();
        let layout = RegisterLayout::new(keep_span.width, 0, 0, 0)?;
        StateVector::normalized(layout, amps).map(|s| s.with_policy(self.policy))
    }
}

/// `|⟨a|b⟩|²`
pub fn fidelity_mod_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Norm of the part of `state` orthogonal to `span(basis)`.
pub fn subspace_residual(state: &StateVector, basis: &[&StateVector]) -> Result<f64> {
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            let dev = (bi.inner(bj)? - expected).norm();
            if dev > ORTHONORMAL_TOL {
                return Err(Error::NonOrthonormalBasis(dev));
            }
        }
    }
    let mut rest = state.amps.clone();
    for b in basis {
        let coeff = b.inner(state)?;
        rest.iter_mut()
            .zip(&b.amps)
            .for_each(|(r, x)| *r -= coeff * x);
    }
    Ok(rest.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
}

/// Explicit DFT matrix in the [`QftDirection::Forward`] convention,
/// `F[k][j] = e^(2πi·jk/M)/√M`.
pub fn dft_matrix(width: usize) -> Vec<Vec<Complex64>> {
    let size = 1usize << width;
    let norm = 1.0 / (size as f64).sqrt();
    (0..size)
        .map(|k| {
            (0..size)
                .map(|j| Complex64::from_polar(norm, 2.0 * PI * ((j * k) % size) as f64 / size as f64))
                .collect()
        })
        .collect()
}
