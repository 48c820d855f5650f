use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row-major 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub fn identity() -> Self {
        Self([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    pub fn hadamard() -> Self {
        let h = c(FRAC_1_SQRT_2, 0.0);
        Self([[h, h], [h, -h]])
    }

    pub fn pauli_x() -> Self {
        Self([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn pauli_z() -> Self {
        Self([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    /// `[[cos(λ/2), −sin(λ/2)], [sin(λ/2), cos(λ/2)]]`
    pub fn ry(angle: f64) -> Self {
        let (s, co) = (angle / 2.0).sin_cos();
        Self([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
    }

    /// `diag(e^(−iλ/2), e^(iλ/2))`
    pub fn rz(angle: f64) -> Self {
        Self::phase_pair(angle / 2.0)
    }

    /// `diag(e^(−iβ), e^(iβ))`
    pub fn phase_pair(beta: f64) -> Self {
        Self([
            [Complex64::from_polar(1.0, -beta), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, beta)],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Largest entry of `|M†M − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint() * *self;
        let id = Self::identity();
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for k in 0..2 {
                worst = worst.max((p.0[r][k] - id.0[r][k]).norm());
            }
        }
        worst
    }

    #[inline]
    pub fn apply(&self, a: &mut Complex64, b: &mut Complex64) {
        let (x, y) = (*a, *b);
        *a = self.0[0][0] * x + self.0[0][1] * y;
        *b = self.0[1][0] * x + self.0[1][1] * y;
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][k] + a[r][1] * b[1][k];
            }
        }
        Matrix2(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Z,
    Ry(f64),
    Rz(f64),
    Custom(Matrix2),
}

impl GateKind {
    pub fn matrix(&self) -> Matrix2 {
        match *self {
            GateKind::H => Matrix2::hadamard(),
            GateKind::X => Matrix2::pauli_x(),
            GateKind::Z => Matrix2::pauli_z(),
            GateKind::Ry(a) => Matrix2::ry(a),
            GateKind::Rz(a) => Matrix2::rz(a),
            GateKind::Custom(m) => m,
        }
    }
}

/// A single-qubit gate with optional controls given as `(qubit, required bit)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<(usize, bool)>,
}

impl GateSpec {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn controlled(mut self, qubit: usize, bit: bool) -> Self {
        self.controls.push((qubit, bit));
        self
    }

    pub(crate) fn validate(&self, width: usize) -> Result<Matrix2> {
        if self.target >= width {
            return Err(Error::InvalidQubits(format!(
                "target {} outside {width} qubits",
                self.target
            )));
        }
        let mut used = vec![false; width];
        used[self.target] = true;
        for &(q, _) in &self.controls {
            if q >= width || used[q] {
                return Err(Error::InvalidQubits(format!(
                    "control {q} is out of range or overlaps another operand"
                )));
            }
            used[q] = true;
        }
        let m = self.kind.matrix();
        let err = m.unitarity_error();
        if err > UNITARY_TOL {
            return Err(Error::NonUnitary(err));
        }
        Ok(m)
    }

    /// `(mask, expected)` such that controls hold iff `idx & mask == expected`.
    pub(crate) fn control_mask(&self) -> (usize, usize) {
        self.controls.iter().fold((0, 0), |(m, e), &(q, bit)| {
            (m | 1 << q, if bit { e | 1 << q } else { e })
        })
    }
}
