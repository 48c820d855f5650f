use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the total qubit count of a dense state.
pub const DEFAULT_WIDTH_CAP: usize = 26;

/// Named sub-registers of the simulated machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Register {
    Index,
    Value,
    Ancilla,
    Extra,
    Phase,
}

/// Contiguous qubit range `[offset, offset + width)` of one register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub offset: usize,
    pub width: usize,
}

impl Span {
    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    pub fn read(&self, basis: usize) -> u64 {
        ((basis >> self.offset) & ((1usize << self.width) - 1)) as u64
    }

    pub fn write(&self, basis: usize, value: u64) -> usize {
        (basis & !self.mask()) | (((value as usize) << self.offset) & self.mask())
    }

    pub fn dim(&self) -> usize {
        1 << self.width
    }
}

/// Qubit ordering, least significant first: index, value, ancilla, extra
/// ancilla, phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    index_width: usize,
    value_width: usize,
    ancilla_count: usize,
    phase_width: usize,
}

impl RegisterLayout {
    pub fn new(
        index_width: usize,
        value_width: usize,
        ancilla_count: usize,
        phase_width: usize,
    ) -> Result<Self> {
        Self::with_cap(
            index_width,
            value_width,
            ancilla_count,
            phase_width,
            DEFAULT_WIDTH_CAP,
        )
    }

    pub fn with_cap(
        index_width: usize,
        value_width: usize,
        ancilla_count: usize,
        phase_width: usize,
        cap: usize,
    ) -> Result<Self> {
        if ancilla_count > 2 {
            return Err(Error::Config(format!(
                "ancilla count must be 0, 1 or 2, got {ancilla_count}"
            )));
        }
        let width = index_width + value_width + ancilla_count + phase_width;
        if width > cap {
            return Err(Error::WidthOverflow { width, cap });
        }
        Ok(Self {
            index_width,
            value_width,
            ancilla_count,
            phase_width,
        })
    }

    pub fn index_width(&self) -> usize {
        self.index_width
    }

    pub fn value_width(&self) -> usize {
        self.value_width
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancilla_count
    }

    pub fn phase_width(&self) -> usize {
        self.phase_width
    }

    pub fn total_width(&self) -> usize {
        self.index_width + self.value_width + self.ancilla_count + self.phase_width
    }

    pub fn dim(&self) -> usize {
        1 << self.total_width()
    }

    /// Qubit span of `register`, or an error when the register has zero width.
    pub fn span(&self, register: Register) -> Result<Span> {
        let (offset, width) = match register {
            Register::Index => (0, self.index_width),
            Register::Value => (self.index_width, self.value_width),
            Register::Ancilla => (self.index_width + self.value_width, self.ancilla_count.min(1)),
            Register::Extra => (
                self.index_width + self.value_width + 1,
                self.ancilla_count.saturating_sub(1),
            ),
            Register::Phase => (
                self.index_width + self.value_width + self.ancilla_count,
                self.phase_width,
            ),
        };
        if width == 0 {
            return Err(Error::MissingRegister(register));
        }
        Ok(Span { offset, width })
    }

    pub fn has(&self, register: Register) -> bool {
        self.span(register).is_ok()
    }

    /// Qubit position of a single-qubit register.
    pub fn qubit(&self, register: Register) -> Result<usize> {
        let span = self.span(register)?;
        if span.width != 1 {
            return Err(Error::InvalidQubits(format!(
                "{register:?} has {} qubits, expected 1",
                span.width
            )));
        }
        Ok(span.offset)
    }

    /// Layout holding only the index register of `self`.
    pub fn index_only(&self) -> Result<Self> {
        Self::new(self.index_width, 0, 0, 0)
    }

    /// Register owning qubit `qubit`, if any.
    pub fn owner(&self, qubit: usize) -> Option<Register> {
        [
            Register::Index,
            Register::Value,
            Register::Ancilla,
            Register::Extra,
            Register::Phase,
        ]
        .into_iter()
        .find(|&r| {
            self.span(r)
                .map(|s| qubit >= s.offset && qubit < s.offset + s.width)
                .unwrap_or(false)
        })
    }
}
