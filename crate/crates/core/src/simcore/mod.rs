//! Dense statevector engine.
//!
//! Basis indices are little-endian over the qubits of a [`RegisterLayout`];
//! register values are read from their contiguous bit ranges.

mod gate;
mod kernel;
mod layout;
mod state;

pub use gate::{GateKind, GateSpec, Matrix2};
pub use kernel::ExecPolicy;
pub(crate) use kernel::{chunked_sum, for_each_block};
pub use layout::{Register, RegisterLayout, Span, DEFAULT_WIDTH_CAP};
pub use state::{
    dft_matrix, fidelity_mod_phase, subspace_residual, QftDirection, StateVector, POSTSELECT_EPS,
};

#[cfg(test)]
mod tests;
