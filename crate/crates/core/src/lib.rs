//! Grover search executed with dissipative cavity-QED conditional phase-flip
//! (CPF) gates.
//!
//! The crate is layered bottom-up:
//!
//! * [`gate`]: closed-form coefficients of the N-qubit CPF gate under cavity
//!   decay and the diagonal gates built from them.
//! * [`dynamics`]: the no-jump atom/cavity dynamics: exact amplitudes, an
//!   independent RK4 integrator of the effective Hamiltonian, per-basis-state
//!   gate action and the delayed-atom error model.
//! * [`grover`]: a 2^N logical state-vector machine running the search.
//! * [`lab`]: parameter sweeps, timing budgets and atom placement.
//!
//! Qubit 1 is the most significant bit of every basis index. Logical `0`
//! is `|e₁⟩` for qubit 1 and `|i_k⟩` otherwise; logical `1` is `|g⟩`.

pub mod dynamics;
pub mod error;
pub mod gate;
pub mod grover;
pub mod lab;
pub mod record;

pub use error::{Error, Result};
pub use gate::{BasisState, CpfCoefficients, CpfDiagonal, GateParams};
pub use grover::{GateChoice, LogicalState, SearchTrace};
