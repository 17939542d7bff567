//! Simulation and analysis of quantum-controlled gate orders.
//!
//! The crate covers the quantum N-switch and the Hadamard/Fourier promise
//! problems it solves, exhaustive enumeration of promise-satisfying gate
//! sets, the fixed-order query cost via shortest common supersequences, the
//! equivalent fixed-order circuit with its side-information attacks, and
//! process-matrix witness evaluation.

pub mod causal;
pub mod error;
pub mod gates;
pub mod oracle;
pub mod process;
pub mod scs;
pub mod switch;
pub mod tensor;

pub use error::{Error, Result};
