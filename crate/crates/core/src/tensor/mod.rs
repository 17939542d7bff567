//! Dense complex linear algebra shared by every other module.

mod matrix;
mod space;
mod state;

pub use matrix::{choi_vector, kron_vec, tensor_product, ComplexMatrix, TOL};
pub use space::{
    partial_trace, partial_trace_dims, partial_trace_ket_dims, LabeledSpace, SpaceLabel, SpaceLayout,
};
pub use state::{inner, norm, random_qubit_unitary, PureState};
