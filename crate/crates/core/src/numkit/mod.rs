//! Minimal numeric kernel: tensors, a reverse-mode tape, Adam, seeded RNG.

pub mod adam;
pub mod gradcheck;
pub mod graph;
pub mod rng;
pub mod tensor;

pub use adam::{AdamParams, AdamState};
pub use gradcheck::{grad_check, grad_check_multi};
pub use graph::{forward_primitive, Gradients, Graph, PrimitiveKind, Var};
pub use rng::Rng;
pub use tensor::Tensor;
