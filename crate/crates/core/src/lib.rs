//! Synthetic multivariate time series via adversarially trained recurrent
//! autoencoders.
//!
//! The crate is organised as a small stack:
//!
//! - [`numkit`] — dense `f64` tensors, a reverse-mode differentiation tape,
//!   Adam, and a seeded RNG. Everything above is built on it.
//! - [`nets`] — GRU sequence networks and the bundle of roles used by the
//!   generative framework (two autoencoders, generator, supervisor, two
//!   discriminators).
//! - [`losses`] — the differentiable training objectives (reconstruction,
//!   two-step-ahead supervision, batch-moment matching, code-moment matching,
//!   least-squares adversarial terms).
//! - [`data`] — sine dataset construction, CSV ingestion/export, min-max
//!   scaling, sliding windows, noise sampling.
//! - [`training`] — the four-phase schedule, the joint adversarial loop,
//!   score-based early stopping, and checkpointing.
//! - [`eval`] — discriminative and predictive scores, PCA and t-SNE
//!   projections, replicated reporting.

pub mod data;
pub mod error;
pub mod eval;
pub mod losses;
pub mod nets;
pub mod numkit;
pub mod training;

pub use error::{Error, Result};
