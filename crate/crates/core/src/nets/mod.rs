//! GRU sequence networks and the bundle of roles used by the framework.

mod bundle;
mod gru;
mod seqnet;

pub use bundle::{BundleDims, NetworkBundle};
pub use gru::{bind_gru, gru_forward, BoundGru, GruParams};
pub use seqnet::{Activation, BoundNet, NetworkSpec, Role, SeqNetwork};
