//! Witnesses separating random-unitary from random-projective quantum
//! channels through their Choi states.
//!
//! A channel's Choi state is a mixture of maximally entangled states when the
//! channel is random unitary, and separable when it is random projective.
//! Expectation values of Hermitian observables bounded over each class give
//! certificates excluding one description or the other.

pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod schmidt;
pub mod state;
pub mod witness;

pub use channels::{ChannelTag, ChoiState, KrausChannel, KrausTerm};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use oracle::{OptResult, OptimizerConfig};
pub use state::{BipartiteDims, DensityOperator, PureState};
pub use witness::{Verdict, VerdictFlag, WitnessBounds};
