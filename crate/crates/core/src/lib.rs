//! Projector formalism of CP^{N-1} sigma models.
//!
//! Builds projector chains from holomorphic curves, evaluates the generalized
//! Weierstrass, Sym-Tafel and Fokas-Gel'fand immersions into su(N), and checks
//! the algebraic identities they satisfy against residual tolerances.

pub mod chain;
pub mod error;
pub mod exec;
pub mod export;
pub mod jet;
pub mod linalg;
pub mod minkowski;
pub mod oracle;
pub mod rng;
pub mod spectral;
pub mod suite;
pub mod surface;
pub mod words;

pub use error::{Error, Result};
pub use linalg::{CMatrix, SuElement, C64};
