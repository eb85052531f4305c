//! Continuous-variable teleportation through `N` parallel qutrit teleporters
//! placed in the arms of a balanced multimode interferometer.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: single-mode Fock vectors and the input-state generators.
//! - [`ideal`]: closed-form transfer weights and noiseless teleportation.
//! - [`linalg`]: Hermitian eigenvalues (cyclic Jacobi) and partial transpose.
//! - [`noise`]: qutrit Kraus channels, the noisy resource and its log-negativity.
//! - [`pipeline`]: per-arm truncation + noise and the N-fold recombination.
//! - [`oracle`]: brute-force multimode Fock-space simulation used as ground truth.
//! - [`sweep`] and [`verify`]: the parameter sweeps and the self-check suite
//!   behind the `qtele` command-line tool.

// `!(x < y)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod ideal;
pub mod linalg;
pub mod noise;
pub mod oracle;
pub mod pipeline;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
