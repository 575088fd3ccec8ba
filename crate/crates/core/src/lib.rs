//! Randomized orthogonal decomposition (ROD) of snapshot data into
//! low-rank twin data models.
//!
//! The pipeline splits a snapshot matrix into time-shifted halves, samples
//! its range with a seeded randomized SVD, diagonalizes the reduced
//! propagator, and expands the data on the resulting shape modes. A
//! viscous-Burgers generator ([`burgers`]) provides an exact benchmark, and
//! [`rank_select`] sweeps the model rank to pick the twin's complexity.
//!
//! ```no_run
//! use rod_core::{burgers, metrics, rod};
//!
//! let cfg = burgers::BurgersConfig::default();
//! let data = burgers::generate_snapshots(&cfg)?;
//! let model = rod::fit(&data, 10, 42)?;
//! let twin = rod::reconstruct(&model)?;
//! println!("error = {:e}", metrics::absolute_error(&data, &twin)?);
//! # Ok::<(), rod_core::Error>(())
//! ```

pub mod burgers;
pub mod empirical;
mod error;
pub mod format;
pub mod linalg;
pub mod metrics;
pub mod rank_select;
pub mod rod;
pub mod rsvd;
pub mod snapshot;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Matrix, SvdFactors};
pub use rod::{InnerProduct, RodModel};
pub use snapshot::SnapshotMatrix;
