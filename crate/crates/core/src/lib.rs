//! Multi-frequency acousto-electromagnetic tomography.
//!
//! Forward Helmholtz model with Robin boundary data, the internal datum
//! `ψ_ω` obtained from `|u_ω|²∇q`, its Fréchet derivative and adjoint, and a
//! projected multi-frequency Landweber reconstruction of the permittivity.

pub mod error;
pub mod cli;
pub mod diagnostics;
pub mod exec;
pub mod grid;
pub mod internal_data;
pub mod io;
pub mod inversion;
pub mod linearization;
pub mod pde;
pub mod physics;

pub use error::{Error, Result};
pub use exec::Execution;
