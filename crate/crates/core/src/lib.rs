//! Online parametric trace slicing and monitoring.
//!
//! The [`lattice`] module models parameter instances as partial maps. The
//! [`slicer`] computes every slice of a parametric trace in one pass. The
//! [`param`] module lifts a base [`monitor`] to parametric traces, both as a
//! straightforward reference and as engines that work online.

pub mod error;
pub mod lattice;
pub mod monitor;
pub mod param;
pub mod selfcheck;
pub mod slicer;
pub mod trace;
pub mod workload;

pub use error::{Error, Result};
