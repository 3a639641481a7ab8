//! Exact statevector simulation of digital eigenpath traversal: phase-estimation
//! based oracles, reflection-driven one-step transformations, recursive path
//! traversals, and statistical checks of their cost and error bounds.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod onestep;
pub mod oracles;
pub mod quantum;
pub mod traversal;

pub use error::{Error, Result};
