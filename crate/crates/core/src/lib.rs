//! Exact simulation of a qubit under pure dephasing by an arbitrary
//! finite-dimensional environment, with detectors for qubit–environment
//! entanglement and for quantum discord on either side.
//!
//! The joint evolution is block diagonal in the qubit pointer basis,
//! `U(t) = |0><0| (x) w0(t) + |1><1| (x) w1(t)`, so everything is computed
//! from the two conditional environment unitaries. The crate also covers a
//! Bell pair with one qubit coupled to the environment.

pub mod commands;
pub mod config;
pub mod correlation;
pub mod discord;
pub mod error;
pub mod linalg;
pub mod model;
pub mod random;
pub mod series;
pub mod two_qubit;

pub use error::{Error, Result};
