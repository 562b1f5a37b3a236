//! Representation theory of the finite group generated by the d-dimensional
//! Weyl operators, and the covariant channels and positive maps built on it.

pub mod channels;
pub mod cli;
pub mod error;
pub mod gpc;
pub mod group;
pub mod linalg;
pub mod posmaps;
pub mod repr;
pub mod superop;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Tolerance};
