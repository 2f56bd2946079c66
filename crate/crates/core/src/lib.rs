//! Golden gates for PSU(2): word enumeration, the lattice bijection with
//! integer quaternions of norm `5^t`, covering estimates and approximation
//! efficiency.

pub mod approx;
pub mod covering;
pub mod error;
pub mod haar;
pub mod index;
pub mod lattice;
pub mod quat;
pub mod words;

pub use error::{Error, Result};
pub use quat::{metric_d, LipschitzQuaternion, Psu2Point};
pub use words::{GateSet, GateWord, Generator, Prefix};
