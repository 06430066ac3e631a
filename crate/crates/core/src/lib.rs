//! Exact arithmetic for toric periods, orbital distributions and quaternion
//! embedding invariants attached to a biquadratic tower of function fields
//! over an elliptic curve `y² = x(x−1)(x−λ)` over a small odd finite field.

pub mod bundle;
pub mod config;
pub mod cover;
pub mod curve;
pub mod divisor;
pub mod eigen;
pub mod error;
pub mod field;
pub mod func;
pub mod gf;
pub mod laurent;
pub mod optimal;
pub mod orbital;
pub mod poly;
pub mod quaternion;
pub mod report;
pub mod series;
pub mod spectral;
pub mod sym_reps;
pub mod quad;
pub mod satake;
pub mod tower;

pub use error::{Error, Result};
