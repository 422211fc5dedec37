//! Geometry and measure theory on Cayley graphs of marked groups.
//!
//! - [`spaces`]: balls, geodesics, quotient metrics, growth and Poincaré series.
//! - [`contraction`]: projections and finite-window contraction certificates.
//! - [`boundary`]: horoboundary cocycles, shadows and limit sets.
//! - [`densities`]: Patterson densities, shadow masses and covering lemmas.

pub mod error;
pub mod boundary;
pub mod contraction;
pub mod densities;
pub mod spaces;

pub use error::{Error, Result};
