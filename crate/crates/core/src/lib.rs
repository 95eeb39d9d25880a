//! Moving divisors on real plane projective curves.
//!
//! A nonsingular real curve `F = 0` is cut by a closed family of real lines
//! or curves. The intersection divisor is path-tracked around the loop, and
//! the motion of its real points is summarized by a per-component winding
//! vector (the real tracing class) and the end-to-start monodromy permutation.
//!
//! Pipeline: [`topology`] traces the real locus, [`family`] builds the cutting
//! loop, [`tracking`] follows the divisor, [`choreography`] reads off the
//! tracing class, the monodromy and the verdicts.

pub mod algebra;
pub mod choreography;
mod error;
pub mod family;
pub mod topology;
pub mod tracking;

pub use error::{Error, Result};
