//! Pappus marked boxes, the projective group they generate, and the
//! verification of its limit-set structure on the real and complex plane.

pub mod error;
pub mod limit_set;
pub mod linalg;
pub mod marked_box;
pub mod projective;
pub mod render;
pub mod representation;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
