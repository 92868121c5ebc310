//! Both sides of the cohomological Landau-Ginzburg / Calabi-Yau
//! correspondence for complete intersections in weighted projective spaces:
//! the Chen-Ruan orbifold Hodge numbers of [X_W/G] and the bigraded hybrid
//! LG state space, together with the explicit dot-diagram pairing that
//! certifies their equality.
//!
//! The pipeline is exact end to end: phases and ages are rationals, graded
//! dimensions come from two-prime linear algebra over prime fields (with an
//! optional exact-rational certification pass), and every report is
//! deterministic byte for byte.

pub mod cli;
pub mod dots;
pub mod error;
pub mod exact;
pub mod jacobian;
pub mod model;
pub mod statespace;
pub mod symmetry;

pub use error::{Error, Result};
