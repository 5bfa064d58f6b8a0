//! Circle packings with dimers, the scooped-manifold boundary complex, fully
//! augmented links on surfaces and effective Dehn-filling plans.
//!
//! The pipeline runs in stages, each with its own module:
//!
//! 1. [`nerve`]: validate a triangulated surface and build a dimer by
//!    stellar subdivision.
//! 2. [`packing`]: solve for the circle packing realizing the nerve and
//!    develop it into explicit circles with their dual circles.
//! 3. [`scoop`]: audit the checkerboard boundary complex and extract the
//!    Euclidean rectangle at every ideal vertex.
//! 4. [`link`]: read the fully augmented link off the dual graph and merge
//!    strand components with half-twists.
//! 5. [`filling`]: normalized lengths, crossing thresholds and the
//!    bilipschitz certificate.

// Checks are written `!(x < tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod filling;
pub mod geometry;
pub mod io;
pub mod link;
pub mod nerve;
pub mod packing;
pub mod par;
pub mod pipeline;
pub mod render;
pub mod scoop;

pub use error::Error;
