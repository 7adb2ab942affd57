//! Numerical laboratory for the first weighted Steklov eigenvalue and its
//! isoperimetric lower bound.
//!
//! The crate computes three quantities on a discretized weighted manifold
//! with boundary and ties them together with a per-instance certificate:
//!
//! - `sigma_1`, the first positive eigenvalue of the boundary operator of a
//!   weighted network ([`solver`]), obtained by harmonic extension and the
//!   Schur complement onto the boundary, cross-checked by an independent
//!   full-pencil oracle;
//! - `h` and `h'`, the volume and boundary isoperimetric constants of a
//!   cell complex ([`cheeger`]), exact by Gray-code subset enumeration on
//!   small complexes, approximate by level-set sweeps and local search;
//! - a [`certificate`] replaying the superlevel-set and co-area argument
//!   behind the lower bound `sigma_1 >= h h' / 4`, machine-checkable from
//!   its serialized form alone.
//!
//! Instances come from abstract weighted graphs ([`graph_io`]) or from 2D
//! triangle meshes with piecewise densities ([`fem`]); [`experiments`]
//! scripts the thin-cylinder, scaling, dumbbell, and refinement studies.

// weight guards use `!(x > 0.0)` so NaN fails validation too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod cheeger;
pub mod complex;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod graph_io;
pub mod instances;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
