//! Hyperbolic suspensions and flexible octahedra.
//!
//! * [`hypgeom`]: half-plane, half-space, hyperboloid and Klein models.
//! * [`suspension`]: edge-length specs, placement at pole parameter `t`.
//! * [`flexibility`]: closure equation, flex tracing, limits, certificates.
//! * [`bricard`]: the three types of flexible octahedra.
//! * [`io`]: spec JSON, CSV traces and OBJ meshes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bricard;
pub mod error;
pub mod flexibility;
pub mod hypgeom;
pub mod io;
pub mod suspension;

pub use error::{Error, Result};
