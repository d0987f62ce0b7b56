//! Exact mod-p representation machinery for congruence quotients of
//! GL_2(Z_p) and tree-truncated compact inductions of GL_2(Q_p).
//!
//! The crate is organized around finite-level models: a representation is a
//! certified generating set of a congruence quotient together with one
//! invertible matrix over F_p per generator. Structure algorithms (socle,
//! radical, filtrations, Hom spaces) reduce to exact dense linear algebra
//! over F_p with deterministic pivoting.

pub mod cosets;
pub mod charh;
pub mod error;
pub mod fp;
pub mod kmodule;
pub mod linalg;
pub mod mat2;
pub mod residue;
pub mod structure;
pub mod subgroup;

pub use error::{Error, Result};
