//! Mixed finite elements for two-dimensional Stokes flow with the
//! "linear plus constant" (LC) pressure space.
//!
//! The velocity is continuous piecewise quadratic. The pressure is either
//! continuous piecewise linear (Taylor–Hood) or that space enriched with one
//! constant per element (LC), which makes every element locally
//! incompressible. The crate covers
//!
//! * triangulations of the unit square and the three-element macroelement
//!   patches used in the stability analysis ([`mesh`]),
//! * shape functions, quadrature and degree-of-freedom maps ([`spaces`]),
//! * the discrete saddle-point system ([`assembly`]) and its direct solution
//!   ([`solver`]),
//! * patch algebra, projection operators and inf–sup constants
//!   ([`stability`]),
//! * the Griffiths benchmark, error norms and convergence tables ([`bench`]).

pub mod assembly;
pub mod bench;
pub mod cli;
mod error;
pub mod linalg;
pub mod mesh;
pub mod solver;
pub mod spaces;
pub mod stability;

pub use error::{Error, Result};
