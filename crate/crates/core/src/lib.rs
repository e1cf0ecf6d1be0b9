//! Spherical convexity of non-homogeneous quadratic functions
//! `f(x) = <Ax, x> + <b, x> + c` restricted to the unit sphere intersected with a
//! pointed convex cone.
//!
//! Two independent sources of evidence are provided:
//!
//! * [`certificates`]: closed-form necessary, sufficient and exact conditions.
//!   A certificate either proves convexity, proves non-convexity with an
//!   explicit [`WitnessPair`], or declines.
//! * [`oracle`]: sampling and local search over admissible pairs, which can
//!   falsify convexity constructively but never prove it.
//!
//! Everything is built on the first-order pair condition
//! `<Au,u> - <Av,v> >= <b,v>/2` for unit `u ⟂ v` with `v` in the cone, see
//! [`foc_slack`].

pub mod certificates;
pub mod cone;
pub mod error;
pub mod generators;
pub mod instance;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod sampling;
pub mod slack;
pub mod witness;

pub use cone::Cone;
pub use error::{Error, Result};
pub use instance::QuadraticInstance;
pub use slack::{foc_slack, soc_slack};
pub use witness::WitnessPair;

pub use nalgebra::{DMatrix, DVector};
