//! Exact solvers for integer linear programs that are invariant under direct
//! products of symmetric and alternating groups acting on coordinate blocks.
//!
//! The fiber solver enumerates integer points of the projection onto the
//! fixed space and tests one core representative per fiber. The transform
//! rewrites a symmetric program over those representatives so that a generic
//! branch-and-bound (or an external solver) can handle it.

pub mod arith;
pub mod core_points;
pub mod gen;
pub mod group;
pub mod lp;
pub mod model;
pub mod project;
pub mod solve;
pub mod transform;

pub use arith::{rat, RatVector, Rational, Row};
pub use group::{BlockGroup, FiberIndex, Permutation};
pub use model::Instance;
