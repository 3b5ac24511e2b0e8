//! Exact divisor theory on abstract tropical curves with finite symmetry groups.
//!
//! All arithmetic is exact; nothing in the crate touches floating point.

pub mod automorphism;
pub mod cohomology;
pub mod curve;
pub mod divisor;
pub mod error;
pub mod fixtures;
pub mod invariantize;
pub mod io;
pub mod linalg;
pub mod plfn;
pub mod random;
pub mod rat;
pub mod refine;
pub mod solver;

pub use crate::automorphism::{enumerate_aut, validate_group, AutGroup, Automorphism};
pub use crate::cohomology::{
    check_real_1cocycle, coboundary_1d, coboundary_1f, coboundary_2f, coboundary_2r,
    div_1cocycle_witness, h90_witness, is_coboundary_1d, is_coboundary_1f, is_coboundary_2f,
    is_coboundary_2r, mq_2cocycle_witness, real_2cocycle_witness, Cocycle1D, Cocycle1F,
    Cocycle2F, Cocycle2R, CocycleVerdict,
};
pub use crate::curve::{Curve, EdgeId, EdgeLength, Point, VertexId};
pub use crate::divisor::{act_on_divisor, Divisor};
pub use crate::error::{Error, Result};
pub use crate::invariantize::{
    is_class_invariant, symmetrize_degree0, symmetrize_divisor, InvariantizationReport,
};
pub use crate::plfn::{pl_equal, pullback, PlFunction, SlopeMode};
pub use crate::random::{ramp, random_divisor, random_function, random_orbit_sum, random_point};
pub use crate::rat::Rat;
pub use crate::solver::{is_equivalent, solve_principal, PrincipalityResult};
