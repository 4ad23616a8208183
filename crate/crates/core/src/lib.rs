//! Numerical laboratory for reductive matrix group actions.
//!
//! The crate builds classical matrix groups and their Lie algebras, lets them
//! act on standard representations, and decides two questions numerically:
//!
//! * whether an orbit `G·v` is closed, using a norm-minimizing flow along the
//!   symmetric part of the Lie algebra and comparing orbit dimensions at the
//!   start and at the flow limit ([`kempfness`]);
//! * whether a Lie subalgebra (typically a stabilizer) is reductive, using the
//!   center/derived-algebra split, the Killing form and the Jordan type of
//!   central elements ([`subalgebra`]).
//!
//! The [`experiments`] module packages these into reproducible randomized
//! trials. Everything here is pure computation over `alloc`; file formats,
//! timing and parallel execution live in the `orbitlab` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod experiments;
pub mod groups;
pub mod kempfness;
pub mod linalg;
pub mod matrix_serde;
pub mod reps;
pub mod subalgebra;
pub mod tolerances;

pub use error::{Error, Result};
pub use groups::{
    adjoint_conjugate, cartan_decompose, lie_algebra_basis, random_group_element,
    CartanDecomposition, Family, GroupSpec, LieAlgebraBasis,
};
pub use kempfness::{
    closedness_verdict, is_minimal, moment_vector, norm_flow, ClosednessStatus,
    ClosednessVerdict, FlowConfig, FlowTrace, KempfNess, Termination,
};
pub use linalg::{Field, CMat, C64};
pub use reps::{
    act, differential_act, inner_product, orbit_dimension, stabilizer_subalgebra, OrbitPoint,
    RepKind, RepVector, Representation,
};
pub use subalgebra::{
    element_type, reductivity_verdict, structure_report, ElementType, ReductivityStatus,
    SubalgebraReport,
};
pub use tolerances::Tolerances;
