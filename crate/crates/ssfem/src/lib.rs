//! Exact construction and verification of super-spline degree-of-freedom
//! sets for high-smoothness polynomial finite elements on simplices.
//!
//! The library partitions the Bernstein index set of degree-`k` polynomials
//! on an `n`-simplex by face distance, derives the matching derivative /
//! point-evaluation functionals, and certifies counting identities,
//! unisolvence, and cross-element smoothness in exact rational arithmetic.

pub mod bernstein;
pub mod combinatorics;
pub mod dofs;
pub mod polynomial;
pub mod simplex;
pub mod verify;

pub use bernstein::{
    classify, enumerate_indices, face_distance, family_profile, index_iter, layer_counts,
    partition, BernsteinIndex, Ownership, PartitionReport, SmoothnessProfile,
};
pub use combinatorics::{
    binomial, bounded_sum_count, chopped_count, hockey_stick_a, hockey_stick_b, poly_dim, Count,
};
pub use dofs::{
    build_element, count_4face_dofs, count_edge_dofs, count_interior_dofs, count_tet_dofs,
    count_triangle_dofs, count_vertex_dofs, element_counts, DofCount, DofFunctional,
    ElementCounts, ElementSpec, FourFaceCount, InteriorCount,
};
pub use polynomial::{
    apply_functional, exact_rank, solve_linear_system, vandermonde, Polynomial, Rational,
};
pub use simplex::{domain_point, faces, normal_directions, BaryPoint, Direction, Face};
pub use verify::{
    verify_continuity, verify_counts, verify_unisolvence, ContinuityReport, CountComparison,
    TwoElementMesh, UnisolvenceReport, DEFAULT_UNISOLVENCE_CAP,
};

/// Errors shared across all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("unsupported dimension {0}: supported ambient dimensions are 1 through 5")]
    UnsupportedDimension(usize),
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),
    #[error("size limit exceeded: {0}")]
    SizeExceeded(String),
    #[error("internal verification error: {0}")]
    InternalVerification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
