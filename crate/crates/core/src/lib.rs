//! First passage percolation on webs of coalescing random walks.
//!
//! A single keyed increment field drives a walk from every lattice site.
//! Following a walk is free, jumping by an offset in a fixed jump set costs
//! one, and the resulting first passage distance is computed exactly by
//! slice-wise frontier propagation. On top of that sit journeys (walks that
//! switch to distance-one boundary curves at prescribed times), their
//! Skorokhod-reflection approximation curves, and the path-space metrics used
//! to compare them.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod fpp;
pub mod increment;
pub mod journey;
pub mod metrics;
pub mod scale;
pub mod walk;

pub use error::{Error, Result};
pub use fpp::{
    boundary_curve, boundary_lattice, distance, edge_weight, propagate, propagate_in_window,
    rescaled_distance, Distance, DistanceFrontier, JumpSet, Side,
};
pub use increment::{check_aperiodicity, sample_increment, IncrementField, IncrementSpec};
pub use journey::{
    approximation_bundle, check_disjoint_increments, journey, journey_lattice, restrict,
    skorokhod_reflect, Curve, Itinerary, ReflectionBundle,
};
pub use metrics::{
    epigraph_distance, epigraph_embed, hausdorff, modulus, path_distance, phi, profile_distance,
    variation, DistanceSample, EvalGrid, Variation,
};
pub use scale::Scale;
pub use walk::{rescaled_walk, walk_path, walk_position, LatticePath, Path, Site, Window};

pub use num_rational::Rational64;
