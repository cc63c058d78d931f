use alloc::string::String;
use core::fmt;

use crate::walk::{Site, Window};

/// Errors raised by the lattice model and its derived objects.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An increment distribution failed validation.
    InvalidSpec { name: String, reason: String },
    /// A jump set failed validation.
    InvalidJumpSet(String),
    /// Window bounds are empty or inverted.
    InvalidWindow { x_min: i64, x_max: i64, t_min: i64, t_max: i64 },
    /// A path was constructed with no values or a non-positive spacing.
    InvalidPath(String),
    /// Scale factor must be a positive integer.
    InvalidScale(u64),
    /// Itinerary jump times are not strictly increasing, or lengths differ.
    InvalidItinerary(String),
    /// A query point lies outside the enumeration window.
    OutsideWindow { site: Site, window: Window },
    /// A recorded frontier position came within `margin` of the window edge,
    /// so positions beyond the window may have been missed.
    MarginViolation { site: Site, margin: i64, window: Window },
    /// Two paths do not share a time grid.
    GridMismatch(String),
    /// Sampled distance functions are keyed on different point pairs.
    KeyMismatch,
    /// Generic violated precondition.
    Precondition(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec { name, reason } => {
                write!(f, "invalid increment spec `{name}`: {reason}")
            }
            Error::InvalidJumpSet(reason) => write!(f, "invalid jump set: {reason}"),
            Error::InvalidWindow { x_min, x_max, t_min, t_max } => write!(
                f,
                "invalid window x=[{x_min}, {x_max}] t=[{t_min}, {t_max}]"
            ),
            Error::InvalidPath(reason) => write!(f, "invalid path: {reason}"),
            Error::InvalidScale(n) => write!(f, "invalid scale n={n}: must be positive"),
            Error::InvalidItinerary(reason) => write!(f, "invalid itinerary: {reason}"),
            Error::OutsideWindow { site, window } => write!(
                f,
                "site ({}, {}) lies outside window x=[{}, {}] t=[{}, {}]",
                site.x, site.t, window.x_min, window.x_max, window.t_min, window.t_max
            ),
            Error::MarginViolation { site, margin, window } => write!(
                f,
                "frontier reached ({}, {}) within {} of the edge of window x=[{}, {}]; \
                 enlarge the window",
                site.x, site.t, margin, window.x_min, window.x_max
            ),
            Error::GridMismatch(reason) => write!(f, "grid mismatch: {reason}"),
            Error::KeyMismatch => write!(f, "distance samples use different key grids"),
            Error::Precondition(reason) => write!(f, "precondition failed: {reason}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
