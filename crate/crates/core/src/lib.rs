//! Invariants of Legendrian curves in contact R^3 and horizontal curves in Engel R^4.

pub mod curves;
pub mod degree;
pub mod diskcalc;
pub mod error;
pub mod formats;
pub mod invariants;
pub mod lifts;
pub mod numeric;
pub mod selftest;

pub use curves::{
    find_self_intersections, front_geiges, geiges_project, segment_area, total_area, Curve3, Curve4,
    CurveFamily, Frame, SelfIntersection, Tolerances,
};
pub use error::{Error, Result};
