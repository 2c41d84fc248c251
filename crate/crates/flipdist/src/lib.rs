//! Flip distance of triangulations of convex polygons.

pub mod acyclic;
pub mod blowup;
pub mod bounds;
pub mod convex;
pub mod distance;
pub mod formats;
pub mod reduction;
pub mod tree;
