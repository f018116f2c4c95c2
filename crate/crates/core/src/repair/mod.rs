//! Algorithms that turn a predicted triangulation into the Delaunay
//! triangulation of the same points.

pub mod sampling;
pub mod separator;
