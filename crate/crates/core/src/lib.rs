//! Exact-arithmetic construction and analysis of box splines on
//! three-directional (type-I) triangulations.
//!
//! The crate builds box splines symbolically as piecewise Bernstein-Bézier
//! polynomials over the uniform grid, characterizes the spline spaces their
//! translates span, verifies the edge- and vertex-contact smoothness
//! characterizations by exact rational linear algebra, and constructs
//! hierarchical bases on dyadically refined nested domains.

pub mod algebra;
pub mod bernstein;
pub mod box_spline;
pub mod contact;
pub mod hierarchy;
pub mod mesh;
pub mod spline_space;

pub use algebra::{Rational, RationalMatrix};
pub use bernstein::{BBPoly, DerivIndex, MonomialPoly, RegularityVector};
pub use box_spline::{DirectionTriple, PiecewisePoly};
pub use mesh::{EdgeId, EdgeType, LatticePoint, MulticellDomain, Orient, TriangleId};
