//! Circumcentered methods for best approximation problems in ℝⁿ.
//!
//! The library builds affine subspaces and isometries, computes circumcenters
//! of finite point sets, runs circumcentered reflection/isometry methods next
//! to the classical projection schemes, and predicts their linear rates.

pub mod error;
pub mod numerics;
pub mod subspace;
pub mod isometry;
pub mod circumcenter;
pub mod methods;
pub mod rates;
pub mod bench;

pub use error::{Error, Result};
pub use numerics::{Matrix, Tolerance, Vector};
pub use subspace::{intersect, AffineSubspace, Intersection};
pub use isometry::{AffineIsometry, AffineMap};
pub use circumcenter::{circumcenter, circumcenter_map, OperatorSet, PointSet};
