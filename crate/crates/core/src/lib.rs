//! Signed circumcentric dual volumes and the diagonal discrete Hodge star.
//!
//! A [`SimplicialComplex`] is built from embedded points and top simplices.
//! [`signed_dual`] computes dual volumes as signed sums over elementary duals,
//! [`hodge`] turns them into a diagonal Hodge star, and [`delaunay`]
//! classifies meshes on which that star is positive.

pub mod complex;
pub mod delaunay;
pub mod edge_dual;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod hodge;
pub mod io;
pub mod poisson;
pub mod signed_dual;
pub mod tolerance;

pub use complex::{BoundaryFace, BoundaryOperator, EmbeddedPoints, Incidence, Simplex, SimplicialComplex};
pub use delaunay::{classify_complex, CircumOrderData, MeshReport, OneSided, PairStatus, Verdict};
pub use error::{Error, Result};
pub use geometry::{Circumdata, Point, Sign};
pub use hodge::{hodge_star, validate_hodge, HodgeMode, HodgeStar};
pub use io::Mesh;
pub use signed_dual::{DualCell, DualVolumes, ElementaryDual};
pub use tolerance::Tolerance;
