//! Delaunay-pair and one-sidedness predicates and whole-mesh classification.
//!
//! A pair of adjacent top simplices is tested after unfolding it about the
//! shared facet into `R^n`, so surface meshes in `R^3` are judged by the
//! pairwise (hinge) criterion. In-sphere tests compare the distance from a
//! circumcenter against the circumradius.

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::geometry::{self, flatten_pair, FlatPair, Point, Sign};
use crate::signed_dual;
use crate::tolerance::Tolerance;

/// Version of the serialized [`MeshReport`] layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    /// Each apex lies strictly outside the other simplex's circumsphere.
    Strict,
    /// Cospherical within tolerance.
    Degenerate,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OneSided {
    Yes,
    /// Circumcenter on the facet hyperplane.
    Marginal,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    TowardRight,
    TowardLeft,
}

/// Positions along the line through `c_τ` orthogonal to the shared facet of
/// `λ = L * τ` and `ρ = R * τ`.
///
/// The `h_*` values are signed coordinates of `c_λ`, `c_ρ` and the
/// projection of `R` relative to `c_τ`, positive along `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircumOrderData {
    pub h_lambda: f64,
    pub h_rho: f64,
    pub h_r: f64,
    pub r_tau: f64,
    pub r_r: f64,
    pub direction: Direction,
}

impl CircumOrderData {
    /// True when the circumcenters are ordered like their apexes.
    pub fn order_correct(&self) -> bool {
        match self.direction {
            Direction::TowardRight => self.h_rho > self.h_lambda,
            Direction::TowardLeft => self.h_rho < self.h_lambda,
        }
    }

    /// The same data with the opposite positive direction.
    pub fn reversed(&self) -> Self {
        Self {
            h_lambda: -self.h_lambda,
            h_rho: -self.h_rho,
            h_r: -self.h_r,
            direction: match self.direction {
                Direction::TowardRight => Direction::TowardLeft,
                Direction::TowardLeft => Direction::TowardRight,
            },
            ..*self
        }
    }

    /// Relative residual of `r_τ² = r_R² + h_R² − 2 h_R h_ρ`, which holds
    /// because `R` lies on the circumsphere of `ρ`.
    pub fn identity_residual(&self) -> f64 {
        let lhs = self.r_tau * self.r_tau;
        let cross = 2.0 * self.h_r * self.h_rho;
        let rhs = self.r_r * self.r_r + self.h_r * self.h_r - cross;
        let scale = lhs
            .max(self.r_r * self.r_r)
            .max(self.h_r * self.h_r)
            .max(cross.abs())
            .max(f64::MIN_POSITIVE);
        (lhs - rhs).abs() / scale
    }
}

fn side_status(simplex: &[Point], other_apex: &Point, tol: &Tolerance) -> Result<PairStatus> {
    let c = geometry::circumcenter(simplex)?;
    let gap = ((other_apex - &c.center).norm() - c.radius) / c.radius;
    Ok(if gap > tol.eps {
        PairStatus::Strict
    } else if gap < -tol.eps {
        PairStatus::Violated
    } else {
        PairStatus::Degenerate
    })
}

/// Delaunay status of an already flattened pair.
pub fn flat_pair_status(flat: &FlatPair, tol: &Tolerance) -> Result<PairStatus> {
    let a = side_status(&flat.left_simplex(), &flat.right_apex, tol)?;
    let b = side_status(&flat.right_simplex(), &flat.left_apex, tol)?;
    Ok(match (a, b) {
        (PairStatus::Violated, _) | (_, PairStatus::Violated) => PairStatus::Violated,
        (PairStatus::Strict, PairStatus::Strict) => PairStatus::Strict,
        _ => PairStatus::Degenerate,
    })
}

/// Delaunay status of the pair `facet * left_apex`, `facet * right_apex`.
pub fn pair_status(facet: &[Point], left_apex: &Point, right_apex: &Point, tol: &Tolerance) -> Result<PairStatus> {
    flat_pair_status(&flatten_pair(facet, left_apex, right_apex)?, tol)
}

struct PairPoints {
    facet: Vec<Point>,
    left_apex: Point,
    right_apex: Point,
}

fn pair_points(complex: &SimplicialComplex, left: usize, right: usize, facet: usize) -> Result<PairPoints> {
    let n = complex.dim();
    if n == 0 {
        return Err(Error::InvalidInput("a 0-dimensional complex has no facets".into()));
    }
    for top in [left, right] {
        if !complex.cofaces(n - 1, facet).iter().any(|inc| inc.simplex == top) {
            return Err(Error::InvalidInput(format!(
                "simplex {:?} does not contain facet {:?}",
                complex.simplex(n, top).vertices(),
                complex.simplex(n - 1, facet).vertices()
            )));
        }
    }
    let pts = complex.points();
    Ok(PairPoints {
        facet: complex.simplex_points(n - 1, facet),
        left_apex: pts.point(complex.apex(n - 1, facet, left)),
        right_apex: pts.point(complex.apex(n - 1, facet, right)),
    })
}

/// Delaunay status of two adjacent top simplices of a complex.
pub fn is_delaunay_pair(complex: &SimplicialComplex, left: usize, right: usize, facet: usize) -> Result<PairStatus> {
    let pp = pair_points(complex, left, right, facet)?;
    pair_status(&pp.facet, &pp.left_apex, &pp.right_apex, complex.tolerance())
}

/// Circumcenter-order data for a flattened pair, positive toward the right
/// apex.
pub fn flat_circumcenter_order(flat: &FlatPair) -> Result<CircumOrderData> {
    let n = flat.facet.len();
    let c_tau = geometry::circumcenter(&flat.facet)?;
    let c_lambda = geometry::circumcenter(&flat.left_simplex())?;
    let c_rho = geometry::circumcenter(&flat.right_simplex())?;
    // the facet spans x_n = 0 and the right apex has x_n > 0, so the axis is e_n
    let along = |p: &Point| p[n - 1] - c_tau.center[n - 1];
    let mut offset = &flat.right_apex - &c_tau.center;
    offset[n - 1] = 0.0;
    Ok(CircumOrderData {
        h_lambda: along(&c_lambda.center),
        h_rho: along(&c_rho.center),
        h_r: along(&flat.right_apex),
        r_tau: c_tau.radius,
        r_r: offset.norm(),
        direction: Direction::TowardRight,
    })
}

pub fn circumcenter_order_points(facet: &[Point], left_apex: &Point, right_apex: &Point) -> Result<CircumOrderData> {
    flat_circumcenter_order(&flatten_pair(facet, left_apex, right_apex)?)
}

pub fn circumcenter_order(complex: &SimplicialComplex, left: usize, right: usize, facet: usize) -> Result<CircumOrderData> {
    let pp = pair_points(complex, left, right, facet)?;
    circumcenter_order_points(&pp.facet, &pp.left_apex, &pp.right_apex)
}

/// One-sidedness of the simplex `facet * apex` with respect to `facet`.
pub fn one_sidedness(facet: &[Point], apex: &Point, tol: &Tolerance) -> Result<OneSided> {
    let mut simplex = facet.to_vec();
    simplex.push(apex.clone());
    let c = geometry::circumcenter(&simplex)?;
    Ok(match geometry::halfspace_sign(facet, apex, &c.center, tol)? {
        Sign::Positive => OneSided::Yes,
        Sign::Zero => OneSided::Marginal,
        Sign::Negative => OneSided::No,
    })
}

/// One-sidedness of top simplex `top` with respect to its facet `facet`.
pub fn is_one_sided(complex: &SimplicialComplex, top: usize, facet: usize) -> Result<OneSided> {
    let n = complex.dim();
    if n == 0 || !complex.faces(n, top).iter().any(|inc| inc.simplex == facet) {
        return Err(Error::InvalidInput("facet is not a face of the top simplex".into()));
    }
    let apex = complex.points().point(complex.apex(n - 1, facet, top));
    one_sidedness(&complex.simplex_points(n - 1, facet), &apex, complex.tolerance())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFinding {
    pub facet: usize,
    pub left: usize,
    pub right: usize,
    pub facet_vertices: Vec<usize>,
    pub status: PairStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFinding {
    pub facet: usize,
    pub top: usize,
    pub facet_vertices: Vec<usize>,
    pub top_vertices: Vec<usize>,
    pub status: OneSided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonpositiveDual {
    pub dim: usize,
    pub simplex: usize,
    pub vertices: Vec<usize>,
    pub signed_volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Qualifying,
    NotQualifying,
}

/// Classification of a mesh against the positivity hypotheses.
#[derive(Debug, Clone, Serialize)]
pub struct MeshReport {
    pub schema_version: u32,
    pub dim: usize,
    pub ambient_dim: usize,
    pub counts: Vec<usize>,
    pub verdict: Verdict,
    /// One entry per interior codimension-1 face.
    pub pairs: Vec<PairFinding>,
    /// One entry per boundary facet.
    pub boundary: Vec<BoundaryFinding>,
    /// Duals with signed volume `<= 0`, all dimensions below `n`.
    pub nonpositive_duals: Vec<NonpositiveDual>,
    /// Geometric failures met while classifying.
    pub notes: Vec<String>,
}

impl MeshReport {
    pub fn is_qualifying(&self) -> bool {
        self.verdict == Verdict::Qualifying
    }

    pub fn violated_pairs(&self) -> impl Iterator<Item = &PairFinding> {
        self.pairs.iter().filter(|p| p.status == PairStatus::Violated)
    }

    pub fn degenerate_pairs(&self) -> impl Iterator<Item = &PairFinding> {
        self.pairs.iter().filter(|p| p.status == PairStatus::Degenerate)
    }

    pub fn non_one_sided(&self) -> impl Iterator<Item = &BoundaryFinding> {
        self.boundary.iter().filter(|b| b.status != OneSided::Yes)
    }

    pub fn nonpositive_in_dim(&self, dim: usize) -> impl Iterator<Item = &NonpositiveDual> {
        self.nonpositive_duals.iter().filter(move |d| d.dim == dim)
    }
}

/// Runs every pair, boundary and dual-volume check. Geometric failures are
/// recorded in the report rather than returned.
pub fn classify_complex(complex: &SimplicialComplex) -> MeshReport {
    let n = complex.dim();
    let mut notes = Vec::new();

    let interior = complex.interior_faces();
    let pair_results: Vec<_> = interior
        .par_iter()
        .map(|&(f, l, r)| (f, l, r, is_delaunay_pair(complex, l, r, f)))
        .collect();
    let mut pairs = Vec::with_capacity(pair_results.len());
    for (facet, left, right, res) in pair_results {
        let status = res.unwrap_or_else(|e| {
            notes.push(format!("pair at facet {facet}: {e}"));
            PairStatus::Degenerate
        });
        pairs.push(PairFinding {
            facet,
            left,
            right,
            facet_vertices: complex.simplex(n - 1, facet).vertices().to_vec(),
            status,
        });
    }

    let mut boundary = Vec::new();
    for bf in complex.boundary_faces() {
        let status = is_one_sided(complex, bf.coface, bf.facet).unwrap_or_else(|e| {
            notes.push(format!("boundary facet {}: {e}", bf.facet));
            OneSided::Marginal
        });
        boundary.push(BoundaryFinding {
            facet: bf.facet,
            top: bf.coface,
            facet_vertices: complex.simplex(n - 1, bf.facet).vertices().to_vec(),
            top_vertices: complex.simplex(n, bf.coface).vertices().to_vec(),
            status,
        });
    }

    let mut nonpositive_duals = Vec::new();
    for p in 0..n {
        match signed_dual::dual_volumes(complex, p) {
            Ok(v) => {
                for (i, &vol) in v.signed.iter().enumerate() {
                    if vol <= 0.0 {
                        nonpositive_duals.push(NonpositiveDual {
                            dim: p,
                            simplex: i,
                            vertices: complex.simplex(p, i).vertices().to_vec(),
                            signed_volume: vol,
                        });
                    }
                }
            }
            Err(e) => notes.push(format!("dual volumes at dimension {p}: {e}")),
        }
    }

    let qualifying = pairs.iter().all(|p| p.status == PairStatus::Strict)
        && boundary.iter().all(|b| b.status == OneSided::Yes);
    MeshReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dim: n,
        ambient_dim: complex.ambient_dim(),
        counts: complex.counts(),
        verdict: if qualifying {
            Verdict::Qualifying
        } else {
            Verdict::NotQualifying
        },
        pairs,
        boundary,
        nonpositive_duals,
        notes,
    }
}
