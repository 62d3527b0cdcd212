//! Geometric primitives: circumcenters, simplex volumes, half-space side
//! tests and isometric flattening of simplex pairs.
//!
//! Simplices are passed as slices of points in `R^N`; a k-simplex has `k + 1`
//! points and may live in any ambient dimension `N >= k`.

use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance::{Tolerance, DEGENERACY_RATIO};

pub type Point = DVector<f64>;

/// Outcome of a side test. `Zero` means "on the hyperplane within tolerance".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match self.value() * rhs.value() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

/// Circumcenter and circumradius of a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Circumdata {
    pub center: Point,
    pub radius: f64,
}

/// Orthonormal frame of the affine hull of a point set.
#[derive(Debug, Clone)]
pub struct AffineFrame {
    origin: Point,
    basis: Vec<Point>,
}

impl AffineFrame {
    /// Builds a frame from affinely independent points. Returns `None` when a
    /// point adds less than `rel_tol` (relative to its offset length) to the
    /// span of the previous ones.
    pub fn from_independent(points: &[Point], rel_tol: f64) -> Option<Self> {
        let origin = points.first()?.clone();
        let mut basis: Vec<Point> = Vec::with_capacity(points.len().saturating_sub(1));
        for p in &points[1..] {
            let offset = p - &origin;
            let scale = offset.norm();
            if scale == 0.0 {
                return None;
            }
            let mut v = offset;
            // two Gram-Schmidt passes keep the basis orthonormal to round-off
            for _ in 0..2 {
                for b in &basis {
                    let c = v.dot(b);
                    v.axpy(-c, b, 1.0);
                }
            }
            let n = v.norm();
            if n <= rel_tol * scale {
                return None;
            }
            basis.push(v / n);
        }
        Some(Self { origin, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    /// Coordinates of the orthogonal projection of `p` in this frame.
    pub fn coords(&self, p: &Point) -> DVector<f64> {
        let d = p - &self.origin;
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|b| d.dot(b)))
    }

    /// Component of `p - origin` orthogonal to the frame.
    pub fn orthogonal_part(&self, p: &Point) -> Point {
        let mut d = p - &self.origin;
        for b in &self.basis {
            let c = d.dot(b);
            d.axpy(-c, b, 1.0);
        }
        d
    }
}

pub fn longest_edge(points: &[Point]) -> f64 {
    let mut longest = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            longest = longest.max((a - b).norm());
        }
    }
    longest
}

fn edge_matrix(points: &[Point]) -> DMatrix<f64> {
    let k = points.len() - 1;
    let ambient = points[0].len();
    DMatrix::from_fn(ambient, k, |r, c| points[c + 1][r] - points[0][r])
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Unsigned k-volume. A single point has measure 1.
pub fn simplex_volume(points: &[Point]) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => 1.0,
        n => {
            let e = edge_matrix(points);
            if e.nrows() < e.ncols() {
                return 0.0;
            }
            // |det R| keeps full precision where sqrt(det G) would halve it
            let r = e.qr().r();
            r.diagonal().iter().map(|d| d.abs()).product::<f64>() / factorial(n - 1)
        }
    }
}

/// True when the simplex volume is below `DEGENERACY_RATIO * longest_edge^k`.
pub fn is_degenerate(points: &[Point]) -> bool {
    let k = points.len().saturating_sub(1);
    if k == 0 {
        return false;
    }
    let longest = longest_edge(points);
    if longest == 0.0 {
        return true;
    }
    simplex_volume(points) < DEGENERACY_RATIO * longest.powi(k as i32)
}

/// Circumcenter in the affine hull of the simplex, solved from the
/// equidistance conditions written in the simplex's own edge basis.
pub fn circumcenter(points: &[Point]) -> Result<Circumdata> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("circumcenter of an empty point set".into()));
    };
    if points.len() == 1 {
        return Ok(Circumdata {
            center: first.clone(),
            radius: 0.0,
        });
    }
    if is_degenerate(points) {
        return Err(Error::Degenerate(format!(
            "{} points are affinely dependent",
            points.len()
        )));
    }
    // with E = QR the conditions Eᵀ(x) = |e_i|²/2 for x = Qy become
    // Rᵀy = |e_i|²/2, avoiding the squared conditioning of EᵀE
    let e = edge_matrix(points);
    let rhs = DVector::from_iterator(e.ncols(), e.column_iter().map(|c| 0.5 * c.norm_squared()));
    let qr = e.qr();
    let y = qr
        .r()
        .transpose()
        .solve_lower_triangular(&rhs)
        .ok_or_else(|| Error::Degenerate("singular edge matrix".into()))?;
    let offset = qr.q() * y;
    let radius = offset.norm();
    Ok(Circumdata {
        center: first + offset,
        radius,
    })
}

/// Which side of the facet's affine hull `query` lies on, measured inside
/// the affine hull of `facet ∪ {apex}`. `Positive` is the apex side.
pub fn halfspace_sign(facet: &[Point], apex: &Point, query: &Point, tol: &Tolerance) -> Result<Sign> {
    if facet.is_empty() {
        return Err(Error::InvalidInput("half-space test needs a nonempty facet".into()));
    }
    let mut all = facet.to_vec();
    all.push(apex.clone());
    let scale = longest_edge(&all);
    if is_degenerate(&all) {
        return Err(Error::Degenerate("facet and apex are affinely dependent".into()));
    }
    let frame = AffineFrame::from_independent(facet, DEGENERACY_RATIO)
        .ok_or_else(|| Error::Degenerate("facet is degenerate".into()))?;
    let normal = frame.orthogonal_part(apex);
    let unit = &normal / normal.norm();

    let mut rest = frame.orthogonal_part(query);
    let t = rest.dot(&unit);
    rest.axpy(-t, &unit, 1.0);
    let residual = rest.norm();
    let hull_tol = tol.hull() * scale.max((query - frame.origin()).norm());
    if residual > hull_tol {
        return Err(Error::OutsideAffineHull {
            residual,
            tolerance: hull_tol,
        });
    }
    if t.abs() <= tol.eps * scale {
        Ok(Sign::Zero)
    } else {
        Ok(Sign::of(t))
    }
}

/// A pair of n-simplices sharing an (n-1)-facet, laid out in `R^n`.
///
/// The facet lies in the hyperplane `x_n = 0`; the left apex has negative
/// and the right apex positive last coordinate.
#[derive(Debug, Clone)]
pub struct FlatPair {
    pub facet: Vec<Point>,
    pub left_apex: Point,
    pub right_apex: Point,
}

impl FlatPair {
    pub fn left_simplex(&self) -> Vec<Point> {
        let mut s = self.facet.clone();
        s.push(self.left_apex.clone());
        s
    }

    pub fn right_simplex(&self) -> Vec<Point> {
        let mut s = self.facet.clone();
        s.push(self.right_apex.clone());
        s
    }
}

/// Unfolds two simplices about their shared facet into `R^n`, preserving
/// all distances within each simplex.
pub fn flatten_pair(facet: &[Point], left_apex: &Point, right_apex: &Point) -> Result<FlatPair> {
    let n = facet.len();
    if n == 0 {
        return Err(Error::InvalidInput("shared facet is empty".into()));
    }
    for apex in [left_apex, right_apex] {
        let mut s = facet.to_vec();
        s.push(apex.clone());
        if is_degenerate(&s) {
            return Err(Error::Degenerate("simplex of the pair is degenerate".into()));
        }
    }
    let frame = AffineFrame::from_independent(facet, DEGENERACY_RATIO)
        .ok_or_else(|| Error::Degenerate("shared facet is degenerate".into()))?;
    let place = |p: &Point, height: f64| {
        let c = frame.coords(p);
        let mut out = DVector::zeros(n);
        out.rows_mut(0, n - 1).copy_from(&c);
        out[n - 1] = height;
        out
    };
    let facet_flat = facet.iter().map(|p| place(p, 0.0)).collect();
    let h_left = frame.orthogonal_part(left_apex).norm();
    let h_right = frame.orthogonal_part(right_apex).norm();
    Ok(FlatPair {
        facet: facet_flat,
        left_apex: place(left_apex, -h_left),
        right_apex: place(right_apex, h_right),
    })
}

/// Barycentric coordinates of the projection of `q` onto the affine hull of
/// the simplex.
pub fn barycentric(points: &[Point], q: &Point) -> Result<Vec<f64>> {
    if points.len() == 1 {
        return Ok(vec![1.0]);
    }
    let e = edge_matrix(points);
    let gram = e.transpose() * &e;
    let rhs = e.transpose() * (q - &points[0]);
    let lam = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("singular Gram matrix".into()))?;
    let mut out = Vec::with_capacity(points.len());
    out.push(1.0 - lam.sum());
    out.extend(lam.iter().copied());
    Ok(out)
}

/// Whether every face of the simplex (including itself, excluding vertices)
/// strictly contains its own circumcenter.
pub fn is_completely_well_centered(points: &[Point], tol: &Tolerance) -> Result<bool> {
    let k = points.len();
    for mask in 1u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let face: Vec<Point> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| points[i].clone()).collect();
        let c = circumcenter(&face)?;
        if barycentric(&face, &c.center)?.iter().any(|&b| b <= tol.eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Determinant of the edge vectors `p_i - p_0` of `n + 1` points in `R^n`.
pub fn orientation_determinant(points: &[Point]) -> f64 {
    let e = edge_matrix(points);
    assert_eq!(e.nrows(), e.ncols(), "orientation needs n + 1 points in R^n");
    e.determinant()
}
