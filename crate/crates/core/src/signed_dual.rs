//! Signed circumcentric dual cells.
//!
//! The dual of a p-simplex `τ` is assembled from elementary dual simplices,
//! one per ascending coface chain `τ ≺ σ^{p+1} ≺ … ≺ σ^n`. Each elementary
//! dual has vertices `c_τ, c_{σ^{p+1}}, …, c_{σ^n}` and a sign equal to the
//! product of per-step signs: the step from `σ^i` to `σ^{i+1}` is `+1` when
//! the circumcenter of `σ^{i+1}` lies on the same side of `σ^i` as the vertex
//! completing `σ^{i+1}`, `-1` on the opposite side, and `0` when it lies on
//! the hyperplane of `σ^i`.
//!
//! Every elementary dual lies in the affine hull of its top simplex, so for
//! complexes embedded in a higher dimensional space each piece is measured in
//! the plane of its own top simplex.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::geometry::{self, halfspace_sign, AffineFrame, Point, Sign};
use crate::tolerance::DEGENERACY_RATIO;

/// One elementary dual simplex of a p-simplex.
#[derive(Debug, Clone)]
pub struct ElementaryDual {
    /// Dimension of the base simplex.
    pub base_dim: usize,
    pub base: usize,
    /// Indices of `σ^{p+1}, …, σ^n`, each in its own dimension.
    pub chain: Vec<usize>,
    /// Circumcenters `c_τ, c_{σ^{p+1}}, …, c_{σ^n}`.
    pub vertices: Vec<Point>,
    /// `s_p, …, s_{n-1}`.
    pub step_signs: Vec<Sign>,
    pub sign: Sign,
    pub unsigned_volume: f64,
}

impl ElementaryDual {
    pub fn signed_volume(&self) -> f64 {
        self.sign.as_f64() * self.unsigned_volume
    }

    /// The top simplex containing this piece.
    pub fn top(&self) -> usize {
        self.chain.last().copied().unwrap_or(self.base)
    }

    pub fn is_marginal(&self) -> bool {
        self.sign == Sign::Zero
    }
}

/// The assembled dual cell `⋆τ`.
#[derive(Debug, Clone)]
pub struct DualCell {
    pub base_dim: usize,
    pub base: usize,
    pub pieces: Vec<ElementaryDual>,
    /// Sum of signed piece volumes.
    pub signed_volume: f64,
    /// Sum of unsigned piece volumes.
    pub unsigned_volume: f64,
}

impl DualCell {
    fn from_pieces(base_dim: usize, base: usize, pieces: Vec<ElementaryDual>) -> Self {
        let signed_volume = pieces.iter().map(ElementaryDual::signed_volume).sum();
        let unsigned_volume = pieces.iter().map(|e| e.unsigned_volume).sum();
        Self {
            base_dim,
            base,
            pieces,
            signed_volume,
            unsigned_volume,
        }
    }

    /// True when some piece has a zero step sign (circumcenter on a facet
    /// hyperplane); such pieces contribute zero.
    pub fn is_marginal(&self) -> bool {
        self.pieces.iter().any(ElementaryDual::is_marginal)
    }

    pub fn num_negative_pieces(&self) -> usize {
        self.pieces.iter().filter(|e| e.sign == Sign::Negative).count()
    }

    /// Signed volume of the pieces lying in one top simplex.
    pub fn restricted_volume(&self, top: usize) -> f64 {
        self.pieces
            .iter()
            .filter(|e| e.top() == top)
            .map(ElementaryDual::signed_volume)
            .sum()
    }
}

/// Signed and unsigned dual volumes of every p-simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVolumes {
    pub p: usize,
    pub signed: Vec<f64>,
    pub unsigned: Vec<f64>,
}

/// Sign of the step from `lower` (dimension `i`) to its coface `upper`.
pub fn step_sign(complex: &SimplicialComplex, i: usize, lower: usize, upper: usize) -> Result<Sign> {
    let facet = complex.simplex_points(i, lower);
    let apex = complex.points().point(complex.apex(i, lower, upper));
    let query = &complex.circumdata(i + 1, upper).center;
    halfspace_sign(&facet, &apex, query, complex.tolerance())
}

fn check_dim(complex: &SimplicialComplex, p: usize) -> Result<()> {
    if p > complex.dim() {
        Err(Error::DimensionOutOfRange { p, max: complex.dim() })
    } else {
        Ok(())
    }
}

/// All elementary duals of the p-simplex `tau`, one per ascending chain.
/// A top simplex has a single empty chain whose measure is 1.
pub fn elementary_duals(complex: &SimplicialComplex, p: usize, tau: usize) -> Result<Vec<ElementaryDual>> {
    check_dim(complex, p)?;
    let n = complex.dim();
    let mut out = Vec::new();
    let mut chain = Vec::with_capacity(n - p);
    let mut signs = Vec::with_capacity(n - p);
    extend_chains(complex, p, tau, p, tau, &mut chain, &mut signs, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend_chains(
    complex: &SimplicialComplex,
    base_dim: usize,
    base: usize,
    dim: usize,
    current: usize,
    chain: &mut Vec<usize>,
    signs: &mut Vec<Sign>,
    out: &mut Vec<ElementaryDual>,
) -> Result<()> {
    if dim == complex.dim() {
        let mut vertices = Vec::with_capacity(chain.len() + 1);
        vertices.push(complex.circumdata(base_dim, base).center.clone());
        for (k, &s) in chain.iter().enumerate() {
            vertices.push(complex.circumdata(base_dim + 1 + k, s).center.clone());
        }
        let sign = signs.iter().fold(Sign::Positive, |acc, &s| acc * s);
        let unsigned_volume = geometry::simplex_volume(&vertices);
        out.push(ElementaryDual {
            base_dim,
            base,
            chain: chain.clone(),
            vertices,
            step_signs: signs.clone(),
            sign,
            unsigned_volume,
        });
        return Ok(());
    }
    for inc in complex.cofaces(dim, current) {
        let s = step_sign(complex, dim, current, inc.simplex)?;
        chain.push(inc.simplex);
        signs.push(s);
        extend_chains(complex, base_dim, base, dim + 1, inc.simplex, chain, signs, out)?;
        chain.pop();
        signs.pop();
    }
    Ok(())
}

pub fn signed_dual_volume(complex: &SimplicialComplex, p: usize, tau: usize) -> Result<DualCell> {
    let pieces = elementary_duals(complex, p, tau)?;
    Ok(DualCell::from_pieces(p, tau, pieces))
}

/// Signed volume of the pieces of `⋆τ` lying inside one top simplex.
pub fn restricted_dual_volume(complex: &SimplicialComplex, p: usize, tau: usize, top: usize) -> Result<f64> {
    Ok(signed_dual_volume(complex, p, tau)?.restricted_volume(top))
}

/// Dual cells of every p-simplex, in simplex order.
pub fn dual_cells(complex: &SimplicialComplex, p: usize) -> Result<Vec<DualCell>> {
    check_dim(complex, p)?;
    (0..complex.num_simplices(p))
        .into_par_iter()
        .map(|i| signed_dual_volume(complex, p, i))
        .collect()
}

/// Signed dual volumes of all p-simplices together with the legacy
/// unsigned sums.
pub fn dual_volumes(complex: &SimplicialComplex, p: usize) -> Result<DualVolumes> {
    let cells = dual_cells(complex, p)?;
    Ok(DualVolumes {
        p,
        signed: cells.iter().map(|c| c.signed_volume).collect(),
        unsigned: cells.iter().map(|c| c.unsigned_volume).collect(),
    })
}

/// Orientation of an elementary dual relative to the corresponding
/// elementary dual of a well-centered reference simplex, computed from
/// determinants alone.
///
/// `reference` holds `n + 1` points matched to the vertices of the top
/// simplex of `ed` in sorted vertex order. Each orientation is measured
/// against its own simplex in the same frame, so the reference need not be
/// given with matching handedness.
pub fn orientation_sign_via_determinant(
    complex: &SimplicialComplex,
    ed: &ElementaryDual,
    reference: &[Point],
) -> Result<Sign> {
    let n = complex.dim();
    let p = ed.base_dim;
    if reference.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "reference simplex needs {} points, got {}",
            n + 1,
            reference.len()
        )));
    }
    if p == n {
        return Ok(Sign::Positive);
    }
    if !geometry::is_completely_well_centered(reference, complex.tolerance())? {
        return Err(Error::InvalidInput("reference simplex is not well-centered".into()));
    }

    let top = ed.top();
    let top_vertices = complex.simplex(n, top).vertices().to_vec();
    let position = |v: usize| top_vertices.iter().position(|&w| w == v).expect("vertex of top simplex");

    // vertex positions in the order: τ's vertices, then the apex added at each step
    let mut order: Vec<usize> = complex.simplex(p, ed.base).vertices().iter().map(|&v| position(v)).collect();
    let mut prev = ed.base;
    for (k, &next) in ed.chain.iter().enumerate() {
        order.push(position(complex.apex(p + k, prev, next)));
        prev = next;
    }

    let top_points = complex.simplex_points(n, top);
    let ed_det = chain_determinant(&top_points, &order, p, Some(&ed.vertices))?;
    let ref_det = chain_determinant(reference, &order, p, None)?;
    Ok(ed_det * ref_det)
}

/// Sign of `det[τ edges | c_{σ^{i}} - c_τ]` times the sign of the simplex
/// itself in the same vertex order, both evaluated in a frame of the
/// simplex's affine hull.
fn chain_determinant(points: &[Point], order: &[usize], p: usize, centers: Option<&[Point]>) -> Result<Sign> {
    let n = points.len() - 1;
    let frame = AffineFrame::from_independent(points, DEGENERACY_RATIO)
        .ok_or_else(|| Error::Degenerate("top simplex is degenerate".into()))?;
    let ordered: Vec<Point> = order.iter().map(|&i| frame.coords(&points[i])).collect();

    let owned_centers;
    let centers: Vec<Point> = match centers {
        Some(c) => c.iter().map(|x| frame.coords(x)).collect(),
        None => {
            owned_centers = (p..=n)
                .map(|k| geometry::circumcenter(&ordered[..=k]).map(|c| c.center))
                .collect::<Result<Vec<_>>>()?;
            owned_centers
        }
    };

    let mut dual = DMatrix::zeros(n, n);
    let mut primal = DMatrix::zeros(n, n);
    for j in 1..=n {
        let col = &ordered[j] - &ordered[0];
        primal.set_column(j - 1, &col);
    }
    for j in 1..=p {
        dual.set_column(j - 1, &(&ordered[j] - &ordered[0]));
    }
    for k in 1..centers.len() {
        dual.set_column(p + k - 1, &(&centers[k] - &centers[0]));
    }
    let scale = geometry::longest_edge(&ordered).max(
        centers
            .iter()
            .map(|c| (c - &centers[0]).norm())
            .fold(0.0, f64::max),
    );
    let d = dual.determinant();
    if d.abs() <= DEGENERACY_RATIO * scale.powi(n as i32) {
        return Err(Error::Degenerate("elementary dual has zero volume".into()));
    }
    Ok(Sign::of(d) * Sign::of(primal.determinant()))
}
