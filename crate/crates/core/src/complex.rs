//! Embedded simplicial complexes with face/coface incidence.
//!
//! A simplex is identified by its sorted vertex tuple; orientation is stored
//! separately as `±1` relative to that sorted order. Simplices of each
//! dimension are indexed in lexicographic order of their vertex tuples, so
//! building the same input twice yields identical indexing.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, Circumdata, Point};
use crate::tolerance::{Tolerance, DEGENERACY_RATIO};

/// Point coordinates in `R^N`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPoints {
    dim: usize,
    coords: Vec<f64>,
}

impl EmbeddedPoints {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("embedding dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("point {} has a non-finite coordinate", i / dim)));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    r.len()
                )));
            }
            coords.extend_from_slice(r);
        }
        Self::new(dim, coords)
    }

    /// Embedding dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point(&self, i: usize) -> Point {
        DVector::from_column_slice(self.row(i))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Simplex {
    vertices: Vec<usize>,
    orientation: i8,
}

impl Simplex {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// `+1` or `-1` relative to the sorted vertex order.
    pub fn orientation(&self) -> i8 {
        self.orientation
    }
}

/// One entry of a face or coface list: the index of the related simplex and
/// the relative orientation sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub simplex: usize,
    pub sign: i8,
}

/// A codimension-1 simplex on the domain boundary with its single coface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFace {
    pub facet: usize,
    pub coface: usize,
}

/// Signed incidence table of `∂_p`, stored by column (one column per
/// p-simplex, entries indexed by (p-1)-face).
#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    p: usize,
    rows: usize,
    columns: Vec<Vec<(usize, i8)>>,
}

impl BoundaryOperator {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.columns.len())
    }

    pub fn column(&self, col: usize) -> &[(usize, i8)] {
        &self.columns[col]
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map_or(0, |(_, s)| *s)
    }

    /// Nonzero entries of one row as `(column, sign)`.
    pub fn row_entries(&self, row: usize) -> Vec<(usize, i8)> {
        self.columns
            .iter()
            .enumerate()
            .filter_map(|(c, col)| col.iter().find(|(r, _)| *r == row).map(|(_, s)| (c, *s)))
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.columns.len());
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, s) in col {
                m[(r, c)] = f64::from(s);
            }
        }
        m
    }

    /// The coboundary `d_{p-1} = ∂_pᵀ` as a dense matrix.
    pub fn coboundary_dense(&self) -> DMatrix<f64> {
        self.to_dense().transpose()
    }
}

/// An embedded simplicial complex, immutable after construction.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    points: EmbeddedPoints,
    simplices: Vec<Vec<Simplex>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    faces: Vec<Vec<Vec<Incidence>>>,
    cofaces: Vec<Vec<Vec<Incidence>>>,
    circumdata: Vec<Vec<Circumdata>>,
    volumes: Vec<Vec<f64>>,
    on_boundary: Vec<Vec<bool>>,
    tol: Tolerance,
}

fn permutation_parity(v: &[usize]) -> i8 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn subsets(vertices: &[usize], size: usize, out: &mut BTreeSet<Vec<usize>>) {
    fn rec(vs: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if cur.len() == size {
            out.insert(cur.clone());
            return;
        }
        for i in start..vs.len() {
            cur.push(vs[i]);
            rec(vs, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(vertices, size, 0, &mut Vec::with_capacity(size), out);
}

impl SimplicialComplex {
    /// Builds the face-closed complex generated by `top_simplices`, using the
    /// default tolerance.
    pub fn build<T: AsRef<[usize]>>(points: EmbeddedPoints, top_simplices: &[T]) -> Result<Self> {
        Self::build_with(points, top_simplices, Tolerance::default())
    }

    pub fn build_with<T: AsRef<[usize]>>(
        points: EmbeddedPoints,
        top_simplices: &[T],
        tol: Tolerance,
    ) -> Result<Self> {
        let Some(first) = top_simplices.first() else {
            return Err(Error::InvalidInput("no top simplices given".into()));
        };
        let size = first.as_ref().len();
        if size == 0 {
            return Err(Error::InvalidInput("top simplices must have at least one vertex".into()));
        }
        let n = size - 1;
        if n > points.dim() {
            return Err(Error::InvalidInput(format!(
                "complex dimension {n} exceeds embedding dimension {}",
                points.dim()
            )));
        }

        let mut tops: Vec<Simplex> = Vec::with_capacity(top_simplices.len());
        for (t, s) in top_simplices.iter().enumerate() {
            let s = s.as_ref();
            if s.len() != size {
                return Err(Error::InvalidInput(format!(
                    "top simplex {t} has {} vertices, expected {size}",
                    s.len()
                )));
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= points.len()) {
                return Err(Error::InvalidInput(format!(
                    "top simplex {t} references vertex {bad} but only {} points exist",
                    points.len()
                )));
            }
            let mut sorted = s.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!("top simplex {t} repeats a vertex: {s:?}")));
            }
            tops.push(Simplex {
                vertices: sorted,
                orientation: permutation_parity(s),
            });
        }

        for top in &tops {
            let pts: Vec<Point> = top.vertices.iter().map(|&v| points.point(v)).collect();
            let longest = geometry::longest_edge(&pts);
            if n > 0 && geometry::simplex_volume(&pts) < DEGENERACY_RATIO * longest.powi(n as i32) {
                return Err(Error::Degenerate(format!("top simplex {:?} has zero volume", top.vertices)));
            }
        }

        let mut simplices: Vec<Vec<Simplex>> = Vec::with_capacity(n + 1);
        let mut lookup: Vec<HashMap<Vec<usize>, usize>> = Vec::with_capacity(n + 1);
        for p in 0..=n {
            let list: Vec<Simplex> = if p == n {
                let mut t = tops.clone();
                t.sort_by(|a, b| a.vertices.cmp(&b.vertices));
                if let Some(w) = t.windows(2).find(|w| w[0].vertices == w[1].vertices) {
                    return Err(Error::InvalidInput(format!("duplicate top simplex {:?}", w[0].vertices)));
                }
                t
            } else {
                let mut set = BTreeSet::new();
                for top in &tops {
                    subsets(&top.vertices, p + 1, &mut set);
                }
                set.into_iter()
                    .map(|vertices| Simplex {
                        vertices,
                        orientation: 1,
                    })
                    .collect()
            };
            lookup.push(
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.vertices.clone(), i))
                    .collect(),
            );
            simplices.push(list);
        }

        let mut faces: Vec<Vec<Vec<Incidence>>> = vec![vec![Vec::new(); simplices[0].len()]];
        let mut cofaces: Vec<Vec<Vec<Incidence>>> = simplices.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for p in 1..=n {
            let mut fp = Vec::with_capacity(simplices[p].len());
            for (idx, s) in simplices[p].iter().enumerate() {
                let mut list = Vec::with_capacity(p + 1);
                for i in 0..=p {
                    let mut face = s.vertices.clone();
                    face.remove(i);
                    let fi = lookup[p - 1][&face];
                    let alt = if i % 2 == 0 { 1 } else { -1 };
                    let sign = alt * s.orientation * simplices[p - 1][fi].orientation;
                    list.push(Incidence { simplex: fi, sign });
                    cofaces[p - 1][fi].push(Incidence { simplex: idx, sign });
                }
                fp.push(list);
            }
            faces.push(fp);
        }

        if n > 0 {
            for (i, cf) in cofaces[n - 1].iter().enumerate() {
                if cf.len() > 2 {
                    return Err(Error::NonManifold {
                        face: simplices[n - 1][i].vertices.clone(),
                        cofaces: cf.len(),
                    });
                }
            }
        }

        let mut circumdata = Vec::with_capacity(n + 1);
        let mut volumes = Vec::with_capacity(n + 1);
        for list in &simplices {
            let mut cd = Vec::with_capacity(list.len());
            let mut vol = Vec::with_capacity(list.len());
            for s in list {
                let pts: Vec<Point> = s.vertices.iter().map(|&v| points.point(v)).collect();
                cd.push(geometry::circumcenter(&pts)?);
                vol.push(geometry::simplex_volume(&pts));
            }
            circumdata.push(cd);
            volumes.push(vol);
        }

        let mut on_boundary: Vec<Vec<bool>> = simplices.iter().map(|l| vec![false; l.len()]).collect();
        if n > 0 {
            for (f, cf) in cofaces[n - 1].iter().enumerate() {
                if cf.len() == 1 {
                    let verts = &simplices[n - 1][f].vertices;
                    for p in 0..n {
                        let mut set = BTreeSet::new();
                        subsets(verts, p + 1, &mut set);
                        for s in set {
                            on_boundary[p][lookup[p][&s]] = true;
                        }
                    }
                }
            }
        }

        Ok(Self {
            points,
            simplices,
            lookup,
            faces,
            cofaces,
            circumdata,
            volumes,
            on_boundary,
            tol,
        })
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Embedding dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.points.dim()
    }

    pub fn points(&self) -> &EmbeddedPoints {
        &self.points
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    /// Number of simplices at each dimension `0..=n`.
    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn num_simplices(&self, p: usize) -> usize {
        self.simplices.get(p).map_or(0, Vec::len)
    }

    pub fn simplices(&self, p: usize) -> &[Simplex] {
        &self.simplices[p]
    }

    pub fn simplex(&self, p: usize, i: usize) -> &Simplex {
        &self.simplices[p][i]
    }

    /// Index of the simplex with the given vertices (any order).
    pub fn index_of(&self, vertices: &[usize]) -> Option<usize> {
        let p = vertices.len().checked_sub(1)?;
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.lookup.get(p)?.get(&key).copied()
    }

    /// The (p-1)-faces of a p-simplex, in order of the removed vertex.
    pub fn faces(&self, p: usize, i: usize) -> &[Incidence] {
        &self.faces[p][i]
    }

    /// The (p+1)-cofaces of a p-simplex.
    pub fn cofaces(&self, p: usize, i: usize) -> &[Incidence] {
        &self.cofaces[p][i]
    }

    pub fn circumdata(&self, p: usize, i: usize) -> &Circumdata {
        &self.circumdata[p][i]
    }

    /// Unsigned p-volume; vertices have measure 1.
    pub fn volume(&self, p: usize, i: usize) -> f64 {
        self.volumes[p][i]
    }

    pub fn simplex_points(&self, p: usize, i: usize) -> Vec<Point> {
        self.simplices[p][i]
            .vertices
            .iter()
            .map(|&v| self.points.point(v))
            .collect()
    }

    /// The vertex of `coface` (dimension p+1) that is not in `face`
    /// (dimension p).
    pub fn apex(&self, p: usize, face: usize, coface: usize) -> usize {
        let f = &self.simplices[p][face].vertices;
        *self.simplices[p + 1][coface]
            .vertices
            .iter()
            .find(|v| !f.contains(v))
            .expect("face is not contained in coface")
    }

    /// Whether a simplex lies in the domain boundary (is a face of a
    /// boundary facet).
    pub fn is_on_boundary(&self, p: usize, i: usize) -> bool {
        self.on_boundary[p][i]
    }

    /// Codimension-1 simplices with exactly one coface.
    pub fn boundary_faces(&self) -> Vec<BoundaryFace> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        self.cofaces[n - 1]
            .iter()
            .enumerate()
            .filter(|(_, cf)| cf.len() == 1)
            .map(|(facet, cf)| BoundaryFace {
                facet,
                coface: cf[0].simplex,
            })
            .collect()
    }

    /// Codimension-1 simplices with two cofaces, as `(facet, left, right)`.
    pub fn interior_faces(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        self.cofaces[n - 1]
            .iter()
            .enumerate()
            .filter(|(_, cf)| cf.len() == 2)
            .map(|(f, cf)| (f, cf[0].simplex, cf[1].simplex))
            .collect()
    }

    pub fn boundary_operator(&self, p: usize) -> Result<BoundaryOperator> {
        let n = self.dim();
        if p == 0 || p > n {
            return Err(Error::DimensionOutOfRange { p, max: n });
        }
        let columns = self.faces[p]
            .iter()
            .map(|list| list.iter().map(|inc| (inc.simplex, inc.sign)).collect())
            .collect();
        Ok(BoundaryOperator {
            p,
            rows: self.simplices[p - 1].len(),
            columns,
        })
    }

    /// Total n-volume of the complex.
    pub fn total_volume(&self) -> f64 {
        self.volumes[self.dim()].iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> SimplicialComplex {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        SimplicialComplex::build(pts, &[[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    fn two_tets() -> SimplicialComplex {
        let pts = EmbeddedPoints::from_rows(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.2, 0.2, -1.0],
        ])
        .unwrap();
        SimplicialComplex::build(pts, &[[0, 1, 2, 3], [0, 1, 2, 4]]).unwrap()
    }

    #[test]
    fn counts() {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let tri = SimplicialComplex::build(pts, &[[0, 1, 2]]).unwrap();
        assert_eq!(tri.counts(), vec![3, 3, 1]);
        assert_eq!(square().counts(), vec![4, 5, 2]);
        // C(4,k) per tet, minus the shared triangle's subsets: 5, 6+6-3, 4+4-1, 2
        assert_eq!(two_tets().counts(), vec![5, 9, 7, 2]);
    }

    #[test]
    fn edge_boundary_column() {
        let pts = EmbeddedPoints::from_rows(&[[0.0], [1.0]]).unwrap();
        let c = SimplicialComplex::build(pts, &[[0, 1]]).unwrap();
        let d = c.boundary_operator(1).unwrap();
        assert_eq!(d.entry(0, 0), -1);
        assert_eq!(d.entry(1, 0), 1);
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        for c in [square(), two_tets()] {
            for p in 2..=c.dim() {
                let a = c.boundary_operator(p - 1).unwrap().to_dense();
                let b = c.boundary_operator(p).unwrap().to_dense();
                assert!((a * b).iter().all(|&x| x == 0.0));
            }
        }
    }

    #[test]
    fn shared_edge_row_has_opposite_signs() {
        let c = square();
        let d2 = c.boundary_operator(2).unwrap();
        let diag = c.index_of(&[0, 2]).unwrap();
        let row = d2.row_entries(diag);
        assert_eq!(row.len(), 2);
        assert_eq!(row[0].1, -row[1].1);
    }

    #[test]
    fn inconsistent_orientation_is_tracked() {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        // second triangle given clockwise
        let c = SimplicialComplex::build(pts, &[[0, 1, 2], [0, 3, 2]]).unwrap();
        let d2 = c.boundary_operator(2).unwrap();
        let row = d2.row_entries(c.index_of(&[0, 2]).unwrap());
        assert_eq!(row[0].1, row[1].1);
        let d1 = c.boundary_operator(1).unwrap().to_dense();
        assert!((d1 * d2.to_dense()).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn boundary_faces() {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let tri = SimplicialComplex::build(pts, &[[0, 1, 2]]).unwrap();
        assert_eq!(tri.boundary_faces().len(), 3);

        let sq = square();
        let b = sq.boundary_faces();
        assert_eq!(b.len(), 4);
        let diag = sq.index_of(&[0, 2]).unwrap();
        assert!(b.iter().all(|f| f.facet != diag));

        let tets = two_tets();
        let b = tets.boundary_faces();
        assert_eq!(b.len(), 6);
        let shared = tets.index_of(&[0, 1, 2]).unwrap();
        assert!(b.iter().all(|f| f.facet != shared));
    }

    #[test]
    fn rejects_non_manifold_fan() {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let err = SimplicialComplex::build(pts, &[[0, 1, 2], [0, 1, 3], [0, 1, 4]]).unwrap_err();
        match err {
            Error::NonManifold { face, cofaces } => {
                assert_eq!(face, vec![0, 1]);
                assert_eq!(cofaces, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_degenerate_top() {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert!(matches!(SimplicialComplex::build(pts, &[[0, 1, 2]]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rejects_bad_input() {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(SimplicialComplex::build(pts.clone(), &[[0, 1, 7]]).is_err());
        assert!(SimplicialComplex::build(pts.clone(), &[[0, 1, 1]]).is_err());
        assert!(SimplicialComplex::build(pts, &[[0, 1, 2, 0]]).is_err());
        assert!(EmbeddedPoints::from_rows(&[[0.0, f64::NAN]]).is_err());
    }

    #[test]
    fn indexing_is_deterministic() {
        let a = two_tets();
        let b = two_tets();
        for p in 0..=3 {
            assert_eq!(a.simplices(p), b.simplices(p));
        }
        let verts: Vec<_> = a.simplices(1).iter().map(|s| s.vertices().to_vec()).collect();
        let mut sorted = verts.clone();
        sorted.sort();
        assert_eq!(verts, sorted);
    }

    #[test]
    fn boundary_operator_range() {
        let c = square();
        assert!(c.boundary_operator(0).is_err());
        assert!(c.boundary_operator(3).is_err());
    }
}
