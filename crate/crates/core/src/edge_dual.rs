//! Geometry of the dual polygon of an interior edge in a tetrahedral mesh.
//!
//! The polygon's vertices are the circumcenters of the tetrahedra around the
//! edge, taken in cyclic order.

use nalgebra::{DMatrix, Vector2};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone)]
pub struct EdgeDualPolygon {
    pub edge: usize,
    /// Tetrahedra around the edge in cyclic order.
    pub tets: Vec<usize>,
    /// Their circumcenters.
    pub vertices: Vec<Point>,
    /// Largest distance of a vertex from the best-fit plane.
    pub planarity_deviation: f64,
    pub diameter: f64,
    pub simple: bool,
    pub convex: bool,
    /// Unsigned area of the polygon in its best-fit plane.
    pub area: f64,
    /// Whether the edge passes through the polygon.
    pub contains_edge_point: bool,
}

/// Cyclic ring of top simplices around an interior edge of a 3-complex.
pub fn tet_ring(complex: &SimplicialComplex, edge: usize) -> Result<Vec<usize>> {
    if complex.dim() != 3 {
        return Err(Error::InvalidInput("edge rings need a tetrahedral complex".into()));
    }
    let mut links: Vec<(usize, [usize; 2])> = Vec::new();
    for tri in complex.cofaces(1, edge) {
        let tets = complex.cofaces(2, tri.simplex);
        if tets.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "edge {:?} is not interior",
                complex.simplex(1, edge).vertices()
            )));
        }
        links.push((tri.simplex, [tets[0].simplex, tets[1].simplex]));
    }
    let Some(&(_, [start, mut next])) = links.first() else {
        return Err(Error::InvalidInput("edge has no incident triangles".into()));
    };
    let mut ring = vec![start];
    let mut used = vec![false; links.len()];
    used[0] = true;
    while next != start {
        ring.push(next);
        let step = links
            .iter()
            .enumerate()
            .find(|(i, (_, t))| !used[*i] && t.contains(&next))
            .map(|(i, (_, t))| (i, if t[0] == next { t[1] } else { t[0] }));
        let Some((i, other)) = step else {
            return Err(Error::InvalidInput("tetrahedra around edge do not close up".into()));
        };
        used[i] = true;
        next = other;
    }
    if used.iter().any(|u| !u) {
        return Err(Error::InvalidInput("edge star is not a single ring".into()));
    }
    Ok(ring)
}

fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn segments_intersect(p1: &Vector2<f64>, p2: &Vector2<f64>, q1: &Vector2<f64>, q2: &Vector2<f64>) -> bool {
    let d1 = cross(&(p2 - p1), &(q1 - p1));
    let d2 = cross(&(p2 - p1), &(q2 - p1));
    let d3 = cross(&(q2 - q1), &(p1 - q1));
    let d4 = cross(&(q2 - q1), &(p2 - q1));
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

pub fn edge_dual_polygon(complex: &SimplicialComplex, edge: usize) -> Result<EdgeDualPolygon> {
    let tets = tet_ring(complex, edge)?;
    let vertices: Vec<Point> = tets.iter().map(|&t| complex.circumdata(3, t).center.clone()).collect();
    let k = vertices.len();
    let centroid = vertices.iter().fold(Point::zeros(3), |acc, v| acc + v) / k as f64;
    let centered = DMatrix::from_fn(3, k, |r, c| vertices[c][r] - centroid[r]);
    // principal axes of the scatter matrix; the normal is the weakest one
    let eig = (&centered * centered.transpose()).symmetric_eigen();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let e1: Point = eig.eigenvectors.column(order[0]).into();
    let e2: Point = eig.eigenvectors.column(order[1]).into();
    let normal: Point = eig.eigenvectors.column(order[2]).into();

    let planarity_deviation = vertices
        .iter()
        .map(|v| (v - &centroid).dot(&normal).abs())
        .fold(0.0, f64::max);
    let mut diameter = 0.0_f64;
    for i in 0..k {
        for j in i + 1..k {
            diameter = diameter.max((&vertices[i] - &vertices[j]).norm());
        }
    }
    let flat: Vec<Vector2<f64>> = vertices
        .iter()
        .map(|v| {
            let d = v - &centroid;
            Vector2::new(d.dot(&e1), d.dot(&e2))
        })
        .collect();

    let twice_area: f64 = (0..k).map(|i| cross(&flat[i], &flat[(i + 1) % k])).sum();
    let tol = complex.tolerance().eps * diameter * diameter;

    let turns: Vec<f64> = (0..k)
        .map(|i| {
            let a = flat[i];
            let b = flat[(i + 1) % k];
            let c = flat[(i + 2) % k];
            cross(&(b - a), &(c - b))
        })
        .collect();
    let orientation = twice_area.signum();
    let convex = turns.iter().all(|t| t * orientation >= -tol);

    let mut simple = true;
    'outer: for i in 0..k {
        for j in i + 1..k {
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            if adjacent {
                if (flat[i] - flat[j]).norm() <= complex.tolerance().eps * diameter {
                    simple = false;
                    break 'outer;
                }
                continue;
            }
            if segments_intersect(&flat[i], &flat[(i + 1) % k], &flat[j], &flat[(j + 1) % k]) {
                simple = false;
                break 'outer;
            }
        }
    }

    // where the edge's line meets the polygon plane
    let ends = complex.simplex_points(1, edge);
    let dir = &ends[1] - &ends[0];
    let denom = dir.dot(&normal);
    let contains_edge_point = if denom.abs() <= 1e-12 * dir.norm() {
        false
    } else {
        let t = (&centroid - &ends[0]).dot(&normal) / denom;
        let hit = &ends[0] + dir * t;
        let d = &hit - &centroid;
        let x = Vector2::new(d.dot(&e1), d.dot(&e2));
        let inside = (0..k).all(|i| cross(&(flat[(i + 1) % k] - flat[i]), &(x - flat[i])) * orientation > 0.0);
        (0.0..=1.0).contains(&t) && inside
    };

    Ok(EdgeDualPolygon {
        edge,
        tets,
        vertices,
        planarity_deviation,
        diameter,
        simple,
        convex,
        area: 0.5 * twice_area.abs(),
        contains_edge_point,
    })
}
