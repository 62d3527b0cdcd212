//! Independent oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signed_dec::{Point, SimplicialComplex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pt(c: &[f64]) -> Point {
    Point::from_column_slice(c)
}

fn uniform_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    Point::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
}

/// k-volume from the edge Gram determinant, independent of the library.
pub fn gram_volume(points: &[Point]) -> f64 {
    let k = points.len() - 1;
    let e = DMatrix::from_fn(points[0].len(), k, |r, c| points[c + 1][r] - points[0][r]);
    let g = e.transpose() * e;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    g.determinant().max(0.0).sqrt() / fact
}

/// Random k-simplex in `R^dim`, rejecting badly shaped draws.
pub fn random_simplex(rng: &mut ChaCha8Rng, k: usize, dim: usize) -> Vec<Point> {
    loop {
        let pts: Vec<Point> = (0..=k).map(|_| uniform_point(rng, dim)).collect();
        let longest = (0..=k)
            .flat_map(|i| (i + 1..=k).map(move |j| (i, j)))
            .map(|(i, j)| (&pts[i] - &pts[j]).norm())
            .fold(0.0, f64::max);
        if k == 0 || gram_volume(&pts) > 1e-3 * longest.powi(k as i32) {
            return pts;
        }
    }
}

/// Random rotation (from a QR factorization) and translation.
pub fn random_rigid_motion(rng: &mut ChaCha8Rng, dim: usize) -> (DMatrix<f64>, Point) {
    let m = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let q = m.qr().q();
    (q, uniform_point(rng, dim) * 3.0)
}

pub fn apply(motion: &(DMatrix<f64>, Point), p: &Point) -> Point {
    &motion.0 * p + &motion.1
}

/// Two n-simplices in `R^n` sharing a facet, apexes on opposite sides.
pub struct RandomPair {
    pub facet: Vec<Point>,
    pub left_apex: Point,
    pub right_apex: Point,
}

pub fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> RandomPair {
    loop {
        let facet: Vec<Point> = (0..n)
            .map(|_| {
                let mut p = uniform_point(rng, n);
                p[n - 1] = 0.0;
                p
            })
            .collect();
        let flat: Vec<Point> = facet.iter().map(|p| p.rows(0, n - 1).into_owned()).collect();
        if n > 1 && gram_volume(&flat) < 1e-2 {
            continue;
        }
        let mut l = uniform_point(rng, n);
        l[n - 1] = -rng.random_range(0.05..1.0);
        let mut r = uniform_point(rng, n);
        r[n - 1] = rng.random_range(0.05..1.0);
        let motion = random_rigid_motion(rng, n);
        return RandomPair {
            facet: facet.iter().map(|p| apply(&motion, p)).collect(),
            left_apex: apply(&motion, &l),
            right_apex: apply(&motion, &r),
        };
    }
}

fn lifted(points: &[Point], q: &Point) -> DMatrix<f64> {
    let n = q.len();
    DMatrix::from_fn(n + 1, n + 1, |r, c| {
        let d = &points[r] - q;
        if c < n {
            d[c]
        } else {
            d.norm_squared()
        }
    })
}

/// `det[(p_i - q, |p_i - q|²)]`, normalized so that it is positive when
/// `q` is strictly inside the circumsphere of the full-dimensional simplex
/// `points`. The sign is calibrated against the centroid. Also returns the
/// Hadamard bound of the determinant.
pub fn in_sphere(points: &[Point], q: &Point) -> (f64, f64) {
    let centroid = points.iter().fold(Point::zeros(q.len()), |a, p| a + p) / points.len() as f64;
    let m = lifted(points, q);
    let bound = m.row_iter().map(|r| r.norm()).product();
    (m.determinant() * lifted(points, &centroid).determinant().signum(), bound)
}

/// Oracle verdict for a full-dimensional pair: `Some(true)` when each apex
/// is strictly outside the other simplex's circumsphere, `None` near ties.
pub fn pair_strict_oracle(pair: &RandomPair) -> Option<bool> {
    let mut left = pair.facet.clone();
    left.push(pair.left_apex.clone());
    let mut right = pair.facet.clone();
    right.push(pair.right_apex.clone());
    let (a, ba) = in_sphere(&left, &pair.right_apex);
    let (b, bb) = in_sphere(&right, &pair.left_apex);
    if a.abs() <= 1e-9 * ba || b.abs() <= 1e-9 * bb {
        return None;
    }
    Some(a < 0.0 && b < 0.0)
}

/// Convex polygon clipped to `{x : n·x <= d}`.
pub fn clip_polygon(poly: &[Vector2<f64>], n: Vector2<f64>, d: f64) -> Vec<Vector2<f64>> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (fa, fb) = (n.dot(&a) - d, n.dot(&b) - d);
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            out.push(a + (b - a) * (fa / (fa - fb)));
        }
    }
    out
}

pub fn shoelace(poly: &[Vector2<f64>]) -> f64 {
    let k = poly.len();
    0.5 * (0..k)
        .map(|i| poly[i].x * poly[(i + 1) % k].y - poly[(i + 1) % k].x * poly[i].y)
        .sum::<f64>()
        .abs()
}

/// Area of the Voronoi cell of `sites[i]` by half-plane clipping of a box.
pub fn voronoi_area(sites: &[Vector2<f64>], i: usize) -> f64 {
    let s = sites[i];
    let big = 10.0;
    let mut poly = vec![
        s + Vector2::new(-big, -big),
        s + Vector2::new(big, -big),
        s + Vector2::new(big, big),
        s + Vector2::new(-big, big),
    ];
    for (j, t) in sites.iter().enumerate() {
        if j != i {
            // closer to s than to t: (t - s)·x <= (|t|² - |s|²)/2
            let n = t - s;
            poly = clip_polygon(&poly, n, 0.5 * (t.norm_squared() - s.norm_squared()));
        }
    }
    shoelace(&poly)
}

/// Convex polyhedron as a list of planar faces.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    pub faces: Vec<Vec<Vector3<f64>>>,
}

impl Polyhedron {
    pub fn cube(center: Vector3<f64>, half: f64) -> Self {
        let v = |x: f64, y: f64, z: f64| center + Vector3::new(x, y, z) * half;
        let faces = vec![
            vec![v(-1., -1., -1.), v(-1., 1., -1.), v(1., 1., -1.), v(1., -1., -1.)],
            vec![v(-1., -1., 1.), v(1., -1., 1.), v(1., 1., 1.), v(-1., 1., 1.)],
            vec![v(-1., -1., -1.), v(1., -1., -1.), v(1., -1., 1.), v(-1., -1., 1.)],
            vec![v(-1., 1., -1.), v(-1., 1., 1.), v(1., 1., 1.), v(1., 1., -1.)],
            vec![v(-1., -1., -1.), v(-1., -1., 1.), v(-1., 1., 1.), v(-1., 1., -1.)],
            vec![v(1., -1., -1.), v(1., 1., -1.), v(1., 1., 1.), v(1., -1., 1.)],
        ];
        Self { faces }
    }

    /// Keeps `{x : n·x <= d}`.
    pub fn clip(&self, n: Vector3<f64>, d: f64) -> Self {
        let mut faces = Vec::new();
        let mut cut: Vec<Vector3<f64>> = Vec::new();
        for face in &self.faces {
            let mut out = Vec::new();
            for i in 0..face.len() {
                let a = face[i];
                let b = face[(i + 1) % face.len()];
                let (fa, fb) = (n.dot(&a) - d, n.dot(&b) - d);
                if fa <= 0.0 {
                    out.push(a);
                }
                if fa.abs() <= 1e-14 {
                    cut.push(a);
                }
                if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                    let x = a + (b - a) * (fa / (fa - fb));
                    out.push(x);
                    cut.push(x);
                }
            }
            if out.len() >= 3 {
                faces.push(out);
            }
        }
        let mut unique: Vec<Vector3<f64>> = Vec::new();
        for p in cut {
            if unique.iter().all(|q| (q - p).norm() > 1e-12) {
                unique.push(p);
            }
        }
        if unique.len() >= 3 {
            let c = unique.iter().sum::<Vector3<f64>>() / unique.len() as f64;
            let u = (unique[0] - c).normalize();
            let w = n.normalize().cross(&u);
            unique.sort_by(|a, b| {
                let ta = (a - c).dot(&w).atan2((a - c).dot(&u));
                let tb = (b - c).dot(&w).atan2((b - c).dot(&u));
                ta.total_cmp(&tb)
            });
            faces.push(unique);
        }
        Self { faces }
    }

    /// Volume by fanning every face to `inside`.
    pub fn volume(&self, inside: Vector3<f64>) -> f64 {
        let mut v = 0.0;
        for f in &self.faces {
            for i in 1..f.len() - 1 {
                let (a, b, c) = (f[0] - inside, f[i] - inside, f[i + 1] - inside);
                v += a.dot(&b.cross(&c)).abs() / 6.0;
            }
        }
        v
    }
}

pub fn voronoi_volume(sites: &[Vector3<f64>], i: usize) -> f64 {
    let s = sites[i];
    let mut cell = Polyhedron::cube(s, 10.0);
    for (j, t) in sites.iter().enumerate() {
        if j != i {
            cell = cell.clip(t - s, 0.5 * (t.norm_squared() - s.norm_squared()));
        }
    }
    cell.volume(s)
}

pub fn sites2(complex: &SimplicialComplex) -> Vec<Vector2<f64>> {
    complex.points().rows().map(|r| Vector2::new(r[0], r[1])).collect()
}

pub fn sites3(complex: &SimplicialComplex) -> Vec<Vector3<f64>> {
    complex.points().rows().map(|r| Vector3::new(r[0], r[1], r[2])).collect()
}

/// Monte-Carlo measure of the set of points nearer to `sites[i]` than to
/// any other site, sampled in the box `[lo, hi]`. Returns the estimate and
/// its standard error.
pub fn monte_carlo_cell(sites: &[Point], i: usize, lo: &Point, hi: &Point, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng(seed);
    let dim = lo.len();
    let box_measure: f64 = (0..dim).map(|a| hi[a] - lo[a]).product();
    let reach = 3.0 * (hi - lo).norm();
    let near: Vec<&Point> = sites
        .iter()
        .enumerate()
        .filter(|(j, s)| *j != i && (*s - &sites[i]).norm() <= reach)
        .map(|(_, s)| s)
        .collect();
    let mut hits = 0usize;
    let mut x = Point::zeros(dim);
    for _ in 0..samples {
        for a in 0..dim {
            x[a] = rng.random_range(lo[a]..hi[a]);
        }
        let d = (&x - &sites[i]).norm_squared();
        if near.iter().all(|s| (&x - *s).norm_squared() > d) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (box_measure * p, box_measure * (p * (1.0 - p) / samples as f64).sqrt())
}

fn cot(apex: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let u = Vector2::new(a[0] - apex[0], a[1] - apex[1]);
    let v = Vector2::new(b[0] - apex[0], b[1] - apex[1]);
    u.dot(&v) / (u.x * v.y - u.y * v.x).abs()
}

/// `(cot α + cot β) / 2` per edge of a planar triangle mesh.
pub fn cotan_weights(complex: &SimplicialComplex) -> Vec<f64> {
    let pts = complex.points();
    (0..complex.num_simplices(1))
        .map(|e| {
            let v = complex.simplex(1, e).vertices();
            complex
                .cofaces(1, e)
                .iter()
                .map(|t| {
                    let apex = complex.apex(1, e, t.simplex);
                    0.5 * cot(pts.row(apex), pts.row(v[0]), pts.row(v[1]))
                })
                .sum()
        })
        .collect()
}

/// Cotangent Laplacian assembled vertex by vertex.
pub fn cotan_laplacian(complex: &SimplicialComplex) -> DMatrix<f64> {
    let n = complex.num_simplices(0);
    let w = cotan_weights(complex);
    let mut l = DMatrix::zeros(n, n);
    for (e, we) in w.iter().enumerate() {
        let v = complex.simplex(1, e).vertices();
        let (i, j) = (v[0], v[1]);
        l[(i, i)] += we;
        l[(j, j)] += we;
        l[(i, j)] -= we;
        l[(j, i)] -= we;
    }
    l
}

/// Vertices not on the boundary.
pub fn interior_vertices(complex: &SimplicialComplex) -> Vec<usize> {
    (0..complex.num_simplices(0)).filter(|&v| !complex.is_on_boundary(0, v)).collect()
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn dvec(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}
