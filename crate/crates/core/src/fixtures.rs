//! Deterministic test meshes.
//!
//! Every generator is seeded and reproducible. Generators that promise a
//! qualifying mesh check the result with [`classify_complex`] and resample
//! with a derived seed when a draw falls short.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{EmbeddedPoints, SimplicialComplex};
use crate::delaunay::{classify_complex, OneSided, PairStatus};
use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::io::Mesh;

const MAX_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    /// Regular grid of right triangles. Every diagonal is a degenerate pair.
    StructuredSquare,
    /// Jittered grid, Delaunay triangulated. Qualifying.
    PerturbedDelaunaySquare,
    /// Like the perturbed square but with at least one obtuse triangle.
    ObtuseDelaunaySquare,
    /// Obtuse square plus a point close to the bottom side. Delaunay, but one
    /// boundary edge is not one-sided.
    BadBoundarySquare,
    /// Obtuse square with some interior edges flipped away from Delaunay.
    NonDelaunaySquare,
    /// Perturbed square lifted onto a bump in 3-space. Pairwise Delaunay.
    SurfacePairwiseDelaunay,
    /// Jittered lattice in the unit cube, Delaunay tetrahedralized. Qualifying.
    DelaunayTetCube,
    /// Ring of tetrahedra around one edge, with one ring vertex pulled in.
    FanAroundEdge,
}

impl Fixture {
    pub const ALL: [Fixture; 8] = [
        Fixture::StructuredSquare,
        Fixture::PerturbedDelaunaySquare,
        Fixture::ObtuseDelaunaySquare,
        Fixture::BadBoundarySquare,
        Fixture::NonDelaunaySquare,
        Fixture::SurfacePairwiseDelaunay,
        Fixture::DelaunayTetCube,
        Fixture::FanAroundEdge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::StructuredSquare => "structured_square",
            Fixture::PerturbedDelaunaySquare => "perturbed_delaunay_square",
            Fixture::ObtuseDelaunaySquare => "obtuse_delaunay_square",
            Fixture::BadBoundarySquare => "bad_boundary_square",
            Fixture::NonDelaunaySquare => "non_delaunay_square",
            Fixture::SurfacePairwiseDelaunay => "surface_pairwise_delaunay",
            Fixture::DelaunayTetCube => "delaunay_tet_cube",
            Fixture::FanAroundEdge => "fan_around_edge",
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown fixture {s:?}")))
    }
}

/// Generator parameters. Each fixture reads only the fields it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureParams {
    /// Grid cells per side of the square or cube.
    pub resolution: usize,
    pub seed: u64,
    /// Interior jitter as a fraction of the grid spacing, at most 0.3.
    pub jitter: f64,
    /// Bump height for the lifted surface.
    pub amplitude: f64,
    /// Edges to flip for the non-Delaunay square.
    pub flips: usize,
    /// Tetrahedra around the edge in the fan.
    pub ring: usize,
    /// How far one fan vertex is pulled toward the edge (radius 2 minus this).
    pub inset: f64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        Self {
            resolution: 8,
            seed: 7,
            jitter: 0.25,
            amplitude: 0.2,
            flips: 3,
            ring: 4,
            inset: 1.2,
        }
    }
}

pub fn generate(fixture: Fixture, params: &FixtureParams) -> Result<Mesh> {
    match fixture {
        Fixture::StructuredSquare => structured_square(params.resolution),
        Fixture::PerturbedDelaunaySquare => perturbed_delaunay_square(params.resolution, params.jitter, params.seed),
        Fixture::ObtuseDelaunaySquare => obtuse_delaunay_square(params.resolution, params.jitter, params.seed),
        Fixture::BadBoundarySquare => bad_boundary_square(params.resolution, params.jitter, params.seed),
        Fixture::NonDelaunaySquare => {
            non_delaunay_square(params.resolution, params.jitter, params.seed, params.flips)
        }
        Fixture::SurfacePairwiseDelaunay => {
            surface_pairwise_delaunay(params.resolution, params.jitter, params.amplitude, params.seed)
        }
        Fixture::DelaunayTetCube => delaunay_tet_cube(params.resolution, params.jitter, params.seed),
        Fixture::FanAroundEdge => fan_around_edge(params.ring, params.inset),
    }
}

/// All simplices of `points` whose circumsphere is empty of other points.
///
/// Brute force over cliques of the `max_edge` neighbor graph; `None` means
/// all subsets. Fails when some point lies within `margin` (relative to the
/// radius) of a candidate's circumsphere, so callers can resample instead of
/// resolving ties.
pub fn empty_sphere_triangulation(points: &[Point], max_edge: Option<f64>, margin: f64) -> Result<Vec<Vec<usize>>> {
    let n = points.len();
    let Some(d) = points.first().map(|p| p.len()) else {
        return Ok(Vec::new());
    };
    let limit = max_edge.unwrap_or(f64::INFINITY);
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (i + 1..n).filter(|&j| (&points[i] - &points[j]).norm() <= limit).collect())
        .collect();

    let mut cells = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(d + 1);
    fn extend(
        points: &[Point],
        neighbors: &[Vec<usize>],
        d: usize,
        margin: f64,
        candidates: &[usize],
        stack: &mut Vec<usize>,
        cells: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if stack.len() == d + 1 {
            return test_cell(points, d, margin, stack, cells);
        }
        for (k, &c) in candidates.iter().enumerate() {
            let rest: Vec<usize> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|x| neighbors[c].binary_search(x).is_ok())
                .collect();
            if rest.len() + stack.len() + 1 < d + 1 {
                continue;
            }
            stack.push(c);
            extend(points, neighbors, d, margin, &rest, stack, cells)?;
            stack.pop();
        }
        Ok(())
    }
    for i in 0..n {
        stack.push(i);
        extend(points, &neighbors, d, margin, &neighbors[i], &mut stack, &mut cells)?;
        stack.pop();
    }
    Ok(cells)
}

fn test_cell(points: &[Point], d: usize, margin: f64, cell: &[usize], cells: &mut Vec<Vec<usize>>) -> Result<()> {
    let pts: Vec<Point> = cell.iter().map(|&i| points[i].clone()).collect();
    if geometry::is_degenerate(&pts) {
        return Ok(());
    }
    let Ok(circ) = geometry::circumcenter(&pts) else {
        return Ok(());
    };
    // ties only matter for spheres that are otherwise empty
    let mut tie = false;
    for (j, q) in points.iter().enumerate() {
        if cell.contains(&j) {
            continue;
        }
        let gap = ((q - &circ.center).norm() - circ.radius) / circ.radius;
        if gap < -margin {
            return Ok(());
        }
        tie |= gap <= margin;
    }
    if tie {
        return Err(Error::Fixture(format!("near-cospherical points around cell {cell:?}")));
    }
    let mut oriented = cell.to_vec();
    if d == pts.len() - 1 && geometry::orientation_determinant(&pts) < 0.0 {
        oriented.swap(0, 1);
    }
    cells.push(oriented);
    Ok(())
}

fn mesh_from(points: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Mesh> {
    let dim = points.first().map_or(2, |p| p.len());
    let coords = points.iter().flat_map(|p| p.iter().copied()).collect();
    Ok(Mesh {
        points: EmbeddedPoints::new(dim, coords)?,
        cells,
    })
}

/// Triangulates and checks that the cells tile a region of known volume.
fn triangulate(points: Vec<Point>, spacing: f64, expected_volume: f64) -> Result<(Mesh, SimplicialComplex)> {
    for max_edge in [Some(3.0 * spacing), None] {
        let cells = empty_sphere_triangulation(&points, max_edge, 1e-9)?;
        let mesh = mesh_from(points.clone(), cells)?;
        let complex = mesh.build()?;
        if (complex.total_volume() - expected_volume).abs() <= 1e-9 * expected_volume {
            return Ok((mesh, complex));
        }
    }
    Err(Error::Fixture("triangulation does not cover the domain".into()))
}

fn pt(c: &[f64]) -> Point {
    Point::from_column_slice(c)
}

/// `m x m` squares, each split along the diagonal from lower left.
pub fn structured_square(m: usize) -> Result<Mesh> {
    if m == 0 {
        return Err(Error::Fixture("resolution must be positive".into()));
    }
    let h = 1.0 / m as f64;
    let id = |i: usize, j: usize| j * (m + 1) + i;
    let mut points = Vec::new();
    for j in 0..=m {
        for i in 0..=m {
            points.push(pt(&[i as f64 * h, j as f64 * h]));
        }
    }
    let mut cells = Vec::new();
    for j in 0..m {
        for i in 0..m {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            cells.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    mesh_from(points, cells)
}

fn check_jitter(m: usize, jitter: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::Fixture("resolution must be at least 2".into()));
    }
    if !(0.0..=0.3).contains(&jitter) {
        return Err(Error::Fixture(format!("jitter {jitter} outside [0, 0.3]")));
    }
    Ok(())
}

/// Grid points of the unit square; side points exact, interior jittered.
fn jittered_square_points(m: usize, jitter: f64, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let h = 1.0 / m as f64;
    let mut points = Vec::new();
    for j in 0..=m {
        for i in 0..=m {
            let (mut x, mut y) = (i as f64 * h, j as f64 * h);
            let interior = i > 0 && i < m && j > 0 && j < m;
            if interior && jitter > 0.0 {
                x += rng.random_range(-jitter..jitter) * h;
                y += rng.random_range(-jitter..jitter) * h;
            }
            points.push(pt(&[x, y]));
        }
    }
    points
}

fn attempt_seed(seed: u64, attempt: u64) -> u64 {
    seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs `draw` on derived seeds until it produces a mesh.
fn with_retries<F>(seed: u64, what: &str, mut draw: F) -> Result<Mesh>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<Option<Mesh>>,
{
    let mut last = String::from("no qualifying draw");
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed(seed, attempt));
        match draw(&mut rng) {
            Ok(Some(mesh)) => return Ok(mesh),
            Ok(None) => {}
            Err(Error::Fixture(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Fixture(format!("{what}: gave up after {MAX_ATTEMPTS} draws ({last})")))
}

fn qualifying(complex: &SimplicialComplex) -> bool {
    classify_complex(complex).is_qualifying()
}

fn has_obtuse_triangle(complex: &SimplicialComplex) -> bool {
    (0..complex.num_simplices(2)).any(|t| {
        let p = complex.simplex_points(2, t);
        (0..3).any(|k| (&p[(k + 1) % 3] - &p[k]).dot(&(&p[(k + 2) % 3] - &p[k])) < 0.0)
    })
}

pub fn perturbed_delaunay_square(m: usize, jitter: f64, seed: u64) -> Result<Mesh> {
    check_jitter(m, jitter)?;
    let h = 1.0 / m as f64;
    with_retries(seed, "perturbed_delaunay_square", |rng| {
        let (mesh, complex) = triangulate(jittered_square_points(m, jitter, rng), h, 1.0)?;
        Ok(qualifying(&complex).then_some(mesh))
    })
}

pub fn obtuse_delaunay_square(m: usize, jitter: f64, seed: u64) -> Result<Mesh> {
    check_jitter(m, jitter)?;
    let h = 1.0 / m as f64;
    with_retries(seed, "obtuse_delaunay_square", |rng| {
        let (mesh, complex) = triangulate(jittered_square_points(m, jitter, rng), h, 1.0)?;
        Ok((has_obtuse_triangle(&complex) && qualifying(&complex)).then_some(mesh))
    })
}

/// Adds a point at height `0.15 h` over the middle of a bottom boundary
/// segment. The triangle it forms with that segment has an angle near 147
/// degrees opposite the boundary.
pub fn bad_boundary_square(m: usize, jitter: f64, seed: u64) -> Result<Mesh> {
    check_jitter(m, jitter)?;
    let h = 1.0 / m as f64;
    let k = m / 2;
    with_retries(seed, "bad_boundary_square", |rng| {
        let mut points = jittered_square_points(m, jitter, rng);
        points.push(pt(&[(k as f64 + 0.5) * h, 0.15 * h]));
        let (mesh, complex) = triangulate(points, h, 1.0)?;
        let report = classify_complex(&complex);
        let bad = report.non_one_sided().count();
        let strict = report.pairs.iter().all(|p| p.status == PairStatus::Strict);
        let only_no = report.non_one_sided().all(|b| b.status == OneSided::No);
        Ok((bad == 1 && only_no && strict && has_obtuse_triangle(&complex)).then_some(mesh))
    })
}

/// Flips up to `flips` interior edges of an obtuse Delaunay square, picking
/// edges whose opposite angles sum to the least.
pub fn non_delaunay_square(m: usize, jitter: f64, seed: u64, flips: usize) -> Result<Mesh> {
    if flips == 0 {
        return Err(Error::Fixture("need at least one flip".into()));
    }
    let base = obtuse_delaunay_square(m, jitter, seed)?;
    let complex = base.build()?;
    let pts = complex.points();
    let angle = |apex: usize, a: usize, b: usize| {
        let (p, q, r) = (pts.point(apex), pts.point(a), pts.point(b));
        let (u, v) = (q - &p, r - &p);
        (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos()
    };
    let cross = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (pts.row(o), pts.row(a), pts.row(b));
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };

    let mut candidates: Vec<(f64, usize, usize, usize)> = complex
        .interior_faces()
        .into_iter()
        .filter_map(|(e, l, r)| {
            let ab = complex.simplex(1, e).vertices();
            let (a, b) = (ab[0], ab[1]);
            let c = complex.apex(1, e, l);
            let d = complex.apex(1, e, r);
            // a and b must lie strictly on opposite sides of cd
            let convex = cross(c, d, a) * cross(c, d, b) < 0.0;
            convex.then(|| (angle(c, a, b) + angle(d, a, b), e, l, r))
        })
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut touched = vec![false; complex.num_simplices(2)];
    let mut replace: Vec<(usize, usize, [usize; 3], [usize; 3])> = Vec::new();
    for (_, e, l, r) in candidates {
        if replace.len() == flips {
            break;
        }
        if touched[l] || touched[r] {
            continue;
        }
        touched[l] = true;
        touched[r] = true;
        let ab = complex.simplex(1, e).vertices();
        let c = complex.apex(1, e, l);
        let d = complex.apex(1, e, r);
        replace.push((l, r, [c, d, ab[0]], [d, c, ab[1]]));
    }
    if replace.is_empty() {
        return Err(Error::Fixture("no flippable edge".into()));
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for (t, s) in complex.simplices(2).iter().enumerate() {
        if !touched[t] {
            cells.push(s.vertices().to_vec());
        }
    }
    for (_, _, x, y) in &replace {
        for tri in [x, y] {
            let mut v = tri.to_vec();
            if cross(v[0], v[1], v[2]) < 0.0 {
                v.swap(0, 1);
            }
            cells.push(v);
        }
    }
    let mesh = Mesh {
        points: base.points.clone(),
        cells,
    };
    let report = classify_complex(&mesh.build()?);
    if report.violated_pairs().next().is_none() {
        return Err(Error::Fixture("flips left the mesh Delaunay".into()));
    }
    Ok(mesh)
}

/// Perturbed square lifted to `z = amplitude sin(pi x) sin(pi y)`.
pub fn surface_pairwise_delaunay(m: usize, jitter: f64, amplitude: f64, seed: u64) -> Result<Mesh> {
    check_jitter(m, jitter)?;
    let h = 1.0 / m as f64;
    use std::f64::consts::PI;
    with_retries(seed, "surface_pairwise_delaunay", |rng| {
        let (flat, _) = triangulate(jittered_square_points(m, jitter, rng), h, 1.0)?;
        let coords = flat
            .points
            .rows()
            .flat_map(|r| [r[0], r[1], amplitude * (PI * r[0]).sin() * (PI * r[1]).sin()])
            .collect();
        let lifted = Mesh {
            points: EmbeddedPoints::new(3, coords)?,
            cells: flat.cells,
        };
        let mesh = flip_to_pairwise_delaunay(lifted)?;
        Ok(qualifying(&mesh.build()?).then_some(mesh))
    })
}

/// Lawson flips on a triangle mesh, judged on each flattened pair, until no
/// pair is violated.
pub fn flip_to_pairwise_delaunay(mut mesh: Mesh) -> Result<Mesh> {
    let cross = |o: &Point, a: &Point, b: &Point| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    for _ in 0..1000 {
        let complex = mesh.build()?;
        if complex.dim() != 2 {
            return Err(Error::Fixture("flips need a triangle mesh".into()));
        }
        let report = classify_complex(&complex);
        let Some(pair) = report.violated_pairs().find_map(|p| {
            let pts = complex.points();
            let ab = complex.simplex(1, p.facet).vertices();
            let c = complex.apex(1, p.facet, p.left);
            let d = complex.apex(1, p.facet, p.right);
            let flat = geometry::flatten_pair(&[pts.point(ab[0]), pts.point(ab[1])], &pts.point(c), &pts.point(d)).ok()?;
            let (fc, fd) = (&flat.left_apex, &flat.right_apex);
            let convex = cross(fc, fd, &flat.facet[0]) * cross(fc, fd, &flat.facet[1]) < 0.0;
            (convex && complex.index_of(&[c, d]).is_none()).then_some((p.left, p.right, ab[0], ab[1], c, d))
        }) else {
            return Ok(mesh);
        };
        let (l, r, a, b, c, d) = pair;
        let old: Vec<Vec<usize>> = [l, r].iter().map(|&t| complex.simplex(2, t).vertices().to_vec()).collect();
        mesh.cells.retain(|cell| {
            let mut s = cell.clone();
            s.sort_unstable();
            !old.contains(&s)
        });
        mesh.cells.push(vec![c, d, a]);
        mesh.cells.push(vec![d, c, b]);
    }
    Err(Error::Fixture("edge flips did not terminate".into()))
}

/// Lattice of the unit cube. Corners stay fixed, points on cube edges move
/// along the edge, face points move within the face, interior points move
/// freely.
fn jittered_cube_points(m: usize, jitter: f64, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let h = 1.0 / m as f64;
    let mut points = Vec::new();
    for k in 0..=m {
        for j in 0..=m {
            for i in 0..=m {
                let idx = [i, j, k];
                let mut x = [i as f64 * h, j as f64 * h, k as f64 * h];
                for a in 0..3 {
                    let free = idx[a] > 0 && idx[a] < m;
                    if free && jitter > 0.0 {
                        x[a] += rng.random_range(-jitter..jitter) * h;
                    }
                }
                points.push(pt(&x));
            }
        }
    }
    points
}

pub fn delaunay_tet_cube(m: usize, jitter: f64, seed: u64) -> Result<Mesh> {
    check_jitter(m, jitter)?;
    let h = 1.0 / m as f64;
    with_retries(seed, "delaunay_tet_cube", |rng| {
        let (mesh, complex) = triangulate(jittered_cube_points(m, jitter, rng), h, 1.0)?;
        Ok(qualifying(&complex).then_some(mesh))
    })
}

/// `ring` tetrahedra sharing the edge from `(0,0,-1)` to `(0,0,1)`; the ring
/// vertices sit on the circle of radius 2 in the plane `z = 0`, except the
/// first, which is at radius `2 - inset`. Vertices 0 and 1 are the edge.
///
/// For `inset > 1` the first ring vertex is inside the edge's diametral
/// sphere, so the circumcenters around the edge no longer surround it.
pub fn fan_around_edge(ring: usize, inset: f64) -> Result<Mesh> {
    if ring < 3 {
        return Err(Error::Fixture("a fan needs at least 3 tetrahedra".into()));
    }
    if !(0.0..2.0).contains(&inset) {
        return Err(Error::Fixture(format!("inset {inset} outside [0, 2)")));
    }
    let mut points = vec![pt(&[0.0, 0.0, -1.0]), pt(&[0.0, 0.0, 1.0])];
    for i in 0..ring {
        let t = 2.0 * std::f64::consts::PI * i as f64 / ring as f64;
        let r = if i == 0 { 2.0 - inset } else { 2.0 };
        points.push(pt(&[r * t.cos(), r * t.sin(), 0.0]));
    }
    let cells = (0..ring).map(|i| vec![0, 1, 2 + i, 2 + (i + 1) % ring]).collect();
    let mesh = mesh_from(points, cells)?;
    let report = classify_complex(&mesh.build()?);
    if report.pairs.iter().any(|p| p.status != PairStatus::Strict) {
        return Err(Error::Fixture(format!(
            "fan with ring {ring} and inset {inset} is not strictly Delaunay around the edge"
        )));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Fixture::ALL {
            assert_eq!(f.name().parse::<Fixture>().unwrap(), f);
        }
        assert!("nope".parse::<Fixture>().is_err());
    }

    #[test]
    fn structured_square_counts() {
        let c = structured_square(4).unwrap().build().unwrap();
        assert_eq!(c.counts(), vec![25, 56, 32]);
        let report = classify_complex(&c);
        assert_eq!(report.degenerate_pairs().count(), 16);
        assert_eq!(report.violated_pairs().count(), 0);
    }

    #[test]
    fn triangulation_of_a_convex_quad() {
        let pts = vec![pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[2.2, 1.0]), pt(&[0.0, 1.1])];
        let cells = empty_sphere_triangulation(&pts, None, 1e-9).unwrap();
        assert_eq!(cells.len(), 2);
        let square = vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[1.0, 1.0]), pt(&[0.0, 1.0])];
        assert!(empty_sphere_triangulation(&square, None, 1e-9).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = perturbed_delaunay_square(5, 0.25, 11).unwrap();
        let b = perturbed_delaunay_square(5, 0.25, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, perturbed_delaunay_square(5, 0.25, 12).unwrap());
    }

    #[test]
    fn fan_inset_bounds() {
        assert!(fan_around_edge(2, 0.5).is_err());
        assert!(fan_around_edge(4, 2.5).is_err());
        let c = fan_around_edge(4, 1.2).unwrap().build().unwrap();
        assert_eq!(c.counts()[3], 4);
    }
}
