//! Mixed Poisson problem `div sigma = f`, `sigma = -grad u` on planar
//! triangle meshes.
//!
//! `u` is a primal 0-form and `sigma` the primal 1-form `-d0 u`. The
//! divergence equation is imposed on dual cells, so the unknowns satisfy
//! `d0ᵀ ⋆1 d0 u = ⋆0 f - b`, where `b` collects the prescribed outward flux
//! `g = sigma·n` through the boundary half-edges of each dual cell. The
//! solution is unique up to a constant, fixed by a [`Gauge`].

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::delaunay::{classify_complex, MeshReport};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::hodge::{hodge_star, validate_hodge, HodgeMode, HodgeStar};
use crate::io::{format_float, Mesh};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Constant(f64),
    PerVertex(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// `u = 0` at the given vertex.
    PinVertex(usize),
    /// Zero vertex mean, through a bordered system.
    ZeroMean,
}

/// Constant outward flux on each side of an axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SideFluxes {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
}

impl Default for SideFluxes {
    /// Unit flow in `+x`: `sigma = (1, 0)`, so `u = -x + C`.
    fn default() -> Self {
        Self {
            left: -1.0,
            right: 1.0,
            bottom: 0.0,
            top: 0.0,
        }
    }
}

impl SideFluxes {
    /// The constant field `sigma` these fluxes come from, if there is one.
    pub fn uniform_field(&self) -> Option<Vector2<f64>> {
        let tol = 1e-14 * (self.left.abs() + self.right.abs() + self.bottom.abs() + self.top.abs() + 1.0);
        ((self.left + self.right).abs() <= tol && (self.bottom + self.top).abs() <= tol)
            .then(|| Vector2::new(self.right, self.top))
    }
}

#[derive(Debug, Clone)]
pub struct MixedPoissonProblem<'a> {
    pub complex: &'a SimplicialComplex,
    pub source: Source,
    /// Outward flux density per edge; only boundary edges are read.
    pub boundary_flux: Vec<f64>,
    pub gauge: Gauge,
}

fn check_planar(complex: &SimplicialComplex) -> Result<()> {
    if complex.dim() != 2 || complex.ambient_dim() != 2 {
        return Err(Error::Problem(format!(
            "the Poisson solver needs a planar triangle mesh, got dimension {} in {}-space",
            complex.dim(),
            complex.ambient_dim()
        )));
    }
    Ok(())
}

/// Unit normal of a boundary edge pointing away from its triangle.
pub fn outward_normal(complex: &SimplicialComplex, edge: usize) -> Result<Vector2<f64>> {
    let cof = complex.cofaces(1, edge);
    if cof.len() != 1 {
        return Err(Error::InvalidInput(format!("edge {edge} is not on the boundary")));
    }
    let pts = complex.points();
    let v = complex.simplex(1, edge).vertices();
    let (a, b) = (pts.row(v[0]), pts.row(v[1]));
    let apex = pts.row(complex.apex(1, edge, cof[0].simplex));
    let t = Vector2::new(b[0] - a[0], b[1] - a[1]);
    let mut n = Vector2::new(t.y, -t.x).normalize();
    if n.dot(&Vector2::new(apex[0] - a[0], apex[1] - a[1])) > 0.0 {
        n = -n;
    }
    Ok(n)
}

/// Per-edge fluxes for a mesh of the rectangle `[x0, x1] x [y0, y1]`.
/// Fails if a boundary edge is not on one of the four sides.
pub fn rectangle_fluxes(complex: &SimplicialComplex, rect: [f64; 4], sides: &SideFluxes) -> Result<Vec<f64>> {
    check_planar(complex)?;
    let [x0, x1, y0, y1] = rect;
    let tol = 1e-9 * ((x1 - x0).abs() + (y1 - y0).abs());
    let pts = complex.points();
    let mut g = vec![0.0; complex.num_simplices(1)];
    for bf in complex.boundary_faces() {
        let v = complex.simplex(1, bf.facet).vertices();
        let (a, b) = (pts.row(v[0]), pts.row(v[1]));
        let on = |axis: usize, value: f64| (a[axis] - value).abs() <= tol && (b[axis] - value).abs() <= tol;
        g[bf.facet] = if on(0, x0) {
            sides.left
        } else if on(0, x1) {
            sides.right
        } else if on(1, y0) {
            sides.bottom
        } else if on(1, y1) {
            sides.top
        } else {
            return Err(Error::Problem(format!("boundary edge {v:?} is not on a side of the rectangle")));
        };
    }
    Ok(g)
}

/// Per-edge fluxes `g = sigma·n` of a constant field.
pub fn fluxes_from_field(complex: &SimplicialComplex, sigma: Vector2<f64>) -> Result<Vec<f64>> {
    check_planar(complex)?;
    let mut g = vec![0.0; complex.num_simplices(1)];
    for bf in complex.boundary_faces() {
        g[bf.facet] = sigma.dot(&outward_normal(complex, bf.facet)?);
    }
    Ok(g)
}

fn bounding_box(complex: &SimplicialComplex) -> [f64; 4] {
    let mut r = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for p in complex.points().rows() {
        r[0] = r[0].min(p[0]);
        r[1] = r[1].max(p[0]);
        r[2] = r[2].min(p[1]);
        r[3] = r[3].max(p[1]);
    }
    r
}

/// Assembled vertex system, before and after gauge fixing.
#[derive(Debug, Clone)]
pub struct MixedPoissonSystem {
    pub mode: HodgeMode,
    pub star0: HodgeStar,
    pub star1: HodgeStar,
    /// Coboundary `d0`, edges by vertices.
    pub d0: DMatrix<f64>,
    /// `d0ᵀ ⋆1 d0`.
    pub laplacian: DMatrix<f64>,
    /// Boundary flux per vertex.
    pub boundary_load: DVector<f64>,
    /// `⋆0 f - b`.
    pub load: DVector<f64>,
    pub gauge: Gauge,
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

pub fn assemble(problem: &MixedPoissonProblem, mode: HodgeMode) -> Result<MixedPoissonSystem> {
    let complex = problem.complex;
    check_planar(complex)?;
    let nv = complex.num_simplices(0);
    let ne = complex.num_simplices(1);
    if problem.boundary_flux.len() != ne {
        return Err(Error::Problem(format!(
            "{} boundary flux values for {ne} edges",
            problem.boundary_flux.len()
        )));
    }
    let f = match &problem.source {
        Source::Constant(c) => DVector::from_element(nv, *c),
        Source::PerVertex(v) if v.len() == nv => DVector::from_column_slice(v),
        Source::PerVertex(v) => {
            return Err(Error::Problem(format!("{} source values for {nv} vertices", v.len())));
        }
    };

    let star0 = hodge_star(complex, 0, mode)?;
    let star1 = hodge_star(complex, 1, mode)?;
    let d0 = complex.boundary_operator(1)?.coboundary_dense();

    let mut b = DVector::zeros(nv);
    for bf in complex.boundary_faces() {
        let half = 0.5 * problem.boundary_flux[bf.facet] * complex.volume(1, bf.facet);
        for &v in complex.simplex(1, bf.facet).vertices() {
            b[v] += half;
        }
    }
    let source_load = DVector::from_iterator(nv, (0..nv).map(|v| star0.entries[v] * f[v]));
    let load = &source_load - &b;

    // the data must integrate to zero for a pure flux problem
    let scale = source_load.abs().sum() + b.abs().sum();
    let imbalance = load.sum();
    if imbalance.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Problem(format!(
            "incompatible data: source integrates to {} but net outward flux is {}",
            source_load.sum(),
            b.sum()
        )));
    }

    let s1 = DMatrix::from_diagonal(&DVector::from_column_slice(&star1.entries));
    let laplacian = d0.transpose() * s1 * &d0;

    let (matrix, rhs) = match problem.gauge {
        Gauge::PinVertex(i) => {
            if i >= nv {
                return Err(Error::Problem(format!("gauge vertex {i} out of range")));
            }
            let mut m = laplacian.clone();
            let mut r = load.clone();
            m.row_mut(i).fill(0.0);
            m.column_mut(i).fill(0.0);
            m[(i, i)] = 1.0;
            r[i] = 0.0;
            (m, r)
        }
        Gauge::ZeroMean => {
            let mut m = DMatrix::zeros(nv + 1, nv + 1);
            m.view_mut((0, 0), (nv, nv)).copy_from(&laplacian);
            for v in 0..nv {
                m[(v, nv)] = 1.0;
                m[(nv, v)] = 1.0;
            }
            let mut r = DVector::zeros(nv + 1);
            r.rows_mut(0, nv).copy_from(&load);
            (m, r)
        }
    };

    Ok(MixedPoissonSystem {
        mode,
        star0,
        star1,
        d0,
        laplacian,
        boundary_load: b,
        load,
        gauge: problem.gauge,
        matrix,
        rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Cholesky,
    Lu,
}

#[derive(Debug, Clone)]
pub struct MixedPoissonSolution {
    /// Potential per vertex.
    pub u: DVector<f64>,
    /// Flux 1-form per edge, `-d0 u`.
    pub sigma: DVector<f64>,
    pub method: SolveMethod,
    /// `|A x - r| / |r|` of the gauged system.
    pub residual: f64,
}

pub fn solve(system: &MixedPoissonSystem) -> Result<MixedPoissonSolution> {
    let nv = system.laplacian.nrows();
    let (x, method) = match system.matrix.clone().cholesky() {
        Some(ch) => (ch.solve(&system.rhs), SolveMethod::Cholesky),
        None => {
            let x = system.matrix.clone().lu().solve(&system.rhs).ok_or_else(|| {
                Error::Solve(format!(
                    "singular {0}x{0} system ({1:?} Hodge star has {2} nonpositive edge entries)",
                    system.matrix.nrows(),
                    system.mode,
                    validate_hodge(&system.star1).len()
                ))
            })?;
            (x, SolveMethod::Lu)
        }
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solve("solution has non-finite entries".into()));
    }
    let rnorm = system.rhs.norm();
    let residual = (&system.matrix * &x - &system.rhs).norm() / if rnorm > 0.0 { rnorm } else { 1.0 };
    let u = x.rows(0, nv).into_owned();
    let sigma = -(&system.d0 * &u);
    Ok(MixedPoissonSolution {
        u,
        sigma,
        method,
        residual,
    })
}

pub fn solve_problem(problem: &MixedPoissonProblem, mode: HodgeMode) -> Result<MixedPoissonSolution> {
    solve(&assemble(problem, mode)?)
}

/// Solves the same problem in saddle-point form with the edge flux
/// `q = ⋆1 sigma` as a separate unknown:
///
/// ```text
/// [ ⋆1⁻¹  d0 ] [q]   [0]
/// [ d0ᵀ   0  ] [u] = [b - ⋆0 f]
/// ```
///
/// The gauge enters as one extra constraint row. Needs every `⋆1` entry to
/// be nonzero.
pub fn solve_saddle(problem: &MixedPoissonProblem, mode: HodgeMode) -> Result<MixedPoissonSolution> {
    let system = assemble(problem, mode)?;
    let ne = system.d0.nrows();
    let nv = system.d0.ncols();
    if let Some(e) = system.star1.entries.iter().position(|&s| s == 0.0) {
        return Err(Error::Problem(format!("edge {e} has a zero Hodge entry, saddle form needs its inverse")));
    }
    let n = ne + nv + 1;
    let mut m = DMatrix::zeros(n, n);
    for (e, s) in system.star1.entries.iter().enumerate() {
        m[(e, e)] = 1.0 / s;
    }
    m.view_mut((0, ne), (ne, nv)).copy_from(&system.d0);
    m.view_mut((ne, 0), (nv, ne)).copy_from(&system.d0.transpose());
    let mut rhs = DVector::zeros(n);
    rhs.rows_mut(ne, nv).copy_from(&(-&system.load));
    // the gauge row plus a multiplier column, keeping the matrix symmetric
    match problem.gauge {
        Gauge::PinVertex(i) => {
            m[(n - 1, ne + i)] = 1.0;
            m[(ne + i, n - 1)] = 1.0;
        }
        Gauge::ZeroMean => {
            for v in 0..nv {
                m[(n - 1, ne + v)] = 1.0;
                m[(ne + v, n - 1)] = 1.0;
            }
        }
    }
    let x = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Solve("singular saddle-point system".into()))?;
    let rnorm = rhs.norm();
    let residual = (&m * &x - &rhs).norm() / if rnorm > 0.0 { rnorm } else { 1.0 };
    let u = x.rows(ne, nv).into_owned();
    let sigma = -(&system.d0 * &u);
    Ok(MixedPoissonSolution {
        u,
        sigma,
        method: SolveMethod::Lu,
        residual,
    })
}

/// Constant vector field per triangle whose edge integrals match `sigma`.
pub fn triangle_fields(complex: &SimplicialComplex, sigma: &DVector<f64>) -> Result<Vec<Vector2<f64>>> {
    check_planar(complex)?;
    let pts = complex.points();
    (0..complex.num_simplices(2))
        .map(|t| {
            let v = complex.simplex(2, t).vertices();
            let p = |i: usize| Vector2::new(pts.row(v[i])[0], pts.row(v[i])[1]);
            let (e1, e2) = (p(1) - p(0), p(2) - p(0));
            // sigma on an edge is the integral along lower -> higher vertex
            let integral = |a: usize, b: usize| -> Result<f64> {
                let e = complex
                    .index_of(&[v[a], v[b]])
                    .ok_or_else(|| Error::InvalidInput("missing edge".into()))?;
                let s = sigma[e];
                Ok(if v[a] < v[b] { s } else { -s })
            };
            let m = Matrix2::new(e1.x, e1.y, e2.x, e2.y);
            let r = Vector2::new(integral(0, 1)?, integral(0, 2)?);
            m.lu()
                .solve(&r)
                .ok_or_else(|| Error::Degenerate(format!("triangle {t} is degenerate")))
        })
        .collect()
}

/// Largest deviation of `u` from its least-squares fit `a x + c`, relative
/// to the range of `u`.
pub fn affine_fit_error(complex: &SimplicialComplex, u: &DVector<f64>) -> f64 {
    let pts = complex.points();
    let n = u.len();
    let a = DMatrix::from_fn(n, 2, |i, j| if j == 1 { 1.0 } else { pts.row(i)[0] });
    let Ok(coef) = a.clone().svd(true, true).solve(u, 1e-14) else {
        return f64::INFINITY;
    };
    let fit = &a * coef;
    let range = u.max() - u.min();
    let dev = (u - fit).amax();
    if range > 0.0 {
        dev / range
    } else {
        dev
    }
}

/// Largest deviation of `u` from `-sigma·x + C`, best `C`, relative to the
/// range of the exact potential.
pub fn analytic_error(complex: &SimplicialComplex, u: &DVector<f64>, sigma: Vector2<f64>) -> f64 {
    let pts = complex.points();
    let exact = DVector::from_iterator(u.len(), pts.rows().map(|p| -(sigma.x * p[0] + sigma.y * p[1])));
    let diff = u - &exact;
    let c = diff.mean();
    let range = exact.max() - exact.min();
    let dev = diff.add_scalar(-c).amax();
    if range > 0.0 {
        dev / range
    } else {
        dev
    }
}

/// Mesh families compared in the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFamily {
    /// Delaunay with one-sided boundary, containing obtuse triangles.
    Good,
    BadBoundary,
    NonDelaunay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub resolution: usize,
    pub seed: u64,
    pub jitter: f64,
    pub flips: usize,
    pub fluxes: SideFluxes,
    pub source: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            resolution: 16,
            seed: 7,
            jitter: 0.25,
            flips: 3,
            fluxes: SideFluxes::default(),
            source: 0.0,
        }
    }
}

impl ExperimentConfig {
    pub fn mesh(&self, family: MeshFamily) -> Result<Mesh> {
        let (m, j, s) = (self.resolution, self.jitter, self.seed);
        match family {
            MeshFamily::Good => fixtures::obtuse_delaunay_square(m, j, s),
            MeshFamily::BadBoundary => fixtures::bad_boundary_square(m, j, s),
            MeshFamily::NonDelaunay => fixtures::non_delaunay_square(m, j, s, self.flips),
        }
    }
}

/// One (mesh, Hodge mode) column of the experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRun {
    pub label: String,
    pub family: MeshFamily,
    pub mode: HodgeMode,
    pub counts: Vec<usize>,
    pub qualifying: bool,
    /// Vertices whose `⋆0` entry is `<= 0`.
    pub star0_nonpositive: Vec<usize>,
    /// Edges whose `⋆1` entry is `<= 0`.
    pub star1_nonpositive: Vec<usize>,
    pub method: Option<SolveMethod>,
    pub residual: Option<f64>,
    /// Relative deviation from the best affine fit.
    pub affine_error: Option<f64>,
    /// Relative deviation from the exact potential.
    pub analytic_error: Option<f64>,
    /// Largest relative deviation of the per-triangle field from the exact one.
    pub field_error: Option<f64>,
    pub solve_error: Option<String>,
    #[serde(serialize_with = "as_seconds")]
    pub runtime: Duration,
    #[serde(skip)]
    pub solution: Option<MixedPoissonSolution>,
    #[serde(skip)]
    pub mesh: Mesh,
    #[serde(skip)]
    pub report: Option<MeshReport>,
}

fn as_seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Solves the configured flux problem on one mesh with one Hodge mode.
/// Solver failures are recorded in the run, not returned.
pub fn run_case(label: &str, family: MeshFamily, mode: HodgeMode, mesh: Mesh, config: &ExperimentConfig) -> Result<ExperimentRun> {
    let complex = mesh.build()?;
    let report = classify_complex(&complex);
    let start = Instant::now();
    let fluxes = rectangle_fluxes(&complex, bounding_box(&complex), &config.fluxes)?;
    let problem = MixedPoissonProblem {
        complex: &complex,
        source: Source::Constant(config.source),
        boundary_flux: fluxes,
        gauge: Gauge::PinVertex(0),
    };
    let star0 = hodge_star(&complex, 0, mode)?;
    let star1 = hodge_star(&complex, 1, mode)?;
    let outcome = solve_problem(&problem, mode);
    let runtime = start.elapsed();

    let exact = (config.source == 0.0).then(|| config.fluxes.uniform_field()).flatten();
    let mut run = ExperimentRun {
        label: label.to_string(),
        family,
        mode,
        counts: complex.counts(),
        qualifying: report.is_qualifying(),
        star0_nonpositive: validate_hodge(&star0),
        star1_nonpositive: validate_hodge(&star1),
        method: None,
        residual: None,
        affine_error: None,
        analytic_error: None,
        field_error: None,
        solve_error: None,
        runtime,
        solution: None,
        mesh,
        report: Some(report),
    };
    match outcome {
        Ok(sol) => {
            run.method = Some(sol.method);
            run.residual = Some(sol.residual);
            run.affine_error = Some(affine_fit_error(&complex, &sol.u));
            if let Some(field) = exact {
                run.analytic_error = Some(analytic_error(&complex, &sol.u, field));
                let fields = triangle_fields(&complex, &sol.sigma)?;
                let norm = field.norm().max(f64::MIN_POSITIVE);
                run.field_error = Some(fields.iter().map(|s| (s - field).norm() / norm).fold(0.0, f64::max));
            }
            run.solution = Some(sol);
        }
        Err(e) => run.solve_error = Some(e.to_string()),
    }
    Ok(run)
}

/// The four columns: signed star on the good mesh, unsigned star on the
/// same mesh, signed star on a mesh with a bad boundary triangle, and
/// signed star on a non-Delaunay mesh.
pub fn flux_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRun>> {
    let good = config.mesh(MeshFamily::Good)?;
    let cases = vec![
        ("signed_good", MeshFamily::Good, HodgeMode::Signed, good.clone()),
        ("unsigned_good", MeshFamily::Good, HodgeMode::Unsigned, good),
        (
            "signed_bad_boundary",
            MeshFamily::BadBoundary,
            HodgeMode::Signed,
            config.mesh(MeshFamily::BadBoundary)?,
        ),
        (
            "signed_non_delaunay",
            MeshFamily::NonDelaunay,
            HodgeMode::Signed,
            config.mesh(MeshFamily::NonDelaunay)?,
        ),
    ];
    cases
        .into_par_iter()
        .map(|(label, family, mode, mesh)| run_case(label, family, mode, mesh, config))
        .collect()
}

/// JSON summary of experiment runs.
pub fn summary_json(config: &ExperimentConfig, runs: &[ExperimentRun]) -> Result<String> {
    #[derive(Serialize)]
    struct Summary<'a> {
        config: &'a ExperimentConfig,
        runs: &'a [ExperimentRun],
    }
    Ok(serde_json::to_string_pretty(&Summary { config, runs })?)
}

/// `x,y,u` per vertex.
pub fn potential_csv(mesh: &Mesh, u: &DVector<f64>) -> String {
    let mut s = String::from("x,y,u\n");
    for (p, v) in mesh.points.rows().zip(u.iter()) {
        s.push_str(&format!("{},{},{}\n", format_float(p[0]), format_float(p[1]), format_float(*v)));
    }
    s
}

/// `x,y,sx,sy` per edge midpoint; the field is the mean over the edge's
/// triangles.
pub fn field_csv(complex: &SimplicialComplex, sigma: &DVector<f64>) -> Result<String> {
    let fields = triangle_fields(complex, sigma)?;
    let mut s = String::from("x,y,sx,sy\n");
    for e in 0..complex.num_simplices(1) {
        let pts = complex.simplex_points(1, e);
        let mid = (&pts[0] + &pts[1]) / 2.0;
        let cof = complex.cofaces(1, e);
        let f = cof.iter().map(|c| fields[c.simplex]).sum::<Vector2<f64>>() / cof.len() as f64;
        s.push_str(&format!(
            "{},{},{},{}\n",
            format_float(mid[0]),
            format_float(mid[1]),
            format_float(f.x),
            format_float(f.y)
        ));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::EmbeddedPoints;

    fn square() -> SimplicialComplex {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.45, 0.55]]).unwrap();
        SimplicialComplex::build(pts, &[[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]]).unwrap()
    }

    #[test]
    fn outward_normals_of_the_square() {
        let c = square();
        let e = c.index_of(&[0, 1]).unwrap();
        let n = outward_normal(&c, e).unwrap();
        assert!((n - Vector2::new(0.0, -1.0)).norm() < 1e-15);
        assert!(outward_normal(&c, c.index_of(&[0, 4]).unwrap()).is_err());
    }

    #[test]
    fn constant_flow_is_exact() {
        let c = square();
        let g = rectangle_fluxes(&c, [0.0, 1.0, 0.0, 1.0], &SideFluxes::default()).unwrap();
        assert_eq!(g, fluxes_from_field(&c, Vector2::new(1.0, 0.0)).unwrap());
        for gauge in [Gauge::PinVertex(2), Gauge::ZeroMean] {
            let problem = MixedPoissonProblem {
                complex: &c,
                source: Source::Constant(0.0),
                boundary_flux: g.clone(),
                gauge,
            };
            let sol = solve_problem(&problem, HodgeMode::Signed).unwrap();
            assert!(analytic_error(&c, &sol.u, Vector2::new(1.0, 0.0)) < 1e-12);
            let saddle = solve_saddle(&problem, HodgeMode::Signed).unwrap();
            assert!((&saddle.u - &sol.u).amax() < 1e-12);
        }
    }

    #[test]
    fn gauges_fix_the_constant() {
        let c = square();
        let g = fluxes_from_field(&c, Vector2::new(0.3, -0.7)).unwrap();
        let mut problem = MixedPoissonProblem {
            complex: &c,
            source: Source::Constant(0.0),
            boundary_flux: g,
            gauge: Gauge::PinVertex(3),
        };
        let pinned = solve_problem(&problem, HodgeMode::Signed).unwrap();
        assert_eq!(pinned.u[3], 0.0);
        assert_eq!(pinned.method, SolveMethod::Cholesky);
        problem.gauge = Gauge::ZeroMean;
        let mean = solve_problem(&problem, HodgeMode::Signed).unwrap();
        assert!(mean.u.mean().abs() < 1e-14);
        assert!((&pinned.sigma - &mean.sigma).amax() < 1e-12);
    }

    #[test]
    fn incompatible_data_is_rejected() {
        let c = square();
        let problem = MixedPoissonProblem {
            complex: &c,
            source: Source::Constant(0.0),
            boundary_flux: vec![1.0; c.num_simplices(1)],
            gauge: Gauge::ZeroMean,
        };
        assert!(matches!(assemble(&problem, HodgeMode::Signed), Err(Error::Problem(_))));
    }

    #[test]
    fn source_balances_outflow() {
        // u = -(x² + y²): sigma = 2(x, y), f = 4
        let c = square();
        let pts = c.points();
        let mut g = vec![0.0; c.num_simplices(1)];
        for bf in c.boundary_faces() {
            let v = c.simplex(1, bf.facet).vertices();
            let mid = Vector2::new(pts.row(v[0])[0] + pts.row(v[1])[0], pts.row(v[0])[1] + pts.row(v[1])[1]) / 2.0;
            g[bf.facet] = (2.0 * mid).dot(&outward_normal(&c, bf.facet).unwrap());
        }
        let problem = MixedPoissonProblem {
            complex: &c,
            source: Source::Constant(4.0),
            boundary_flux: g,
            gauge: Gauge::ZeroMean,
        };
        assert!(solve_problem(&problem, HodgeMode::Signed).is_ok());
    }

    #[test]
    fn rejects_surfaces() {
        let pts = EmbeddedPoints::from_rows(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.5]]).unwrap();
        let c = SimplicialComplex::build(pts, &[[0, 1, 2]]).unwrap();
        assert!(matches!(fluxes_from_field(&c, Vector2::new(1.0, 0.0)), Err(Error::Problem(_))));
    }
}
