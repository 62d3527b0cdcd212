//! Mesh files and tabular exports.
//!
//! Supported mesh formats are the Triangle/TetGen `.node`/`.ele` pair (2D
//! triangles or 3D tetrahedra) and OFF triangle surfaces. Index base for
//! `.node`/`.ele` follows the Triangle convention: the first node's number
//! (0 or 1) sets the base for both files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::complex::{EmbeddedPoints, SimplicialComplex};
use crate::delaunay::MeshReport;
use crate::error::{Error, Result};
use crate::hodge::HodgeStar;
use crate::signed_dual::DualCell;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    NodeEle2d,
    NodeEle3d,
    OffSurface,
}

/// Points plus top simplices, as read from or written to a mesh file.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub points: EmbeddedPoints,
    pub cells: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn build(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::build(self.points.clone(), &self.cells)
    }

    pub fn build_with(&self, tol: Tolerance) -> Result<SimplicialComplex> {
        SimplicialComplex::build_with(self.points.clone(), &self.cells, tol)
    }

    /// The natural file format for this mesh.
    pub fn format(&self) -> MeshFormat {
        match (self.points.dim(), self.cells.first().map_or(0, Vec::len)) {
            (3, 3) => MeshFormat::OffSurface,
            (3, _) => MeshFormat::NodeEle3d,
            _ => MeshFormat::NodeEle2d,
        }
    }
}

/// Guesses the format from the file extension. `.node`/`.ele` files are
/// resolved to 2D or 3D when read.
pub fn detect_format(path: &Path) -> Option<MeshFormat> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "node" | "ele" => Some(MeshFormat::NodeEle2d),
        "off" => Some(MeshFormat::OffSurface),
        _ => None,
    }
}

/// Reads a mesh; for `.node`/`.ele` either file of the pair may be given.
pub fn read_mesh(path: &Path) -> Result<Mesh> {
    match detect_format(path) {
        Some(MeshFormat::OffSurface) => read_off(path),
        Some(_) => read_node_ele(&path.with_extension("node"), &path.with_extension("ele")),
        None => Err(Error::InvalidInput(format!(
            "cannot tell the mesh format of {} (expected .node, .ele or .off)",
            path.display()
        ))),
    }
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        Self {
            path,
            inner: text.lines().enumerate(),
        }
    }

    /// Next non-blank line with comments removed, as `(line_number, tokens)`.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let content = line.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens().ok_or_else(|| Error::Parse {
            path: self.path.to_path_buf(),
            line: 0,
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    fn num<T: std::str::FromStr>(&self, line: usize, tok: &str, what: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(line, format!("cannot parse {what} from {tok:?}")))
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// Parses `.node` content, returning the points and the detected index base.
pub fn parse_node(path: &Path, text: &str) -> Result<(EmbeddedPoints, usize)> {
    let mut lines = Lines::new(path, text);
    let (ln, header) = lines.expect("node header")?;
    if header.len() < 2 {
        return Err(lines.err(ln, "node header needs <#points> <dim> [<#attrs> <#markers>]"));
    }
    let count: usize = lines.num(ln, header[0], "point count")?;
    let dim: usize = lines.num(ln, header[1], "dimension")?;
    if !(dim == 2 || dim == 3) {
        return Err(lines.err(ln, format!("unsupported dimension {dim}")));
    }
    let mut coords = Vec::with_capacity(count * dim);
    let mut base = 0;
    for row in 0..count {
        let (ln, toks) = lines.expect("node row")?;
        if toks.len() < 1 + dim {
            return Err(lines.err(ln, format!("node row needs an index and {dim} coordinates")));
        }
        let index: usize = lines.num(ln, toks[0], "node index")?;
        if row == 0 {
            if index > 1 {
                return Err(lines.err(ln, "first node must be numbered 0 or 1"));
            }
            base = index;
        }
        if index != row + base {
            return Err(lines.err(ln, format!("expected node {}, found {index}", row + base)));
        }
        for t in &toks[1..=dim] {
            coords.push(lines.num::<f64>(ln, t, "coordinate")?);
        }
    }
    Ok((EmbeddedPoints::new(dim, coords)?, base))
}

/// Parses `.ele` content against a known index base and point count.
pub fn parse_ele(path: &Path, text: &str, base: usize, num_points: usize) -> Result<Vec<Vec<usize>>> {
    let mut lines = Lines::new(path, text);
    let (ln, header) = lines.expect("element header")?;
    if header.len() < 2 {
        return Err(lines.err(ln, "element header needs <#cells> <nodes-per-cell> [<#attrs>]"));
    }
    let count: usize = lines.num(ln, header[0], "cell count")?;
    let per_cell: usize = lines.num(ln, header[1], "nodes per cell")?;
    // higher-order elements list their corners first
    let corners = match per_cell {
        3 | 6 => 3,
        4 | 10 => 4,
        other => return Err(lines.err(ln, format!("unsupported nodes per cell {other}"))),
    };
    let mut cells = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, toks) = lines.expect("element row")?;
        if toks.len() < 1 + per_cell {
            return Err(lines.err(ln, format!("element row needs an index and {per_cell} nodes")));
        }
        let mut cell = Vec::with_capacity(corners);
        for t in &toks[1..=corners] {
            let v: usize = lines.num(ln, t, "node number")?;
            if v < base || v - base >= num_points {
                return Err(Error::Validation(format!(
                    "{}:{ln}: element references node {v}, but nodes are numbered {base}..{}",
                    path.display(),
                    num_points + base
                )));
            }
            cell.push(v - base);
        }
        cells.push(cell);
    }
    Ok(cells)
}

pub fn read_node_ele(node_path: &Path, ele_path: &Path) -> Result<Mesh> {
    let (points, base) = parse_node(node_path, &read_text(node_path)?)?;
    let cells = parse_ele(ele_path, &read_text(ele_path)?, base, points.len())?;
    Ok(Mesh { points, cells })
}

pub fn parse_off(path: &Path, text: &str) -> Result<Mesh> {
    let mut lines = Lines::new(path, text);
    let (ln, mut toks) = lines.expect("OFF header")?;
    if toks[0] != "OFF" {
        return Err(lines.err(ln, "missing OFF keyword"));
    }
    toks.remove(0);
    let (ln, counts) = if toks.is_empty() { lines.expect("OFF counts")? } else { (ln, toks) };
    if counts.len() < 2 {
        return Err(lines.err(ln, "OFF counts need <#vertices> <#faces> [<#edges>]"));
    }
    let nv: usize = lines.num(ln, counts[0], "vertex count")?;
    let nf: usize = lines.num(ln, counts[1], "face count")?;
    let mut coords = Vec::with_capacity(3 * nv);
    for _ in 0..nv {
        let (ln, toks) = lines.expect("vertex row")?;
        if toks.len() < 3 {
            return Err(lines.err(ln, "vertex row needs 3 coordinates"));
        }
        for t in &toks[..3] {
            coords.push(lines.num::<f64>(ln, t, "coordinate")?);
        }
    }
    let mut cells = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, toks) = lines.expect("face row")?;
        let k: usize = lines.num(ln, toks[0], "face size")?;
        if k != 3 {
            return Err(lines.err(ln, format!("only triangle faces are supported, found a {k}-gon")));
        }
        if toks.len() < 4 {
            return Err(lines.err(ln, "face row needs 3 vertex indices"));
        }
        let mut cell = Vec::with_capacity(3);
        for t in &toks[1..4] {
            let v: usize = lines.num(ln, t, "vertex index")?;
            if v >= nv {
                return Err(Error::Validation(format!(
                    "{}:{ln}: face references vertex {v}, but only {nv} vertices exist",
                    path.display()
                )));
            }
            cell.push(v);
        }
        cells.push(cell);
    }
    Ok(Mesh {
        points: EmbeddedPoints::new(3, coords)?,
        cells,
    })
}

pub fn read_off(path: &Path) -> Result<Mesh> {
    parse_off(path, &read_text(path)?)
}

/// `.node` text, numbered from 1.
pub fn format_node(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} 0 0", mesh.points.len(), mesh.points.dim());
    for (i, row) in mesh.points.rows().enumerate() {
        let _ = write!(s, "{}", i + 1);
        for c in row {
            let _ = write!(s, " {c:?}");
        }
        s.push('\n');
    }
    s
}

/// `.ele` text, numbered from 1.
pub fn format_ele(mesh: &Mesh) -> String {
    let mut s = String::new();
    let per = mesh.cells.first().map_or(0, Vec::len);
    let _ = writeln!(s, "{} {} 0", mesh.cells.len(), per);
    for (i, cell) in mesh.cells.iter().enumerate() {
        let _ = write!(s, "{}", i + 1);
        for v in cell {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    s
}

pub fn format_off(mesh: &Mesh) -> String {
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} 0", mesh.points.len(), mesh.cells.len());
    for row in mesh.points.rows() {
        let coords: Vec<String> = row.iter().map(|c| format!("{c:?}")).collect();
        let _ = writeln!(s, "{}", coords.join(" "));
    }
    for cell in &mesh.cells {
        let _ = write!(s, "{}", cell.len());
        for v in cell {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    s
}

/// Writes `<base>.node` and `<base>.ele`; any extension on `base` is
/// replaced.
pub fn write_node_ele(mesh: &Mesh, base: &Path) -> Result<(PathBuf, PathBuf)> {
    let node = base.with_extension("node");
    let ele = base.with_extension("ele");
    fs::write(&node, format_node(mesh))?;
    fs::write(&ele, format_ele(mesh))?;
    Ok((node, ele))
}

pub fn write_off(mesh: &Mesh, path: &Path) -> Result<()> {
    fs::write(path, format_off(mesh))?;
    Ok(())
}

/// Writes the mesh in its natural format and returns the written paths.
pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<Vec<PathBuf>> {
    match mesh.format() {
        MeshFormat::OffSurface => {
            let p = path.with_extension("off");
            write_off(mesh, &p)?;
            Ok(vec![p])
        }
        _ => {
            let (a, b) = write_node_ele(mesh, path)?;
            Ok(vec![a, b])
        }
    }
}

/// Doubles with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn join_vertices(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub const DUALS_CSV_HEADER: &str = "dim,simplex_index,vertices,signed_volume,unsigned_volume,num_pieces,num_negative_pieces";

pub fn duals_csv(complex: &SimplicialComplex, cells: &[DualCell]) -> String {
    let mut s = String::from(DUALS_CSV_HEADER);
    s.push('\n');
    for cell in cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            cell.base_dim,
            cell.base,
            join_vertices(complex.simplex(cell.base_dim, cell.base).vertices()),
            format_float(cell.signed_volume),
            format_float(cell.unsigned_volume),
            cell.pieces.len(),
            cell.num_negative_pieces()
        );
    }
    s
}

pub fn hodge_csv(star: &HodgeStar) -> String {
    let mut s = String::from("index,entry\n");
    for (i, e) in star.entries.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", format_float(*e));
    }
    s
}

pub fn report_json(report: &MeshReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}
