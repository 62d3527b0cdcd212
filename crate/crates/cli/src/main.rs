use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use signed_dec::fixtures::{self, Fixture, FixtureParams};
use signed_dec::poisson::{self, ExperimentConfig};
use signed_dec::signed_dual::dual_cells;
use signed_dec::{classify_complex, hodge_star, io, HodgeMode, MeshReport, SimplicialComplex, Tolerance};

#[derive(Parser)]
#[command(name = "signed-dec", version, about = "Signed circumcentric duals and diagonal Hodge stars")]
struct Cli {
    /// Relative geometric tolerance. Defaults to $SIGNED_DEC_EPS or 1e-10.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a mesh; exits 1 when it is not pairwise Delaunay with a
    /// one-sided boundary.
    Check { mesh: PathBuf },
    /// Dual volumes of all p-simplices as CSV.
    Duals(DimArgs),
    /// Diagonal of the Hodge star on p-forms as CSV.
    Hodge(DimArgs),
    /// Run the flux experiment described by a TOML config.
    Poisson {
        config: PathBuf,
        /// Directory for the CSV and JSON outputs.
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Write a generated test mesh.
    Fixture {
        name: Fixture,
        #[command(flatten)]
        params: FixtureArgs,
        /// Output path; the extension is chosen from the mesh type.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Full classification report.
    Report {
        mesh: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct DimArgs {
    mesh: PathBuf,
    #[arg(short)]
    p: usize,
    /// Use unsigned dual volumes.
    #[arg(long)]
    unsigned: bool,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, default_value_t = 8)]
    resolution: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.25)]
    jitter: f64,
    #[arg(long, default_value_t = 0.2)]
    amplitude: f64,
    #[arg(long, default_value_t = 3)]
    flips: usize,
    #[arg(long, default_value_t = 4)]
    ring: usize,
    #[arg(long, default_value_t = 1.2)]
    inset: f64,
}

impl From<FixtureArgs> for FixtureParams {
    fn from(a: FixtureArgs) -> Self {
        FixtureParams {
            resolution: a.resolution,
            seed: a.seed,
            jitter: a.jitter,
            amplitude: a.amplitude,
            flips: a.flips,
            ring: a.ring,
            inset: a.inset,
        }
    }
}

fn load(path: &Path, tol: Tolerance) -> Result<SimplicialComplex> {
    let mesh = io::read_mesh(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(mesh.build_with(tol)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn report_text(r: &MeshReport) -> String {
    let mut s = format!(
        "verdict: {:?}\ndimension {} in R^{}, counts {:?}\n",
        r.verdict, r.dim, r.ambient_dim, r.counts
    );
    let violated: Vec<_> = r.violated_pairs().collect();
    let degenerate: Vec<_> = r.degenerate_pairs().collect();
    let sided: Vec<_> = r.non_one_sided().collect();
    s += &format!(
        "interior pairs: {} ({} violated, {} degenerate)\nboundary facets: {} ({} not one-sided)\n",
        r.pairs.len(),
        violated.len(),
        degenerate.len(),
        r.boundary.len(),
        sided.len()
    );
    for p in violated {
        s += &format!("  violated pair across {:?}\n", p.facet_vertices);
    }
    for b in sided {
        s += &format!("  {:?} boundary facet {:?} of {:?}\n", b.status, b.facet_vertices, b.top_vertices);
    }
    for d in &r.nonpositive_duals {
        s += &format!("  nonpositive dual of {:?}: {:e}\n", d.vertices, d.signed_volume);
    }
    for n in &r.notes {
        s += &format!("  note: {n}\n");
    }
    s
}

fn mode(unsigned: bool) -> HodgeMode {
    if unsigned {
        HodgeMode::Unsigned
    } else {
        HodgeMode::Signed
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let tol = match cli.eps {
        Some(e) if e.is_finite() && e > 0.0 => Tolerance::new(e),
        Some(e) => bail!("--eps must be positive, got {e}"),
        None => Tolerance::from_env(),
    };
    match cli.command {
        Command::Check { mesh } => {
            let report = classify_complex(&load(&mesh, tol)?);
            print!("{}", report_text(&report));
            return Ok(if report.is_qualifying() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Duals(a) => {
            let c = load(&a.mesh, tol)?;
            let cells = dual_cells(&c, a.p)?;
            // both columns are always written; the flag picks the summary
            let total: f64 = cells
                .iter()
                .map(|d| if a.unsigned { d.unsigned_volume } else { d.signed_volume })
                .sum();
            let nonpositive = cells.iter().filter(|d| d.signed_volume <= 0.0).count();
            eprintln!(
                "{} {}-simplices, total {:?} dual volume {}, {nonpositive} nonpositive signed",
                cells.len(),
                a.p,
                mode(a.unsigned),
                io::format_float(total)
            );
            emit(a.output.as_deref(), &io::duals_csv(&c, &cells))?;
        }
        Command::Hodge(a) => {
            let c = load(&a.mesh, tol)?;
            let star = hodge_star(&c, a.p, mode(a.unsigned))?;
            emit(a.output.as_deref(), &io::hodge_csv(&star))?;
        }
        Command::Poisson { config, out_dir } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let config: ExperimentConfig = toml::from_str(&text).context("parsing experiment config")?;
            let runs = poisson::flux_experiment(&config)?;
            fs::create_dir_all(&out_dir)?;
            for run in &runs {
                let mut line = format!("{:<22} qualifying={:<5}", run.label, run.qualifying);
                if let Some(e) = run.analytic_error {
                    line += &format!(" error={e:.3e}");
                }
                if let Some(err) = &run.solve_error {
                    line += &format!(" failed: {err}");
                }
                println!("{line}");
                if let Some(sol) = &run.solution {
                    let c = run.mesh.build_with(tol)?;
                    fs::write(out_dir.join(format!("{}_potential.csv", run.label)), poisson::potential_csv(&run.mesh, &sol.u))?;
                    fs::write(out_dir.join(format!("{}_field.csv", run.label)), poisson::field_csv(&c, &sol.sigma)?)?;
                }
            }
            fs::write(out_dir.join("summary.json"), poisson::summary_json(&config, &runs)?)?;
        }
        Command::Fixture { name, params, output } => {
            let mesh = fixtures::generate(name, &params.into())?;
            for p in io::write_mesh(&mesh, &output)? {
                println!("{}", p.display());
            }
        }
        Command::Report { mesh, json } => {
            let report = classify_complex(&load(&mesh, tol)?);
            if json {
                println!("{}", io::report_json(&report)?);
            } else {
                print!("{}", report_text(&report));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
