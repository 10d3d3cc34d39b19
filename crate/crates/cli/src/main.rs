use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use platemix_core::harness::{
    canonical_mesh, run_bfs_levels, run_convergence, verify, CaseKind, OutputFormat, RunConfig,
};
use platemix_core::mesh::{generate_square_hole_mesh, refine_uniform, validate, HoleBox, MeshFile};
use platemix_core::schemes::SchemeKind;
use platemix_core::solver::{estimate_infsup, solve_symmetric_indefinite};
use platemix_core::sparse::CsrMatrix;
use platemix_core::{Error, Result};

/// Mixed finite elements for clamped Reissner-Mindlin and Kirchhoff plates
/// on square domains with square holes.
#[derive(Parser)]
#[command(name = "platemix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Convergence table for the manufactured solutions.
    Run(RunArgs),
    /// Discrete inf-sup constants on the canonical domain.
    Infsup(InfsupArgs),
    /// Structural invariants: topology, exact sequence, commuting interpolants.
    Verify {
        #[arg(long, default_value_t = 3)]
        mesh_levels: usize,
    },
    /// Solve a MatrixMarket system with the symmetric indefinite solver.
    Solve(SolveArgs),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Structured criss-cross mesh of `[0, outer]^2` minus the given holes.
    Gen {
        #[arg(long)]
        outer: f64,
        /// `x0,y0,x1,y1`; repeat for several holes.
        #[arg(long, value_parser = parse_hole)]
        hole: Vec<HoleBox>,
        /// Cells per unit length.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = SchemeKind::from_str)]
    scheme: Option<SchemeKind>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, value_parser = CaseKind::from_str)]
    case: Option<CaseKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = OutputFormat::from_str)]
    format: Option<OutputFormat>,
    #[arg(long)]
    young: Option<f64>,
    #[arg(long)]
    poisson: Option<f64>,
    /// Skip the finer reference solve for the multiplier errors.
    #[arg(long)]
    no_reference: bool,
}

#[derive(Args)]
struct InfsupArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, value_parser = OutputFormat::from_str, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// One value per line (or whitespace separated).
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn parse_hole(s: &str) -> std::result::Result<HoleBox, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [x0, y0, x1, y1] => Ok(HoleBox::new(x0, y0, x1, y1)),
        _ => Err(format!("expected x0,y0,x1,y1, got '{s}'")),
    }
}

/// Bad input is a usage error (2); anything that means a computed result
/// broke a contract is an invariant violation (1).
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidDomain(_)
        | Error::InvalidMesh(_)
        | Error::NonPositiveThickness(_)
        | Error::InsufficientResolution
        | Error::TooLarge { .. }
        | Error::DimensionMismatch(_)
        | Error::UnsupportedQuadrature(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn mesh_gen(
    outer: f64,
    holes: &[HoleBox],
    n: usize,
    refine: usize,
    out: Option<&Path>,
) -> Result<bool> {
    let mut m = generate_square_hole_mesh(outer, holes, n)?;
    for _ in 0..refine {
        m = refine_uniform(&m);
    }
    let report = validate(&m);
    for v in &report.violations {
        eprintln!("violation: {v:?}");
    }
    eprintln!(
        "V={} E={} T={} holes={} h={:.4e}",
        m.n_vertices(),
        m.n_edges(),
        m.n_triangles(),
        m.n_holes(),
        m.mesh_size()
    );
    let file = MeshFile::from(&m);
    match out {
        Some(p) => file.write(p)?,
        None => println!("{}", serde_json::to_string(&file)?),
    }
    Ok(report.is_ok())
}

fn run(args: &RunArgs) -> Result<bool> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.scheme {
        cfg.scheme = v;
    }
    if let Some(v) = args.t {
        cfg.t = v;
    }
    if let Some(v) = args.levels {
        cfg.levels = v;
    }
    if let Some(v) = args.case {
        cfg.case = v;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }
    if let Some(v) = args.young {
        cfg.young = v;
    }
    if let Some(v) = args.poisson {
        cfg.poisson = v;
    }
    if args.no_reference {
        cfg.reference = false;
    }

    if cfg.scheme == SchemeKind::BfsCheck {
        let conv = cfg.convergence()?;
        let table = run_bfs_levels(cfg.t, cfg.levels, conv.material)?;
        let text = match cfg.format {
            OutputFormat::Csv => table.to_csv(),
            OutputFormat::Json => serde_json::to_string_pretty(&table)?,
        };
        emit(cfg.out.as_deref(), &text)?;
        let worst = table.max_relative();
        eprintln!("largest relative gap {worst:.2e}");
        return Ok(worst <= 1e-8);
    }

    let table = run_convergence(&cfg.convergence()?)?;
    emit(cfg.out.as_deref(), &table.render(cfg.format)?)?;
    if let Some(r) = table.last() {
        eprintln!(
            "{} t={:e}: last rates phi {:.3}, w {:.3}; residual {:.1e}",
            table.scheme, table.t, r.rates.phi, r.rates.w, r.relative_residual
        );
    }
    Ok(true)
}

fn infsup(args: &InfsupArgs) -> Result<bool> {
    if args.levels == 0 {
        return Err(Error::InvalidDomain(
            "at least one level is required".into(),
        ));
    }
    let mut rows = Vec::new();
    for &t in &args.t {
        for level in 1..=args.levels {
            let mut e = estimate_infsup(&canonical_mesh(level)?, t)?;
            e.level = Some(level);
            rows.push(e);
        }
    }
    let text = match args.format {
        OutputFormat::Csv => {
            let mut s = String::from("level,h,t,beta,n_v,n_q\n");
            for e in &rows {
                s += &format!(
                    "{},{:.6e},{:.6e},{:.6e},{},{}\n",
                    e.level.unwrap_or(0),
                    e.h,
                    e.t,
                    e.beta,
                    e.n_v,
                    e.n_q
                );
            }
            s
        }
        OutputFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    emit(None, &text)?;
    Ok(rows.iter().all(|e| e.beta > 0.0))
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let mut v = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        for tok in line?.split_whitespace() {
            if tok.starts_with('%') || tok.starts_with('#') {
                break;
            }
            v.push(
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{}: '{tok}': {e}", path.display())))?,
            );
        }
    }
    Ok(v)
}

fn solve(args: &SolveArgs) -> Result<bool> {
    let a = CsrMatrix::read_matrix_market(BufReader::new(File::open(&args.matrix)?))?;
    let b = read_vector(&args.rhs)?;
    if a.nrows() != a.ncols() || b.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{}, right-hand side {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let report = solve_symmetric_indefinite(&a, &b, args.tol)?;
    let mut text = String::with_capacity(24 * report.solution.len());
    for x in &report.solution {
        text += &format!("{x:.17e}\n");
    }
    emit(args.out.as_deref(), &text)?;
    eprintln!(
        "n={} method={:?} relative residual {:.2e}",
        report.n, report.method, report.relative_residual
    );
    Ok(report.relative_residual <= args.tol)
}

fn set_threads() -> Result<()> {
    if let Ok(s) = std::env::var("PLATEMIX_THREADS") {
        let n = s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("PLATEMIX_THREADS='{s}' is not a count")))?;
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = set_threads().and_then(|_| match &cli.command {
        Command::Mesh {
            command:
                MeshCommand::Gen {
                    outer,
                    hole,
                    n,
                    refine,
                    out,
                },
        } => mesh_gen(*outer, hole, *n, *refine, out.as_deref()),
        Command::Run(args) => run(args),
        Command::Infsup(args) => infsup(args),
        Command::Verify { mesh_levels } => verify(*mesh_levels).map(|r| {
            print!("{r}");
            r.passed()
        }),
        Command::Solve(args) => solve(args),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
