use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_gap::cheeger::{cheeger_exact, cheeger_sweep_with, expander_verdict, gap_certificate, CutResult, EXACT_CUTOFF};
use lattice_gap::cover::{finite_grouping, universal_cover_ball, CoverError};
use lattice_gap::format::{format_rational, parse_rational, parse_spec, write_diagram, FormatError};
use lattice_gap::generators::{gen_ray_blocks, gen_tree_ball, nagao_cusp, CuspFamily, DiagramFamily, RayBlocksFamily, RayBlocksSpec};
use lattice_gap::hecke::{verify_recurrences, HeckeError};
use lattice_gap::report::{format_exact, format_significant};
use lattice_gap::spectral::{lambda_bottom_with, Method, SolverKind, SpectralOptions};
use lattice_gap::{Diagram, DiagramSpec, Rational};

mod reproduce;

#[derive(Parser)]
#[command(name = "lattice-gap", version, about = "Spectral gaps and Cheeger constants of edge-indexed diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated diagram in `diag v1` format.
    Generate(GenerateArgs),
    /// Parse a diagram, propagate its measure and report regularity.
    Validate { file: PathBuf },
    /// Bottom of the spectrum of the diagram Laplacian.
    Lambda {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Cheeger constant: exact enumeration or a spectral sweep cut.
    Cheeger {
        file: PathBuf,
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Check the core-plus-decaying-tails certificate and print the bound.
    CertifyGap {
        file: PathBuf,
        /// Comma-separated core vertex ids.
        #[arg(long, value_delimiter = ',', required = true)]
        core: Vec<String>,
        #[arg(long, value_parser = positive_rational)]
        c: Rational,
        #[arg(long, value_parser = positive_rational)]
        d: Rational,
    },
    /// Evaluate a family along a truncation ladder.
    Verdict {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        ladder: Vec<u32>,
        #[arg(long, value_parser = positive_rational)]
        eps: Rational,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Check the radial convolution recurrences on a biregular tree.
    HeckeVerify {
        #[arg(long)]
        k0: u32,
        #[arg(long)]
        k1: u32,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
    },
    /// Unfold a ball of the universal cover.
    Cover {
        file: PathBuf,
        /// Base vertex id; defaults to the first vertex in the file.
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        radius: u32,
        /// Write the ball in `diag v1` format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild both ladder tables, check them and write CSV and SVG.
    Report(reproduce::ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratedFamily {
    RayBlocks,
    Cusp,
    Ball,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    RayBlocks,
    Cusp,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: GeneratedFamily,
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// Number of blocks (ray-blocks).
    #[arg(long, default_value_t = 1)]
    blocks: u32,
    /// Ray length (cusp).
    #[arg(long, default_value_t = 4)]
    length: u32,
    #[arg(long, default_value_t = 3)]
    k0: u32,
    #[arg(long, default_value_t = 3)]
    k1: u32,
    #[arg(long, default_value_t = 3)]
    radius: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
pub(crate) struct SolverArgs {
    /// Residual tolerance for the eigensolver.
    #[arg(long, default_value_t = 1e-10, value_parser = positive_f64)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Seed for the iterative solver's start vector.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Iterative,
}

impl SolverArgs {
    pub(crate) fn options(&self) -> SpectralOptions {
        SpectralOptions {
            tol: self.tol,
            method: match self.method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Dense => Method::Dense,
                MethodArg::Iterative => Method::Iterative,
            },
            seed: self.seed,
            max_iter: None,
        }
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    match parse_rational(s) {
        Some(r) if r > Rational::from_integer(0.into()) => Ok(r),
        _ => Err(format!("`{s}` is not a positive rational")),
    }
}

/// Failure classes, each with its own exit status.
pub(crate) enum Failure {
    /// Input or configuration rejected (exit 2).
    Invalid(anyhow::Error),
    /// A checked identity or inequality did not hold (exit 3).
    Assertion(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

pub(crate) fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

pub(crate) type Outcome = Result<(), Failure>;

fn read_spec(path: &Path) -> Result<DiagramSpec, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_spec(&text).map_err(|e| located(path, e))
}

fn read_diagram(path: &Path) -> Result<Diagram, Failure> {
    read_spec(path)?
        .build()
        .map_err(|e| invalid(anyhow!("{}: invalid diagram: {e}", path.display())))
}

fn located(path: &Path, e: FormatError) -> Failure {
    match e {
        FormatError::Syntax { line, message } => invalid(anyhow!("{}:{line}: {message}", path.display())),
        FormatError::Invalid(e) => invalid(anyhow!("{}: invalid diagram: {e}", path.display())),
    }
}

pub(crate) fn check_ladder(ladder: &[u32]) -> Outcome {
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(anyhow!("truncation list must be strictly increasing, got {ladder:?}")));
    }
    Ok(())
}

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn show_cut(kind: &str, cut: &CutResult) {
    println!("{kind} cut: {{{}}}", cut.ids.join(", "));
    println!("mu(S) = {}", format_exact(&cut.mu_set));
    println!("mu(dS) = {}", format_exact(&cut.mu_boundary));
    println!("ratio = {}", format_exact(&cut.ratio));
}

fn generate(args: &GenerateArgs) -> Outcome {
    let built = match args.family {
        GeneratedFamily::RayBlocks => gen_ray_blocks(&RayBlocksSpec {
            q: args.q,
            blocks: args.blocks,
        })
        .map(|rb| rb.diagram),
        GeneratedFamily::Cusp => nagao_cusp(args.q, args.length).map(|c| c.diagram),
        GeneratedFamily::Ball => gen_tree_ball(args.k0, args.k1, args.radius).map(|t| t.diagram),
    };
    let d = built.map_err(invalid)?;
    write_output(args.out.as_deref(), &write_diagram(&d))?;
    Ok(())
}

fn validate(file: &Path) -> Outcome {
    let d = read_diagram(file)?;
    let reg = d.regularity();
    println!("ok: {}", file.display());
    println!("vertices: {}", d.vertex_count());
    println!("edges: {}", d.half_edge_count() / 2);
    println!("volume: {}", format_exact(&d.total_volume()));
    match &reg.k {
        Some(k) if reg.is_k_regular => println!("regular: indeg {} off {} boundary vertices", format_rational(k), reg.exempted.len()),
        _ => println!("regular: no (max indeg {})", format_rational(&d.max_indeg())),
    }
    Ok(())
}

fn lambda(file: &Path, solver: &SolverArgs) -> Outcome {
    let d = read_diagram(file)?;
    let rep = lambda_bottom_with(&d, &solver.options()).context("eigensolver failed")?;
    let method = match rep.method {
        SolverKind::DenseOracle => "dense",
        SolverKind::Iterative => "iterative",
    };
    println!("lambda = {}", format_significant(rep.lambda, 12));
    println!("method = {method}");
    println!("dimension = {}", rep.dimension);
    println!("residual = {:e}", rep.residual);
    if rep.nonconstant_indeg {
        println!("note: in-degree is not constant");
    }
    Ok(())
}

fn cheeger(file: &Path, exact: bool, solver: &SolverArgs) -> Outcome {
    let d = read_diagram(file)?;
    if exact {
        if d.vertex_count() > EXACT_CUTOFF {
            return Err(invalid(anyhow!(
                "{}: {} vertices exceed the exact cutoff of {EXACT_CUTOFF}",
                file.display(),
                d.vertex_count()
            )));
        }
        show_cut("exact", &cheeger_exact(&d).context("enumeration failed")?);
    } else {
        show_cut("sweep", &cheeger_sweep_with(&d, &solver.options()).context("sweep failed")?);
    }
    Ok(())
}

fn certify_gap(file: &Path, core: &[String], c: &Rational, decay: &Rational) -> Outcome {
    let d = read_diagram(file)?;
    let ids: Vec<&str> = core.iter().map(String::as_str).collect();
    let core = d.resolve(&ids).map_err(|e| invalid(anyhow!("{}: {e}", file.display())))?;
    let cert = gap_certificate(&d, &core, c, decay).map_err(|e| invalid(anyhow!("{}: {e}", file.display())))?;
    println!("tail bound = {}", format_exact(&cert.tail_bound));
    match &cert.core_bound {
        Some(b) => println!("core bound = {}", format_exact(b)),
        None => println!("core bound = none"),
    }
    println!("certified h >= {}", format_exact(&cert.certified));
    if d.vertex_count() <= EXACT_CUTOFF {
        let h = cheeger_exact(&d).context("enumeration failed")?.ratio;
        println!("exact h = {}", format_exact(&h));
        if h < cert.certified {
            return Err(Failure::Assertion(format!(
                "exact h {} is below the certified bound {}",
                format_rational(&h),
                format_rational(&cert.certified)
            )));
        }
    }
    Ok(())
}

fn verdict(family: Family, q: u32, ladder: &[u32], eps: &Rational, solver: &SolverArgs) -> Outcome {
    check_ladder(ladder)?;
    let fam: Box<dyn DiagramFamily> = match family {
        Family::RayBlocks => Box::new(RayBlocksFamily { q }),
        Family::Cusp => Box::new(CuspFamily { q }),
    };
    // surface bad parameters as invalid input before the ladder runs
    fam.generate(ladder[0]).map_err(invalid)?;
    let rec = expander_verdict(fam.as_ref(), ladder, eps, &solver.options()).context("verdict failed")?;
    println!("{}", rec.summary());
    println!("N,dim,h_upper,lambda,witness");
    for e in &rec.entries {
        println!(
            "{},{},{},{},{}",
            e.n,
            e.dimension,
            format_exact(&e.h_upper),
            format_significant(e.lambda, 12),
            e.witness.join(" ")
        );
    }
    for w in &rec.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn hecke_verify(k0: u32, k1: u32, nmax: u32) -> Outcome {
    let rep = verify_recurrences(k0, k1, nmax).map_err(|e| match e {
        HeckeError::BadDegrees(..) | HeckeError::BadRange | HeckeError::BudgetExceeded(_) => invalid(e),
        other => Failure::Other(other.into()),
    })?;
    print!("{}", rep.to_csv());
    if !rep.all_hold() {
        let failed: Vec<String> = rep.checks.iter().filter(|c| !c.holds).map(|c| format!("{} n={}", c.name, c.n)).collect();
        return Err(Failure::Assertion(format!("recurrences fail: {}", failed.join(", "))));
    }
    Ok(())
}

fn cover(file: &Path, base: Option<&str>, radius: u32, out: Option<&Path>) -> Outcome {
    let spec = read_spec(file)?;
    let g = spec
        .build_graph()
        .map_err(|e| invalid(anyhow!("{}: invalid graph: {e}", file.display())))?;
    let base = match base {
        Some(b) => b.to_string(),
        None => g
            .vertices()
            .first()
            .map(|v| v.id.clone())
            .ok_or_else(|| invalid(anyhow!("{}: no vertices", file.display())))?,
    };
    let ball = universal_cover_ball(&g, &base, radius).map_err(|e| match e {
        CoverError::TooLarge => Failure::Other(e.into()),
        e => invalid(anyhow!("{}: {e}", file.display())),
    })?;
    let interior = ball.interior(&g);
    let mut degrees: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in &interior {
        *degrees.entry(ball.degree(v)).or_default() += 1;
    }
    println!("base = {base}");
    println!("radius = {radius}");
    println!("vertices = {}", ball.tree.vertex_count());
    println!("interior = {}", interior.len());
    for (deg, count) in &degrees {
        println!("interior degree {deg}: {count}");
    }
    // a graph of finite groups exists only when the measure does
    if let Ok(d) = spec.build() {
        let grouping = finite_grouping(&d).map_err(|e| Failure::Other(e.into()))?;
        println!("grouping scale = {}", format_rational(&grouping.scale));
        for (v, n) in d.vertices().iter().zip(&grouping.vertex_order) {
            println!("order {} = {n}", v.id);
        }
    }
    if let Some(p) = out {
        write_output(Some(p), &write_diagram(&ball.tree))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Generate(args) => generate(&args),
        Command::Validate { file } => validate(&file),
        Command::Lambda { file, solver } => lambda(&file, &solver),
        Command::Cheeger { file, exact, solver } => cheeger(&file, exact, &solver),
        Command::CertifyGap { file, core, c, d } => certify_gap(&file, &core, &c, &d),
        Command::Verdict {
            family,
            q,
            ladder,
            eps,
            solver,
        } => verdict(family, q, &ladder, &eps, &solver),
        Command::HeckeVerify { k0, k1, nmax } => hecke_verify(k0, k1, nmax),
        Command::Cover { file, base, radius, out } => cover(&file, base.as_deref(), radius, out.as_deref()),
        Command::Report(args) => reproduce::report(&args),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on unknown flags and malformed values
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
