use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use specpart::graph::mtx::write_symmetric_pattern;
use specpart::graph::{largest_connected_component, parse_matrix_market, symmetrize, write_partition_file, Graph};
use specpart::harness::{generate, run_sweep, GeneratorSpec, Stencil};
use specpart::pipeline::{partition_graph, PrecondChoice, ProblemChoice, RunConfig};
use specpart::{Block, Error, PrecondKind, ProblemKind};

#[derive(Parser, Debug)]
#[command(name = "specpart", version, about = "Spectral graph partitioner")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic graph in Matrix Market format.
    Gen(GenArgs),
    /// Partition generated graphs under several configurations and print a table.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    Auto,
    Combinatorial,
    Generalized,
    Normalized,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecondArg {
    Auto,
    Jacobi,
    Polynomial,
    Amg,
    None,
}

impl From<ProblemArg> for ProblemChoice {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Auto => ProblemChoice::Auto,
            ProblemArg::Combinatorial => ProblemChoice::Fixed(ProblemKind::Combinatorial),
            ProblemArg::Generalized => ProblemChoice::Fixed(ProblemKind::Generalized),
            ProblemArg::Normalized => ProblemChoice::Fixed(ProblemKind::Normalized),
        }
    }
}

impl From<PrecondArg> for PrecondChoice {
    fn from(p: PrecondArg) -> Self {
        match p {
            PrecondArg::Auto => PrecondChoice::Auto,
            PrecondArg::None => PrecondChoice::None,
            PrecondArg::Jacobi => PrecondChoice::Fixed(PrecondKind::Jacobi),
            PrecondArg::Polynomial => PrecondChoice::Fixed(PrecondKind::Polynomial),
            PrecondArg::Amg => PrecondChoice::Fixed(PrecondKind::Amg),
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Matrix Market file holding the graph's adjacency pattern.
    #[arg(long, required = true)]
    input: Option<PathBuf>,
    /// Number of parts.
    #[arg(long, required = true)]
    parts: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    problem: ProblemArg,
    #[arg(long, value_enum, default_value = "auto")]
    precond: PrecondArg,
    /// LOBPCG tolerance; chosen from the graph class when omitted.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = specpart::eigensolver::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = specpart::pipeline::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, env = "SPECPART_THREADS")]
    threads: Option<usize>,
    /// Report the cut counting both directions of every cut edge.
    #[arg(long)]
    doubled_cut: bool,
    /// Partition file, one "vertex part" line per input vertex.
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON run report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Starting block for LOBPCG as a dense n x d coordinate Matrix Market file.
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// Per-iteration residual trace, one JSON object per line.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// grid2d, stencil7, stencil27, ring, path, regular, scalefree
    kind: String,
    /// Sizes: w h | x y z | n | n deg | n attach
    #[arg(required = true)]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Generator specs such as grid2d:64x64 or scalefree:5000x4@1.
    #[arg(long = "graph", required = true)]
    graphs: Vec<String>,
    #[arg(long, default_value_t = 4)]
    parts: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "auto")]
    problem: Vec<ProblemArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "auto")]
    precond: Vec<PrecondArg>,
    /// Comma-separated tolerances; empty means the class default.
    #[arg(long, value_delimiter = ',')]
    tolerance: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "SPECPART_THREADS")]
    threads: Option<usize>,
    #[arg(long, default_value_t = ',')]
    sep: char,
    /// Leave out the timing column.
    #[arg(long)]
    no_time: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Breakdown { .. } => 3,
        Error::InfeasibleParts { .. } | Error::InvalidArgument(_) | Error::DegenerateDegree(_) => 4,
        _ => 1,
    }
}

fn open(path: &Path) -> specpart::Result<BufReader<File>> {
    let f = File::open(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> specpart::Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn set_threads(threads: Option<usize>) -> specpart::Result<()> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}

fn read_init_block(path: &Path) -> specpart::Result<Block> {
    let m = parse_matrix_market(open(path)?)?;
    Ok(m.to_dense())
}

fn run(args: RunArgs) -> specpart::Result<()> {
    set_threads(args.threads)?;
    let input = args.input.expect("clap enforces --input");
    let parts = args.parts.expect("clap enforces --parts");
    let matrix = parse_matrix_market(open(&input)?)?;
    let full = symmetrize(&matrix)?;
    let (g, map) = largest_connected_component(&full)?;
    if map.dropped() > 0 {
        eprintln!(
            "warning: input has {} vertices outside the largest component; they are left unassigned",
            map.dropped()
        );
    }

    let mut cfg = RunConfig::new(parts);
    cfg.problem = args.problem.into();
    cfg.precond = args.precond.into();
    cfg.tol = args.tolerance;
    cfg.max_iters = args.max_iters;
    cfg.seed = args.seed;
    cfg.epsilon = args.epsilon;
    cfg.doubled_cut = args.doubled_cut;
    if let Some(path) = &args.init_file {
        let mut block = read_init_block(path)?;
        if block.nrows() == map.source_len && map.dropped() > 0 {
            block = Block::from_fn(map.original.len(), block.ncols(), |i, j| block[(map.original[i], j)]);
        }
        cfg.initial_block = Some(block);
    }

    let (partition, mut report) = partition_graph(&g, &cfg)?;
    report.graph.dropped_vertices = map.dropped();
    if map.dropped() > 0 {
        report
            .warnings
            .push(format!("{} vertices outside the largest component were dropped", map.dropped()));
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    if let Some(path) = &args.output {
        let mut out = create(path)?;
        write_partition_file(&partition.assignment, &map, &mut out)?;
        out.flush()?;
    }
    if let Some(path) = &args.report {
        let mut out = create(path)?;
        serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
        writeln!(out)?;
        out.flush()?;
    }
    if let Some(path) = &args.trace {
        let mut out = create(path)?;
        for rec in &report.trace {
            serde_json::to_writer(&mut out, rec).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        out.flush()?;
    }
    println!(
        "parts {} cutsize {} imbalance {:.6} iterations {}",
        partition.num_parts, report.cutsize, report.imbalance, report.iterations
    );
    Ok(())
}

fn gen(args: GenArgs) -> specpart::Result<()> {
    let d = &args.dims;
    let bad = || Error::InvalidArgument(format!("wrong number of sizes for '{}'", args.kind));
    let spec = match (args.kind.to_ascii_lowercase().as_str(), d.as_slice()) {
        ("grid2d", &[w, h]) => GeneratorSpec::Grid2D(w, h),
        ("stencil7", &[x, y, z]) => GeneratorSpec::Stencil3D(x, y, z, Stencil::Points7),
        ("stencil27" | "brick3d", &[x, y, z]) => GeneratorSpec::Stencil3D(x, y, z, Stencil::Points27),
        ("ring", &[n]) => GeneratorSpec::Ring(n),
        ("path", &[n]) => GeneratorSpec::Path(n),
        ("regular", &[n, deg]) => GeneratorSpec::RandomRegular { n, deg, seed: args.seed },
        ("scalefree", &[n, attach]) => GeneratorSpec::ScaleFree { n, attach, seed: args.seed },
        ("grid2d" | "stencil7" | "stencil27" | "brick3d" | "ring" | "path" | "regular" | "scalefree", _) => {
            return Err(bad())
        }
        (other, _) => return Err(Error::InvalidArgument(format!("unknown generator '{other}'"))),
    };
    let g = generate(&spec)?;
    let mut out = create(&args.out)?;
    write_symmetric_pattern(g.adjacency(), &mut out)?;
    out.flush()?;
    eprintln!("{spec}: {} vertices, {} edges", g.num_vertices(), g.num_edges());
    Ok(())
}

fn sweep(args: SweepArgs) -> specpart::Result<()> {
    set_threads(args.threads)?;
    let graphs = args
        .graphs
        .iter()
        .map(|s| {
            let spec: GeneratorSpec = s.parse()?;
            Ok((spec.to_string(), generate(&spec)?))
        })
        .collect::<specpart::Result<Vec<(String, Graph)>>>()?;
    let tols: Vec<Option<f64>> = if args.tolerance.is_empty() {
        vec![None]
    } else {
        args.tolerance.iter().map(|&t| Some(t)).collect()
    };
    let mut configs = Vec::new();
    for &pc in &args.precond {
        for &pb in &args.problem {
            for &tol in &tols {
                let mut cfg = RunConfig::new(args.parts);
                cfg.precond = pc.into();
                cfg.problem = pb.into();
                cfg.tol = tol;
                cfg.seed = args.seed;
                let name = format!(
                    "{}/{}/{}",
                    format!("{pc:?}").to_lowercase(),
                    format!("{pb:?}").to_lowercase(),
                    tol.map_or("auto".to_string(), |t| format!("{t:e}"))
                );
                configs.push((name, cfg));
            }
        }
    }
    let table = run_sweep(&graphs, &configs);
    table.write_delimited(io::stdout().lock(), args.sep, !args.no_time)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Some(Command::Gen(a)) => gen(a),
        Some(Command::Sweep(a)) => sweep(a),
        None => run(cli.run),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
