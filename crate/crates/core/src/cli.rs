//! The `mfbc` command line: graph generation, betweenness, verification
//! against the reference implementation, cost evaluation and simulation.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{Algebra, Multpath, Weight};
use crate::costmodel::{mfbc_bound, optimize_grid, CostEstimate, ProcGrid, Variant};
use crate::decomp::{run_variant, LinkCost, SimConfig};
use crate::graphgen::{assign_weights, remove_disconnected, rmat, uniform_random, Density, Graph, RmatParams, RMAT_DEFAULT_PROBS};
use crate::io::{parse_edge_list, read_file, write_atomic, write_edge_list, write_scores, ParseOptions, ParsedGraph};
use crate::mfbc::{mfbc_with_order, mfbf, mfbr, MfbcError};
use crate::oracle::{brandes, max_relative_error};
use crate::spmat::{mm_general, SparseMatrix};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "MFBC_THREADS";

/// Largest per-vertex relative error `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Data = 2,
    Verification = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::Data(_) => ExitCode::Data,
            CliError::Verification(_) => ExitCode::Verification,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "mfbc", version, about = "Betweenness centrality by maximal-frontier sparse products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic graph as an edge list.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Compute betweenness scores.
    Bc(BcArgs),
    /// Compare scores against the reference implementation.
    Verify(VerifyArgs),
    /// Evaluate the MFBC bound or pick the best multiply grid.
    Cost(CostArgs),
    /// Simulate a distributed multiply and report its communication ledger.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// R-MAT graph with 2^scale vertices.
    Rmat(RmatArgs),
    /// Uniform random graph.
    Uniform(UniformArgs),
}

#[derive(Debug, Args)]
struct GenCommon {
    #[arg(long)]
    directed: bool,
    /// Draw integer weights uniformly from min-weight..=max-weight.
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 1)]
    min_weight: u64,
    #[arg(long, default_value_t = 100)]
    max_weight: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RmatArgs {
    #[arg(long)]
    scale: u32,
    #[arg(long = "edgefactor", alias = "edge-factor", default_value_t = 16)]
    edge_factor: u32,
    /// Quadrant probabilities a,b,c,d.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    probs: Option<Vec<f64>>,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("density").required(true).args(["degree", "fill"])))]
struct UniformArgs {
    #[arg(long)]
    n: usize,
    /// Expected edges per vertex.
    #[arg(long)]
    degree: Option<f64>,
    /// Fraction of possible edges present.
    #[arg(long)]
    fill: Option<f64>,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Edge-list file.
    input: PathBuf,
    /// Treat edges as directed.
    #[arg(long)]
    directed: bool,
    /// Read the third column as edge weights.
    #[arg(long)]
    weighted: bool,
}

impl GraphInput {
    fn load(&self) -> Result<ParsedGraph, CliError> {
        let text = read_file(&self.input).map_err(data)?;
        let options = ParseOptions {
            directed: self.directed.then_some(true),
            weighted: self.weighted.then_some(true),
        };
        parse_edge_list(&text, options).map_err(data)
    }
}

#[derive(Debug, Args)]
struct BcArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Sources per batch; capped at the vertex count.
    #[arg(long, default_value_t = 512)]
    batch_size: usize,
    /// Shuffle the source order with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Score file path; standard output if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphInput,
    #[arg(long, default_value_t = 512)]
    batch_size: usize,
    #[arg(long, hide = true)]
    inject_corruption: bool,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    p: usize,
    /// Replication factor.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Graph diameter.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long = "nnz-a", alias = "nnzA")]
    nnz_a: Option<f64>,
    #[arg(long = "nnz-b", alias = "nnzB")]
    nnz_b: Option<f64>,
    #[arg(long = "nnz-c", alias = "nnzC")]
    nnz_c: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Edge list whose adjacency matrix is squared; a random pair of
    /// matrices is generated if omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    weighted: bool,
    /// Dimension of generated operands.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Nonzeros per row of generated operands.
    #[arg(long, default_value_t = 8.0)]
    degree: f64,
    /// `p1xp2xp3`, `p_rxp_c`, or `p`.
    #[arg(long)]
    grid: String,
    /// `A`, `AB`, or `C.AB` style variant name.
    #[arg(long)]
    variant: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return ExitCode::Usage as i32;
            }
            let _ = write!(stdout, "{}", e.render());
            return ExitCode::Success as i32;
        }
    };
    let result = match cli.command {
        Command::Gen { kind } => cmd_gen(kind, stdout),
        Command::Bc(args) => cmd_bc(args, stdout, stderr),
        Command::Verify(args) => cmd_verify(args, stdout),
        Command::Cost(args) => cmd_cost(args, stdout),
        Command::Simulate(args) => cmd_simulate(args, stdout),
    };
    match result {
        Ok(()) => ExitCode::Success as i32,
        Err(e) => {
            let _ = writeln!(stderr, "mfbc: {e}");
            e.exit_code() as i32
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, text).map_err(data),
        None => stdout.write_all(text.as_bytes()).map_err(data),
    }
}

fn finish_generated(g: Graph, mut comments: Vec<String>, common: &GenCommon, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = if common.weighted {
        comments.push(format!("weights {}..={}", common.min_weight, common.max_weight));
        assign_weights(&g, common.min_weight, common.max_weight, common.seed).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        g
    };
    emit(common.out.as_ref(), &write_edge_list(&g, &comments), stdout)
}

fn cmd_gen(kind: GenKind, stdout: &mut dyn Write) -> Result<(), CliError> {
    match kind {
        GenKind::Rmat(args) => {
            let probs = match args.probs.as_deref() {
                Some([a, b, c, d]) => [*a, *b, *c, *d],
                Some(_) => return Err(CliError::Usage("--probs takes four values".into())),
                None => RMAT_DEFAULT_PROBS,
            };
            let params = RmatParams { scale: args.scale, edge_factor: args.edge_factor, probs, directed: args.common.directed };
            let g = rmat(&params, args.common.seed).map_err(|e| CliError::Usage(e.to_string()))?;
            let comments = vec![format!(
                "generator rmat scale {} edgefactor {} probs {},{},{},{} seed {}",
                args.scale, args.edge_factor, probs[0], probs[1], probs[2], probs[3], args.common.seed
            )];
            finish_generated(g, comments, &args.common, stdout)
        }
        GenKind::Uniform(args) => {
            let (density, label) = match (args.degree, args.fill) {
                (Some(k), _) => (Density::Degree(k), format!("degree {k}")),
                (None, Some(f)) => (Density::Fill(f), format!("fill {f}")),
                (None, None) => unreachable!("clap requires one of --degree/--fill"),
            };
            let g = uniform_random(args.n, density, args.common.directed, args.common.seed)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let comments = vec![format!("generator uniform n {} {label} seed {}", args.n, args.common.seed)];
            finish_generated(g, comments, &args.common, stdout)
        }
    }
}

/// Edge traversals per second: every source traverses all `m` edges.
pub fn teps(m: usize, sources: usize, seconds: f64) -> f64 {
    m as f64 * sources as f64 / seconds
}

/// Adjacency used for scoring: weights only when the graph is weighted.
fn scoring_adjacency(g: &Graph) -> SparseMatrix<Weight> {
    if g.is_weighted() {
        g.adjacency()
    } else {
        g.unweighted().adjacency()
    }
}

fn cmd_bc(args: BcArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if args.batch_size == 0 {
        return Err(CliError::Usage("--batch-size must be positive".into()));
    }
    let parsed = args.graph.load()?;
    let (reduced, map) = remove_disconnected(&parsed.graph);
    let n = reduced.n();
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = args.seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let n_b = args.batch_size.min(n.max(1));
    let a = scoring_adjacency(&reduced);

    let start = Instant::now();
    let run = mfbc_with_order(&a, n_b, &order).map_err(data)?;
    let seconds = start.elapsed().as_secs_f64();

    let scores = map.expand(run.scores.as_slice());
    emit(args.out.as_ref(), &write_scores(&parsed.labels, &scores), stdout)?;

    let stats: &mut dyn Write = if args.out.is_some() { stdout } else { stderr };
    let frontier: usize = run.batches.iter().map(|b| b.forward.total_frontier_nnz() + b.backward.total_frontier_nnz()).sum();
    let product: usize = run.batches.iter().map(|b| b.forward.total_product_nnz() + b.backward.total_product_nnz()).sum();
    let trace: Vec<String> = run
        .batches
        .first()
        .map(|b| b.forward.frontier_nnz.iter().map(|x| x.to_string()).collect())
        .unwrap_or_default();
    let _ = writeln!(stats, "# vertices {} connected {} edges {}", parsed.graph.n(), n, reduced.m());
    let _ = writeln!(stats, "# batches {} batch_size {}", run.batches.len(), n_b);
    let _ = writeln!(
        stats,
        "# forward_iterations {} backward_iterations {} frontier_nnz {} product_nnz {}",
        run.forward_iterations(),
        run.backward_iterations(),
        frontier,
        product
    );
    let _ = writeln!(stats, "# first_batch_frontier_trace {}", trace.join(","));
    let _ = writeln!(stats, "# seconds {seconds} teps {}", teps(reduced.m(), n, seconds));
    Ok(())
}

/// Runs the first batch with a damaged distance table; the backward sweep
/// must reject it.
fn corrupted_batch(a: &SparseMatrix<Weight>, n_b: usize) -> Result<(), MfbcError> {
    let sources: Vec<usize> = (0..n_b).collect();
    let (t, _) = mfbf(a, &sources)?;
    let mut entries = t.t.triplets();
    let farthest = entries
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .2.w.value().total_cmp(&y.1 .2.w.value()))
        .map(|(i, _)| i);
    if let Some(i) = farthest {
        entries[i].2.w = entries[i].2.w + Weight::ONE;
        let bumped = crate::mfbc::MultpathMatrix { t: SparseMatrix::from_triplets(t.t.n_rows(), t.t.n_cols(), entries)?, ..t.clone() };
        mfbr(a, &bumped)?;
    }
    // a stored source-to-itself entry is always inconsistent
    let mut entries = t.t.triplets();
    entries.retain(|&(r, v, _)| v != t.sources[r]);
    entries.push((0, t.sources[0], Multpath::new(1.0, 1.0)));
    let diagonal = crate::mfbc::MultpathMatrix { t: SparseMatrix::from_triplets(t.t.n_rows(), t.t.n_cols(), entries)?, ..t };
    mfbr(a, &diagonal)?;
    Ok(())
}

fn cmd_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.batch_size == 0 {
        return Err(CliError::Usage("--batch-size must be positive".into()));
    }
    let parsed = args.graph.load()?;
    let g = &parsed.graph;
    let n_b = args.batch_size.min(g.n().max(1));
    let a = scoring_adjacency(g);
    if args.inject_corruption && g.n() > 0 {
        return match corrupted_batch(&a, n_b) {
            Err(e) => Err(CliError::Verification(format!("corrupted run rejected: {e}"))),
            Ok(()) => Err(CliError::Verification("corrupted run was not detected".into())),
        };
    }
    let got = mfbc_with_order(&a, n_b, &(0..g.n()).collect::<Vec<_>>()).map_err(|e| match e {
        MfbcError::StructuralInconsistency(_) => CliError::Verification(e.to_string()),
        other => data(other),
    })?;
    let reference = if g.is_weighted() { brandes(g) } else { brandes(&g.unweighted()) };
    let err = max_relative_error(got.scores.as_slice(), &reference);
    let _ = writeln!(stdout, "vertices {} edges {} batch_size {n_b}", g.n(), g.m());
    let _ = writeln!(stdout, "max relative error {err:e}");
    if err <= VERIFY_TOLERANCE {
        let _ = writeln!(stdout, "PASS");
        Ok(())
    } else {
        let _ = writeln!(stdout, "FAIL");
        Err(CliError::Verification(format!("max relative error {err:e} exceeds {VERIFY_TOLERANCE:e}")))
    }
}

fn print_estimate(stdout: &mut dyn Write, w: CostEstimate, alpha: f64, beta: f64) {
    let _ = writeln!(stdout, "messages {}", w.messages);
    let _ = writeln!(stdout, "words {}", w.words);
    let _ = writeln!(stdout, "seconds {}", w.seconds(alpha, beta));
}

fn cmd_cost(args: CostArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let usage = |s: &str| CliError::Usage(s.to_string());
    if args.p == 0 {
        return Err(usage("--p must be positive"));
    }
    if args.nnz_a.is_some() || args.nnz_b.is_some() || args.nnz_c.is_some() {
        let (Some(a), Some(b), Some(c)) = (args.nnz_a, args.nnz_b, args.nnz_c) else {
            return Err(usage("grid mode needs --nnz-a, --nnz-b and --nnz-c"));
        };
        let best = optimize_grid(a, b, c, args.p, args.alpha, args.beta).map_err(|e| usage(&e.to_string()))?;
        let _ = writeln!(stdout, "grid {}", best.grid);
        let _ = writeln!(stdout, "variant {}", best.variant);
        print_estimate(stdout, best.cost, args.alpha, args.beta);
        return Ok(());
    }
    let (Some(n), Some(m), Some(d)) = (args.n, args.m, args.d) else {
        return Err(usage("bound mode needs --n, --m and --d (or --nnz-a/--nnz-b/--nnz-c for grid mode)"));
    };
    let w = mfbc_bound(n, m, args.p, args.c, d).map_err(|e| usage(&e.to_string()))?;
    print_estimate(stdout, w, args.alpha, args.beta);
    Ok(())
}

fn random_operand(n: usize, degree: f64, seed: u64) -> Result<Graph, CliError> {
    let g = uniform_random(n, Density::Degree(degree), true, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    assign_weights(&g, 1, 8, seed).map_err(data)
}

fn ratio(simulated: f64, analytic: f64) -> String {
    if analytic == 0.0 {
        if simulated == 0.0 { "1".into() } else { "inf".into() }
    } else {
        format!("{}", simulated / analytic)
    }
}

fn cmd_simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let grid: ProcGrid = args.grid.parse().map_err(|e: crate::costmodel::CostError| CliError::Usage(e.to_string()))?;
    let variant: Variant = args.variant.parse().map_err(|e: crate::costmodel::CostError| CliError::Usage(e.to_string()))?;
    let (a_graph, b_graph) = match &args.input {
        Some(path) => {
            let g = GraphInput { input: path.clone(), directed: args.directed, weighted: args.weighted }.load()?.graph;
            (g.clone(), g)
        }
        None => (random_operand(args.n, args.degree, args.seed)?, random_operand(args.n, args.degree, args.seed.wrapping_add(1))?),
    };
    let a = scoring_adjacency(&a_graph).map(|_, _, w| Multpath::new(w.value(), 1.0));
    let b = scoring_adjacency(&b_graph);
    let config = SimConfig { seed: args.seed, link: LinkCost { alpha: args.alpha, beta: args.beta } };
    let (c, ledger) = run_variant(variant, &a, &b, grid, Algebra::bellman_ford(), &config).map_err(|e| CliError::Usage(e.to_string()))?;
    let (direct, _) = mm_general(&a, &b, Algebra::bellman_ford()).map_err(data)?;

    let _ = write!(stdout, "{}", ledger.report());
    let path = ledger.critical_path();
    let _ = writeln!(stdout, "# variant {variant} grid {grid} nnz_a {} nnz_b {} nnz_c {}", a.nnz(), b.nnz(), c.nnz());
    let _ = writeln!(stdout, "# analytic messages {} words {}", ledger.model.messages, ledger.model.words);
    let _ = writeln!(stdout, "# ratio messages {} words {}", ratio(path.messages, ledger.model.messages), ratio(path.words, ledger.model.words));
    let _ = writeln!(stdout, "# memory_words {}", ledger.memory_words);
    if c == direct {
        let _ = writeln!(stdout, "# verdict product matches direct multiply");
        Ok(())
    } else {
        let _ = writeln!(stdout, "# verdict product differs from direct multiply");
        Err(CliError::Verification("simulated product differs from direct multiply".into()))
    }
}
