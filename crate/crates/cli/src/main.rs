//! `hyperttsv` command-line front end.

mod bench;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperttsv::decomp::{cp_fit, kmeans, Adjacency, FitOptions, FitResult, Init, KMeansOptions, Laplacian};
use hyperttsv::spectral::{
    centrality, kendall_tau_b, persistence_sweep, top_k, CentralityOptions, CentralityResult, Method,
};
use hyperttsv::synth::{generate, SizeDistribution};
use hyperttsv::{Algorithm, ExecConfig, Hypergraph, Kernel, WeightScheme};

use crate::io::{load_vector, write_output, VectorSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hyperttsv::Error),

    #[error("{0}")]
    Centrality(hyperttsv::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Stable process exit codes, listed in the README.
    fn exit_code(&self) -> u8 {
        use hyperttsv::Error as E;
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Centrality(_) => 5,
            CliError::Core(e) => match e {
                E::Io(_) => 1,
                E::Parse { .. } | E::EmptyInput => 2,
                E::Capacity { .. } => 3,
                E::NumericRange { .. } => 4,
                E::NotConnected | E::NoConvergence { .. } => 5,
                E::Divergence { .. } => 6,
                E::EmptyResult { .. } => 7,
                E::InvalidArgument(_) | E::DimensionMismatch { .. } => 8,
                E::FixtureCorrupt(_) => 9,
                E::Cancelled => 10,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hyperttsv", version, about = "Tensor-times-same-vector analytics for nonuniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Contract the adjacency tensor with a vector (TTSV1) or leave two modes free (TTSV2).
    Ttsv(TtsvArgs),
    /// Time kernels across an LEQ-filtering sweep.
    Bench(bench::BenchArgs),
    /// Eigenvector centrality, or a three-way comparison with Kendall τ_B.
    Centrality(CentralityArgs),
    /// Fit a symmetric CP model and export the embedding.
    Embed(EmbedArgs),
    /// Fit a CP embedding and cluster its rows with k-means.
    Cluster(ClusterArgs),
    /// Track the top-k ranking across LEQ-filtering levels.
    Persistence(PersistenceArgs),
    /// LEQ-filter an edge list and write a JSON metadata sidecar.
    Filter(FilterArgs),
    /// Summary statistics as JSON.
    Stats(StatsArgs),
    /// Write a seeded synthetic edge list.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightArg {
    Banerjee,
    Unit,
}

impl WeightArg {
    pub fn scheme(self) -> WeightScheme {
        match self {
            WeightArg::Banerjee => WeightScheme::Banerjee,
            WeightArg::Unit => WeightScheme::Unit,
        }
    }
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Hyperedge list, one edge per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = WeightArg::Banerjee)]
    pub weights: WeightArg,
    /// Tensor order; defaults to the largest edge size.
    #[arg(long)]
    pub rank: Option<usize>,
}

impl GraphArgs {
    pub fn load(&self) -> CliResult<Hypergraph> {
        let mut h = io::read_hypergraph(&self.input)?;
        if let Some(r) = self.rank {
            h = h.with_rank(r)?;
        }
        Ok(h.with_weights(self.weights.scheme())?)
    }
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, default_value = "auto", value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Run kernels on one thread.
    #[arg(long)]
    serial: bool,
}

impl KernelArgs {
    fn kernel(&self) -> Kernel {
        let exec = if self.serial { ExecConfig::serial() } else { ExecConfig::parallel() };
        Kernel::new(self.algo).with_exec(exec)
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: hyperttsv::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: hyperttsv::Error| e.to_string())
}

#[derive(Debug, Args)]
struct TtsvArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    op: u8,
    /// `ones`, `uniform` (seeded, in (0, 1]) or `file:PATH`.
    #[arg(long, default_value = "ones", value_parser = VectorSpec::parse)]
    vector: VectorSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Let generating-function kernels run on vectors that fail the safety check.
    #[arg(long)]
    allow_unsafe: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CentralityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value = "hec", value_parser = parse_method)]
    method: Method,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// HEC diagonal shift.
    #[arg(long, default_value_t = 0.0)]
    shift: f64,
    #[arg(long, default_value_t = 10)]
    topk: usize,
    /// Run all three methods and report pairwise Kendall τ_B.
    #[arg(long)]
    compare: bool,
    /// JSON output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV output: the top-k ranking, or the τ_B table with `--compare`.
    /// Defaults to `<out>.csv` when `--out` is given.
    #[arg(long)]
    table: Option<PathBuf>,
}

impl CentralityArgs {
    fn options(&self, method: Method) -> CentralityOptions {
        let mut o = CentralityOptions::for_method(method);
        if let Some(t) = self.tol {
            o.tol = t;
        }
        o.step = self.step;
        o.max_iter = self.max_iter;
        o.shift = self.shift;
        o
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long, default_value_t = 8)]
    q: usize,
    #[arg(long, default_value_t = 2000)]
    max_steps: usize,
    #[arg(long, default_value_t = 1e-8)]
    grad_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Symmetric)]
    init: InitArg,
    /// Independent CP starts; the lowest objective wins.
    #[arg(long, default_value_t = 1)]
    fit_restarts: usize,
    /// Decompose the normalized Laplacian tensor instead of the adjacency tensor.
    #[arg(long)]
    laplacian: bool,
    /// Remove vertices that appear in more than this fraction of edges.
    #[arg(long)]
    drop_high_degree: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    Symmetric,
    Nonnegative,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    embedding_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PersistenceArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value = "hec", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 2)]
    r_min: usize,
    /// Defaults to the largest edge size.
    #[arg(long)]
    r_max: Option<usize>,
    #[arg(long, default_value_t = 5)]
    topk: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    max_size: usize,
    /// Keep vertices left without edges.
    #[arg(long)]
    keep_isolated: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Metadata sidecar; defaults to `<out>.meta.json` when `--out` is given.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// `constant:K`, `geometric:MEAN` or `histogram:W0,W1,...`.
    #[arg(long, value_parser = parse_sizes)]
    sizes: SizeDistribution,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_sizes(s: &str) -> Result<SizeDistribution, String> {
    s.parse().map_err(|e: hyperttsv::Error| e.to_string())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn cmd_ttsv(args: &TtsvArgs) -> CliResult<()> {
    let h = args.graph.load()?;
    let b = load_vector(&args.vector, &h, args.seed)?;
    let mut kernel = args.kernel.kernel();
    kernel.coeff.allow_unsafe = args.allow_unsafe;
    let labels = h.labels();
    let mut out = String::new();
    if args.op == 1 {
        out.push_str("vertex,value\n");
        for (v, y) in kernel.ttsv1(&h, &b)?.iter().enumerate() {
            out.push_str(&format!("{},{:.16e}\n", labels[v], y));
        }
    } else {
        out.push_str("u,v,value\n");
        for (u, v, y) in kernel.ttsv2(&h, &b)?.upper_entries() {
            out.push_str(&format!("{},{},{:.16e}\n", labels[u], labels[v], y));
        }
    }
    write_output(args.out.as_deref(), &out)
}

fn ranking_csv(h: &Hypergraph, scores: &[f64], k: usize) -> String {
    let mut out = String::from("rank,vertex,score\n");
    for (i, v) in top_k(scores, k).into_iter().enumerate() {
        out.push_str(&format!("{},{},{:.16e}\n", i + 1, h.labels()[v], scores[v]));
    }
    out
}

/// `5, 10, 25, 50, 100, 250, ...` below `n`, then `n`.
fn tau_levels(n: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    let mut base = 1usize;
    'outer: loop {
        for mult in [5, 10, 25] {
            let k = mult * base;
            if k >= n {
                break 'outer;
            }
            ks.push(k);
        }
        base *= 10;
    }
    ks.push(n);
    ks
}

#[derive(Serialize)]
struct TauRow {
    a: Method,
    b: Method,
    k: usize,
    tau_b: Option<f64>,
}

#[derive(Serialize)]
struct Comparison {
    results: Vec<CentralityResult>,
    kendall: Vec<TauRow>,
}

fn cmd_centrality(args: &CentralityArgs) -> CliResult<()> {
    let h = args.graph.load()?;
    let kernel = args.kernel.kernel();
    let run = |m: Method| centrality(&h, m, &kernel, &args.options(m)).map_err(CliError::Centrality);
    let (json, table) = if args.compare {
        let results = Method::ALL.iter().map(|&m| run(m)).collect::<CliResult<Vec<_>>>()?;
        let mut kendall = Vec::new();
        let mut csv = String::from("a,b,k,tau_b\n");
        for i in 0..results.len() {
            for j in i + 1..results.len() {
                for k in tau_levels(h.n()) {
                    let tau = kendall_tau_b(&results[i].scores, &results[j].scores, k);
                    csv.push_str(&format!("{},{},{},{:.16e}\n", results[i].method, results[j].method, k, tau));
                    kendall.push(TauRow { a: results[i].method, b: results[j].method, k, tau_b: tau.is_finite().then_some(tau) });
                }
            }
        }
        (to_json(&Comparison { results, kendall }), csv)
    } else {
        let result = run(args.method)?;
        let csv = ranking_csv(&h, &result.scores, args.topk);
        (to_json(&result), csv)
    };
    write_output(args.out.as_deref(), &json)?;
    let table_path = args.table.clone().or_else(|| args.out.as_deref().map(|p| sibling(p, ".csv")));
    if let Some(p) = table_path {
        write_output(Some(&p), &table)?;
    }
    Ok(())
}

fn fit_embedding(graph: &GraphArgs, kernel: &Kernel, fit: &FitArgs) -> CliResult<(Hypergraph, FitResult)> {
    let mut h = graph.load()?;
    if let Some(frac) = fit.drop_high_degree {
        h = h.drop_high_degree(frac)?.with_weights(graph.weights.scheme())?;
    }
    let opts = FitOptions {
        q: fit.q,
        max_steps: fit.max_steps,
        grad_tol: fit.grad_tol,
        seed: fit.seed,
        init: match fit.init {
            InitArg::Symmetric => Init::Symmetric,
            InitArg::Nonnegative => Init::Nonnegative,
        },
        restarts: fit.fit_restarts,
        ..FitOptions::default()
    };
    let result = if fit.laplacian {
        cp_fit(&Laplacian::new(&h, kernel.clone())?, &opts)?
    } else {
        cp_fit(&Adjacency::new(&h, kernel.clone()), &opts)?
    };
    eprintln!(
        "cp_fit: {} accepted steps, objective {:.6e}, gradient norm {:.3e}{}",
        result.history.len() - 1,
        result.history.last().copied().unwrap_or(f64::NAN),
        result.grad_norm,
        if result.converged { "" } else { " (step limit reached)" }
    );
    Ok((h, result))
}

fn cmd_embed(args: &EmbedArgs) -> CliResult<()> {
    let (h, fit) = fit_embedding(&args.graph, &args.kernel.kernel(), &args.fit)?;
    write_output(args.out.as_deref(), &fit.model.to_csv(h.labels()))
}

fn cmd_cluster(args: &ClusterArgs) -> CliResult<()> {
    let (h, fit) = fit_embedding(&args.graph, &args.kernel.kernel(), &args.fit)?;
    if let Some(p) = &args.embedding_out {
        write_output(Some(p), &fit.model.to_csv(h.labels()))?;
    }
    let km = KMeansOptions { restarts: args.restarts, seed: args.fit.seed, ..KMeansOptions::default() };
    let clusters = kmeans(&fit.model.rows(), args.k, &km)?;
    write_output(args.out.as_deref(), &clusters.to_csv(h.labels()))
}

fn cmd_persistence(args: &PersistenceArgs) -> CliResult<()> {
    let h = args.graph.load()?;
    let r_max = args.r_max.unwrap_or(h.max_edge_size());
    let table = persistence_sweep(
        &h,
        args.method,
        args.r_min,
        r_max,
        args.topk,
        &args.kernel.kernel(),
        &CentralityOptions::for_method(args.method),
    );
    write_output(args.out.as_deref(), &table.to_csv())
}

fn edge_list(h: &Hypergraph) -> String {
    let mut out = String::new();
    for edge in h.edges() {
        let ids: Vec<String> = edge.iter().map(|&v| h.labels()[v].to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

fn cmd_filter(args: &FilterArgs) -> CliResult<()> {
    let h = io::read_hypergraph(&args.input)?;
    let f = h.leq_filter(args.max_size, !args.keep_isolated)?;
    write_output(args.out.as_deref(), &edge_list(&f))?;
    let meta = args.meta.clone().or_else(|| args.out.as_deref().map(|p| sibling(p, ".meta.json")));
    if let Some(p) = meta {
        write_output(Some(&p), &to_json(&f.metadata()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Stats {
    n: usize,
    m: usize,
    r: usize,
    vol: usize,
    mean_edge_size: f64,
    max_degree: usize,
    connected: bool,
    /// `[size, count]` pairs in ascending size.
    size_histogram: Vec<[usize; 2]>,
}

fn cmd_stats(args: &StatsArgs) -> CliResult<()> {
    let h = io::read_hypergraph(&args.input)?;
    let mut hist = vec![0usize; h.max_edge_size() + 1];
    for e in h.edges() {
        hist[e.len()] += 1;
    }
    let stats = Stats {
        n: h.n(),
        m: h.m(),
        r: h.rank(),
        vol: h.volume(),
        mean_edge_size: h.volume() as f64 / h.m() as f64,
        max_degree: h.degrees().into_iter().max().unwrap_or(0),
        connected: h.is_connected(),
        size_histogram: hist.into_iter().enumerate().filter(|&(_, c)| c > 0).map(|(s, c)| [s, c]).collect(),
    };
    write_output(args.out.as_deref(), &to_json(&stats))
}

fn cmd_generate(args: &GenerateArgs) -> CliResult<()> {
    let h = generate(args.n, args.m, &args.sizes, args.seed)?;
    write_output(args.out.as_deref(), &h.to_text())
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("HT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("HT_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Ttsv(a) => cmd_ttsv(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Centrality(a) => cmd_centrality(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Persistence(a) => cmd_persistence(a),
        Command::Filter(a) => cmd_filter(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
