use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Args;

use hyperttsv::{Algorithm, Error, ExecConfig, Hypergraph, Kernel, StopFlag, Watchdog};

use crate::io::write_output;
use crate::{CliError, CliResult, GraphArgs};

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 2)]
    r_min: usize,
    /// Defaults to the largest edge size.
    #[arg(long)]
    r_max: Option<usize>,
    /// Per-cell timeout.
    #[arg(long, default_value_t = 3600.0)]
    timeout_secs: f64,
    #[arg(long, value_delimiter = ',', default_value = "explicit,ordered,unordered,genfn", value_parser = crate::parse_algorithm)]
    algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    op: u8,
    /// Time each edge-size bucket separately.
    #[arg(long)]
    per_edge: bool,
    #[arg(long)]
    serial: bool,
    /// Dataset name in the output; defaults to the input file stem.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Timeout,
    OomGuard,
    Error,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::OomGuard => "oom-guard",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
struct BenchRecord {
    dataset: String,
    algorithm: Algorithm,
    op: u8,
    r: usize,
    edge_size: Option<usize>,
    wall_ns: Option<u128>,
    status: Status,
}

impl BenchRecord {
    fn csv_row(&self, per_edge: bool) -> String {
        let mut row = format!("{},{},ttsv{},{}", self.dataset, self.algorithm, self.op, self.r);
        if per_edge {
            row.push_str(&format!(",{}", self.edge_size.map(|s| s.to_string()).unwrap_or_default()));
        }
        let wall = self.wall_ns.map(|w| w.to_string()).unwrap_or_default();
        row.push_str(&format!(",{},{}\n", wall, self.status.name()));
        row
    }
}

fn time_kernel(h: &Hypergraph, algorithm: Algorithm, op: u8, timeout: Duration, parallel: bool) -> (Option<u128>, Status) {
    let stop = StopFlag::new();
    let exec = if parallel { ExecConfig::parallel() } else { ExecConfig::serial() };
    let kernel = Kernel::new(algorithm).with_exec(exec.with_stop(stop.clone()));
    let b = vec![1.0; h.n()];
    let _dog = Watchdog::arm(stop, timeout);
    let start = Instant::now();
    let outcome = if op == 1 { kernel.ttsv1(h, &b).map(|_| ()) } else { kernel.ttsv2(h, &b).map(|_| ()) };
    let wall = start.elapsed().as_nanos();
    match outcome {
        Ok(()) => (Some(wall), Status::Ok),
        Err(Error::Cancelled) => (None, Status::Timeout),
        Err(Error::Capacity { .. }) => (None, Status::OomGuard),
        Err(_) => (None, Status::Error),
    }
}

/// Edges of one size, kept at tensor order `r`.
fn size_bucket(h: &Hypergraph, size: usize, r: usize) -> hyperttsv::Result<Hypergraph> {
    let edges: Vec<Vec<usize>> = h.edges().iter().filter(|e| e.len() == size).cloned().collect();
    Hypergraph::new(h.n(), edges)?.with_rank(r)?.with_weights(h.scheme().clone())
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    if !(args.timeout_secs >= 0.0 && args.timeout_secs.is_finite()) {
        return Err(CliError::Usage(format!("--timeout-secs must be finite and non-negative, got {}", args.timeout_secs)));
    }
    let timeout = Duration::from_secs_f64(args.timeout_secs);
    let h = args.graph.load()?;
    let dataset = args.dataset.clone().unwrap_or_else(|| {
        args.graph.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
    });
    let r_max = args.r_max.unwrap_or(h.max_edge_size());
    let mut out = String::from("dataset,algorithm,op,r,");
    if args.per_edge {
        out.push_str("edge_size,");
    }
    out.push_str("wall_ns,status\n");
    for r in args.r_min..=r_max {
        let filtered = h.leq_filter(r, false).and_then(|f| f.with_rank(r)).and_then(|f| f.with_weights(h.scheme().clone()));
        let sizes: Vec<usize> = match &filtered {
            Ok(f) if args.per_edge => {
                let mut s: Vec<usize> = f.edges().iter().map(Vec::len).collect();
                s.sort_unstable();
                s.dedup();
                s
            }
            _ => vec![0],
        };
        for &algorithm in &args.algos {
            for &size in &sizes {
                let cell = match &filtered {
                    Ok(f) if args.per_edge => size_bucket(f, size, r),
                    Ok(f) => Ok(f.clone()),
                    Err(e) => Err(Error::InvalidArgument(e.to_string())),
                };
                let (wall_ns, status) = match cell {
                    Ok(g) => time_kernel(&g, algorithm, args.op, timeout, !args.serial),
                    Err(_) => (None, Status::Error),
                };
                let record = BenchRecord {
                    dataset: dataset.clone(),
                    algorithm,
                    op: args.op,
                    r,
                    edge_size: (args.per_edge && size > 0).then_some(size),
                    wall_ns,
                    status,
                };
                out.push_str(&record.csv_row(args.per_edge));
            }
        }
    }
    write_output(args.out.as_deref(), &out)
}
