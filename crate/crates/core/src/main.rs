//! Command-line front end: `generate`, `detect`, `histogram`, `benchmark`.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use foster_flow::cli;
use foster_flow::detector::PruneSide;
use foster_flow::sbm::Method;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PruneSideArg {
    High,
    Low,
}

impl From<PruneSideArg> for PruneSide {
    fn from(v: PruneSideArg) -> Self {
        match v {
            PruneSideArg::High => PruneSide::High,
            PruneSideArg::Low => PruneSide::Low,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    FosterFlow,
    Spectral,
}

impl From<MethodArg> for Method {
    fn from(v: MethodArg) -> Self {
        match v {
            MethodArg::FosterFlow => Method::FosterFlow,
            MethodArg::Spectral => Method::Spectral,
        }
    }
}

#[derive(Parser)]
#[command(name = "foster-flow", about = "Community detection via Foster-Ricci curvature flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an SBM instance with a planted partition
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect communities in a graph file, writing a JSON result
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        eta: f64,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 15)]
        flow_iters: usize,
        #[arg(long, default_value_t = 10)]
        max_cycles: usize,
        #[arg(long, value_enum, default_value_t = PruneSideArg::High)]
        prune_side: PruneSideArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the flow only and export per-edge weight/curvature CSV
    Histogram {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 15)]
        flow_iters: usize,
        #[arg(long, default_value_t = 0.3)]
        eta: f64,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
    },
    /// Sweep SBM sizes and methods, writing a timing CSV
    Benchmark {
        /// Comma-separated node counts, e.g. 30,60,120
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0.7)]
        p_in: f64,
        #[arg(long, default_value_t = 0.07)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::FosterFlow, MethodArg::Spectral])]
        methods: Vec<MethodArg>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let args = Cli::parse();
    let code = match args.command {
        Command::Generate { n, k, p_in, p_out, seed, out } => {
            cli::cmd_generate(n, k, p_in, p_out, seed, &out)
        }
        Command::Detect { input, output, eta, epsilon, flow_iters, max_cycles, prune_side, seed } => {
            cli::cmd_detect(&input, &output, eta, epsilon, flow_iters, max_cycles, prune_side.into(), seed)
        }
        Command::Histogram { input, output, flow_iters, eta, epsilon } => {
            cli::cmd_histogram(&input, &output, flow_iters, eta, epsilon)
        }
        Command::Benchmark { n, k, p_in, p_out, seed, methods, reps, out } => {
            let methods: Vec<Method> = methods.into_iter().map(Into::into).collect();
            cli::cmd_benchmark(&n, k, p_in, p_out, seed, &methods, reps, &out)
        }
    };
    std::process::exit(code);
}
