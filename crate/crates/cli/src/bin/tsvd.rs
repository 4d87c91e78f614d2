//! `tsvd hooi ...` denoises a tensor file; `tsvd clique ...` samples, tests
//! and Gaussianizes planted-clique hypergraphs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tensor_svd::hooi::{hooi, warm_start, HooiConfig, Init, Tolerance};
use tensor_svd::io::{read_t3, write_mat, write_t3};
use tensor_svd::linalg::mode_leading_subspace;
use tensor_svd::planted_clique::{
    detect_half, embed, gaussianize, sample_hypergraph, Adjacency, Half, ReductionParams,
};
use tensor_svd::{Mode, RngStream, Role};

#[derive(Parser)]
#[command(name = "tsvd", version, about = "Tensor SVD and planted-clique tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run higher-order orthogonal iteration on a .t3 tensor.
    Hooi(HooiArgs),
    /// Planted-clique hypergraph utilities.
    #[command(subcommand)]
    Clique(CliqueCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Spectral,
    Warm,
}

#[derive(Args)]
struct HooiArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated Tucker ranks, e.g. 3,3,3.
    #[arg(long, value_parser = parse_ranks)]
    ranks: [usize; 3],
    /// Stopping tolerance relative to the Frobenius norm of the input.
    #[arg(long, default_value_t = HooiConfig::DEFAULT_RELATIVE_TOLERANCE)]
    eps: f64,
    #[arg(long, default_value_t = HooiConfig::DEFAULT_MAX_ITERS)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "spectral")]
    init: InitArg,
    /// Noiseless signal tensor whose subspaces seed the warm start.
    #[arg(long, required_if_eq("init", "warm"))]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum CliqueCommand {
    /// Draw a hypergraph with a planted clique and write its adjacency tensor.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: usize,
        /// 1 plants the clique in the first half of the vertices, 2 in the second.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        half: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report which half of the vertex set hosts the clique (1 or 2).
    Detect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: usize,
    },
    /// Map an adjacency tensor to a Gaussian tensor instance.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Truncation level M (default sqrt(8 ln N)).
        #[arg(long)]
        trunc_m: Option<f64>,
        /// Mean shift (default 1/(2M)).
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_ranks(s: &str) -> std::result::Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated ranks, got {s:?}"));
    }
    let mut ranks = [0; 3];
    for (r, part) in ranks.iter_mut().zip(&parts) {
        *r = part.parse().map_err(|e| format!("bad rank {part:?}: {e}"))?;
    }
    Ok(ranks)
}

fn run_hooi(args: &HooiArgs) -> Result<()> {
    let y = read_t3(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let mut config = HooiConfig::new(args.ranks)
        .with_tolerance(Tolerance::Relative(args.eps))
        .with_max_iters(args.max_iter);
    if let InitArg::Warm = args.init {
        let path = args.truth.as_ref().context("--init warm needs --truth")?;
        let x = read_t3(path).with_context(|| format!("reading {}", path.display()))?;
        if x.dims() != y.dims() {
            bail!("truth dims {:?} differ from input dims {:?}", x.dims(), y.dims());
        }
        let mut rng = RngStream::new(args.seed, 0).role(Role::WarmStart).sampler();
        let mut bases = Vec::with_capacity(3);
        for mode in Mode::ALL {
            let u = mode_leading_subspace(&x, mode, args.ranks[mode.index()])?;
            bases.push(warm_start(&u, &mut rng)?);
        }
        let bases: [_; 3] = bases.try_into().expect("three modes");
        config = config.with_init(Init::Provided(bases));
    }
    let result = hooi(&y, &config)?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let out = |name: &str| args.out.join(name);
    for (k, b) in result.bases().iter().enumerate() {
        write_mat(out(&format!("U{}.mat", k + 1)), b.matrix())?;
    }
    write_t3(out("core.t3"), &result.factors.core)?;
    write_t3(out("xhat.t3"), &result.reconstruction)?;
    let mut trace = String::from("iter,objective\n");
    for (t, v) in result.objective_trace.iter().enumerate() {
        writeln!(trace, "{t},{v:.17e}").unwrap();
    }
    fs::write(out("trace.csv"), trace)?;
    eprintln!(
        "hooi: {} sweeps, stop {:?}, objective {:.6e}",
        result.iters_run,
        result.stop_reason,
        result.objective_trace.last().copied().unwrap_or(0.0)
    );
    Ok(())
}

fn read_adjacency(path: &Path) -> Result<Adjacency> {
    let t = read_t3(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Adjacency::from_tensor(&t)?)
}

fn run_clique(cmd: &CliqueCommand) -> Result<()> {
    match cmd {
        CliqueCommand::Sample { n, kappa, half, seed, out } => {
            let half = if *half == 1 { Half::First } else { Half::Second };
            let mut rng = RngStream::new(*seed, 0).role(Role::Graph).sampler();
            let inst = sample_hypergraph(*n, *kappa, half, &mut rng)?;
            write_t3(out, &inst.adjacency.to_tensor())?;
            let clique: Vec<String> = inst.clique.iter().map(|v| v.to_string()).collect();
            eprintln!("clique: {}", clique.join(","));
        }
        CliqueCommand::Detect { input, n, kappa } => {
            let adj = read_adjacency(input)?;
            if adj.n() != *n {
                bail!("--n {n} does not match the {}-vertex tensor", adj.n());
            }
            let half = detect_half(&adj, *n, *kappa)?;
            println!("{}", if half == Half::First { 1 } else { 2 });
        }
        CliqueCommand::Reduce { input, out, trunc_m, mu, seed } => {
            let adj = read_adjacency(input)?;
            let defaults = ReductionParams::for_vertices(adj.n())?;
            let m = trunc_m.unwrap_or(defaults.trunc_m);
            let mu = mu.unwrap_or(1.0 / (2.0 * m));
            let params = ReductionParams::new(m, mu, defaults.target_dims)?;
            let mut rng = RngStream::new(*seed, 0).role(Role::Reduction).sampler();
            let y = gaussianize(&adj, &params, &mut rng)?;
            write_t3(out, &embed(&y, params.target_dims)?)?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Hooi(args) => run_hooi(&args),
        Command::Clique(cmd) => run_clique(&cmd),
    }
}
