use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyzono::hardness::{
    bench_bipartize, bipartization_brute, bipartization_via_pz, chebyshev_report,
    prop2_counterexample,
};
use polyzono::intersect::{check_halfspace, CheckOptions, Outcome};
use polyzono::io::{read_graph, read_halfspace, read_set};
use polyzono::oracles::{corner_min, grid_min};
use polyzono::overapprox::{contraction_factor, error_bound};
use polyzono::plot::{plot, write_plot, PlotDepth, PlotOptions};
use polyzono::splitting::{leaf_cap_from_env, SplitStrategy};
use polyzono::{PzError, Result};

#[derive(Parser)]
#[command(
    name = "pz",
    version,
    about = "Polynomial zonotope halfspace checks, oracles and plots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a set intersects a halfspace.
    Check(CheckArgs),
    /// Plot leaf enclosures of a split tree as SVG and CSV.
    Plot(PlotArgs),
    /// Minimum of a set along a direction by corner or grid enumeration.
    Oracle(OracleArgs),
    /// Print size and convergence figures for a set.
    Info {
        #[arg(long)]
        set: PathBuf,
    },
    #[command(subcommand)]
    Bench(Bench),
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Cyclic,
    Maxnorm,
}

impl From<Strategy> for SplitStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Cyclic => SplitStrategy::Cyclic,
            Strategy::Maxnorm => SplitStrategy::MaxExponentNorm,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    halfspace: PathBuf,
    #[arg(long, value_enum, default_value = "cyclic")]
    strategy: Strategy,
    #[arg(long, default_value_t = 4096)]
    max_splits: usize,
    /// Member points sampled per node, the center included.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    set: PathBuf,
    /// Two 0-based coordinates to plot, e.g. "0,1".
    #[arg(long, default_value = "0,1")]
    dims: String,
    /// Full cyclic rounds.
    #[arg(long, conflicts_with = "splits")]
    depth: Option<usize>,
    /// Splits per branch, for partial rounds.
    #[arg(long)]
    splits: Option<usize>,
    #[arg(long, value_enum, default_value = "cyclic")]
    strategy: Strategy,
    /// Output path without extension; `.svg` and `.csv` are appended.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMethod {
    Corners,
    Grid,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    set: PathBuf,
    /// Comma-separated direction, e.g. "1,1".
    #[arg(long, allow_hyphen_values = true)]
    direction: String,
    #[arg(long, value_enum, default_value = "grid")]
    method: OracleMethod,
    /// Grid points per factor.
    #[arg(long, default_value_t = 101)]
    points: usize,
}

#[derive(Subcommand)]
enum Bench {
    /// Compare the bilinear-set bipartization number with brute force.
    Bipartize {
        /// Random graphs: vertex count, edge probability, seed.
        #[arg(long, num_args = 3, value_names = ["N", "P", "SEED"], required_unless_present = "graph")]
        random: Option<Vec<String>>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// A single graph file instead of random graphs.
        #[arg(long, conflicts_with = "random")]
        graph: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Error bound and range of odd Chebyshev polynomials.
    Chebyshev {
        #[arg(long)]
        max_order: usize,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Enclosure of {α²} before and after one split.
    Prop2,
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| PzError::Representation(format!("{what}: cannot parse {t:?}")))
        })
        .collect()
}

fn check(a: CheckArgs) -> Result<(Value, bool)> {
    let pz = read_set(&a.set)?;
    let hs = read_halfspace(&a.halfspace)?;
    let opts = CheckOptions {
        strategy: a.strategy.into(),
        max_splits: a.max_splits,
        samples_per_node: a.samples as usize,
        seed: a.seed,
    };
    let verdict = check_halfspace(&pz, &hs, opts)?;
    let exhausted = verdict.outcome == Outcome::Exhausted;
    Ok((
        serde_json::to_value(verdict).expect("verdict serializes"),
        exhausted,
    ))
}

fn plot_cmd(a: PlotArgs) -> Result<Value> {
    let pz = read_set(&a.set)?;
    let dims: Vec<usize> = parse_list("--dims", &a.dims)?;
    let [d0, d1] = dims[..] else {
        return Err(PzError::Representation(
            "--dims: expected two indices".into(),
        ));
    };
    let depth = match a.splits {
        Some(s) => PlotDepth::Splits(s),
        None => PlotDepth::Rounds(a.depth.unwrap_or(0)),
    };
    let opts = PlotOptions {
        dims: (d0, d1),
        depth,
        strategy: a.strategy.into(),
        samples: a.samples,
        seed: a.seed,
        leaf_cap: leaf_cap_from_env()?,
    };
    let art = plot(&pz, &opts)?;
    let svg = a.out.with_extension("svg");
    let csv = a.out.with_extension("csv");
    write_plot(&art, &svg, &csv)?;
    Ok(json!({
        "svg": svg,
        "csv": csv,
        "depth": art.depth,
        "leaf_count": art.leaf_count,
        "initial_dep_norm": art.initial_dep_norm,
        "max_residual": art.max_residual,
    }))
}

fn oracle(a: OracleArgs) -> Result<Value> {
    let pz = read_set(&a.set)?;
    let d: Vec<f64> = parse_list("--direction", &a.direction)?;
    let (proj, kept) = pz.scalar_project_tracked(&d)?;
    // report argmin over the input's factors; factors that drop out of the
    // projection do not affect the value
    let lift = |alpha: &[f64]| {
        let mut full = vec![0.0; pz.factor_count()];
        for (&k, &a) in kept.iter().zip(alpha) {
            full[k] = a;
        }
        full
    };
    Ok(match a.method {
        OracleMethod::Corners => {
            let m = corner_min(&proj)?;
            json!({"min": m.value, "argmin": lift(&m.argmin), "method": "corners"})
        }
        OracleMethod::Grid => {
            let m = grid_min(&proj, a.points)?;
            json!({
                "min": m.value,
                "argmin": lift(&m.argmin),
                "method": "grid",
                "points": a.points,
                "spacing": m.spacing,
                "resolution": m.resolution,
            })
        }
    })
}

fn info(set: PathBuf) -> Result<Value> {
    let pz = read_set(&set)?;
    Ok(json!({
        "dep_norm": error_bound(&pz),
        "rho": contraction_factor(&pz).ok(),
        "h": pz.term_count(),
        "r": pz.factor_count(),
        "q": pz.indep_count(),
        "n": pz.dim(),
    }))
}

fn bench(b: Bench) -> Result<Value> {
    let Bench::Bipartize {
        random,
        count,
        graph,
    } = b;
    if let Some(path) = graph {
        let g = read_graph(&path)?;
        let via_pz = bipartization_via_pz(&g)?;
        let brute = bipartization_brute(&g)?;
        return Ok(json!({
            "n": g.vertex_count(),
            "edges": g.edge_count(),
            "via_pz": via_pz,
            "brute": brute,
            "agree": via_pz == brute,
        }));
    }
    let r = random.expect("clap requires --random without --graph");
    let n: usize = parse_list("--random N", &r[0])?[0];
    let p: f64 = parse_list("--random P", &r[1])?[0];
    let seed: u64 = parse_list("--random SEED", &r[2])?[0];
    let report = bench_bipartize(n, p, seed, count)?;
    Ok(serde_json::to_value(report).expect("bench serializes"))
}

fn demo(d: Demo) -> Result<Value> {
    Ok(match d {
        Demo::Chebyshev { max_order, points } => {
            json!({"rows": chebyshev_report(max_order, points)?})
        }
        Demo::Prop2 => serde_json::to_value(prop2_counterexample()).expect("report serializes"),
    })
}

fn run(cli: Cli) -> Result<(Value, bool)> {
    match cli.command {
        Command::Check(a) => check(a),
        Command::Plot(a) => plot_cmd(a).map(|v| (v, false)),
        Command::Oracle(a) => oracle(a).map(|v| (v, false)),
        Command::Info { set } => info(set).map(|v| (v, false)),
        Command::Bench(b) => bench(b).map(|v| (v, false)),
        Command::Demo(d) => demo(d).map(|v| (v, false)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((value, exhausted)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            if exhausted {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("pz: {e}");
            ExitCode::from(2)
        }
    }
}
