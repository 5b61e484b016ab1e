//! Batch experiment front end: load trees and maps, run checks and
//! certificates, emit JSON/CSV reports. Exit status 0 iff every requested
//! certificate passed; malformed inputs exit with status 2 and a
//! line/field diagnostic on stderr.

mod commands;
mod reports;

use clap::{Args, Parser, Subcommand};
use dendrodyn::parse_rat;
use dendrodyn::scalar::Rat;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "dendrodyn", version, about = "Dynamics of monotone maps on metric trees")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where a tabular form exists.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct EpsHorizon {
    /// Tolerance as an exact rational "p/q".
    #[arg(long, default_value = "1/1000000", value_parser = parse_rat_arg)]
    eps: Rat,
    /// Iteration horizon.
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
}

fn parse_rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Distances, arcs and hulls on a tree file.
    Geom {
        #[arg(long)]
        tree: PathBuf,
        /// JSON list of points.
        #[arg(long)]
        points: PathBuf,
    },
    /// Map analyses.
    Map {
        #[command(subcommand)]
        cmd: MapCmd,
    },
    /// ω-limit and recurrence report per sample point.
    Omega {
        #[arg(long)]
        map: PathBuf,
        /// JSON list of sample points.
        #[arg(long)]
        samples: PathBuf,
        #[command(flatten)]
        eh: EpsHorizon,
    },
    /// Induced-map orbits, companions, and Li-Yorke scans.
    Hyper {
        #[command(subcommand)]
        cmd: HyperCmd,
    },
    /// Adding-machine regular-recurrence certificates.
    Odometer {
        /// Digit-bound pattern, repeated cyclically to the given depth.
        #[arg(long, value_delimiter = ',', required = true)]
        base: Vec<u64>,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Star-dendrite certificates.
    Star {
        #[command(subcommand)]
        cmd: StarCmd,
    },
    /// Greedy separated-set growth curves for a tree map.
    Entropy {
        #[arg(long)]
        map: PathBuf,
        /// Optional JSON list of pool points (else a seeded random pool).
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        pool_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        /// Comma-separated rational tolerances, e.g. "1/10,1/20".
        #[arg(long, default_value = "1/10", value_delimiter = ',', value_parser = parse_rat_arg)]
        eps_list: Vec<Rat>,
    },
    /// Seeded random monotone corpus plus the full invariant suite.
    Corpus {
        #[arg(long, default_value_t = 5)]
        maps: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(long, default_value_t = 10)]
        companions: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        eh: EpsHorizon,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    /// Exact monotonicity verdict with witness.
    Check {
        #[arg(long)]
        map: PathBuf,
    },
}

#[derive(Subcommand)]
enum HyperCmd {
    /// ω-limits of hyperspace elements under the induced map.
    Orbit {
        #[arg(long)]
        map: PathBuf,
        /// JSON list of elements ({finite_set: [...]} or {subtree: [...]}).
        #[arg(long)]
        elements: PathBuf,
        /// Hyperspace: f1|f2|f3|t2|t3|c.
        #[arg(long, default_value = "f3")]
        space: String,
        #[command(flatten)]
        eh: EpsHorizon,
    },
    /// Asymptotic companion certificates.
    Companion {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        elements: PathBuf,
        #[arg(long, default_value = "f3")]
        space: String,
        #[command(flatten)]
        eh: EpsHorizon,
    },
    /// Seeded random pair scan for Li-Yorke behaviour.
    Liyorke {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "f3")]
        space: String,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        eh: EpsHorizon,
    },
}

#[derive(Subcommand)]
enum StarCmd {
    /// Scrambled-band certificate for a lambda pair.
    Chaos {
        #[arg(long, value_parser = parse_rat_arg)]
        lambda: Rat,
        #[arg(long, value_parser = parse_rat_arg)]
        lambda_prime: Rat,
        #[arg(long, default_value_t = 10)]
        alphas: usize,
        #[arg(long, default_value = "1/32", value_parser = parse_rat_arg)]
        tolerance: Rat,
        #[arg(long, default_value_t = 20)]
        depth: u64,
        #[arg(long, default_value_t = 4096)]
        horizon: u64,
        #[arg(long, default_value_t = 20)]
        n_rays: u64,
    },
    /// Separated-family certificate: all k^n branch subtrees pairwise 1/k
    /// apart under iteration.
    Entropy {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        budget: u128,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("DENDRODYN_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let csv = cli.format == Format::Csv;
    let result = match &cli.command {
        Command::Geom { tree, points } => commands::run_geom(tree, points),
        Command::Map {
            cmd: MapCmd::Check { map },
        } => commands::run_map_check(map),
        Command::Omega { map, samples, eh } => {
            commands::run_omega(map, samples, &eh.eps, eh.horizon, csv)
        }
        Command::Hyper { cmd } => match cmd {
            HyperCmd::Orbit {
                map,
                elements,
                space,
                eh,
            } => commands::run_hyper_orbit(map, elements, space, &eh.eps, eh.horizon),
            HyperCmd::Companion {
                map,
                elements,
                space,
                eh,
            } => commands::run_hyper_companion(map, elements, space, &eh.eps, eh.horizon),
            HyperCmd::Liyorke {
                map,
                space,
                pairs,
                seed,
                eh,
            } => commands::run_hyper_liyorke(map, space, *pairs, *seed, &eh.eps, eh.horizon),
        },
        Command::Odometer {
            base,
            depth,
            samples,
            seed,
        } => commands::run_odometer(base, *depth, *samples, *seed),
        Command::Star { cmd } => match cmd {
            StarCmd::Chaos {
                lambda,
                lambda_prime,
                alphas,
                tolerance,
                depth,
                horizon,
                n_rays,
            } => commands::run_star_chaos(
                lambda,
                lambda_prime,
                *alphas,
                tolerance,
                *depth,
                *horizon,
                *n_rays,
            ),
            StarCmd::Entropy { k, n, budget } => commands::run_star_entropy(*k, *n, *budget),
        },
        Command::Entropy {
            map,
            pool,
            pool_size,
            seed,
            n_max,
            eps_list,
        } => commands::run_entropy_curve(
            map,
            pool.as_deref(),
            *pool_size,
            *seed,
            *n_max,
            eps_list,
            csv,
        ),
        Command::Corpus {
            maps,
            samples,
            pairs,
            companions,
            seed,
            eh,
        } => commands::run_corpus(
            *maps,
            *samples,
            *pairs,
            *companions,
            *seed,
            &eh.eps,
            eh.horizon,
        ),
    };
    match result {
        Ok((output, passed)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &output) {
                    eprintln!("error: {}: {e}", path.display());
                    std::process::exit(2);
                }
            } else {
                print!("{output}");
            }
            std::process::exit(if passed { 0 } else { 1 });
        }
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}
