use std::path::PathBuf;
use std::process::ExitCode;

use affine_flow::suite::{format_table, Suite};
use affine_flow::{make_ellipse, make_random_body, FunctionalRecord, RandomBodySpec};
use clap::{ArgGroup, Parser, Subcommand};

mod config;
mod simulate;

#[derive(Parser)]
#[command(name = "affine-flow", version, about = "Affine normal flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a TOML config.
    Simulate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Print the functionals of one body as JSON.
    #[command(group(ArgGroup::new("body").required(true).args(["ellipse", "random"])))]
    Functionals {
        /// Semi-axes and optional rotation, e.g. `2,0.5` or `2,0.5,0.3`.
        #[arg(long, value_name = "A,B[,ROT]", value_parser = parse_ellipse)]
        ellipse: Option<(f64, f64, f64)>,
        /// Seed and optional harmonic cutoff, decay and amplitude.
        #[arg(long, value_name = "SEED[,K,DECAY,AMP]", value_parser = parse_random)]
        random: Option<RandomBodySpec>,
        /// Keep the random perturbation at full amplitude even if it breaks convexity.
        #[arg(long, requires = "random")]
        no_halving: bool,
        #[arg(long, default_value_t = affine_flow::spectral::DEFAULT_GRID)]
        grid: usize,
    },
    /// Run an acceptance suite and print a pass/fail table.
    Verify {
        /// exact-solutions, identities, monotonicity, convergence or all
        suite: String,
    },
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

fn parse_ellipse(s: &str) -> Result<(f64, f64, f64), String> {
    match numbers(s)?.as_slice() {
        [a, b] => Ok((*a, *b, 0.0)),
        [a, b, rot] => Ok((*a, *b, *rot)),
        _ => Err("expected A,B or A,B,ROT".into()),
    }
}

fn parse_random(s: &str) -> Result<RandomBodySpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let seed = parts[0]
        .parse::<u64>()
        .map_err(|e| format!("seed {:?}: {e}", parts[0]))?;
    let mut spec = RandomBodySpec {
        seed,
        ..RandomBodySpec::default()
    };
    match parts.len() {
        1 => {}
        4 => {
            spec.max_harmonic = parts[1]
                .parse()
                .map_err(|e| format!("max harmonic {:?}: {e}", parts[1]))?;
            let rest = numbers(&parts[2..].join(","))?;
            spec.decay = rest[0];
            spec.amplitude = rest[1];
        }
        _ => return Err("expected SEED or SEED,K,DECAY,AMP".into()),
    }
    Ok(spec)
}

fn functionals(
    ellipse: Option<(f64, f64, f64)>,
    random: Option<RandomBodySpec>,
    no_halving: bool,
    grid: usize,
) -> ExitCode {
    let body = match (ellipse, random) {
        (Some((a, b, rot)), _) => make_ellipse(a, b, rot, grid),
        (None, Some(spec)) => make_random_body(
            &RandomBodySpec {
                halving: !no_halving,
                ..spec
            },
            grid,
        ),
        (None, None) => unreachable!("clap requires one body"),
    };
    match body {
        Ok(body) => {
            let record = FunctionalRecord::from_body(0.0, &body, 0.0, 0.0);
            match serde_json::to_string_pretty(&record) {
                Ok(json) => {
                    println!("{json}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("invalid body: {e}");
            ExitCode::from(2)
        }
    }
}

fn verify(name: &str) -> ExitCode {
    let suite: Suite = match name.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let reports = suite.run();
    print!("{}", format_table(&reports));
    let passed = reports.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} criteria passed ({suite})", reports.len());
    if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Simulate { config } => simulate::simulate(&config),
        Command::Functionals {
            ellipse,
            random,
            no_halving,
            grid,
        } => functionals(ellipse, random, no_halving, grid),
        Command::Verify { suite } => verify(&suite),
    }
}
