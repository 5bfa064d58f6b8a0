use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use falforge::error::Error;
use falforge::io::{canonical_json, NerveFile};
use falforge::nerve::generate;
use falforge::packing::{Geometry, PackingError};
use falforge::par::Execution;
use falforge::pipeline::{self, PipelineConfig};

#[derive(Parser)]
#[command(name = "falforge", version, about = "Circle packings, scooped manifolds and fully augmented links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and lay out the circle packing of a nerve.
    Pack(Common),
    /// Pack, scoop and draw the fully augmented link.
    Build(Common),
    /// Build, then plan Dehn fillings and certify them.
    Plan(Common),
    /// Write SVG drawings only.
    Render(Common),
    /// Write a sample nerve file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_geometry)]
    geometry: Option<Geometry>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long = "bigR", allow_negative_numbers = true)]
    big_r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Leave strand components unmerged.
    #[arg(long)]
    no_reduce: bool,
    /// Also write SVG drawings.
    #[arg(long)]
    render: bool,
    /// Run the solver on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sample {
    Tetrahedron,
    Octahedron,
    Torus,
    Genus2,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    base: Sample,
    /// Random face splits and edge flips applied to the base, seeded by
    /// FALFORGE_SEED.
    #[arg(long, default_value_t = 0)]
    grow: usize,
    #[arg(long)]
    out: PathBuf,
}

fn parse_geometry(s: &str) -> Result<Geometry, String> {
    s.parse()
}

impl Common {
    fn config(&self) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(&self.input, &self.out);
        cfg.geometry = self.geometry;
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        cfg.epsilon = self.epsilon;
        cfg.big_r = self.big_r;
        cfg.delta = self.delta;
        cfg.reduce = !self.no_reduce;
        cfg.render = self.render;
        cfg.execution = if self.sequential { Execution::Sequential } else { Execution::Parallel };
        cfg
    }
}

fn seed() -> Result<u64, Error> {
    match std::env::var("FALFORGE_SEED") {
        Ok(s) => {
            s.trim().parse().map_err(|_| Error::Validation(format!("FALFORGE_SEED must be an integer, got {s:?}")))
        }
        Err(_) => Ok(0),
    }
}

fn generate_nerve(args: &GenerateArgs) -> Result<Vec<PathBuf>, Error> {
    let base = match args.base {
        Sample::Tetrahedron => generate::tetrahedron(),
        Sample::Octahedron => generate::octahedron(),
        Sample::Torus => generate::torus7(),
        Sample::Genus2 => generate::genus2(),
    };
    let nerve =
        if args.grow > 0 { generate::grow(&base, args.grow, &mut ChaCha8Rng::seed_from_u64(seed()?)) } else { base };
    let text = canonical_json(&NerveFile::from_nerve(&nerve, None))
        .map_err(|e| Error::Validation(format!("serialization failed: {e}")))?;
    std::fs::write(&args.out, text).map_err(|source| Error::Io { path: args.out.display().to_string(), source })?;
    Ok(vec![args.out.clone()])
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    match cli.command {
        Command::Pack(c) => pipeline::cmd_pack(&c.config()),
        Command::Build(c) => pipeline::cmd_build(&c.config()),
        Command::Plan(c) => pipeline::cmd_plan(&c.config()),
        Command::Render(c) => pipeline::cmd_render(&c.config()),
        Command::Generate(g) => generate_nerve(&g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(written) => {
            for p in written {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("falforge: {e}");
            if let Error::Packing(PackingError::NonConvergence { trace, .. }) = &e {
                for (sweep, residual) in trace {
                    eprintln!("  sweep {sweep}: residual {residual:e}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
