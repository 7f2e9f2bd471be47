mod commands;
mod config;
mod render;
mod replay;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mukai_forge::num::{parse_rat, Rat};
use mukai_forge::MukaiVector;

use config::Config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] mukai_forge::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "mukai-forge", version, about = "Exact Mukai-lattice computations")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// JSON file with extra surfaces, families and isometry words.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mukai pairing and squares.
    Pair(PairArgs),
    /// Build an isometry and query it.
    Isometry(IsometryArgs),
    #[command(subcommand)]
    Charge(ChargeCmd),
    #[command(subcommand)]
    Walls(WallsCmd),
    #[command(subcommand)]
    Ku(KuCmd),
    #[command(subcommand)]
    Atlas(AtlasCmd),
    /// Re-run the shipped case files and compare exactly.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct Degree {
    #[arg(long)]
    pub degree: Option<u32>,
    /// Surface defined in the config file.
    #[arg(long)]
    pub surface: Option<String>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub degree: Degree,
    #[arg(long, allow_hyphen_values = true, value_parser = vector)]
    pub v: MukaiVector,
    #[arg(long, allow_hyphen_values = true, value_parser = vector)]
    pub w: Option<MukaiVector>,
}

#[derive(Debug, Args)]
pub struct IsometryArgs {
    /// Generator name, configured word, or generators joined by ';'.
    #[arg(long)]
    pub name: String,
    #[command(flatten)]
    pub degree: Degree,
    #[arg(long, allow_hyphen_values = true, value_parser = vector)]
    pub apply: Option<MukaiVector>,
    #[arg(long)]
    pub fixed_lattice: bool,
    /// Search for the order up to this power.
    #[arg(long)]
    pub order: Option<u32>,
    /// Restrict to the orthogonal complement of this fixed vector.
    #[arg(long, allow_hyphen_values = true, value_parser = vector)]
    pub perp: Option<MukaiVector>,
}

#[derive(Debug, Subcommand)]
pub enum ChargeCmd {
    /// The (x, y) fixed by an isometry.
    FixedPair {
        #[arg(long)]
        isometry: String,
        #[command(flatten)]
        degree: Degree,
    },
    /// Z_{x,y}(v) = (Re, Im).
    Eval {
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        x: Rat,
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        y: Rat,
        #[arg(long, allow_hyphen_values = true, value_parser = vector)]
        vector: MukaiVector,
        #[command(flatten)]
        degree: Degree,
    },
    /// Spherical classes with Z on the non-positive real axis.
    Obstruction {
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        x: Rat,
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        y: Rat,
        #[command(flatten)]
        degree: Degree,
        #[arg(long = "box", default_value_t = 64)]
        bx: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Abstract,
}

#[derive(Debug, Subcommand)]
pub enum WallsCmd {
    /// Numerical walls for a target vector along a family.
    Find {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true, value_parser = vector)]
        vector: MukaiVector,
        /// Defaults to the family's own degree.
        #[arg(long)]
        degree: Option<u32>,
        /// Parameter range lo:hi.
        #[arg(long, allow_hyphen_values = true, value_parser = range)]
        t: (Rat, Rat),
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Hyperbolic lattice at t0 and its wall type.
    Hw {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true, value_parser = vector)]
        vector: MukaiVector,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long, allow_hyphen_values = true, value_parser = rational)]
        t0: Rat,
    },
}

#[derive(Debug, Subcommand)]
pub enum KuCmd {
    /// Vectors with a given forgetful image.
    Fiber {
        #[arg(long)]
        lattice: String,
        /// Class a,b in the lattice's basis.
        #[arg(long, allow_hyphen_values = true, value_parser = pair_of_ints)]
        target: (i64, i64),
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, allow_hyphen_values = true, default_value_t = -2)]
        square_min: i64,
    },
    Forg {
        #[arg(long)]
        lattice: String,
        #[arg(long, allow_hyphen_values = true, value_parser = vector)]
        vector: MukaiVector,
    },
    Inf {
        #[arg(long)]
        lattice: String,
        #[arg(long, allow_hyphen_values = true, value_parser = pair_of_ints)]
        class: (i64, i64),
    },
    /// Check the forgetful/inflation identities on random vectors.
    Verify {
        /// qds, gm1, gm2 or all.
        #[arg(long, default_value = "all")]
        lattice: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum AtlasCmd {
    /// (d, n) with O_d^{2n} = I.
    Rotations {
        #[arg(long, default_value_t = 50)]
        dmax: u32,
        #[arg(long, default_value_t = 12)]
        nmax: u32,
    },
    /// Degree-10 twist involution triples.
    Fibonacci {
        #[arg(long, default_value_t = 10)]
        nmax: u32,
    },
    /// x² + y² + 1 = t·x·y.
    Vieta {
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    Og10,
    /// Involution test for the twist in (a, bH, c).
    Twist {
        #[arg(long)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, allow_hyphen_values = true)]
        c: i64,
        #[arg(long)]
        d: u32,
    },
    /// Closed-form fixed pair of the n-th family member next to the solver's.
    FamilyPair {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// all, qds, gm, atlas, or a case id.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Directory of case files.
    #[arg(long)]
    pub cases: Option<PathBuf>,
}

fn vector(s: &str) -> Result<MukaiVector, String> {
    s.parse().map_err(|e: mukai_forge::Error| e.to_string())
}

fn rational(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn range(s: &str) -> Result<(Rat, Rat), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    Ok((rational(lo)?, rational(hi)?))
}

fn pair_of_ints(s: &str) -> Result<(i64, i64), String> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let (a, b) = t.split_once(',').ok_or_else(|| format!("expected a,b, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Output of one invocation.
pub struct Report {
    pub json: serde_json::Value,
    pub text: String,
    pub code: u8,
}

impl Report {
    pub fn ok(json: serde_json::Value) -> Self {
        let text = render::text(&json);
        Report { json, text, code: 0 }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MUKAI_FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("MUKAI_FORGE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    commands::run(&cli.command, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|()| execute(&cli));
    match outcome {
        Ok(rep) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&rep.json).expect("serializable") + "\n",
                Format::Text => rep.text,
            };
            // a closed pipe (e.g. `| head`) is not an error worth a panic
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(rep.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
