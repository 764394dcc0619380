use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pndil::Tolerances;
use pndil_cli::{commands, doc, CliError, Output, RunConfig};

/// Certification, dilation and von Neumann checks for commuting contraction
/// tuples. Every flag can also be set through the environment variable named
/// in its help text.
#[derive(Parser, Debug)]
#[command(name = "pndil", version)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Degree cap N of the truncated Hardy space.
    #[arg(long, global = true, env = "PNDIL_CAP", default_value_t = 12)]
    cap: usize,
    /// Torus grid points per variable.
    #[arg(long, global = true, env = "PNDIL_GRID", default_value_t = 32)]
    grid: usize,
    /// Grid points per real axis when sampling the variety.
    #[arg(long, global = true, env = "PNDIL_VARIETY_GRID", default_value_t = 17)]
    variety_grid: usize,
    /// Polydisc radius for interior variety samples.
    #[arg(long, global = true, env = "PNDIL_RADIUS", default_value_t = 0.95)]
    radius: f64,
    #[arg(long, global = true, env = "PNDIL_TOL_CERT", default_value_t = Tolerances::default().cert)]
    tol_cert: f64,
    #[arg(long, global = true, env = "PNDIL_TOL_VN", default_value_t = Tolerances::default().vn)]
    tol_vn: f64,
    #[arg(long, global = true, env = "PNDIL_TOL_EIG", default_value_t = Tolerances::default().eig)]
    tol_eig: f64,
    #[arg(long, global = true, env = "PNDIL_TOL_ROOT", default_value_t = Tolerances::default().root)]
    tol_root: f64,
    #[arg(long, global = true, env = "PNDIL_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true, env = "PNDIL_OUT")]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            cap: self.cap,
            grid: self.grid,
            variety_grid: self.variety_grid,
            radius: self.radius,
            tolerances: Tolerances {
                cert: self.tol_cert,
                vn: self.tol_vn,
                eig: self.tol_eig,
                root: self.tol_root,
                ..Tolerances::default()
            },
            seed: self.seed,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a tuple's class certificate and report each condition.
    Certify { input: PathBuf },
    /// Build the generating unitary and emit its transfer realization.
    Dilate { input: PathBuf },
    /// Run the dilation identity suite.
    Verify { input: PathBuf },
    /// Check the von Neumann inequality for a polynomial read from a file.
    Vn {
        input: PathBuf,
        #[arg(long)]
        poly: PathBuf,
    },
    /// Sample the distinguished variety.
    Variety { input: PathBuf },
    /// Emit example tuples or polynomials.
    #[command(subcommand)]
    Generate(Generate),
}

#[derive(Subcommand, Debug)]
enum Generate {
    /// `(T₁, T₂, T₁^j T₂^k)` on a scaled Jordan pair, with its certificate.
    ProductTriple {
        #[arg(long, default_value_t = 2)]
        d1: usize,
        #[arg(long, default_value_t = 2)]
        d2: usize,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Seeded commuting tuple of polynomials in one matrix (no certificate).
    RandomTuple {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
    },
    /// Seeded random polynomial in the text grammar accepted by `vn`.
    Poly {
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let cfg = cli.run.config();
    cfg.validate()?;
    match &cli.command {
        Command::Certify { input } => commands::certify(input, &cfg),
        Command::Dilate { input } => commands::dilate(input, &cfg),
        Command::Verify { input } => commands::verify(input, &cfg),
        Command::Vn { input, poly } => commands::vn(input, poly, &cfg),
        Command::Variety { input } => commands::variety(input, &cfg),
        Command::Generate(Generate::ProductTriple { d1, d2, r, j, k }) => {
            commands::generate_product_triple(*d1, *d2, *r, *j, *k, &cfg)
        }
        Command::Generate(Generate::RandomTuple { dim, n, margin }) => {
            commands::generate_random_tuple(*dim, *n, *margin, &cfg)
        }
        Command::Generate(Generate::Poly { vars, degree }) => commands::generate_poly(*vars, *degree, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        doc::emit(&out.text, cli.run.out.as_deref())?;
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pndil: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
