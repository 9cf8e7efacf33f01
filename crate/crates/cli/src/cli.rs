use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "mhessian",
    version,
    about = "Complex m-Hessian energies and inequality checks on the unit ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random choice (sampling, seeded families).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here (defaults to stdout, or to $MHESSIAN_OUT_DIR/<command>.json).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Also write the sweep rows as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Dims {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
}

#[derive(Args, Debug, Clone)]
pub struct FunctionArgs {
    /// Catalog member.
    #[arg(long = "fn", default_value = "quadratic_exhaustion")]
    pub function: String,
    #[arg(long, default_value_t = 2)]
    pub j: u32,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3.0)]
    pub beta: f64,
    /// Smoothing width of the max.
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    /// Coefficients c_1,c_2,... of sum c_i (|z|^{2i} - 1).
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Complex Hessian, its spectrum and the H_m density at one point.
    Hessian {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        function: FunctionArgs,
        /// Real coordinates x1,y1,x2,y2,...; a seeded point when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
    },
    /// (p,m)-energy.
    Energy {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        function: FunctionArgs,
        /// Use Monte Carlo even for radial members.
        #[arg(long)]
        monte_carlo: bool,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// L^q norm.
    Lqnorm {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        q: f64,
    },
    /// Check one inequality.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Counterexample ladders.
    Examples {
        #[arg(value_parser = ["ex1", "ex2", "ex3"])]
        which: String,
        #[command(flatten)]
        dims: Dims,
        /// A single member; the default sweep is 2,4,8,16.
        #[arg(long)]
        j: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        /// Also track the L^q norm (first family only).
        #[arg(long)]
        q: Option<f64>,
    },
    /// Finite/divergent L^q classification and the flip exponent.
    Integrability {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        function: FunctionArgs,
        /// Largest q probed, as a multiple of n m / (n - m).
        #[arg(long, default_value_t = 1.5)]
        span: f64,
        #[arg(long, default_value_t = 12)]
        points: usize,
    },
    /// The full acceptance battery.
    Suite,
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// e_{p,l}(u)^{1/(p+l)} against C e_{p,k}(u)^{1/(p+k)} for l < k.
    Poincare {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
    },
    /// L^q norm against the (p,m)-energy.
    Sobolev {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        q: f64,
        /// Judge against the empirical supremum over this many seeded members instead.
        #[arg(long)]
        family: Option<usize>,
    },
    /// Mixed energies against the product of individual energies, over a fixed radial family.
    Hoelder {
        #[command(flatten)]
        dims: Dims,
    },
    /// m-capacity of a ball, optionally with the volume-capacity sweep.
    Capacity {
        #[command(flatten)]
        dims: Dims,
        /// Ball radius.
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        r: f64,
        /// Also sweep V / cap^alpha over shrinking balls.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Capacity of the sets {u < -s} against the energy of u.
    Sublevel {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 6)]
        rungs: usize,
    },
    /// Homogeneity and the quasi-triangle inequality of e_{p,m}^{1/(p+m)}.
    Quasinorm {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 20)]
        triples: usize,
    },
}
