use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use contagg::Complex64;

#[derive(Debug, Parser)]
#[command(name = "contagg", version, about = "Closed-form aggregation of odd-cycle and mobius-cycle inequalities")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `json` or `csv` to pick a format on stdout, otherwise a file path
    /// (format taken from its extension)
    #[arg(long, global = true, value_name = "FORMAT|PATH")]
    pub out: Option<String>,

    /// Leave the timestamp out of the report
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Seed for sampling steps; defaults to $CONTAGG_SEED, then 0
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Odd-walk potential of a graph (maximum independent set)
    MisPotential(MisArgs),
    /// Mobius potential of a 3-CNF formula
    SatPotential(SatArgs),
    /// Check a sum-of-squares certificate
    VerifyCert(CertArgs),
    /// Exponential superposition of 1/s (or 1/s^2) over a sweep
    ApproxRecip(RecipArgs),
    /// Brute-force ground truth
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Lift a base-graph inequality to a subdivision
    LiftIneq(LiftArgs),
    /// Classify a chain of clauses and derive its inequalities
    ClassifyChain(ChainArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Auto,
    Direct,
    Spectral,
    Ps,
}

#[derive(Debug, Args)]
pub struct MisArgs {
    /// DIMACS edge file
    pub graph: PathBuf,
    /// Complex parameter `re,im` (or just `re`); repeatable
    #[arg(long, required = true, value_parser = parse_complex)]
    pub z: Vec<Complex64>,
    /// Point file (whitespace/comma separated or a JSON array) or `zero`
    #[arg(long, default_value = "zero")]
    pub w: String,
    #[arg(long)]
    pub grad: bool,
    #[arg(long)]
    pub hess: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct SatArgs {
    /// DIMACS CNF file
    pub formula: PathBuf,
    #[arg(long, required = true, value_parser = parse_complex)]
    pub z: Vec<Complex64>,
    /// Point file or `zero`
    #[arg(long, default_value = "zero")]
    pub x: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Exact,
    Numeric,
}

#[derive(Debug, Args)]
pub struct CertArgs {
    /// Certificate JSON
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub strategy: StrategyArg,
    /// Numeric acceptance threshold on |residual|
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Numeric sample count
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Recip,
    Recip2,
}

#[derive(Debug, Args)]
pub struct RecipArgs {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long = "M", default_value_t = 60)]
    pub big_m: u32,
    /// `lo:hi`; `eK` means e^K, so `e-30:e1` spans [e^-30, e]
    #[arg(long, default_value = "e-30:e1", value_parser = parse_sweep)]
    pub sweep: (f64, f64),
    /// Log-spaced grid size
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "recip")]
    pub kernel: KernelArg,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Enumerate walks of one length
    Walks(OracleWalkArgs),
    /// Enumerate simple odd cycles
    Cycles(OracleCycleArgs),
    /// Enumerate mobius walks of a formula
    MobiusWalks(OracleMobiusArgs),
    /// Scan all sign assignments of a formula
    Assignments(OracleAssignArgs),
    /// Seeded uniform points on the unit sphere
    SphereSample(SphereArgs),
    /// Central difference of a univariate polynomial
    FiniteDifference(FdArgs),
}

#[derive(Debug, Args)]
pub struct OracleWalkArgs {
    pub graph: PathBuf,
    #[arg(long, default_value = "1,0", value_parser = parse_complex)]
    pub z: Complex64,
    #[arg(long, default_value = "zero")]
    pub w: String,
    #[arg(long)]
    pub length: usize,
    /// 1-based endpoints `i,j`; closed walks when omitted
    #[arg(long, value_parser = parse_pair)]
    pub pair: Option<(usize, usize)>,
    /// Include every walk in the report
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct OracleCycleArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub max_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleMobiusArgs {
    pub formula: PathBuf,
    #[arg(long, default_value = "1,0", value_parser = parse_complex)]
    pub z: Complex64,
    #[arg(long, default_value = "zero")]
    pub x: String,
    /// Longest walk; defaults to the clause count
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleAssignArgs {
    pub formula: PathBuf,
}

#[derive(Debug, Args)]
pub struct SphereArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct FdArgs {
    /// Polynomial in one variable, e.g. `x^3 - 2x`
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value = "x")]
    pub var: String,
    #[arg(long)]
    pub at: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// Base graph, DIMACS edge format
    pub graph: PathBuf,
    /// Replacement path lengths `a-b:len,...` (1-based, odd lengths)
    #[arg(long, value_parser = parse_subdivision)]
    pub subdivide: Vec<Subdivision>,
    /// Odd cycle of the base graph, 1-based `a,b,c,...`
    #[arg(long, value_parser = parse_list, conflicts_with = "ineq")]
    pub cycle: Option<IndexList>,
    /// Inequality JSON `{coeffs: {"1": 1, ...}, rhs, sense}` (1-based)
    #[arg(long)]
    pub ineq: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// DIMACS CNF whose clauses, in order, form the chain
    pub formula: PathBuf,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?)),
        None => Ok(Complex64::new(parse_f64(s)?, 0.0)),
    }
}

fn parse_bound(s: &str) -> Result<f64, String> {
    match s.trim().strip_prefix('e') {
        Some(k) => Ok(parse_f64(k)?.exp()),
        None => parse_f64(s),
    }
}

pub fn parse_sweep(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected `lo:hi`")?;
    let (lo, hi) = (parse_bound(lo)?, parse_bound(hi)?);
    if !(lo > 0.0 && lo < hi) {
        return Err("need 0 < lo < hi".into());
    }
    Ok((lo, hi))
}

fn parse_index(s: &str) -> Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|_| format!("`{s}` is not a vertex index"))?;
    if v == 0 {
        return Err("indices are 1-based".into());
    }
    Ok(v - 1)
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `i,j`")?;
    Ok((parse_index(a)?, parse_index(b)?))
}

/// 0-based indices parsed from a 1-based list.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexList(pub Vec<usize>);

/// Base edge (0-based) and replacement path length.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision(pub Vec<((usize, usize), usize)>);

fn parse_list(s: &str) -> Result<IndexList, String> {
    s.split(',').map(parse_index).collect::<Result<_, _>>().map(IndexList)
}

fn parse_subdivision(s: &str) -> Result<Subdivision, String> {
    s.split(',')
        .map(|item| {
            let (edge, len) = item.split_once(':').ok_or("expected `a-b:len`")?;
            let (a, b) = edge.split_once('-').ok_or("expected `a-b:len`")?;
            let len: usize = len.trim().parse().map_err(|_| format!("bad length `{len}`"))?;
            Ok(((parse_index(a)?, parse_index(b)?), len))
        })
        .collect::<Result<_, String>>()
        .map(Subdivision)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_parsers() {
        assert_eq!(parse_complex("1,0").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("0.5,-1.3").unwrap(), Complex64::new(0.5, -1.3));
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert!(parse_complex("a,b").is_err());
        assert!(parse_complex("inf").is_err());
        let (lo, hi) = parse_sweep("e-30:e1").unwrap();
        assert!((lo - (-30f64).exp()).abs() < 1e-28 && (hi - 1f64.exp()).abs() < 1e-15);
        assert_eq!(parse_sweep("0.1:10").unwrap(), (0.1, 10.0));
        assert!(parse_sweep("2:1").is_err());
        assert_eq!(parse_subdivision("1-2:3,2-3:5").unwrap().0, vec![((0, 1), 3), ((1, 2), 5)]);
        assert!(parse_list("0,1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
