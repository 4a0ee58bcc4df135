//! Command-line surface: exact point queries, the halfspace solver, the
//! sampling cross-check, and the scan suite.
//!
//! Exit codes: 0 when every assertive check passes (report-only scans
//! never affect it), 1 for failed scans or runtime errors, 2 for invalid
//! arguments.

use clap::{Args, Parser, Subcommand, ValueEnum};
use isobary::bounds::envelope_bounds;
use isobary::cube_slice::{slice_stats, Halfspace};
use isobary::error::Error;
use isobary::exactnum::{parse_rational, Rational};
use isobary::irwin_hall::IrwinHallTail;
use isobary::report::{write_atomic, ScanReport};
use isobary::solver::{solve, solve_diagonal};
use isobary::verify::{
    find_n0, scan_derived, scan_diag, scan_hp, scan_identities, scan_mc_check, scan_monotone,
    scan_regions, Grid,
};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "isobary",
    version,
    about = "Exact slice statistics for the cube and scans of the inequalities built on them"
)]
struct Cli {
    /// Worker threads; defaults to ISOBARY_THREADS or all cores
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ReportArgs {
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this path (atomically) instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Grid step as a rational; points are inset half a step from ±1
    #[arg(long, default_value = "1/256")]
    step: String,
}

impl GridArgs {
    fn grid(&self) -> Result<Grid, Error> {
        Grid::with_step(parse_rational(&self.step)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one of the inequality scans
    Verify {
        #[command(subcommand)]
        scan: Scan,
    },
    /// Find the halfspace whose cube slice has the given barycenter
    Solve {
        /// Target coordinates, comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
    },
    /// Exact volume fraction and barycenter of a halfspace slice
    Slice {
        /// Direction weights, comma-separated rationals
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<String>,
        /// Halfspace offset
        #[arg(long)]
        c: String,
    },
    /// Exact upper-tail probability of the coordinate mean
    Tail {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: String,
    },
    /// Exact mean of the coordinate mean above a threshold
    Mean {
        #[arg(long)]
        n: u32,
        /// Threshold t, or with --invert the target mean value
        #[arg(long)]
        t: String,
        /// Solve for the threshold attaining the target mean
        #[arg(long)]
        invert: bool,
    },
    /// Exact values and every envelope bound at one point
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: String,
    },
    /// Randomized exact-vs-sampled comparisons of slice statistics
    #[command(name = "mc-check")]
    McCheck {
        #[arg(long, default_value_t = 50)]
        count: u32,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases allowed beyond 3 sigma before the verdict fails
        #[arg(long, default_value_t = 2)]
        allowed: u32,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Subcommand)]
enum Scan {
    /// Root-of-tail vs geometric-mean gap, strictly negative inside (-1,1)
    Diag {
        /// Dimension or inclusive range, e.g. 12 or 1..20
        #[arg(long, default_value = "1..20")]
        n: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Proven inequality n·D(t) < 1
    Derived {
        #[arg(long, default_value = "1..20")]
        n: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Conjectured inequality 2n·D(t) < 1 (report-only)
    Conjecture {
        #[arg(long, default_value = "1..20")]
        n: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Closed-form bounds on D over the five-region partition of (-1,1)
    Regions {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value = "12..40")]
        n: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Smallest dimension from which four asymptotic inequalities all hold
    N0 {
        #[arg(long, default_value_t = 10_000)]
        horizon: u32,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Exact identities and envelope domination on one grid pass
    Identities {
        #[arg(long, default_value = "1..10")]
        n: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Volume bounds at solved barycenter targets on a coarse grid
    Hp {
        /// Dimensions to scan
        #[arg(long, default_value = "2..4")]
        n: String,
        /// Coordinate magnitudes of the target grid
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.6, 0.9])]
        levels: Vec<f64>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Tail and mean behavior as the dimension grows
    Monotone {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, Error> {
    let bad = || Error::Parse(format!("expected N or LO..HI, got {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let lo: u32 = a.trim().parse().map_err(|_| bad())?;
        let hi: u32 = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok(lo..=hi)
    } else {
        let v: u32 = s.trim().parse().map_err(|_| bad())?;
        Ok(v..=v)
    }
}

fn emit(report: &ScanReport, args: &ReportArgs) -> Result<i32, Error> {
    let body = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &args.output {
        Some(path) => {
            write_atomic(path, body.as_bytes())?;
            println!("{}: {}", report.name, report.verdict);
        }
        None => print!("{body}"),
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn run_scan(scan: Scan) -> Result<i32, Error> {
    match scan {
        Scan::Diag { n, grid, report } => {
            emit(&scan_diag(parse_range(&n)?, &grid.grid()?)?, &report)
        }
        Scan::Derived { n, grid, report } => {
            emit(&scan_derived(parse_range(&n)?, &grid.grid()?, 1)?, &report)
        }
        Scan::Conjecture { n, grid, report } => {
            emit(&scan_derived(parse_range(&n)?, &grid.grid()?, 2)?, &report)
        }
        Scan::Regions {
            alpha,
            beta,
            gamma,
            n,
            grid,
            report,
        } => emit(
            &scan_regions(alpha, beta, gamma, parse_range(&n)?, &grid.grid()?)?,
            &report,
        ),
        Scan::N0 { horizon, report } => {
            let (n0, rep) = find_n0(horizon)?;
            let code = emit(&rep, &report)?;
            if report.output.is_some() {
                println!("n0 = {n0}");
            }
            Ok(code)
        }
        Scan::Identities { n, grid, report } => {
            emit(&scan_identities(parse_range(&n)?, &grid.grid()?)?, &report)
        }
        Scan::Hp { n, levels, report } => {
            let dims: Vec<u32> = parse_range(&n)?.collect();
            emit(&scan_hp(&dims, &levels)?, &report)
        }
        Scan::Monotone {
            n_max,
            grid,
            report,
        } => emit(&scan_monotone(n_max, &grid.grid()?)?, &report),
    }
}

fn print_option(name: &str, v: Option<f64>) {
    match v {
        Some(x) => println!("{name}: {x}"),
        None => println!("{name}: n/a"),
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.cmd {
        Cmd::Verify { scan } => run_scan(scan),
        Cmd::Solve { x } => {
            let r = solve(&x)?;
            let Halfspace::Float { direction, offset } = &r.halfspace else {
                unreachable!("solver returns float halfspaces");
            };
            let theta = direction
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",");
            println!("theta: {theta}");
            println!("c: {offset}");
            println!("residual: {:e}", r.residual);
            println!("iterations: {}", r.iterations);
            println!("multistart_agreement: {}", r.multistart_agreement);
            Ok(0)
        }
        Cmd::Slice { w, c } => {
            let direction = w
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<Rational>, Error>>()?;
            let h = Halfspace::exact(direction, parse_rational(&c)?)?;
            let stats = slice_stats(&h)?;
            println!("volume: {}", stats.volume_fraction);
            let bary = stats
                .barycenter
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(",");
            println!("barycenter: {bary}");
            Ok(0)
        }
        Cmd::Tail { n, t } => {
            let d = IrwinHallTail::build(n)?;
            println!("{}", d.tail(&parse_rational(&t)?)?);
            Ok(0)
        }
        Cmd::Mean { n, t, invert } => {
            let target = parse_rational(&t)?;
            if invert {
                println!("{}", solve_diagonal(n, &target)?);
            } else {
                let d = IrwinHallTail::build(n)?;
                println!("{}", d.truncated_mean(&target)?);
            }
            Ok(0)
        }
        Cmd::Bounds { n, t } => {
            let d = IrwinHallTail::build(n)?;
            let e = envelope_bounds(&d, &parse_rational(&t)?)?;
            println!("tail: {}", e.tail);
            println!("mean: {}", e.mean);
            println!("corner_formula: {}", e.corner_formula);
            println!("corner_e_form: {}", e.corner_e_form);
            print_option("chernoff", e.chernoff);
            print_option("mgf", e.mgf);
            print_option("sd_mean", e.sd_mean);
            println!("half_mean: {}", e.half_mean);
            println!("conjectured_volume: {}", e.conjectured_volume);
            println!("milman_pajor_volume: {}", e.milman_pajor_volume);
            println!("e_product_volume: {}", e.e_product_volume);
            Ok(0)
        }
        Cmd::McCheck {
            count,
            samples,
            seed,
            allowed,
            report,
        } => emit(&scan_mc_check(count, samples, seed, allowed)?, &report),
    }
}

/// Argument-shaped failures exit 2; runtime failures exit 1.
fn classify(e: &Error) -> u8 {
    match e {
        Error::OutOfDomain { .. }
        | Error::CapExceeded { .. }
        | Error::Precondition { .. }
        | Error::InvalidHalfspace(_)
        | Error::TargetOutOfRange(_)
        | Error::EmptySlice
        | Error::Parse(_) => 2,
        Error::NoConvergence { .. } | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("ISOBARY_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}
