use clap::{Args, Parser, Subcommand};
use semistab::demo::run_demo;
use semistab::error::Error;
use semistab::io::{
    axis_csv, build_report, format_float, growth_curve_csv, num, parse_input, to_json_string,
};
use semistab::semigroup::{analyze, growth_curve_seeded, AnalyzeConfig};
use semistab::stability::{axis_sup_seeded, gpg_classify_seeded};
use semistab::DEFAULT_SEED;
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INDETERMINATE: u8 = 4;
const EXIT_RHP_SPECTRUM: u8 = 5;

#[derive(Parser)]
#[command(name = "semistab", version, about = "Semigroup stability analyzer for finite matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full stability analysis: spectral bound, growth bound, M0, best
    /// constant, and the resolvent-criterion verdict
    Analyze(AnalyzeArgs),
    /// Sampled ||e^{tA}|| on a geometric schedule, as CSV
    GrowthCurve(GrowthCurveArgs),
    /// Certified enclosure of the imaginary-axis resolvent supremum
    ResolventScan(ResolventScanArgs),
    /// Built-in demonstrations: nilpotent, normal, similar, drifting
    Demo(DemoArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input matrix or diagonal-operator JSON file
    file: PathBuf,
    /// Eigenvalue clustering / diagonalizability tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// First growth-curve sample time, or "auto" for 1/||A||
    #[arg(long, default_value = "auto")]
    t0: String,
    /// Number of time doublings on the growth curve
    #[arg(long, default_value_t = 12)]
    doublings: usize,
    /// Largest time on the best-constant scan grid
    #[arg(long = "t-max", default_value_t = 1024.0)]
    t_max: f64,
    /// Largest eigenvalue count for exact subset enumeration of M0
    #[arg(long = "subset-cap", default_value_t = 20)]
    subset_cap: usize,
    /// Relative tolerance for the axis-supremum enclosure
    #[arg(long = "rel-tol", default_value_t = 1e-3)]
    rel_tol: f64,
    /// Seed for all randomized internals
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Accepted for compatibility; evaluation is single-threaded
    #[arg(long)]
    threads: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GrowthCurveArgs {
    file: PathBuf,
    /// First sample time, or "auto" for 1/||A||
    #[arg(long, default_value = "auto")]
    t0: String,
    #[arg(long, default_value_t = 12)]
    doublings: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the CSV here instead of stdout
    #[arg(long = "csv-out")]
    csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct ResolventScanArgs {
    file: PathBuf,
    #[arg(long = "rel-tol", default_value_t = 1e-3)]
    rel_tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the axis grid CSV here instead of stdout
    #[arg(long = "axis-csv-out")]
    axis_csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    /// One of: nilpotent, normal, similar, drifting
    name: String,
    /// Output directory for reports and CSVs
    #[arg(long, default_value = "demo-out")]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::GrowthCurve(args) => cmd_growth_curve(&args),
        Command::ResolventScan(args) => cmd_resolvent_scan(&args),
        Command::Demo(args) => cmd_demo(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Input(_) => EXIT_INPUT,
        Error::RightHalfPlaneSpectrum { .. } => EXIT_RHP_SPECTRUM,
        _ => EXIT_NUMERICAL,
    }
}

fn read_input(path: &PathBuf) -> Result<semistab::io::InputOperator, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&text)
}

fn parse_t0(raw: &str) -> Result<Option<f64>, Error> {
    if raw == "auto" {
        return Ok(None);
    }
    let t0: f64 = raw
        .parse()
        .map_err(|_| Error::Input(format!("--t0 must be a number or \"auto\", got {raw:?}")))?;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Input(format!("--t0 must be positive and finite, got {t0}")));
    }
    Ok(Some(t0))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<ExitCode, Error> {
    let input = read_input(&args.file)?;
    let a = input.to_matrix();
    let config = AnalyzeConfig {
        tol: args.tol,
        t0: parse_t0(&args.t0)?,
        doublings: args.doublings,
        scan_t_max: args.t_max,
        subset_cap: args.subset_cap,
        seed: args.seed,
        ..AnalyzeConfig::default()
    };
    let stability = analyze(&a, &config)?;
    let gpg = gpg_classify_seeded(&a, args.rel_tol, args.seed)?;
    let indeterminate = gpg.indeterminate;
    let echo = json!({
        "tol": num(args.tol),
        "t0": args.t0,
        "doublings": args.doublings,
        "t_max": num(args.t_max),
        "subset_cap": args.subset_cap,
        "rel_tol": num(args.rel_tol),
        "seed": args.seed,
    });
    let report = to_json_string(&build_report(&input, &stability, Some(&gpg), echo));
    emit(&report, args.out.as_ref())?;
    if indeterminate {
        eprintln!("verdict is indeterminate: spectral bound within the borderline band");
        return Ok(ExitCode::from(EXIT_INDETERMINATE));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_growth_curve(args: &GrowthCurveArgs) -> Result<ExitCode, Error> {
    let input = read_input(&args.file)?;
    let a = input.to_matrix();
    let t0 = match parse_t0(&args.t0)? {
        Some(t0) => t0,
        None => 1.0 / a.op_norm_seeded(args.seed).max(f64::MIN_POSITIVE),
    };
    let curve = growth_curve_seeded(&a, t0, args.doublings, args.seed)?;
    emit(&growth_curve_csv(&curve), args.csv_out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_resolvent_scan(args: &ResolventScanArgs) -> Result<ExitCode, Error> {
    let input = read_input(&args.file)?;
    let a = input.to_matrix();
    let scan = axis_sup_seeded(&a, args.rel_tol, args.seed)?;
    emit(&axis_csv(&scan), args.axis_csv_out.as_ref())?;
    eprintln!(
        "axis sup enclosure: [{}, {}] (truncation radius {}, depth {}, converged: {})",
        format_float(scan.sup_lower),
        format_float(scan.sup_upper),
        format_float(scan.truncation_radius),
        scan.refinement_depth,
        scan.converged
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_demo(args: &DemoArgs) -> Result<ExitCode, Error> {
    let written = run_demo(&args.name, &args.out, args.seed)?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
