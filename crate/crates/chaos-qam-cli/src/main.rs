//! `chaosqam`: command-line front end for the chaotic 64-QAM stack.
//!
//! Four subcommands cover the full workflow:
//!
//! * `ber` — Monte Carlo BER sweep over a `p` list and an Eb/N0 grid,
//!   written as CSV (optionally with an SVG plot of the curves).
//! * `constellation` — modulate random symbols and dump the `(i, q)`
//!   scatter as CSV.
//! * `theory` — evaluate the analytical BER models only, no simulation.
//! * `selftest` — fast deterministic health checks, one line per check.
//!
//! Every flag can also be supplied through `--config FILE`, a flat
//! `key = value` text file whose keys mirror the long flag names; explicit
//! flags win over file values. Output files are written to a temporary
//! sibling and renamed into place, so a failed run never leaves a partial
//! artifact behind.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use chaos_qam::analysis::TheoryPoint;
use chaos_qam::harness::{
    ber_csv, constellation_csv, dump_constellation, run_experiment, EbnoGrid, Experiment,
};
use chaos_qam::plot::ber_plot_svg;

mod selftest;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Anything that should abort the process with a nonzero exit code. The
/// message always names the offending flag, config key, or path.
#[derive(Debug)]
enum CliError {
    /// A flag or config value failed to parse or violated a bound.
    Invalid { name: String, detail: String },
    /// A file could not be read, written, or renamed.
    Io { path: PathBuf, detail: String },
    /// The library rejected the resolved configuration or failed mid-run;
    /// its messages already name the offending field.
    Lib(chaos_qam::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid { name, detail } => write!(f, "{name}: {detail}"),
            CliError::Io { path, detail } => write!(f, "{}: {detail}", path.display()),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<chaos_qam::Error> for CliError {
    fn from(e: chaos_qam::Error) -> Self {
        CliError::Lib(e)
    }
}

// ---------------------------------------------------------------------------
// Command line surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "chaosqam",
    version,
    about = "Simulator and analysis tools for a chaos-coded 64-QAM link"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo BER sweep and write the records as CSV
    Ber(BerArgs),
    /// Modulate random symbols and write the (i, q) scatter as CSV
    Constellation(ConstellationArgs),
    /// Evaluate the analytical BER models over a grid, no simulation
    Theory(TheoryArgs),
    /// Run the built-in health checks and report one line per check
    Selftest,
}

#[derive(Args)]
struct BerArgs {
    /// Map control parameters in [0, 1], comma-separated (default: 0.1,0.5,1)
    #[arg(long)]
    p: Option<String>,
    /// Eb/N0 grid in dB, `start:step:stop` or a single value (default: 0:2:16)
    #[arg(long)]
    ebn0: Option<String>,
    /// Minimum bits simulated per point (default: 100000)
    #[arg(long)]
    bits: Option<u64>,
    /// After --bits, stop a point once it has this many errors (default: 100)
    #[arg(long)]
    min_errors: Option<u64>,
    /// Hard per-point bit cap for cells short on errors (default: 10000000)
    #[arg(long)]
    max_bits: Option<u64>,
    /// Symbols per rail per frame (default: 1000)
    #[arg(long)]
    frame: Option<usize>,
    /// Master seed; every random stream is derived from it (default: 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Pilot amplitude shared by modulator and receiver (default: 0)
    #[arg(long)]
    x0: Option<f64>,
    /// Output CSV path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the sweep as an SVG plot to this path
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Flat `key = value` file whose keys mirror the long flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ConstellationArgs {
    /// Map control parameter in [0, 1] (default: 1)
    #[arg(long)]
    p: Option<f64>,
    /// Number of complex symbols to modulate (default: 4096)
    #[arg(long)]
    symbols: Option<usize>,
    /// Master seed for the symbol stream (default: 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` file whose keys mirror the long flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Map control parameters in [0, 1], comma-separated (default: 0.1,0.5,1)
    #[arg(long)]
    p: Option<String>,
    /// Eb/N0 grid in dB, `start:step:stop` or a single value (default: 0:2:16)
    #[arg(long)]
    ebn0: Option<String>,
    /// Output CSV path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` file whose keys mirror the long flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Config file handling
// ---------------------------------------------------------------------------

/// Parses a flat config file: one `key = value` per line, `#` starts a
/// comment, blank lines ignored.
fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.to_path_buf(), detail: e.to_string() })?;
    let mut map = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Invalid {
                name: format!("config line {}", index + 1),
                detail: format!("expected `key = value`, got `{raw}`"),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolves one setting: explicit flag, else config value, else default.
/// A config value that fails to parse is reported under its key name.
fn resolve<T: FromStr>(
    flag: Option<T>,
    cfg: &mut BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    let file_value = cfg.remove(key);
    if let Some(v) = flag {
        return Ok(v);
    }
    match file_value {
        Some(raw) => raw.parse().map_err(|e| CliError::Invalid {
            name: key.to_string(),
            detail: format!("cannot parse `{raw}`: {e}"),
        }),
        None => Ok(default),
    }
}

/// Like `resolve` but for optional paths with no default.
fn resolve_path(
    flag: Option<PathBuf>,
    cfg: &mut BTreeMap<String, String>,
    key: &str,
) -> Option<PathBuf> {
    let file_value = cfg.remove(key);
    flag.or(file_value.map(PathBuf::from))
}

/// Every recognized key must have been consumed by now.
fn reject_unknown(cfg: BTreeMap<String, String>) -> Result<(), CliError> {
    match cfg.into_iter().next() {
        None => Ok(()),
        Some((key, _)) => Err(CliError::Invalid {
            name: "config".to_string(),
            detail: format!("unknown key `{key}`"),
        }),
    }
}

// ---------------------------------------------------------------------------
// Value parsing
// ---------------------------------------------------------------------------

/// Comma-separated list of map parameters, e.g. `0.1,0.5,1`.
fn parse_p_list(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        values.push(part.parse().map_err(|_| CliError::Invalid {
            name: "p".to_string(),
            detail: format!("cannot parse `{part}` as a number"),
        })?);
    }
    Ok(values)
}

/// `start:step:stop` inclusive grid, or a single value.
fn parse_grid(text: &str) -> Result<EbnoGrid, CliError> {
    let bad = |detail: String| CliError::Invalid { name: "ebn0".to_string(), detail };
    let parts: Vec<&str> = text.split(':').collect();
    let number = |part: &str| -> Result<f64, CliError> {
        part.trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse `{part}` as a number in `{text}`")))
    };
    match parts.as_slice() {
        [single] => {
            let v = number(single)?;
            Ok(EbnoGrid::new(v, 1.0, v)?)
        }
        [start, step, stop] => Ok(EbnoGrid::new(number(start)?, number(step)?, number(stop)?)?),
        _ => Err(bad(format!("expected `start:step:stop` or a single value, got `{text}`"))),
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// Writes via a temporary sibling plus rename, so the target path either
/// holds the complete content or does not appear at all.
fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    let io_err = |detail: String| CliError::Io { path: path.to_path_buf(), detail };
    let file_name = path
        .file_name()
        .ok_or_else(|| io_err("path has no file name".to_string()))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!(".{file_name}.tmp-{}", std::process::id()));
    fs::write(&tmp, content).map_err(|e| io_err(e.to_string()))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e.to_string())
    })
}

/// CSV goes to the given path, or stdout when none was requested.
fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_ber(args: BerArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let p_text = resolve(args.p, &mut cfg, "p", "0.1,0.5,1".to_string())?;
    let ebn0_text = resolve(args.ebn0, &mut cfg, "ebn0", "0:2:16".to_string())?;
    let exp = Experiment {
        p_values: parse_p_list(&p_text)?,
        ebn0_grid_db: parse_grid(&ebn0_text)?,
        min_bits: resolve(args.bits, &mut cfg, "bits", 100_000)?,
        min_errors: resolve(args.min_errors, &mut cfg, "min-errors", 100)?,
        max_bits: resolve(args.max_bits, &mut cfg, "max-bits", 10_000_000)?,
        frame_symbols: resolve(args.frame, &mut cfg, "frame", 1000)?,
        master_seed: resolve(args.seed, &mut cfg, "seed", 42)?,
        x0: resolve(args.x0, &mut cfg, "x0", 0.0)?,
    };
    let out = resolve_path(args.out, &mut cfg, "out");
    let plot = resolve_path(args.plot, &mut cfg, "plot");
    reject_unknown(cfg)?;
    exp.validate()?;

    let records = run_experiment(&exp)?;
    emit(out.as_deref(), &ber_csv(&records))?;
    if let Some(path) = plot {
        write_file(&path, &ber_plot_svg(&records)?)?;
    }
    Ok(())
}

fn run_constellation(args: ConstellationArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let p = resolve(args.p, &mut cfg, "p", 1.0)?;
    let symbols = resolve(args.symbols, &mut cfg, "symbols", 4096)?;
    let seed = resolve(args.seed, &mut cfg, "seed", 42)?;
    let out = resolve_path(args.out, &mut cfg, "out");
    reject_unknown(cfg)?;

    let points = dump_constellation(p, symbols, seed)?;
    emit(out.as_deref(), &constellation_csv(&points))
}

fn run_theory(args: TheoryArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let p_text = resolve(args.p, &mut cfg, "p", "0.1,0.5,1".to_string())?;
    let ebn0_text = resolve(args.ebn0, &mut cfg, "ebn0", "0:2:16".to_string())?;
    let out = resolve_path(args.out, &mut cfg, "out");
    reject_unknown(cfg)?;

    let p_values = parse_p_list(&p_text)?;
    let grid = parse_grid(&ebn0_text)?;
    let mut csv = String::from("p,ebn0_db,w_min,theory_eq12,theory_eq13,theory_textbook\n");
    for &p in &p_values {
        for ebn0_db in grid.points() {
            let point = TheoryPoint::evaluate(ebn0_db, p)?;
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                point.p, point.ebn0_db, point.w_min, point.ber_qam, point.ber_chaos,
                point.ber_textbook
            ));
        }
    }
    emit(out.as_deref(), &csv)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ber(args) => run_ber(args),
        Command::Constellation(args) => run_constellation(args),
        Command::Theory(args) => run_theory(args),
        Command::Selftest => selftest::run(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
