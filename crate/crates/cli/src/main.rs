//! `ellchain`: build, check and count rank-two limit linear series with
//! canonical determinant on chains of elliptic curves.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 validation failure,
//! 3 below the existence threshold, 4 malformed series file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ellchain::construct::requires_external_stability;
use ellchain::search::{enumerate, SearchSpace};
use ellchain::series::format::{parse_any, to_json, to_text};
use ellchain::stability::check_stable_generic;
use ellchain::sweep::{sweep, to_csv};
use ellchain::{
    construct, count_dimension, rho_canonical, rho_general, validate_all, ConstructError,
    LimitSeries,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;
const EXIT_PARSE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ellchain",
    version,
    about = "Rank-two canonical limit linear series on elliptic chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Build the series for (g, k); the parity of k picks the construction.
    Construct {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        k: u32,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Generate even below the existence threshold.
        #[arg(long)]
        force: bool,
    },
    /// Run every validator on a series file.
    Verify { file: PathBuf },
    /// Print the itemized parameter count and compare with the expected
    /// dimension.
    Dim { file: PathBuf },
    /// Enumerate combinatorial solutions under the balanced split ansatz.
    Search {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        r: u32,
        /// Print at most this many solutions (the count is always complete).
        #[arg(long, default_value_t = 0)]
        max: usize,
        /// Search only the first LENGTH components.
        #[arg(long)]
        length: Option<u32>,
        /// Genus cap override (also ELLCHAIN_SEARCH_CAP).
        #[arg(long)]
        cap: Option<u32>,
        /// Disable pruning; filter complete configurations by validation.
        #[arg(long)]
        slow: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// One CSV row per (g, k) in the grid.
    Sweep {
        #[arg(long)]
        g_min: u32,
        #[arg(long)]
        g_max: u32,
        #[arg(long)]
        k_min: u32,
        #[arg(long)]
        k_max: u32,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Construct {
            g,
            k,
            out,
            format,
            force,
        } => cmd_construct(g, k, out.as_deref(), format, force),
        Command::Verify { file } => cmd_verify(&file),
        Command::Dim { file } => cmd_dim(&file),
        Command::Search {
            g,
            k,
            r,
            max,
            length,
            cap,
            slow,
            threads,
        } => {
            let mut space = SearchSpace::new(g, r, k).with_length(length.unwrap_or(g));
            space.cap = cap;
            space.pruning = !slow;
            space.threads = threads;
            cmd_search(&space, max)
        }
        Command::Sweep {
            g_min,
            g_max,
            k_min,
            k_max,
            out,
            threads,
        } => cmd_sweep(g_min..=g_max, k_min..=k_max, out.as_deref(), threads),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_construct(g: u32, k: u32, out: Option<&Path>, format: Format, force: bool) -> Result<u8> {
    let series = match construct(g, k, force) {
        Ok(s) => s,
        Err(ConstructError::BelowThreshold { threshold, .. }) => {
            eprintln!(
                "k = {k} requires g ≥ {threshold} (got g = {g}; pass --force to generate anyway)"
            );
            return Ok(EXIT_THRESHOLD);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_USAGE);
        }
    };
    let text = match format {
        Format::Text => to_text(&series),
        Format::Structured => to_json(&series),
    };
    write_output(out, &text)?;
    let report = validate_all(&series);
    // Keep stdout clean for the series itself when no file is given.
    let summary = format!("{report}");
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    if requires_external_stability(g, k) {
        eprintln!(
            "note: stability for (g, k) = ({g}, {k}) is certified by a separate construction"
        );
    }
    Ok(if report.passed() { 0 } else { EXIT_INVALID })
}

fn load(file: &Path) -> Result<std::result::Result<LimitSeries, u8>> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    Ok(parse_any(&text).map_err(|e| {
        eprintln!("{}: {e}", file.display());
        EXIT_PARSE
    }))
}

fn cmd_verify(file: &Path) -> Result<u8> {
    let series = match load(file)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let report = validate_all(&series);
    print!("{report}");
    Ok(if report.passed() { 0 } else { EXIT_INVALID })
}

fn cmd_dim(file: &Path) -> Result<u8> {
    let series = match load(file)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let ledger = match count_dimension(&series) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_INVALID);
        }
    };
    let (g, k) = (i64::from(series.genus()), series.k as i64);
    let rho = rho_canonical(g, k);
    println!("{ledger}");
    let relation = if ledger.total == rho { "=" } else { "!=" };
    println!("total {} {relation} rho {rho}", ledger.total);
    println!("rho(2, 2g-2) = {}", rho_general(2, 2 * g - 2, g, k));
    let stability = check_stable_generic(&series);
    println!("stability: {}", stability.verdict);
    Ok(0)
}

fn cmd_search(space: &SearchSpace, max: usize) -> Result<u8> {
    let report = match enumerate(space, Some(max)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return Ok(EXIT_USAGE);
        }
    };
    println!("{report}");
    for (n, s) in report.solutions.iter().enumerate() {
        println!("--- solution {}", n + 1);
        print!("{}", to_text(s));
    }
    Ok(0)
}

fn cmd_sweep(
    g: std::ops::RangeInclusive<u32>,
    k: std::ops::RangeInclusive<u32>,
    out: Option<&Path>,
    threads: Option<usize>,
) -> Result<u8> {
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()?
            .install(|| sweep(g, k)),
        None => sweep(g, k),
    };
    write_output(out, &to_csv(&rows))?;
    Ok(0)
}
