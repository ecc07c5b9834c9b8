//! `tilecode`: elaborate tile collections, encode payloads into constrained
//! bit matrices, and inspect the results.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tilecode::{
    analysis, codec, collection, nom, BitMatrix, BitString, ConstraintSpec, Error, NomCollection,
    RenderStyle, TileCollection,
};

const EXIT_CODES: &str = "\
EXIT CODES:
   0  success (validate: matrix is valid)
   1  validate: matrix violates the constraints
   2  command-line usage error
   3  parameter error
   4  dimension error
   5  file-format error
   6  work limit exceeded
   7  elaboration failed
   8  geometry error
   9  corrupt matrix
  10  unknown overlap / incompatible context
  11  collection failed verification
  12  frame, empty-collection, or search failure
  13  i/o error
  14  internal error

The TILECODE_WORK_LIMIT environment variable overrides the default search
and enumeration budgets where --work-limit/--budget is not given.";

#[derive(Parser)]
#[command(
    name = "tilecode",
    about = "Tile-based encoding of data into two-dimensional constrained bit matrices",
    after_help = EXIT_CODES,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConstraintArgs {
    /// Constraint preset: `rll13-2d` or `rll-dk:D,K`
    #[arg(long, conflicts_with = "constraints")]
    preset: Option<String>,
    /// Constraint file: one forbidden pattern per block of 0/1 rows,
    /// blocks separated by blank lines
    #[arg(long)]
    constraints: Option<PathBuf>,
}

impl ConstraintArgs {
    fn load(&self) -> Result<ConstraintSpec, Error> {
        match (&self.preset, &self.constraints) {
            (Some(name), None) => parse_preset(name),
            (None, Some(path)) => ConstraintSpec::from_text(&read_text(path)?),
            (None, None) => Err(Error::Parameter(
                "either --preset or --constraints is required".into(),
            )),
            (Some(_), Some(_)) => unreachable!("clap forbids both"),
        }
    }
}

fn parse_preset(name: &str) -> Result<ConstraintSpec, Error> {
    if name == "rll13-2d" {
        return Ok(ConstraintSpec::preset_rll13_2d());
    }
    if let Some(rest) = name.strip_prefix("rll-dk:") {
        let (d, k) = rest
            .split_once(',')
            .ok_or_else(|| Error::Parameter(format!("expected rll-dk:D,K, got {name:?}")))?;
        let d = d
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad d in {name:?}")))?;
        let k = k
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad k in {name:?}")))?;
        return ConstraintSpec::preset_rll_dk_2d(d, k);
    }
    Err(Error::Parameter(format!(
        "unknown preset {name:?}; available: rll13-2d, rll-dk:D,K"
    )))
}

#[derive(ValueEnum, Clone, Copy)]
enum Style {
    Unicode,
    Ascii,
}

#[derive(Subcommand)]
enum Command {
    /// Elaborate a tile collection and write it to a collection file
    Elaborate {
        #[command(flatten)]
        constraints: ConstraintArgs,
        /// Tile width in bits
        #[arg(long)]
        width: usize,
        /// Tile height in bits
        #[arg(long)]
        height: usize,
        /// Candidate floor every context must meet
        #[arg(long, default_value_t = 1)]
        min_candidates: usize,
        /// Node budget for enumeration and the eviction search
        #[arg(long)]
        work_limit: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Count the valid tiles of a size; optionally dump them
    Tiles {
        #[command(flatten)]
        constraints: ConstraintArgs,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        work_limit: Option<u64>,
        /// Write all tiles, collection-file formatted, to --output
        /// (a raw dump; it need not verify as a collection)
        #[arg(long, requires = "output")]
        dump: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Embed a payload file into a matrix, written as plain PBM
    Encode {
        /// Collection file produced by `elaborate`
        #[arg(long)]
        collection: PathBuf,
        /// Payload bytes; bits are consumed most significant first
        #[arg(long)]
        payload: PathBuf,
        /// Matrix width in bits
        #[arg(long)]
        cols: usize,
        /// Matrix height in bits
        #[arg(long)]
        rows: usize,
        /// Embed only the first N payload bits
        #[arg(long)]
        num_bits: Option<usize>,
        /// Write the per-position candidate counts as TSV
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recover payload bits from an encoded matrix
    Decode {
        #[arg(long)]
        collection: PathBuf,
        /// Matrix in plain PBM format
        #[arg(long)]
        input: PathBuf,
        /// Number of payload bits to recover
        #[arg(long)]
        num_bits: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a matrix against the constraints
    Validate {
        #[command(flatten)]
        constraints: ConstraintArgs,
        #[arg(long)]
        input: PathBuf,
    },
    /// Report collection statistics, automata, and embedding traps
    Analyze {
        /// Collection file
        collection: PathBuf,
    },
    /// Print a matrix as ASCII art (black square = 1)
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Style::Unicode)]
        style: Style,
    },
    /// Search for a fixed-frame collection and write it out
    NomSearch {
        #[command(flatten)]
        constraints: ConstraintArgs,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// Node budget for the frame search
        #[arg(long)]
        budget: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Fixed-rate encode with a fixed-frame collection
    NomEncode {
        #[arg(long)]
        collection: PathBuf,
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        num_bits: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Fixed-rate decode with a fixed-frame collection
    NomDecode {
        #[arg(long)]
        collection: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        num_bits: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let (kind, code) = classify(&err);
            eprintln!("error: {kind}: {err}");
            ExitCode::from(code)
        }
    }
}

fn classify(err: &Error) -> (&'static str, u8) {
    match err {
        Error::Parameter(_) => ("parameter", 3),
        Error::Dimension(_) => ("dimension", 4),
        Error::Format(_) => ("format", 5),
        Error::WorkLimit { .. } => ("work-limit", 6),
        Error::ElaborationFailed { .. } => ("elaboration-failed", 7),
        Error::Geometry(_) => ("geometry", 8),
        Error::Corruption { .. } => ("corruption", 9),
        Error::UnknownOverlap(_) => ("unknown-overlap", 10),
        Error::IncompatibleContext(_) => ("incompatible-context", 10),
        Error::Verification(_) => ("verification", 11),
        Error::Frame(_) => ("frame", 12),
        Error::EmptyCollection(_) => ("empty-collection", 12),
        Error::SearchFailed(_) => ("search-failed", 12),
        Error::Internal(_) => ("internal", 14),
    }
}

fn env_work_limit() -> u64 {
    std::env::var("TILECODE_WORK_LIMIT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(tilecode::DEFAULT_WORK_LIMIT)
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("cannot read {path:?}: {e}")))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Format(format!("cannot read {path:?}: {e}")))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Format(format!("cannot write {path:?}: {e}")))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| Error::Format(format!("cannot write {path:?}: {e}")))
}

fn load_collection(path: &Path) -> Result<TileCollection, Error> {
    TileCollection::from_text(&read_text(path)?)
}

fn load_nom(path: &Path) -> Result<NomCollection, Error> {
    NomCollection::from_text(&read_text(path)?)
}

fn load_payload(path: &Path, num_bits: Option<usize>) -> Result<BitString, Error> {
    let bytes = read_bytes(path)?;
    match num_bits {
        Some(n) => BitString::from_bytes_truncated(&bytes, n),
        None => Ok(BitString::from_bytes(&bytes)),
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Elaborate {
            constraints,
            width,
            height,
            min_candidates,
            work_limit,
            output,
        } => {
            let spec = constraints.load()?;
            let limit = work_limit.unwrap_or_else(env_work_limit);
            let coll =
                collection::elaborate_with_limit(width, height, &spec, min_candidates, limit)?;
            write_text(&output, &coll.to_text())?;
            let report = collection::verify_collection(&coll);
            println!(
                "elaborated {} tiles ({} contexts) -> {}",
                coll.len(),
                report.context_count,
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Tiles {
            constraints,
            width,
            height,
            work_limit,
            dump,
            output,
        } => {
            let spec = constraints.load()?;
            let limit = work_limit.unwrap_or_else(env_work_limit);
            let tiles = tilecode::enumerate_valid_tiles_with_limit(width, height, &spec, limit)?;
            println!("count={}", tiles.len());
            if dump {
                let coll = collection::assemble(spec, width, height, tiles, 1)?;
                write_text(output.as_deref().unwrap(), &coll.to_text())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Encode {
            collection,
            payload,
            cols,
            rows,
            num_bits,
            trace,
            output,
        } => {
            let coll = load_collection(&collection)?;
            let bits = load_payload(&payload, num_bits)?;
            let enc = codec::encode(&coll, &bits, cols, rows)?;
            write_text(&output, &enc.matrix.to_pbm())?;
            if let Some(path) = trace {
                write_text(&path, &enc.trace.to_tsv())?;
            }
            println!(
                "embedded {} of {} payload bits into {}x{} -> {}",
                enc.bits_consumed,
                bits.len(),
                cols,
                rows,
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Decode {
            collection,
            input,
            num_bits,
            output,
        } => {
            let coll = load_collection(&collection)?;
            let matrix = BitMatrix::from_pbm(&read_text(&input)?)?;
            let bits = codec::decode(&coll, &matrix, num_bits)?;
            write_bytes(&output, &bits.to_bytes())?;
            println!("recovered {num_bits} bits -> {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { constraints, input } => {
            let spec = constraints.load()?;
            let matrix = BitMatrix::from_pbm(&read_text(&input)?)?;
            match first_violation(&spec, &matrix) {
                None => {
                    println!("valid");
                    Ok(ExitCode::SUCCESS)
                }
                Some((pattern, row, col)) => {
                    println!("invalid: forbidden pattern {pattern} occurs at row {row}, col {col}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Analyze { collection } => {
            let coll = load_collection(&collection)?;
            let report = collection::verify_collection(&coll);
            print!(
                "tiles={} contexts={} hist",
                coll.len(),
                report.context_count
            );
            for (count, n) in &report.histogram {
                print!(" {count}:{n}");
            }
            println!();
            println!(
                "overlaps horizontal={} vertical={} producible-rights={} producible-bottoms={}",
                report.horizontal_count,
                report.vertical_count,
                coll.producible_rights().len(),
                coll.producible_bottoms().len()
            );
            for (axis, name) in [
                (analysis::Axis::Horizontal, "row-automaton"),
                (analysis::Axis::Vertical, "column-automaton"),
            ] {
                let automaton = analysis::build_row_automaton(&coll, axis);
                let traps = analysis::find_embedding_traps(&automaton);
                println!(
                    "{name} states={} zero-bit-states={} traps={}",
                    automaton.state_count(),
                    automaton.bits.iter().filter(|&&b| b == 0).count(),
                    traps.len()
                );
                for trap in traps {
                    println!("  trap: states {trap:?}");
                }
            }
            println!(
                "verification: {}",
                if report.passed() {
                    "all invariants hold".to_string()
                } else {
                    format!("{} violations", report.violations.len())
                }
            );
            for v in &report.violations {
                println!("  violation: {v}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Render { input, style } => {
            let matrix = BitMatrix::from_pbm(&read_text(&input)?)?;
            let style = match style {
                Style::Unicode => RenderStyle::Unicode,
                Style::Ascii => RenderStyle::Ascii,
            };
            print!("{}", matrix.render(style));
            Ok(ExitCode::SUCCESS)
        }
        Command::NomSearch {
            constraints,
            width,
            height,
            budget,
            output,
        } => {
            let spec = constraints.load()?;
            let budget = budget.unwrap_or_else(env_work_limit);
            let frame = nom::nom_search_frame(width, height, &spec, budget)?;
            let coll = nom::nom_enumerate_centers(&frame, &spec)?;
            write_text(&output, &coll.to_text())?;
            println!(
                "found {}x{} frame with {} centers ({} bits/tile) -> {}",
                width,
                height,
                coll.len(),
                coll.bits_per_tile(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::NomEncode {
            collection,
            payload,
            cols,
            rows,
            num_bits,
            output,
        } => {
            let coll = load_nom(&collection)?;
            let bits = load_payload(&payload, num_bits)?;
            let capacity = nom::nom_capacity(&coll, cols, rows)?;
            let matrix = nom::nom_encode(&coll, &bits, cols, rows)?;
            write_text(&output, &matrix.to_pbm())?;
            println!(
                "embedded {} of {} payload bits into {}x{} -> {}",
                capacity.min(bits.len()),
                bits.len(),
                cols,
                rows,
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::NomDecode {
            collection,
            input,
            num_bits,
            output,
        } => {
            let coll = load_nom(&collection)?;
            let matrix = BitMatrix::from_pbm(&read_text(&input)?)?;
            let bits = nom::nom_decode(&coll, &matrix, num_bits)?;
            write_bytes(&output, &bits.to_bytes())?;
            println!("recovered {num_bits} bits -> {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// First occurrence of any forbidden pattern, as (pattern display, row, col).
fn first_violation(spec: &ConstraintSpec, m: &BitMatrix) -> Option<(String, usize, usize)> {
    for pat in spec.forbidden() {
        let (pw, ph) = (pat.width(), pat.height());
        if pw > m.width() || ph > m.height() {
            continue;
        }
        for top in 0..=m.height() - ph {
            for left in 0..=m.width() - pw {
                if m.submatrix(top, left, ph, pw).unwrap() == *pat {
                    let rows: Vec<String> = (0..ph)
                        .map(|r| pat.row(r).iter().map(|b| char::from(b'0' + b)).collect())
                        .collect();
                    return Some((rows.join("/"), top, left));
                }
            }
        }
    }
    None
}
