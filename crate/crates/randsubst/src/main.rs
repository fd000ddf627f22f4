use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use randsubst::{
    analyze, analyze_catalogue, get_example, to_csv, to_json, to_text, Analysis, AnalysisOptions,
    Error, RandomSubstitution, Result,
};

#[derive(Parser)]
#[command(
    name = "randsubst",
    version,
    about = "Topological entropy bounds for primitive random substitutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a rule file and check semi-compatibility
    Validate {
        /// Rule file (see `analyze --help` for the format)
        file: PathBuf,
    },
    /// Full analysis: matrix, eigendata, exactness conditions, bounds, entropy
    ///
    /// Rule files name the alphabet first and then one image set per letter:
    ///
    ///     alphabet = a b
    ///     a -> ab | ba
    ///     b -> aa        # comments run to the end of the line
    Analyze {
        file: PathBuf,
        /// Deepest bound level to compute
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=64))]
        max_level: u32,
        /// Stop the estimate once the bracket gap drops below this
        #[arg(long, default_value_t = 0.01, value_parser = parse_tolerance)]
        tol: f64,
        /// Search depth for refuting the exactness conditions
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=16))]
        condition_levels: u32,
        /// Stored-letter budget per enumeration level
        #[arg(long, default_value_t = randsubst::DEFAULT_LETTER_CAP)]
        letter_cap: usize,
        /// Tile lengths for the geometric rescaling, comma-separated
        #[arg(long, value_delimiter = ',')]
        psi: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Enumerate the legal words of one length by brute force
    Language {
        file: PathBuf,
        /// Word length to collect
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=32))]
        length: u64,
        /// Deepest inflation level the oracle may walk
        #[arg(long, default_value_t = randsubst::DEFAULT_ORACLE_LEVEL_CAP, value_parser = clap::value_parser!(u32).range(1..=64))]
        m_cap: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Analyse a built-in example (see `catalogue list`)
    Catalogue {
        /// Entry name, or `list` to print the available names
        name: String,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=64))]
        max_level: u32,
        #[arg(long, default_value_t = 0.01, value_parser = parse_tolerance)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn parse_tolerance(s: &str) -> std::result::Result<f64, String> {
    let value: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err("must be a strictly positive number".into())
    }
}

fn read_rules(path: &Path) -> Result<RandomSubstitution> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    RandomSubstitution::parse(&text)
}

/// Write to stdout, treating a closed pipe (`randsubst ... | head`) as a
/// normal end of output rather than a panic.
fn write_stdout(payload: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(payload.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(2);
    }
}

fn emit(analysis: &Analysis, format: Format) {
    match format {
        Format::Json => write_stdout(&format!("{}\n", to_json(analysis))),
        Format::Text => write_stdout(&to_text(analysis)),
        Format::Csv => write_stdout(&to_csv(analysis)),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { file } => {
            let th = read_rules(&file)?;
            th.ensure_valid()?;
            let primitivity = th
                .matrix()?
                .primitivity_exponent()
                .map(|k| format!("primitive (exponent {k})"))
                .unwrap_or_else(|| "not primitive".into());
            write_stdout(&format!(
                "valid: {} letters, semi-compatible, {}\n",
                th.alphabet().size(),
                primitivity
            ));
            Ok(())
        }
        Command::Analyze {
            file,
            max_level,
            tol,
            condition_levels,
            letter_cap,
            psi,
            format,
        } => {
            let th = read_rules(&file)?;
            let options = AnalysisOptions {
                max_level,
                tolerance: tol,
                condition_levels,
                letter_cap,
                psi,
                ..AnalysisOptions::default()
            };
            let analysis = analyze(&th, &format!("file:{}", file.display()), &options)?;
            emit(&analysis, format);
            Ok(())
        }
        Command::Language {
            file,
            length,
            m_cap,
            format,
        } => {
            if format == Format::Csv {
                return Err(Error::Io(
                    "the csv format only carries bounds tables; use --format text or json".into(),
                ));
            }
            let th = read_rules(&file)?;
            let options = AnalysisOptions {
                language_length: Some(length as usize),
                oracle_level_cap: m_cap,
                ..AnalysisOptions::default()
            };
            let analysis = analyze(&th, &format!("file:{}", file.display()), &options)?;
            emit(&analysis, format);
            Ok(())
        }
        Command::Catalogue {
            name,
            max_level,
            tol,
            format,
        } => {
            if name == "list" {
                let mut listing = String::new();
                for name in randsubst::names() {
                    listing.push_str(name);
                    listing.push('\n');
                }
                write_stdout(&listing);
                return Ok(());
            }
            let entry = get_example(&name)?;
            let options = AnalysisOptions {
                max_level,
                tolerance: tol,
                ..AnalysisOptions::default()
            };
            let analysis = analyze_catalogue(&entry, &options)?;
            emit(&analysis, format);
            Ok(())
        }
    }
}

/// 0 = success, 1 = the input is not a usable substitution,
/// 2 = resource limits or usage problems.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::MissingRule { .. }
        | Error::UnknownGlyph { .. }
        | Error::Invalid(_)
        | Error::NotPrimitive
        | Error::DegenerateInflation { .. } => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
