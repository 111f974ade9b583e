//! `principar`: parse sentences, manage a lexicon directory, run benchmarks.

mod bench;
mod lex;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use principar::engine::Guess;
use principar::lexicon::LexiconError;
use principar::network::NetworkError;
use principar::TreeFormat;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("grammar {path}: {source}")]
    Grammar { path: PathBuf, source: NetworkError },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Parse(#[from] principar::engine::ParseError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser)]
#[command(name = "principar", version, about = "Principle-based parser over a grammar network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse sentences given as arguments, or one per line on stdin.
    Parse(ParseArgs),
    /// Read, update and compile a lexicon directory.
    #[command(subcommand)]
    Lex(LexCommand),
    /// Timing and correctness harnesses.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatsFormat {
    Text,
    Json,
}

#[derive(Args, Clone)]
pub struct GrammarArgs {
    /// Grammar network file; the bundled English grammar if absent.
    #[arg(long, env = "PRINCIPAR_GRAMMAR")]
    pub grammar: Option<PathBuf>,
    /// Lexicon directory holding primary.lex and secondary.plex; the
    /// bundled English lexicon if absent.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Args)]
pub struct ParseArgs {
    #[command(flatten)]
    pub source: GrammarArgs,
    /// Upper bound on trees printed per sentence.
    #[arg(long, default_value_t = 64)]
    pub max_trees: usize,
    #[arg(long, default_value = "bracketed", value_parser = |s: &str| s.parse::<TreeFormat>())]
    pub format: TreeFormat,
    /// Print a statistics line after each sentence.
    #[arg(long, num_args = 0..=1, default_missing_value = "text", require_equals = true)]
    pub stats: Option<StatsFormat>,
    /// Open-class categories (n, v) assumed for unknown words.
    #[arg(long, value_delimiter = ',', value_parser = parse_guess)]
    pub guess_unknown: Vec<Guess>,
    /// Worker threads; output keeps input order.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Give up on a sentence after this many chart items.
    #[arg(long, default_value_t = 2_000_000)]
    pub max_items: usize,
    pub sentences: Vec<String>,
}

fn parse_guess(s: &str) -> Result<Guess, String> {
    Guess::parse(s).ok_or_else(|| format!("unknown category `{s}` (n, v)"))
}

#[derive(Subcommand)]
pub enum LexCommand {
    /// Print the entry for a word, or "absent".
    Get {
        #[command(flatten)]
        source: GrammarArgs,
        word: String,
    },
    /// Append an entry to the directory's buffer file.
    Put {
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        lexicon: PathBuf,
        /// Entry s-expression.
        entry: String,
    },
    /// Build a secondary table from a text lexicon.
    Compile {
        #[arg(long, env = "PRINCIPAR_GRAMMAR")]
        grammar: Option<PathBuf>,
        /// Text lexicon; the bundled English lexicon if absent.
        input: Option<PathBuf>,
        /// Output table; defaults to secondary.plex in --lexicon.
        output: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Write a deterministic synthetic text lexicon.
    Generate {
        #[arg(long, default_value_t = 90_000)]
        entries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        output: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum BenchCommand {
    /// Secondary-table lookup latency on a synthetic lexicon.
    Lexicon {
        #[arg(long, default_value_t = 90_000)]
        entries: usize,
        #[arg(long, default_value_t = 100_000)]
        lookups: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Parse time against sentence length on an ambiguous grammar.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Compare tree sets with brute-force enumeration on random grammars.
    Oracle {
        #[arg(long, default_value_t = 100)]
        grammars: usize,
        #[arg(long, default_value_t = 20)]
        sentences: usize,
        #[arg(long, default_value_t = 10)]
        maxlen: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    // usage errors exit 1; 2 is reserved for sentences without a parse
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            e.print().ok();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Parse(args) => parse::run(args),
        Command::Lex(cmd) => lex::run(cmd),
        Command::Bench(cmd) => bench::run(cmd),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("principar: {e}");
            ExitCode::from(1)
        }
    }
}
