//! Command-line front end: `diacorp <command>` over a vertical corpus and a project config.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod commands;
pub mod config;
pub mod error;

pub use config::ProjectConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "diacorp", version, about = "Diachronic corpus mining over lemmatised vertical corpora")]
pub struct Cli {
    /// Vertical corpus file; repeat for several. Overrides `corpus` in the config.
    #[arg(long, global = true)]
    pub corpus: Vec<PathBuf>,
    /// Project config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory. Overrides `output` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Abort on the first malformed document.
    #[arg(long, global = true, conflicts_with = "lenient")]
    pub strict: bool,
    /// Skip malformed documents and write a rejects report.
    #[arg(long, global = true)]
    pub lenient: bool,
    /// Machine-readable stdout, and errors as one JSON line on stderr.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Corpus size, dating coverage and configured group totals.
    Stats,
    /// Per-bin frequency of lemma groups over equal-mass chronological bins.
    Freq(FreqArgs),
    /// Share of each target group's occurrences with a probe group within the window.
    Assoc(AssocArgs),
    /// Dice association of two groups in each chronological bin.
    Dice(DiceArgs),
    /// Distributional neighbours of a lemma and the similarity graph between them.
    Field(FieldArgs),
    /// Keyword-in-context lines for a group.
    Kwic(KwicArgs),
    /// Synthetic corpus and ground-truth manifest from a plan.
    GenFixture(GenFixtureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stats => "stats",
            Command::Freq(_) => "freq",
            Command::Assoc(_) => "assoc",
            Command::Dice(_) => "dice",
            Command::Field(_) => "field",
            Command::Kwic(_) => "kwic",
            Command::GenFixture(_) => "gen-fixture",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum PolicyArg {
    Midpoint,
    Start,
    End,
}

impl From<PolicyArg> for diacorp::DatePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Midpoint => diacorp::DatePolicy::Midpoint,
            PolicyArg::Start => diacorp::DatePolicy::Start,
            PolicyArg::End => diacorp::DatePolicy::End,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum ScopeArg {
    All,
    Dated,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum WeightingArg {
    Raw,
    Ppmi,
    Logdice,
}

#[derive(Debug, Default, Args, Serialize)]
pub struct BinArgs {
    /// Token mass at which a chronological bin closes.
    #[arg(long)]
    pub target_mass: Option<u64>,
    /// Year used for interval-dated documents.
    #[arg(long, value_enum)]
    pub date_policy: Option<PolicyArg>,
    /// Widest date interval, in years, kept in chronological analyses.
    #[arg(long)]
    pub max_span: Option<i32>,
}

#[derive(Debug, Args, Serialize)]
pub struct FreqArgs {
    /// Group name from the config, or `name=lemma,lemma`. Defaults to every configured group.
    #[arg(long = "group")]
    pub groups: Vec<String>,
    #[command(flatten)]
    pub bins: BinArgs,
    /// Plot occurrences per 10,000 tokens instead of raw counts.
    #[arg(long)]
    pub rate: bool,
    /// Centred moving average of this odd width on the plot.
    #[arg(long)]
    pub smooth: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct AssocArgs {
    /// Target group; repeat for one row per group.
    #[arg(long = "target", required = true)]
    pub targets: Vec<String>,
    /// Group whose proximity counts as an association.
    #[arg(long)]
    pub probe: String,
    /// Largest distance, in words, of an association.
    #[arg(long)]
    pub window: Option<u32>,
    /// Count over dated documents only, or over all of them.
    #[arg(long, value_enum)]
    pub scope: Option<ScopeArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiceArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    /// Largest distance, in words, of a co-occurrence.
    #[arg(long)]
    pub window: Option<u32>,
    #[command(flatten)]
    pub bins: BinArgs,
    /// Centred moving average of this odd width on the plot.
    #[arg(long)]
    pub smooth: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct FieldArgs {
    /// Target lemma.
    #[arg(long)]
    pub target: String,
    /// First working year of the documents modelled.
    #[arg(long, requires = "to")]
    pub from: Option<i32>,
    /// Last working year of the documents modelled.
    #[arg(long, requires = "from")]
    pub to: Option<i32>,
    /// Co-occurrence window, in words.
    #[arg(long)]
    pub window: Option<u32>,
    /// Lemmas rarer than this are left out of the model.
    #[arg(long)]
    pub min_freq: Option<u64>,
    /// Number of neighbours.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingArg>,
    /// Similarity at or above which two neighbours are joined.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub bins: BinArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct KwicArgs {
    #[arg(long)]
    pub group: String,
    /// Context words on each side.
    #[arg(long)]
    pub window: Option<u32>,
    /// Most lines printed and written.
    #[arg(long, default_value_t = 50)]
    pub limit: usize,
    /// Only documents whose working year is in [from, to].
    #[arg(long, requires = "to")]
    pub from: Option<i32>,
    #[arg(long, requires = "from")]
    pub to: Option<i32>,
    #[command(flatten)]
    pub bins: BinArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct GenFixtureArgs {
    /// Fixture plan (TOML).
    #[arg(long)]
    pub plan: PathBuf,
    /// Random seed; the same plan and seed give the same bytes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// File stem of the corpus and manifest.
    #[arg(long, default_value = "fixture")]
    pub name: String,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string());
            let _ = if args.iter().any(|a| a == "--json") {
                writeln!(stderr, "{}", err.to_json())
            } else {
                write!(stderr, "{e}")
            };
            return err.exit_code();
        }
    };
    let json = cli.json;
    match commands::execute(&cli) {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            0
        }
        Err(e) => {
            let _ = if json { writeln!(stderr, "{}", e.to_json()) } else { writeln!(stderr, "error: {e}") };
            e.exit_code()
        }
    }
}
