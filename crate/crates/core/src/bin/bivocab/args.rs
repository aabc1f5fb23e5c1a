use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bivocab",
    version,
    about = "Build, merge and evaluate bilingual unigram tokenizers"
)]
pub struct Cli {
    /// Flat key = value file mirroring the long flags; flags on the command
    /// line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Bundled data directory (default: $BIVOCAB_DATA_DIR, then the
    /// crate's data directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize text and optionally light-stem it.
    Prep(PrepArgs),
    /// Train a unigram tokenizer.
    Train(TrainArgs),
    /// Merge a target-language tokenizer into a base tokenizer.
    Merge(MergeArgs),
    /// Initialize embeddings for the tokens a merge added.
    InitEmbeddings(InitArgs),
    /// Compute evaluation metrics.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StemLanguage {
    Arabic,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    /// Input file, `-` for stdin.
    #[arg(long)]
    pub input: PathBuf,
    /// Output file (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub no_strip_html: bool,
    #[arg(long)]
    pub no_fold_accents: bool,
    #[arg(long)]
    pub no_nfc: bool,
    /// Replacement fold table.
    #[arg(long, value_name = "FILE")]
    pub fold_table: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub stem: Option<StemLanguage>,
    /// Prefix list replacing the bundled one.
    #[arg(long, value_name = "FILE", requires = "suffixes")]
    pub prefixes: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "prefixes")]
    pub suffixes: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub min_stem_len: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Corpus file or directory of files, one document per line.
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    /// Number of normal pieces.
    #[arg(long)]
    pub vocab_size: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed_vocab_size: Option<usize>,
    #[arg(long)]
    pub max_piece_len: Option<usize>,
    #[arg(long)]
    pub em_iterations: Option<usize>,
    #[arg(long)]
    pub prune_fraction: Option<f64>,
    #[arg(long)]
    pub char_coverage: Option<f64>,
    #[arg(long)]
    pub min_seed_frequency: Option<u64>,
    #[arg(long)]
    pub shard_size: Option<usize>,
    #[arg(long)]
    pub name: Option<String>,
    /// Language tag recorded in the model metadata.
    #[arg(long)]
    pub language: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    NonAsciiOnly,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Eviction {
    AscendingScore,
    LongestFirst,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// JSONL audit (default: `<out>.audit.jsonl`).
    #[arg(long)]
    pub audit: Option<PathBuf>,
    /// Category map TSV (default: `<out>.categories.tsv`).
    #[arg(long)]
    pub categories: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Scope::NonAsciiOnly)]
    pub overlap_scope: Scope,
    #[arg(long, value_enum, default_value_t = Eviction::AscendingScore)]
    pub eviction_order: Eviction,
    #[arg(long)]
    pub max_new_tokens: Option<usize>,
    #[arg(long)]
    pub expected_vocab_size: Option<usize>,
    /// Summary format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Nachos,
    Mean,
    Random,
}

#[derive(Debug, Args)]
pub struct InitArgs {
    /// EMB1 matrix aligned with the base tokenizer.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub base: PathBuf,
    /// Audit written by `merge`.
    #[arg(long)]
    pub audit: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Strategy::Nachos)]
    pub strategy: Strategy,
    /// Standard deviation for `random` (default: that of existing rows).
    #[arg(long)]
    pub random_scale: Option<f32>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(subcommand)]
    pub metric: Metric,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Metric {
    /// Tokens per word.
    Fertility {
        #[arg(long)]
        model: PathBuf,
        /// Corpus file, one document per line.
        #[arg(long, required = true)]
        corpus: Vec<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Non-existing word ratio.
    Newr {
        #[arg(long)]
        text: PathBuf,
        /// Reference word list, one word per line.
        #[arg(long)]
        wordset: PathBuf,
        /// Proper names to leave out of the count.
        #[arg(long)]
        names: Option<PathBuf>,
        /// Leave out words with no letter of this language's alphabet.
        #[arg(long)]
        lang: Option<String>,
        /// Count words made of digits and punctuation too.
        #[arg(long)]
        keep_numeric: bool,
        #[arg(long)]
        no_normalize: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Code-switching word ratio.
    Cswr {
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        lang: String,
        /// Rule pack directory replacing the bundled one.
        #[arg(long)]
        rulepack: Option<PathBuf>,
        #[arg(long)]
        no_normalize: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Token shares per category.
    Adoption {
        /// Category map TSV written by `merge`.
        #[arg(long)]
        categories: PathBuf,
        /// Lines of `slice<TAB>payload`; payload is text with `--model`,
        /// otherwise whitespace-separated token ids.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}
