//! Batch front end: ingest trade records, build yearly networks, score,
//! attack and summarise them. Each command writes plain CSV tables plus a
//! `manifest.json` into its output directory.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod manifest;
pub mod table;

pub const CONFIG_ENV: &str = "IOTN_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unknown names or an invalid config file. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input data. Exit code 2.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<iotn::Error> for CliError {
    fn from(e: iotn::Error) -> Self {
        use iotn::Error as E;
        match e {
            E::Config(_) | E::Argument(_) | E::UnknownIndicator(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    /// CSV plus a JSON mirror of every table.
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "iotn",
    version,
    about = "Oil trade network construction, influence ranking and attack simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn trade records into yearly edge lists.
    Build(BuildArgs),
    /// Score and rank economies with influence indicators.
    Rank(RankArgs),
    /// Simulate node-removal attacks and measure robustness.
    Attack(AttackArgs),
    /// Spearman correlations between indicators.
    Correlate(CorrelateArgs),
    /// Mean indicator values of organisations over time.
    Orgs(OrgsArgs),
    /// Module partitions of each yearly network.
    Communities(CommunitiesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// JSON config file.
    #[arg(long, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Years to process, e.g. `1988-2017` or `2003,2008,2014`.
    #[arg(long)]
    pub years: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// Trade records CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    /// Directory written by `build`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub indicators: Vec<String>,
    /// Seed for module detection.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Indicator names and/or `random`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub strategies: Vec<String>,
    #[arg(long, default_value_t = iotn::attack::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Seed for random trials and module detection.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `static` or `adaptive`.
    #[arg(long, default_value = "static")]
    pub mode: String,
    /// `weak` or `strong`.
    #[arg(long, default_value = "weak")]
    pub connectivity: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub indicators: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct OrgsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub indicators: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CommunitiesArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

/// Parses `args` (program name first) and runs the command. Help and
/// version requests print and succeed.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let text = e.render().to_string();
            return Err(CliError::Usage(
                text.trim_start_matches("error: ").trim_end().to_string(),
            ));
        }
    };
    let argv: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match cli.command {
        Command::Build(a) => commands::cmd_build(&a, argv),
        Command::Rank(a) => commands::cmd_rank(&a, argv),
        Command::Attack(a) => commands::cmd_attack(&a, argv),
        Command::Correlate(a) => commands::cmd_correlate(&a, argv),
        Command::Orgs(a) => commands::cmd_orgs(&a, argv),
        Command::Communities(a) => commands::cmd_communities(&a, argv),
    }
}
