mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "hermat",
    version,
    about = "Exact verification runs for Hermitian matrix integral expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Largest number of half-edges any enumeration may touch.
    #[arg(long, global = true, default_value_t = 14)]
    budget: u32,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scalar Gaussian expansion with weights t_j / j!.
    ScalarExpand(ExpandArgs),
    /// Matrix expansion by brute-force pairing sums.
    MatrixExpand(ExpandArgs),
    /// Ribbon graph isomorphism classes for a profile or a topology.
    RibbonEnum(RibbonArgs),
    /// Graph sum against the closed form for one (g, s).
    PennerVerify(GsArgs),
    /// Graph sums against the closed form for every (g, s) within the budget.
    PennerTable,
    /// KP residual of the determinant tau-function.
    KpVerify(KpArgs),
    /// Stability and commutation checks for the sl(2) operators.
    Sl2Verify(Sl2Args),
    /// Pairing sums against ribbon-class sums for every profile up to --trunc half-edges.
    OracleCrosscheck(TruncArgs),
}

#[derive(Args, Debug)]
pub struct TruncArgs {
    #[arg(long, default_value_t = 8)]
    pub trunc: u32,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    /// Weighted degree (half-edge) truncation.
    #[arg(long, default_value_t = 8)]
    pub trunc: u32,
    /// Only report the coefficient of this profile, e.g. `4:1` or `3:2,4:1`.
    #[arg(long)]
    pub profile: Option<String>,
}

#[derive(Args, Debug)]
pub struct RibbonArgs {
    #[arg(long, conflicts_with = "gs")]
    pub profile: Option<String>,
    /// Genus and boundary count as `g,s`.
    #[arg(long)]
    pub gs: Option<String>,
    /// Drop disconnected classes (profile mode).
    #[arg(long)]
    pub connected: bool,
}

#[derive(Args, Debug)]
pub struct GsArgs {
    #[arg(long)]
    pub gs: String,
}

#[derive(Args, Debug)]
pub struct KpArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Weight through which the residual is checked.
    #[arg(long, default_value_t = 8)]
    pub trunc: u32,
    /// `gaussian`, `random`, `random:SEED`, `soliton:PATH` or `file:PATH`.
    #[arg(long, default_value = "gaussian")]
    pub moments: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct Sl2Args {
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub trunc: i64,
    /// Fixed potential `a1,...,a2k`; symbolic when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            return report_error(&CliError::Invalid(e.to_string()));
        }
    }
    let result = match &cli.command {
        Command::ScalarExpand(a) => commands::scalar_expand(a, cli.format, cli.budget),
        Command::MatrixExpand(a) => commands::matrix_expand(a, cli.format, cli.budget),
        Command::RibbonEnum(a) => commands::ribbon_enum(a, cli.format, cli.budget),
        Command::PennerVerify(a) => commands::penner_verify(a, cli.format, cli.budget),
        Command::PennerTable => commands::penner_table(cli.format, cli.budget),
        Command::KpVerify(a) => commands::kp_verify(a, cli.format),
        Command::Sl2Verify(a) => commands::sl2_verify(a, cli.format),
        Command::OracleCrosscheck(a) => commands::oracle_crosscheck(a, cli.format, cli.budget),
    };
    match result {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.text),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                return report_error(&CliError::Invalid(format!("cannot write output: {e}")));
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{body}");
    ExitCode::from(e.exit_code())
}
