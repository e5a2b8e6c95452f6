//! `gkred`: runs the verification suites and small exact computations.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad
//! input or a computation that could not be carried out.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gkred::pipeline::{self, bracket_text, type_locus_text, Context, Overrides, RunConfig, Suite};

#[derive(Parser, Debug)]
#[command(name = "gkred", version, about = "Exact and numeric checks for generalized Kähler reduction")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample points per numeric check.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Tolerance for residuals that should vanish.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Deformation scale, e.g. `1/10`.
    #[arg(long, global = true)]
    lambda: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here as well as to stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Run with a deformation that fails the integrability equations.
    #[arg(long, global = true)]
    allow_nonintegrable: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    All,
    Appendix,
    Reduction,
    Gk,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run verification suites.
    Verify {
        #[arg(value_enum, default_value_t = Which::All)]
        which: Which,
    },
    /// Untwisted Courant bracket of two section expressions, e.g.
    /// `gkred bracket "z0*Eb1" "Fb0 + 2*dz1"`.
    Bracket {
        lhs: String,
        rhs: String,
        /// Also split the result into its V+ and V- parts.
        #[arg(long)]
        project: bool,
    },
    /// Type-jumping locus of the configured deformation.
    TypeLocus,
}

fn config(cli: &Cli) -> gkred::Result<RunConfig> {
    let ov = Overrides {
        seed: cli.seed,
        points: cli.points,
        tol: cli.tol,
        lambda: cli.lambda.clone(),
        allow_nonintegrable: cli.allow_nonintegrable,
    };
    match &cli.config {
        Some(p) => RunConfig::load(p, &ov),
        None => RunConfig::from_toml("", &ov),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    print!("{text}");
    if let Some(p) = &cli.output {
        std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(())
}

fn real_main(cli: &Cli) -> Result<bool, String> {
    let cfg = config(cli).map_err(|e| e.to_string())?;
    match &cli.cmd {
        Cmd::Verify { which } => {
            let suite = match which {
                Which::All => Suite::All,
                Which::Appendix => Suite::Appendix,
                Which::Reduction => Suite::Reduction,
                Which::Gk => Suite::Gk,
            };
            let report = pipeline::run(suite, cfg).map_err(|e| e.to_string())?;
            let text = match cli.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            };
            emit(cli, &text)?;
            Ok(report.all_pass())
        }
        Cmd::Bracket { lhs, rhs, project } => {
            let ctx = Context::new(cfg);
            emit(cli, &bracket_text(&ctx, lhs, rhs, *project).map_err(|e| e.to_string())?)?;
            Ok(true)
        }
        Cmd::TypeLocus => {
            let ctx = Context::new(cfg);
            emit(cli, &type_locus_text(&ctx).map_err(|e| e.to_string())?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["gkred", "verify", "gk", "--seed", "3", "--format", "json"]).unwrap();
        assert_eq!(cli.seed, Some(3));
        assert_eq!(cli.format, Format::Json);
        assert!(matches!(cli.cmd, Cmd::Verify { which: Which::Gk }));
        assert!(Cli::try_parse_from(["gkred", "verify", "nothing"]).is_err());
    }
}
