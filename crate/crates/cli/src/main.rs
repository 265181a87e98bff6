//! `predmap`: validate, canonicalize and query Prolog knowledge-base files
//! against an entity schema.

mod commands;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliConfig;

#[derive(Parser, Debug)]
#[command(
    name = "predmap",
    version,
    about = "Map entity schemas to Prolog facts and query knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Schema file (`.pls`) of class/3 clauses.
    #[arg(long, global = true, value_name = "PATH")]
    schema: Option<PathBuf>,
    /// Knowledge-base file (`.pl`) of ground facts.
    #[arg(long, global = true, value_name = "PATH")]
    kb: Option<PathBuf>,
    /// Goal term for `query`.
    #[arg(long, global = true, value_name = "TERM", allow_hyphen_values = true)]
    goal: Option<String>,
    /// Write the payload here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Accept facts that no schema class resolves.
    #[arg(long, global = true)]
    permissive: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Check that the KB parses, is ground and (with --schema) decodes.
    Validate,
    /// Print the KB in canonical form.
    Canon,
    /// Print the most general predicate of every concrete schema class.
    Decls,
    /// Print facts matching --goal with their bindings.
    Query,
    /// Decode and re-encode every fact, checking they are unchanged.
    Roundtrip,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = CliConfig {
        schema: cli.schema,
        kb: cli.kb,
        goal: cli.goal,
        out: cli.out,
        permissive: cli.permissive,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr().lock();
    let result = match cli.command {
        Command::Validate => commands::validate(&cfg, &mut out, &mut err),
        Command::Canon => commands::canon(&cfg, &mut out),
        Command::Decls => commands::decls(&cfg, &mut out),
        Command::Query => commands::query(&cfg, &mut out),
        Command::Roundtrip => commands::roundtrip(&cfg, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "predmap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
