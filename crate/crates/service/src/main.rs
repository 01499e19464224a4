use std::io::{self, IsTerminal};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use sigmadb::exec::StatementOutcome;
use sigmadb::{Catalog, SolveBudget};
use sigmadb_service::render::{outcome_message, render};
use sigmadb_service::repl::Repl;
use sigmadb_service::{explain, load_catalog, run_file, save_catalog, EngineConfig, OutputFormat, ServiceError};

#[derive(Parser)]
#[command(name = "sigmadb", version, about = "Relational engine for sigma complete relations")]
struct Cli {
    /// Catalog script loaded at start and saved after every change.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 10_000)]
    max_solutions: usize,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_nodes: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    timeout_ms: u64,
    /// table, csv or json
    #[arg(long, global = true, default_value = "table")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive shell (the default).
    Repl,
    /// Execute a script and print the result of each query.
    Run { script: PathBuf },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Print the optimized plan of a query.
    Explain { sql: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn open_catalog(config: &EngineConfig) -> Result<Catalog, ServiceError> {
    match &config.catalog_path {
        Some(p) if p.exists() => load_catalog(p),
        _ => Ok(Catalog::new()),
    }
}

fn run(cli: Cli) -> Result<(), ServiceError> {
    let mut config = EngineConfig {
        catalog_path: cli.catalog,
        budget: SolveBudget {
            max_solutions: cli.max_solutions,
            max_nodes: cli.max_nodes,
            timeout: Duration::from_millis(cli.timeout_ms),
        },
        format: cli.format,
        ..EngineConfig::default()
    };
    config.validate()?;
    let catalog = open_catalog(&config)?;
    match cli.command.unwrap_or(Command::Repl) {
        Command::Repl => {
            let interactive = io::stdin().is_terminal();
            let mut repl = Repl::new(catalog, config);
            repl.run(io::stdin().lock(), io::stdout().lock(), interactive)
                .map_err(|e| ServiceError::io("<stdio>", e))
        }
        Command::Run { script } => {
            let out = run_file(&catalog, &script, &config.budget)?;
            for e in &out.executed {
                match &e.outcome {
                    StatementOutcome::Rows(r) => print!("{}", render(r, config.format)),
                    other => println!("{}", outcome_message(other).unwrap_or_default()),
                }
            }
            if let (true, Some(p)) = (out.changed(), &config.catalog_path) {
                save_catalog(&out.catalog, p)?;
            }
            Ok(())
        }
        Command::Serve { port, host } => {
            config.listen = SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| ServiceError::io("<runtime>", e))?;
            eprintln!("listening on http://{}", config.listen);
            runtime.block_on(sigmadb_service::http::serve(config, catalog))
        }
        Command::Explain { sql } => {
            let plan = explain(&catalog, &sql).map_err(|source| ServiceError::Statement {
                index: 1,
                line: 1,
                source,
            })?;
            print!("{plan}");
            Ok(())
        }
    }
}
