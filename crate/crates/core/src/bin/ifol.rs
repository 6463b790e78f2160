use std::io::{BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ifol::check;
use ifol::session::demo::{self, DemoOptions};
use ifol::session::{Session, SessionError, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "ifol", version, about = "Intensional FOL engine with Know deduction")]
struct Cli {
    /// KB file executed before the subcommand
    #[arg(long, global = true)]
    kb: Option<PathBuf>,
    /// Introspection depth for forward chaining
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Write derivation records as JSON lines
    #[arg(long, global = true)]
    trace_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read commands from standard input
    Repl,
    /// Run the video-retrieval walkthrough and check every stage
    Demo {
        /// Corpus file replacing the bundled one
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = demo::DEFAULT_TAU)]
        tau: u64,
    },
    /// Run the randomized law and oracle suites
    Check {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, SessionError> {
    match cli.command {
        Command::Repl => {
            let mut s = Session::new().with_budget(cli.budget);
            if let Some(kb) = &cli.kb {
                for line in s.load_file(kb)? {
                    println!("{line}");
                }
            }
            repl(&mut s);
            if let Some(path) = &cli.trace_out {
                s.write_trace(path)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo { corpus, tau } => {
            let corpus = match corpus {
                Some(p) => std::fs::read_to_string(&p)
                    .map_err(|e| SessionError::Io { path: p.display().to_string(), message: e.to_string() })?,
                None => demo::DEMO_CORPUS.to_owned(),
            };
            let report = demo::run(&DemoOptions { corpus, tau, budget: cli.budget })?;
            for line in &report.lines {
                println!("{line}");
            }
            if let Some(path) = &cli.trace_out {
                report.session.write_trace(path)?;
            }
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &report.failures {
                    eprintln!("mismatch: {f}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Check { cases, seed } => {
            let outcomes = check::run_all(cases, seed);
            for o in &outcomes {
                println!("{o}");
            }
            Ok(if outcomes.iter().all(|o| o.passed()) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn repl(s: &mut Session) {
    let stdin = std::io::stdin();
    let interactive = stdin.is_terminal();
    let prompt = || {
        if interactive {
            print!("ifol> ");
            let _ = std::io::stdout().flush();
        }
    };
    prompt();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        if matches!(line.trim(), "quit" | "exit") {
            break;
        }
        match s.execute(&line) {
            Ok(out) if !out.is_empty() => println!("{out}"),
            Ok(_) => {}
            Err(e) => println!("error: {e}"),
        }
        prompt();
    }
}
