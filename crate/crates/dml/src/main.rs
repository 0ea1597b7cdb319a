use std::io::IsTerminal;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dml::{exit, Options, Outcome, StdOutput};
use dml_core::lower::PlanStrategy;
use dml_core::runtime::{Config, Path};

#[derive(Parser)]
#[command(name = "dml", version, about = "Run and check dml programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check and execute a program.
    Run {
        file: std::path::PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Parse and resolve a program without running it.
    Check {
        file: std::path::PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Interactive session reading statements from stdin.
    Repl {
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlanArg {
    Greedy,
    Sized,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Direct,
    Lowered,
    Differential,
}

#[derive(Args)]
struct Flags {
    /// Print the syntax tree before running.
    #[arg(long)]
    dump_ast: bool,
    /// Print the loop IR of every construct before running.
    #[arg(long)]
    dump_ir: bool,
    /// Clause ordering strategy.
    #[arg(long, value_enum, default_value = "greedy")]
    plan: PlanArg,
    /// Execution path for declarative constructs.
    #[arg(long, value_enum, default_value = "lowered")]
    path: PathArg,
    /// Report every construct evaluation on stderr.
    #[arg(long)]
    trace: bool,
    /// Maximum call depth.
    #[arg(long, default_value_t = 10_000)]
    recursion_limit: usize,
}

impl Flags {
    fn options(&self) -> Options {
        Options {
            config: Config {
                path: match self.path {
                    PathArg::Direct => Path::Direct,
                    PathArg::Lowered => Path::Lowered,
                    PathArg::Differential => Path::Differential,
                },
                plan: match self.plan {
                    PlanArg::Greedy => PlanStrategy::Greedy,
                    PlanArg::Sized => PlanStrategy::Sized,
                },
                trace: self.trace,
                recursion_limit: self.recursion_limit,
            },
            dump_ast: self.dump_ast,
            dump_ir: self.dump_ir,
        }
    }
}

fn read(file: &std::path::Path) -> Result<(String, String), i32> {
    let name = file.display().to_string();
    std::fs::read_to_string(file)
        .map(|src| (name.clone(), src))
        .map_err(|e| {
            eprintln!("{}: error: cannot read file: {}", name, e);
            exit::USAGE
        })
}

fn finish(outcome: Outcome) -> i32 {
    if let Some(d) = outcome.diagnostic {
        eprintln!("{}", d);
    }
    outcome.code
}

fn dispatch(command: Command) -> i32 {
    match command {
        Command::Run { file, flags } => match read(&file) {
            Ok((name, src)) => {
                let opts = flags.options();
                finish(dml::with_big_stack(move || {
                    dml::run_source(&name, &src, &opts, StdOutput).0
                }))
            }
            Err(code) => code,
        },
        Command::Check { file, flags } => match read(&file) {
            Ok((name, src)) => finish(dml::check_only(&name, &src, &flags.options(), StdOutput).0),
            Err(code) => code,
        },
        Command::Repl { flags } => {
            let opts = flags.options();
            dml::with_big_stack(move || {
                let stdin = std::io::stdin();
                let interactive = stdin.is_terminal();
                let mut stderr = std::io::stderr();
                dml::repl::run(stdin.lock(), StdOutput, &mut stderr, opts, interactive).0
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(dispatch(cli.command) as u8)
}
