use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use regmod::asp::{self, SolverConfig};
use regmod::driver::{self, Backend, OutcomeJson, SolveOptions, SolveOutcome};
use regmod::frontend::{parse_problem, print_problem};

const EXIT_SAT: u8 = 0;
const EXIT_UNSAT: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 65;
const EXIT_UNAVAILABLE: u8 = 69;

/// Finds regular Herbrand models of constrained Horn clauses over algebraic data types.
#[derive(Parser)]
#[command(name = "regmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability of an SMT-LIB Horn problem.
    Solve(SolveArgs),
    /// Write a generated benchmark problem.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    /// List membership is preserved by reversal, over K elements.
    MemberRev {
        k: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Native,
    Asp,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    backend: BackendKind,
    #[arg(long, default_value = "clingo")]
    solver_path: PathBuf,
    /// Largest number of states per sort to try.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    max_states: u32,
    /// Cap on the counterexample term depth (defaults to the state bound).
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<f64>,
    #[arg(long)]
    no_symmetry_breaking: bool,
    /// Write the ASP programs for every bound into DIR instead of solving.
    #[arg(long, value_name = "DIR")]
    emit_asp: Option<PathBuf>,
    /// After solving with the ASP backend, count the models at the solving bound.
    #[arg(long)]
    count_models: bool,
    /// Time limit for model counting.
    #[arg(long, value_name = "SECONDS", default_value_t = 120)]
    count_timeout: u64,
    #[arg(long)]
    json: bool,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("regmod: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Gen {
            family: Family::MemberRev { k, output },
        } => {
            if k == 0 {
                return fail(EXIT_USAGE, "K must be at least 1");
            }
            match std::fs::write(&output, print_problem(&driver::gen_member_rev(k))) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(EXIT_INPUT, format!("{}: {e}", output.display())),
            }
        }
        Command::Solve(args) => solve(args),
    }
}

fn solve(args: SolveArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", args.file.display())),
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_INPUT, format!("{}:{e}", args.file.display())),
    };
    let symmetry_breaking = !args.no_symmetry_breaking;

    if let Some(dir) = &args.emit_asp {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return fail(EXIT_INPUT, format!("{}: {e}", dir.display()));
        }
        for n in 1..=args.max_states {
            let bounds = vec![n; problem.signature.num_sorts()];
            let depth = args.max_depth.map_or(n as usize, |d| d.min(n as usize));
            let files = [
                (format!("model_{n}.lp"), asp::emit_model_search(&problem, &bounds, symmetry_breaking)),
                (format!("counterexample_{n}.lp"), asp::emit_counterexample_search(&problem, depth)),
            ];
            for (name, program) in files {
                let path = dir.join(name);
                if let Err(e) = std::fs::write(&path, program.text) {
                    return fail(EXIT_INPUT, format!("{}: {e}", path.display()));
                }
            }
        }
        return ExitCode::SUCCESS;
    }

    let timeout = match args.timeout.map(Duration::try_from_secs_f64) {
        None => None,
        Some(Ok(d)) => Some(d),
        Some(Err(_)) => return fail(EXIT_USAGE, "invalid --timeout"),
    };
    let solver = SolverConfig::new(&args.solver_path);
    let backend = match args.backend {
        BackendKind::Native => Backend::Native,
        BackendKind::Asp => {
            if !asp::solver_available(&args.solver_path) {
                return fail(EXIT_UNAVAILABLE, format!("solver `{}` not found", args.solver_path.display()));
            }
            Backend::Asp(solver.clone())
        }
    };
    if args.count_models && !matches!(backend, Backend::Asp(_)) {
        return fail(EXIT_USAGE, "--count-models needs --backend asp");
    }
    let options = SolveOptions {
        backend,
        max_bound: args.max_states,
        max_depth: args.max_depth,
        time_limit: timeout,
        symmetry_breaking,
        ..SolveOptions::default()
    };
    let json = args.json;
    let (outcome, log) = match driver::solve_with(&problem, &options, |e| {
        if !json {
            println!("{}", driver::render_log_line(e));
        }
    }) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_UNAVAILABLE, e),
    };
    if json {
        match serde_json::to_string_pretty(&OutcomeJson::new(&problem, &outcome, &log)) {
            Ok(s) => println!("{s}"),
            Err(e) => return fail(EXIT_UNAVAILABLE, e),
        }
    } else {
        print!("{}", driver::render_outcome(&problem, &outcome));
    }

    if args.count_models {
        if let SolveOutcome::Sat { .. } = &outcome {
            let bound = log.events.last().map_or(1, |e| e.bound);
            let program = asp::emit_model_search(&problem, &vec![bound; problem.signature.num_sorts()], symmetry_breaking);
            let mut cfg = solver;
            cfg.time_limit = Some(Duration::from_secs(args.count_timeout));
            match asp::count_models(&program, &cfg) {
                Ok(n) => eprintln!(
                    "Models with {bound} states per sort ({} symmetry breaking): {n}",
                    if symmetry_breaking { "with" } else { "without" }
                ),
                Err(e) => return fail(EXIT_UNAVAILABLE, e),
            }
        }
    }

    ExitCode::from(match outcome {
        SolveOutcome::Sat { .. } => EXIT_SAT,
        SolveOutcome::Unsat(_) => EXIT_UNSAT,
        SolveOutcome::Unknown(_) => EXIT_UNKNOWN,
    })
}
