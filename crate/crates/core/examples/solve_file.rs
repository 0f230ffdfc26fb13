// Parse an SMT-LIB Horn problem and decide it with the native backend.
//
// ```bash
// cargo run --example solve_file -- path/to/problem.smt2
// ```
//
// Without an argument the bundled even/odd/plus problem is used.

use std::error::Error;

use regmod::driver::{render_log_line, render_outcome, solve, SolveOptions, SolveOutcome};
use regmod::frontend::parse_problem;

const DEFAULT: &str = include_str!("../tests/fixtures/even_odd_plus.smt2");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let problem = parse_problem(&text)?;
    let (outcome, log) = solve(&problem, &SolveOptions::default())?;
    for event in &log.events {
        println!("{}", render_log_line(event));
    }
    print!("{}", render_outcome(&problem, &outcome));
    if std::env::args().nth(1).is_none() {
        assert!(matches!(outcome, SolveOutcome::Sat { ref states_used, .. } if states_used == &[2]));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
