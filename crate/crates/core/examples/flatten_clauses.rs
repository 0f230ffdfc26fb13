// Show how clauses over terms become clauses over automaton states.

use std::error::Error;

use regmod::frontend::parse_problem;
use regmod::interp::{flatten, DisplayFlat};

const PROBLEM: &str = include_str!("../tests/fixtures/even_odd_plus.smt2");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let problem = parse_problem(PROBLEM)?;
    for clause in &problem.clauses {
        let flat = flatten(&problem.signature, clause);
        println!("{}", problem.display_clause(clause));
        println!("    {}", DisplayFlat { problem: &problem, clause: &flat });
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
