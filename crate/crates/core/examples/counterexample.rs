// Bounded search for a goal instance in the least Herbrand model, and an
// independent replay of the derivation.

use std::error::Error;

use regmod::driver::{render_outcome, SolveOutcome};
use regmod::frontend::parse_problem;
use regmod::search::{find_counterexample, replay};

const PROBLEM: &str = include_str!("../tests/fixtures/odd_sum_unsat.smt2");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let problem = parse_problem(PROBLEM)?;
    for depth in 0..=3 {
        match find_counterexample(&problem, depth)? {
            None => println!("depth {depth}: nothing"),
            Some(d) => {
                replay(&problem, &d)?;
                println!("depth {depth}:");
                print!("{}", render_outcome(&problem, &SolveOutcome::Unsat(d)));
                return Ok(());
            }
        }
    }
    Err("expected a counterexample".into())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
