// Least predicate tables for a fixed automaton, and what a broken candidate
// model looks like.

use std::error::Error;

use regmod::automaton::{State, TreeAutomaton};
use regmod::frontend::parse_problem;
use regmod::interp::{check_model, least_tables, recheck, Verdict};

const PROBLEM: &str = include_str!("../tests/fixtures/even_odd_plus.smt2");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let problem = parse_problem(PROBLEM)?;
    let sig = &problem.signature;

    let parity = TreeAutomaton::from_fn(sig, &[2], |_, args| match args {
        [State(2)] => State(1),
        _ => State(2),
    });
    let tables = least_tables(&parity, &problem);
    println!("least tables: {}", tables.render(&problem).join(" "));
    assert_eq!(check_model(&parity, &tables, &problem), Verdict::IsModel);

    // one state cannot tell even from odd
    let single = TreeAutomaton::from_fn(sig, &[1], |_, _| State(1));
    let tables = least_tables(&single, &problem);
    match check_model(&single, &tables, &problem) {
        Verdict::NotModel(w) => {
            println!("one state: {w}");
            assert!(recheck(&single, &tables, &problem, &w));
        }
        Verdict::IsModel => unreachable!(),
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
