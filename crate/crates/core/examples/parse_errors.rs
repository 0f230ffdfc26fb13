// Round-trip a problem through the printer and look at parse diagnostics.

use std::error::Error;

use regmod::frontend::{parse_problem, print_problem};

const PROBLEM: &str = include_str!("../tests/fixtures/list_length.smt2");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let problem = parse_problem(PROBLEM)?;
    let printed = print_problem(&problem);
    print!("{printed}");
    assert_eq!(parse_problem(&printed)?, problem);

    let broken = [
        "(declare-fun p (nat) Bool)",
        "(declare-datatypes ((nat 0)) (((z) (s (s_0 nat)))))\n(assert (forall ((x nat)) (p x)))",
        "(declare-datatypes ((nat 0)) (((z) (s (s_0 nat)))))\n(declare-fun p (nat) Bool)\n(assert (p y))",
        "(declare-datatypes ((nat 0)) (((z) (s (s_0 nat)))))\n(assert (forall ((x nat)) (=> (> x z) false)))",
    ];
    for text in broken {
        let err = parse_problem(text).expect_err("should not parse");
        println!("{:?}: {err}", err.kind);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
