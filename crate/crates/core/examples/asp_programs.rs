// Emit the ASP programs for a problem and, when `clingo` is installed, solve
// them and count models.

use std::error::Error;
use std::path::Path;

use regmod::asp::{
    count_models, emit_counterexample_search, emit_model_search, solve_model, solver_available, AspAnswer,
    SolverConfig,
};
use regmod::driver::gen_member_rev;
use regmod::frontend::parse_problem;

const PROBLEM: &str = include_str!("../tests/fixtures/even_odd_plus.smt2");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let problem = parse_problem(PROBLEM)?;
    print!("{}", emit_model_search(&problem, &[2], false).text);
    println!("---");
    print!("{}", emit_counterexample_search(&problem, 1).text);

    let solver = SolverConfig::new("clingo");
    if !solver_available(Path::new("clingo")) {
        println!("clingo not found, skipping the solver runs");
        return Ok(());
    }
    for n in 1..=2 {
        match solve_model(&problem, &[n], true, &solver)? {
            AspAnswer::Found((a, _)) => println!("{n} states: {}", a.render_transitions(&problem.signature).join(", ")),
            AspAnswer::None => println!("{n} states: no model"),
            AspAnswer::Unknown(why) => println!("{n} states: {why}"),
        }
    }
    let mr = gen_member_rev(2);
    for sb in [true, false] {
        let count = count_models(&emit_model_search(&mr, &[4, 4], sb), &solver)?;
        println!("member/rev(2), 4 states, symmetry breaking {sb}: {count} models");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
