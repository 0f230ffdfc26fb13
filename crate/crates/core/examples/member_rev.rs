// Generate the list membership and reversal benchmark and solve it.
//
// ```bash
// cargo run --release --example member_rev -- 3
// ```

use std::error::Error;
use std::time::Instant;

use regmod::driver::{gen_member_rev, render_outcome, solve, SolveOptions};
use regmod::frontend::print_problem;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let k = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let problem = gen_member_rev(k);
    print!("{}", print_problem(&problem));
    let start = Instant::now();
    let (outcome, _) = solve(&problem, &SolveOptions::default())?;
    print!("{}", render_outcome(&problem, &outcome));
    println!("solved in {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
