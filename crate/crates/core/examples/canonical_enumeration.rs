// Enumerate candidate automata with and without symmetry breaking.

use std::error::Error;

use regmod::chc::ProblemBuilder;
use regmod::search::{enumerate_canonical, SearchConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut b = ProblemBuilder::new();
    b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
    let sig = b.build().signature;
    for n in 1..=4 {
        let mut config = SearchConfig::uniform(&sig, n);
        let canonical = enumerate_canonical(&sig, &config).collect::<Result<Vec<_>, _>>()?;
        config.symmetry_breaking = false;
        let raw = enumerate_canonical(&sig, &config).count();
        println!("{n} states: {raw} automata, {} up to renaming", canonical.len());
        if n == 2 {
            for a in &canonical {
                println!("    {}", a.render_transitions(&sig).join(", "));
            }
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
