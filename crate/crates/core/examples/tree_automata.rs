// Build a tree automaton by hand, run it on terms and inspect the languages
// of its states.

use std::error::Error;

use regmod::automaton::{inhabitation, sample_language, State, TreeAutomaton};
use regmod::chc::ground::GroundTerm;
use regmod::chc::ProblemBuilder;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut b = ProblemBuilder::new();
    b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
    let sig = b.build().signature;
    let (z, s) = (sig.ctor_by_name("z").unwrap(), sig.ctor_by_name("s").unwrap());
    let nat = sig.sort_by_name("nat").unwrap();

    // state 2 recognizes even numbers, state 1 odd ones
    let a = TreeAutomaton::from_fn(&sig, &[2], |_, args| match args {
        [] => State(2),
        [State(2)] => State(1),
        _ => State(2),
    });
    for line in a.render_transitions(&sig) {
        println!("{line}");
    }

    let three = (0..3).fold(GroundTerm::constant(z), |t, _| GroundTerm::new(s, vec![t]));
    println!("{} is recognized by state {}", three.display(&sig), a.run(&three));
    assert_eq!(a.run(&three), State(1));

    let inh = inhabitation(&a);
    for q in a.state_range(nat) {
        let sample: Vec<String> = sample_language(&a, nat, q, 3).iter().map(|t| t.display(&sig).to_string()).collect();
        println!("state {q}: {:?}, e.g. {}", inh.get(nat, q), sample.join(", "));
    }
    // both states hold infinitely many terms, so even q != q may hold between distinct terms
    assert!(inh.diff_approx(nat, State(1), State(1)));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
