mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regmod::automaton::{inhabitation, Card, State, TreeAutomaton};

#[test]
fn distinct_terms_are_never_judged_equal() {
    if let Err(e) = common::diff_approx_check() {
        panic!("{e}");
    }
}

#[test]
fn many_seeds_many_signatures() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, sig) in common::signatures() {
            let a = common::random_automaton(&sig, &mut rng, 4);
            let bad = common::diff_approx_violations(&sig, &a, 3);
            assert!(bad.is_empty(), "{name} seed {seed}: {bad:?}");
        }
    }
}

#[test]
fn singleton_state_is_not_different_from_itself() {
    // z -> 1, s(_) -> 2: state 1 holds only z
    let sig = common::nat();
    let a = TreeAutomaton::from_fn(&sig, &[2], |_, args| if args.is_empty() { State(1) } else { State(2) });
    let nat = sig.sort_by_name("nat").unwrap();
    let inh = inhabitation(&a);
    assert_eq!(inh.get(nat, State(1)), Card::One);
    assert!(!inh.diff_approx(nat, State(1), State(1)));
    assert!(inh.diff_approx(nat, State(2), State(2)));
    assert!(inh.diff_approx(nat, State(1), State(2)));
}

#[test]
fn empty_states_are_never_different() {
    // z -> 1, s(_) -> 1 leaves state 2 empty
    let sig = common::nat();
    let a = TreeAutomaton::from_fn(&sig, &[2], |_, _| State(1));
    let nat = sig.sort_by_name("nat").unwrap();
    let inh = inhabitation(&a);
    assert!(!inh.diff_approx(nat, State(2), State(2)));
    assert!(!inh.diff_approx(nat, State(1), State(2)));
}
