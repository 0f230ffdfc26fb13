mod common;

use common::Expect;
use proptest::prelude::*;
use regmod::automaton::{State, TreeAutomaton};
use regmod::chc::{Problem, ProblemBuilder, Term};
use regmod::driver::{solve, SolveOptions, SolveOutcome};
use regmod::interp::{check_model, least_tables};
use regmod::search::{find_counterexample, replay};

#[test]
fn fixture_verdicts() {
    for (name, expect) in common::FIXTURES {
        let p = common::fixture(name);
        let (outcome, _) = solve(&p, &common::native(4)).unwrap();
        let got = match &outcome {
            SolveOutcome::Sat { .. } => Expect::Sat,
            SolveOutcome::Unsat(_) => Expect::Unsat,
            SolveOutcome::Unknown(_) => Expect::Unknown,
        };
        assert_eq!(got, *expect, "{name}");
    }
}

#[test]
fn every_fixture_model_is_sound() {
    if let Err(e) = common::soundness_check() {
        panic!("{e}");
    }
}

#[test]
fn every_fixture_derivation_replays() {
    for (name, _) in common::FIXTURES {
        let p = common::fixture(name);
        if let SolveOutcome::Unsat(d) = solve(&p, &common::native(4)).unwrap().0 {
            replay(&p, &d).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn oracle_rejects_a_wrong_model() {
    let p = common::fixture("even_odd_plus");
    let single = TreeAutomaton::from_fn(&p.signature, &[1], |_, _| State(1));
    let tables = least_tables(&single, &p);
    assert!(common::sound_model(&p, &single, &tables, 3).is_err());
}

#[derive(Debug, Clone)]
enum T {
    Var(usize),
    Z,
    S(Box<T>),
}

#[derive(Debug, Clone)]
struct A {
    binary: bool,
    args: Vec<T>,
}

#[derive(Debug, Clone)]
struct C {
    head: Option<A>,
    body: Vec<A>,
    diseq: bool,
}

fn term() -> impl Strategy<Value = T> {
    let leaf = prop_oneof![(0..2usize).prop_map(T::Var), Just(T::Z)];
    leaf.prop_recursive(2, 4, 1, |inner| inner.prop_map(|t| T::S(Box::new(t))))
}

fn atom() -> impl Strategy<Value = A> {
    any::<bool>().prop_flat_map(|binary| {
        proptest::collection::vec(term(), if binary { 2 } else { 1 }).prop_map(move |args| A { binary, args })
    })
}

fn clause(goal: bool) -> impl Strategy<Value = C> {
    let head = if goal { Just(None).boxed() } else { atom().prop_map(Some).boxed() };
    (head, proptest::collection::vec(atom(), 0..3), proptest::bool::weighted(0.2))
        .prop_map(|(head, body, diseq)| C { head, body, diseq })
}

fn problem() -> impl Strategy<Value = Problem> {
    (proptest::collection::vec(clause(false), 1..4), clause(true)).prop_map(|(defs, goal)| {
        let mut b = ProblemBuilder::new();
        b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
        b.predicate("p", &["nat"]);
        b.predicate("r", &["nat", "nat"]);
        for c in defs.iter().chain([&goal]) {
            let mut cb = b.clause();
            let vars = [cb.var("x", "nat"), cb.var("y", "nat")];
            fn build(t: &T, vars: &[Term; 2], cb: &regmod::chc::ClauseBuilder) -> Term {
                match t {
                    T::Var(i) => vars[*i].clone(),
                    T::Z => cb.app("z", vec![]),
                    T::S(t) => {
                        let inner = build(t, vars, cb);
                        cb.app("s", vec![inner])
                    }
                }
            }
            let name = |a: &A| if a.binary { "r" } else { "p" };
            for a in &c.body {
                let args = a.args.iter().map(|t| build(t, &vars, &cb)).collect();
                cb.atom(name(a), args);
            }
            if c.diseq {
                cb.diseq(vars[0].clone(), vars[1].clone());
            }
            let clause = match &c.head {
                Some(h) => {
                    let args = h.args.iter().map(|t| build(t, &vars, &cb)).collect();
                    cb.head(name(h), args)
                }
                None => cb.goal(),
            };
            b.push(clause);
        }
        b.build()
    })
}

/// Smallest state count for which some total automaton, read with its least
/// tables, is a model.
fn brute_force_bound(p: &Problem, max: u32) -> Option<u32> {
    for n in 1..=max {
        let slots = n + 1;
        for code in 0..n.pow(slots) {
            let mut c = code;
            let mut next = move || {
                let d = c % n;
                c /= n;
                State(d + 1)
            };
            let z = next();
            let succ: Vec<State> = (0..n).map(|_| next()).collect();
            let a = TreeAutomaton::from_fn(&p.signature, &[n], |_, args| match args {
                [] => z,
                [q] => succ[q.index()],
                _ => unreachable!(),
            });
            if check_model(&a, &least_tables(&a, p), p).is_model() {
                return Some(n);
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_problems_get_consistent_verdicts(p in problem()) {
        let opts = SolveOptions { max_bound: 2, ..SolveOptions::default() };
        let (outcome, _) = solve(&p, &opts).unwrap();
        let brute = brute_force_bound(&p, 2);
        match outcome {
            SolveOutcome::Sat { automaton, tables, states_used } => {
                prop_assert_eq!(Some(states_used[0]), brute);
                if let Err(e) = common::sound_model(&p, &automaton, &tables, 3) {
                    prop_assert!(false, "{}", e);
                }
                prop_assert!(find_counterexample(&p, 3).unwrap().is_none());
            }
            SolveOutcome::Unsat(d) => {
                prop_assert_eq!(replay(&p, &d), Ok(()));
                prop_assert_eq!(brute, None);
            }
            SolveOutcome::Unknown(_) => {
                prop_assert_eq!(brute, None);
                prop_assert!(find_counterexample(&p, 2).unwrap().is_none());
            }
        }
    }
}
