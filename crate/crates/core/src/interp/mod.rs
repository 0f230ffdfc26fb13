//! Automata as interpretations of a problem.
//!
//! A ground atom `p(t1,...,tn)` is true when the tuple of states reached by
//! its arguments is in `p`'s table. Clauses are checked in flat form, over
//! states instead of terms; disequalities are read through
//! [`Inhabitation::diff_approx`], which over-approximates term disequality.

mod engine;
mod flatten;

use std::fmt;

pub use engine::{Evaluator, Tables, Violation};
pub use flatten::{flatten, DisplayFlat, FlatAtom, FlatClause, FlatTransition, FlatVar};

use crate::automaton::{inhabitation, PredicateTables, State, TreeAutomaton};
use crate::chc::ground::GroundAtom;
use crate::chc::*;

/// The least tables closed under the definite clauses.
pub fn least_tables(a: &TreeAutomaton, problem: &Problem) -> PredicateTables {
    let inh = inhabitation(a);
    Evaluator::new(problem)
        .least(problem, a, &inh, a.state_counts())
        .to_predicate_tables()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A definite clause derives a tuple that is missing from the tables.
    Closure,
    /// A goal body is satisfiable.
    Goal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub clause: usize,
    pub kind: ViolationKind,
    /// Flat variable names with their states.
    pub assignment: Vec<(String, State)>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::Closure => "not closed under",
            ViolationKind::Goal => "violates goal",
        };
        write!(f, "{what} clause {} with ", self.clause)?;
        for (i, (name, q)) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}={q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    IsModel,
    NotModel(Witness),
}

impl Verdict {
    pub fn is_model(&self) -> bool {
        matches!(self, Verdict::IsModel)
    }
}

fn witness(ev: &Evaluator, v: Violation, kind: ViolationKind) -> Witness {
    let c = &ev.flat()[v.clause];
    Witness {
        clause: v.clause,
        kind,
        assignment: c
            .vars
            .iter()
            .map(|fv| fv.name.clone())
            .zip(v.assignment)
            .collect(),
    }
}

/// Whether `(a, tables)` is closed under the definite clauses and satisfies
/// every goal. Closure is checked first, clauses in order.
pub fn check_model(a: &TreeAutomaton, tables: &PredicateTables, problem: &Problem) -> Verdict {
    if !tables.well_ranged(problem, a) {
        panic!("predicate tables do not match the automaton's state ranges");
    }
    let ev = Evaluator::new(problem);
    let inh = inhabitation(a);
    let t = Tables::from_predicate_tables(problem, a.state_counts(), tables);
    if let Some(v) = ev.closure_violation(a, &inh, &t) {
        return Verdict::NotModel(witness(&ev, v, ViolationKind::Closure));
    }
    if let Some(v) = ev.goal_violation(a, &inh, &t) {
        return Verdict::NotModel(witness(&ev, v, ViolationKind::Goal));
    }
    Verdict::IsModel
}

/// Truth of a ground atom in the interpretation.
pub fn interpret_atom(a: &TreeAutomaton, tables: &PredicateTables, atom: &GroundAtom) -> bool {
    let tuple: Vec<State> = atom.args.iter().map(|t| a.run(t)).collect();
    tables.contains(atom.pred, &tuple)
}

/// Re-evaluates a witness directly against the flat clause, without the
/// planner: true iff it really is a violation.
pub fn recheck(a: &TreeAutomaton, tables: &PredicateTables, problem: &Problem, w: &Witness) -> bool {
    let Some(clause) = problem.clauses.get(w.clause) else {
        return false;
    };
    let fc = flatten(&problem.signature, clause);
    if fc.vars.len() != w.assignment.len() {
        return false;
    }
    let q: Vec<State> = w.assignment.iter().map(|(_, q)| *q).collect();
    let in_range = fc
        .vars
        .iter()
        .zip(&q)
        .all(|(v, s)| s.0 >= 1 && s.0 <= a.states(v.sort));
    if !in_range {
        return false;
    }
    let inh = inhabitation(a);
    let body = fc
        .trans
        .iter()
        .all(|t| a.target(t.ctor, &t.args.iter().map(|&v| q[v]).collect::<Vec<_>>()) == q[t.result])
        && fc
            .preds
            .iter()
            .all(|p| tables.contains(p.pred, &p.args.iter().map(|&v| q[v]).collect::<Vec<_>>()))
        && fc
            .diseqs
            .iter()
            .all(|&(x, y)| inh.diff_approx(fc.vars[x].sort, q[x], q[y]));
    match (&fc.head, w.kind) {
        (None, ViolationKind::Goal) => body,
        (Some(h), ViolationKind::Closure) => {
            body && !tables.contains(h.pred, &h.args.iter().map(|&v| q[v]).collect::<Vec<_>>())
        }
        _ => false,
    }
}

/// Restricts a model to the states some term reaches, renumbering them in
/// increasing order. The result is again a model: dropped states have empty
/// languages, so no clause instance over terms can mention them.
pub fn trim(a: &TreeAutomaton, tables: &PredicateTables, problem: &Problem) -> (TreeAutomaton, PredicateTables) {
    let sig = &problem.signature;
    let inh = inhabitation(a);
    let mut renumber: Vec<Vec<Option<State>>> = Vec::new();
    let mut counts = Vec::new();
    for s in sig.sort_ids() {
        let mut next = 0;
        let map = a
            .state_range(s)
            .map(|q| {
                inh.non_empty(s, q).then(|| {
                    next += 1;
                    State(next)
                })
            })
            .collect();
        renumber.push(map);
        counts.push(next);
    }
    let old = |s: SortId, q: State| -> State {
        let i = renumber[s.index()].iter().position(|&n| n == Some(q)).expect("kept state");
        State::from_index(i)
    };
    let trimmed = TreeAutomaton::from_fn(sig, &counts, |c, args| {
        let olds: Vec<State> = args
            .iter()
            .zip(sig.ctor_args(c))
            .map(|(&q, &s)| old(s, q))
            .collect();
        let target = a.target(c, &olds);
        renumber[sig.ctor_sort(c).index()][target.index()].expect("reachable target")
    });
    let mut t = PredicateTables::empty(problem.predicates.len());
    for (p, tuple) in tables.iter() {
        let mapped: Option<Vec<State>> = tuple
            .iter()
            .zip(&problem.pred(p).args)
            .map(|(q, s)| renumber[s.index()][q.index()])
            .collect();
        if let Some(m) = mapped {
            t.insert(p, m);
        }
    }
    (trimmed, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Card;
    use crate::chc::ground::{ground_least_model, goal_violated, GroundModel, GroundTerm};
    use crate::frontend::parse_problem;

    pub const FIXTURE: &str = "
        (declare-datatypes ((nat 0)) (((z) (s (s_0 nat)))))
        (declare-fun even (nat) Bool)
        (declare-fun odd (nat) Bool)
        (declare-fun plus (nat nat nat) Bool)
        (assert (even z))
        (assert (forall ((y nat) (x nat)) (=> (and (= y (s x)) (odd x)) (even y))))
        (assert (forall ((y nat) (x nat)) (=> (and (= y (s x)) (even x)) (odd y))))
        (assert (forall ((y nat)) (plus z y y)))
        (assert (forall ((x1 nat) (x nat) (y1 nat) (y nat) (z1 nat) (z nat))
          (=> (and (= x1 (s x)) (= y1 y) (= z1 (s z)) (plus x y z)) (plus x1 y1 z1))))
        (assert (forall ((x nat) (y nat) (z nat))
          (=> (and (even x) (even y) (plus x y z) (odd z)) false)))
    ";

    fn parity(p: &Problem) -> TreeAutomaton {
        TreeAutomaton::from_fn(&p.signature, &[2], |c, args| match (c.0, args) {
            (0, []) => State(2),
            (1, [State(2)]) => State(1),
            _ => State(2),
        })
    }

    fn tuples(p: &Problem, t: &PredicateTables) -> Vec<String> {
        t.render(p)
    }

    fn num(n: usize) -> GroundTerm {
        (0..n).fold(GroundTerm::constant(CtorId(0)), |t, _| GroundTerm::new(CtorId(1), vec![t]))
    }

    #[test]
    fn parity_tables() {
        let p = parse_problem(FIXTURE).unwrap();
        let a = parity(&p);
        let t = least_tables(&a, &p);
        assert_eq!(
            tuples(&p, &t),
            vec![
                "even(2)",
                "odd(1)",
                "plus(1,1,2)",
                "plus(1,2,1)",
                "plus(2,1,1)",
                "plus(2,2,2)"
            ]
        );
        assert_eq!(check_model(&a, &t, &p), Verdict::IsModel);
    }

    #[test]
    fn one_state_is_not_a_model() {
        let p = parse_problem(FIXTURE).unwrap();
        let a = TreeAutomaton::from_fn(&p.signature, &[1], |_, _| State(1));
        let t = least_tables(&a, &p);
        assert_eq!(tuples(&p, &t), vec!["even(1)", "odd(1)", "plus(1,1,1)"]);
        let Verdict::NotModel(w) = check_model(&a, &t, &p) else {
            panic!("expected a violation");
        };
        assert_eq!(w.clause, 5);
        assert_eq!(w.kind, ViolationKind::Goal);
        assert!(w.assignment.iter().all(|(_, q)| *q == State(1)));
        assert!(recheck(&a, &t, &p, &w));
    }

    #[test]
    fn removing_a_tuple_breaks_closure() {
        let p = parse_problem(FIXTURE).unwrap();
        let a = parity(&p);
        let full = least_tables(&a, &p);
        let odd = p.pred_by_name("odd").unwrap();
        let mut t = full.clone();
        t.remove(odd, &[State(1)]);
        let Verdict::NotModel(w) = check_model(&a, &t, &p) else {
            panic!("expected a violation");
        };
        assert_eq!((w.clause, w.kind), (2, ViolationKind::Closure));
        assert!(recheck(&a, &t, &p, &w));
        // every single tuple of the least tables is needed
        for (pred, tuple) in full.iter() {
            let mut t = full.clone();
            t.remove(pred, tuple);
            assert!(!check_model(&a, &t, &p).is_model());
        }
    }

    #[test]
    fn interpretation_of_atoms() {
        let p = parse_problem(FIXTURE).unwrap();
        let a = parity(&p);
        let t = least_tables(&a, &p);
        let even = p.pred_by_name("even").unwrap();
        let odd = p.pred_by_name("odd").unwrap();
        let plus = p.pred_by_name("plus").unwrap();
        assert!(interpret_atom(&a, &t, &GroundAtom::new(even, vec![num(2)])));
        assert!(interpret_atom(&a, &t, &GroundAtom::new(plus, vec![num(1), num(1), num(0)])));
        assert!(!interpret_atom(&a, &t, &GroundAtom::new(odd, vec![num(0)])));
    }

    #[test]
    fn no_definite_clauses_gives_empty_tables() {
        let p = parse_problem(
            "(declare-datatypes ((nat 0)) (((z) (s (s_0 nat)))))
             (declare-fun p (nat) Bool)
             (assert (forall ((x nat)) (=> (p x) false)))",
        )
        .unwrap();
        let a = TreeAutomaton::from_fn(&p.signature, &[2], |_, _| State(1));
        assert!(least_tables(&a, &p).is_empty());
    }

    #[test]
    fn parity_model_covers_ground_semantics() {
        let p = parse_problem(FIXTURE).unwrap();
        let a = parity(&p);
        let t = least_tables(&a, &p);
        for d in 0..=4 {
            let m = ground_least_model(&p, d).unwrap();
            assert!(m.atoms().all(|atom| interpret_atom(&a, &t, &atom)));
            assert_eq!(goal_violated(&p, &m), None);
            let universe = m.universe();
            let true_atoms: Vec<GroundAtom> = p
                .pred_ids()
                .flat_map(|pred| {
                    let sorts = p.pred(pred).args.clone();
                    let mut out = Vec::new();
                    let pools: Vec<Vec<GroundTerm>> = sorts
                        .iter()
                        .map(|s| universe.terms_of(*s).iter().map(|&id| universe.term(id)).collect())
                        .collect();
                    let mut idx = vec![0; pools.len()];
                    'outer: loop {
                        let atom = GroundAtom::new(
                            pred,
                            idx.iter().zip(&pools).map(|(&i, pool)| pool[i].clone()).collect(),
                        );
                        if interpret_atom(&a, &t, &atom) {
                            out.push(atom);
                        }
                        for k in (0..idx.len()).rev() {
                            idx[k] += 1;
                            if idx[k] < pools[k].len() {
                                continue 'outer;
                            }
                            idx[k] = 0;
                        }
                        break;
                    }
                    out
                })
                .collect();
            let interp = GroundModel::from_atoms(&p, true_atoms).unwrap();
            assert_eq!(goal_violated(&p, &interp), None, "depth {d}");
        }
        assert_eq!(crate::automaton::inhabitation(&a).get(SortId(0), State(1)), Card::Many);
    }

    #[test]
    fn trimming_drops_unreachable_states() {
        let p = parse_problem(FIXTURE).unwrap();
        // states 1 and 3 are the parity classes, 2 is never reached
        let a = TreeAutomaton::from_fn(&p.signature, &[3], |c, args| match (c.0, args) {
            (0, []) => State(3),
            (1, [State(3)]) => State(1),
            (1, [State(2)]) => State(2),
            _ => State(3),
        });
        let t = least_tables(&a, &p);
        assert!(check_model(&a, &t, &p).is_model());
        let (b, u) = trim(&a, &t, &p);
        assert_eq!(b.state_counts(), &[2]);
        assert_eq!(b.render_transitions(&p.signature), vec!["Z -> 2", "S(1) -> 2", "S(2) -> 1"]);
        assert_eq!(u, least_tables(&b, &p));
        assert!(check_model(&b, &u, &p).is_model());
    }
}
