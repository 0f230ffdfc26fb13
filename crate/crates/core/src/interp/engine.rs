//! Bottom-up evaluation of flat clauses over a finite state space.

use std::ops::ControlFlow;

use super::flatten::{flatten, FlatClause};
use crate::automaton::{Inhabitation, PredicateTables, State, Transitions};
use crate::chc::*;

#[derive(Debug, Clone, Copy)]
enum Step {
    Scan { atom: usize, delta: bool },
    /// All arguments bound: look the target up, then bind or compare.
    Apply { trans: usize },
    Gen { var: usize },
    Diseq { a: usize, b: usize },
}

fn plan(c: &FlatClause, delta: Option<usize>) -> Vec<Step> {
    let mut bound = vec![false; c.vars.len()];
    let mut steps = Vec::new();
    let mut atoms_done = vec![false; c.preds.len()];
    let mut trans_done = vec![false; c.trans.len()];
    let mut diseq_done = vec![false; c.diseqs.len()];
    if let Some(i) = delta {
        steps.push(Step::Scan { atom: i, delta: true });
        atoms_done[i] = true;
        c.preds[i].args.iter().for_each(|&v| bound[v] = true);
    }
    loop {
        if let Some(t) = (0..c.trans.len())
            .find(|&t| !trans_done[t] && c.trans[t].args.iter().all(|&v| bound[v]))
        {
            trans_done[t] = true;
            bound[c.trans[t].result] = true;
            steps.push(Step::Apply { trans: t });
            continue;
        }
        if let Some(d) = (0..c.diseqs.len())
            .find(|&d| !diseq_done[d] && bound[c.diseqs[d].0] && bound[c.diseqs[d].1])
        {
            diseq_done[d] = true;
            steps.push(Step::Diseq {
                a: c.diseqs[d].0,
                b: c.diseqs[d].1,
            });
            continue;
        }
        let best = (0..c.preds.len())
            .filter(|&i| !atoms_done[i])
            .max_by_key(|&i| {
                let n = c.preds[i].args.iter().filter(|&&v| bound[v]).count();
                (n, std::cmp::Reverse(i))
            });
        if let Some(i) = best {
            atoms_done[i] = true;
            c.preds[i].args.iter().for_each(|&v| bound[v] = true);
            steps.push(Step::Scan { atom: i, delta: false });
            continue;
        }
        let pending = (0..c.trans.len())
            .filter(|&t| !trans_done[t])
            .flat_map(|t| c.trans[t].args.iter().copied())
            .chain(
                (0..c.diseqs.len())
                    .filter(|&d| !diseq_done[d])
                    .flat_map(|d| [c.diseqs[d].0, c.diseqs[d].1]),
            )
            .chain(c.head.iter().flat_map(|h| h.args.iter().copied()))
            .chain(0..c.vars.len())
            .find(|&v| !bound[v]);
        match pending {
            Some(v) => {
                bound[v] = true;
                steps.push(Step::Gen { var: v });
            }
            None => break,
        }
    }
    steps
}

/// Predicate tables indexed in mixed radix over fixed per-sort capacities.
#[derive(Debug, Clone)]
pub struct Tables {
    preds: Vec<Table>,
}

#[derive(Debug, Clone)]
struct Table {
    radix: Vec<u32>,
    bits: Vec<bool>,
    tuples: Vec<State>,
    len: usize,
}

impl Table {
    fn arity(&self) -> usize {
        self.radix.len()
    }

    fn index(&self, tuple: &[State]) -> usize {
        tuple
            .iter()
            .zip(&self.radix)
            .fold(0, |i, (q, &r)| i * r as usize + q.index())
    }

    fn tuple(&self, i: usize) -> &[State] {
        let a = self.arity();
        &self.tuples[i * a..(i + 1) * a]
    }
}

impl Tables {
    /// Empty tables able to hold states up to `capacity[sort]`.
    pub fn new(problem: &Problem, capacity: &[u32]) -> Tables {
        let preds = problem
            .predicates
            .iter()
            .map(|p| {
                let radix: Vec<u32> = p.args.iter().map(|s| capacity[s.index()]).collect();
                let size = radix.iter().map(|&r| r as usize).product();
                Table {
                    radix,
                    bits: vec![false; size],
                    tuples: Vec::new(),
                    len: 0,
                }
            })
            .collect();
        Tables { preds }
    }

    pub fn from_predicate_tables(problem: &Problem, capacity: &[u32], t: &PredicateTables) -> Tables {
        let mut tables = Tables::new(problem, capacity);
        for (p, tuple) in t.iter() {
            tables.insert(p, tuple);
        }
        tables
    }

    pub fn contains(&self, p: PredId, tuple: &[State]) -> bool {
        let t = &self.preds[p.index()];
        t.bits[t.index(tuple)]
    }

    pub fn insert(&mut self, p: PredId, tuple: &[State]) -> bool {
        let t = &mut self.preds[p.index()];
        let i = t.index(tuple);
        if t.bits[i] {
            return false;
        }
        t.bits[i] = true;
        t.tuples.extend_from_slice(tuple);
        t.len += 1;
        true
    }

    pub fn len(&self, p: PredId) -> usize {
        self.preds[p.index()].len
    }

    pub fn total(&self) -> usize {
        self.preds.iter().map(|t| t.len).sum()
    }

    pub fn to_predicate_tables(&self) -> PredicateTables {
        let mut out = PredicateTables::empty(self.preds.len());
        for (p, t) in self.preds.iter().enumerate() {
            for i in 0..t.len {
                out.insert(PredId(p as u32), t.tuple(i).to_vec());
            }
        }
        out
    }
}

/// Which clause failed and how, with the state of every flat variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: usize,
    pub assignment: Vec<State>,
}

/// A problem compiled for repeated evaluation against many automata.
#[derive(Debug, Clone)]
pub struct Evaluator {
    flat: Vec<FlatClause>,
    full: Vec<Vec<Step>>,
    delta: Vec<Vec<Vec<Step>>>,
}

struct Exec<'a, T> {
    clause: &'a FlatClause,
    steps: &'a [Step],
    trans: &'a T,
    inh: &'a Inhabitation,
    tables: &'a Tables,
    lo: &'a [usize],
    hi: &'a [usize],
}

const UNBOUND: State = State(0);

impl<T: Transitions> Exec<'_, T> {
    fn run(
        &self,
        k: usize,
        b: &mut [State],
        emit: &mut impl FnMut(&[State]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(step) = self.steps.get(k) else {
            return emit(b);
        };
        let c = self.clause;
        match *step {
            Step::Scan { atom, delta } => {
                let a = &c.preds[atom];
                let p = a.pred.index();
                let table = &self.tables.preds[p];
                let start = if delta { self.lo[p] } else { 0 };
                let mut fresh = Vec::with_capacity(a.args.len());
                for i in start..self.hi[p] {
                    let tuple = table.tuple(i);
                    let mut ok = true;
                    for (&v, &q) in a.args.iter().zip(tuple) {
                        if b[v] == UNBOUND {
                            b[v] = q;
                            fresh.push(v);
                        } else if b[v] != q {
                            ok = false;
                            break;
                        }
                    }
                    let flow = if ok {
                        self.run(k + 1, b, emit)
                    } else {
                        ControlFlow::Continue(())
                    };
                    for v in fresh.drain(..) {
                        b[v] = UNBOUND;
                    }
                    flow?;
                }
                ControlFlow::Continue(())
            }
            Step::Apply { trans } => {
                let t = &c.trans[trans];
                let args: Vec<State> = t.args.iter().map(|&v| b[v]).collect();
                let Some(q) = self.trans.target_of(t.ctor, &args) else {
                    return ControlFlow::Continue(());
                };
                match b[t.result] {
                    UNBOUND => {
                        b[t.result] = q;
                        let flow = self.run(k + 1, b, emit);
                        b[t.result] = UNBOUND;
                        flow
                    }
                    r if r == q => self.run(k + 1, b, emit),
                    _ => ControlFlow::Continue(()),
                }
            }
            Step::Gen { var } => {
                for q in 1..=self.trans.num_states(c.vars[var].sort) {
                    b[var] = State(q);
                    let flow = self.run(k + 1, b, emit);
                    b[var] = UNBOUND;
                    flow?;
                }
                ControlFlow::Continue(())
            }
            Step::Diseq { a, b: v } => {
                if self.inh.diff_approx(c.vars[a].sort, b[a], b[v]) {
                    self.run(k + 1, b, emit)
                } else {
                    ControlFlow::Continue(())
                }
            }
        }
    }
}

impl Evaluator {
    pub fn new(problem: &Problem) -> Evaluator {
        let flat: Vec<FlatClause> = problem
            .clauses
            .iter()
            .map(|c| flatten(&problem.signature, c))
            .collect();
        let full = flat.iter().map(|c| plan(c, None)).collect();
        let delta = flat
            .iter()
            .map(|c| (0..c.preds.len()).map(|i| plan(c, Some(i))).collect())
            .collect();
        Evaluator { flat, full, delta }
    }

    pub fn flat(&self) -> &[FlatClause] {
        &self.flat
    }

    #[allow(clippy::too_many_arguments)]
    fn solutions<T: Transitions>(
        &self,
        clause: usize,
        steps: &[Step],
        trans: &T,
        inh: &Inhabitation,
        tables: &Tables,
        lo: &[usize],
        hi: &[usize],
        emit: &mut impl FnMut(&[State]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let c = &self.flat[clause];
        let exec = Exec {
            clause: c,
            steps,
            trans,
            inh,
            tables,
            lo,
            hi,
        };
        let mut b = vec![UNBOUND; c.vars.len()];
        exec.run(0, &mut b, emit)
    }

    fn lens(tables: &Tables) -> Vec<usize> {
        tables.preds.iter().map(|t| t.len).collect()
    }

    /// Least tables closed under the definite clauses; `capacity` bounds the
    /// number of states per sort that `trans` may ever report.
    pub fn least<T: Transitions>(
        &self,
        problem: &Problem,
        trans: &T,
        inh: &Inhabitation,
        capacity: &[u32],
    ) -> Tables {
        let mut tables = Tables::new(problem, capacity);
        let mut lo = vec![0; problem.predicates.len()];
        let mut first = true;
        let mut pending: Vec<(PredId, Vec<State>)> = Vec::new();
        loop {
            let hi = Self::lens(&tables);
            for (ci, c) in self.flat.iter().enumerate() {
                let Some(head) = &c.head else { continue };
                let mut emit = |b: &[State]| {
                    let tuple: Vec<State> = head.args.iter().map(|&v| b[v]).collect();
                    if !tables.contains(head.pred, &tuple) {
                        pending.push((head.pred, tuple));
                    }
                    ControlFlow::Continue(())
                };
                if first {
                    let _ = self.solutions(ci, &self.full[ci], trans, inh, &tables, &lo, &hi, &mut emit);
                } else {
                    for (i, a) in c.preds.iter().enumerate() {
                        let p = a.pred.index();
                        if lo[p] < hi[p] {
                            let _ = self.solutions(
                                ci,
                                &self.delta[ci][i],
                                trans,
                                inh,
                                &tables,
                                &lo,
                                &hi,
                                &mut emit,
                            );
                        }
                    }
                }
            }
            let mut grew = false;
            for (p, tuple) in pending.drain(..) {
                grew |= tables.insert(p, &tuple);
            }
            if !grew {
                return tables;
            }
            lo = hi;
            first = false;
        }
    }

    /// First goal whose body is satisfiable over `tables`, in clause order.
    pub fn goal_violation<T: Transitions>(
        &self,
        trans: &T,
        inh: &Inhabitation,
        tables: &Tables,
    ) -> Option<Violation> {
        let hi = Self::lens(tables);
        let lo = vec![0; hi.len()];
        for (ci, c) in self.flat.iter().enumerate() {
            if !c.is_goal() {
                continue;
            }
            let mut found = None;
            let _ = self.solutions(ci, &self.full[ci], trans, inh, tables, &lo, &hi, &mut |b| {
                found = Some(b.to_vec());
                ControlFlow::Break(())
            });
            if let Some(assignment) = found {
                return Some(Violation {
                    clause: ci,
                    assignment,
                });
            }
        }
        None
    }

    /// First definite clause instance whose body holds but whose head is missing.
    pub fn closure_violation<T: Transitions>(
        &self,
        trans: &T,
        inh: &Inhabitation,
        tables: &Tables,
    ) -> Option<Violation> {
        let hi = Self::lens(tables);
        let lo = vec![0; hi.len()];
        for (ci, c) in self.flat.iter().enumerate() {
            let Some(head) = &c.head else { continue };
            let mut found = None;
            let _ = self.solutions(ci, &self.full[ci], trans, inh, tables, &lo, &hi, &mut |b| {
                let tuple: Vec<State> = head.args.iter().map(|&v| b[v]).collect();
                if tables.contains(head.pred, &tuple) {
                    ControlFlow::Continue(())
                } else {
                    found = Some(b.to_vec());
                    ControlFlow::Break(())
                }
            });
            if let Some(assignment) = found {
                return Some(Violation {
                    clause: ci,
                    assignment,
                });
            }
        }
        None
    }
}
