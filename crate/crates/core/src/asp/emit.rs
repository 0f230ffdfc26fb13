use std::fmt::Write as _;

use super::names::Names;
use super::{AspProgram, ProgramKind};
use crate::chc::*;
use crate::interp::{flatten, FlatClause};

struct Emitter<'a> {
    problem: &'a Problem,
    names: Names,
    out: String,
}

fn app(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(", "))
    }
}

impl<'a> Emitter<'a> {
    fn new(problem: &'a Problem) -> Self {
        Emitter {
            problem,
            names: Names::new(problem),
            out: String::new(),
        }
    }

    fn sig(&self) -> &Signature {
        &self.problem.signature
    }

    fn single_sort(&self) -> bool {
        self.sig().num_sorts() == 1
    }

    /// Domain literal for a state variable of `sort`.
    fn domain(&self, var: &str, sort: SortId) -> String {
        if self.single_sort() {
            format!("state({var})")
        } else {
            format!("stateType({var}, {})", self.names.sort(sort))
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn has_diseq(&self) -> bool {
        self.problem
            .clauses
            .iter()
            .any(|c| c.body.iter().any(|l| matches!(l, Literal::Diseq(..))))
    }

    fn states(&mut self, max: &[u32]) {
        if self.single_sort() {
            let s = self.names.sort(SortId(0)).to_string();
            self.line(format!("#const maxState={}.", max[0]));
            self.line("state(1..maxState).");
            self.line(format!("stateType(Q, {s}) :- state(Q)."));
        } else {
            let sorts: Vec<SortId> = self.sig().sort_ids().collect();
            for &s in &sorts {
                let n = self.names.sort(s).to_string();
                self.line(format!("#const maxState_{n}={}.", max[s.index()]));
            }
            for &s in &sorts {
                let n = self.names.sort(s).to_string();
                self.line(format!("stateType(1..maxState_{n}, {n})."));
            }
            self.line("state(Q) :- stateType(Q, _).");
        }
    }

    fn transition_choices(&mut self) {
        let ctors: Vec<CtorId> = self.sig().ctor_ids().collect();
        for c in ctors {
            let arg_sorts = self.sig().ctor_args(c).to_vec();
            let vars: Vec<String> = (0..arg_sorts.len()).map(|i| format!("Q{i}")).collect();
            let term = app(self.names.ctor(c), &vars);
            let target = self.domain("Q", self.sig().ctor_sort(c));
            let guards: Vec<String> = vars.iter().zip(&arg_sorts).map(|(v, &s)| self.domain(v, s)).collect();
            if guards.is_empty() {
                self.line(format!("1 {{rule({term}, Q): {target}}} 1."));
            } else {
                self.line(format!("1 {{rule({term}, Q): {target}}} 1 :- {}.", guards.join(", ")));
            }
        }
    }

    fn predicate_choices(&mut self) {
        let preds: Vec<PredId> = self.problem.pred_ids().collect();
        for p in preds {
            let sorts = self.problem.pred(p).args.clone();
            let vars: Vec<String> = (0..sorts.len()).map(|i| format!("Q{i}")).collect();
            let atom = app(self.names.pred(p), &vars);
            let guards: Vec<String> = vars.iter().zip(&sorts).map(|(v, &s)| self.domain(v, s)).collect();
            if guards.is_empty() {
                self.line(format!("{{{atom}}}."));
            } else {
                self.line(format!("{{{atom}}} :- {}.", guards.join(", ")));
            }
        }
    }

    /// `nonEmpty`/`many` over live transitions, and `diffApprox` from them.
    fn diff_approx(&mut self) {
        let ctors: Vec<CtorId> = self.sig().ctor_ids().collect();
        for &c in &ctors {
            let args = self.sig().ctor_args(c).to_vec();
            let sort = self.names.sort(self.sig().ctor_sort(c)).to_string();
            let vars: Vec<String> = (0..args.len()).map(|i| format!("Q{i}")).collect();
            let term = app(self.names.ctor(c), &vars);
            let mut body = vec![format!("rule({term}, Q)")];
            for (v, &s) in vars.iter().zip(&args) {
                body.push(format!("nonEmpty({v}, {})", self.names.sort(s)));
            }
            self.line(format!("live({term}, Q, {sort}) :- {}.", body.join(", ")));
        }
        self.line("nonEmpty(Q, S) :- live(_, Q, S).");
        self.line("many(Q, S) :- live(T1, Q, S), live(T2, Q, S), T1 != T2.");
        for &c in &ctors {
            let args = self.sig().ctor_args(c).to_vec();
            let sort = self.names.sort(self.sig().ctor_sort(c)).to_string();
            let vars: Vec<String> = (0..args.len()).map(|i| format!("Q{i}")).collect();
            let term = app(self.names.ctor(c), &vars);
            for (v, &s) in vars.iter().zip(&args) {
                self.line(format!(
                    "many(Q, {sort}) :- live({term}, Q, {sort}), many({v}, {}).",
                    self.names.sort(s)
                ));
            }
        }
        self.line("diffApprox(Q1, Q2, S) :- nonEmpty(Q1, S), nonEmpty(Q2, S), Q1 != Q2.");
        self.line("diffApprox(Q, Q, S) :- many(Q, S).");
    }

    fn flat_clause(&self, c: &FlatClause) -> String {
        let name = |v: usize| c.var_name(v).to_string();
        let atom = |pred: PredId, args: &[usize]| {
            app(self.names.pred(pred), &args.iter().map(|&v| name(v)).collect::<Vec<_>>())
        };
        let mut body: Vec<String> = c.preds.iter().map(|a| atom(a.pred, &a.args)).collect();
        for t in &c.trans {
            let term = app(self.names.ctor(t.ctor), &t.args.iter().map(|&v| name(v)).collect::<Vec<_>>());
            body.push(format!("rule({term}, {})", name(t.result)));
        }
        for &(a, b) in &c.diseqs {
            body.push(format!(
                "diffApprox({}, {}, {})",
                name(a),
                name(b),
                self.names.sort(c.vars[a].sort)
            ));
        }
        for &g in &c.generators {
            body.push(self.domain(&name(g), c.vars[g].sort));
        }
        let mut s = String::new();
        if let Some(h) = &c.head {
            s.push_str(&atom(h.pred, &h.args));
            if !body.is_empty() {
                s.push(' ');
            }
        } else if body.is_empty() {
            body.push("#true".to_string());
        }
        if !body.is_empty() {
            let _ = write!(s, ":- {}", body.join(", "));
        }
        s.push('.');
        s
    }

    fn clauses(&mut self) {
        let sig = self.sig().clone();
        let lines: Vec<String> = self
            .problem
            .definite()
            .chain(self.problem.goals())
            .map(|(_, c)| self.flat_clause(&flatten(&sig, c)))
            .collect();
        for l in lines {
            self.line(l);
        }
    }

    /// Reachable states come first, ordered by the height of their smallest
    /// term; unreachable states copy state 1.
    fn symmetry_breaking(&mut self, max: &[u32]) {
        let horizon: u32 = max.iter().sum();
        let ctors: Vec<CtorId> = self.sig().ctor_ids().collect();
        for &c in &ctors {
            let args = self.sig().ctor_args(c).to_vec();
            let sort = self.names.sort(self.sig().ctor_sort(c)).to_string();
            let vars: Vec<String> = (0..args.len()).map(|i| format!("Q{i}")).collect();
            let term = app(self.names.ctor(c), &vars);
            if args.is_empty() {
                self.line(format!("reachAt(Q, {sort}, 0) :- rule({term}, Q)."));
            } else {
                let mut body = vec![format!("rule({term}, Q)")];
                for (v, &s) in vars.iter().zip(&args) {
                    body.push(format!("reachAt({v}, {}, D)", self.names.sort(s)));
                }
                body.push(format!("D < {horizon}"));
                self.line(format!("reachAt(Q, {sort}, D+1) :- {}.", body.join(", ")));
            }
        }
        self.line(format!("reachAt(Q, S, D+1) :- reachAt(Q, S, D), D < {horizon}."));
        self.line("reached(Q, S) :- reachAt(Q, S, _).");
        self.line(":- reachAt(Q, S, D), Q > 1, not reachAt(Q-1, S, D).");
        for &c in &ctors {
            let args = self.sig().ctor_args(c).to_vec();
            let vars: Vec<String> = (0..args.len()).map(|i| format!("Q{i}")).collect();
            let term = app(self.names.ctor(c), &vars);
            for (k, &s) in args.iter().enumerate() {
                let mut moved = vars.clone();
                moved[k] = "1".to_string();
                let other = app(self.names.ctor(c), &moved);
                let var = &vars[k];
                self.line(format!(
                    ":- rule({term}, Q), {}, not reached({var}, {}), rule({other}, R), Q != R.",
                    self.domain(var, s),
                    self.names.sort(s)
                ));
            }
        }
    }
}

/// Program whose answer sets are the automata with the given number of states
/// per sort together with tables that form a model. With symmetry breaking,
/// only one numbering of the reachable states survives, unreachable states
/// behave like state 1, and the tables are the least ones.
pub fn emit_model_search(problem: &Problem, max_states: &[u32], symmetry_breaking: bool) -> AspProgram {
    assert_eq!(max_states.len(), problem.signature.num_sorts(), "one bound per sort");
    assert!(max_states.iter().all(|&n| n >= 1), "state bounds must be positive");
    let mut e = Emitter::new(problem);
    e.states(max_states);
    e.transition_choices();
    if !symmetry_breaking {
        e.predicate_choices();
    }
    if e.has_diseq() {
        e.diff_approx();
    }
    e.clauses();
    if symmetry_breaking {
        e.symmetry_breaking(max_states);
    }
    AspProgram {
        text: e.out,
        kind: ProgramKind::ModelSearch {
            max_states: max_states.to_vec(),
            symmetry_breaking,
        },
    }
}

fn term(e: &Emitter, t: &Term) -> String {
    match t {
        Term::Var(v) => format!("V{}", v.index()),
        Term::App(c, args) => app(
            e.names.ctor(*c),
            &args.iter().map(|a| term(e, a)).collect::<Vec<_>>(),
        ),
    }
}

fn term_sort(sig: &Signature, clause: &Clause, t: &Term) -> SortId {
    match t {
        Term::Var(v) => clause.vars[v.index()].sort,
        Term::App(c, _) => sig.ctor_sort(*c),
    }
}

/// Program that is satisfiable iff some goal body holds in the least model
/// restricted to terms of depth at most `depth`.
pub fn emit_counterexample_search(problem: &Problem, depth: usize) -> AspProgram {
    let mut e = Emitter::new(problem);
    let sig = problem.signature.clone();
    e.line(format!("#const maxDepth={depth}."));
    for c in sig.ctor_ids() {
        let args = sig.ctor_args(c).to_vec();
        let sort = e.names.sort(sig.ctor_sort(c)).to_string();
        let vars: Vec<String> = (0..args.len()).map(|i| format!("X{i}")).collect();
        let t = app(e.names.ctor(c), &vars);
        match args.len() {
            0 => e.line(format!("tm({sort}, {t}, 0).")),
            1 => e.line(format!(
                "tm({sort}, {t}, D+1) :- tm({}, X0, D), D < maxDepth.",
                e.names.sort(args[0])
            )),
            _ => {
                let mut body: Vec<String> = vars
                    .iter()
                    .zip(&args)
                    .enumerate()
                    .map(|(i, (v, &s))| format!("tm({}, {v}, D{i})", e.names.sort(s)))
                    .collect();
                // max(a, b) = (a + b + |a - b|) / 2, folded over the arguments
                let max = (1..args.len()).fold("D0".to_string(), |m, i| {
                    format!("({m}+D{i}+|{m}-D{i}|)/2")
                });
                body.push(format!("D = {max}"));
                body.push("D < maxDepth".to_string());
                e.line(format!("tm({sort}, {t}, D+1) :- {}.", body.join(", ")));
            }
        }
    }
    e.line("dom(T, S) :- tm(S, T, _).");
    let mut lines = Vec::new();
    for (ci, clause) in problem.definite().chain(problem.goals()) {
        let atom = |a: &Atom| {
            app(
                e.names.pred(a.pred),
                &a.args.iter().map(|t| term(&e, t)).collect::<Vec<_>>(),
            )
        };
        let mut body = Vec::new();
        let mut ground_terms: Vec<&Term> = Vec::new();
        for l in &clause.body {
            match l {
                Literal::Atom(a) => {
                    body.push(atom(a));
                    ground_terms.extend(a.args.iter().filter(|t| matches!(t, Term::App(..))));
                }
                Literal::Eq(l, r) => {
                    body.push(format!("{} = {}", term(&e, l), term(&e, r)));
                    ground_terms.extend([l, r].into_iter().filter(|t| matches!(t, Term::App(..))));
                }
                Literal::Diseq(l, r) => {
                    body.push(format!("{} != {}", term(&e, l), term(&e, r)));
                    ground_terms.extend([l, r].into_iter().filter(|t| matches!(t, Term::App(..))));
                }
            }
        }
        if let Some(h) = &clause.head {
            ground_terms.extend(h.args.iter().filter(|t| matches!(t, Term::App(..))));
        }
        for (i, v) in clause.vars.iter().enumerate() {
            body.push(format!("dom(V{i}, {})", e.names.sort(v.sort)));
        }
        let mut seen = Vec::new();
        for t in ground_terms {
            let s = format!("dom({}, {})", term(&e, t), e.names.sort(term_sort(&sig, clause, t)));
            if !seen.contains(&s) {
                seen.push(s);
            }
        }
        body.extend(seen);
        let head = match &clause.head {
            Some(h) => atom(h),
            None => format!("violated({ci})"),
        };
        if body.is_empty() {
            lines.push(format!("{head}."));
        } else {
            lines.push(format!("{head} :- {}.", body.join(", ")));
        }
    }
    for l in lines {
        e.line(l);
    }
    e.line("found :- violated(_).");
    e.line(":- not found.");
    AspProgram {
        text: e.out,
        kind: ProgramKind::CounterexampleSearch { depth },
    }
}
