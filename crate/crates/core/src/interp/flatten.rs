use std::collections::BTreeSet;
use std::fmt;

use crate::chc::*;

/// A clause over state variables.
///
/// Variables are numbered as follows: the clause's own variables first, in
/// binder order, then one fresh variable per constructor occurrence, visiting
/// body literals in order and then the head, arguments before their
/// application. Equalities merge variables, keeping the highest number, which
/// also gives the variable its name `Q<n>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatClause {
    pub vars: Vec<FlatVar>,
    /// `ctor(args) -> result`, in creation order.
    pub trans: Vec<FlatTransition>,
    pub preds: Vec<FlatAtom>,
    pub diseqs: Vec<(usize, usize)>,
    pub head: Option<FlatAtom>,
    /// Head variables constrained by nothing in the body; each ranges over all
    /// states of its sort.
    pub generators: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatVar {
    pub name: String,
    pub sort: SortId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatTransition {
    pub ctor: CtorId,
    pub args: Vec<usize>,
    pub result: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatAtom {
    pub pred: PredId,
    pub args: Vec<usize>,
}

impl FlatClause {
    pub fn is_goal(&self) -> bool {
        self.head.is_none()
    }

    pub fn var_name(&self, v: usize) -> &str {
        &self.vars[v].name
    }
}

struct Flattener<'a> {
    sig: &'a Signature,
    sorts: Vec<SortId>,
    parent: Vec<usize>,
    trans: Vec<(CtorId, Vec<usize>, usize)>,
}

impl Flattener<'_> {
    fn term(&mut self, t: &Term) -> usize {
        match t {
            Term::Var(v) => v.index(),
            Term::App(c, args) => {
                let args: Vec<usize> = args.iter().map(|a| self.term(a)).collect();
                let id = self.sorts.len();
                self.sorts.push(self.sig.ctor_sort(*c));
                self.parent.push(id);
                self.trans.push((*c, args, id));
                id
            }
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            let p = self.parent[v];
            self.parent[v] = self.parent[p];
            v = p;
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
    }
}

/// Compiles a clause to state-variable form.
pub fn flatten(sig: &Signature, clause: &Clause) -> FlatClause {
    let n = clause.vars.len();
    let mut f = Flattener {
        sig,
        sorts: clause.vars.iter().map(|v| v.sort).collect(),
        parent: (0..n).collect(),
        trans: Vec::new(),
    };
    let mut preds = Vec::new();
    let mut eqs = Vec::new();
    let mut diseqs = Vec::new();
    for lit in &clause.body {
        match lit {
            Literal::Atom(a) => {
                let args: Vec<usize> = a.args.iter().map(|t| f.term(t)).collect();
                preds.push((a.pred, args));
            }
            Literal::Eq(l, r) => {
                let l = f.term(l);
                let r = f.term(r);
                eqs.push((l, r));
            }
            Literal::Diseq(l, r) => {
                let l = f.term(l);
                let r = f.term(r);
                diseqs.push((l, r));
            }
        }
    }
    let head = clause
        .head
        .as_ref()
        .map(|a| (a.pred, a.args.iter().map(|t| f.term(t)).collect::<Vec<_>>()));
    for (a, b) in eqs {
        f.union(a, b);
    }

    let reps: Vec<usize> = (0..f.sorts.len()).map(|v| f.find(v)).collect();
    let mut used = BTreeSet::new();
    let mut constrained = BTreeSet::new();
    let mark = |v: usize, used: &mut BTreeSet<usize>| {
        used.insert(reps[v]);
        reps[v]
    };
    let trans: Vec<(CtorId, Vec<usize>, usize)> = f
        .trans
        .iter()
        .map(|(c, args, r)| {
            let args: Vec<usize> = args.iter().map(|&a| mark(a, &mut used)).collect();
            (*c, args, mark(*r, &mut used))
        })
        .collect();
    let preds: Vec<(PredId, Vec<usize>)> = preds
        .into_iter()
        .map(|(p, args)| (p, args.into_iter().map(|a| mark(a, &mut used)).collect()))
        .collect();
    let diseqs: Vec<(usize, usize)> = diseqs
        .into_iter()
        .map(|(a, b)| (mark(a, &mut used), mark(b, &mut used)))
        .collect();
    constrained.extend(used.iter().copied());
    let head = head.map(|(p, args)| {
        (
            p,
            args.into_iter()
                .map(|a| mark(a, &mut used))
                .collect::<Vec<usize>>(),
        )
    });

    let order: Vec<usize> = used.iter().copied().collect();
    let index = |v: usize| order.binary_search(&v).expect("used variable");
    let vars = order
        .iter()
        .map(|&v| FlatVar {
            name: format!("Q{v}"),
            sort: f.sorts[v],
        })
        .collect();
    let generators = order
        .iter()
        .copied()
        .filter(|v| !constrained.contains(v))
        .map(index)
        .collect();
    FlatClause {
        vars,
        trans: trans
            .into_iter()
            .map(|(ctor, args, result)| FlatTransition {
                ctor,
                args: args.into_iter().map(index).collect(),
                result: index(result),
            })
            .collect(),
        preds: preds
            .into_iter()
            .map(|(pred, args)| FlatAtom {
                pred,
                args: args.into_iter().map(index).collect(),
            })
            .collect(),
        diseqs: diseqs
            .into_iter()
            .map(|(a, b)| (index(a), index(b)))
            .collect(),
        head: head.map(|(pred, args)| FlatAtom {
            pred,
            args: args.into_iter().map(index).collect(),
        }),
        generators,
    }
}

/// Prolog-like rendering with `rule(...)` transitions and `state(...)` generators.
pub struct DisplayFlat<'a> {
    pub problem: &'a Problem,
    pub clause: &'a FlatClause,
}

impl fmt::Display for DisplayFlat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.clause;
        let atom = |a: &FlatAtom| {
            let args: Vec<&str> = a.args.iter().map(|&v| c.var_name(v)).collect();
            if args.is_empty() {
                self.problem.pred_name(a.pred).to_string()
            } else {
                format!("{}({})", self.problem.pred_name(a.pred), args.join(", "))
            }
        };
        let mut body: Vec<String> = c.preds.iter().map(atom).collect();
        for t in &c.trans {
            let name = self.problem.signature.ctor_name(t.ctor);
            let args: Vec<&str> = t.args.iter().map(|&v| c.var_name(v)).collect();
            let term = if args.is_empty() {
                name.to_string()
            } else {
                format!("{name}({})", args.join(", "))
            };
            body.push(format!("rule({term}, {})", c.var_name(t.result)));
        }
        for &(a, b) in &c.diseqs {
            body.push(format!("diffApprox({}, {})", c.var_name(a), c.var_name(b)));
        }
        for &g in &c.generators {
            body.push(format!("state({})", c.var_name(g)));
        }
        if let Some(h) = &c.head {
            write!(f, "{}", atom(h))?;
            if !body.is_empty() {
                write!(f, " ")?;
            }
        }
        if !body.is_empty() {
            write!(f, ":- {}", body.join(", "))?;
        }
        write!(f, ".")
    }
}
