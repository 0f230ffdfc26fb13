//! Constrained Horn clauses over algebraic data types.
//!
//! A [`Problem`] bundles a multi-sorted constructor [`Signature`], predicate
//! declarations and a list of clauses. Sorts, constructors and predicates are
//! referred to by dense indices so that the analyses downstream can use flat
//! tables; names are kept for printing and diagnostics.

mod builder;
pub mod ground;
mod validate;

use std::fmt;

pub use builder::{ClauseBuilder, CtorSpec, ProblemBuilder};
pub use validate::{validate, Issue, ValidationReport, Warning};

/// Index of a sort in [`Signature::sorts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct SortId(pub u32);

/// Global constructor index, numbered sort-major in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct CtorId(pub u32);

/// Index of a predicate in [`Problem::predicates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct PredId(pub u32);

/// Index of a variable in [`Clause::vars`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl SortId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl CtorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PredId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtorDecl {
    pub name: String,
    pub args: Vec<SortId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    pub constructors: Vec<CtorDecl>,
}

/// The algebraic data types of a problem.
///
/// Constructors get a global [`CtorId`] in sort-major declaration order; this
/// is the order every enumeration in the crate follows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<SortDecl>,
    ctor_index: Vec<(SortId, usize)>,
    sort_offsets: Vec<u32>,
}

impl Signature {
    pub fn new(sorts: Vec<SortDecl>) -> Self {
        let mut ctor_index = Vec::new();
        let mut sort_offsets = Vec::with_capacity(sorts.len());
        for (s, decl) in sorts.iter().enumerate() {
            sort_offsets.push(ctor_index.len() as u32);
            for i in 0..decl.constructors.len() {
                ctor_index.push((SortId(s as u32), i));
            }
        }
        Signature {
            sorts,
            ctor_index,
            sort_offsets,
        }
    }

    pub fn sorts(&self) -> &[SortDecl] {
        &self.sorts
    }

    pub fn num_sorts(&self) -> usize {
        self.sorts.len()
    }

    pub fn num_ctors(&self) -> usize {
        self.ctor_index.len()
    }

    pub fn sort_ids(&self) -> impl Iterator<Item = SortId> + '_ {
        (0..self.sorts.len() as u32).map(SortId)
    }

    pub fn ctor_ids(&self) -> impl Iterator<Item = CtorId> + '_ {
        (0..self.ctor_index.len() as u32).map(CtorId)
    }

    pub fn sort_name(&self, sort: SortId) -> &str {
        &self.sorts[sort.index()].name
    }

    pub fn ctor(&self, ctor: CtorId) -> &CtorDecl {
        let (sort, i) = self.ctor_index[ctor.index()];
        &self.sorts[sort.index()].constructors[i]
    }

    pub fn ctor_name(&self, ctor: CtorId) -> &str {
        &self.ctor(ctor).name
    }

    pub fn ctor_args(&self, ctor: CtorId) -> &[SortId] {
        &self.ctor(ctor).args
    }

    /// Result sort of a constructor.
    pub fn ctor_sort(&self, ctor: CtorId) -> SortId {
        self.ctor_index[ctor.index()].0
    }

    /// Constructors of `sort`, in declaration order.
    pub fn ctors_of(&self, sort: SortId) -> impl Iterator<Item = CtorId> + '_ {
        let start = self.sort_offsets[sort.index()];
        let len = self.sorts[sort.index()].constructors.len() as u32;
        (start..start + len).map(CtorId)
    }

    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        self.sorts
            .iter()
            .position(|s| s.name == name)
            .map(|i| SortId(i as u32))
    }

    pub fn ctor_by_name(&self, name: &str) -> Option<CtorId> {
        self.ctor_ids().find(|&c| self.ctor_name(c) == name)
    }

    /// Sorts for which some finite ground term exists (least fixpoint).
    pub fn inhabited_sorts(&self) -> Vec<bool> {
        let mut inhabited = vec![false; self.sorts.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for c in self.ctor_ids() {
                let sort = self.ctor_sort(c).index();
                if inhabited[sort] {
                    continue;
                }
                let ok = self.ctor_args(c).iter().all(|a| {
                    inhabited
                        .get(a.index())
                        .copied()
                        .unwrap_or(false)
                });
                if ok {
                    inhabited[sort] = true;
                    changed = true;
                }
            }
        }
        inhabited
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub args: Vec<SortId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    App(CtorId, Vec<Term>),
}

impl Term {
    pub fn var(v: VarId) -> Term {
        Term::Var(v)
    }

    pub fn app(ctor: CtorId, args: Vec<Term>) -> Term {
        Term::App(ctor, args)
    }

    pub fn constant(ctor: CtorId) -> Term {
        Term::App(ctor, Vec::new())
    }

    /// Constructor nesting depth; variables count as depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) if args.is_empty() => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(VarId)) {
        match self {
            Term::Var(v) => f(*v),
            Term::App(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: PredId,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Atom(Atom),
    Eq(Term, Term),
    Diseq(Term, Term),
}

impl Literal {
    pub fn for_each_var(&self, f: &mut impl FnMut(VarId)) {
        match self {
            Literal::Atom(a) => a.args.iter().for_each(|t| t.for_each_var(f)),
            Literal::Eq(l, r) | Literal::Diseq(l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: SortId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseKind {
    Definite,
    Goal,
}

/// `forall vars. body => head`, or `body => false` when `head` is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub vars: Vec<VarDecl>,
    pub head: Option<Atom>,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn kind(&self) -> ClauseKind {
        if self.head.is_some() {
            ClauseKind::Definite
        } else {
            ClauseKind::Goal
        }
    }

    pub fn is_goal(&self) -> bool {
        self.head.is_none()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.index()].name
    }

    pub fn body_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            Literal::Atom(a) => Some(a),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub signature: Signature,
    pub predicates: Vec<PredicateDecl>,
    pub clauses: Vec<Clause>,
}

impl Problem {
    pub fn new(signature: Signature, predicates: Vec<PredicateDecl>, clauses: Vec<Clause>) -> Self {
        Problem {
            signature,
            predicates,
            clauses,
        }
    }

    pub fn empty() -> Self {
        Problem::new(Signature::new(Vec::new()), Vec::new(), Vec::new())
    }

    pub fn pred(&self, p: PredId) -> &PredicateDecl {
        &self.predicates[p.index()]
    }

    pub fn pred_name(&self, p: PredId) -> &str {
        &self.predicates[p.index()].name
    }

    pub fn pred_ids(&self) -> impl Iterator<Item = PredId> + '_ {
        (0..self.predicates.len() as u32).map(PredId)
    }

    pub fn pred_by_name(&self, name: &str) -> Option<PredId> {
        self.predicates
            .iter()
            .position(|p| p.name == name)
            .map(|i| PredId(i as u32))
    }

    pub fn goals(&self) -> impl Iterator<Item = (usize, &Clause)> {
        self.clauses.iter().enumerate().filter(|(_, c)| c.is_goal())
    }

    pub fn definite(&self) -> impl Iterator<Item = (usize, &Clause)> {
        self.clauses.iter().enumerate().filter(|(_, c)| !c.is_goal())
    }

    /// Renders a clause term with the clause's variable names.
    pub fn display_term<'a>(&'a self, clause: &'a Clause, term: &'a Term) -> impl fmt::Display + 'a {
        DisplayTerm {
            sig: &self.signature,
            clause,
            term,
        }
    }

    /// Renders a clause Prolog-style, e.g. `even(s(X)) :- odd(X).`
    pub fn display_clause<'a>(&'a self, clause: &'a Clause) -> impl fmt::Display + 'a {
        DisplayClause {
            problem: self,
            clause,
        }
    }
}

struct DisplayTerm<'a> {
    sig: &'a Signature,
    clause: &'a Clause,
    term: &'a Term,
}

impl fmt::Display for DisplayTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => match self.clause.vars.get(v.index()) {
                Some(decl) => write!(f, "{}", decl.name),
                None => write!(f, "?{}", v.0),
            },
            Term::App(c, args) => {
                write!(f, "{}", self.sig.ctor_name(*c))?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(
                            f,
                            "{}",
                            DisplayTerm {
                                sig: self.sig,
                                clause: self.clause,
                                term: a
                            }
                        )?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

struct DisplayClause<'a> {
    problem: &'a Problem,
    clause: &'a Clause,
}

impl DisplayClause<'_> {
    fn atom(&self, f: &mut fmt::Formatter<'_>, atom: &Atom) -> fmt::Result {
        write!(f, "{}", self.problem.pred_name(atom.pred))?;
        if !atom.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in atom.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.problem.display_term(self.clause, a))?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for DisplayClause<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(head) = &self.clause.head {
            self.atom(f, head)?;
            if self.clause.body.is_empty() {
                return write!(f, ".");
            }
            write!(f, " ")?;
        }
        write!(f, ":-")?;
        for (i, lit) in self.clause.body.iter().enumerate() {
            write!(f, "{}", if i == 0 { " " } else { ", " })?;
            match lit {
                Literal::Atom(a) => self.atom(f, a)?,
                Literal::Eq(l, r) => write!(
                    f,
                    "{} = {}",
                    self.problem.display_term(self.clause, l),
                    self.problem.display_term(self.clause, r)
                )?,
                Literal::Diseq(l, r) => write!(
                    f,
                    "{} != {}",
                    self.problem.display_term(self.clause, l),
                    self.problem.display_term(self.clause, r)
                )?,
            }
        }
        write!(f, ".")
    }
}
