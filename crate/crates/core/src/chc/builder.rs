use super::*;

/// Name-based construction of a [`Problem`].
///
/// Panics on unknown names: it is meant for generators and tests where the
/// input is program text, not user data. User input goes through the
/// SMT-LIB frontend, which reports spanned diagnostics instead.
#[derive(Debug, Default)]
pub struct ProblemBuilder {
    signature: Option<Signature>,
    predicates: Vec<PredicateDecl>,
    clauses: Vec<Clause>,
}

/// Constructor name and argument sort names.
pub type CtorSpec<'a> = (&'a str, &'a [&'a str]);

impl ProblemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares all datatypes at once, like one `declare-datatypes` block.
    /// Argument sorts are given by name and may refer to any sort in the block.
    pub fn datatypes(&mut self, sorts: &[(&str, &[CtorSpec])]) -> &mut Self {
        assert!(self.signature.is_none(), "datatypes declared twice");
        let lookup = |name: &str| -> SortId {
            let i = sorts
                .iter()
                .position(|(s, _)| *s == name)
                .unwrap_or_else(|| panic!("unknown sort {name}"));
            SortId(i as u32)
        };
        let decls = sorts
            .iter()
            .map(|(name, ctors)| SortDecl {
                name: name.to_string(),
                constructors: ctors
                    .iter()
                    .map(|(c, args)| CtorDecl {
                        name: c.to_string(),
                        args: args.iter().map(|a| lookup(a)).collect(),
                    })
                    .collect(),
            })
            .collect();
        self.signature = Some(Signature::new(decls));
        self
    }

    pub fn signature(&self) -> &Signature {
        self.signature.as_ref().expect("datatypes not declared")
    }

    pub fn sort(&self, name: &str) -> SortId {
        self.signature()
            .sort_by_name(name)
            .unwrap_or_else(|| panic!("unknown sort {name}"))
    }

    pub fn ctor(&self, name: &str) -> CtorId {
        self.signature()
            .ctor_by_name(name)
            .unwrap_or_else(|| panic!("unknown constructor {name}"))
    }

    pub fn predicate(&mut self, name: &str, args: &[&str]) -> PredId {
        let args = args.iter().map(|a| self.sort(a)).collect();
        self.predicates.push(PredicateDecl {
            name: name.to_string(),
            args,
        });
        PredId(self.predicates.len() as u32 - 1)
    }

    pub fn pred(&self, name: &str) -> PredId {
        self.predicates
            .iter()
            .position(|p| p.name == name)
            .map(|i| PredId(i as u32))
            .unwrap_or_else(|| panic!("unknown predicate {name}"))
    }

    pub fn clause(&self) -> ClauseBuilder<'_> {
        ClauseBuilder {
            owner: self,
            vars: Vec::new(),
            body: Vec::new(),
        }
    }

    pub fn push(&mut self, clause: Clause) -> &mut Self {
        self.clauses.push(clause);
        self
    }

    pub fn build(self) -> Problem {
        Problem::new(
            self.signature.unwrap_or_else(|| Signature::new(Vec::new())),
            self.predicates,
            self.clauses,
        )
    }
}

pub struct ClauseBuilder<'a> {
    owner: &'a ProblemBuilder,
    vars: Vec<VarDecl>,
    body: Vec<Literal>,
}

impl ClauseBuilder<'_> {
    pub fn var(&mut self, name: &str, sort: &str) -> Term {
        let sort = self.owner.sort(sort);
        self.vars.push(VarDecl {
            name: name.to_string(),
            sort,
        });
        Term::Var(VarId(self.vars.len() as u32 - 1))
    }

    /// `ctor(args...)`.
    pub fn app(&self, ctor: &str, args: Vec<Term>) -> Term {
        Term::App(self.owner.ctor(ctor), args)
    }

    pub fn atom(&mut self, pred: &str, args: Vec<Term>) -> &mut Self {
        let pred = self.owner.pred(pred);
        self.body.push(Literal::Atom(Atom { pred, args }));
        self
    }

    pub fn eq(&mut self, l: Term, r: Term) -> &mut Self {
        self.body.push(Literal::Eq(l, r));
        self
    }

    pub fn diseq(&mut self, l: Term, r: Term) -> &mut Self {
        self.body.push(Literal::Diseq(l, r));
        self
    }

    pub fn head(self, pred: &str, args: Vec<Term>) -> Clause {
        let pred = self.owner.pred(pred);
        Clause {
            vars: self.vars,
            head: Some(Atom { pred, args }),
            body: self.body,
        }
    }

    pub fn goal(self) -> Clause {
        Clause {
            vars: self.vars,
            head: None,
            body: self.body,
        }
    }
}
