use std::collections::HashSet;
use std::fmt;

use super::*;

/// A violated well-formedness condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    DuplicateSort(String),
    DuplicateConstructor(String),
    DuplicatePredicate(String),
    /// A predicate shares its name with a constructor.
    NameClash(String),
    UnknownSort { context: String, sort: u32 },
    UninhabitedSort(String),
    UnknownConstructor { clause: usize, ctor: u32 },
    UnknownPredicate { clause: usize, pred: u32 },
    UnknownVariable { clause: usize, var: u32 },
    DuplicateVariable { clause: usize, name: String },
    Arity { clause: usize, symbol: String, expected: usize, found: usize },
    SortMismatch { clause: usize, context: String, expected: String, found: String },
}

impl Issue {
    /// Index of the offending clause, if the issue is local to one.
    pub fn clause(&self) -> Option<usize> {
        match self {
            Issue::UnknownConstructor { clause, .. }
            | Issue::UnknownPredicate { clause, .. }
            | Issue::UnknownVariable { clause, .. }
            | Issue::DuplicateVariable { clause, .. }
            | Issue::Arity { clause, .. }
            | Issue::SortMismatch { clause, .. } => Some(*clause),
            _ => None,
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::DuplicateSort(n) => write!(f, "sort `{n}` declared twice"),
            Issue::DuplicateConstructor(n) => write!(f, "constructor `{n}` declared twice"),
            Issue::DuplicatePredicate(n) => write!(f, "predicate `{n}` declared twice"),
            Issue::NameClash(n) => write!(f, "`{n}` is both a predicate and a constructor"),
            Issue::UnknownSort { context, sort } => {
                write!(f, "{context} refers to undeclared sort #{sort}")
            }
            Issue::UninhabitedSort(n) => write!(f, "sort `{n}` has no finite ground term"),
            Issue::UnknownConstructor { clause, ctor } => {
                write!(f, "clause {clause}: unknown constructor #{ctor}")
            }
            Issue::UnknownPredicate { clause, pred } => {
                write!(f, "clause {clause}: unknown predicate #{pred}")
            }
            Issue::UnknownVariable { clause, var } => {
                write!(f, "clause {clause}: unbound variable #{var}")
            }
            Issue::DuplicateVariable { clause, name } => {
                write!(f, "clause {clause}: variable `{name}` bound twice")
            }
            Issue::Arity {
                clause,
                symbol,
                expected,
                found,
            } => write!(
                f,
                "clause {clause}: `{symbol}` expects {expected} argument(s), found {found}"
            ),
            Issue::SortMismatch {
                clause,
                context,
                expected,
                found,
            } => write!(
                f,
                "clause {clause}: {context}: expected sort `{expected}`, found `{found}`"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// Nothing to verify: the problem has no goal clause.
    MissingGoal,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::MissingGoal => write!(f, "problem has no goal clause"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    /// No issues; warnings do not count.
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.issues {
            writeln!(f, "error: {i}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Collects every well-formedness violation of `problem`.
pub fn validate(problem: &Problem) -> ValidationReport {
    let mut report = ValidationReport::default();
    let sig = &problem.signature;
    let nsorts = sig.num_sorts() as u32;

    let mut seen = HashSet::new();
    for s in sig.sorts() {
        if !seen.insert(s.name.as_str()) {
            report.issues.push(Issue::DuplicateSort(s.name.clone()));
        }
    }
    let mut ctor_names = HashSet::new();
    for s in sig.sorts() {
        for c in &s.constructors {
            if !ctor_names.insert(c.name.as_str()) {
                report.issues.push(Issue::DuplicateConstructor(c.name.clone()));
            }
            for a in &c.args {
                if a.0 >= nsorts {
                    report.issues.push(Issue::UnknownSort {
                        context: format!("constructor `{}`", c.name),
                        sort: a.0,
                    });
                }
            }
        }
    }
    for (decl, inhabited) in sig.sorts().iter().zip(sig.inhabited_sorts()) {
        if !inhabited {
            report.issues.push(Issue::UninhabitedSort(decl.name.clone()));
        }
    }

    let mut pred_names = HashSet::new();
    for p in &problem.predicates {
        if !pred_names.insert(p.name.as_str()) {
            report.issues.push(Issue::DuplicatePredicate(p.name.clone()));
        }
        if ctor_names.contains(p.name.as_str()) {
            report.issues.push(Issue::NameClash(p.name.clone()));
        }
        for a in &p.args {
            if a.0 >= nsorts {
                report.issues.push(Issue::UnknownSort {
                    context: format!("predicate `{}`", p.name),
                    sort: a.0,
                });
            }
        }
    }

    for (i, clause) in problem.clauses.iter().enumerate() {
        ClauseChecker {
            problem,
            clause,
            index: i,
            issues: &mut report.issues,
        }
        .check();
    }

    if problem.goals().next().is_none() {
        report.warnings.push(Warning::MissingGoal);
    }
    report
}

struct ClauseChecker<'a> {
    problem: &'a Problem,
    clause: &'a Clause,
    index: usize,
    issues: &'a mut Vec<Issue>,
}

impl ClauseChecker<'_> {
    fn check(mut self) {
        let mut names = HashSet::new();
        for v in &self.clause.vars {
            if !names.insert(v.name.as_str()) {
                self.issues.push(Issue::DuplicateVariable {
                    clause: self.index,
                    name: v.name.clone(),
                });
            }
            if v.sort.index() >= self.problem.signature.num_sorts() {
                self.issues.push(Issue::UnknownSort {
                    context: format!("clause {} variable `{}`", self.index, v.name),
                    sort: v.sort.0,
                });
            }
        }
        if let Some(head) = &self.clause.head {
            self.atom(head);
        }
        for lit in &self.clause.body {
            match lit {
                Literal::Atom(a) => self.atom(a),
                Literal::Eq(l, r) | Literal::Diseq(l, r) => {
                    let ls = self.term(l);
                    let rs = self.term(r);
                    if let (Some(ls), Some(rs)) = (ls, rs) {
                        if ls != rs {
                            self.mismatch("(dis)equality", rs, ls);
                        }
                    }
                }
            }
        }
    }

    fn sort_name(&self, s: SortId) -> String {
        self.problem
            .signature
            .sorts()
            .get(s.index())
            .map(|d| d.name.clone())
            .unwrap_or_else(|| format!("#{}", s.0))
    }

    fn mismatch(&mut self, context: &str, expected: SortId, found: SortId) {
        let issue = Issue::SortMismatch {
            clause: self.index,
            context: context.to_string(),
            expected: self.sort_name(expected),
            found: self.sort_name(found),
        };
        self.issues.push(issue);
    }

    fn atom(&mut self, atom: &Atom) {
        let Some(decl) = self.problem.predicates.get(atom.pred.index()) else {
            self.issues.push(Issue::UnknownPredicate {
                clause: self.index,
                pred: atom.pred.0,
            });
            return;
        };
        if decl.args.len() != atom.args.len() {
            self.issues.push(Issue::Arity {
                clause: self.index,
                symbol: decl.name.clone(),
                expected: decl.args.len(),
                found: atom.args.len(),
            });
        }
        for (arg, &expected) in atom.args.iter().zip(&decl.args) {
            if let Some(found) = self.term(arg) {
                if found != expected {
                    self.mismatch(&format!("argument of `{}`", decl.name), expected, found);
                }
            }
        }
    }

    /// Sort of a term, or `None` when it is too broken to tell.
    fn term(&mut self, term: &Term) -> Option<SortId> {
        let sig = &self.problem.signature;
        match term {
            Term::Var(v) => match self.clause.vars.get(v.index()) {
                Some(d) => Some(d.sort),
                None => {
                    self.issues.push(Issue::UnknownVariable {
                        clause: self.index,
                        var: v.0,
                    });
                    None
                }
            },
            Term::App(c, args) => {
                if c.index() >= sig.num_ctors() {
                    self.issues.push(Issue::UnknownConstructor {
                        clause: self.index,
                        ctor: c.0,
                    });
                    return None;
                }
                let decl = sig.ctor(*c);
                if decl.args.len() != args.len() {
                    self.issues.push(Issue::Arity {
                        clause: self.index,
                        symbol: decl.name.clone(),
                        expected: decl.args.len(),
                        found: args.len(),
                    });
                }
                let name = decl.name.clone();
                let expected_args = decl.args.clone();
                for (arg, expected) in args.iter().zip(expected_args) {
                    if let Some(found) = self.term(arg) {
                        if found != expected {
                            self.mismatch(&format!("argument of `{name}`"), expected, found);
                        }
                    }
                }
                Some(sig.ctor_sort(*c))
            }
        }
    }
}
