use std::collections::HashMap;

use super::sexpr::{Reader, SExpr, SExprKind};
use super::{ErrorKind, ParseError, SourceSpan};
use crate::chc::*;

/// Parses a problem file. Sort errors and duplicate declarations are reported
/// with the span of the offending command or symbol.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut parser = Parser::default();
    let mut reader = Reader::new(text);
    while let Some(cmd) = reader.next_expr()? {
        if !parser.command(&cmd)? {
            break;
        }
    }
    parser.finish()
}

fn err(kind: ErrorKind, span: SourceSpan, message: impl Into<String>) -> ParseError {
    ParseError {
        kind,
        message: message.into(),
        span,
        expected: Vec::new(),
    }
}

fn expected(span: SourceSpan, message: impl Into<String>, what: &[&str]) -> ParseError {
    ParseError {
        kind: ErrorKind::Syntax,
        message: message.into(),
        span,
        expected: what.iter().map(|s| s.to_string()).collect(),
    }
}

#[derive(Default)]
struct Parser {
    sorts: Vec<SortDecl>,
    sort_spans: Vec<SourceSpan>,
    ctors: HashMap<String, (CtorId, SortId, Vec<SortId>)>,
    num_ctors: u32,
    predicates: Vec<PredicateDecl>,
    pred_index: HashMap<String, PredId>,
    clauses: Vec<Clause>,
    clause_spans: Vec<SourceSpan>,
}

impl Parser {
    /// Handles one command; `false` means the file ends here.
    fn command(&mut self, cmd: &SExpr) -> Result<bool, ParseError> {
        let Some(items) = cmd.list() else {
            return Err(expected(cmd.span, "expected a command", &["("]));
        };
        let Some(head) = items.first().and_then(SExpr::keyword) else {
            return Err(expected(cmd.span, "expected a command name", &["declare-datatypes", "declare-fun", "assert", "check-sat"]));
        };
        match head {
            "declare-datatypes" => self.datatypes(cmd, &items[1..])?,
            "declare-fun" => self.declare_fun(cmd, &items[1..])?,
            "assert" => {
                let [body] = &items[1..] else {
                    return Err(err(ErrorKind::Syntax, cmd.span, "`assert` takes one formula"));
                };
                let clause = self.clause(body)?;
                self.clauses.push(clause);
                self.clause_spans.push(cmd.span);
            }
            "check-sat" | "exit" => return Ok(false),
            "set-logic" | "set-info" | "set-option" => {}
            other => {
                return Err(err(
                    ErrorKind::Unsupported,
                    items[0].span,
                    format!("unsupported command `{other}`"),
                ))
            }
        }
        Ok(true)
    }

    fn sort_ref(&self, e: &SExpr) -> Result<SortId, ParseError> {
        let name = e
            .symbol()
            .ok_or_else(|| expected(e.span, "expected a sort name", &["symbol"]))?;
        self.sorts
            .iter()
            .position(|s| s.name == name)
            .map(|i| SortId(i as u32))
            .ok_or_else(|| err(ErrorKind::Sort, e.span, format!("undeclared sort `{name}`")))
    }

    fn datatypes(&mut self, cmd: &SExpr, args: &[SExpr]) -> Result<(), ParseError> {
        let [heads, bodies] = args else {
            return Err(err(
                ErrorKind::Syntax,
                cmd.span,
                "`declare-datatypes` takes a sort list and a constructor list",
            ));
        };
        let heads = heads
            .list()
            .ok_or_else(|| expected(heads.span, "expected sort declarations", &["("]))?;
        let bodies = bodies
            .list()
            .ok_or_else(|| expected(bodies.span, "expected constructor lists", &["("]))?;
        if heads.len() != bodies.len() {
            return Err(err(
                ErrorKind::Syntax,
                cmd.span,
                format!("{} sorts declared but {} constructor lists given", heads.len(), bodies.len()),
            ));
        }
        let first = self.sorts.len();
        for h in heads {
            let (name, arity) = match h.list() {
                Some([n, a]) => (n, a),
                _ => return Err(expected(h.span, "expected `(name arity)`", &["(name 0)"])),
            };
            let name_text = name
                .symbol()
                .ok_or_else(|| expected(name.span, "expected a sort name", &["symbol"]))?;
            if arity.keyword() != Some("0") {
                return Err(err(
                    ErrorKind::Unsupported,
                    arity.span,
                    "parametric datatypes are not supported",
                ));
            }
            if self.sorts.iter().any(|s| s.name == name_text) {
                return Err(err(
                    ErrorKind::Duplicate,
                    name.span,
                    format!("sort `{name_text}` declared twice"),
                ));
            }
            self.sorts.push(SortDecl {
                name: name_text.to_string(),
                constructors: Vec::new(),
            });
            self.sort_spans.push(h.span);
        }
        for (k, body) in bodies.iter().enumerate() {
            let sort = SortId((first + k) as u32);
            let ctors = body
                .list()
                .ok_or_else(|| expected(body.span, "expected a constructor list", &["("]))?;
            if ctors.first().and_then(SExpr::keyword) == Some("par") {
                return Err(err(
                    ErrorKind::Unsupported,
                    body.span,
                    "parametric datatypes are not supported",
                ));
            }
            for c in ctors {
                let (name, fields) = match &c.kind {
                    SExprKind::Atom { .. } => (c, &[][..]),
                    SExprKind::List(items) if !items.is_empty() => (&items[0], &items[1..]),
                    SExprKind::List(_) => {
                        return Err(expected(c.span, "expected a constructor", &["symbol", "(symbol ...)"]))
                    }
                };
                let cname = name
                    .symbol()
                    .ok_or_else(|| expected(name.span, "expected a constructor name", &["symbol"]))?;
                let mut arg_sorts = Vec::new();
                for f in fields {
                    let sel_sort = match f.list() {
                        Some([sel, s]) if sel.symbol().is_some() => s,
                        _ => return Err(expected(f.span, "expected a selector", &["(selector Sort)"])),
                    };
                    arg_sorts.push(self.sort_ref(sel_sort)?);
                }
                if self.ctors.contains_key(cname) {
                    return Err(err(
                        ErrorKind::Duplicate,
                        name.span,
                        format!("constructor `{cname}` declared twice"),
                    ));
                }
                if self.pred_index.contains_key(cname) {
                    return Err(err(
                        ErrorKind::Duplicate,
                        name.span,
                        format!("`{cname}` is already a predicate"),
                    ));
                }
                self.ctors.insert(
                    cname.to_string(),
                    (CtorId(self.num_ctors), sort, arg_sorts.clone()),
                );
                self.num_ctors += 1;
                self.sorts[sort.index()].constructors.push(CtorDecl {
                    name: cname.to_string(),
                    args: arg_sorts,
                });
            }
        }
        Ok(())
    }

    fn declare_fun(&mut self, cmd: &SExpr, args: &[SExpr]) -> Result<(), ParseError> {
        let [name, params, range] = args else {
            return Err(err(
                ErrorKind::Syntax,
                cmd.span,
                "`declare-fun` takes a name, argument sorts and `Bool`",
            ));
        };
        let pname = name
            .symbol()
            .ok_or_else(|| expected(name.span, "expected a predicate name", &["symbol"]))?;
        let params = params
            .list()
            .ok_or_else(|| expected(params.span, "expected argument sorts", &["("]))?;
        if range.keyword() != Some("Bool") {
            return Err(err(
                ErrorKind::Unsupported,
                range.span,
                "only predicates (functions into `Bool`) can be declared",
            ));
        }
        let sorts = params
            .iter()
            .map(|p| self.sort_ref(p))
            .collect::<Result<Vec<_>, _>>()?;
        if self.pred_index.contains_key(pname) {
            return Err(err(
                ErrorKind::Duplicate,
                name.span,
                format!("predicate `{pname}` declared twice"),
            ));
        }
        if self.ctors.contains_key(pname) {
            return Err(err(
                ErrorKind::Duplicate,
                name.span,
                format!("`{pname}` is already a constructor"),
            ));
        }
        self.pred_index
            .insert(pname.to_string(), PredId(self.predicates.len() as u32));
        self.predicates.push(PredicateDecl {
            name: pname.to_string(),
            args: sorts,
        });
        Ok(())
    }

    fn clause(&self, formula: &SExpr) -> Result<Clause, ParseError> {
        let mut cx = ClauseCx {
            parser: self,
            vars: Vec::new(),
            scope: HashMap::new(),
        };
        let mut matrix = formula;
        if formula.head() == Some("forall") {
            let items = formula.list().expect("list");
            let [_, binders, inner] = items else {
                return Err(err(
                    ErrorKind::Syntax,
                    formula.span,
                    "`forall` takes a binder list and a body",
                ));
            };
            let binders = binders
                .list()
                .filter(|b| !b.is_empty())
                .ok_or_else(|| expected(binders.span, "expected variable binders", &["((x Sort) ...)"]))?;
            for b in binders {
                let Some([v, s]) = b.list() else {
                    return Err(expected(b.span, "expected a binder", &["(x Sort)"]));
                };
                let vname = v
                    .symbol()
                    .ok_or_else(|| expected(v.span, "expected a variable name", &["symbol"]))?;
                let sort = self.sort_ref(s)?;
                if cx.scope.contains_key(vname) {
                    return Err(err(
                        ErrorKind::Duplicate,
                        v.span,
                        format!("variable `{vname}` bound twice"),
                    ));
                }
                cx.scope.insert(vname.to_string(), VarId(cx.vars.len() as u32));
                cx.vars.push(VarDecl {
                    name: vname.to_string(),
                    sort,
                });
            }
            matrix = inner;
        }
        let (body, head) = if matrix.head() == Some("=>") {
            let items = matrix.list().expect("list");
            let [_, premise, conclusion] = items else {
                return Err(err(
                    ErrorKind::Syntax,
                    matrix.span,
                    "`=>` takes a body and a head",
                ));
            };
            let mut body = Vec::new();
            cx.body(premise, &mut body)?;
            (body, cx.head(conclusion)?)
        } else {
            (Vec::new(), cx.head(matrix)?)
        };
        Ok(Clause {
            vars: cx.vars,
            head,
            body,
        })
    }

    fn finish(self) -> Result<Problem, ParseError> {
        let problem = Problem::new(Signature::new(self.sorts), self.predicates, self.clauses);
        let report = validate(&problem);
        if let Some(issue) = report.issues.first() {
            let span = match issue {
                Issue::UninhabitedSort(name) => problem
                    .signature
                    .sort_by_name(name)
                    .map(|s| self.sort_spans[s.index()])
                    .unwrap_or_default(),
                _ => issue
                    .clause()
                    .and_then(|c| self.clause_spans.get(c).copied())
                    .unwrap_or_default(),
            };
            let kind = match issue {
                Issue::DuplicateSort(_)
                | Issue::DuplicateConstructor(_)
                | Issue::DuplicatePredicate(_)
                | Issue::DuplicateVariable { .. }
                | Issue::NameClash(_) => ErrorKind::Duplicate,
                _ => ErrorKind::Sort,
            };
            return Err(err(kind, span, issue.to_string()));
        }
        Ok(problem)
    }
}

struct ClauseCx<'a> {
    parser: &'a Parser,
    vars: Vec<VarDecl>,
    scope: HashMap<String, VarId>,
}

impl ClauseCx<'_> {
    fn body(&self, e: &SExpr, out: &mut Vec<Literal>) -> Result<(), ParseError> {
        match e.head() {
            Some("and") => {
                for lit in &e.list().expect("list")[1..] {
                    self.body(lit, out)?;
                }
                Ok(())
            }
            _ if e.keyword() == Some("true") => Ok(()),
            Some("=") => {
                let (l, r) = self.pair(e)?;
                out.push(Literal::Eq(l, r));
                Ok(())
            }
            Some("not") => {
                let items = e.list().expect("list");
                match items {
                    [_, inner] if inner.head() == Some("=") => {
                        let (l, r) = self.pair(inner)?;
                        out.push(Literal::Diseq(l, r));
                        Ok(())
                    }
                    _ => Err(err(
                        ErrorKind::Unsupported,
                        e.span,
                        "negation is only supported around `=`",
                    )),
                }
            }
            Some("distinct") => {
                let args = &e.list().expect("list")[1..];
                if args.len() < 2 {
                    return Err(err(ErrorKind::Syntax, e.span, "`distinct` needs two or more terms"));
                }
                let terms = args
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<Vec<_>, _>>()?;
                for i in 0..terms.len() {
                    for j in i + 1..terms.len() {
                        if terms[i].1 != terms[j].1 {
                            return Err(self.mismatch(args[j].span, terms[i].1, terms[j].1));
                        }
                        out.push(Literal::Diseq(terms[i].0.clone(), terms[j].0.clone()));
                    }
                }
                Ok(())
            }
            _ => {
                out.push(Literal::Atom(self.atom(e)?));
                Ok(())
            }
        }
    }

    fn pair(&self, e: &SExpr) -> Result<(Term, Term), ParseError> {
        let items = e.list().expect("list");
        let [_, a, b] = items else {
            return Err(err(ErrorKind::Syntax, e.span, "`=` takes exactly two terms"));
        };
        let (l, ls) = self.term(a)?;
        let (r, rs) = self.term(b)?;
        if ls != rs {
            return Err(self.mismatch(b.span, ls, rs));
        }
        Ok((l, r))
    }

    fn head(&self, e: &SExpr) -> Result<Option<Atom>, ParseError> {
        if e.keyword() == Some("false") {
            return Ok(None);
        }
        self.atom(e).map(Some)
    }

    fn mismatch(&self, span: SourceSpan, expected: SortId, found: SortId) -> ParseError {
        let name = |s: SortId| self.parser.sorts[s.index()].name.clone();
        err(
            ErrorKind::Sort,
            span,
            format!("expected sort `{}`, found `{}`", name(expected), name(found)),
        )
    }

    fn atom(&self, e: &SExpr) -> Result<Atom, ParseError> {
        let (name, args) = match &e.kind {
            SExprKind::Atom { .. } => (e, &[][..]),
            SExprKind::List(items) if !items.is_empty() => (&items[0], &items[1..]),
            SExprKind::List(_) => {
                return Err(expected(e.span, "expected an atom", &["(predicate term ...)"]))
            }
        };
        let pname = name
            .symbol()
            .ok_or_else(|| expected(name.span, "expected a predicate name", &["symbol"]))?;
        let Some(&pred) = self.parser.pred_index.get(pname) else {
            return Err(expected(
                name.span,
                format!("`{pname}` is not a declared predicate"),
                &["predicate", "=", "not", "distinct", "and", "false"],
            ));
        };
        let decl = &self.parser.predicates[pred.index()];
        if decl.args.len() != args.len() {
            return Err(err(
                ErrorKind::Sort,
                e.span,
                format!(
                    "`{pname}` expects {} argument(s), found {}",
                    decl.args.len(),
                    args.len()
                ),
            ));
        }
        let mut terms = Vec::with_capacity(args.len());
        for (a, &want) in args.iter().zip(&decl.args) {
            let (t, s) = self.term(a)?;
            if s != want {
                return Err(self.mismatch(a.span, want, s));
            }
            terms.push(t);
        }
        Ok(Atom { pred, args: terms })
    }

    fn term(&self, e: &SExpr) -> Result<(Term, SortId), ParseError> {
        let (name, args) = match &e.kind {
            SExprKind::Atom { text, .. } => {
                if let Some(&v) = self.scope.get(text) {
                    return Ok((Term::Var(v), self.vars[v.index()].sort));
                }
                (e, &[][..])
            }
            SExprKind::List(items) if items.len() >= 2 => (&items[0], &items[1..]),
            SExprKind::List(_) => {
                return Err(expected(e.span, "expected a term", &["variable", "(constructor term ...)"]))
            }
        };
        let cname = name
            .symbol()
            .ok_or_else(|| expected(name.span, "expected a constructor", &["symbol"]))?;
        let Some((ctor, sort, arg_sorts)) = self.parser.ctors.get(cname) else {
            let what = if args.is_empty() {
                format!("unbound variable `{cname}`")
            } else {
                format!("`{cname}` is not a constructor")
            };
            return Err(err(ErrorKind::Syntax, name.span, what));
        };
        if arg_sorts.len() != args.len() {
            return Err(err(
                ErrorKind::Sort,
                e.span,
                format!(
                    "constructor `{cname}` expects {} argument(s), found {}",
                    arg_sorts.len(),
                    args.len()
                ),
            ));
        }
        let mut terms = Vec::with_capacity(args.len());
        for (a, &want) in args.iter().zip(arg_sorts) {
            let (t, s) = self.term(a)?;
            if s != want {
                return Err(self.mismatch(a.span, want, s));
            }
            terms.push(t);
        }
        Ok((Term::App(*ctor, terms), *sort))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "(declare-datatypes ((nat 0)) (((z) (s (s_0 nat)))))\n";

    #[test]
    fn empty_input_is_an_empty_problem() {
        let p = parse_problem("").unwrap();
        assert_eq!(p, Problem::empty());
        assert_eq!(validate(&p).warnings, vec![Warning::MissingGoal]);
    }

    #[test]
    fn undeclared_constructor_sort() {
        let e = parse_problem("(declare-datatypes ((nat 0)) (((z) (s (p int)))))").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Sort);
        assert_eq!((e.span.line, e.span.column), (1, 42));
    }

    #[test]
    fn free_variables_are_rejected() {
        let src = format!("{NAT}(declare-fun p (nat) Bool)\n(assert (p x))");
        let e = parse_problem(&src).unwrap_err();
        assert!(e.message.contains("unbound variable `x`"), "{e}");
        assert_eq!(e.span.line, 3);
    }

    #[test]
    fn binders_shadow_constructors() {
        let src = format!("{NAT}(declare-fun p (nat) Bool)\n(assert (forall ((z nat)) (p z)))");
        let p = parse_problem(&src).unwrap();
        assert_eq!(p.clauses[0].head.as_ref().unwrap().args, vec![Term::Var(VarId(0))]);
    }

    #[test]
    fn ill_sorted_atom() {
        let src = "(declare-datatypes ((nat 0) (lst 0)) (((z) (s (s_0 nat))) ((nil) (cons (hd nat) (tl lst)))))
                   (declare-fun p (nat) Bool)
                   (assert (p nil))";
        let e = parse_problem(src).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Sort);
        assert!(e.message.contains("expected sort `nat`, found `lst`"), "{e}");
    }

    #[test]
    fn duplicates_and_clashes() {
        let e = parse_problem(&format!("{NAT}(declare-fun z (nat) Bool)")).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Duplicate);
        let e = parse_problem(&format!("{NAT}{NAT}")).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Duplicate);
    }

    #[test]
    fn literal_forms() {
        let src = format!(
            "{NAT}(declare-fun p (nat nat) Bool)
             (assert (forall ((x nat) (y nat) (w nat))
               (=> (and (p x y) (= x (s y)) (not (= x y)) (distinct x y w)) false)))
             (check-sat)
             this is ignored ((("
        );
        let p = parse_problem(&src).unwrap();
        let c = &p.clauses[0];
        assert!(c.is_goal());
        assert_eq!(c.body.len(), 6);
        assert!(matches!(c.body[2], Literal::Diseq(..)));
    }

    #[test]
    fn uninhabited_sort_points_at_declaration() {
        let e = parse_problem("(declare-datatypes ((c_sort 0)) (((c (f c_sort)))))").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Sort);
        assert_eq!(e.span.column, 21);
    }

    #[test]
    fn unsupported_commands() {
        let e = parse_problem("(define-fun f () Bool true)").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Unsupported);
        let e = parse_problem("(declare-datatypes ((l 1)) ((par (T) ((nil)))))").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Unsupported);
        assert!(parse_problem("(set-logic HORN)(set-info :status sat)").is_ok());
    }
}
