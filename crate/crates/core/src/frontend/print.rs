use std::fmt::Write;

use super::sexpr::is_simple_symbol;
use crate::chc::*;

const RESERVED: &[&str] = &[
    "and", "not", "=>", "=", "distinct", "true", "false", "forall", "exists", "let", "par", "as",
    "_", "!", "Bool", "assert", "check-sat", "declare-fun", "declare-datatypes",
];

fn symbol(name: &str) -> String {
    if is_simple_symbol(name) && !RESERVED.contains(&name) {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

/// Renders a problem in the format read by [`parse_problem`](super::parse_problem).
///
/// Selector names are not part of the IR; they are printed as `<ctor>_<i>`.
pub fn print_problem(problem: &Problem) -> String {
    let mut out = String::new();
    let sig = &problem.signature;
    if sig.num_sorts() > 0 {
        out.push_str("(declare-datatypes (");
        for (i, s) in sig.sorts().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "({} 0)", symbol(&s.name));
        }
        out.push_str(")\n  (");
        for (i, s) in sig.sorts().iter().enumerate() {
            if i > 0 {
                out.push_str("\n   ");
            }
            out.push('(');
            for (j, c) in s.constructors.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "({}", symbol(&c.name));
                for (k, a) in c.args.iter().enumerate() {
                    let sel = format!("{}_{}", c.name, k);
                    let _ = write!(out, " ({} {})", symbol(&sel), symbol(sig.sort_name(*a)));
                }
                out.push(')');
            }
            out.push(')');
        }
        out.push_str("))\n");
    }
    for p in &problem.predicates {
        let args: Vec<String> = p.args.iter().map(|s| symbol(sig.sort_name(*s))).collect();
        let _ = writeln!(out, "(declare-fun {} ({}) Bool)", symbol(&p.name), args.join(" "));
    }
    for c in &problem.clauses {
        let _ = writeln!(out, "(assert {})", clause(problem, c));
    }
    out.push_str("(check-sat)\n");
    out
}

fn clause(problem: &Problem, c: &Clause) -> String {
    let head = match &c.head {
        Some(a) => atom(problem, c, a),
        None => "false".to_string(),
    };
    let matrix = if c.body.is_empty() && c.head.is_some() {
        head
    } else {
        let lits: Vec<String> = c.body.iter().map(|l| literal(problem, c, l)).collect();
        let mut body = String::from("(and");
        for l in &lits {
            body.push(' ');
            body.push_str(l);
        }
        body.push(')');
        format!("(=> {body} {head})")
    };
    if c.vars.is_empty() {
        matrix
    } else {
        let binders: Vec<String> = c
            .vars
            .iter()
            .map(|v| format!("({} {})", symbol(&v.name), symbol(problem.signature.sort_name(v.sort))))
            .collect();
        format!("(forall ({}) {matrix})", binders.join(" "))
    }
}

fn literal(problem: &Problem, c: &Clause, l: &Literal) -> String {
    match l {
        Literal::Atom(a) => atom(problem, c, a),
        Literal::Eq(x, y) => format!("(= {} {})", term(problem, c, x), term(problem, c, y)),
        Literal::Diseq(x, y) => {
            format!("(not (= {} {}))", term(problem, c, x), term(problem, c, y))
        }
    }
}

fn atom(problem: &Problem, c: &Clause, a: &Atom) -> String {
    let name = symbol(problem.pred_name(a.pred));
    if a.args.is_empty() {
        return name;
    }
    let args: Vec<String> = a.args.iter().map(|t| term(problem, c, t)).collect();
    format!("({name} {})", args.join(" "))
}

fn term(problem: &Problem, c: &Clause, t: &Term) -> String {
    match t {
        Term::Var(v) => symbol(c.var_name(*v)),
        Term::App(f, args) => {
            let name = symbol(problem.signature.ctor_name(*f));
            if args.is_empty() {
                name
            } else {
                let args: Vec<String> = args.iter().map(|a| term(problem, c, a)).collect();
                format!("({name} {})", args.join(" "))
            }
        }
    }
}
