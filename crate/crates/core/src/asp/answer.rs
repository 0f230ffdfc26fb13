use std::fmt;

use super::names::Names;
use crate::automaton::{PredicateTables, State, TransitionMap, TreeAutomaton};
use crate::chc::*;
use crate::interp::{check_model, Witness, Verdict};

/// A ground ASP term: an integer or a function symbol with arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AspTerm {
    Int(i64),
    Func(String, Vec<AspTerm>),
}

impl fmt::Display for AspTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AspTerm::Int(n) => write!(f, "{n}"),
            AspTerm::Func(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnswerSet {
    pub facts: Vec<AspTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Unsatisfiable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseAnswerError {
    #[error("malformed fact on output line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no answer set in solver output ({0:?})")]
    NoAnswerSet(Classification),
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn term(&mut self) -> Result<AspTerm, String> {
        match self.peek() {
            Some(b'-') | Some(b'0'..=b'9') => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                text.parse().map(AspTerm::Int).map_err(|_| format!("bad integer `{text}`"))
            }
            Some(c) if c.is_ascii_lowercase() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || matches!(self.s[self.pos], b'_' | b'\''))
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
                let mut args = Vec::new();
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    loop {
                        args.push(self.term()?);
                        match self.peek() {
                            Some(b',') => self.pos += 1,
                            Some(b')') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err("expected `,` or `)`".into()),
                        }
                    }
                }
                Ok(AspTerm::Func(name, args))
            }
            Some(c) => Err(format!("unexpected `{}`", c as char)),
            None => Err("unexpected end of line".into()),
        }
    }
}

fn facts_of(line: &str) -> Result<Vec<AspTerm>, String> {
    let mut c = Cursor {
        s: line.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    while c.peek().is_some() {
        match c.term()? {
            AspTerm::Int(_) => return Err("integer where a fact was expected".into()),
            t => out.push(t),
        }
    }
    Ok(out)
}

/// Facts of the first answer set in the solver's default output. Without an
/// `Answer:` header, the first line that reads as a list of facts is taken.
pub fn parse_answer_set(raw: &str) -> Result<AnswerSet, ParseAnswerError> {
    let lines: Vec<&str> = raw.lines().collect();
    if let Some(i) = lines.iter().position(|l| l.starts_with("Answer:")) {
        let line = lines.get(i + 1).copied().unwrap_or("");
        return facts_of(line)
            .map(|facts| AnswerSet { facts })
            .map_err(|message| ParseAnswerError::Malformed { line: i + 2, message });
    }
    for l in &lines {
        if l.trim().is_empty() {
            continue;
        }
        if let Ok(facts) = facts_of(l) {
            return Ok(AnswerSet { facts });
        }
    }
    let class = if lines.iter().any(|l| l.trim() == "UNSATISFIABLE") {
        Classification::Unsatisfiable
    } else {
        Classification::Unknown
    };
    Err(ParseAnswerError::NoAnswerSet(class))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("unexpected fact `{0}`")]
    UnexpectedFact(String),
    #[error("state out of range in `{0}`")]
    StateOutOfRange(String),
    #[error("automaton is not complete and deterministic: {0}")]
    BadAutomaton(String),
    #[error("decoded pair is not a model: {0}")]
    Verification(Witness),
}

const HELPERS: &[&str] = &[
    "state", "stateType", "diffApprox", "nonEmpty", "many", "live", "reachAt", "reached",
];

fn state_of(t: &AspTerm, max: u32) -> Option<State> {
    match t {
        AspTerm::Int(n) if *n >= 1 && *n <= max as i64 => Some(State(*n as u32)),
        _ => None,
    }
}

/// Rebuilds the automaton and tables from a model-search answer set and
/// re-verifies them; nothing is taken on trust.
pub fn decode_model(
    answers: &AnswerSet,
    problem: &Problem,
    max_states: &[u32],
) -> Result<(TreeAutomaton, PredicateTables), DecodeError> {
    let sig = &problem.signature;
    let names = Names::new(problem);
    let mut map = TransitionMap::new(max_states.to_vec());
    let mut tables = PredicateTables::empty(problem.predicates.len());
    let mut duplicates = Vec::new();
    for fact in &answers.facts {
        let AspTerm::Func(name, args) = fact else {
            return Err(DecodeError::UnexpectedFact(fact.to_string()));
        };
        if name == "rule" && args.len() == 2 {
            let AspTerm::Func(cname, cargs) = &args[0] else {
                return Err(DecodeError::UnexpectedFact(fact.to_string()));
            };
            let Some(c) = names.ctor_by_name(cname).filter(|&c| sig.ctor_args(c).len() == cargs.len()) else {
                return Err(DecodeError::UnexpectedFact(fact.to_string()));
            };
            let states: Option<Vec<State>> = cargs
                .iter()
                .zip(sig.ctor_args(c))
                .map(|(t, s)| state_of(t, max_states[s.index()]))
                .collect();
            let target = state_of(&args[1], max_states[sig.ctor_sort(c).index()]);
            let (Some(states), Some(target)) = (states, target) else {
                return Err(DecodeError::StateOutOfRange(fact.to_string()));
            };
            if map.insert(c, states, target).is_some() {
                duplicates.push(fact.to_string());
            }
        } else if let Some(p) = names.pred_by_name(name).filter(|&p| problem.pred(p).args.len() == args.len()) {
            let tuple: Option<Vec<State>> = args
                .iter()
                .zip(&problem.pred(p).args)
                .map(|(t, s)| state_of(t, max_states[s.index()]))
                .collect();
            let Some(tuple) = tuple else {
                return Err(DecodeError::StateOutOfRange(fact.to_string()));
            };
            tables.insert(p, tuple);
        } else if !HELPERS.contains(&name.as_str()) {
            return Err(DecodeError::UnexpectedFact(fact.to_string()));
        }
    }
    if let Some(d) = duplicates.first() {
        return Err(DecodeError::BadAutomaton(format!("second target in `{d}`")));
    }
    let a = map.into_automaton(sig).map_err(|r| DecodeError::BadAutomaton(format!("{:?}", r.issues[0])))?;
    match check_model(&a, &tables, problem) {
        Verdict::IsModel => Ok((a, tables)),
        Verdict::NotModel(w) => Err(DecodeError::Verification(w)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_problem;
    use crate::interp::{least_tables, ViolationKind};

    const FIXTURE: &str = include_str!("../../tests/fixtures/even_odd_plus.smt2");

    const LISTING: &str = "rule(z,2) rule(s(2),1) rule(s(1),2) odd(1) even(2) \
        plus(2,1,1) plus(1,2,1) plus(1,1,2) plus(2,2,2)";

    #[test]
    fn parses_bare_fact_line() {
        let a = parse_answer_set("rule(z,2) rule(s(2),1) rule(s(1),2) odd(1) even(2)").unwrap();
        assert_eq!(a.facts.len(), 5);
        assert_eq!(a.facts[1].to_string(), "rule(s(2),1)");
    }

    #[test]
    fn parses_solver_output() {
        let raw = "pyclingo version 5.8.2\nReading from stdin\nSolving...\nAnswer: 1 (Time: 0.001s)\n\
                   state(1) rule(s(1) ,2)\nSATISFIABLE\n\nModels       : 1+\n";
        let a = parse_answer_set(raw).unwrap();
        assert_eq!(a.facts.len(), 2);
        assert_eq!(a.facts[1].to_string(), "rule(s(1),2)");
        let empty = parse_answer_set("Answer: 1\n\nSATISFIABLE\n").unwrap();
        assert!(empty.facts.is_empty());
    }

    #[test]
    fn unsatisfiable_output_has_no_answer() {
        assert_eq!(
            parse_answer_set("Solving...\nUNSATISFIABLE\n"),
            Err(ParseAnswerError::NoAnswerSet(Classification::Unsatisfiable))
        );
        assert_eq!(
            parse_answer_set("Solving...\nUNKNOWN\n"),
            Err(ParseAnswerError::NoAnswerSet(Classification::Unknown))
        );
        assert!(matches!(
            parse_answer_set("Answer: 1\nrule(s(1),\n"),
            Err(ParseAnswerError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn decodes_the_printed_model() {
        let p = parse_problem(FIXTURE).unwrap();
        let (a, t) = decode_model(&parse_answer_set(LISTING).unwrap(), &p, &[2]).unwrap();
        assert_eq!(a.render_transitions(&p.signature), vec!["Z -> 2", "S(1) -> 2", "S(2) -> 1"]);
        assert_eq!(t, least_tables(&a, &p));
    }

    #[test]
    fn missing_transition_is_rejected() {
        let p = parse_problem(FIXTURE).unwrap();
        let facts = parse_answer_set("rule(s(2),1) rule(s(1),2) odd(1) even(2)").unwrap();
        assert!(matches!(decode_model(&facts, &p, &[2]), Err(DecodeError::BadAutomaton(_))));
    }

    #[test]
    fn tampered_tables_fail_verification() {
        let p = parse_problem(FIXTURE).unwrap();
        // odd(2) makes even(1) derivable, which is absent
        let facts = parse_answer_set(&format!("{LISTING} odd(2)")).unwrap();
        let Err(DecodeError::Verification(w)) = decode_model(&facts, &p, &[2]) else {
            panic!("expected a verification failure");
        };
        assert_eq!(w.kind, ViolationKind::Closure);
        // once closed, the goal fires: even(2), even(2), plus(2,2,2), odd(2)
        let facts = parse_answer_set(&format!("{LISTING} odd(2) even(1) plus(1,1,1) plus(2,1,2) plus(1,2,2) plus(2,2,1)")).unwrap();
        let Err(DecodeError::Verification(w)) = decode_model(&facts, &p, &[2]) else {
            panic!("expected a verification failure");
        };
        assert_eq!(w.kind, ViolationKind::Goal);
    }

    #[test]
    fn unknown_functor_is_rejected() {
        let p = parse_problem(FIXTURE).unwrap();
        let facts = parse_answer_set(&format!("{LISTING} mystery(1)")).unwrap();
        assert!(matches!(decode_model(&facts, &p, &[2]), Err(DecodeError::UnexpectedFact(_))));
    }
}
