use std::fmt::Write as _;
use std::time::Duration;

use serde::{Serialize, Serializer};

use super::{Phase, RunEvent, RunLog, SolveOutcome};
use crate::chc::ground::{GroundTerm, ProofStep, ProofTree};
use crate::chc::Problem;

const LEFT: usize = 24;
const CELL: usize = 19;

pub(super) fn secs<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

fn plural(n: u32) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

/// `Searching for a model with 2 states`.
pub fn render_log_line(event: &RunEvent) -> String {
    let what = match event.phase {
        Phase::Counterexample => "counterexample",
        Phase::Model => "model",
    };
    format!("Searching for a {what} with {} state{}", event.bound, plural(event.bound))
}

/// Transitions on the left, predicate tuples in columns on the right.
fn two_columns(transitions: &[String], tuples: &[String]) -> String {
    let rows = transitions.len().max(1);
    let cols = tuples.len().div_ceil(rows);
    let mut out = String::new();
    let _ = writeln!(out, "{:<LEFT$}Predicates:", "ADT Transitions:");
    for r in 0..rows {
        let mut line = format!("{:<LEFT$}", transitions.get(r).map_or("", String::as_str));
        for c in 0..cols {
            if let Some(t) = tuples.get(c * rows + r) {
                let _ = write!(line, "{t:<CELL$}");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn term(problem: &Problem, t: &GroundTerm) -> String {
    t.display(&problem.signature).to_string()
}

fn substitution(problem: &Problem, clause: usize, terms: &[GroundTerm]) -> String {
    let c = &problem.clauses[clause];
    c.vars
        .iter()
        .zip(terms)
        .map(|(v, t)| format!("{} = {}", v.name, term(problem, t)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn proof(problem: &Problem, p: &ProofTree, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match &p.step {
        ProofStep::Assumed => {
            let _ = writeln!(out, "{pad}{}  (assumed)", p.atom.display(problem));
        }
        ProofStep::Clause {
            clause,
            substitution: s,
            premises,
        } => {
            let subst = substitution(problem, *clause, s);
            if subst.is_empty() {
                let _ = writeln!(out, "{pad}{}  by clause {clause}", p.atom.display(problem));
            } else {
                let _ = writeln!(out, "{pad}{}  by clause {clause} with {subst}", p.atom.display(problem));
            }
            for q in premises {
                proof(problem, q, indent + 1, out);
            }
        }
    }
}

/// Human-readable answer in the style of the console output.
pub fn render_outcome(problem: &Problem, outcome: &SolveOutcome) -> String {
    match outcome {
        SolveOutcome::Sat {
            automaton,
            tables,
            states_used,
        } => {
            let mut out = two_columns(&automaton.render_transitions(&problem.signature), &tables.render(problem));
            let total: u32 = states_used.iter().sum();
            let _ = write!(
                out,
                "\nSuccess! Clauses are satisfiable by a Herbrand model recognized by a tree automaton with {total} state{}",
                plural(total)
            );
            if states_used.len() > 1 {
                let per: Vec<String> = problem
                    .signature
                    .sort_ids()
                    .map(|s| format!("{}: {}", problem.signature.sort_name(s), states_used[s.index()]))
                    .collect();
                let _ = write!(out, " ({})", per.join(", "));
            }
            out.push('\n');
            out
        }
        SolveOutcome::Unsat(d) => {
            let mut out = String::from("Failure! Clauses are unsatisfiable.\n");
            let subst = substitution(problem, d.goal, &d.substitution);
            if subst.is_empty() {
                let _ = writeln!(out, "Goal clause {} holds.", d.goal);
            } else {
                let _ = writeln!(out, "Goal clause {} holds for {subst}.", d.goal);
            }
            let _ = writeln!(out, "  {}", problem.display_clause(&problem.clauses[d.goal]));
            out.push_str("Derivation:\n");
            for p in &d.proofs {
                proof(problem, p, 1, &mut out);
            }
            out
        }
        SolveOutcome::Unknown(reason) => format!("Unknown: {reason}\n"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonProof {
    pub atom: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<usize>,
    pub substitution: Vec<(String, String)>,
    pub premises: Vec<JsonProof>,
}

/// Machine-readable form of an outcome together with its log.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum OutcomeJson {
    Sat {
        states: u32,
        states_per_sort: Vec<(String, u32)>,
        transitions: Vec<String>,
        predicates: Vec<String>,
        log: RunLog,
    },
    Unsat {
        goal: usize,
        substitution: Vec<(String, String)>,
        derivation: Vec<JsonProof>,
        log: RunLog,
    },
    Unknown {
        reason: String,
        log: RunLog,
    },
}

fn json_proof(problem: &Problem, p: &ProofTree) -> JsonProof {
    match &p.step {
        ProofStep::Assumed => JsonProof {
            atom: p.atom.display(problem).to_string(),
            clause: None,
            substitution: Vec::new(),
            premises: Vec::new(),
        },
        ProofStep::Clause {
            clause,
            substitution,
            premises,
        } => JsonProof {
            atom: p.atom.display(problem).to_string(),
            clause: Some(*clause),
            substitution: pairs(problem, *clause, substitution),
            premises: premises.iter().map(|q| json_proof(problem, q)).collect(),
        },
    }
}

fn pairs(problem: &Problem, clause: usize, terms: &[GroundTerm]) -> Vec<(String, String)> {
    problem.clauses[clause]
        .vars
        .iter()
        .zip(terms)
        .map(|(v, t)| (v.name.clone(), term(problem, t)))
        .collect()
}

impl OutcomeJson {
    pub fn new(problem: &Problem, outcome: &SolveOutcome, log: &RunLog) -> Self {
        let log = log.clone();
        match outcome {
            SolveOutcome::Sat {
                automaton,
                tables,
                states_used,
            } => OutcomeJson::Sat {
                states: states_used.iter().sum(),
                states_per_sort: problem
                    .signature
                    .sort_ids()
                    .map(|s| (problem.signature.sort_name(s).to_string(), states_used[s.index()]))
                    .collect(),
                transitions: automaton.render_transitions(&problem.signature),
                predicates: tables.render(problem),
                log,
            },
            SolveOutcome::Unsat(d) => OutcomeJson::Unsat {
                goal: d.goal,
                substitution: pairs(problem, d.goal, &d.substitution),
                derivation: d.proofs.iter().map(|p| json_proof(problem, p)).collect(),
                log,
            },
            SolveOutcome::Unknown(r) => OutcomeJson::Unknown {
                reason: r.to_string(),
                log,
            },
        }
    }
}
