//! Answer set programming backend.
//!
//! Problems are turned into ASP text, handed to an external solver on stdin,
//! and the first answer set is decoded and re-verified. For model search the
//! program guesses the transitions with cardinality rules and constrains the
//! predicate tables by the flattened clauses, so
//!
//! ```text
//! even(s(X)) :- odd(X).
//! ```
//!
//! becomes `even(Q2) :- odd(Q1), rule(s(Q1), Q2).`
//!
//! Counterexample search uses a separate program over the ground terms up to
//! a depth, with definite clauses evaluated bottom up and at least one goal
//! body required to hold.

mod answer;
mod emit;
mod names;
mod run;

use std::path::Path;

pub use answer::{
    decode_model, parse_answer_set, AnswerSet, AspTerm, Classification, DecodeError, ParseAnswerError,
};
pub use emit::{emit_counterexample_search, emit_model_search};
pub use names::{sanitize, Names};
pub use run::{
    count_models, parse_model_count, run_external, ExitCodes, ModelCount, RunError, SolverConfig,
    SolverOutcome, SolverRun,
};

use crate::automaton::{PredicateTables, TreeAutomaton};
use crate::chc::ground::Derivation;
use crate::chc::Problem;
use crate::search::find_counterexample;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramKind {
    ModelSearch {
        max_states: Vec<u32>,
        symmetry_breaking: bool,
    },
    CounterexampleSearch {
        depth: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspProgram {
    pub text: String,
    pub kind: ProgramKind,
}

/// Answer of one backend call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AspAnswer<T> {
    Found(T),
    None,
    Unknown(String),
}

#[derive(Debug, thiserror::Error)]
pub enum AspError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("solver answer failed verification: {0}")]
    Decode(#[from] DecodeError),
    #[error("solver reports a counterexample at depth {0} that the ground evaluator cannot find")]
    CounterexampleMismatch(usize),
    #[error(transparent)]
    Ground(#[from] crate::chc::ground::GroundError),
}

/// Whether `path` can be started.
pub fn solver_available(path: &Path) -> bool {
    std::process::Command::new(path)
        .arg("--version")
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .is_ok()
}

/// Model search at the given bounds through the external solver.
pub fn solve_model(
    problem: &Problem,
    max_states: &[u32],
    symmetry_breaking: bool,
    config: &SolverConfig,
) -> Result<AspAnswer<(TreeAutomaton, PredicateTables)>, AspError> {
    let program = emit_model_search(problem, max_states, symmetry_breaking);
    let run = run_external(&program, config)?;
    Ok(match run.outcome {
        SolverOutcome::Satisfiable(answers) => AspAnswer::Found(decode_model(&answers, problem, max_states)?),
        SolverOutcome::Unsatisfiable => AspAnswer::None,
        SolverOutcome::Unknown(why) => AspAnswer::Unknown(why),
    })
}

/// Counterexample search through the external solver. The solver only says
/// whether one exists; the derivation itself is rebuilt by ground evaluation.
pub fn solve_counterexample(
    problem: &Problem,
    depth: usize,
    config: &SolverConfig,
) -> Result<AspAnswer<Derivation>, AspError> {
    let program = emit_counterexample_search(problem, depth);
    let run = run_external(&program, config)?;
    Ok(match run.outcome {
        SolverOutcome::Satisfiable(_) => match find_counterexample(problem, depth)? {
            Some(d) => AspAnswer::Found(d),
            None => return Err(AspError::CounterexampleMismatch(depth)),
        },
        SolverOutcome::Unsatisfiable => AspAnswer::None,
        SolverOutcome::Unknown(why) => AspAnswer::Unknown(why),
    })
}
