//! The satisfiability procedure: for n = 1, 2, ... look for a counterexample
//! of depth n, then for a model with n states per sort.

mod gen;
mod render;

use std::fmt;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

pub use gen::gen_member_rev;
pub use render::{render_log_line, render_outcome, OutcomeJson};

use crate::asp::{self, AspAnswer, AspError, SolverConfig};
use crate::automaton::{PredicateTables, TreeAutomaton};
use crate::chc::ground::{Derivation, GroundError, GroundLimits};
use crate::chc::Problem;
use crate::interp::{check_model, trim};
use crate::search::{self, SearchConfig, SearchError};

#[derive(Debug, Clone)]
pub enum Backend {
    Native,
    Asp(SolverConfig),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub backend: Backend,
    /// Largest number of states per sort to try.
    pub max_bound: u32,
    /// Caps the counterexample depth, which otherwise follows the bound.
    pub max_depth: Option<usize>,
    pub time_limit: Option<Duration>,
    pub symmetry_breaking: bool,
    /// Per-bound cap on native search nodes.
    pub node_budget: Option<u64>,
    pub ground_limits: GroundLimits,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: Backend::Native,
            max_bound: 8,
            max_depth: None,
            time_limit: None,
            symmetry_breaking: true,
            node_budget: None,
            ground_limits: GroundLimits::default(),
            cancel: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout(Duration),
    /// Every bound up to the maximum was tried.
    BoundExhausted(u32),
    Budget(String),
    Solver(String),
    Cancelled,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout(d) => write!(f, "time limit of {}s reached", d.as_secs_f64()),
            UnknownReason::BoundExhausted(n) => write!(f, "no answer with up to {n} states per sort"),
            UnknownReason::Budget(what) => write!(f, "budget exhausted: {what}"),
            UnknownReason::Solver(why) => write!(f, "external solver gave no answer: {why}"),
            UnknownReason::Cancelled => write!(f, "cancelled"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat {
        automaton: TreeAutomaton,
        tables: PredicateTables,
        /// Reachable states per sort.
        states_used: Vec<u32>,
    },
    Unsat(Derivation),
    Unknown(UnknownReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Counterexample,
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventVerdict {
    Found,
    NotFound,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunEvent {
    pub phase: Phase,
    pub bound: u32,
    #[serde(serialize_with = "render::secs")]
    pub wall: Duration,
    pub verdict: EventVerdict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunLog {
    pub events: Vec<RunEvent>,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Backend(#[from] AspError),
}

enum Step<T> {
    Found(T),
    NotFound,
    Stop(UnknownReason),
}

struct Run<'a> {
    problem: &'a Problem,
    options: &'a SolveOptions,
    deadline: Option<Instant>,
}

impl Run<'_> {
    fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }

    fn timed_out(&self) -> Option<UnknownReason> {
        let limit = self.options.time_limit?;
        (self.remaining() == Some(Duration::ZERO)).then_some(UnknownReason::Timeout(limit))
    }

    fn solver(&self, base: &SolverConfig) -> SolverConfig {
        let mut c = base.clone();
        if let Some(r) = self.remaining() {
            c.time_limit = Some(c.time_limit.map_or(r, |t| t.min(r)).max(Duration::from_secs(1)));
        }
        if c.cancel.is_none() {
            c.cancel = self.options.cancel.clone();
        }
        c
    }

    fn step_of<T>(&self, a: AspAnswer<T>) -> Step<T> {
        match a {
            AspAnswer::Found(x) => Step::Found(x),
            AspAnswer::None => Step::NotFound,
            AspAnswer::Unknown(why) => self.timed_out().map_or(Step::Stop(UnknownReason::Solver(why)), Step::Stop),
        }
    }

    fn counterexample(&self, n: u32) -> Result<Step<Derivation>, SolveError> {
        let depth = self.options.max_depth.map_or(n as usize, |d| d.min(n as usize));
        Ok(match &self.options.backend {
            Backend::Native => {
                match search::find_counterexample_with(self.problem, depth, self.options.ground_limits) {
                    Ok(Some(d)) => Step::Found(d),
                    Ok(None) => Step::NotFound,
                    Err(e @ (GroundError::TooManyTerms(_) | GroundError::TooManyAtoms(_))) => {
                        Step::Stop(UnknownReason::Budget(e.to_string()))
                    }
                }
            }
            Backend::Asp(base) => self.step_of(asp::solve_counterexample(self.problem, depth, &self.solver(base))?),
        })
    }

    fn model(&self, n: u32) -> Result<Step<(TreeAutomaton, PredicateTables)>, SolveError> {
        let bounds = vec![n; self.problem.signature.num_sorts()];
        Ok(match &self.options.backend {
            Backend::Native => {
                let config = SearchConfig {
                    max_states: bounds,
                    symmetry_breaking: self.options.symmetry_breaking,
                    prune: true,
                    node_budget: self.options.node_budget,
                    deadline: self.deadline,
                    cancel: self.options.cancel.clone(),
                };
                match search::search_model(self.problem, &config) {
                    Ok(Some(m)) => Step::Found((m.automaton, m.tables)),
                    Ok(None) => Step::NotFound,
                    Err(SearchError::Timeout) => {
                        Step::Stop(UnknownReason::Timeout(self.options.time_limit.unwrap_or_default()))
                    }
                    Err(SearchError::NodeBudget(b)) => Step::Stop(UnknownReason::Budget(format!("{b} search nodes"))),
                    Err(SearchError::Cancelled) => Step::Stop(UnknownReason::Cancelled),
                }
            }
            Backend::Asp(base) => self.step_of(asp::solve_model(
                self.problem,
                &bounds,
                self.options.symmetry_breaking,
                &self.solver(base),
            )?),
        })
    }
}

fn record<T>(log: &mut RunLog, phase: Phase, bound: u32, start: Instant, step: &Step<T>) {
    log.events.push(RunEvent {
        phase,
        bound,
        wall: start.elapsed(),
        verdict: match step {
            Step::Found(_) => EventVerdict::Found,
            Step::NotFound => EventVerdict::NotFound,
            Step::Stop(_) => EventVerdict::Unknown,
        },
    });
}

/// Runs the bounded search loop. A `Sat` answer is restricted to its
/// reachable states and re-verified; an `Unsat` answer carries a derivation
/// that replays.
pub fn solve(problem: &Problem, options: &SolveOptions) -> Result<(SolveOutcome, RunLog), SolveError> {
    solve_with(problem, options, |_| {})
}

/// Like [`solve`], reporting each event as it happens.
pub fn solve_with(
    problem: &Problem,
    options: &SolveOptions,
    mut on_event: impl FnMut(&RunEvent),
) -> Result<(SolveOutcome, RunLog), SolveError> {
    if options.max_bound == 0 {
        return Err(SolveError::InvalidOptions("the state bound must be at least 1".into()));
    }
    let run = Run {
        problem,
        options,
        deadline: options.time_limit.map(|t| Instant::now() + t),
    };
    let mut log = RunLog::default();
    for n in 1..=options.max_bound {
        if let Some(r) = run.timed_out() {
            return Ok((SolveOutcome::Unknown(r), log));
        }
        let start = Instant::now();
        let step = run.counterexample(n)?;
        record(&mut log, Phase::Counterexample, n, start, &step);
        on_event(log.events.last().unwrap());
        match step {
            Step::Found(d) => {
                debug_assert_eq!(search::replay(problem, &d), Ok(()));
                return Ok((SolveOutcome::Unsat(d), log));
            }
            Step::Stop(r) => return Ok((SolveOutcome::Unknown(r), log)),
            Step::NotFound => {}
        }
        if let Some(r) = run.timed_out() {
            return Ok((SolveOutcome::Unknown(r), log));
        }
        let start = Instant::now();
        let step = run.model(n)?;
        record(&mut log, Phase::Model, n, start, &step);
        on_event(log.events.last().unwrap());
        match step {
            Step::Found((a, t)) => {
                let (automaton, tables) = trim(&a, &t, problem);
                assert!(
                    check_model(&automaton, &tables, problem).is_model(),
                    "trimmed model fails verification"
                );
                let states_used = automaton.state_counts().to_vec();
                return Ok((
                    SolveOutcome::Sat {
                        automaton,
                        tables,
                        states_used,
                    },
                    log,
                ));
            }
            Step::Stop(r) => return Ok((SolveOutcome::Unknown(r), log)),
            Step::NotFound => {}
        }
    }
    Ok((SolveOutcome::Unknown(UnknownReason::BoundExhausted(options.max_bound)), log))
}
