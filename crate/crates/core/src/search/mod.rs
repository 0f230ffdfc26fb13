//! The native backend: model search over canonical automata and bounded
//! counterexample search.
//!
//! Predicate tables are never guessed. For a fixed automaton the least tables
//! are the best choice: goals are antitone in the tables, so if the least
//! tables violate a goal, every closed extension does too. Partial automata
//! are checked the same way after every slot assignment: tables and
//! inhabitation computed from the assigned transitions only can only grow as
//! more slots are filled, so a goal violated early stays violated and the
//! whole subtree is skipped.

mod dfs;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::automaton::{Inhabitation, PredicateTables, TreeAutomaton};
use crate::chc::ground::{
    goal_violated, ground_least_model_with, Derivation, GroundError, GroundLimits,
};
use crate::chc::*;
use crate::interp::{check_model, Evaluator};

pub use crate::chc::ground::replay;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Upper bound on the number of states, per sort.
    pub max_states: Vec<u32>,
    pub symmetry_breaking: bool,
    /// Prune partial automata whose assigned part already violates a goal.
    pub prune: bool,
    /// Maximum number of slot assignments.
    pub node_budget: Option<u64>,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl SearchConfig {
    /// `n` states for every sort, symmetry breaking and pruning on, no budget.
    pub fn uniform(sig: &Signature, n: u32) -> Self {
        SearchConfig {
            max_states: vec![n; sig.num_sorts()],
            symmetry_breaking: true,
            prune: true,
            node_budget: None,
            deadline: None,
            cancel: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("node budget of {0} exhausted")]
    NodeBudget(u64),
    #[error("time limit reached")]
    Timeout,
    #[error("cancelled")]
    Cancelled,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub pruned: u64,
}

struct Limits<'c> {
    config: &'c SearchConfig,
    nodes: u64,
}

impl Limits<'_> {
    fn tick(&mut self) -> Result<(), SearchError> {
        self.nodes += 1;
        if let Some(b) = self.config.node_budget {
            if self.nodes > b {
                return Err(SearchError::NodeBudget(b));
            }
        }
        if self.nodes.is_multiple_of(256) {
            if let Some(d) = self.config.deadline {
                if Instant::now() >= d {
                    return Err(SearchError::Timeout);
                }
            }
            if let Some(c) = &self.config.cancel {
                if c.load(Ordering::Relaxed) {
                    return Err(SearchError::Cancelled);
                }
            }
        }
        Ok(())
    }
}

/// Streams complete automata within the bounds; see the module docs of the
/// slot order. Stops after the first error.
pub struct Enumeration<'a> {
    dfs: dfs::Dfs<'a>,
    limits: Limits<'a>,
    failed: bool,
}

impl Iterator for Enumeration<'_> {
    type Item = Result<TreeAutomaton, SearchError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let step = self.dfs.step(true)?;
            if let Err(e) = self.limits.tick() {
                self.failed = true;
                return Some(Err(e));
            }
            if let dfs::Step::Leaf = step {
                return Some(Ok(self.dfs.automaton()));
            }
        }
    }
}

/// With symmetry breaking: one automaton per isomorphism class of automata
/// whose states are all reachable, with at most `max_states` states per sort.
/// Without: every complete automaton with exactly `max_states` states per sort.
pub fn enumerate_canonical<'a>(sig: &'a Signature, config: &'a SearchConfig) -> Enumeration<'a> {
    Enumeration {
        dfs: dfs::Dfs::new(sig, &config.max_states, config.symmetry_breaking),
        limits: Limits { config, nodes: 0 },
        failed: false,
    }
}

/// A verified model: `check_model` accepts it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub automaton: TreeAutomaton,
    pub tables: PredicateTables,
}

/// First automaton (in enumeration order) whose least tables satisfy every goal.
pub fn search_model(problem: &Problem, config: &SearchConfig) -> Result<Option<Model>, SearchError> {
    search_model_with_stats(problem, config).0
}

pub fn search_model_with_stats(
    problem: &Problem,
    config: &SearchConfig,
) -> (Result<Option<Model>, SearchError>, SearchStats) {
    let sig = &problem.signature;
    let ev = Evaluator::new(problem);
    let mut dfs = dfs::Dfs::new(sig, &config.max_states, config.symmetry_breaking);
    let mut limits = Limits { config, nodes: 0 };
    let mut stats = SearchStats::default();
    let mut descend = true;
    let result = loop {
        let Some(step) = dfs.step(descend) else {
            break Ok(None);
        };
        if let Err(e) = limits.tick() {
            break Err(e);
        }
        stats.nodes += 1;
        let leaf = matches!(step, dfs::Step::Leaf);
        if leaf || config.prune {
            let inh = Inhabitation::of(sig, &dfs);
            let tables = ev.least(problem, &dfs, &inh, &config.max_states);
            let violated = ev.goal_violation(&dfs, &inh, &tables).is_some();
            if leaf {
                stats.leaves += 1;
                if !violated {
                    let automaton = dfs.automaton();
                    let tables = ev
                        .least(problem, &automaton, &inh, automaton.state_counts())
                        .to_predicate_tables();
                    assert!(
                        check_model(&automaton, &tables, problem).is_model(),
                        "search produced a pair that fails verification"
                    );
                    break Ok(Some(Model { automaton, tables }));
                }
            } else if violated {
                stats.pruned += 1;
                descend = false;
                continue;
            }
        }
        descend = true;
    };
    (result, stats)
}

/// A goal instance derivable with terms of depth at most `depth`.
pub fn find_counterexample(problem: &Problem, depth: usize) -> Result<Option<Derivation>, GroundError> {
    find_counterexample_with(problem, depth, GroundLimits::default())
}

pub fn find_counterexample_with(
    problem: &Problem,
    depth: usize,
    limits: GroundLimits,
) -> Result<Option<Derivation>, GroundError> {
    let model = ground_least_model_with(problem, depth, limits)?;
    let d = goal_violated(problem, &model);
    if let Some(d) = &d {
        debug_assert_eq!(replay(problem, d), Ok(()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::State;

    fn nat() -> Signature {
        let mut b = ProblemBuilder::new();
        b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
        b.build().signature
    }

    fn all(sig: &Signature, n: u32, sb: bool) -> Vec<TreeAutomaton> {
        let mut c = SearchConfig::uniform(sig, n);
        c.symmetry_breaking = sb;
        enumerate_canonical(sig, &c).map(Result::unwrap).collect()
    }

    #[test]
    fn canonical_counts_for_nat() {
        let sig = nat();
        assert_eq!(all(&sig, 1, true).len(), 1);
        let two = all(&sig, 2, true);
        assert_eq!(two.len(), 3);
        for n in 1..=3u32 {
            assert_eq!(all(&sig, n, false).len(), n.pow(n + 1) as usize);
        }
        let one = &all(&sig, 1, true)[0];
        assert_eq!(one.targets(), &[State(1), State(1)]);
    }

    #[test]
    fn node_budget_stops_enumeration() {
        let sig = nat();
        let mut c = SearchConfig::uniform(&sig, 3);
        c.node_budget = Some(2);
        let items: Vec<_> = enumerate_canonical(&sig, &c).collect();
        assert_eq!(items.last(), Some(&Err(SearchError::NodeBudget(2))));
    }

    #[test]
    fn even_toy_counterexample() {
        let mut b = ProblemBuilder::new();
        b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
        b.predicate("even", &["nat"]);
        let z = b.ctor("z");
        let s = b.ctor("s");
        let fact = b.clause().head("even", vec![Term::constant(z)]);
        b.push(fact);
        let mut c = b.clause();
        let x = c.var("x", "nat");
        c.atom("even", vec![x.clone()]);
        let ssx = c.app("s", vec![c.app("s", vec![x])]);
        let step = c.head("even", vec![ssx]);
        b.push(step);
        let mut c = b.clause();
        c.atom("even", vec![Term::App(s, vec![Term::App(s, vec![Term::constant(z)])])]);
        let goal = c.goal();
        b.push(goal);
        let p = b.build();
        assert_eq!(find_counterexample(&p, 1).unwrap(), None);
        let d = find_counterexample(&p, 2).unwrap().expect("counterexample at depth 2");
        assert_eq!(d.goal, 2);
        assert_eq!(d.proofs[0].height(), 2);
        assert_eq!(replay(&p, &d), Ok(()));
    }

    #[test]
    fn irreflexive_diseq_never_fires() {
        let mut b = ProblemBuilder::new();
        b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
        b.predicate("p", &["nat"]);
        let mut c = b.clause();
        let x = c.var("x", "nat");
        let fact = c.head("p", vec![x]);
        b.push(fact);
        let mut c = b.clause();
        let x = c.var("x", "nat");
        c.atom("p", vec![x.clone()]).diseq(x.clone(), x);
        let goal = c.goal();
        b.push(goal);
        let p = b.build();
        for d in 0..4 {
            assert_eq!(find_counterexample(&p, d).unwrap(), None);
        }
    }
}
