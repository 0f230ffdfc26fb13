//! Complete deterministic bottom-up tree automata over a [`Signature`].
//!
//! States are numbered from 1 separately for every sort. A [`TreeAutomaton`]
//! stores its transition function densely: every constructor owns a block of
//! slots, one per tuple of argument states, addressed in mixed radix with the
//! first argument most significant. Candidate automata that may be incomplete
//! or out of range are written as a [`TransitionMap`] and checked with
//! [`check_automaton`].

mod lang;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::chc::ground::GroundTerm;
use crate::chc::*;

pub use lang::{diff_approx, inhabitation, sample_language, Card, Inhabitation};

/// A state index, 1-based within its sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct State(pub u32);

impl State {
    /// 0-based position, for indexing.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> State {
        State(i as u32 + 1)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shape of the transition table for fixed state counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    ctor_args: Vec<Vec<SortId>>,
    ctor_sort: Vec<SortId>,
    states: Vec<u32>,
    offsets: Vec<usize>,
    slots: usize,
}

impl Layout {
    pub fn new(sig: &Signature, states: &[u32]) -> Layout {
        assert_eq!(states.len(), sig.num_sorts(), "one state count per sort");
        let mut offsets = Vec::with_capacity(sig.num_ctors());
        let mut slots = 0usize;
        let mut ctor_args = Vec::new();
        let mut ctor_sort = Vec::new();
        for c in sig.ctor_ids() {
            offsets.push(slots);
            let args = sig.ctor_args(c).to_vec();
            slots += args.iter().map(|s| states[s.index()] as usize).product::<usize>();
            ctor_args.push(args);
            ctor_sort.push(sig.ctor_sort(c));
        }
        Layout {
            ctor_args,
            ctor_sort,
            states: states.to_vec(),
            offsets,
            slots,
        }
    }

    pub fn num_slots(&self) -> usize {
        self.slots
    }

    pub fn num_ctors(&self) -> usize {
        self.ctor_sort.len()
    }

    /// State count per sort.
    pub fn state_counts(&self) -> &[u32] {
        &self.states
    }

    pub fn states(&self, sort: SortId) -> u32 {
        self.states[sort.index()]
    }

    pub fn ctor_args(&self, c: CtorId) -> &[SortId] {
        &self.ctor_args[c.index()]
    }

    pub fn ctor_sort(&self, c: CtorId) -> SortId {
        self.ctor_sort[c.index()]
    }

    /// Slot of `c(args)`; `None` if an argument is out of range or the arity is wrong.
    pub fn slot(&self, c: CtorId, args: &[State]) -> Option<usize> {
        let sorts = self.ctor_args.get(c.index())?;
        if sorts.len() != args.len() {
            return None;
        }
        let mut i = 0usize;
        for (s, q) in sorts.iter().zip(args) {
            let n = self.states[s.index()];
            if q.0 == 0 || q.0 > n {
                return None;
            }
            i = i * n as usize + q.index();
        }
        Some(self.offsets[c.index()] + i)
    }

    /// Inverse of [`Layout::slot`].
    pub fn slot_args(&self, slot: usize) -> (CtorId, Vec<State>) {
        let c = match self.offsets.binary_search(&slot) {
            Ok(mut i) => {
                // constructors with zero slots share an offset with the next one
                while i + 1 < self.offsets.len() && self.offsets[i + 1] == slot {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        let mut rest = slot - self.offsets[c];
        let sorts = &self.ctor_args[c];
        let mut args = vec![State(0); sorts.len()];
        for (k, s) in sorts.iter().enumerate().rev() {
            let n = self.states[s.index()] as usize;
            args[k] = State::from_index(rest % n);
            rest /= n;
        }
        (CtorId(c as u32), args)
    }

    /// Slots of `c`, in lexicographic order of their argument tuples.
    pub fn ctor_slots(&self, c: CtorId) -> std::ops::Range<usize> {
        let start = self.offsets[c.index()];
        let end = self
            .offsets
            .get(c.index() + 1)
            .copied()
            .unwrap_or(self.slots);
        start..end
    }
}

/// Read access to a possibly partial transition function.
pub trait Transitions {
    /// States currently available in `sort`.
    fn num_states(&self, sort: SortId) -> u32;
    /// `None` when the transition is not (yet) defined.
    fn target_of(&self, c: CtorId, args: &[State]) -> Option<State>;
}

/// A complete deterministic tree automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    layout: Arc<Layout>,
    delta: Vec<State>,
}

impl TreeAutomaton {
    /// Builds an automaton from a dense target vector in slot order.
    ///
    /// Panics if the length or a target is out of range; use [`TransitionMap`]
    /// for unchecked input.
    pub fn from_targets(layout: Arc<Layout>, delta: Vec<State>) -> TreeAutomaton {
        assert_eq!(delta.len(), layout.num_slots());
        for (slot, q) in delta.iter().enumerate() {
            let (c, _) = layout.slot_args(slot);
            let n = layout.states(layout.ctor_sort(c));
            assert!(q.0 >= 1 && q.0 <= n, "target {q} out of range");
        }
        TreeAutomaton { layout, delta }
    }

    pub fn from_fn(
        sig: &Signature,
        states: &[u32],
        mut f: impl FnMut(CtorId, &[State]) -> State,
    ) -> TreeAutomaton {
        let layout = Arc::new(Layout::new(sig, states));
        let delta = (0..layout.num_slots())
            .map(|slot| {
                let (c, args) = layout.slot_args(slot);
                f(c, &args)
            })
            .collect();
        TreeAutomaton::from_targets(layout, delta)
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn states(&self, sort: SortId) -> u32 {
        self.layout.states(sort)
    }

    pub fn state_counts(&self) -> &[u32] {
        self.layout.state_counts()
    }

    /// All states of `sort`.
    pub fn state_range(&self, sort: SortId) -> impl Iterator<Item = State> {
        (1..=self.states(sort)).map(State)
    }

    pub fn target(&self, c: CtorId, args: &[State]) -> State {
        let slot = self
            .layout
            .slot(c, args)
            .unwrap_or_else(|| panic!("no slot for constructor #{} on {args:?}", c.0));
        self.delta[slot]
    }

    pub fn targets(&self) -> &[State] {
        &self.delta
    }

    /// The state reached by a ground term.
    pub fn run(&self, t: &GroundTerm) -> State {
        let args: Vec<State> = t.args.iter().map(|a| self.run(a)).collect();
        self.target(t.ctor, &args)
    }

    /// All transitions `(c, args, target)` in slot order.
    pub fn transitions(&self) -> impl Iterator<Item = (CtorId, Vec<State>, State)> + '_ {
        self.delta.iter().enumerate().map(|(slot, &q)| {
            let (c, args) = self.layout.slot_args(slot);
            (c, args, q)
        })
    }

    pub fn to_map(&self) -> TransitionMap {
        let mut m = TransitionMap::new(self.state_counts().to_vec());
        for (c, args, q) in self.transitions() {
            m.insert(c, args, q);
        }
        m
    }

    /// Transition lines such as `S(2) -> 1`, with capitalised constructor names.
    pub fn render_transitions(&self, sig: &Signature) -> Vec<String> {
        self.transitions()
            .map(|(c, args, q)| {
                let name = capitalize(sig.ctor_name(c));
                if args.is_empty() {
                    format!("{name} -> {q}")
                } else {
                    let args: Vec<String> = args.iter().map(State::to_string).collect();
                    format!("{name}({}) -> {q}", args.join(","))
                }
            })
            .collect()
    }
}

impl Transitions for TreeAutomaton {
    fn num_states(&self, sort: SortId) -> u32 {
        self.states(sort)
    }

    fn target_of(&self, c: CtorId, args: &[State]) -> Option<State> {
        self.layout.slot(c, args).map(|s| self.delta[s])
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// A possibly incomplete transition relation, as produced by a decoder.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionMap {
    pub states: Vec<u32>,
    pub entries: BTreeMap<(CtorId, Vec<State>), State>,
}

impl TransitionMap {
    pub fn new(states: Vec<u32>) -> Self {
        TransitionMap {
            states,
            entries: BTreeMap::new(),
        }
    }

    /// Adds `c(args) -> q`, returning the previous target if any.
    pub fn insert(&mut self, c: CtorId, args: Vec<State>, q: State) -> Option<State> {
        self.entries.insert((c, args), q)
    }

    /// Checks the map and converts it into a dense automaton.
    pub fn into_automaton(&self, sig: &Signature) -> Result<TreeAutomaton, AutomatonReport> {
        let report = check_automaton(sig, self);
        if !report.is_ok() {
            return Err(report);
        }
        Ok(TreeAutomaton::from_fn(sig, &self.states, |c, args| {
            self.entries[&(c, args.to_vec())]
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutomatonIssue {
    StateCountMismatch { expected: usize, found: usize },
    NoStates { sort: String },
    UnknownConstructor(CtorId),
    /// Wrong arity or an argument state outside its sort's range.
    BadArguments { ctor: String, args: Vec<State> },
    TargetOutOfRange { ctor: String, args: Vec<State>, target: State },
    Missing { ctor: String, args: Vec<State> },
}

impl fmt::Display for AutomatonIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuple = |args: &[State]| {
            args.iter()
                .map(State::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            AutomatonIssue::StateCountMismatch { expected, found } => {
                write!(f, "expected state counts for {expected} sorts, found {found}")
            }
            AutomatonIssue::NoStates { sort } => write!(f, "sort `{sort}` has no states"),
            AutomatonIssue::UnknownConstructor(c) => write!(f, "unknown constructor #{}", c.0),
            AutomatonIssue::BadArguments { ctor, args } => {
                write!(f, "{ctor}({}) has ill-sorted arguments", tuple(args))
            }
            AutomatonIssue::TargetOutOfRange { ctor, args, target } => {
                write!(f, "{ctor}({}) -> {target} is out of range", tuple(args))
            }
            AutomatonIssue::Missing { ctor, args } => {
                write!(f, "no transition for {ctor}({})", tuple(args))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AutomatonReport {
    pub issues: Vec<AutomatonIssue>,
}

impl AutomatonReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for AutomatonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for AutomatonReport {}

/// Totality, range and sort discipline of a candidate transition map.
/// Determinism holds by construction of the map.
pub fn check_automaton(sig: &Signature, map: &TransitionMap) -> AutomatonReport {
    let mut issues = Vec::new();
    if map.states.len() != sig.num_sorts() {
        issues.push(AutomatonIssue::StateCountMismatch {
            expected: sig.num_sorts(),
            found: map.states.len(),
        });
        return AutomatonReport { issues };
    }
    for s in sig.sort_ids() {
        if map.states[s.index()] == 0 {
            issues.push(AutomatonIssue::NoStates {
                sort: sig.sort_name(s).to_string(),
            });
        }
    }
    if !issues.is_empty() {
        return AutomatonReport { issues };
    }
    let layout = Layout::new(sig, &map.states);
    let mut seen = BTreeSet::new();
    for ((c, args), &q) in &map.entries {
        if c.index() >= sig.num_ctors() {
            issues.push(AutomatonIssue::UnknownConstructor(*c));
            continue;
        }
        let ctor = sig.ctor_name(*c).to_string();
        let Some(slot) = layout.slot(*c, args) else {
            issues.push(AutomatonIssue::BadArguments {
                ctor,
                args: args.clone(),
            });
            continue;
        };
        seen.insert(slot);
        let n = map.states[sig.ctor_sort(*c).index()];
        if q.0 == 0 || q.0 > n {
            issues.push(AutomatonIssue::TargetOutOfRange {
                ctor,
                args: args.clone(),
                target: q,
            });
        }
    }
    for slot in 0..layout.num_slots() {
        if !seen.contains(&slot) {
            let (c, args) = layout.slot_args(slot);
            issues.push(AutomatonIssue::Missing {
                ctor: sig.ctor_name(c).to_string(),
                args,
            });
        }
    }
    AutomatonReport { issues }
}

/// For each predicate, the state tuples where it holds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredicateTables {
    tables: Vec<BTreeSet<Vec<State>>>,
}

impl PredicateTables {
    pub fn empty(num_preds: usize) -> Self {
        PredicateTables {
            tables: vec![BTreeSet::new(); num_preds],
        }
    }

    pub fn num_preds(&self) -> usize {
        self.tables.len()
    }

    pub fn get(&self, p: PredId) -> &BTreeSet<Vec<State>> {
        &self.tables[p.index()]
    }

    pub fn contains(&self, p: PredId, tuple: &[State]) -> bool {
        self.tables[p.index()].contains(tuple)
    }

    pub fn insert(&mut self, p: PredId, tuple: Vec<State>) -> bool {
        self.tables[p.index()].insert(tuple)
    }

    pub fn remove(&mut self, p: PredId, tuple: &[State]) -> bool {
        self.tables[p.index()].remove(tuple)
    }

    /// Total number of tuples.
    pub fn len(&self) -> usize {
        self.tables.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(p, tuple)` pairs, predicates in declaration order, tuples ascending.
    pub fn iter(&self) -> impl Iterator<Item = (PredId, &Vec<State>)> {
        self.tables
            .iter()
            .enumerate()
            .flat_map(|(p, t)| t.iter().map(move |tuple| (PredId(p as u32), tuple)))
    }

    /// Whether every tuple has the right length and lies in range.
    pub fn well_ranged(&self, problem: &Problem, a: &TreeAutomaton) -> bool {
        self.tables.len() == problem.predicates.len()
            && self.iter().all(|(p, tuple)| {
                let sorts = &problem.pred(p).args;
                sorts.len() == tuple.len()
                    && sorts
                        .iter()
                        .zip(tuple)
                        .all(|(s, q)| q.0 >= 1 && q.0 <= a.states(*s))
            })
    }

    /// Lines such as `plus(2,1,1)`.
    pub fn render(&self, problem: &Problem) -> Vec<String> {
        self.iter()
            .map(|(p, tuple)| {
                let name = problem.pred_name(p);
                if tuple.is_empty() {
                    name.to_string()
                } else {
                    let args: Vec<String> = tuple.iter().map(State::to_string).collect();
                    format!("{name}({})", args.join(","))
                }
            })
            .collect()
    }
}
