use super::{State, Transitions, TreeAutomaton};
use crate::chc::ground::GroundTerm;
use crate::chc::{CtorId, Signature, SortId};

/// Number of ground terms reaching a state, saturated at two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Card {
    Empty,
    One,
    Many,
}

impl Card {
    fn from_count(n: u8) -> Card {
        match n {
            0 => Card::Empty,
            1 => Card::One,
            _ => Card::Many,
        }
    }
}

/// Per sort and state, how many terms the state recognizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inhabitation {
    classes: Vec<Vec<Card>>,
}

impl Inhabitation {
    /// Counting fixpoint over the defined transitions of a partial automaton.
    /// Defining more transitions can only move states up from `Empty` to `Many`.
    pub fn of(sig: &Signature, t: &impl Transitions) -> Inhabitation {
        let mut count: Vec<Vec<u8>> = sig
            .sort_ids()
            .map(|s| vec![0u8; t.num_states(s) as usize])
            .collect();
        loop {
            let mut next: Vec<Vec<u8>> = count.iter().map(|v| vec![0u8; v.len()]).collect();
            for c in sig.ctor_ids() {
                let sorts = sig.ctor_args(c);
                let pools: Vec<Vec<State>> = sorts
                    .iter()
                    .map(|s| (1..=t.num_states(*s)).map(State).collect())
                    .collect();
                let out = sig.ctor_sort(c).index();
                product(&pools, &mut Vec::new(), &mut |args| {
                    let args: Vec<State> = args.iter().map(|q| **q).collect();
                    if let Some(q) = t.target_of(c, &args) {
                        let mut n = 1u8;
                        for (s, p) in sorts.iter().zip(&args) {
                            n = n.saturating_mul(count[s.index()][p.index()]).min(2);
                        }
                        let cell = &mut next[out][q.index()];
                        *cell = cell.saturating_add(n).min(2);
                    }
                });
            }
            if next == count {
                break;
            }
            count = next;
        }
        Inhabitation::from_counts(count)
    }

    fn from_counts(count: Vec<Vec<u8>>) -> Inhabitation {
        Inhabitation {
            classes: count
                .into_iter()
                .map(|v| v.into_iter().map(Card::from_count).collect())
                .collect(),
        }
    }

    pub fn get(&self, sort: SortId, q: State) -> Card {
        self.classes[sort.index()][q.index()]
    }

    pub fn non_empty(&self, sort: SortId, q: State) -> bool {
        self.get(sort, q) != Card::Empty
    }

    /// Whether two distinct ground terms reach `q1` and `q2` respectively.
    /// By determinism distinct states have disjoint languages, so this only
    /// needs the cardinality classes.
    pub fn diff_approx(&self, sort: SortId, q1: State, q2: State) -> bool {
        if q1 == q2 {
            self.get(sort, q1) == Card::Many
        } else {
            self.non_empty(sort, q1) && self.non_empty(sort, q2)
        }
    }
}

/// Least fixpoint of term counting, saturated at 2.
pub fn inhabitation(a: &TreeAutomaton) -> Inhabitation {
    let layout = a.layout();
    let mut count: Vec<Vec<u8>> = layout
        .state_counts()
        .iter()
        .map(|&n| vec![0u8; n as usize])
        .collect();
    loop {
        let mut next: Vec<Vec<u8>> = count.iter().map(|v| vec![0u8; v.len()]).collect();
        for (slot, &q) in a.targets().iter().enumerate() {
            let (c, args) = layout.slot_args(slot);
            let mut n = 1u8;
            for (s, p) in layout.ctor_args(c).iter().zip(&args) {
                n = n.saturating_mul(count[s.index()][p.index()]).min(2);
            }
            let cell = &mut next[layout.ctor_sort(c).index()][q.index()];
            *cell = cell.saturating_add(n).min(2);
        }
        if next == count {
            break;
        }
        count = next;
    }
    Inhabitation::from_counts(count)
}

/// See [`Inhabitation::diff_approx`].
pub fn diff_approx(a: &TreeAutomaton, sort: SortId, q1: State, q2: State) -> bool {
    inhabitation(a).diff_approx(sort, q1, q2)
}

/// Up to `limit` distinct terms recognized by `q`, shallowest first.
///
/// Keeps at most `limit` terms per state while growing terms level by level.
/// That is enough: if a term among the `limit` shallowest of `q` used an
/// argument outside its state's kept set, the kept terms of that state would
/// give `limit` terms of `q` that are at most as deep.
pub fn sample_language(a: &TreeAutomaton, sort: SortId, q: State, limit: usize) -> Vec<GroundTerm> {
    let layout = a.layout();
    if limit == 0 {
        return Vec::new();
    }
    // kept[sort][state] = (term, depth)
    let mut kept: Vec<Vec<Vec<(GroundTerm, usize)>>> = layout
        .state_counts()
        .iter()
        .map(|&n| vec![Vec::new(); n as usize])
        .collect();
    let mut depth = 0;
    loop {
        let mut added = false;
        for c in (0..layout.num_ctors() as u32).map(CtorId) {
            let sorts = layout.ctor_args(c);
            if (depth == 0) != sorts.is_empty() {
                continue;
            }
            // candidates are collected first so that this level only uses shallower terms
            let pools: Vec<Vec<(State, &GroundTerm, usize)>> = sorts
                .iter()
                .map(|s| {
                    kept[s.index()]
                        .iter()
                        .enumerate()
                        .flat_map(|(i, ts)| ts.iter().map(move |(t, d)| (State::from_index(i), t, *d)))
                        .collect()
                })
                .collect();
            let mut fresh = Vec::new();
            let mut picks = Vec::with_capacity(pools.len());
            product(&pools, &mut picks, &mut |picks| {
                let top = picks.iter().map(|p| p.2).max();
                if depth == 0 || top == Some(depth - 1) {
                    let args: Vec<State> = picks.iter().map(|p| p.0).collect();
                    let term = GroundTerm::new(c, picks.iter().map(|p| p.1.clone()).collect());
                    fresh.push((a.target(c, &args), term));
                }
            });
            let target_sort = layout.ctor_sort(c).index();
            for (target, term) in fresh {
                let slot = &mut kept[target_sort][target.index()];
                if slot.len() < limit {
                    slot.push((term, depth));
                    added = true;
                }
            }
        }
        if !added && depth > 0 {
            break;
        }
        depth += 1;
    }
    kept[sort.index()][q.index()]
        .iter()
        .map(|(t, _)| t.clone())
        .collect()
}

fn product<'p, T>(pools: &'p [Vec<T>], acc: &mut Vec<&'p T>, f: &mut impl FnMut(&[&'p T])) {
    match pools.split_first() {
        None => f(acc),
        Some((first, rest)) => {
            for x in first {
                acc.push(x);
                product(rest, acc, f);
                acc.pop();
            }
        }
    }
}
