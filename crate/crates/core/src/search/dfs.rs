//! Depth-first assignment of transition targets, one slot at a time.
//!
//! With symmetry breaking, states are numbered in order of discovery. The
//! slot queue starts with the nullary constructors; whenever a slot's target
//! is a state never seen before (always the next unused number of its sort),
//! every slot whose arguments are already-numbered states and mention the new
//! one is appended, constructors in declaration order and argument tuples in
//! lexicographic order. Every automaton whose states are all reachable has
//! exactly one such numbering, so each isomorphism class is produced once.
//! Without symmetry breaking, all slots over exactly `n` states are visited
//! in layout order.

use std::collections::HashMap;
use std::sync::Arc;

use crate::automaton::{Layout, State, Transitions, TreeAutomaton};
use crate::chc::{CtorId, Signature, SortId};

struct Frame {
    pos: usize,
    next: u32,
    applied: bool,
    introduced: bool,
    queue_len: usize,
}

pub(crate) enum Step {
    /// A slot was assigned and more remain.
    Node,
    /// Every queued slot is assigned.
    Leaf,
}

pub(crate) struct Dfs<'a> {
    sig: &'a Signature,
    cap: Arc<Layout>,
    max: Vec<u32>,
    symmetry: bool,
    delta: Vec<State>,
    counts: Vec<u32>,
    queue: Vec<usize>,
    stack: Vec<Frame>,
    started: bool,
    layouts: HashMap<Vec<u32>, Arc<Layout>>,
}

const UNASSIGNED: State = State(0);

impl<'a> Dfs<'a> {
    pub fn new(sig: &'a Signature, max: &[u32], symmetry: bool) -> Self {
        let cap = Arc::new(Layout::new(sig, max));
        let mut dfs = Dfs {
            sig,
            delta: vec![UNASSIGNED; cap.num_slots()],
            cap,
            max: max.to_vec(),
            symmetry,
            counts: vec![0; max.len()],
            queue: Vec::new(),
            stack: Vec::new(),
            started: false,
            layouts: HashMap::new(),
        };
        if symmetry {
            for c in sig.ctor_ids() {
                if sig.ctor_args(c).is_empty() {
                    dfs.queue.push(dfs.cap.slot(c, &[]).expect("nullary slot"));
                }
            }
        } else {
            dfs.counts = max.to_vec();
            dfs.queue = (0..dfs.cap.num_slots()).collect();
        }
        dfs
    }

    fn slot_sort(&self, slot: usize) -> SortId {
        let (c, _) = self.cap.slot_args(slot);
        self.cap.ctor_sort(c)
    }

    /// Queues every slot over numbered states that mentions state `q` of `sort`.
    fn enqueue_new(&mut self, sort: SortId, q: State) {
        for c in self.sig.ctor_ids() {
            let sorts = self.sig.ctor_args(c);
            if !sorts.contains(&sort) {
                continue;
            }
            let pools: Vec<u32> = sorts.iter().map(|s| self.counts[s.index()]).collect();
            if pools.contains(&0) {
                continue;
            }
            let mut args = vec![State(1); sorts.len()];
            loop {
                if sorts.iter().zip(&args).any(|(s, a)| *s == sort && *a == q) {
                    self.queue.push(self.cap.slot(c, &args).expect("slot in range"));
                }
                // next tuple, last position fastest
                let mut k = args.len();
                let mut done = true;
                while k > 0 {
                    k -= 1;
                    if args[k].0 < pools[k] {
                        args[k].0 += 1;
                        done = false;
                        break;
                    }
                    args[k] = State(1);
                }
                if done {
                    break;
                }
            }
        }
    }

    fn undo(&mut self, f: usize) {
        let frame = &mut self.stack[f];
        if !frame.applied {
            return;
        }
        frame.applied = false;
        let slot = self.queue[frame.pos];
        let introduced = frame.introduced;
        let queue_len = frame.queue_len;
        self.delta[slot] = UNASSIGNED;
        if introduced {
            let s = self.slot_sort(slot);
            self.counts[s.index()] -= 1;
            self.queue.truncate(queue_len);
        }
    }

    /// Assigns the next slot target. `descend` is false when the previous step
    /// was pruned, in which case its subtree is skipped. `None` when exhausted.
    pub fn step(&mut self, descend: bool) -> Option<Step> {
        if !self.started {
            self.started = true;
            if self.queue.is_empty() {
                return None;
            }
            self.stack.push(Frame {
                pos: 0,
                next: 1,
                applied: false,
                introduced: false,
                queue_len: 0,
            });
        } else if descend {
            let pos = self.stack.last().map(|f| f.pos + 1).unwrap_or(0);
            if pos < self.queue.len() {
                self.stack.push(Frame {
                    pos,
                    next: 1,
                    applied: false,
                    introduced: false,
                    queue_len: 0,
                });
            }
        }
        loop {
            let f = self.stack.len().checked_sub(1)?;
            self.undo(f);
            let slot = self.queue[self.stack[f].pos];
            let sort = self.slot_sort(slot);
            let limit = if self.symmetry {
                (self.counts[sort.index()] + 1).min(self.max[sort.index()])
            } else {
                self.max[sort.index()]
            };
            let q = self.stack[f].next;
            if q > limit {
                self.stack.pop();
                continue;
            }
            self.stack[f].next += 1;
            self.delta[slot] = State(q);
            self.stack[f].applied = true;
            if self.symmetry && q > self.counts[sort.index()] {
                self.counts[sort.index()] = q;
                self.stack[f].introduced = true;
                self.stack[f].queue_len = self.queue.len();
                self.enqueue_new(sort, State(q));
            } else {
                self.stack[f].introduced = false;
            }
            let pos = self.stack[f].pos;
            return Some(if pos + 1 == self.queue.len() {
                Step::Leaf
            } else {
                Step::Node
            });
        }
    }

    /// The complete automaton at a leaf, over the numbered states only.
    pub fn automaton(&mut self) -> TreeAutomaton {
        let counts = self.counts.clone();
        let layout = self
            .layouts
            .entry(counts.clone())
            .or_insert_with(|| Arc::new(Layout::new(self.sig, &counts)))
            .clone();
        let delta = (0..layout.num_slots())
            .map(|slot| {
                let (c, args) = layout.slot_args(slot);
                self.delta[self.cap.slot(c, &args).expect("slot in range")]
            })
            .collect();
        TreeAutomaton::from_targets(layout, delta)
    }
}

impl Transitions for Dfs<'_> {
    fn num_states(&self, sort: SortId) -> u32 {
        self.counts[sort.index()]
    }

    fn target_of(&self, c: CtorId, args: &[State]) -> Option<State> {
        if args
            .iter()
            .zip(self.cap.ctor_args(c))
            .any(|(q, s)| q.0 > self.counts[s.index()])
        {
            return None;
        }
        let q = self.delta[self.cap.slot(c, args)?];
        (q != UNASSIGNED).then_some(q)
    }
}
