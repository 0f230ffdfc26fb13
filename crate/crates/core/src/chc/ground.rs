//! Ground semantics of a problem over a depth-bounded Herbrand universe.
//!
//! [`ground_least_model`] computes the bottom-up fixpoint of the definite
//! clauses restricted to terms of constructor depth at most `d`, keeping one
//! justification per derived atom. [`goal_violated`] searches a set of ground
//! atoms for an instance of a goal body and returns it as a [`Derivation`],
//! which [`replay`] re-checks without sharing any code with the evaluator.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use super::*;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundTerm {
    pub ctor: CtorId,
    pub args: Vec<GroundTerm>,
}

impl GroundTerm {
    pub fn new(ctor: CtorId, args: Vec<GroundTerm>) -> Self {
        GroundTerm { ctor, args }
    }

    pub fn constant(ctor: CtorId) -> Self {
        GroundTerm::new(ctor, Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(|a| a.depth() + 1).max().unwrap_or(0)
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        DisplayGround { sig, term: self }
    }
}

struct DisplayGround<'a> {
    sig: &'a Signature,
    term: &'a GroundTerm,
}

impl fmt::Display for DisplayGround<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sig.ctor_name(self.term.ctor))?;
        if !self.term.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.term.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", a.display(self.sig))?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Vec<GroundTerm>,
}

impl GroundAtom {
    pub fn new(pred: PredId, args: Vec<GroundTerm>) -> Self {
        GroundAtom { pred, args }
    }

    pub fn display<'a>(&'a self, problem: &'a Problem) -> impl fmt::Display + 'a {
        DisplayAtom {
            problem,
            atom: self,
        }
    }
}

struct DisplayAtom<'a> {
    problem: &'a Problem,
    atom: &'a GroundAtom,
}

impl fmt::Display for DisplayAtom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.problem.pred_name(self.atom.pred))?;
        if !self.atom.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.atom.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", a.display(&self.problem.signature))?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("ground universe exceeds {0} terms")]
    TooManyTerms(usize),
    #[error("ground model exceeds {0} atoms")]
    TooManyAtoms(usize),
}

/// Caps on the size of ground computations.
#[derive(Debug, Clone, Copy)]
pub struct GroundLimits {
    pub max_terms: usize,
    pub max_atoms: usize,
}

impl Default for GroundLimits {
    fn default() -> Self {
        GroundLimits {
            max_terms: 200_000,
            max_atoms: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

#[derive(Debug, Clone)]
struct Node {
    ctor: CtorId,
    args: Vec<TermId>,
    depth: u32,
}

/// Hash-consed ground terms of depth at most `depth`, per sort.
#[derive(Debug, Clone)]
pub struct Universe {
    nodes: Vec<Node>,
    index: HashMap<(CtorId, Vec<TermId>), TermId>,
    by_sort: Vec<Vec<TermId>>,
    depth: usize,
}

impl Universe {
    pub fn new(sig: &Signature, depth: usize, limits: GroundLimits) -> Result<Self, GroundError> {
        let mut u = Universe {
            nodes: Vec::new(),
            index: HashMap::new(),
            by_sort: vec![Vec::new(); sig.num_sorts()],
            depth,
        };
        for level in 0..=depth {
            let mut fresh = Vec::new();
            for c in sig.ctor_ids() {
                let args = sig.ctor_args(c);
                if (level == 0) != args.is_empty() {
                    continue;
                }
                let pools: Vec<&[TermId]> =
                    args.iter().map(|s| u.by_sort[s.index()].as_slice()).collect();
                for_each_tuple(&pools, &mut |tuple| {
                    let top = tuple.iter().map(|t| u.nodes[t.0 as usize].depth).max();
                    if level == 0 || top == Some(level as u32 - 1) {
                        fresh.push((c, tuple.to_vec()));
                    }
                });
            }
            for (c, args) in fresh {
                if u.nodes.len() >= limits.max_terms {
                    return Err(GroundError::TooManyTerms(limits.max_terms));
                }
                let id = TermId(u.nodes.len() as u32);
                u.nodes.push(Node {
                    ctor: c,
                    args: args.clone(),
                    depth: level as u32,
                });
                u.index.insert((c, args), id);
                u.by_sort[sig.ctor_sort(c).index()].push(id);
            }
        }
        Ok(u)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Terms of `sort`, in nondecreasing depth order.
    pub fn terms_of(&self, sort: SortId) -> &[TermId] {
        &self.by_sort[sort.index()]
    }

    pub fn lookup(&self, ctor: CtorId, args: &[TermId]) -> Option<TermId> {
        self.index.get(&(ctor, args.to_vec())).copied()
    }

    pub fn intern(&self, term: &GroundTerm) -> Option<TermId> {
        let args = term
            .args
            .iter()
            .map(|a| self.intern(a))
            .collect::<Option<Vec<_>>>()?;
        self.lookup(term.ctor, &args)
    }

    pub fn term(&self, id: TermId) -> GroundTerm {
        let n = &self.nodes[id.0 as usize];
        GroundTerm::new(n.ctor, n.args.iter().map(|&a| self.term(a)).collect())
    }

    fn node(&self, id: TermId) -> &Node {
        &self.nodes[id.0 as usize]
    }
}

fn for_each_tuple(pools: &[&[TermId]], f: &mut impl FnMut(&[TermId])) {
    fn go(pools: &[&[TermId]], acc: &mut Vec<TermId>, f: &mut impl FnMut(&[TermId])) {
        match pools.split_first() {
            None => f(acc),
            Some((first, rest)) => {
                for &t in *first {
                    acc.push(t);
                    go(rest, acc, f);
                    acc.pop();
                }
            }
        }
    }
    go(pools, &mut Vec::with_capacity(pools.len()), f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct AtomId(u32);

#[derive(Debug, Clone)]
enum Justification {
    Assumed,
    Clause {
        clause: usize,
        binding: Vec<TermId>,
        premises: Vec<AtomId>,
    },
}

/// A finite set of ground atoms over a [`Universe`], with how each was obtained.
#[derive(Debug, Clone)]
pub struct GroundModel {
    universe: Universe,
    atoms: Vec<(PredId, Vec<TermId>)>,
    index: HashMap<(PredId, Vec<TermId>), AtomId>,
    by_pred: Vec<Vec<AtomId>>,
    why: Vec<Justification>,
}

impl GroundModel {
    fn new(universe: Universe, npreds: usize) -> Self {
        GroundModel {
            universe,
            atoms: Vec::new(),
            index: HashMap::new(),
            by_pred: vec![Vec::new(); npreds],
            why: Vec::new(),
        }
    }

    /// A model holding exactly `atoms`, over the universe of all terms no
    /// deeper than the deepest argument among them.
    pub fn from_atoms(
        problem: &Problem,
        atoms: impl IntoIterator<Item = GroundAtom>,
    ) -> Result<Self, GroundError> {
        let atoms: Vec<GroundAtom> = atoms.into_iter().collect();
        let depth = atoms
            .iter()
            .flat_map(|a| a.args.iter().map(GroundTerm::depth))
            .max()
            .unwrap_or(0);
        let universe = Universe::new(&problem.signature, depth, GroundLimits::default())?;
        let mut model = GroundModel::new(universe, problem.predicates.len());
        for a in atoms {
            let args = a
                .args
                .iter()
                .map(|t| model.universe.intern(t).expect("term within universe depth"))
                .collect();
            model.insert(a.pred, args, Justification::Assumed);
        }
        Ok(model)
    }

    fn insert(&mut self, pred: PredId, args: Vec<TermId>, why: Justification) -> bool {
        if self.index.contains_key(&(pred, args.clone())) {
            return false;
        }
        let id = AtomId(self.atoms.len() as u32);
        self.index.insert((pred, args.clone()), id);
        self.atoms.push((pred, args));
        self.by_pred[pred.index()].push(id);
        self.why.push(why);
        true
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        let Some(args) = atom
            .args
            .iter()
            .map(|t| self.universe.intern(t))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        self.index.contains_key(&(atom.pred, args))
    }

    fn atom(&self, id: AtomId) -> GroundAtom {
        let (pred, args) = &self.atoms[id.0 as usize];
        GroundAtom::new(*pred, args.iter().map(|&t| self.universe.term(t)).collect())
    }

    /// All atoms, in derivation order.
    pub fn atoms(&self) -> impl Iterator<Item = GroundAtom> + '_ {
        (0..self.atoms.len() as u32).map(move |i| self.atom(AtomId(i)))
    }

    /// The recorded justification of `atom` as a proof tree.
    pub fn proof(&self, atom: &GroundAtom) -> Option<ProofTree> {
        let args = atom
            .args
            .iter()
            .map(|t| self.universe.intern(t))
            .collect::<Option<Vec<_>>>()?;
        let id = *self.index.get(&(atom.pred, args))?;
        Some(self.proof_of(id))
    }

    fn proof_of(&self, id: AtomId) -> ProofTree {
        let step = match &self.why[id.0 as usize] {
            Justification::Assumed => ProofStep::Assumed,
            Justification::Clause {
                clause,
                binding,
                premises,
            } => ProofStep::Clause {
                clause: *clause,
                substitution: binding.iter().map(|&t| self.universe.term(t)).collect(),
                premises: premises.iter().map(|&p| self.proof_of(p)).collect(),
            },
        };
        ProofTree {
            atom: self.atom(id),
            step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofStep {
    /// Taken as given (models built with [`GroundModel::from_atoms`]).
    Assumed,
    /// Instance of a definite clause; `substitution` follows `Clause::vars`.
    Clause {
        clause: usize,
        substitution: Vec<GroundTerm>,
        premises: Vec<ProofTree>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub atom: GroundAtom,
    pub step: ProofStep,
}

impl ProofTree {
    pub fn height(&self) -> usize {
        match &self.step {
            ProofStep::Assumed => 0,
            ProofStep::Clause { premises, .. } => {
                1 + premises.iter().map(ProofTree::height).max().unwrap_or(0)
            }
        }
    }
}

/// A ground instance of a goal body whose atoms are all justified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub goal: usize,
    /// One term per variable of the goal clause.
    pub substitution: Vec<GroundTerm>,
    /// One proof per body atom, in body order.
    pub proofs: Vec<ProofTree>,
}

/// Least model of the definite clauses over terms of depth at most `depth`.
pub fn ground_least_model(problem: &Problem, depth: usize) -> Result<GroundModel, GroundError> {
    ground_least_model_with(problem, depth, GroundLimits::default())
}

pub fn ground_least_model_with(
    problem: &Problem,
    depth: usize,
    limits: GroundLimits,
) -> Result<GroundModel, GroundError> {
    let universe = Universe::new(&problem.signature, depth, limits)?;
    let mut model = GroundModel::new(universe, problem.predicates.len());
    let npreds = problem.predicates.len();

    // per predicate: atoms [0, old) were seen by the previous round, [old, cur) are new
    let mut old = vec![0usize; npreds];
    let mut first = true;
    loop {
        let cur: Vec<usize> = model.by_pred.iter().map(Vec::len).collect();
        let mut pending = Vec::new();
        for (ci, clause) in problem.definite() {
            let natoms = clause.body_atoms().count();
            if first {
                let ranges = vec![Range::Full; natoms];
                collect_heads(problem, &model, ci, clause, &ranges, &cur, &old, &mut pending);
            } else {
                for delta_at in 0..natoms {
                    let ranges: Vec<Range> = (0..natoms)
                        .map(|k| if k == delta_at { Range::Delta } else { Range::Full })
                        .collect();
                    collect_heads(problem, &model, ci, clause, &ranges, &cur, &old, &mut pending);
                }
            }
        }
        let mut grew = false;
        for (pred, args, why) in pending {
            if model.insert(pred, args, why) {
                grew = true;
                if model.len() > limits.max_atoms {
                    return Err(GroundError::TooManyAtoms(limits.max_atoms));
                }
            }
        }
        if !grew {
            return Ok(model);
        }
        old = cur;
        first = false;
    }
}

#[derive(Debug, Clone, Copy)]
enum Range {
    Full,
    Delta,
}

#[allow(clippy::too_many_arguments)]
fn collect_heads(
    problem: &Problem,
    model: &GroundModel,
    ci: usize,
    clause: &Clause,
    ranges: &[Range],
    cur: &[usize],
    old: &[usize],
    out: &mut Vec<(PredId, Vec<TermId>, Justification)>,
) {
    let head = clause.head.as_ref().expect("definite clause");
    let u = &model.universe;
    let _ = Matcher {
        problem,
        model,
        clause,
        ranges,
        cur,
        old,
    }
    .run(&mut |binding, premises| {
        let args = head
            .args
            .iter()
            .map(|t| eval(u, t, binding))
            .collect::<Option<Vec<_>>>();
        if let Some(args) = args {
            if !model.index.contains_key(&(head.pred, args.clone())) {
                out.push((
                    head.pred,
                    args,
                    Justification::Clause {
                        clause: ci,
                        binding: binding.iter().map(|b| b.expect("complete binding")).collect(),
                        premises: premises.to_vec(),
                    },
                ));
            }
        }
        ControlFlow::Continue(())
    });
}

/// First instance of a goal body satisfied by `model`, in clause order.
pub fn goal_violated(problem: &Problem, model: &GroundModel) -> Option<Derivation> {
    let cur: Vec<usize> = model.by_pred.iter().map(Vec::len).collect();
    let old = vec![0; cur.len()];
    for (gi, clause) in problem.goals() {
        let ranges = vec![Range::Full; clause.body_atoms().count()];
        let mut found = None;
        let _ = Matcher {
            problem,
            model,
            clause,
            ranges: &ranges,
            cur: &cur,
            old: &old,
        }
        .run(&mut |binding, premises| {
            found = Some(Derivation {
                goal: gi,
                substitution: binding
                    .iter()
                    .map(|b| model.universe.term(b.expect("complete binding")))
                    .collect(),
                proofs: premises.iter().map(|&p| model.proof_of(p)).collect(),
            });
            ControlFlow::Break(())
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

type Binding = Vec<Option<TermId>>;

struct Matcher<'a> {
    problem: &'a Problem,
    model: &'a GroundModel,
    clause: &'a Clause,
    ranges: &'a [Range],
    cur: &'a [usize],
    old: &'a [usize],
}

impl Matcher<'_> {
    fn run(
        &self,
        emit: &mut impl FnMut(&[Option<TermId>], &[AtomId]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let atoms: Vec<&Atom> = self.clause.body_atoms().collect();
        let binding = vec![None; self.clause.vars.len()];
        self.atoms(&atoms, 0, binding, &mut Vec::new(), emit)
    }

    fn atoms(
        &self,
        atoms: &[&Atom],
        k: usize,
        binding: Binding,
        premises: &mut Vec<AtomId>,
        emit: &mut impl FnMut(&[Option<TermId>], &[AtomId]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(atom) = atoms.get(k) else {
            return self.finish(binding, premises, emit);
        };
        let p = atom.pred.index();
        let ids = &self.model.by_pred[p];
        let (lo, hi) = match self.ranges[k] {
            Range::Full => (0, self.cur[p]),
            Range::Delta => (self.old[p], self.cur[p]),
        };
        for &id in &ids[lo..hi] {
            let (_, args) = &self.model.atoms[id.0 as usize];
            let mut b = binding.clone();
            if atom
                .args
                .iter()
                .zip(args)
                .all(|(pat, &t)| matches(&self.model.universe, pat, t, &mut b))
            {
                premises.push(id);
                let flow = self.atoms(atoms, k + 1, b, premises, emit);
                premises.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    fn finish(
        &self,
        mut binding: Binding,
        premises: &[AtomId],
        emit: &mut impl FnMut(&[Option<TermId>], &[AtomId]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let u = &self.model.universe;
        // equalities with one evaluable side bind the other side by matching
        let mut progress = true;
        while progress {
            progress = false;
            for lit in &self.clause.body {
                let Literal::Eq(l, r) = lit else { continue };
                for (a, b) in [(l, r), (r, l)] {
                    if has_unbound(b, &binding) {
                        if let Some(v) = eval(u, a, &binding) {
                            if !matches(u, b, v, &mut binding) {
                                return ControlFlow::Continue(());
                            }
                            progress = true;
                        }
                    }
                }
            }
        }
        let mut needed = vec![false; binding.len()];
        if let Some(h) = &self.clause.head {
            h.args.iter().for_each(|t| t.for_each_var(&mut |v| needed[v.index()] = true));
        }
        for lit in &self.clause.body {
            if !matches!(lit, Literal::Atom(_)) {
                lit.for_each_var(&mut |v| needed[v.index()] = true);
            }
        }
        let mut open = Vec::new();
        for (i, b) in binding.iter_mut().enumerate() {
            if b.is_none() {
                let sort = self.clause.vars[i].sort;
                if needed[i] {
                    open.push((i, sort));
                } else {
                    // unconstrained: any witness will do
                    *b = u.terms_of(sort).first().copied();
                    if b.is_none() {
                        return ControlFlow::Continue(());
                    }
                }
            }
        }
        self.generate(&open, binding, premises, emit)
    }

    fn generate(
        &self,
        open: &[(usize, SortId)],
        mut binding: Binding,
        premises: &[AtomId],
        emit: &mut impl FnMut(&[Option<TermId>], &[AtomId]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let u = &self.model.universe;
        match open.split_first() {
            None => {
                let ok = self.clause.body.iter().all(|lit| match lit {
                    Literal::Atom(_) => true,
                    Literal::Eq(l, r) => pattern_eq(u, l, r, &binding),
                    Literal::Diseq(l, r) => !pattern_eq(u, l, r, &binding),
                });
                if ok {
                    emit(&binding, premises)
                } else {
                    ControlFlow::Continue(())
                }
            }
            Some((&(v, sort), rest)) => {
                for &t in u.terms_of(sort) {
                    binding[v] = Some(t);
                    self.generate(rest, binding.clone(), premises, emit)?;
                }
                let _ = self.problem;
                ControlFlow::Continue(())
            }
        }
    }
}

fn has_unbound(t: &Term, b: &Binding) -> bool {
    match t {
        Term::Var(v) => b[v.index()].is_none(),
        Term::App(_, args) => args.iter().any(|a| has_unbound(a, b)),
    }
}

fn matches(u: &Universe, pat: &Term, t: TermId, b: &mut Binding) -> bool {
    match pat {
        Term::Var(v) => match b[v.index()] {
            Some(x) => x == t,
            None => {
                b[v.index()] = Some(t);
                true
            }
        },
        Term::App(c, args) => {
            let node = u.node(t);
            node.ctor == *c
                && args.len() == node.args.len()
                && args
                    .iter()
                    .zip(node.args.clone())
                    .all(|(p, a)| matches(u, p, a, b))
        }
    }
}

/// Value of a fully bound pattern, if it lies within the universe.
fn eval(u: &Universe, t: &Term, b: &[Option<TermId>]) -> Option<TermId> {
    match t {
        Term::Var(v) => b[v.index()],
        Term::App(c, args) => {
            let args = args
                .iter()
                .map(|a| eval(u, a, b))
                .collect::<Option<Vec<_>>>()?;
            u.lookup(*c, &args)
        }
    }
}

/// Syntactic equality of two fully bound patterns; needs no universe lookups
/// so it also works for instances deeper than the bound.
fn pattern_eq(u: &Universe, l: &Term, r: &Term, b: &[Option<TermId>]) -> bool {
    match (l, r) {
        (Term::Var(v), other) | (other, Term::Var(v)) => {
            equals_id(u, other, b[v.index()].expect("bound"), b)
        }
        (Term::App(c1, a1), Term::App(c2, a2)) => {
            c1 == c2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| pattern_eq(u, x, y, b))
        }
    }
}

fn equals_id(u: &Universe, pat: &Term, t: TermId, b: &[Option<TermId>]) -> bool {
    match pat {
        Term::Var(v) => b[v.index()] == Some(t),
        Term::App(c, args) => {
            let node = u.node(t);
            node.ctor == *c
                && args.len() == node.args.len()
                && args.iter().zip(&node.args).all(|(p, &a)| equals_id(u, p, a, b))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("clause {0} does not exist or has the wrong kind")]
    BadClause(usize),
    #[error("clause {clause}: substitution has {found} terms for {expected} variables")]
    SubstitutionLength {
        clause: usize,
        expected: usize,
        found: usize,
    },
    #[error("clause {clause}: term for variable `{var}` has the wrong sort")]
    IllSorted { clause: usize, var: String },
    #[error("clause {clause}: instance does not match the justified atom")]
    Mismatch { clause: usize },
    #[error("clause {clause}: an (dis)equality does not hold for this instance")]
    Constraint { clause: usize },
    #[error("an atom is assumed rather than derived")]
    Assumed,
}

/// Re-checks a derivation against the clauses, by direct instantiation.
pub fn replay(problem: &Problem, derivation: &Derivation) -> Result<(), ReplayError> {
    let clause = problem
        .clauses
        .get(derivation.goal)
        .filter(|c| c.is_goal())
        .ok_or(ReplayError::BadClause(derivation.goal))?;
    check_instance(
        problem,
        derivation.goal,
        clause,
        &derivation.substitution,
        &derivation.proofs,
    )?;
    derivation
        .proofs
        .iter()
        .try_for_each(|p| replay_proof(problem, p))
}

fn replay_proof(problem: &Problem, proof: &ProofTree) -> Result<(), ReplayError> {
    match &proof.step {
        ProofStep::Assumed => Err(ReplayError::Assumed),
        ProofStep::Clause {
            clause: ci,
            substitution,
            premises,
        } => {
            let clause = problem
                .clauses
                .get(*ci)
                .filter(|c| !c.is_goal())
                .ok_or(ReplayError::BadClause(*ci))?;
            check_instance(problem, *ci, clause, substitution, premises)?;
            let head = clause.head.as_ref().expect("definite");
            let inst = GroundAtom::new(
                head.pred,
                head.args.iter().map(|t| instantiate(t, substitution)).collect(),
            );
            if inst != proof.atom {
                return Err(ReplayError::Mismatch { clause: *ci });
            }
            premises.iter().try_for_each(|p| replay_proof(problem, p))
        }
    }
}

fn check_instance(
    problem: &Problem,
    ci: usize,
    clause: &Clause,
    subst: &[GroundTerm],
    premises: &[ProofTree],
) -> Result<(), ReplayError> {
    if subst.len() != clause.vars.len() {
        return Err(ReplayError::SubstitutionLength {
            clause: ci,
            expected: clause.vars.len(),
            found: subst.len(),
        });
    }
    for (decl, t) in clause.vars.iter().zip(subst) {
        if !well_sorted(&problem.signature, t, decl.sort) {
            return Err(ReplayError::IllSorted {
                clause: ci,
                var: decl.name.clone(),
            });
        }
    }
    let atoms: Vec<&Atom> = clause.body_atoms().collect();
    if atoms.len() != premises.len() {
        return Err(ReplayError::Mismatch { clause: ci });
    }
    for (a, p) in atoms.iter().zip(premises) {
        let inst = GroundAtom::new(a.pred, a.args.iter().map(|t| instantiate(t, subst)).collect());
        if inst != p.atom {
            return Err(ReplayError::Mismatch { clause: ci });
        }
    }
    for lit in &clause.body {
        let ok = match lit {
            Literal::Atom(_) => true,
            Literal::Eq(l, r) => instantiate(l, subst) == instantiate(r, subst),
            Literal::Diseq(l, r) => instantiate(l, subst) != instantiate(r, subst),
        };
        if !ok {
            return Err(ReplayError::Constraint { clause: ci });
        }
    }
    Ok(())
}

/// Replaces clause variables by their terms.
pub fn instantiate(t: &Term, subst: &[GroundTerm]) -> GroundTerm {
    match t {
        Term::Var(v) => subst[v.index()].clone(),
        Term::App(c, args) => GroundTerm::new(*c, args.iter().map(|a| instantiate(a, subst)).collect()),
    }
}

fn well_sorted(sig: &Signature, t: &GroundTerm, sort: SortId) -> bool {
    t.ctor.index() < sig.num_ctors()
        && sig.ctor_sort(t.ctor) == sort
        && sig.ctor_args(t.ctor).len() == t.args.len()
        && t
            .args
            .iter()
            .zip(sig.ctor_args(t.ctor))
            .all(|(a, &s)| well_sorted(sig, a, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> (ProblemBuilder, CtorId, CtorId) {
        let mut b = ProblemBuilder::new();
        b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
        let z = b.ctor("z");
        let s = b.ctor("s");
        (b, z, s)
    }

    fn num(z: CtorId, s: CtorId, n: usize) -> GroundTerm {
        (0..n).fold(GroundTerm::constant(z), |t, _| GroundTerm::new(s, vec![t]))
    }

    #[test]
    fn universe_sizes() {
        let (b, _, _) = nat();
        let u = Universe::new(b.signature(), 3, GroundLimits::default()).unwrap();
        assert_eq!(u.len(), 4);
        let mut lb = ProblemBuilder::new();
        lb.datatypes(&[
            ("elt", &[("a1", &[]), ("a2", &[])]),
            ("list", &[("nil", &[]), ("cons", &["elt", "list"])]),
        ]);
        let u = Universe::new(lb.signature(), 3, GroundLimits::default()).unwrap();
        // lists of length <= 3 over two letters: 1 + 2 + 4 + 8
        assert_eq!(u.terms_of(lb.sort("list")).len(), 15);
    }

    #[test]
    fn term_cap_is_enforced() {
        let mut b = ProblemBuilder::new();
        b.datatypes(&[("t", &[("leaf", &[]), ("node", &["t", "t"])])]);
        let limits = GroundLimits {
            max_terms: 100,
            max_atoms: 10,
        };
        assert_eq!(
            Universe::new(b.signature(), 5, limits).unwrap_err(),
            GroundError::TooManyTerms(100)
        );
    }

    #[test]
    fn diseq_on_the_only_witness_fails() {
        let (mut b, z, _) = nat();
        let p = b.predicate("p", &["nat"]);
        let q = b.predicate("q", &["nat"]);
        let mut c = b.clause();
        let x = c.var("x", "nat");
        let y = c.var("y", "nat");
        c.atom("p", vec![x.clone()]).atom("q", vec![y.clone()]).diseq(x, y);
        let goal = c.goal();
        b.push(goal);
        let problem = b.build();
        let z = GroundTerm::constant(z);
        let model = GroundModel::from_atoms(
            &problem,
            [GroundAtom::new(p, vec![z.clone()]), GroundAtom::new(q, vec![z])],
        )
        .unwrap();
        assert_eq!(goal_violated(&problem, &model), None);
    }

    #[test]
    fn equality_binds_head_variable() {
        // even(y) :- y = s(s(x)), even(x)
        let (mut b, z, s) = nat();
        let even = b.predicate("even", &["nat"]);
        let fact = b.clause().head("even", vec![Term::constant(z)]);
        b.push(fact);
        let mut c = b.clause();
        let y = c.var("y", "nat");
        let x = c.var("x", "nat");
        let ssx = c.app("s", vec![c.app("s", vec![x.clone()])]);
        c.eq(y.clone(), ssx).atom("even", vec![x]);
        let clause = c.head("even", vec![y]);
        b.push(clause);
        let problem = b.build();
        let m = ground_least_model(&problem, 4).unwrap();
        let evens: Vec<_> = m.atoms().collect();
        assert_eq!(
            evens,
            vec![
                GroundAtom::new(even, vec![num(z, s, 0)]),
                GroundAtom::new(even, vec![num(z, s, 2)]),
                GroundAtom::new(even, vec![num(z, s, 4)]),
            ]
        );
    }

    #[test]
    fn replay_rejects_tampering() {
        let (mut b, z, s) = nat();
        let even = b.predicate("even", &["nat"]);
        let fact = b.clause().head("even", vec![Term::constant(z)]);
        b.push(fact);
        let mut c = b.clause();
        let x = c.var("x", "nat");
        c.atom("even", vec![x.clone()]);
        let ssx = c.app("s", vec![c.app("s", vec![x])]);
        let clause = c.head("even", vec![ssx]);
        b.push(clause);
        let mut c = b.clause();
        c.atom("even", vec![Term::App(s, vec![Term::App(s, vec![Term::constant(z)])])]);
        let goal = c.goal();
        b.push(goal);
        let problem = b.build();
        let m = ground_least_model(&problem, 2).unwrap();
        let d = goal_violated(&problem, &m).expect("even(s(s(z))) is derivable");
        assert_eq!(replay(&problem, &d), Ok(()));

        let mut bad = d.clone();
        bad.proofs[0].atom = GroundAtom::new(even, vec![num(z, s, 4)]);
        assert!(replay(&problem, &bad).is_err());

        let mut assumed = d;
        assumed.proofs[0].step = ProofStep::Assumed;
        assert_eq!(replay(&problem, &assumed), Err(ReplayError::Assumed));
    }
}
