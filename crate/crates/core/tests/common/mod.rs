#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regmod::asp::{self, AspAnswer, SolverConfig};
use regmod::automaton::{inhabitation, PredicateTables, State, TreeAutomaton};
use regmod::chc::ground::{ground_least_model, instantiate, replay, GroundAtom, GroundLimits, GroundTerm, Universe};
use regmod::chc::{Literal, Problem, ProblemBuilder, Signature};
use regmod::driver::{gen_member_rev, solve, Backend, EventVerdict, Phase, SolveOptions, SolveOutcome};
use regmod::frontend::parse_problem;
use regmod::interp::{check_model, interpret_atom};
use regmod::search::{enumerate_canonical, find_counterexample, search_model, SearchConfig};

pub type Check = Result<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Sat,
    Unsat,
    Unknown,
}

pub const FIXTURES: &[(&str, Expect)] = &[
    ("even_odd_plus", Expect::Sat),
    ("even_unsat", Expect::Unsat),
    ("odd_sum_unsat", Expect::Unsat),
    ("tree_parity", Expect::Sat),
    ("list_length", Expect::Sat),
    ("distinct", Expect::Sat),
    ("diagonal", Expect::Unknown),
    ("nested_unsat", Expect::Unsat),
];

pub fn fixture(name: &str) -> Problem {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.smt2"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_problem(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn clingo() -> Option<SolverConfig> {
    asp::solver_available(Path::new("clingo")).then(|| SolverConfig::new("clingo"))
}

pub fn native(max_bound: u32) -> SolveOptions {
    SolveOptions {
        max_bound,
        ..SolveOptions::default()
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// even/odd/plus

fn transitions(a: &TreeAutomaton) -> BTreeSet<(u32, Vec<u32>, u32)> {
    a.transitions()
        .map(|(c, args, q)| (c.0, args.iter().map(|s| s.0).collect(), q.0))
        .collect()
}

fn tuples(problem: &Problem, t: &PredicateTables) -> BTreeSet<(String, Vec<u32>)> {
    t.iter()
        .map(|(p, tuple)| (problem.pred_name(p).to_string(), tuple.iter().map(|s| s.0).collect()))
        .collect()
}

pub fn even_odd_plus_check() -> Check {
    let p = fixture("even_odd_plus");
    let start = Instant::now();
    let (outcome, log) = solve(&p, &native(8)).map_err(|e| e.to_string())?;
    let wall = start.elapsed();
    ensure(wall < Duration::from_secs(5), || format!("took {wall:?}"))?;
    let SolveOutcome::Sat {
        automaton, tables, states_used, ..
    } = outcome
    else {
        return Err(format!("expected Sat, got {outcome:?}"));
    };
    ensure(states_used == [2], || format!("states {states_used:?}"))?;
    let at_one: Vec<_> = log.events.iter().filter(|e| e.bound == 1).collect();
    ensure(
        at_one.iter().any(|e| e.phase == Phase::Model && e.verdict == EventVerdict::NotFound),
        || format!("no failed model search at bound 1 in {:?}", log.events),
    )?;

    let (z, s) = (p.signature.ctor_by_name("z").unwrap().0, p.signature.ctor_by_name("s").unwrap().0);
    let got_t = transitions(&automaton);
    let got_p = tuples(&p, &tables);
    let matched = [(1, 2), (2, 1)].into_iter().any(|(e, o)| {
        let want_t = BTreeSet::from([(z, vec![], e), (s, vec![e], o), (s, vec![o], e)]);
        let want_p: BTreeSet<(String, Vec<u32>)> = [
            ("odd", vec![o]),
            ("even", vec![e]),
            ("plus", vec![e, o, o]),
            ("plus", vec![o, e, o]),
            ("plus", vec![o, o, e]),
            ("plus", vec![e, e, e]),
        ]
        .into_iter()
        .map(|(n, t)| (n.to_string(), t))
        .collect();
        got_t == want_t && got_p == want_p
    });
    ensure(matched, || format!("model differs: {got_t:?} {got_p:?}"))?;
    Ok(format!("Sat with 2 states in {:.3}s", wall.as_secs_f64()))
}

// ---------------------------------------------------------------------------
// member/rev

pub fn member_rev_check(k: usize, limit: Duration) -> Check {
    let p = gen_member_rev(k);
    let opts = SolveOptions {
        time_limit: Some(limit),
        ..native(8)
    };
    let start = Instant::now();
    let (outcome, _) = solve(&p, &opts).map_err(|e| e.to_string())?;
    let wall = start.elapsed();
    match outcome {
        SolveOutcome::Sat { states_used, .. } if wall < limit => {
            Ok(format!("Sat with {states_used:?} states in {:.3}s", wall.as_secs_f64()))
        }
        other => Err(format!("{other:?} after {:.3}s", wall.as_secs_f64())),
    }
}

/// Solves through the command line twice, with and without symmetry
/// breaking, and compares the reported counts.
pub fn count_collapse_check(bin: &Path) -> Option<Check> {
    clingo()?;
    Some(count_collapse(bin))
}

fn count_collapse(bin: &Path) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("member_rev_2.smt2");
    std::fs::write(&file, regmod::frontend::print_problem(&gen_member_rev(2))).map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for sb in [true, false] {
        let mut cmd = Command::new(bin);
        cmd.arg("solve").arg(&file).args(["--backend", "asp", "--count-models"]);
        if !sb {
            cmd.arg("--no-symmetry-breaking");
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure(out.status.code() == Some(0), || format!("exit {:?}: {stderr}", out.status.code()))?;
        let line = stderr
            .lines()
            .find(|l| l.starts_with("Models with"))
            .ok_or_else(|| format!("no count in {stderr}"))?;
        let n = line.rsplit(": ").next().unwrap_or("");
        let exact = !n.ends_with('+');
        let n: u64 = n.trim_end_matches('+').parse().map_err(|_| format!("bad count line {line}"))?;
        counts.push((n, exact));
    }
    let ((with, with_exact), (without, _)) = (counts[0], counts[1]);
    ensure(with_exact && with > 0, || format!("count with symmetry breaking not exact: {with}"))?;
    let ratio = without as f64 / with as f64;
    ensure(ratio >= 1000.0, || format!("{without} / {with} = {ratio:.1}"))?;
    Ok(format!("{with} models vs {without}, ratio {ratio:.0}"))
}

// ---------------------------------------------------------------------------
// unsat

pub fn toy_unsat_check() -> Check {
    let p = fixture("even_unsat");
    let start = Instant::now();
    let (outcome, _) = solve(&p, &native(8)).map_err(|e| e.to_string())?;
    let wall = start.elapsed();
    let SolveOutcome::Unsat(d) = outcome else {
        return Err(format!("expected Unsat, got {outcome:?}"));
    };
    replay(&p, &d).map_err(|e| format!("replay: {e}"))?;
    ensure(wall < Duration::from_secs(1), || format!("took {wall:?}"))?;
    Ok(format!("Unsat, derivation replays, {:.3}s", wall.as_secs_f64()))
}

// ---------------------------------------------------------------------------
// soundness

/// Every ground instance of a goal body, over terms of depth at most `depth`,
/// that is true when atoms are read through the automaton.
pub fn goal_instance_under(
    problem: &Problem,
    a: &TreeAutomaton,
    tables: &PredicateTables,
    depth: usize,
) -> Option<(usize, Vec<GroundTerm>)> {
    let universe = Universe::new(&problem.signature, depth, GroundLimits::default()).expect("small universe");
    let terms: Vec<Vec<GroundTerm>> = problem
        .signature
        .sort_ids()
        .map(|s| universe.terms_of(s).iter().map(|&t| universe.term(t)).collect())
        .collect();
    for (gi, goal) in problem.goals() {
        let domains: Vec<&[GroundTerm]> = goal.vars.iter().map(|v| terms[v.sort.index()].as_slice()).collect();
        let mut idx = vec![0usize; domains.len()];
        if domains.iter().any(|d| d.is_empty()) {
            continue;
        }
        loop {
            let subst: Vec<GroundTerm> = idx.iter().zip(&domains).map(|(&i, d)| d[i].clone()).collect();
            let holds = goal.body.iter().all(|l| match l {
                Literal::Atom(at) => interpret_atom(
                    a,
                    tables,
                    &GroundAtom::new(at.pred, at.args.iter().map(|t| instantiate(t, &subst)).collect()),
                ),
                Literal::Eq(l, r) => instantiate(l, &subst) == instantiate(r, &subst),
                Literal::Diseq(l, r) => instantiate(l, &subst) != instantiate(r, &subst),
            });
            if holds {
                return Some((gi, subst));
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    None
}

/// The three soundness properties of a claimed model.
pub fn sound_model(problem: &Problem, a: &TreeAutomaton, tables: &PredicateTables, depth: usize) -> Result<(), String> {
    ensure(check_model(a, tables, problem).is_model(), || "check_model rejects".into())?;
    let least = ground_least_model(problem, depth).map_err(|e| e.to_string())?;
    for atom in least.atoms() {
        ensure(interpret_atom(a, tables, &atom), || {
            format!("derivable atom {} is false", atom.display(problem))
        })?;
    }
    if let Some((g, subst)) = goal_instance_under(problem, a, tables, depth) {
        let shown: Vec<String> = subst.iter().map(|t| t.display(&problem.signature).to_string()).collect();
        return Err(format!("goal {g} holds for {shown:?}"));
    }
    Ok(())
}

pub fn soundness_check() -> Check {
    let mut backends = vec![("native", Backend::Native)];
    if let Some(cfg) = clingo() {
        backends.push(("asp", Backend::Asp(cfg)));
    }
    let mut models = 0;
    for (name, _) in FIXTURES {
        let p = fixture(name);
        for (bname, backend) in &backends {
            let opts = SolveOptions {
                backend: backend.clone(),
                ..native(4)
            };
            let (outcome, _) = solve(&p, &opts).map_err(|e| format!("{name}/{bname}: {e}"))?;
            if let SolveOutcome::Sat { automaton, tables, .. } = &outcome {
                sound_model(&p, automaton, tables, 4).map_err(|e| format!("{name}/{bname}: {e}"))?;
                models += 1;
            }
        }
    }
    Ok(format!("{models} models, no violations"))
}

// ---------------------------------------------------------------------------
// canonical enumeration over nat

pub fn nat() -> Signature {
    let mut b = ProblemBuilder::new();
    b.datatypes(&[("nat", &[("z", &[]), ("s", &["nat"])])]);
    b.build().signature
}

/// z target and successor table, states 0-based.
type NatMap = (usize, Vec<usize>);

fn accessible(m: &NatMap) -> Vec<usize> {
    let mut seen = vec![m.0];
    let mut q = m.0;
    while !seen.contains(&m.1[q]) {
        q = m.1[q];
        seen.push(q);
    }
    seen
}

fn restrict(m: &NatMap) -> NatMap {
    let keep = accessible(m);
    let pos = |q: usize| keep.iter().position(|&k| k == q).unwrap();
    (pos(m.0), keep.iter().map(|&q| pos(m.1[q])).collect())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Class key: smallest image under all renamings.
fn iso_key(m: &NatMap) -> NatMap {
    let n = m.1.len();
    permutations(n)
        .into_iter()
        .map(|pi| {
            let mut succ = vec![0; n];
            for q in 0..n {
                succ[pi[q]] = pi[m.1[q]];
            }
            (pi[m.0], succ)
        })
        .min()
        .unwrap()
}

fn from_automaton(a: &TreeAutomaton, sig: &Signature) -> NatMap {
    let (z, s) = (sig.ctor_by_name("z").unwrap(), sig.ctor_by_name("s").unwrap());
    let n = a.state_counts()[0];
    (
        a.target(z, &[]).index(),
        (1..=n).map(|q| a.target(s, &[State(q)]).index()).collect(),
    )
}

pub fn canonical_check() -> Check {
    let start = Instant::now();
    let sig = nat();
    let mut classes = BTreeMap::new();
    let mut raw = 0;
    let mut junk = Vec::new();
    for k in 1..=3usize {
        let total = k.pow(k as u32 + 1);
        for code in 0..total {
            let mut c = code;
            let mut digit = || {
                let d = c % k;
                c /= k;
                d
            };
            let m: NatMap = (digit(), (0..k).map(|_| digit()).collect());
            raw += 1;
            if accessible(&m).len() == k {
                classes.entry(iso_key(&m)).or_insert(m);
            } else {
                junk.push(m);
            }
        }
    }
    for m in &junk {
        let r = restrict(m);
        ensure(classes.contains_key(&iso_key(&r)), || format!("{m:?} trims to no class"))?;
    }
    let config = SearchConfig::uniform(&sig, 3);
    let mut keys = BTreeSet::new();
    let mut produced = 0;
    for a in enumerate_canonical(&sig, &config) {
        let a = a.map_err(|e| e.to_string())?;
        let m = restrict(&from_automaton(&a, &sig));
        produced += 1;
        ensure(keys.insert(iso_key(&m)), || format!("two outputs in the class of {m:?}"))?;
    }
    ensure(produced == classes.len(), || format!("{produced} outputs for {} classes", classes.len()))?;
    ensure(keys.iter().eq(classes.keys()), || "output classes differ from oracle classes".into())?;
    let wall = start.elapsed();
    ensure(wall < Duration::from_secs(10), || format!("took {wall:?}"))?;
    Ok(format!("{raw} raw maps, {} classes, {produced} outputs, {:.3}s", classes.len(), wall.as_secs_f64()))
}

// ---------------------------------------------------------------------------
// backend parity

pub fn parity_problems() -> Vec<(String, Problem, u32)> {
    let mut v: Vec<(String, Problem, u32)> = FIXTURES.iter().map(|(n, _)| (n.to_string(), fixture(n), 3)).collect();
    v.push(("member_rev_1".into(), gen_member_rev(1), 3));
    v.push(("member_rev_2".into(), gen_member_rev(2), 4));
    v
}

pub fn parity_check(cfg: &SolverConfig) -> Check {
    let mut checked = 0;
    for (name, p, max) in parity_problems() {
        let sorts = p.signature.num_sorts();
        for n in 1..=max {
            let bounds = vec![n; sorts];
            let native = search_model(&p, &SearchConfig::uniform(&p.signature, n))
                .map_err(|e| e.to_string())?
                .is_some();
            for sb in [true, false] {
                if !sb && n > 3 {
                    continue;
                }
                let asp = match asp::solve_model(&p, &bounds, sb, cfg).map_err(|e| format!("{name}@{n}: {e}"))? {
                    AspAnswer::Found(_) => true,
                    AspAnswer::None => false,
                    AspAnswer::Unknown(why) => return Err(format!("{name}@{n}: solver gave up: {why}")),
                };
                ensure(native == asp, || format!("{name} model@{n} sb={sb}: native {native}, asp {asp}"))?;
                checked += 1;
            }
        }
        for depth in 0..=3 {
            let native = find_counterexample(&p, depth).map_err(|e| e.to_string())?;
            let asp = match asp::solve_counterexample(&p, depth, cfg).map_err(|e| format!("{name}@{depth}: {e}"))? {
                AspAnswer::Found(d) => {
                    replay(&p, &d).map_err(|e| format!("{name}@{depth}: {e}"))?;
                    true
                }
                AspAnswer::None => false,
                AspAnswer::Unknown(why) => return Err(format!("{name}@{depth}: solver gave up: {why}")),
            };
            ensure(native.is_some() == asp, || {
                format!("{name} counterexample@{depth}: native {}, asp {asp}", native.is_some())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (problem, bound) pairs agree"))
}

// ---------------------------------------------------------------------------
// diffApprox

pub fn signatures() -> Vec<(&'static str, Signature)> {
    let mut list = ProblemBuilder::new();
    list.datatypes(&[
        ("nat", &[("z", &[]), ("s", &["nat"])]),
        ("list", &[("nil", &[]), ("cons", &["nat", "list"])]),
    ]);
    let mut tree = ProblemBuilder::new();
    tree.datatypes(&[("tree", &[("leaf", &[]), ("node", &["tree", "tree"])])]);
    vec![("nat", nat()), ("list", list.build().signature), ("tree", tree.build().signature)]
}

pub fn random_automaton(sig: &Signature, rng: &mut impl Rng, max_states: u32) -> TreeAutomaton {
    let states: Vec<u32> = sig.sort_ids().map(|_| rng.gen_range(1..=max_states)).collect();
    TreeAutomaton::from_fn(sig, &states, |c, _| State(rng.gen_range(1..=states[sig.ctor_sort(c).index()])))
}

pub fn parity_automaton(sig: &Signature) -> TreeAutomaton {
    TreeAutomaton::from_fn(sig, &[2], |_, args| match args {
        [State(2)] => State(1),
        _ => State(2),
    })
}

/// Distinct terms must never land in a state pair judged equal.
pub fn diff_approx_violations(sig: &Signature, a: &TreeAutomaton, depth: usize) -> Vec<String> {
    let universe = Universe::new(sig, depth, GroundLimits::default()).expect("small universe");
    let inh = inhabitation(a);
    let mut bad = Vec::new();
    for sort in sig.sort_ids() {
        let runs: Vec<State> = universe.terms_of(sort).iter().map(|&t| a.run(&universe.term(t))).collect();
        let mut pairs = HashSet::new();
        for (i, &q1) in runs.iter().enumerate() {
            for &q2 in &runs[i + 1..] {
                pairs.insert((q1, q2));
                pairs.insert((q2, q1));
            }
        }
        for (q1, q2) in pairs {
            if !inh.diff_approx(sort, q1, q2) {
                bad.push(format!("{}: {q1} {q2}", sig.sort_name(sort)));
            }
        }
    }
    bad
}

pub fn diff_approx_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1ff);
    let mut automata = 0;
    let nat_sig = nat();
    let mut cases = vec![(nat_sig.clone(), parity_automaton(&nat_sig))];
    for (_, sig) in signatures() {
        for _ in 0..3 {
            let a = random_automaton(&sig, &mut rng, 3);
            cases.push((sig.clone(), a));
        }
    }
    for (sig, a) in &cases {
        let bad = diff_approx_violations(sig, a, 4);
        ensure(bad.is_empty(), || format!("violations: {bad:?}"))?;
        automata += 1;
    }
    Ok(format!("{automata} automata, all term pairs to depth 4"))
}

// ---------------------------------------------------------------------------
// golden files

pub const LISTING: [&str; 6] = [
    "even(Q0) :- rule(z, Q0).",
    "even(Q2) :- odd(Q1), rule(s(Q1), Q2).",
    "odd(Q2) :- even(Q1), rule(s(Q1), Q2).",
    "plus(Q1, Q0, Q0) :- rule(z, Q1), state(Q0).",
    "plus(Q6, Q3, Q7) :- plus(Q1, Q3, Q5), rule(s(Q1), Q6), rule(s(Q5), Q7).",
    ":- even(Q0), even(Q1), plus(Q0, Q1, Q2), odd(Q2).",
];

pub fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Lines after the last predicate choice rule.
pub fn clause_section(text: &str) -> Vec<&str> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines.iter().rposition(|l| l.starts_with('{')).map_or(0, |i| i + 1);
    lines[start..].to_vec()
}

pub fn golden_check() -> Check {
    let p = fixture("even_odd_plus");
    for (file, sb) in [("even_odd_plus_2.lp", false), ("even_odd_plus_2_sb.lp", true)] {
        let emitted = asp::emit_model_search(&p, &[2], sb).text;
        ensure(emitted == golden(file), || format!("{file} differs from emitted program"))?;
    }
    let text = golden("even_odd_plus_2.lp");
    let section = clause_section(&text);
    ensure(section == LISTING, || format!("clause section {section:?}"))?;
    Ok("byte-identical, clause section matches the listing".into())
}
