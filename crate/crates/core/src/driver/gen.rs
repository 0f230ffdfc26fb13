use crate::chc::*;

/// List membership and reversal over `k` element constants, with the two
/// goals saying that reversal keeps and does not add members:
///
/// ```text
/// member(x, l1) /\ rev(l1, l2) /\ notMember(x, l2) => false
/// member(x, l2) /\ rev(l1, l2) /\ notMember(x, l1) => false
/// ```
///
/// `rev` uses an accumulator, `notMember` a disequality on elements.
pub fn gen_member_rev(k: usize) -> Problem {
    assert!(k >= 1, "need at least one element");
    let names: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    let elts: Vec<(&str, &[&str])> = names.iter().map(|n| (n.as_str(), &[][..])).collect();
    let mut b = ProblemBuilder::new();
    let lists: [(&str, &[&str]); 2] = [("nil", &[]), ("cons", &["elt", "list"])];
    b.datatypes(&[("elt", elts.as_slice()), ("list", &lists)]);
    b.predicate("member", &["elt", "list"]);
    b.predicate("notMember", &["elt", "list"]);
    b.predicate("rev", &["list", "list"]);
    b.predicate("revAcc", &["list", "list", "list"]);

    // member(x, cons(x, l))
    let mut c = b.clause();
    let x = c.var("x", "elt");
    let l = c.var("l", "list");
    let cell = c.app("cons", vec![x.clone(), l]);
    let cl = c.head("member", vec![x, cell]);
    b.push(cl);

    // member(x, l) => member(x, cons(y, l))
    let mut c = b.clause();
    let x = c.var("x", "elt");
    let y = c.var("y", "elt");
    let l = c.var("l", "list");
    c.atom("member", vec![x.clone(), l.clone()]);
    let cell = c.app("cons", vec![y, l]);
    let cl = c.head("member", vec![x, cell]);
    b.push(cl);

    // notMember(x, nil)
    let mut c = b.clause();
    let x = c.var("x", "elt");
    let nil = c.app("nil", vec![]);
    let cl = c.head("notMember", vec![x, nil]);
    b.push(cl);

    // x != y /\ notMember(x, l) => notMember(x, cons(y, l))
    let mut c = b.clause();
    let x = c.var("x", "elt");
    let y = c.var("y", "elt");
    let l = c.var("l", "list");
    c.diseq(x.clone(), y.clone());
    c.atom("notMember", vec![x.clone(), l.clone()]);
    let cell = c.app("cons", vec![y, l]);
    let cl = c.head("notMember", vec![x, cell]);
    b.push(cl);

    // revAcc(nil, a, a)
    let mut c = b.clause();
    let a = c.var("a", "list");
    let nil = c.app("nil", vec![]);
    let cl = c.head("revAcc", vec![nil, a.clone(), a]);
    b.push(cl);

    // revAcc(l, cons(x, a), r) => revAcc(cons(x, l), a, r)
    let mut c = b.clause();
    let x = c.var("x", "elt");
    let l = c.var("l", "list");
    let a = c.var("a", "list");
    let r = c.var("r", "list");
    let acc = c.app("cons", vec![x.clone(), a.clone()]);
    c.atom("revAcc", vec![l.clone(), acc, r.clone()]);
    let cell = c.app("cons", vec![x, l]);
    let cl = c.head("revAcc", vec![cell, a, r]);
    b.push(cl);

    // revAcc(l, nil, r) => rev(l, r)
    let mut c = b.clause();
    let l = c.var("l", "list");
    let r = c.var("r", "list");
    let nil = c.app("nil", vec![]);
    c.atom("revAcc", vec![l.clone(), nil, r.clone()]);
    let cl = c.head("rev", vec![l, r]);
    b.push(cl);

    for swap in [false, true] {
        let mut c = b.clause();
        let x = c.var("x", "elt");
        let l1 = c.var("l1", "list");
        let l2 = c.var("l2", "list");
        let (has, lacks) = if swap { (l2.clone(), l1.clone()) } else { (l1.clone(), l2.clone()) };
        c.atom("member", vec![x.clone(), has]);
        c.atom("rev", vec![l1, l2]);
        c.atom("notMember", vec![x, lacks]);
        let cl = c.goal();
        b.push(cl);
    }
    b.build()
}
