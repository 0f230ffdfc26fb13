use std::collections::HashMap;

use crate::chc::*;

/// Symbols our programs define themselves; predicates with these names are escaped.
const RESERVED: &[&str] = &[
    "not", "rule", "state", "stateType", "diffApprox", "nonEmpty", "many", "live", "reachAt",
    "reached", "tm", "dom", "violated", "found",
];

/// ASP spellings of constructor, predicate and sort names.
///
/// A name is kept when it is already a plain lowercase identifier, is not
/// reserved and does not start with its escape prefix. Otherwise it becomes
/// the prefix followed by the name with `_` doubled and every other
/// non-alphanumeric character written `_uXX_`, which keeps the mapping
/// injective.
#[derive(Debug, Clone)]
pub struct Names {
    ctors: Vec<String>,
    preds: Vec<String>,
    sorts: Vec<String>,
    ctor_rev: HashMap<String, CtorId>,
    pred_rev: HashMap<String, PredId>,
}

fn plain(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub fn sanitize(name: &str, prefix: &str, reserved: bool) -> String {
    if plain(name) && !reserved && !name.starts_with(prefix) {
        return name.to_string();
    }
    let mut out = prefix.to_string();
    for c in name.chars() {
        match c {
            '_' => out.push_str("__"),
            c if c.is_ascii_alphanumeric() => out.push(c),
            c => out.push_str(&format!("_u{:x}_", c as u32)),
        }
    }
    out
}

impl Names {
    pub fn new(problem: &Problem) -> Names {
        let sig = &problem.signature;
        let ctors: Vec<String> = sig
            .ctor_ids()
            .map(|c| sanitize(sig.ctor_name(c), "c_", sig.ctor_name(c) == "not"))
            .collect();
        let preds: Vec<String> = problem
            .pred_ids()
            .map(|p| {
                let n = problem.pred_name(p);
                sanitize(n, "p_", RESERVED.contains(&n))
            })
            .collect();
        let sorts = sig
            .sort_ids()
            .map(|s| sanitize(sig.sort_name(s), "t_", sig.sort_name(s) == "not"))
            .collect();
        let ctor_rev = ctors.iter().enumerate().map(|(i, n)| (n.clone(), CtorId(i as u32))).collect();
        let pred_rev = preds.iter().enumerate().map(|(i, n)| (n.clone(), PredId(i as u32))).collect();
        Names {
            ctors,
            preds,
            sorts,
            ctor_rev,
            pred_rev,
        }
    }

    pub fn ctor(&self, c: CtorId) -> &str {
        &self.ctors[c.index()]
    }

    pub fn pred(&self, p: PredId) -> &str {
        &self.preds[p.index()]
    }

    pub fn sort(&self, s: SortId) -> &str {
        &self.sorts[s.index()]
    }

    pub fn ctor_by_name(&self, name: &str) -> Option<CtorId> {
        self.ctor_rev.get(name).copied()
    }

    pub fn pred_by_name(&self, name: &str) -> Option<PredId> {
        self.pred_rev.get(name).copied()
    }
}
