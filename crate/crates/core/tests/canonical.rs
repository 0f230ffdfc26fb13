mod common;

use regmod::search::{enumerate_canonical, SearchConfig};

#[test]
fn one_representative_per_isomorphism_class() {
    if let Err(e) = common::canonical_check() {
        panic!("{e}");
    }
}

#[test]
fn class_counts_for_nat() {
    let sig = common::nat();
    let counts: Vec<usize> = (1..=5)
        .map(|n| enumerate_canonical(&sig, &SearchConfig::uniform(&sig, n)).count())
        .collect();
    // accessible unary automata up to renaming: a tail and a cycle, summed over sizes
    let expected: Vec<usize> = (1..=5usize).map(|n| (1..=n).sum()).collect();
    assert_eq!(counts, expected);
}

#[test]
fn raw_enumeration_is_every_total_map() {
    let sig = common::nat();
    for n in 1..=4u32 {
        let mut config = SearchConfig::uniform(&sig, n);
        config.symmetry_breaking = false;
        let all: Vec<_> = enumerate_canonical(&sig, &config).map(Result::unwrap).collect();
        assert_eq!(all.len(), n.pow(n + 1) as usize);
        let distinct: std::collections::HashSet<_> = all.iter().map(|a| a.targets().to_vec()).collect();
        assert_eq!(distinct.len(), all.len());
    }
}

#[test]
fn every_signature_yields_verified_automata() {
    for (name, sig) in common::signatures() {
        let config = SearchConfig::uniform(&sig, 2);
        let mut seen = std::collections::HashSet::new();
        for a in enumerate_canonical(&sig, &config) {
            let a = a.unwrap();
            assert!(seen.insert(a.targets().to_vec()), "{name}: duplicate");
        }
        assert!(!seen.is_empty(), "{name}");
    }
}
