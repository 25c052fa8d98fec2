use std::collections::BTreeSet;

use proptest::prelude::*;
use sonet_core::foundations::{find_cycle, is_acyclic, is_acyclic_by_toposort, topological_order, transitive_closure};
use sonet_core::{node_set, NodeSet, Relation, SetSequence};

fn relation(max_nodes: usize) -> impl Strategy<Value = Relation> {
    (1..=max_nodes)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=2 * n)))
        .prop_map(|(n, pairs)| {
            let name = |i: usize| format!("x{i}");
            Relation::new((0..n).map(name).collect(), pairs.into_iter().map(|(a, b)| (name(a), name(b)))).unwrap()
        })
}

/// Pairs `(x, y)` with a nonempty path from `x` to `y`, by depth-first search.
fn paths(r: &Relation) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for x in r.universe() {
        let mut stack: Vec<&String> = vec![x];
        let mut seen = NodeSet::new();
        while let Some(a) = stack.pop() {
            for (_, b) in r.pairs().iter().filter(|(p, _)| p == a) {
                if seen.insert(b.clone()) {
                    out.insert((x.clone(), b.clone()));
                    stack.push(b);
                }
            }
        }
    }
    out
}

fn set_sequence() -> impl Strategy<Value = (SetSequence, NodeSet)> {
    let item = prop::collection::btree_set(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 0..4)
        .prop_map(node_set);
    (prop::collection::vec(item.clone(), 0..6), item).prop_map(|(v, x)| (SetSequence(v), x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closure_is_the_path_relation(r in relation(12)) {
        let c = transitive_closure(&r);
        prop_assert_eq!(c.pairs(), &paths(&r));
        prop_assert!(c.is_transitive());
        prop_assert!(r.is_subset(&c));
    }

    #[test]
    fn acyclicity_checks_agree(r in relation(12)) {
        let c = transitive_closure(&r);
        let diagonal_empty = c.is_irreflexive();
        prop_assert_eq!(is_acyclic(&r), diagonal_empty);
        prop_assert_eq!(is_acyclic_by_toposort(&r), diagonal_empty);
        prop_assert_eq!(topological_order(&r).is_some(), diagonal_empty);
        match find_cycle(&r) {
            None => prop_assert!(diagonal_empty),
            Some(cycle) => {
                prop_assert!(!diagonal_empty);
                // the repeated node opens and closes the witness
                prop_assert_eq!(cycle.first(), cycle.last());
                for w in cycle.windows(2) {
                    prop_assert!(r.contains(&w[0], &w[1]));
                }
            }
        }
        if let Some(order) = topological_order(&r) {
            let pos = |x: &String| order.iter().position(|y| y == x).unwrap();
            for (x, y) in r.pairs() {
                prop_assert!(pos(x) < pos(y));
            }
        }
        if diagonal_empty {
            prop_assert!(c.is_irreflexive() && c.is_transitive());
        }
    }

    #[test]
    fn closure_is_monotone(r in relation(10), extra in prop::collection::vec((0usize..10, 0usize..10), 0..6)) {
        let universe = r.universe().clone();
        let n = universe.len();
        let more = r.pairs().iter().cloned().chain(
            extra.into_iter().map(|(a, b)| (format!("x{}", a % n), format!("x{}", b % n))),
        );
        let q = Relation::new(universe, more).unwrap();
        prop_assert!(r.is_subset(&q));
        prop_assert!(transitive_closure(&r).is_subset(&transitive_closure(&q)));
    }

    #[test]
    fn compact_restriction_drops_empty_sets((s, x) in set_sequence()) {
        let plain = s.restrict(&x);
        prop_assert_eq!(plain.len(), s.len());
        let expected: Vec<NodeSet> = plain.0.into_iter().filter(|a| !a.is_empty()).collect();
        prop_assert_eq!(s.restrict_compact(&x).0, expected);
        prop_assert!(s.restrict_compact(&x).occurring().is_subset(&x));
    }
}
