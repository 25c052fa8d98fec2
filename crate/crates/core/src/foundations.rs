//! Finite relations, transitive closure, acyclicity and sequences of sets.
//!
//! Node identifiers are plain strings; every set in this crate is a
//! `BTreeSet`, so iteration order (and therefore every printed result) is
//! lexicographic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A finite set of node identifiers.
pub type NodeSet = BTreeSet<String>;

/// Builds a [`NodeSet`] from anything string-like.
pub fn node_set<I, S>(items: I) -> NodeSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pair ({0}, {1}) has an endpoint outside the universe")]
pub struct PairOutsideUniverse(pub String, pub String);

/// A binary relation over a finite universe.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    universe: NodeSet,
    pairs: BTreeSet<(String, String)>,
}

impl Relation {
    pub fn new(
        universe: NodeSet,
        pairs: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, PairOutsideUniverse> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        for (x, y) in &pairs {
            if !universe.contains(x) || !universe.contains(y) {
                return Err(PairOutsideUniverse(x.clone(), y.clone()));
            }
        }
        Ok(Self { universe, pairs })
    }

    /// Relation whose universe is exactly the set of endpoints.
    pub fn from_pairs<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let pairs: BTreeSet<(String, String)> =
            pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        let universe = pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        Self { universe, pairs }
    }

    pub fn universe(&self) -> &NodeSet {
        &self.universe
    }

    pub fn pairs(&self) -> &BTreeSet<(String, String)> {
        &self.pairs
    }

    pub fn contains(&self, x: &str, y: &str) -> bool {
        self.pairs.contains(&(x.to_owned(), y.to_owned()))
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    fn successors(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for x in &self.universe {
            succ.entry(x.as_str()).or_default();
        }
        for (x, y) in &self.pairs {
            succ.entry(x.as_str()).or_default().push(y.as_str());
        }
        succ
    }

    pub fn is_irreflexive(&self) -> bool {
        self.pairs.iter().all(|(x, y)| x != y)
    }

    pub fn is_transitive(&self) -> bool {
        let succ = self.successors();
        self.pairs.iter().all(|(x, y)| {
            succ[y.as_str()]
                .iter()
                .all(|z| self.pairs.contains(&(x.clone(), (*z).to_owned())))
        })
    }
}

/// `R⁺`: one forward search per source node.
pub fn transitive_closure(r: &Relation) -> Relation {
    let succ = r.successors();
    let mut pairs = BTreeSet::new();
    for start in &r.universe {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut queue: VecDeque<&str> = succ[start.as_str()].iter().copied().collect();
        while let Some(y) = queue.pop_front() {
            if seen.insert(y) {
                queue.extend(succ[y].iter().copied());
            }
        }
        pairs.extend(seen.into_iter().map(|y| (start.clone(), y.to_owned())));
    }
    Relation {
        universe: r.universe.clone(),
        pairs,
    }
}

/// True iff `R⁺ ∩ id = ∅`.
pub fn is_acyclic(r: &Relation) -> bool {
    transitive_closure(r).is_irreflexive()
}

/// Kahn's algorithm; an independent route to the same answer as [`is_acyclic`].
pub fn is_acyclic_by_toposort(r: &Relation) -> bool {
    topological_order(r).is_some()
}

/// A topological order of the universe (lexicographically smallest ready node first),
/// or `None` when the relation has a cycle.
pub fn topological_order(r: &Relation) -> Option<Vec<String>> {
    let mut indegree: BTreeMap<&str, usize> = r.universe.iter().map(|x| (x.as_str(), 0)).collect();
    for (_, y) in &r.pairs {
        *indegree.get_mut(y.as_str()).expect("endpoint in universe") += 1;
    }
    let succ = r.successors();
    let mut ready: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(x, _)| *x)
        .collect();
    let mut order = Vec::with_capacity(r.universe.len());
    while let Some(x) = ready.pop_first() {
        order.push(x.to_owned());
        for y in &succ[x] {
            let d = indegree.get_mut(y).expect("endpoint in universe");
            *d -= 1;
            if *d == 0 {
                ready.insert(y);
            }
        }
    }
    (order.len() == r.universe.len()).then_some(order)
}

/// A witness cycle `[x, .., x]` with the repeated node first, or `None`.
///
/// The start is the smallest node lying on a cycle; each following node is
/// the smallest successor from which the start can still be reached through
/// unused nodes. The choice is deterministic for a given relation.
pub fn find_cycle(r: &Relation) -> Option<Vec<String>> {
    let closure = transitive_closure(r);
    let start = r.universe.iter().find(|x| closure.contains(x, x))?;
    let succ = r.successors();

    let reaches_start = |from: &str, used: &BTreeSet<&str>| -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for &y in &succ[x] {
                if y == start {
                    return true;
                }
                if !used.contains(y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    };

    let mut path: Vec<&str> = vec![start.as_str()];
    let mut used: BTreeSet<&str> = BTreeSet::from([start.as_str()]);
    loop {
        let current = *path.last().expect("nonempty path");
        let mut options: Vec<&str> = succ[current].clone();
        options.sort_unstable();
        let next = options.into_iter().find(|&y| {
            y == start.as_str() || (!used.contains(y) && reaches_start(y, &used))
        })?;
        path.push(next);
        if next == start.as_str() {
            return Some(path.into_iter().map(str::to_owned).collect());
        }
        used.insert(next);
    }
}

/// A finite sequence of finite sets; the empty sequence is `λ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetSequence(pub Vec<NodeSet>);

impl SetSequence {
    pub fn new(items: Vec<NodeSet>) -> Self {
        Self(items)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeSet> {
        self.0.iter()
    }

    /// `⋃σ`.
    pub fn occurring(&self) -> NodeSet {
        self.0.iter().flatten().cloned().collect()
    }

    /// `σ|_X`: element-wise intersection, empty sets kept.
    pub fn restrict(&self, x: &NodeSet) -> SetSequence {
        SetSequence(self.0.iter().map(|s| s.intersection(x).cloned().collect()).collect())
    }

    /// `σ↾_X`: restriction with every empty set dropped.
    pub fn restrict_compact(&self, x: &NodeSet) -> SetSequence {
        SetSequence(
            self.0
                .iter()
                .map(|s| s.intersection(x).cloned().collect::<NodeSet>())
                .filter(|s| !s.is_empty())
                .collect(),
        )
    }
}

/// Writes a set as `{a,b}`.
/// Orders identifiers so that embedded numbers compare by value (`r7` before `r11`).
pub fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, xa), (db, xb)) in ca.iter().zip(&cb) {
        let ord = if *da && *db {
            let (ta, tb) = (xa.trim_start_matches('0'), xb.trim_start_matches('0'));
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb))
        } else {
            xa.cmp(xb)
        };
        if ord.is_ne() {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

pub(crate) fn write_set(f: &mut fmt::Formatter<'_>, set: &NodeSet) -> fmt::Result {
    f.write_str("{")?;
    let mut items: Vec<&String> = set.iter().collect();
    items.sort_by(|a, b| natural_cmp(a, b));
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(x)?;
    }
    f.write_str("}")
}

impl fmt::Display for SetSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("λ");
        }
        for s in &self.0 {
            write_set(f, s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut ids = vec!["r11", "r7", "p3", "r10", "a", "r1"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, vec!["a", "p3", "r1", "r7", "r10", "r11"]);
        assert!(natural_cmp("x01", "x1").is_ne());
    }

    fn seq(items: &[&[&str]]) -> SetSequence {
        SetSequence(items.iter().map(|s| node_set(s.iter().copied())).collect())
    }

    #[test]
    fn closure_of_empty_and_chain() {
        let empty = Relation::new(node_set(["x"]), []).unwrap();
        assert!(transitive_closure(&empty).pairs().is_empty());

        let chain = Relation::from_pairs([("x", "y"), ("y", "z")]);
        let closed = transitive_closure(&chain);
        assert_eq!(
            closed.pairs(),
            &BTreeSet::from([
                ("x".into(), "y".into()),
                ("x".into(), "z".into()),
                ("y".into(), "z".into())
            ])
        );
        assert_eq!(transitive_closure(&closed), closed);
    }

    #[test]
    fn acyclicity_small_cases() {
        assert!(!is_acyclic(&Relation::from_pairs([("x", "x")])));
        assert!(!is_acyclic(&Relation::from_pairs([("x", "y"), ("y", "x")])));
        assert!(is_acyclic(&Relation::from_pairs([("x", "y")])));
        assert!(!is_acyclic_by_toposort(&Relation::from_pairs([("x", "y"), ("y", "x")])));
    }

    #[test]
    fn rejects_pairs_outside_universe() {
        let err = Relation::new(node_set(["x"]), [("x".into(), "y".into())]).unwrap_err();
        assert_eq!(err, PairOutsideUniverse("x".into(), "y".into()));
    }

    #[test]
    fn cycle_witness_starts_at_smallest_node() {
        let r = Relation::from_pairs([("b", "c"), ("c", "b"), ("a", "b"), ("c", "d"), ("d", "b")]);
        assert_eq!(find_cycle(&r).unwrap(), vec!["b", "c", "b"]);
        assert_eq!(find_cycle(&Relation::from_pairs([("x", "y")])), None);
        assert_eq!(find_cycle(&Relation::from_pairs([("p", "t"), ("t", "p")])).unwrap(), vec!["p", "t", "p"]);
    }

    #[test]
    fn sequence_of_sets_operations() {
        let sigma = seq(&[&["a", "b"], &["a", "c"], &["d"]]);
        assert_eq!(sigma.occurring(), node_set(["a", "b", "c", "d"]));
        let ab = node_set(["a", "b"]);
        assert_eq!(sigma.restrict(&ab), seq(&[&["a", "b"], &["a"], &[]]));
        assert_eq!(sigma.restrict_compact(&ab), seq(&[&["a", "b"], &["a"]]));
        assert_eq!(sigma.restrict(&sigma.occurring()), sigma);
        assert_eq!(sigma.restrict(&NodeSet::new()), seq(&[&[], &[], &[]]));
        assert_eq!(sigma.restrict_compact(&NodeSet::new()), SetSequence::default());

        let xyx = seq(&[&["x"], &["y"], &["x"]]);
        assert_eq!(xyx.restrict_compact(&node_set(["x"])), seq(&[&["x"], &["x"]]));
        assert_eq!(seq(&[&["x"], &["x"], &["x"]]).occurring(), node_set(["x"]));
        assert!(SetSequence::default().occurring().is_empty());
        assert_eq!(sigma.to_string(), "{a,b}{a,c}{d}");
        assert_eq!(SetSequence::default().to_string(), "λ");
    }
}
