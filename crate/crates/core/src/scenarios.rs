//! Scenarios of acyclic nets: co-initial occurrence subnets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::acyclic::AcyclicNet;
use crate::foundations::NodeSet;
use crate::semantics::{Limits, SemanticsError, StepSequence};
use crate::wellformed::{is_wf_stepseq, DoubleFill};

/// A co-initial occurrence subnet of some host net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    transitions: NodeSet,
    net: AcyclicNet,
}

impl Scenario {
    pub fn transitions(&self) -> &NodeSet {
        &self.transitions
    }

    pub fn net(&self) -> &AcyclicNet {
        &self.net
    }

    pub fn into_net(self) -> AcyclicNet {
        self.net
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("not a step sequence: {0}")]
    NotAStepSequence(SemanticsError),
    #[error("not well-formed: {0}")]
    NotWellFormed(DoubleFill),
    #[error("scenario enumeration exceeded the bound ({0})")]
    BoundExceeded(Limits),
}

/// Whether `transitions` induces a co-initial occurrence subnet: every
/// pre-place is initial or produced inside the set, and no place has two
/// producers or two consumers inside the set.
pub fn is_scenario_set(net: &AcyclicNet, transitions: &NodeSet) -> bool {
    let init = net.initial_places();
    let mut produced = NodeSet::new();
    for t in transitions {
        let Ok(post) = net.postset(t) else { return false };
        for p in post {
            if !produced.insert(p.clone()) {
                return false;
            }
        }
    }
    let mut consumed = NodeSet::new();
    for t in transitions {
        for p in net.preset(t).expect("checked above") {
            if !consumed.insert(p.clone()) || !(init.contains(p) || produced.contains(p)) {
                return false;
            }
        }
    }
    transitions.iter().all(|t| net.is_transition(t))
}

fn induced(net: &AcyclicNet, transitions: &NodeSet) -> Scenario {
    Scenario {
        transitions: transitions.clone(),
        net: net.coinitial_subnet(transitions).expect("scenario sets keep their environment"),
    }
}

/// The scenario induced by a well-formed step sequence: `T = ⋃σ`, `P = P^init ∪ T•`.
pub fn scenario_of(net: &AcyclicNet, s: &StepSequence) -> Result<Scenario, ScenarioError> {
    if let Some(fill) = is_wf_stepseq(net, s).map_err(ScenarioError::NotAStepSequence)? {
        return Err(ScenarioError::NotWellFormed(fill));
    }
    Ok(induced(net, &s.occurring()))
}

/// Every scenario, smallest transition sets first.
///
/// Grows sets one transition at a time from the empty set. Removing a
/// maximal transition from a scenario set leaves a scenario set, so every
/// scenario is reached.
pub fn enumerate_scenarios(net: &AcyclicNet, limits: Limits) -> Result<Vec<Scenario>, ScenarioError> {
    Ok(scenario_sets(net, limits)?.iter().map(|t| induced(net, t)).collect())
}

pub(crate) fn scenario_sets(net: &AcyclicNet, limits: Limits) -> Result<Vec<NodeSet>, ScenarioError> {
    let mut seen: BTreeSet<NodeSet> = BTreeSet::from([NodeSet::new()]);
    let mut order = vec![NodeSet::new()];
    let mut queue = VecDeque::from([NodeSet::new()]);
    while let Some(current) = queue.pop_front() {
        for t in net.transitions() {
            if current.contains(t) {
                continue;
            }
            let mut bigger = current.clone();
            bigger.insert(t.clone());
            if !seen.contains(&bigger) && is_scenario_set(net, &bigger) {
                seen.insert(bigger.clone());
                if seen.len() > limits.max_items {
                    return Err(ScenarioError::BoundExceeded(limits));
                }
                order.push(bigger.clone());
                queue.push_back(bigger);
            }
        }
    }
    Ok(order)
}

/// The sets with no strict superset in `sets`.
pub(crate) fn maximal_sets(sets: &[NodeSet]) -> Vec<NodeSet> {
    let mut out: Vec<NodeSet> = sets
        .iter()
        .filter(|s| !sets.iter().any(|o| o.len() > s.len() && s.is_subset(o)))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn maximal_scenarios(net: &AcyclicNet, limits: Limits) -> Result<Vec<Scenario>, ScenarioError> {
    let sets = scenario_sets(net, limits)?;
    Ok(maximal_sets(&sets).iter().map(|t| induced(net, t)).collect())
}

/// Two well-formed step sequences induce the same scenario iff they use the same transitions.
pub fn same_scenario(net: &AcyclicNet, s1: &StepSequence, s2: &StepSequence) -> Result<bool, ScenarioError> {
    Ok(scenario_of(net, s1)?.transitions == scenario_of(net, s2)?.transitions)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub covered_places: NodeSet,
    pub covered_transitions: NodeSet,
    pub covered_arcs: BTreeSet<(String, String)>,
    pub uncovered_places: NodeSet,
    pub uncovered_transitions: NodeSet,
    pub uncovered_arcs: BTreeSet<(String, String)>,
}

impl Coverage {
    pub fn is_full(&self) -> bool {
        self.uncovered_places.is_empty() && self.uncovered_transitions.is_empty() && self.uncovered_arcs.is_empty()
    }

    pub(crate) fn compute<'a>(
        places: &NodeSet,
        transitions: &NodeSet,
        arcs: &BTreeSet<(String, String)>,
        parts: impl IntoIterator<Item = (&'a NodeSet, &'a NodeSet, &'a BTreeSet<(String, String)>)>,
    ) -> Coverage {
        let mut cp = NodeSet::new();
        let mut ct = NodeSet::new();
        let mut ca = BTreeSet::new();
        for (p, t, a) in parts {
            cp.extend(p.iter().cloned());
            ct.extend(t.iter().cloned());
            ca.extend(a.iter().cloned());
        }
        Coverage {
            uncovered_places: places.difference(&cp).cloned().collect(),
            uncovered_transitions: transitions.difference(&ct).cloned().collect(),
            uncovered_arcs: arcs.difference(&ca).cloned().collect(),
            covered_places: cp,
            covered_transitions: ct,
            covered_arcs: ca,
        }
    }
}

/// How much of the net is covered by its scenarios.
pub fn coverage(net: &AcyclicNet, limits: Limits) -> Result<Coverage, ScenarioError> {
    let maximal = maximal_scenarios(net, limits)?;
    Ok(Coverage::compute(
        net.places(),
        net.transitions(),
        net.flow(),
        maximal.iter().map(|s| (s.net.places(), s.net.transitions(), s.net.flow())),
    ))
}

/// Scenario transition sets keyed by size, for reporting.
pub fn scenario_sizes(scenarios: &[Scenario]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for s in scenarios {
        *out.entry(s.transitions.len()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::foundations::node_set;

    fn seq(s: &str) -> StepSequence {
        s.parse().unwrap()
    }

    fn of(net: &AcyclicNet, s: &str) -> Result<Scenario, ScenarioError> {
        scenario_of(net, &seq(s))
    }

    #[test]
    fn induced_scenarios_of_an1() {
        let an1 = fixtures::an1();
        let on1 = fixtures::on1();
        for s in ["a {b,c}", "a b c", "a c b"] {
            assert_eq!(of(&an1, s).unwrap().net(), &on1);
        }
        let empty = of(&an1, "λ").unwrap();
        assert_eq!(empty.net().places(), &node_set(["p1"]));
        assert!(empty.net().transitions().is_empty());
        assert!(matches!(of(&an1, "b"), Err(ScenarioError::NotAStepSequence(_))));
        assert!(matches!(of(&fixtures::w1(), "{a,b} c"), Err(ScenarioError::NotWellFormed(_))));
    }

    #[test]
    fn maximal_scenarios_of_w1_and_on1() {
        let w1 = fixtures::w1();
        let max: Vec<NodeSet> = maximal_scenarios(&w1, Limits::default())
            .unwrap()
            .into_iter()
            .map(|s| s.transitions)
            .collect();
        assert_eq!(max, vec![node_set(["a", "c"]), node_set(["b", "c"])]);
        let places: Vec<NodeSet> = maximal_scenarios(&w1, Limits::default())
            .unwrap()
            .iter()
            .map(|s| s.net().places().clone())
            .collect();
        assert_eq!(places, vec![node_set(["p1", "p2", "p3", "p4"]); 2]);

        let on1 = fixtures::on1();
        let max = maximal_scenarios(&on1, Limits::default()).unwrap();
        assert_eq!(max.len(), 1);
        assert_eq!(max[0].net(), &on1);
    }

    #[test]
    fn an1_has_seven_scenarios() {
        let sets: BTreeSet<NodeSet> = scenario_sets(&fixtures::an1(), Limits::default()).unwrap().into_iter().collect();
        let expected: BTreeSet<NodeSet> = [
            node_set(Vec::<&str>::new()),
            node_set(["a"]),
            node_set(["a", "b"]),
            node_set(["a", "c"]),
            node_set(["a", "d"]),
            node_set(["a", "b", "c"]),
            node_set(["a", "b", "d"]),
        ]
        .into_iter()
        .collect();
        assert_eq!(sets, expected);
    }

    #[test]
    fn same_scenario_compares_transition_sets() {
        let an1 = fixtures::an1();
        assert!(same_scenario(&an1, &seq("a b c"), &seq("a c b")).unwrap());
        assert!(!same_scenario(&an1, &seq("a b"), &seq("a c")).unwrap());
        assert!(same_scenario(&an1, &seq("λ"), &seq("λ")).unwrap());
    }

    #[test]
    fn coverage_reports() {
        assert!(coverage(&fixtures::an1(), Limits::default()).unwrap().is_full());
        assert!(coverage(&fixtures::w1(), Limits::default()).unwrap().is_full());
        let net = crate::acyclic::RawNet::new(
            ["s", "x", "y", "z"],
            ["a", "b", "t"],
            [("s", "a"), ("s", "b"), ("a", "x"), ("b", "y"), ("x", "t"), ("y", "t"), ("t", "z")],
        )
        .validate()
        .unwrap();
        let cov = coverage(&net, Limits::default()).unwrap();
        assert_eq!(cov.uncovered_transitions, node_set(["t"]));
        assert_eq!(cov.uncovered_places, node_set(["z"]));
    }
}
