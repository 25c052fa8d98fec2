//! Acyclic nets: validation, neighbourhoods, subnets and classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foundations::{find_cycle, NodeSet, Relation};

/// An unvalidated net description, as read from a document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNet {
    pub places: Vec<String>,
    pub transitions: Vec<String>,
    pub arcs: Vec<(String, String)>,
}

impl RawNet {
    pub fn new<P, T, A, S1, S2, S3, S4>(places: P, transitions: T, arcs: A) -> Self
    where
        P: IntoIterator<Item = S1>,
        T: IntoIterator<Item = S2>,
        A: IntoIterator<Item = (S3, S4)>,
        S1: Into<String>,
        S2: Into<String>,
        S3: Into<String>,
        S4: Into<String>,
    {
        Self {
            places: places.into_iter().map(Into::into).collect(),
            transitions: transitions.into_iter().map(Into::into).collect(),
            arcs: arcs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }

    pub fn validate(&self) -> Result<AcyclicNet, InvalidNet> {
        validate(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum NetViolation {
    EmptyPlaceSet,
    DuplicateId { id: String },
    NodeClash { id: String },
    CyclicFlow { cycle: Vec<String> },
    TransitionWithoutPre { transition: String },
    TransitionWithoutPost { transition: String },
    DanglingArcEndpoint { from: String, to: String, missing: String },
    IllTypedArc { from: String, to: String },
}

impl fmt::Display for NetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyPlaceSet => write!(f, "the place set is empty"),
            Self::DuplicateId { id } => write!(f, "identifier `{id}` is listed twice"),
            Self::NodeClash { id } => write!(f, "`{id}` is both a place and a transition"),
            Self::CyclicFlow { cycle } => write!(f, "flow relation has a cycle: {}", cycle.join(" -> ")),
            Self::TransitionWithoutPre { transition } => {
                write!(f, "transition `{transition}` has no pre-place")
            }
            Self::TransitionWithoutPost { transition } => {
                write!(f, "transition `{transition}` has no post-place")
            }
            Self::DanglingArcEndpoint { from, to, missing } => {
                write!(f, "arc ({from}, {to}) refers to unknown node `{missing}`")
            }
            Self::IllTypedArc { from, to } => {
                write!(f, "arc ({from}, {to}) must join a place and a transition")
            }
        }
    }
}

/// Every violation found while validating a net.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid net: {}", render_violations(.violations))]
pub struct InvalidNet {
    pub violations: Vec<NetViolation>,
}

pub(crate) fn render_violations<V: fmt::Display>(violations: &[V]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown node `{0}`")]
pub struct UnknownNode(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubnetError {
    #[error(transparent)]
    UnknownNode(#[from] UnknownNode),
    #[error("a subnet needs at least one place")]
    NoPlaces,
    #[error("transition `{transition}` would lose its neighbour `{place}`")]
    MissingEnvironment { transition: String, place: String },
}

/// Structural class of a validated net, most specific first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NetClass {
    OccurrenceNet,
    BackwardDeterministic,
    GeneralAcyclic,
}

impl fmt::Display for NetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OccurrenceNet => "occurrence net",
            Self::BackwardDeterministic => "backward deterministic acyclic net",
            Self::GeneralAcyclic => "acyclic net",
        })
    }
}

/// A validated acyclic net `(P, T, F)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicNet {
    places: NodeSet,
    transitions: NodeSet,
    flow: BTreeSet<(String, String)>,
    pre: BTreeMap<String, NodeSet>,
    post: BTreeMap<String, NodeSet>,
}

/// Checks the acyclic-net conditions and reports every violation found.
pub fn validate(raw: &RawNet) -> Result<AcyclicNet, InvalidNet> {
    let mut violations = Vec::new();

    let mut places = NodeSet::new();
    for p in &raw.places {
        if !places.insert(p.clone()) {
            violations.push(NetViolation::DuplicateId { id: p.clone() });
        }
    }
    let mut transitions = NodeSet::new();
    for t in &raw.transitions {
        if !transitions.insert(t.clone()) {
            violations.push(NetViolation::DuplicateId { id: t.clone() });
        }
    }
    if places.is_empty() {
        violations.push(NetViolation::EmptyPlaceSet);
    }
    for id in places.intersection(&transitions) {
        violations.push(NetViolation::NodeClash { id: id.clone() });
    }

    let mut flow = BTreeSet::new();
    for (from, to) in &raw.arcs {
        let known = |x: &String| places.contains(x) || transitions.contains(x);
        if let Some(missing) = [from, to].into_iter().find(|x| !known(x)) {
            violations.push(NetViolation::DanglingArcEndpoint {
                from: from.clone(),
                to: to.clone(),
                missing: missing.clone(),
            });
            continue;
        }
        let well_typed = (places.contains(from) && transitions.contains(to))
            || (transitions.contains(from) && places.contains(to));
        if !well_typed {
            violations.push(NetViolation::IllTypedArc { from: from.clone(), to: to.clone() });
            continue;
        }
        flow.insert((from.clone(), to.clone()));
    }

    let universe: NodeSet = places.union(&transitions).cloned().collect();
    let relation = Relation::new(universe, flow.iter().cloned()).expect("arcs checked against nodes");
    if let Some(cycle) = find_cycle(&relation) {
        violations.push(NetViolation::CyclicFlow { cycle });
    }

    let (pre, post) = neighbourhoods(&places, &transitions, &flow);
    for t in &transitions {
        if pre[t].is_empty() {
            violations.push(NetViolation::TransitionWithoutPre { transition: t.clone() });
        }
        if post[t].is_empty() {
            violations.push(NetViolation::TransitionWithoutPost { transition: t.clone() });
        }
    }

    if violations.is_empty() {
        Ok(AcyclicNet { places, transitions, flow, pre, post })
    } else {
        Err(InvalidNet { violations })
    }
}

type Neighbourhood = BTreeMap<String, NodeSet>;

fn neighbourhoods(
    places: &NodeSet,
    transitions: &NodeSet,
    flow: &BTreeSet<(String, String)>,
) -> (Neighbourhood, Neighbourhood) {
    let mut pre: Neighbourhood = places.iter().chain(transitions).map(|x| (x.clone(), NodeSet::new())).collect();
    let mut post = pre.clone();
    for (x, y) in flow {
        if let Some(s) = post.get_mut(x) {
            s.insert(y.clone());
        }
        if let Some(s) = pre.get_mut(y) {
            s.insert(x.clone());
        }
    }
    (pre, post)
}

impl AcyclicNet {
    pub fn new(raw: &RawNet) -> Result<Self, InvalidNet> {
        validate(raw)
    }

    pub fn places(&self) -> &NodeSet {
        &self.places
    }

    pub fn transitions(&self) -> &NodeSet {
        &self.transitions
    }

    pub fn flow(&self) -> &BTreeSet<(String, String)> {
        &self.flow
    }

    pub fn flow_relation(&self) -> Relation {
        let universe = self.places.union(&self.transitions).cloned().collect();
        Relation::new(universe, self.flow.iter().cloned()).expect("validated net")
    }

    pub fn contains(&self, x: &str) -> bool {
        self.places.contains(x) || self.transitions.contains(x)
    }

    pub fn is_place(&self, x: &str) -> bool {
        self.places.contains(x)
    }

    pub fn is_transition(&self, x: &str) -> bool {
        self.transitions.contains(x)
    }

    /// `•x`.
    pub fn preset(&self, x: &str) -> Result<&NodeSet, UnknownNode> {
        self.pre.get(x).ok_or_else(|| UnknownNode(x.to_owned()))
    }

    /// `x•`.
    pub fn postset(&self, x: &str) -> Result<&NodeSet, UnknownNode> {
        self.post.get(x).ok_or_else(|| UnknownNode(x.to_owned()))
    }

    /// `•X`, the union of the singleton presets.
    pub fn preset_of<'a>(&self, xs: impl IntoIterator<Item = &'a String>) -> Result<NodeSet, UnknownNode> {
        union_of(xs, |x| self.preset(x))
    }

    /// `X•`.
    pub fn postset_of<'a>(&self, xs: impl IntoIterator<Item = &'a String>) -> Result<NodeSet, UnknownNode> {
        union_of(xs, |x| self.postset(x))
    }

    pub fn initial_places(&self) -> NodeSet {
        self.places.iter().filter(|p| self.pre[*p].is_empty()).cloned().collect()
    }

    pub fn final_places(&self) -> NodeSet {
        self.places.iter().filter(|p| self.post[*p].is_empty()).cloned().collect()
    }

    pub fn is_occurrence_net(&self) -> bool {
        self.places.iter().all(|p| self.pre[p].len() <= 1 && self.post[p].len() <= 1)
    }

    pub fn is_backward_deterministic(&self) -> bool {
        self.places.iter().all(|p| self.pre[p].len() <= 1)
    }

    pub fn classify(&self) -> NetClass {
        if self.is_occurrence_net() {
            NetClass::OccurrenceNet
        } else if self.is_backward_deterministic() {
            NetClass::BackwardDeterministic
        } else {
            NetClass::GeneralAcyclic
        }
    }

    /// `inner ⊆ self`: node inclusion, restricted flow, and every inner
    /// transition keeps its full neighbourhood.
    pub fn has_subnet(&self, inner: &AcyclicNet) -> bool {
        if !inner.places.is_subset(&self.places) || !inner.transitions.is_subset(&self.transitions) {
            return false;
        }
        let restricted: BTreeSet<_> = self
            .flow
            .iter()
            .filter(|(x, y)| inner.contains(x) && inner.contains(y))
            .cloned()
            .collect();
        if restricted != inner.flow {
            return false;
        }
        inner
            .transitions
            .iter()
            .all(|t| inner.pre[t] == self.pre[t] && inner.post[t] == self.post[t])
    }

    /// `inner ⊑ self`.
    pub fn has_coinitial_subnet(&self, inner: &AcyclicNet) -> bool {
        self.has_subnet(inner) && inner.initial_places() == self.initial_places()
    }

    /// The subnet on the chosen nodes; the flow is the restriction of this net's flow.
    pub fn subnet(&self, places: &NodeSet, transitions: &NodeSet) -> Result<AcyclicNet, SubnetError> {
        if places.is_empty() {
            return Err(SubnetError::NoPlaces);
        }
        for x in places.iter().chain(transitions) {
            if !self.contains(x) {
                return Err(UnknownNode(x.clone()).into());
            }
        }
        for t in transitions {
            if !self.is_transition(t) {
                return Err(UnknownNode(t.clone()).into());
            }
            for p in self.pre[t].iter().chain(&self.post[t]) {
                if !places.contains(p) {
                    return Err(SubnetError::MissingEnvironment { transition: t.clone(), place: p.clone() });
                }
            }
        }
        if let Some(p) = places.iter().find(|p| !self.is_place(p)) {
            return Err(UnknownNode(p.clone()).into());
        }
        let flow: BTreeSet<_> = self
            .flow
            .iter()
            .filter(|(x, y)| {
                (places.contains(x) && transitions.contains(y)) || (transitions.contains(x) && places.contains(y))
            })
            .cloned()
            .collect();
        let (pre, post) = neighbourhoods(places, transitions, &flow);
        Ok(AcyclicNet {
            places: places.clone(),
            transitions: transitions.clone(),
            flow,
            pre,
            post,
        })
    }

    /// The co-initial subnet determined by a transition set: `P = P^init ∪ T•`.
    pub fn coinitial_subnet(&self, transitions: &NodeSet) -> Result<AcyclicNet, SubnetError> {
        let mut places = self.initial_places();
        places.extend(self.postset_of(transitions)?);
        self.subnet(&places, transitions)
    }

    pub fn to_raw(&self) -> RawNet {
        RawNet {
            places: self.places.iter().cloned().collect(),
            transitions: self.transitions.iter().cloned().collect(),
            arcs: self.flow.iter().cloned().collect(),
        }
    }

    /// Transitions `u` with `u F⁺ t`.
    pub fn transition_predecessors(&self, t: &str) -> Result<NodeSet, UnknownNode> {
        self.preset(t)?;
        let mut seen = NodeSet::new();
        let mut stack = vec![t.to_owned()];
        while let Some(x) = stack.pop() {
            for y in &self.pre[&x] {
                if seen.insert(y.clone()) {
                    stack.push(y.clone());
                }
            }
        }
        Ok(seen.into_iter().filter(|x| self.is_transition(x)).collect())
    }
}

pub(crate) fn union_of<'a, 'n, E>(
    xs: impl IntoIterator<Item = &'a String>,
    mut lookup: impl FnMut(&str) -> Result<&'n NodeSet, E>,
) -> Result<NodeSet, E> {
    let mut out = NodeSet::new();
    for x in xs {
        out.extend(lookup(x)?.iter().cloned());
    }
    Ok(out)
}

/// `inner ⊆ outer`.
pub fn is_subnet(outer: &AcyclicNet, inner: &AcyclicNet) -> bool {
    outer.has_subnet(inner)
}

/// `inner ⊑ outer`.
pub fn is_coinitial_subnet(outer: &AcyclicNet, inner: &AcyclicNet) -> bool {
    outer.has_coinitial_subnet(inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::foundations::node_set;

    #[test]
    fn neighbourhoods_of_an1() {
        let an1 = fixtures::an1();
        assert_eq!(an1.preset("p5").unwrap(), &node_set(["c", "d"]));
        assert_eq!(an1.postset("a").unwrap(), &node_set(["p2", "p3"]));
        assert!(an1.preset("p1").unwrap().is_empty());
        assert!(an1.postset("p4").unwrap().is_empty());
        assert_eq!(an1.preset_of(&node_set(["c", "d"])).unwrap(), node_set(["p3"]));
        assert_eq!(an1.postset_of(&node_set(["b", "c"])).unwrap(), node_set(["p4", "p5"]));
        assert_eq!(an1.preset("zz"), Err(UnknownNode("zz".into())));
        assert_eq!(an1.initial_places(), node_set(["p1"]));
        assert_eq!(an1.final_places(), node_set(["p4", "p5"]));
        assert_eq!(fixtures::bd1().final_places(), node_set(["p4", "p5", "p6"]));
    }

    #[test]
    fn single_place_net() {
        let net = RawNet::new(["p"], Vec::<String>::new(), Vec::<(String, String)>::new())
            .validate()
            .unwrap();
        assert_eq!(net.initial_places(), node_set(["p"]));
        assert_eq!(net.final_places(), node_set(["p"]));
        assert_eq!(net.classify(), NetClass::OccurrenceNet);
    }

    #[test]
    fn validation_reports_every_violation() {
        let cyclic = RawNet::new(["p"], ["t"], [("p", "t"), ("t", "p")]);
        let err = cyclic.validate().unwrap_err();
        assert_eq!(
            err.violations,
            vec![NetViolation::CyclicFlow { cycle: vec!["p".into(), "t".into(), "p".into()] }]
        );

        let isolated = RawNet::new(["p"], ["t"], Vec::<(String, String)>::new());
        let err = isolated.validate().unwrap_err();
        assert!(err.violations.contains(&NetViolation::TransitionWithoutPre { transition: "t".into() }));
        assert!(err.violations.contains(&NetViolation::TransitionWithoutPost { transition: "t".into() }));

        let messy = RawNet::new(["x", "x"], ["x", "t"], [("x", "t"), ("t", "y"), ("t", "t")]);
        let err = messy.validate().unwrap_err();
        assert!(err.violations.contains(&NetViolation::DuplicateId { id: "x".into() }));
        assert!(err.violations.contains(&NetViolation::NodeClash { id: "x".into() }));
        assert!(err.violations.contains(&NetViolation::DanglingArcEndpoint {
            from: "t".into(),
            to: "y".into(),
            missing: "y".into()
        }));
        assert!(err.violations.contains(&NetViolation::IllTypedArc { from: "t".into(), to: "t".into() }));

        let empty = RawNet::default();
        assert_eq!(empty.validate().unwrap_err().violations, vec![NetViolation::EmptyPlaceSet]);
    }

    #[test]
    fn classification_of_fixtures() {
        assert_eq!(fixtures::an1().classify(), NetClass::GeneralAcyclic);
        assert_eq!(fixtures::bd1().classify(), NetClass::BackwardDeterministic);
        assert_eq!(fixtures::on1().classify(), NetClass::OccurrenceNet);
        assert_eq!(fixtures::on2().classify(), NetClass::OccurrenceNet);
    }

    #[test]
    fn subnets_of_an1() {
        let an1 = fixtures::an1();
        let on1 = fixtures::on1();
        assert!(is_subnet(&an1, &on1));
        assert!(is_subnet(&an1, &an1));
        assert!(is_coinitial_subnet(&an1, &on1));
        assert!(is_coinitial_subnet(&an1, &an1));

        // Dropping p3 -> c leaves c without a pre-place, so it is not even a net.
        let mut broken = on1.to_raw();
        broken.arcs.retain(|arc| arc != &("p3".to_owned(), "c".to_owned()));
        assert!(broken.validate().is_err());
        // With a stand-in pre-place, c still lost its AN1 environment.
        broken.places.push("p6".into());
        broken.arcs.push(("p6".into(), "c".into()));
        assert!(!is_subnet(&an1, &broken.validate().unwrap()));

        let middle = an1.subnet(&node_set(["p2", "p4"]), &node_set(["b"])).unwrap();
        assert!(is_subnet(&an1, &middle));
        assert!(!is_coinitial_subnet(&an1, &middle));

        assert_eq!(
            an1.subnet(&node_set(["p2"]), &node_set(["b"])),
            Err(SubnetError::MissingEnvironment { transition: "b".into(), place: "p4".into() })
        );
        assert_eq!(an1.coinitial_subnet(&node_set(["a", "b", "c"])).unwrap(), on1);
    }

    #[test]
    fn transition_predecessors_follow_paths() {
        let an1 = fixtures::an1();
        assert_eq!(an1.transition_predecessors("c").unwrap(), node_set(["a"]));
        assert!(an1.transition_predecessors("a").unwrap().is_empty());
        assert_eq!(fixtures::w1().transition_predecessors("c").unwrap(), node_set(["a", "b"]));
    }
}
