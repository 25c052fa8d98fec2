//! Communication structured acyclic nets (csa-nets): acyclic components
//! exchanging tokens through buffer places.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acyclic::{render_violations, union_of, AcyclicNet, NetViolation, RawNet, UnknownNode};
use crate::foundations::{transitive_closure, NodeSet, Relation};
use crate::scenarios::{is_scenario_set, maximal_sets, scenario_sets, Coverage, ScenarioError};
use crate::semantics::{
    check_step, pre_disjoint_subsets, run, Limits, Marking, MixedStepSequence, Refusal, SemanticsError, Step,
    StepSequence, StepSystem,
};
use crate::wellformed::{is_wf_stepseq, search_well_formed, DoubleFill, WellFormedVerdict};

/// An unvalidated csa-net description.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCsa {
    pub components: Vec<RawNet>,
    #[serde(default)]
    pub buffers: Vec<String>,
    #[serde(default)]
    pub buffer_arcs: Vec<(String, String)>,
}

/// Component indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum CsaViolation {
    NoComponents,
    ComponentInvalid { component: usize, violations: Vec<NetViolation> },
    ComponentNotWellFormed { component: usize, verdict: WellFormedVerdict },
    NodeClashAcrossComponents { id: String },
    DuplicateBuffer { buffer: String },
    BufferClash { buffer: String },
    DanglingArcEndpoint { from: String, to: String, missing: String },
    IllTypedBufferArc { from: String, to: String },
    BufferWithoutProducer { buffer: String },
    BufferWithinOneComponent { buffer: String, producer: String, consumer: String },
}

impl fmt::Display for CsaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoComponents => f.write_str("a csa-net needs at least one component"),
            Self::ComponentInvalid { component, violations } => {
                write!(f, "component {component}: {}", render_violations(violations))
            }
            Self::ComponentNotWellFormed { component, verdict } => write!(f, "component {component}: {verdict}"),
            Self::NodeClashAcrossComponents { id } => write!(f, "`{id}` appears in more than one component"),
            Self::DuplicateBuffer { buffer } => write!(f, "buffer `{buffer}` is listed twice"),
            Self::BufferClash { buffer } => write!(f, "buffer `{buffer}` is also a component node"),
            Self::DanglingArcEndpoint { from, to, missing } => {
                write!(f, "buffer arc ({from}, {to}) refers to unknown node `{missing}`")
            }
            Self::IllTypedBufferArc { from, to } => {
                write!(f, "buffer arc ({from}, {to}) must join a buffer and a transition")
            }
            Self::BufferWithoutProducer { buffer } => write!(f, "buffer `{buffer}` has no producing transition"),
            Self::BufferWithinOneComponent { buffer, producer, consumer } => write!(
                f,
                "buffer `{buffer}` joins `{producer}` and `{consumer}` of the same component"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid csa-net: {}", render_violations(.violations))]
pub struct InvalidCsa {
    pub violations: Vec<CsaViolation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CsaClass {
    CsoNet,
    BdCsaNet,
    CsaNet,
}

impl fmt::Display for CsaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CsoNet => "cso-net",
            Self::BdCsaNet => "bdcsa-net",
            Self::CsaNet => "csa-net",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsaError {
    #[error("component index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("not a step sequence: {0}")]
    NotAStepSequence(SemanticsError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("not a cso-net")]
    NotACsoNet,
    #[error("step {0} cannot be split into syn-cycles")]
    NoDecomposition(Step),
    #[error("not well-formed: {0}")]
    NotWellFormed(DoubleFill),
    #[error("enumeration exceeded the bound ({0})")]
    BoundExceeded(Limits),
    #[error(transparent)]
    UnknownNode(#[from] UnknownNode),
}

impl From<ScenarioError> for CsaError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::NotAStepSequence(s) => Self::NotAStepSequence(s),
            ScenarioError::NotWellFormed(d) => Self::NotWellFormed(d),
            ScenarioError::BoundExceeded(l) => Self::BoundExceeded(l),
        }
    }
}

/// A validated csa-net. Components are numbered from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsaNet {
    components: Vec<AcyclicNet>,
    buffers: NodeSet,
    buffer_arcs: BTreeSet<(String, String)>,
    places: NodeSet,
    transitions: NodeSet,
    pre: BTreeMap<String, NodeSet>,
    post: BTreeMap<String, NodeSet>,
    component_of: BTreeMap<String, usize>,
}

/// Validates a csa-net description, including well-formedness of every component.
pub fn validate_csa(raw: &RawCsa) -> Result<CsaNet, InvalidCsa> {
    let net = structural(raw)?;
    let violations: Vec<CsaViolation> = net
        .components
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let verdict = crate::wellformed::is_well_formed(c, Limits::default());
            (!verdict.is_ok()).then_some(CsaViolation::ComponentNotWellFormed { component: i, verdict })
        })
        .collect();
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(InvalidCsa { violations })
    }
}

/// Every check except component well-formedness.
fn structural(raw: &RawCsa) -> Result<CsaNet, InvalidCsa> {
    let mut violations = Vec::new();
    if raw.components.is_empty() {
        violations.push(CsaViolation::NoComponents);
    }
    let mut components = Vec::new();
    for (i, c) in raw.components.iter().enumerate() {
        match c.validate() {
            Ok(net) => components.push(net),
            Err(e) => violations.push(CsaViolation::ComponentInvalid { component: i, violations: e.violations }),
        }
    }
    if !violations.is_empty() {
        return Err(InvalidCsa { violations });
    }

    let mut owner: BTreeMap<String, usize> = BTreeMap::new();
    let mut clashes = NodeSet::new();
    for (i, c) in components.iter().enumerate() {
        for x in c.places().iter().chain(c.transitions()) {
            if owner.insert(x.clone(), i).is_some() {
                clashes.insert(x.clone());
            }
        }
    }
    violations.extend(clashes.into_iter().map(|id| CsaViolation::NodeClashAcrossComponents { id }));

    let mut buffers = NodeSet::new();
    for q in &raw.buffers {
        if !buffers.insert(q.clone()) {
            violations.push(CsaViolation::DuplicateBuffer { buffer: q.clone() });
        } else if owner.contains_key(q) {
            violations.push(CsaViolation::BufferClash { buffer: q.clone() });
        }
    }

    let is_transition = |x: &String| components.iter().any(|c| c.is_transition(x));
    let mut arcs = BTreeSet::new();
    for (from, to) in &raw.buffer_arcs {
        let known = |x: &String| owner.contains_key(x) || buffers.contains(x);
        if let Some(missing) = [from, to].into_iter().find(|x| !known(x)) {
            violations.push(CsaViolation::DanglingArcEndpoint {
                from: from.clone(),
                to: to.clone(),
                missing: missing.clone(),
            });
            continue;
        }
        let typed = (buffers.contains(from) && is_transition(to)) || (is_transition(from) && buffers.contains(to));
        if !typed {
            violations.push(CsaViolation::IllTypedBufferArc { from: from.clone(), to: to.clone() });
            continue;
        }
        arcs.insert((from.clone(), to.clone()));
    }

    for q in &buffers {
        let producers: Vec<&String> = arcs.iter().filter(|(_, y)| y == q).map(|(x, _)| x).collect();
        if producers.is_empty() {
            violations.push(CsaViolation::BufferWithoutProducer { buffer: q.clone() });
        }
        for (x, y) in arcs.iter().filter(|(x, _)| x == q) {
            debug_assert_eq!(x, q);
            for t in &producers {
                if owner.get(*t) == owner.get(y) {
                    violations.push(CsaViolation::BufferWithinOneComponent {
                        buffer: q.clone(),
                        producer: (*t).clone(),
                        consumer: y.clone(),
                    });
                }
            }
        }
    }

    if violations.is_empty() {
        Ok(CsaNet::assemble(components, buffers, arcs))
    } else {
        Err(InvalidCsa { violations })
    }
}

impl CsaNet {
    /// Builds the derived tables; callers guarantee the structural conditions.
    pub(crate) fn assemble(components: Vec<AcyclicNet>, buffers: NodeSet, buffer_arcs: BTreeSet<(String, String)>) -> Self {
        let mut places = NodeSet::new();
        let mut transitions = NodeSet::new();
        let mut component_of = BTreeMap::new();
        let mut pre: BTreeMap<String, NodeSet> = BTreeMap::new();
        let mut post: BTreeMap<String, NodeSet> = BTreeMap::new();
        for (i, c) in components.iter().enumerate() {
            places.extend(c.places().iter().cloned());
            transitions.extend(c.transitions().iter().cloned());
            for x in c.places().iter().chain(c.transitions()) {
                component_of.insert(x.clone(), i);
                pre.insert(x.clone(), c.preset(x).expect("own node").clone());
                post.insert(x.clone(), c.postset(x).expect("own node").clone());
            }
        }
        for q in &buffers {
            pre.insert(q.clone(), NodeSet::new());
            post.insert(q.clone(), NodeSet::new());
        }
        for (x, y) in &buffer_arcs {
            post.get_mut(x).expect("known node").insert(y.clone());
            pre.get_mut(y).expect("known node").insert(x.clone());
        }
        Self { components, buffers, buffer_arcs, places, transitions, pre, post, component_of }
    }

    pub fn new(raw: &RawCsa) -> Result<Self, InvalidCsa> {
        validate_csa(raw)
    }

    /// A one-component csa-net with no buffers.
    pub fn single(net: AcyclicNet) -> Self {
        Self::assemble(vec![net], NodeSet::new(), BTreeSet::new())
    }

    pub fn components(&self) -> &[AcyclicNet] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&AcyclicNet, CsaError> {
        self.components.get(i).ok_or(CsaError::IndexOutOfRange(i))
    }

    pub fn buffers(&self) -> &NodeSet {
        &self.buffers
    }

    pub fn buffer_arcs(&self) -> &BTreeSet<(String, String)> {
        &self.buffer_arcs
    }

    /// Component places (buffers excluded).
    pub fn places(&self) -> &NodeSet {
        &self.places
    }

    pub fn transitions(&self) -> &NodeSet {
        &self.transitions
    }

    /// Component flow arcs of every component.
    pub fn flow(&self) -> BTreeSet<(String, String)> {
        self.components.iter().flat_map(|c| c.flow().iter().cloned()).collect()
    }

    pub fn component_of(&self, x: &str) -> Option<usize> {
        self.component_of.get(x).copied()
    }

    pub fn is_buffer(&self, x: &str) -> bool {
        self.buffers.contains(x)
    }

    /// Pre-set over `F ∪ W`.
    pub fn preset(&self, x: &str) -> Result<&NodeSet, UnknownNode> {
        self.pre.get(x).ok_or_else(|| UnknownNode(x.to_owned()))
    }

    /// Post-set over `F ∪ W`.
    pub fn postset(&self, x: &str) -> Result<&NodeSet, UnknownNode> {
        self.post.get(x).ok_or_else(|| UnknownNode(x.to_owned()))
    }

    pub fn preset_of<'a>(&self, xs: impl IntoIterator<Item = &'a String>) -> Result<NodeSet, UnknownNode> {
        union_of(xs, |x| self.preset(x))
    }

    pub fn postset_of<'a>(&self, xs: impl IntoIterator<Item = &'a String>) -> Result<NodeSet, UnknownNode> {
        union_of(xs, |x| self.postset(x))
    }

    /// Buffers are never initial, since each has a producer.
    pub fn initial_places(&self) -> NodeSet {
        self.components.iter().flat_map(|c| c.initial_places()).collect()
    }

    /// Final component places, plus buffers nothing consumes.
    pub fn final_places(&self) -> NodeSet {
        let mut out: NodeSet = self.components.iter().flat_map(|c| c.final_places()).collect();
        out.extend(self.buffers.iter().filter(|q| self.post[*q].is_empty()).cloned());
        out
    }

    fn flow_and_buffer_relation(&self) -> Relation {
        let universe = self.pre.keys().cloned().collect();
        Relation::new(universe, self.flow().into_iter().chain(self.buffer_arcs.iter().cloned()))
            .expect("arcs join known nodes")
    }

    pub fn classify(&self) -> CsaClass {
        let producers = |q: &String| self.pre[q].len();
        let consumers = |q: &String| self.post[q].len();
        let cso = self.components.iter().all(AcyclicNet::is_occurrence_net)
            && self.buffers.iter().all(|q| producers(q) == 1 && consumers(q) <= 1)
            && {
                let closure = transitive_closure(&self.flow_and_buffer_relation());
                self.places.iter().all(|p| !closure.contains(p, p))
            };
        if cso {
            CsaClass::CsoNet
        } else if self.components.iter().all(AcyclicNet::is_backward_deterministic)
            && self.buffers.iter().all(|q| producers(q) == 1)
        {
            CsaClass::BdCsaNet
        } else {
            CsaClass::CsaNet
        }
    }

    /// Maximal sets of transitions pairwise related by `W⁺`, computed on the whole net.
    pub fn direct_syn_cycles(&self) -> BTreeSet<NodeSet> {
        let universe: NodeSet = self.transitions.union(&self.buffers).cloned().collect();
        let w = Relation::new(universe, self.buffer_arcs.iter().cloned()).expect("arcs join known nodes");
        let closure = transitive_closure(&w);
        let mut classes = BTreeSet::new();
        let mut assigned = NodeSet::new();
        for t in &self.transitions {
            if assigned.contains(t) {
                continue;
            }
            let class: NodeSet = self
                .transitions
                .iter()
                .filter(|u| *u == t || (closure.contains(t, u) && closure.contains(u, t)))
                .cloned()
                .collect();
            assigned.extend(class.iter().cloned());
            classes.insert(class);
        }
        classes
    }

    /// Splits an enabled step into syn-cycles that can fire one after another.
    pub fn decompose_step(&self, m: &Marking, u: &Step) -> Result<Vec<Step>, CsaError> {
        crate::semantics::fire(self, m, u)?;
        let parts: Vec<NodeSet> = self
            .direct_syn_cycles()
            .into_iter()
            .map(|c| c.intersection(u.transitions()).cloned().collect::<NodeSet>())
            .filter(|c| !c.is_empty())
            .collect();
        order_parts(self, m, parts).ok_or_else(|| CsaError::NoDecomposition(u.clone()))
    }

    pub fn to_raw(&self) -> RawCsa {
        RawCsa {
            components: self.components.iter().map(AcyclicNet::to_raw).collect(),
            buffers: self.buffers.iter().cloned().collect(),
            buffer_arcs: self.buffer_arcs.iter().cloned().collect(),
        }
    }
}

/// Finds an order in which `parts` fire one after another from `m`, trying
/// parts in lexicographic order first.
pub(crate) fn order_parts<S: StepSystem + ?Sized>(sys: &S, m: &Marking, mut parts: Vec<NodeSet>) -> Option<Vec<Step>> {
    parts.sort();
    fn go<S: StepSystem + ?Sized>(sys: &S, m: &Marking, left: &mut Vec<Option<Step>>, out: &mut Vec<Step>) -> bool {
        if left.iter().all(Option::is_none) {
            return true;
        }
        for i in 0..left.len() {
            let Some(step) = left[i].clone() else { continue };
            if check_step(sys, &step).is_err() || sys.refusal(m, &step).is_some() {
                continue;
            }
            let next = sys.fire_unchecked(m, &step);
            left[i] = None;
            out.push(step.clone());
            if go(sys, &next, left, out) {
                return true;
            }
            out.pop();
            left[i] = Some(step);
        }
        false
    }
    let mut left: Vec<Option<Step>> = parts.into_iter().map(|p| Step::new(p).ok()).collect();
    let mut out = Vec::new();
    go(sys, m, &mut left, &mut out).then_some(out)
}

impl StepSystem for CsaNet {
    fn initial_marking(&self) -> Marking {
        Marking(self.initial_places())
    }

    fn transition_ids(&self) -> &NodeSet {
        &self.transitions
    }

    fn pre(&self, t: &str) -> &NodeSet {
        &self.pre[t]
    }

    fn post(&self, t: &str) -> &NodeSet {
        &self.post[t]
    }

    /// `•U ⊆ M ∪ (U• ∩ Q)`: buffer tokens may be produced within the step.
    fn refusal(&self, m: &Marking, u: &Step) -> Option<Refusal> {
        let supplied: NodeSet = u
            .iter()
            .flat_map(|t| self.post[t].iter())
            .filter(|q| self.buffers.contains(*q))
            .cloned()
            .collect();
        let missing: NodeSet = u
            .iter()
            .flat_map(|t| self.pre[t].iter())
            .filter(|p| !m.contains(p) && !supplied.contains(*p))
            .cloned()
            .collect();
        (!missing.is_empty()).then_some(Refusal::Underlying { missing })
    }

    fn enabled_steps(&self, m: &Marking, singletons_only: bool) -> Vec<Step> {
        let candidates: Vec<String> = self
            .transitions
            .iter()
            .filter(|t| self.pre[*t].iter().all(|p| m.contains(p) || self.buffers.contains(p)))
            .cloned()
            .collect();
        pre_disjoint_subsets(self, &candidates, singletons_only, |set| {
            let step = Step::new(set.clone()).expect("nonempty");
            self.refusal(m, &step).is_none()
        })
    }

    fn firing_sequences_defined(&self) -> bool {
        self.components.len() == 1
    }
}

/// `σ↾_{T_i}`: the part of a step sequence inside component `i`.
pub fn project(net: &CsaNet, i: usize, s: &StepSequence) -> Result<StepSequence, CsaError> {
    let component = net.component(i)?;
    crate::semantics::replay(net, s).map_err(CsaError::NotAStepSequence)?;
    Ok(s.restrict_compact(component.transitions()))
}

/// Projection of a mixed step sequence: markings restricted to component
/// `i`, steps outside it dropped together with the (unchanged) marking
/// that follows them.
pub fn project_mixed(net: &CsaNet, i: usize, mu: &MixedStepSequence) -> Result<MixedStepSequence, CsaError> {
    let component = net.component(i)?;
    let replayed = run(net, mu.first(), mu.steps()).map_err(CsaError::NotAStepSequence)?;
    if replayed.markings() != mu.markings() {
        return Err(CsaError::NotAStepSequence(SemanticsError::InvalidPartition(
            "markings do not match the steps".into(),
        )));
    }
    let mut out = MixedStepSequence::start(mu.first().restrict(component.places()));
    for (u, m) in mu.steps().iter().zip(&mu.markings()[1..]) {
        let inner: NodeSet = u.transitions().intersection(component.transitions()).cloned().collect();
        if let Ok(step) = Step::new(inner) {
            out.extend(step, m.restrict(component.places()));
        }
    }
    Ok(out)
}

/// Syn-cycles of a cso-net; they partition its transitions.
pub fn syn_cycles(net: &CsaNet) -> Result<BTreeSet<NodeSet>, CsaError> {
    if net.classify() != CsaClass::CsoNet {
        return Err(CsaError::NotACsoNet);
    }
    Ok(net.direct_syn_cycles())
}

/// Syn-cycles of a csa-net: the union of the syn-cycles of its scenarios.
pub fn syn_cycles_csa(net: &CsaNet, limits: Limits) -> Result<BTreeSet<NodeSet>, CsaError> {
    let mut out = BTreeSet::new();
    for s in csa_scenarios(net, limits)? {
        out.extend(syn_cycles(s.net())?);
    }
    Ok(out)
}

pub fn csa_is_well_formed(net: &CsaNet, limits: Limits) -> WellFormedVerdict {
    search_well_formed(net, false, limits)
}

/// A cso-net that is a co-initial subnet of its host csa-net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsaScenario {
    transitions: NodeSet,
    net: CsaNet,
}

impl CsaScenario {
    pub fn transitions(&self) -> &NodeSet {
        &self.transitions
    }

    pub fn net(&self) -> &CsaNet {
        &self.net
    }

    pub fn into_net(self) -> CsaNet {
        self.net
    }
}

/// The subnet induced by a transition set: per-component co-initial
/// subnets, the buffers produced by `T`, and the buffer arcs touching `T`.
fn induced_subnet(net: &CsaNet, transitions: &NodeSet) -> Option<CsaNet> {
    let mut components = Vec::new();
    for c in &net.components {
        let inner: NodeSet = transitions.intersection(c.transitions()).cloned().collect();
        components.push(c.coinitial_subnet(&inner).ok()?);
    }
    let buffers: NodeSet = net
        .postset_of(transitions)
        .ok()?
        .into_iter()
        .filter(|q| net.buffers.contains(q))
        .collect();
    let arcs: BTreeSet<(String, String)> = net
        .buffer_arcs
        .iter()
        .filter(|(x, y)| {
            (transitions.contains(x) && buffers.contains(y)) || (buffers.contains(x) && transitions.contains(y))
        })
        .cloned()
        .collect();
    Some(CsaNet::assemble(components, buffers, arcs))
}

/// Whether `transitions` induces a scenario: each component part is a
/// scenario set, every buffer input is produced inside the set, and the
/// induced subnet is a cso-net.
pub fn is_csa_scenario_set(net: &CsaNet, transitions: &NodeSet) -> bool {
    if !transitions.iter().all(|t| net.transitions.contains(t)) {
        return false;
    }
    for c in &net.components {
        let inner: NodeSet = transitions.intersection(c.transitions()).cloned().collect();
        if !is_scenario_set(c, &inner) {
            return false;
        }
    }
    let produced = net.postset_of(transitions).expect("known transitions");
    let pre = net.preset_of(transitions).expect("known transitions");
    if pre.iter().any(|q| net.buffers.contains(q) && !produced.contains(q)) {
        return false;
    }
    induced_subnet(net, transitions).is_some_and(|sub| sub.classify() == CsaClass::CsoNet)
}

pub(crate) fn csa_scenario_of_set(net: &CsaNet, transitions: &NodeSet) -> CsaNet {
    induced_subnet(net, transitions).expect("scenario sets induce subnets")
}

fn induced_scenario(net: &CsaNet, transitions: &NodeSet) -> CsaScenario {
    CsaScenario {
        transitions: transitions.clone(),
        net: induced_subnet(net, transitions).expect("scenario sets induce subnets"),
    }
}

pub(crate) fn csa_scenario_sets(net: &CsaNet, limits: Limits) -> Result<Vec<NodeSet>, CsaError> {
    let per_component: Vec<Vec<NodeSet>> = net
        .components
        .iter()
        .map(|c| scenario_sets(c, limits))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    let mut examined = 0usize;
    let mut index = vec![0usize; per_component.len()];
    loop {
        examined += 1;
        if examined > limits.max_items {
            return Err(CsaError::BoundExceeded(limits));
        }
        let candidate: NodeSet = index
            .iter()
            .zip(&per_component)
            .flat_map(|(&k, sets)| sets[k].iter().cloned())
            .collect();
        if is_csa_scenario_set(net, &candidate) {
            out.push(candidate);
        }
        let mut pos = 0;
        loop {
            if pos == index.len() {
                out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                return Ok(out);
            }
            index[pos] += 1;
            if index[pos] < per_component[pos].len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// All scenarios, ordered by size and then by transition set.
pub fn csa_scenarios(net: &CsaNet, limits: Limits) -> Result<Vec<CsaScenario>, CsaError> {
    Ok(csa_scenario_sets(net, limits)?.iter().map(|t| induced_scenario(net, t)).collect())
}

pub fn csa_maximal_scenarios(net: &CsaNet, limits: Limits) -> Result<Vec<CsaScenario>, CsaError> {
    let sets = csa_scenario_sets(net, limits)?;
    Ok(maximal_sets(&sets).iter().map(|t| induced_scenario(net, t)).collect())
}

/// The scenario induced by a well-formed step sequence.
pub fn csa_scenario_of(net: &CsaNet, s: &StepSequence) -> Result<CsaScenario, CsaError> {
    if let Some(fill) = is_wf_stepseq(net, s).map_err(CsaError::NotAStepSequence)? {
        return Err(CsaError::NotWellFormed(fill));
    }
    Ok(induced_scenario(net, &s.occurring()))
}

/// Coverage by scenarios; places include buffers and arcs include buffer arcs.
pub fn csa_coverage(net: &CsaNet, limits: Limits) -> Result<Coverage, CsaError> {
    let all = |n: &CsaNet| -> (NodeSet, BTreeSet<(String, String)>) {
        let places = n.places.union(&n.buffers).cloned().collect();
        let arcs = n.flow().into_iter().chain(n.buffer_arcs.iter().cloned()).collect();
        (places, arcs)
    };
    let parts: Vec<(NodeSet, NodeSet, BTreeSet<(String, String)>)> = csa_maximal_scenarios(net, limits)?
        .iter()
        .map(|s| {
            let (p, a) = all(&s.net);
            (p, s.net.transitions.clone(), a)
        })
        .collect();
    let (places, arcs) = all(net);
    Ok(Coverage::compute(&places, &net.transitions, &arcs, parts.iter().map(|(p, t, a)| (p, t, a))))
}

/// Transitions occurring in no step sequence.
pub fn redundant_transitions<S: StepSystem + ?Sized>(sys: &S, limits: Limits) -> Result<NodeSet, SemanticsError> {
    let graph = crate::semantics::marking_graph(sys, limits)?;
    let mut fired = NodeSet::new();
    for (_, edges) in &graph {
        for (u, _) in edges {
            fired.extend(u.iter().cloned());
        }
    }
    Ok(sys.transition_ids().difference(&fired).cloned().collect())
}
