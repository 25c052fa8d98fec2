//! Behavioural structured acyclic nets (bsa-nets): a lower csa-net whose
//! evolution is summarised by an upper csa-net of line-like components,
//! linked by the phase boundary relation β.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acyclic::{render_violations, AcyclicNet};
use crate::csa::{
    csa_is_well_formed, csa_scenario_sets, is_csa_scenario_set, validate_csa, CsaClass, CsaError, CsaNet,
    CsaViolation, RawCsa,
};
use crate::foundations::NodeSet;
use crate::scenarios::maximal_sets;
use crate::semantics::{
    marking_graph_from, step_sequences, BehaviourKind, Limits, Marking, Refusal, SemanticsError, Step, StepSequence,
    StepSystem,
};
use crate::wellformed::WellFormedVerdict;

/// An unvalidated bsa-net description; `beta` pairs are `(lower place, upper place)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBsa {
    pub lower: RawCsa,
    pub upper: RawCsa,
    pub beta: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Lower,
    Upper,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lower => "lower",
            Self::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum BsaViolation {
    LevelInvalid { level: Level, violations: Vec<CsaViolation> },
    LevelNotWellFormed { level: Level, verdict: WellFormedVerdict },
    ComponentCountMismatch { lower: usize, upper: usize },
    NodeClashAcrossLevels { id: String },
    UpperNotLineLike { component: usize, transition: Option<String> },
    BetaUnknownPlace { lower: String, upper: String },
    BetaComponentMismatch { lower: String, upper: String },
    BetaInitialMismatch { component: usize, expected: NodeSet, found: NodeSet },
    BetaUnreachableBoundary { transition: String, from: NodeSet, to: NodeSet },
    BoundaryCheckExceeded { component: usize, limits: Limits },
}

fn set_str(s: &NodeSet) -> String {
    Marking(s.clone()).to_string()
}

impl fmt::Display for BsaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LevelInvalid { level, violations } => write!(f, "{level} level: {}", render_violations(violations)),
            Self::LevelNotWellFormed { level, verdict } => write!(f, "{level} level: {verdict}"),
            Self::ComponentCountMismatch { lower, upper } => {
                write!(f, "{lower} lower components but {upper} upper components")
            }
            Self::NodeClashAcrossLevels { id } => write!(f, "`{id}` is used on both levels"),
            Self::UpperNotLineLike { component, transition: Some(t) } => {
                write!(f, "upper component {component} is not line-like at transition `{t}`")
            }
            Self::UpperNotLineLike { component, transition: None } => {
                write!(f, "upper component {component} must have exactly one initial place")
            }
            Self::BetaUnknownPlace { lower, upper } => {
                write!(f, "β pair ({lower}, {upper}) must join a lower place and an upper place")
            }
            Self::BetaComponentMismatch { lower, upper } => {
                write!(f, "β pair ({lower}, {upper}) joins components with different indices")
            }
            Self::BetaInitialMismatch { component, expected, found } => write!(
                f,
                "component {component}: β of the initial upper place is {} but the lower initial marking is {}",
                set_str(found),
                set_str(expected)
            ),
            Self::BetaUnreachableBoundary { transition, from, to } => write!(
                f,
                "boundary {} of `{transition}` cannot reach {}",
                set_str(from),
                set_str(to)
            ),
            Self::BoundaryCheckExceeded { component, limits } => {
                write!(f, "component {component}: reachability bound exceeded ({limits})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bsa-net: {}", render_violations(.violations))]
pub struct InvalidBsa {
    pub violations: Vec<BsaViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BsaError {
    #[error("`{0}` is not an upper place")]
    UnknownPlace(String),
    #[error("upper component {component} holds {count} marked places instead of one")]
    UpperMarkingNotSingleton { component: usize, count: usize },
    #[error("enumeration exceeded the bound ({0})")]
    BoundExceeded(Limits),
    #[error(transparent)]
    Csa(#[from] CsaError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("the {level} transitions {transitions:?} do not form a scenario")]
    NotAScenario { level: Level, transitions: NodeSet },
    #[error("the induced pair is not a bsa-net: {}", render_violations(.0))]
    InducedNotBsa(Vec<BsaViolation>),
}

/// The lower-level markings belonging to one upper place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub anchor: String,
    pub component: usize,
    pub markings: BTreeSet<Marking>,
}

/// A validated bsa-net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsaNet {
    lower: CsaNet,
    upper: CsaNet,
    beta: BTreeSet<(String, String)>,
    underlying: CsaNet,
    phases: BTreeMap<String, Phase>,
}

/// Validates a bsa-net description; both levels must be well-formed csa-nets.
pub fn validate_bsa(raw: &RawBsa) -> Result<BsaNet, InvalidBsa> {
    let mut violations = Vec::new();
    let lower = validate_csa(&raw.lower)
        .map_err(|e| violations.push(BsaViolation::LevelInvalid { level: Level::Lower, violations: e.violations }))
        .ok();
    let upper = validate_csa(&raw.upper)
        .map_err(|e| violations.push(BsaViolation::LevelInvalid { level: Level::Upper, violations: e.violations }))
        .ok();
    let (Some(lower), Some(upper)) = (lower, upper) else {
        return Err(InvalidBsa { violations });
    };
    for (level, net) in [(Level::Lower, &lower), (Level::Upper, &upper)] {
        let verdict = csa_is_well_formed(net, Limits::default());
        if !verdict.is_ok() {
            violations.push(BsaViolation::LevelNotWellFormed { level, verdict });
        }
    }
    if !violations.is_empty() {
        return Err(InvalidBsa { violations });
    }
    BsaNet::assemble(lower, upper, raw.beta.iter().cloned().collect()).map_err(|violations| InvalidBsa { violations })
}

fn beta_of<'a>(beta: &'a BTreeSet<(String, String)>, places: impl IntoIterator<Item = &'a String>) -> NodeSet {
    let places: NodeSet = places.into_iter().cloned().collect();
    beta.iter().filter(|(_, p)| places.contains(p)).map(|(r, _)| r.clone()).collect()
}

/// Forward-reachable markings of `net` from `from`, with edges.
type Graph = BTreeMap<Marking, Vec<Marking>>;

fn reach_graph(net: &AcyclicNet, from: &NodeSet, limits: Limits) -> Result<Graph, SemanticsError> {
    Ok(marking_graph_from(net, &Marking(from.clone()), limits)?
        .into_iter()
        .map(|(m, edges)| (m, edges.into_iter().map(|(_, n)| n).collect()))
        .collect())
}

/// Members of `graph` from which `target` is reachable.
fn backward(graph: &Graph, target: &Marking) -> BTreeSet<Marking> {
    let mut rev: BTreeMap<&Marking, Vec<&Marking>> = BTreeMap::new();
    for (m, succ) in graph {
        for n in succ {
            rev.entry(n).or_default().push(m);
        }
    }
    if !graph.contains_key(target) {
        return BTreeSet::new();
    }
    let mut seen = BTreeSet::from([target.clone()]);
    let mut queue = VecDeque::from([target]);
    while let Some(m) = queue.pop_front() {
        for &p in rev.get(m).map(Vec::as_slice).unwrap_or_default() {
            if seen.insert(p.clone()) {
                queue.push_back(p);
            }
        }
    }
    seen
}

impl BsaNet {
    /// Checks every bsa-net condition that does not concern the levels on
    /// their own, then computes the phase table.
    pub(crate) fn assemble(
        lower: CsaNet,
        upper: CsaNet,
        beta: BTreeSet<(String, String)>,
    ) -> Result<BsaNet, Vec<BsaViolation>> {
        let limits = Limits::default();
        let mut violations = Vec::new();
        let n = lower.components().len();
        if upper.components().len() != n {
            violations.push(BsaViolation::ComponentCountMismatch { lower: n, upper: upper.components().len() });
            return Err(violations);
        }
        let lower_nodes: NodeSet = lower.places().iter().chain(lower.transitions()).chain(lower.buffers()).cloned().collect();
        for x in upper.places().iter().chain(upper.transitions()).chain(upper.buffers()) {
            if lower_nodes.contains(x) {
                violations.push(BsaViolation::NodeClashAcrossLevels { id: x.clone() });
            }
        }
        for (i, c) in upper.components().iter().enumerate() {
            if c.initial_places().len() != 1 {
                violations.push(BsaViolation::UpperNotLineLike { component: i, transition: None });
            }
            for t in c.transitions() {
                if c.preset(t).expect("own").len() != 1 || c.postset(t).expect("own").len() != 1 {
                    violations.push(BsaViolation::UpperNotLineLike { component: i, transition: Some(t.clone()) });
                }
            }
        }
        for (r, p) in &beta {
            let lower_ok = lower.places().contains(r);
            let upper_ok = upper.places().contains(p);
            if !lower_ok || !upper_ok {
                violations.push(BsaViolation::BetaUnknownPlace { lower: r.clone(), upper: p.clone() });
            } else if lower.component_of(r) != upper.component_of(p) {
                violations.push(BsaViolation::BetaComponentMismatch { lower: r.clone(), upper: p.clone() });
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        let mut phases = BTreeMap::new();
        for i in 0..n {
            let lan = &lower.components()[i];
            let han = &upper.components()[i];
            let found = beta_of(&beta, &han.initial_places());
            if found != lan.initial_places() {
                violations.push(BsaViolation::BetaInitialMismatch {
                    component: i,
                    expected: lan.initial_places(),
                    found,
                });
            }
            for t in han.transitions() {
                let from = beta_of(&beta, han.preset(t).expect("own"));
                let to = beta_of(&beta, han.postset(t).expect("own"));
                match reach_graph(lan, &from, limits) {
                    Ok(graph) if graph.contains_key(&Marking(to.clone())) => {}
                    Ok(_) => violations.push(BsaViolation::BetaUnreachableBoundary { transition: t.clone(), from, to }),
                    Err(_) => violations.push(BsaViolation::BoundaryCheckExceeded { component: i, limits }),
                }
            }
            for p in han.places() {
                match compute_phase(lan, han, &beta, p, limits) {
                    Ok(markings) => {
                        phases.insert(p.clone(), Phase { anchor: p.clone(), component: i, markings });
                    }
                    Err(_) => violations.push(BsaViolation::BoundaryCheckExceeded { component: i, limits }),
                }
            }
        }
        if !violations.is_empty() {
            violations.dedup();
            return Err(violations);
        }

        let mut components: Vec<AcyclicNet> = lower.components().to_vec();
        components.extend(upper.components().iter().cloned());
        let buffers = lower.buffers().union(upper.buffers()).cloned().collect();
        let arcs = lower.buffer_arcs().union(upper.buffer_arcs()).cloned().collect();
        let underlying = CsaNet::assemble(components, buffers, arcs);
        Ok(BsaNet { lower, upper, beta, underlying, phases })
    }

    pub fn new(raw: &RawBsa) -> Result<Self, InvalidBsa> {
        validate_bsa(raw)
    }

    pub fn lower(&self) -> &CsaNet {
        &self.lower
    }

    pub fn upper(&self) -> &CsaNet {
        &self.upper
    }

    pub fn beta(&self) -> &BTreeSet<(String, String)> {
        &self.beta
    }

    /// The csa-net with the lower components followed by the upper ones.
    pub fn underlying(&self) -> &CsaNet {
        &self.underlying
    }

    /// `β_p`.
    pub fn beta_of(&self, p: &str) -> NodeSet {
        beta_of(&self.beta, [&p.to_owned()])
    }

    pub fn phase(&self, p: &str) -> Result<&Phase, BsaError> {
        self.phases.get(p).ok_or_else(|| BsaError::UnknownPlace(p.to_owned()))
    }

    pub fn phases(&self) -> impl Iterator<Item = &Phase> {
        self.phases.values()
    }

    /// The single upper place marked in each component, or an error.
    pub fn upper_anchors(&self, m: &Marking) -> Result<Vec<String>, BsaError> {
        self.upper
            .components()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let marked: Vec<&String> = c.places().iter().filter(|p| m.contains(p)).collect();
                match marked.as_slice() {
                    [p] => Ok((*p).clone()),
                    _ => Err(BsaError::UpperMarkingNotSingleton { component: i, count: marked.len() }),
                }
            })
            .collect()
    }

    /// Every component's lower marking lies in the phase of its marked upper place.
    ///
    /// The marking is not checked for reachability.
    pub fn is_phase_consistent(&self, m: &Marking) -> Result<bool, BsaError> {
        let anchors = self.upper_anchors(m)?;
        Ok(anchors.iter().enumerate().all(|(i, p)| {
            let part = m.restrict(self.lower.components()[i].places());
            self.phases[p].markings.contains(&part)
        }))
    }

    fn consistent(&self, m: &Marking) -> bool {
        self.is_phase_consistent(m).unwrap_or(false)
    }

    pub fn to_raw(&self) -> RawBsa {
        RawBsa {
            lower: self.lower.to_raw(),
            upper: self.upper.to_raw(),
            beta: self.beta.iter().cloned().collect(),
        }
    }
}

fn compute_phase(
    lan: &AcyclicNet,
    han: &AcyclicNet,
    beta: &BTreeSet<(String, String)>,
    p: &String,
    limits: Limits,
) -> Result<BTreeSet<Marking>, SemanticsError> {
    let start = beta_of(beta, [p]);
    let mut markings = BTreeSet::from([Marking(start.clone())]);
    let next = han.postset(p).expect("own place");
    if next.is_empty() {
        return Ok(markings);
    }
    let graph = reach_graph(lan, &start, limits)?;
    for t in next {
        let target = Marking(beta_of(beta, han.postset(t).expect("own transition")));
        markings.extend(backward(&graph, &target));
    }
    Ok(markings)
}

impl StepSystem for BsaNet {
    fn initial_marking(&self) -> Marking {
        self.underlying.initial_marking()
    }

    fn transition_ids(&self) -> &NodeSet {
        self.underlying.transitions()
    }

    fn pre(&self, t: &str) -> &NodeSet {
        self.underlying.pre(t)
    }

    fn post(&self, t: &str) -> &NodeSet {
        self.underlying.post(t)
    }

    fn refusal(&self, m: &Marking, u: &Step) -> Option<Refusal> {
        if let Some(r) = self.underlying.refusal(m, u) {
            return Some(r);
        }
        if !self.consistent(m) {
            return Some(Refusal::SourcePhase { marking: m.clone() });
        }
        let target = self.underlying.fire_unchecked(m, u);
        (!self.consistent(&target)).then_some(Refusal::TargetPhase { marking: target })
    }

    fn enabled_steps(&self, m: &Marking, singletons_only: bool) -> Vec<Step> {
        if !self.consistent(m) {
            return Vec::new();
        }
        self.underlying
            .enabled_steps(m, singletons_only)
            .into_iter()
            .filter(|u| self.consistent(&self.underlying.fire_unchecked(m, u)))
            .collect()
    }

    fn firing_sequences_defined(&self) -> bool {
        self.underlying.firing_sequences_defined()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BsoVerdict {
    /// Both levels are cso-nets and `witness` uses every transition.
    Bso { witness: StepSequence },
    NotBso { reason: String },
    Unknown { limits: Limits },
}

impl BsoVerdict {
    pub fn is_bso(&self) -> bool {
        matches!(self, Self::Bso { .. })
    }
}

/// Searches for a step sequence using every transition.
fn covering_sequence(b: &BsaNet, limits: Limits) -> Result<Option<StepSequence>, Limits> {
    let all = b.transition_ids().clone();
    let mut seen: HashSet<(Marking, NodeSet)> = HashSet::new();
    let mut path = Vec::new();
    fn go(
        b: &BsaNet,
        all: &NodeSet,
        m: Marking,
        fired: NodeSet,
        seen: &mut HashSet<(Marking, NodeSet)>,
        path: &mut Vec<Step>,
        limits: Limits,
    ) -> Result<bool, Limits> {
        if fired == *all {
            return Ok(true);
        }
        if !seen.insert((m.clone(), fired.clone())) {
            return Ok(false);
        }
        if seen.len() > limits.max_items || path.len() >= limits.max_depth {
            return Err(limits);
        }
        for u in b.enabled_steps(&m, false) {
            let next = b.fire_unchecked(&m, &u);
            let mut more = fired.clone();
            more.extend(u.iter().cloned());
            path.push(u);
            if go(b, all, next, more, seen, path, limits)? {
                return Ok(true);
            }
            path.pop();
        }
        Ok(false)
    }
    let found = go(b, &all, b.initial_marking(), NodeSet::new(), &mut seen, &mut path, limits)?;
    Ok(found.then_some(StepSequence(path)))
}

pub fn classify_bso(b: &BsaNet, limits: Limits) -> BsoVerdict {
    for (level, net) in [(Level::Lower, &b.lower), (Level::Upper, &b.upper)] {
        if net.classify() != CsaClass::CsoNet {
            return BsoVerdict::NotBso { reason: format!("the {level} level is not a cso-net") };
        }
    }
    match covering_sequence(b, limits) {
        Ok(Some(witness)) => BsoVerdict::Bso { witness },
        Ok(None) => BsoVerdict::NotBso { reason: "no step sequence uses every transition".into() },
        Err(limits) => BsoVerdict::Unknown { limits },
    }
}

/// A scenario: a bso-net built from a lower and an upper csa scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsaScenario {
    pub lower_transitions: NodeSet,
    pub upper_transitions: NodeSet,
    pub net: BsaNet,
    pub witness: StepSequence,
}

impl BsaScenario {
    pub fn transitions(&self) -> NodeSet {
        self.lower_transitions.union(&self.upper_transitions).cloned().collect()
    }
}

/// A pair of level scenarios whose combination satisfies the bsa-net
/// conditions but which no step sequence covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncoveredCandidate {
    pub lower_transitions: NodeSet,
    pub upper_transitions: NodeSet,
    pub net: BsaNet,
}

/// Result of examining every pair of lower and upper csa scenarios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioAnalysis {
    pub scenarios: Vec<BsaScenario>,
    /// Pairs that are bsa-nets but not bso-nets.
    pub uncovered: Vec<UncoveredCandidate>,
    /// Pairs rejected because the restricted β breaks a bsa-net condition.
    pub rejected: Vec<(NodeSet, NodeSet, Vec<BsaViolation>)>,
}

impl ScenarioAnalysis {
    pub fn maximal(&self) -> Vec<&BsaScenario> {
        let sets: Vec<NodeSet> = self.scenarios.iter().map(BsaScenario::transitions).collect();
        let max = maximal_sets(&sets);
        self.scenarios.iter().filter(|s| max.contains(&s.transitions())).collect()
    }
}

fn level_scenario(net: &CsaNet, t: &NodeSet) -> CsaNet {
    debug_assert!(is_csa_scenario_set(net, t));
    crate::csa::csa_scenario_of_set(net, t)
}

pub fn scenario_analysis(b: &BsaNet, limits: Limits) -> Result<ScenarioAnalysis, BsaError> {
    let lower_sets = csa_scenario_sets(&b.lower, limits)?;
    let upper_sets = csa_scenario_sets(&b.upper, limits)?;
    if lower_sets.len().saturating_mul(upper_sets.len()) > limits.max_items {
        return Err(BsaError::BoundExceeded(limits));
    }
    let mut analysis = ScenarioAnalysis { scenarios: Vec::new(), uncovered: Vec::new(), rejected: Vec::new() };
    for lt in &lower_sets {
        let lower = level_scenario(&b.lower, lt);
        for ut in &upper_sets {
            let upper = level_scenario(&b.upper, ut);
            let places: NodeSet = lower.places().union(upper.places()).cloned().collect();
            let beta = b.beta.iter().filter(|(r, p)| places.contains(r) && places.contains(p)).cloned().collect();
            match BsaNet::assemble(lower.clone(), upper, beta) {
                Err(violations) => analysis.rejected.push((lt.clone(), ut.clone(), violations)),
                Ok(net) => match covering_sequence(&net, limits) {
                    Err(l) => return Err(BsaError::BoundExceeded(l)),
                    Ok(Some(witness)) => analysis.scenarios.push(BsaScenario {
                        lower_transitions: lt.clone(),
                        upper_transitions: ut.clone(),
                        net,
                        witness,
                    }),
                    Ok(None) => analysis.uncovered.push(UncoveredCandidate {
                        lower_transitions: lt.clone(),
                        upper_transitions: ut.clone(),
                        net,
                    }),
                },
            }
        }
    }
    Ok(analysis)
}

/// The scenario whose transitions are those occurring in a step sequence.
pub fn bsa_scenario_of(b: &BsaNet, s: &StepSequence) -> Result<BsaScenario, BsaError> {
    crate::semantics::replay(b, s)?;
    let t = s.occurring();
    let mut levels = Vec::new();
    for (level, net) in [(Level::Lower, &b.lower), (Level::Upper, &b.upper)] {
        let part: NodeSet = t.intersection(net.transitions()).cloned().collect();
        if !is_csa_scenario_set(net, &part) {
            return Err(BsaError::NotAScenario { level, transitions: part });
        }
        levels.push((part.clone(), level_scenario(net, &part)));
    }
    let (upper_t, upper) = levels.pop().expect("two levels");
    let (lower_t, lower) = levels.pop().expect("two levels");
    let places: NodeSet = lower.places().union(upper.places()).cloned().collect();
    let beta = b.beta.iter().filter(|(r, p)| places.contains(r) && places.contains(p)).cloned().collect();
    let net = BsaNet::assemble(lower, upper, beta).map_err(BsaError::InducedNotBsa)?;
    Ok(BsaScenario { lower_transitions: lower_t, upper_transitions: upper_t, net, witness: s.clone() })
}

pub fn bsa_scenarios(b: &BsaNet, limits: Limits) -> Result<Vec<BsaScenario>, BsaError> {
    Ok(scenario_analysis(b, limits)?.scenarios)
}

pub fn bsa_maximal_scenarios(b: &BsaNet, limits: Limits) -> Result<Vec<BsaScenario>, BsaError> {
    let analysis = scenario_analysis(b, limits)?;
    Ok(analysis.maximal().into_iter().cloned().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BsaWfViolation {
    /// A step sequence of the net that no scenario generates.
    SequenceOutsideScenarios { sequence: StepSequence },
    /// A scenario step sequence the net itself cannot execute.
    ScenarioSequenceRejected { sequence: StepSequence, lower: NodeSet, upper: NodeSet },
    /// No maximal step sequence of the net restricts to a maximal one of this scenario.
    UnrealizedScenario { lower: NodeSet, upper: NodeSet },
    /// A maximal pair of level scenarios forming a bsa-net that no step sequence covers.
    UncoverableCandidate { lower: NodeSet, upper: NodeSet },
}

impl fmt::Display for BsaWfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SequenceOutsideScenarios { sequence } => {
                write!(f, "step sequence {sequence} is generated by no scenario")
            }
            Self::ScenarioSequenceRejected { sequence, .. } => {
                write!(f, "scenario step sequence {sequence} is not a step sequence of the net")
            }
            Self::UnrealizedScenario { lower, upper } => write!(
                f,
                "maximal scenario (lower {}, upper {}) is not realised by any maximal step sequence",
                set_str(lower),
                set_str(upper)
            ),
            Self::UncoverableCandidate { lower, upper } => write!(
                f,
                "scenario candidate (lower {}, upper {}) can never be executed in full",
                set_str(lower),
                set_str(upper)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BsaWellFormedVerdict {
    Ok,
    NotOk { violation: BsaWfViolation },
    Unknown { limits: Limits },
}

impl BsaWellFormedVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Self::Ok)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Self::Unknown { .. })
    }
}

impl fmt::Display for BsaWellFormedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ok => f.write_str("well-formed"),
            Self::NotOk { violation } => write!(f, "not well-formed: {violation}"),
            Self::Unknown { limits } => write!(f, "unknown: bound exceeded ({limits})"),
        }
    }
}

/// Outcome of each well-formedness condition; `None` means it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BsaWellFormedReport {
    /// Step sequences of the net versus those of its scenarios.
    pub sequences: Option<BsaWfViolation>,
    /// Every maximal scenario realised by a maximal step sequence.
    pub realisation: Option<BsaWfViolation>,
}

impl BsaWellFormedReport {
    pub fn verdict(&self) -> BsaWellFormedVerdict {
        match self.sequences.clone().or_else(|| self.realisation.clone()) {
            None => BsaWellFormedVerdict::Ok,
            Some(violation) => BsaWellFormedVerdict::NotOk { violation },
        }
    }
}

/// Checks that the step sequences of the net are exactly those of its
/// scenarios, and that every maximal scenario is realised by a maximal step
/// sequence of the net. Maximal pairs of level scenarios that form a
/// bsa-net but can never be executed in full count as unrealised too.
pub fn bsa_is_well_formed(b: &BsaNet, limits: Limits) -> BsaWellFormedVerdict {
    match bsa_well_formed_report(b, limits) {
        Ok(report) => report.verdict(),
        Err(limits) => BsaWellFormedVerdict::Unknown { limits },
    }
}

fn bounded(limits: Limits) -> impl Fn(SemanticsError) -> Limits {
    move |e| match e {
        SemanticsError::BoundExceeded { limits, .. } => limits,
        _ => limits,
    }
}

pub fn bsa_well_formed_report(b: &BsaNet, limits: Limits) -> Result<BsaWellFormedReport, Limits> {
    let analysis = scenario_analysis(b, limits).map_err(|_| limits)?;
    Ok(BsaWellFormedReport {
        sequences: sequences_condition(b, &analysis, limits)?,
        realisation: realisation_condition(b, &analysis, limits)?,
    })
}

fn sequences_condition(
    b: &BsaNet,
    analysis: &ScenarioAnalysis,
    limits: Limits,
) -> Result<Option<BsaWfViolation>, Limits> {
    let own = step_sequences(b, BehaviourKind::Sseq, limits).map_err(bounded(limits))?;
    let mut union = BTreeSet::new();
    for s in &analysis.scenarios {
        for sigma in step_sequences(&s.net, BehaviourKind::Sseq, limits).map_err(bounded(limits))? {
            if !own.contains(&sigma) {
                return Ok(Some(BsaWfViolation::ScenarioSequenceRejected {
                    sequence: sigma,
                    lower: s.lower_transitions.clone(),
                    upper: s.upper_transitions.clone(),
                }));
            }
            union.insert(sigma);
        }
    }
    // shortest first, so the witness is easy to read
    let mut missing: Vec<&StepSequence> = own.difference(&union).collect();
    missing.sort_by_key(|s| s.len());
    Ok(missing.first().map(|s| BsaWfViolation::SequenceOutsideScenarios { sequence: (*s).clone() }))
}

fn realisation_condition(
    b: &BsaNet,
    analysis: &ScenarioAnalysis,
    limits: Limits,
) -> Result<Option<BsaWfViolation>, Limits> {
    let union = |l: &NodeSet, u: &NodeSet| -> NodeSet { l.union(u).cloned().collect() };
    let candidates: Vec<NodeSet> = analysis
        .scenarios
        .iter()
        .map(BsaScenario::transitions)
        .chain(analysis.uncovered.iter().map(|c| union(&c.lower_transitions, &c.upper_transitions)))
        .collect();
    let maximal_candidates = maximal_sets(&candidates);
    for c in &analysis.uncovered {
        if maximal_candidates.contains(&union(&c.lower_transitions, &c.upper_transitions)) {
            return Ok(Some(BsaWfViolation::UncoverableCandidate {
                lower: c.lower_transitions.clone(),
                upper: c.upper_transitions.clone(),
            }));
        }
    }

    let maximal = step_sequences(b, BehaviourKind::Maxsseq, limits).map_err(bounded(limits))?;
    for s in analysis.maximal() {
        let t = s.transitions();
        let theirs = step_sequences(&s.net, BehaviourKind::Maxsseq, limits).map_err(bounded(limits))?;
        if !maximal.iter().any(|sigma| theirs.contains(&sigma.restrict_compact(&t))) {
            return Ok(Some(BsaWfViolation::UnrealizedScenario {
                lower: s.lower_transitions.clone(),
                upper: s.upper_transitions.clone(),
            }));
        }
    }
    Ok(None)
}
