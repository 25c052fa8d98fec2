//! Step semantics: markings, steps, firing, (mixed) step sequences and the
//! behaviour sets of a net.
//!
//! Everything here is generic over [`StepSystem`], which acyclic nets, csa-nets
//! and bsa-nets all implement. Firing always uses `(M ∪ U•) \ •U`; the usual
//! place/transition rule `(M \ •U) ∪ U•` is only available as a diagnostic
//! ([`fire_standard`]).

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acyclic::AcyclicNet;
use crate::foundations::{write_set, NodeSet, SetSequence};

/// A set of marked places.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marking(pub NodeSet);

impl Marking {
    pub fn new<I, S>(places: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(places.into_iter().map(Into::into).collect())
    }

    pub fn places(&self) -> &NodeSet {
        &self.0
    }

    pub fn contains(&self, p: &str) -> bool {
        self.0.contains(p)
    }

    pub fn restrict(&self, to: &NodeSet) -> Marking {
        Marking(self.0.intersection(to).cloned().collect())
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, &self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a step must contain at least one transition")]
pub struct EmptyStep;

/// A nonempty set of transitions fired together.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "NodeSet", into = "NodeSet")]
pub struct Step(NodeSet);

impl Step {
    pub fn new(transitions: NodeSet) -> Result<Self, EmptyStep> {
        if transitions.is_empty() {
            Err(EmptyStep)
        } else {
            Ok(Self(transitions))
        }
    }

    pub fn of<I, S>(transitions: I) -> Result<Self, EmptyStep>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(transitions.into_iter().map(Into::into).collect())
    }

    pub fn singleton(t: impl Into<String>) -> Self {
        Self(NodeSet::from([t.into()]))
    }

    pub fn transitions(&self) -> &NodeSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }

    pub fn contains(&self, t: &str) -> bool {
        self.0.contains(t)
    }
}

impl TryFrom<NodeSet> for Step {
    type Error = EmptyStep;

    fn try_from(value: NodeSet) -> Result<Self, Self::Error> {
        Step::new(value)
    }
}

impl From<Step> for NodeSet {
    fn from(step: Step) -> Self {
        step.0
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            f.write_str(self.0.first().expect("nonempty"))
        } else {
            write_set(f, &self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("unbalanced braces in `{0}`")]
    Unbalanced(String),
    #[error("empty step in `{0}`")]
    EmptyStep(String),
}

/// Accepts `{p1,p2}`, `p1,p2`, `p1 p2`, and `{}` or `∅` for the empty marking.
impl FromStr for Marking {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = match (t.strip_prefix('{'), t.ends_with('}')) {
            (Some(rest), true) => &rest[..rest.len() - 1],
            (None, false) => t,
            _ => return Err(NotationError::Unbalanced(s.to_owned())),
        };
        if inner.contains(['{', '}']) {
            return Err(NotationError::Unbalanced(s.to_owned()));
        }
        if inner.trim() == "∅" {
            return Ok(Marking::default());
        }
        Ok(Marking::new(inner.split([',', ' ']).map(str::trim).filter(|p| !p.is_empty())))
    }
}

impl FromStr for Step {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let seq: StepSequence = s.parse()?;
        match seq.0.as_slice() {
            [one] => Ok(one.clone()),
            _ => Err(NotationError::Unbalanced(s.to_owned())),
        }
    }
}

/// A step sequence `U₁…U_k`; empty is `λ`.
///
/// Written notation: singleton steps as bare names, larger steps in braces,
/// separated by whitespace, e.g. `a {b,c} d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StepSequence(pub Vec<Step>);

impl StepSequence {
    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `⋃σ`.
    pub fn occurring(&self) -> NodeSet {
        self.0.iter().flat_map(|u| u.0.iter().cloned()).collect()
    }

    pub fn as_set_sequence(&self) -> SetSequence {
        SetSequence(self.0.iter().map(|u| u.0.clone()).collect())
    }

    /// `σ↾_X` as a step sequence.
    pub fn restrict_compact(&self, to: &NodeSet) -> StepSequence {
        StepSequence(
            self.as_set_sequence()
                .restrict_compact(to)
                .0
                .into_iter()
                .map(|s| Step::new(s).expect("compact restriction drops empty sets"))
                .collect(),
        )
    }

    pub fn is_firing_sequence(&self) -> bool {
        self.0.iter().all(|u| u.len() == 1)
    }

    pub fn push(&mut self, step: Step) {
        self.0.push(step);
    }
}

impl fmt::Display for StepSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("λ");
        }
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{u}")?;
        }
        Ok(())
    }
}

impl FromStr for StepSequence {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "λ" {
            return Ok(StepSequence::default());
        }
        let mut steps = Vec::new();
        let mut chars = trimmed.chars().peekable();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c == '{' {
                chars.next();
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some('{') | None => return Err(NotationError::Unbalanced(s.to_owned())),
                        Some(x) => body.push(x),
                    }
                }
                let set: NodeSet = body
                    .split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(str::to_owned)
                    .collect();
                steps.push(Step::new(set).map_err(|_| NotationError::EmptyStep(s.to_owned()))?);
            } else if c == '}' || c == ',' {
                return Err(NotationError::Unbalanced(s.to_owned()));
            } else {
                let mut name = String::new();
                while let Some(&x) = chars.peek() {
                    if x.is_whitespace() || x == '{' || x == '}' || x == ',' {
                        break;
                    }
                    name.push(x);
                    chars.next();
                }
                steps.push(Step::singleton(name));
            }
        }
        Ok(StepSequence(steps))
    }
}

/// `M₀ U₁ M₁ … U_k M_k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MixedStepSequence {
    markings: Vec<Marking>,
    steps: Vec<Step>,
}

impl MixedStepSequence {
    pub fn start(m0: Marking) -> Self {
        Self { markings: vec![m0], steps: Vec::new() }
    }

    /// Builds from parts; `markings.len()` must be `steps.len() + 1`.
    pub fn from_parts(markings: Vec<Marking>, steps: Vec<Step>) -> Option<Self> {
        (markings.len() == steps.len() + 1).then_some(Self { markings, steps })
    }

    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn first(&self) -> &Marking {
        &self.markings[0]
    }

    pub fn last(&self) -> &Marking {
        self.markings.last().expect("at least one marking")
    }

    pub fn step_sequence(&self) -> StepSequence {
        StepSequence(self.steps.clone())
    }

    pub fn extend(&mut self, step: Step, marking: Marking) {
        self.steps.push(step);
        self.markings.push(marking);
    }
}

impl fmt::Display for MixedStepSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.markings[0])?;
        for (u, m) in self.steps.iter().zip(&self.markings[1..]) {
            write!(f, " {u} {m}")?;
        }
        Ok(())
    }
}

/// Why an enabling check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Refusal {
    /// Some pre-places are neither marked nor supplied by the step itself.
    Underlying { missing: NodeSet },
    /// The source marking is not phase-consistent.
    SourcePhase { marking: Marking },
    /// The marking the step would produce is not phase-consistent.
    TargetPhase { marking: Marking },
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Underlying { missing } => {
                f.write_str("missing places ")?;
                write_set(f, missing)
            }
            Self::SourcePhase { marking } => write!(f, "source marking {marking} is not phase-consistent"),
            Self::TargetPhase { marking } => write!(f, "target marking {marking} is not phase-consistent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("{first} and {second} share pre-place {place}, so they cannot form a step")]
    NotAStep { first: String, second: String, place: String },
    /// `position` is the 1-based place of the step in a run, when there is one.
    #[error("step {step} is not enabled{}: {refusal}", .position.map(|i| format!(" at step {i}")).unwrap_or_default())]
    StepNotEnabled { position: Option<usize>, step: Step, refusal: Refusal },
    #[error("{what} exceeded the enumeration bound ({limits})")]
    BoundExceeded { what: &'static str, limits: Limits, partial: Option<Box<Behaviour>> },
    #[error("firing sequences are not defined for this net")]
    FiringSequencesUndefined,
    #[error("parts do not partition the step: {0}")]
    InvalidPartition(String),
    #[error(transparent)]
    Notation(#[from] NotationError),
}

impl SemanticsError {
    pub fn is_bound_exceeded(&self) -> bool {
        matches!(self, Self::BoundExceeded { .. })
    }
}

/// Enumeration bounds: result count and sequence length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_items: usize,
    pub max_depth: usize,
}

impl Limits {
    pub const DEFAULT_MAX_ITEMS: usize = 100_000;
    pub const DEFAULT_MAX_DEPTH: usize = 64;

    pub fn new(max_items: usize, max_depth: usize) -> Self {
        Self { max_items: max_items.max(1), max_depth: max_depth.max(1) }
    }

    pub fn items(max_items: usize) -> Self {
        Self::new(max_items, Self::DEFAULT_MAX_DEPTH)
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_items: Self::DEFAULT_MAX_ITEMS, max_depth: Self::DEFAULT_MAX_DEPTH }
    }
}

impl fmt::Display for Limits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} items, depth {}", self.max_items, self.max_depth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BehaviourKind {
    Sseq,
    Mixsseq,
    Maxsseq,
    Maxmixsseq,
    Reach,
    Finreach,
    Fseq,
}

impl FromStr for BehaviourKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "sseq" => Self::Sseq,
            "mixsseq" => Self::Mixsseq,
            "maxsseq" => Self::Maxsseq,
            "maxmixsseq" => Self::Maxmixsseq,
            "reach" => Self::Reach,
            "finreach" => Self::Finreach,
            "fseq" => Self::Fseq,
            other => return Err(format!("unknown behaviour `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BehaviourQuery {
    pub kind: BehaviourKind,
    pub limits: Limits,
}

impl BehaviourQuery {
    pub fn new(kind: BehaviourKind) -> Self {
        Self { kind, limits: Limits::default() }
    }

    pub fn with_limits(kind: BehaviourKind, limits: Limits) -> Self {
        Self { kind, limits }
    }
}

/// An enumerated behaviour set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "items", rename_all = "snake_case")]
pub enum Behaviour {
    Sequences(BTreeSet<StepSequence>),
    Mixed(BTreeSet<MixedStepSequence>),
    Markings(BTreeSet<Marking>),
}

impl Behaviour {
    pub fn len(&self) -> usize {
        match self {
            Self::Sequences(s) => s.len(),
            Self::Mixed(s) => s.len(),
            Self::Markings(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_sequences(self) -> Option<BTreeSet<StepSequence>> {
        match self {
            Self::Sequences(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_mixed(self) -> Option<BTreeSet<MixedStepSequence>> {
        match self {
            Self::Mixed(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_markings(self) -> Option<BTreeSet<Marking>> {
        match self {
            Self::Markings(s) => Some(s),
            _ => None,
        }
    }
}

/// Anything with a step semantics over named transitions and places.
pub trait StepSystem {
    fn initial_marking(&self) -> Marking;

    fn transition_ids(&self) -> &NodeSet;

    /// Pre-places of a known transition.
    fn pre(&self, t: &str) -> &NodeSet;

    /// Post-places of a known transition.
    fn post(&self, t: &str) -> &NodeSet;

    /// Enabling check for a step already known to be well-typed and pre-disjoint.
    fn refusal(&self, m: &Marking, u: &Step) -> Option<Refusal>;

    /// Every enabled step at `m`, in canonical order.
    fn enabled_steps(&self, m: &Marking, singletons_only: bool) -> Vec<Step>;

    fn firing_sequences_defined(&self) -> bool {
        true
    }

    fn fire_unchecked(&self, m: &Marking, u: &Step) -> Marking {
        let mut next = m.0.clone();
        for t in u.iter() {
            next.extend(self.post(t).iter().cloned());
        }
        for t in u.iter() {
            for p in self.pre(t) {
                next.remove(p);
            }
        }
        Marking(next)
    }
}

/// Checks that every transition is known and that presets are pairwise disjoint.
pub fn check_step<S: StepSystem + ?Sized>(sys: &S, u: &Step) -> Result<(), SemanticsError> {
    if let Some(t) = u.iter().find(|t| !sys.transition_ids().contains(*t)) {
        return Err(SemanticsError::UnknownTransition(t.clone()));
    }
    let ts: Vec<&String> = u.iter().collect();
    for (i, t) in ts.iter().enumerate() {
        for v in &ts[i + 1..] {
            if let Some(p) = sys.pre(t).intersection(sys.pre(v)).next() {
                return Err(SemanticsError::NotAStep {
                    first: (*t).clone(),
                    second: (*v).clone(),
                    place: p.clone(),
                });
            }
        }
    }
    Ok(())
}

pub fn enabled_step<S: StepSystem + ?Sized>(sys: &S, m: &Marking, u: &Step) -> Result<bool, SemanticsError> {
    check_step(sys, u)?;
    Ok(sys.refusal(m, u).is_none())
}

pub fn fire<S: StepSystem + ?Sized>(sys: &S, m: &Marking, u: &Step) -> Result<Marking, SemanticsError> {
    check_step(sys, u)?;
    match sys.refusal(m, u) {
        None => Ok(sys.fire_unchecked(m, u)),
        Some(refusal) => Err(SemanticsError::StepNotEnabled { position: None, step: u.clone(), refusal }),
    }
}

/// The standard place/transition firing rule `(M \ •U) ∪ U•`, for comparison only.
pub fn fire_standard<S: StepSystem + ?Sized>(sys: &S, m: &Marking, u: &Step) -> Marking {
    let mut next = m.0.clone();
    for t in u.iter() {
        for p in sys.pre(t) {
            next.remove(p);
        }
    }
    for t in u.iter() {
        next.extend(sys.post(t).iter().cloned());
    }
    Marking(next)
}

/// Executes `steps` from `m0`, recording every intermediate marking.
pub fn run<S: StepSystem + ?Sized>(sys: &S, m0: &Marking, steps: &[Step]) -> Result<MixedStepSequence, SemanticsError> {
    let mut mixed = MixedStepSequence::start(m0.clone());
    for (i, u) in steps.iter().enumerate() {
        let next = fire(sys, mixed.last(), u).map_err(|e| match e {
            SemanticsError::StepNotEnabled { step, refusal, .. } => {
                SemanticsError::StepNotEnabled { position: Some(i + 1), step, refusal }
            }
            other => other,
        })?;
        mixed.extend(u.clone(), next);
    }
    Ok(mixed)
}

/// Runs a step sequence from the initial marking.
pub fn replay<S: StepSystem + ?Sized>(sys: &S, seq: &StepSequence) -> Result<MixedStepSequence, SemanticsError> {
    run(sys, &sys.initial_marking(), seq.steps())
}

/// Executes an enabled step as the ordered sequence of its parts.
pub fn serialize<S: StepSystem + ?Sized>(
    sys: &S,
    m: &Marking,
    u: &Step,
    parts: &[Step],
) -> Result<MixedStepSequence, SemanticsError> {
    fire(sys, m, u)?;
    let mut seen = NodeSet::new();
    for part in parts {
        for t in part.iter() {
            if !u.contains(t) {
                return Err(SemanticsError::InvalidPartition(format!("{t} is not in {u}")));
            }
            if !seen.insert(t.clone()) {
                return Err(SemanticsError::InvalidPartition(format!("{t} appears twice")));
            }
        }
    }
    if seen != *u.transitions() {
        return Err(SemanticsError::InvalidPartition(format!("parts do not cover {u}")));
    }
    run(sys, m, parts)
}

/// Enumerates the pre-disjoint subsets of `candidates` (sorted), calling
/// `accept` on each nonempty one.
pub(crate) fn pre_disjoint_subsets<S: StepSystem + ?Sized>(
    sys: &S,
    candidates: &[String],
    singletons_only: bool,
    mut accept: impl FnMut(&NodeSet) -> bool,
) -> Vec<Step> {
    let mut out = BTreeSet::new();
    if singletons_only {
        for t in candidates {
            let set = NodeSet::from([t.clone()]);
            if accept(&set) {
                out.insert(Step(set));
            }
        }
        return out.into_iter().collect();
    }
    fn go<S: StepSystem + ?Sized>(
        sys: &S,
        candidates: &[String],
        from: usize,
        chosen: &mut NodeSet,
        used_pre: &mut NodeSet,
        accept: &mut dyn FnMut(&NodeSet) -> bool,
        out: &mut BTreeSet<Step>,
    ) {
        for i in from..candidates.len() {
            let t = &candidates[i];
            let pre = sys.pre(t);
            if !pre.is_disjoint(used_pre) {
                continue;
            }
            chosen.insert(t.clone());
            used_pre.extend(pre.iter().cloned());
            if accept(chosen) {
                out.insert(Step(chosen.clone()));
            }
            go(sys, candidates, i + 1, chosen, used_pre, accept, out);
            chosen.remove(t);
            for p in pre {
                used_pre.remove(p);
            }
        }
    }
    go(sys, candidates, 0, &mut NodeSet::new(), &mut NodeSet::new(), &mut accept, &mut out);
    out.into_iter().collect()
}

impl StepSystem for AcyclicNet {
    fn initial_marking(&self) -> Marking {
        Marking(self.initial_places())
    }

    fn transition_ids(&self) -> &NodeSet {
        self.transitions()
    }

    fn pre(&self, t: &str) -> &NodeSet {
        self.preset(t).expect("known transition")
    }

    fn post(&self, t: &str) -> &NodeSet {
        self.postset(t).expect("known transition")
    }

    fn refusal(&self, m: &Marking, u: &Step) -> Option<Refusal> {
        let missing: NodeSet = u
            .iter()
            .flat_map(|t| self.pre(t).iter())
            .filter(|p| !m.contains(p))
            .cloned()
            .collect();
        (!missing.is_empty()).then_some(Refusal::Underlying { missing })
    }

    fn enabled_steps(&self, m: &Marking, singletons_only: bool) -> Vec<Step> {
        let candidates: Vec<String> = self
            .transitions()
            .iter()
            .filter(|t| self.pre(t).is_subset(&m.0))
            .cloned()
            .collect();
        pre_disjoint_subsets(self, &candidates, singletons_only, |_| true)
    }
}

type StepCache = HashMap<Marking, Rc<Vec<Step>>>;

fn cached_steps<S: StepSystem + ?Sized>(sys: &S, cache: &mut StepCache, m: &Marking, singletons: bool) -> Rc<Vec<Step>> {
    if let Some(steps) = cache.get(m) {
        return Rc::clone(steps);
    }
    let steps = Rc::new(sys.enabled_steps(m, singletons));
    cache.insert(m.clone(), Rc::clone(&steps));
    steps
}

/// Computes one of the behaviour sets from the initial marking.
pub fn behaviours<S: StepSystem + ?Sized>(sys: &S, query: BehaviourQuery) -> Result<Behaviour, SemanticsError> {
    match query.kind {
        BehaviourKind::Reach => reachable_markings(sys, query.limits).map(Behaviour::Markings),
        BehaviourKind::Finreach => final_markings(sys, query.limits).map(Behaviour::Markings),
        BehaviourKind::Fseq if !sys.firing_sequences_defined() => Err(SemanticsError::FiringSequencesUndefined),
        kind => enumerate_sequences(sys, kind, query.limits),
    }
}

fn enumerate_sequences<S: StepSystem + ?Sized>(
    sys: &S,
    kind: BehaviourKind,
    limits: Limits,
) -> Result<Behaviour, SemanticsError> {
    let singletons = kind == BehaviourKind::Fseq;
    let maximal_only = matches!(kind, BehaviourKind::Maxsseq | BehaviourKind::Maxmixsseq);
    let mixed = matches!(kind, BehaviourKind::Mixsseq | BehaviourKind::Maxmixsseq);

    let mut cache = StepCache::new();
    let mut found: Vec<MixedStepSequence> = Vec::new();
    let mut exceeded = false;

    // Explicit stack of (mixed prefix, enabled steps at its end, next index).
    let start = MixedStepSequence::start(sys.initial_marking());
    let steps0 = cached_steps(sys, &mut cache, start.last(), singletons);
    let mut stack: Vec<(MixedStepSequence, Rc<Vec<Step>>, usize)> = vec![(start, steps0, 0)];
    if !maximal_only || stack[0].1.is_empty() {
        found.push(stack[0].0.clone());
    }

    while let Some((prefix, steps, next)) = stack.last_mut() {
        if *next >= steps.len() {
            stack.pop();
            continue;
        }
        let u = steps[*next].clone();
        *next += 1;
        if prefix.steps().len() >= limits.max_depth {
            exceeded = true;
            break;
        }
        let m = sys.fire_unchecked(prefix.last(), &u);
        let mut longer = prefix.clone();
        longer.extend(u, m);
        let enabled = cached_steps(sys, &mut cache, longer.last(), singletons);
        if !maximal_only || enabled.is_empty() {
            found.push(longer.clone());
            if found.len() > limits.max_items {
                found.pop();
                exceeded = true;
                break;
            }
        }
        stack.push((longer, enabled, 0));
    }

    let result = if mixed {
        Behaviour::Mixed(found.into_iter().collect())
    } else {
        Behaviour::Sequences(found.into_iter().map(|m| m.step_sequence()).collect())
    };
    if exceeded {
        Err(SemanticsError::BoundExceeded { what: "sequence enumeration", limits, partial: Some(Box::new(result)) })
    } else {
        Ok(result)
    }
}

/// Breadth-first exploration of the marking graph. Returns every reachable
/// marking together with the enabled steps at each.
pub fn marking_graph<S: StepSystem + ?Sized>(
    sys: &S,
    limits: Limits,
) -> Result<Vec<(Marking, Vec<(Step, Marking)>)>, SemanticsError> {
    marking_graph_from(sys, &sys.initial_marking(), limits)
}

pub fn marking_graph_from<S: StepSystem + ?Sized>(
    sys: &S,
    m0: &Marking,
    limits: Limits,
) -> Result<Vec<(Marking, Vec<(Step, Marking)>)>, SemanticsError> {
    let mut seen: HashSet<Marking> = HashSet::from([m0.clone()]);
    let mut queue = VecDeque::from([m0.clone()]);
    let mut graph = Vec::new();
    while let Some(m) = queue.pop_front() {
        let mut edges = Vec::new();
        for u in sys.enabled_steps(&m, false) {
            let next = sys.fire_unchecked(&m, &u);
            if seen.insert(next.clone()) {
                if seen.len() > limits.max_items {
                    let partial = seen.into_iter().collect();
                    return Err(SemanticsError::BoundExceeded {
                        what: "marking graph",
                        limits,
                        partial: Some(Box::new(Behaviour::Markings(partial))),
                    });
                }
                queue.push_back(next.clone());
            }
            edges.push((u, next));
        }
        graph.push((m, edges));
    }
    Ok(graph)
}

/// `reach`, by marking-graph search.
pub fn reachable_markings<S: StepSystem + ?Sized>(sys: &S, limits: Limits) -> Result<BTreeSet<Marking>, SemanticsError> {
    Ok(marking_graph(sys, limits)?.into_iter().map(|(m, _)| m).collect())
}

/// `finreach`: reachable markings with no enabled step, which are exactly
/// the end markings of maximal step sequences.
pub fn final_markings<S: StepSystem + ?Sized>(sys: &S, limits: Limits) -> Result<BTreeSet<Marking>, SemanticsError> {
    Ok(marking_graph(sys, limits)?
        .into_iter()
        .filter(|(_, edges)| edges.is_empty())
        .map(|(m, _)| m)
        .collect())
}

/// Convenience wrapper returning a plain set of step sequences.
pub fn step_sequences<S: StepSystem + ?Sized>(
    sys: &S,
    kind: BehaviourKind,
    limits: Limits,
) -> Result<BTreeSet<StepSequence>, SemanticsError> {
    let b = behaviours(sys, BehaviourQuery::with_limits(kind, limits))?;
    Ok(match b {
        Behaviour::Sequences(s) => s,
        Behaviour::Mixed(s) => s.into_iter().map(|m| m.step_sequence()).collect(),
        Behaviour::Markings(_) => panic!("{kind:?} is not a sequence behaviour"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn m(places: &[&str]) -> Marking {
        Marking::new(places.iter().copied())
    }

    fn step(s: &str) -> Step {
        s.parse().unwrap()
    }

    fn seqs(items: &[&str]) -> BTreeSet<StepSequence> {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn marking_notation() {
        for text in ["{p1,p2}", "p1,p2", "p2 p1", " { p1 , p2 } "] {
            assert_eq!(text.parse::<Marking>().unwrap(), m(&["p1", "p2"]));
        }
        assert_eq!("{}".parse::<Marking>().unwrap(), Marking::default());
        assert_eq!("∅".parse::<Marking>().unwrap(), Marking::default());
        assert!("{p1".parse::<Marking>().is_err());
        let shown = m(&["r11", "r7", "p3"]).to_string();
        assert_eq!(shown, "{p3,r7,r11}");
        assert_eq!(shown.parse::<Marking>().unwrap(), m(&["r11", "r7", "p3"]));
    }

    #[test]
    fn notation_round_trips() {
        let s: StepSequence = "a {b,c} d".parse().unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_string(), "a {b,c} d");
        assert_eq!("a{b,c}d".parse::<StepSequence>().unwrap(), s);
        assert_eq!("λ".parse::<StepSequence>().unwrap(), StepSequence::default());
        assert!("{a".parse::<StepSequence>().is_err());
        assert!("{}".parse::<StepSequence>().is_err());
        assert_eq!(step("{c,e}"), Step::of(["e", "c"]).unwrap());
        assert_eq!(Step::new(NodeSet::new()), Err(EmptyStep));
    }

    #[test]
    fn enabling_in_an1() {
        let an1 = fixtures::an1();
        assert_eq!(enabled_step(&an1, &m(&["p2", "p3"]), &step("{b,c}")), Ok(true));
        assert!(matches!(
            enabled_step(&an1, &m(&["p2", "p3"]), &step("{c,d}")),
            Err(SemanticsError::NotAStep { place, .. }) if place == "p3"
        ));
        assert_eq!(enabled_step(&an1, &m(&["p1"]), &step("b")), Ok(false));
        assert_eq!(
            enabled_step(&an1, &m(&["p1"]), &step("zz")),
            Err(SemanticsError::UnknownTransition("zz".into()))
        );
    }

    #[test]
    fn firing_rule() {
        let an1 = fixtures::an1();
        assert_eq!(fire(&an1, &m(&["p1"]), &step("a")).unwrap(), m(&["p2", "p3"]));
        let bd1 = fixtures::bd1();
        assert_eq!(fire(&bd1, &m(&["p2", "p3"]), &step("{b,c}")).unwrap(), m(&["p4", "p5"]));
        match fire(&an1, &m(&["p2"]), &step("c")) {
            Err(SemanticsError::StepNotEnabled { refusal: Refusal::Underlying { missing }, .. }) => {
                assert_eq!(missing, NodeSet::from(["p3".to_owned()]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn firing_rule_order_matters_for_chains_inside_a_step() {
        // W1 after {a,b}: both rules agree.
        let w1 = fixtures::w1();
        let after = m(&["p3"]);
        assert_eq!(fire(&w1, &m(&["p1", "p2"]), &step("{a,b}")).unwrap(), after);
        assert_eq!(fire_standard(&w1, &m(&["p1", "p2"]), &step("{a,b}")), after);

        // t -> p -> u with p and the pre-place of t marked: (M ∪ post) \ pre removes p,
        // the standard rule keeps it.
        let chain = crate::acyclic::RawNet::new(
            ["s", "p", "r"],
            ["t", "u"],
            [("s", "t"), ("t", "p"), ("p", "u"), ("u", "r")],
        )
        .validate()
        .unwrap();
        let u = step("{t,u}");
        let start = m(&["s", "p"]);
        assert_eq!(fire(&chain, &start, &u).unwrap(), m(&["r"]));
        assert_eq!(fire_standard(&chain, &start, &u), m(&["p", "r"]));
    }

    #[test]
    fn runs_reproduce_execution_snapshots() {
        let an1 = fixtures::an1();
        let run1 = run(&an1, &m(&["p1"]), &[step("a"), step("b"), step("c")]).unwrap();
        assert_eq!(
            run1.markings(),
            &[m(&["p1"]), m(&["p2", "p3"]), m(&["p3", "p4"]), m(&["p4", "p5"])]
        );
        let run2 = run(&an1, &m(&["p1"]), &[step("a"), step("{b,c}")]).unwrap();
        assert_eq!(run2.markings(), &[m(&["p1"]), m(&["p2", "p3"]), m(&["p4", "p5"])]);
        let empty = run(&an1, &m(&["p1"]), &[]).unwrap();
        assert_eq!(empty.markings(), &[m(&["p1"])]);
        assert!(empty.step_sequence().is_empty());
        assert!(matches!(
            run(&an1, &m(&["p1"]), &[step("a"), step("a")]),
            Err(SemanticsError::StepNotEnabled { position: Some(2), .. })
        ));
    }

    #[test]
    fn bd1_behaviours() {
        let bd1 = fixtures::bd1();
        let q = |k| behaviours(&bd1, BehaviourQuery::new(k)).unwrap();
        assert_eq!(
            q(BehaviourKind::Sseq),
            Behaviour::Sequences(seqs(&[
                "λ", "a", "a b", "a c", "a d", "a b c", "a c b", "a b d", "a d b", "a {b,c}", "a {b,d}"
            ]))
        );
        assert_eq!(
            q(BehaviourKind::Maxsseq),
            Behaviour::Sequences(seqs(&["a b c", "a c b", "a {b,c}", "a b d", "a d b", "a {b,d}"]))
        );
        assert_eq!(
            q(BehaviourKind::Fseq),
            Behaviour::Sequences(seqs(&["λ", "a", "a b", "a c", "a d", "a b c", "a c b", "a b d", "a d b"]))
        );
        assert_eq!(
            q(BehaviourKind::Finreach),
            Behaviour::Markings(BTreeSet::from([m(&["p4", "p5"]), m(&["p4", "p6"])]))
        );
        let reach = q(BehaviourKind::Reach).into_markings().unwrap();
        for expected in [m(&["p1"]), m(&["p2", "p3"]), m(&["p2", "p5"]), m(&["p2", "p6"]), m(&["p3", "p4"])] {
            assert!(reach.contains(&expected));
        }
        let mixed = q(BehaviourKind::Maxmixsseq).into_mixed().unwrap();
        assert!(mixed.iter().any(|mu| mu.to_string() == "{p1} a {p2,p3} {b,c} {p4,p5}"));
    }

    #[test]
    fn bounds_are_reported_not_swallowed() {
        let bd1 = fixtures::bd1();
        let err = behaviours(&bd1, BehaviourQuery::with_limits(BehaviourKind::Sseq, Limits::items(3))).unwrap_err();
        match err {
            SemanticsError::BoundExceeded { partial: Some(partial), .. } => assert_eq!(partial.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = behaviours(&bd1, BehaviourQuery::with_limits(BehaviourKind::Sseq, Limits::new(100, 1))).unwrap_err();
        assert!(err.is_bound_exceeded());
    }

    #[test]
    fn serialization_of_steps() {
        let bd1 = fixtures::bd1();
        let mu = serialize(&bd1, &m(&["p2", "p3"]), &step("{b,c}"), &[step("b"), step("c")]).unwrap();
        assert_eq!(mu.to_string(), "{p2,p3} b {p3,p4} c {p4,p5}");
        let single = serialize(&bd1, &m(&["p1"]), &step("a"), &[step("a")]).unwrap();
        assert_eq!(single.steps().len(), 1);
        assert!(matches!(
            serialize(&bd1, &m(&["p2", "p3"]), &step("{b,c}"), &[step("b")]),
            Err(SemanticsError::InvalidPartition(_))
        ));
    }

    #[test]
    fn three_step_serialized_in_every_order() {
        // BD1 has no enabled 3-step, so use a net with three independent branches.
        let net = crate::acyclic::RawNet::new(
            ["s1", "s2", "s3", "e1", "e2", "e3"],
            ["x", "y", "z"],
            [("s1", "x"), ("x", "e1"), ("s2", "y"), ("y", "e2"), ("s3", "z"), ("z", "e3")],
        )
        .validate()
        .unwrap();
        let m0 = net.initial_marking();
        let whole = step("{x,y,z}");
        let end = fire(&net, &m0, &whole).unwrap();
        let orders = [["x", "y", "z"], ["x", "z", "y"], ["y", "x", "z"], ["y", "z", "x"], ["z", "x", "y"], ["z", "y", "x"]];
        for order in orders {
            let parts: Vec<Step> = order.iter().map(|t| Step::singleton(*t)).collect();
            let mu = serialize(&net, &m0, &whole, &parts).unwrap();
            assert_eq!(mu.last(), &end);
        }
    }
}
