//! Well-formed step sequences, the well-formedness decision and causality.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::acyclic::AcyclicNet;
use crate::foundations::NodeSet;
use crate::semantics::{replay, Limits, Marking, SemanticsError, Step, StepSequence, StepSystem};

/// A place that receives a token for the second time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleFill {
    /// 1-based position of the offending step.
    pub position: usize,
    pub place: String,
}

impl fmt::Display for DoubleFill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "place {} is filled twice at step {}", self.place, self.position)
    }
}

/// Why a net is not well-formed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Replaying `sequence` fills `place` twice, at step `position`.
    DoubleFill { sequence: StepSequence, position: usize, place: String },
    /// The transition occurs in no step sequence.
    NeverFires { transition: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DoubleFill { sequence, position, place } => {
                write!(f, "{sequence} fills {place} twice (step {position})")
            }
            Self::NeverFires { transition } => write!(f, "transition {transition} never fires"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WellFormedVerdict {
    Ok,
    NotOk { violation: Violation },
    /// The search hit its bound before reaching a conclusion.
    Unknown { explored: usize, limits: Limits },
}

impl WellFormedVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Self::Ok)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Self::Unknown { .. })
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Self::NotOk { violation } => Some(violation),
            _ => None,
        }
    }
}

impl fmt::Display for WellFormedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ok => f.write_str("well-formed"),
            Self::NotOk { violation } => write!(f, "not well-formed: {violation}"),
            Self::Unknown { explored, limits } => {
                write!(f, "unknown: bound exceeded after {explored} states ({limits})")
            }
        }
    }
}

/// Checks the post-set disjointness conditions on a step sequence that
/// replays from the initial marking. Returns the first double fill, if any.
pub fn is_wf_stepseq<S: StepSystem + ?Sized>(sys: &S, s: &StepSequence) -> Result<Option<DoubleFill>, SemanticsError> {
    replay(sys, s)?;
    let mut filled = NodeSet::new();
    for (i, u) in s.steps().iter().enumerate() {
        if let Some(place) = fill(sys, u, &mut filled) {
            return Ok(Some(DoubleFill { position: i + 1, place }));
        }
    }
    Ok(None)
}

/// Adds `U•` to `filled`, returning the first place that was already there
/// (or is produced twice within `U`).
fn fill<S: StepSystem + ?Sized>(sys: &S, u: &Step, filled: &mut NodeSet) -> Option<String> {
    let mut clash: Option<String> = None;
    for t in u.iter() {
        for p in sys.post(t) {
            if !filled.insert(p.clone()) {
                clash = Some(match clash {
                    Some(c) if c <= *p => c,
                    _ => p.clone(),
                });
            }
        }
    }
    clash
}

struct Search<'a, S: ?Sized> {
    sys: &'a S,
    singletons: bool,
    limits: Limits,
    seen: HashSet<(Marking, NodeSet)>,
    fired: NodeSet,
    path: Vec<Step>,
}

enum Outcome {
    Clean,
    Violation(Violation),
    Exceeded,
}

impl<S: StepSystem + ?Sized> Search<'_, S> {
    fn visit(&mut self, m: Marking, filled: NodeSet) -> Outcome {
        if !self.seen.insert((m.clone(), filled.clone())) {
            return Outcome::Clean;
        }
        if self.seen.len() > self.limits.max_items || self.path.len() > self.limits.max_depth {
            return Outcome::Exceeded;
        }
        for u in self.sys.enabled_steps(&m, self.singletons) {
            let mut next_filled = filled.clone();
            if let Some(place) = fill(self.sys, &u, &mut next_filled) {
                let mut steps = self.path.clone();
                steps.push(u);
                return Outcome::Violation(Violation::DoubleFill {
                    position: steps.len(),
                    sequence: StepSequence(steps),
                    place,
                });
            }
            self.fired.extend(u.iter().cloned());
            let next = self.sys.fire_unchecked(&m, &u);
            self.path.push(u);
            match self.visit(next, next_filled) {
                Outcome::Clean => {}
                other => return other,
            }
            self.path.pop();
        }
        Outcome::Clean
    }
}

/// Explores every state `(marking, filled places)` reachable by enabled
/// steps (or single transitions when `singletons` is set), stopping at the
/// first double fill. The search is depth-first in canonical step order, so
/// the reported witness is the least violating sequence in that order.
pub(crate) fn search_well_formed<S: StepSystem + ?Sized>(sys: &S, singletons: bool, limits: Limits) -> WellFormedVerdict {
    let mut search = Search {
        sys,
        singletons,
        limits,
        seen: HashSet::new(),
        fired: NodeSet::new(),
        path: Vec::new(),
    };
    match search.visit(sys.initial_marking(), NodeSet::new()) {
        Outcome::Violation(violation) => WellFormedVerdict::NotOk { violation },
        Outcome::Exceeded => WellFormedVerdict::Unknown { explored: search.seen.len(), limits },
        Outcome::Clean => match sys.transition_ids().difference(&search.fired).next() {
            Some(t) => WellFormedVerdict::NotOk { violation: Violation::NeverFires { transition: t.clone() } },
            None => WellFormedVerdict::Ok,
        },
    }
}

/// Decides well-formedness of an acyclic net by exploring its firing sequences.
pub fn is_well_formed(net: &AcyclicNet, limits: Limits) -> WellFormedVerdict {
    search_well_formed(net, true, limits)
}

/// The same decision made over arbitrary step sequences; slower, used as a cross-check.
pub fn is_well_formed_by_steps(net: &AcyclicNet, limits: Limits) -> WellFormedVerdict {
    search_well_formed(net, false, limits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalityReport {
    pub target: String,
    pub causes: NodeSet,
    pub graph_predecessors: NodeSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CausesError {
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` occurs in no step sequence")]
    TransitionNeverFires(String),
    #[error("search exceeded the bound ({0})")]
    BoundExceeded(Limits),
}

/// Is `t` enabled somewhere reachable by steps avoiding `avoid`?
fn reachable_enabling<S: StepSystem + ?Sized>(
    sys: &S,
    t: &str,
    avoid: Option<&str>,
    limits: Limits,
) -> Result<bool, CausesError> {
    let target = Step::singleton(t);
    let m0 = sys.initial_marking();
    let mut seen = HashSet::from([m0.clone()]);
    let mut queue = VecDeque::from([m0]);
    while let Some(m) = queue.pop_front() {
        if sys.refusal(&m, &target).is_none() {
            return Ok(true);
        }
        for u in sys.enabled_steps(&m, false) {
            if avoid.is_some_and(|a| u.contains(a)) {
                continue;
            }
            let next = sys.fire_unchecked(&m, &u);
            if seen.insert(next.clone()) {
                if seen.len() > limits.max_items {
                    return Err(CausesError::BoundExceeded(limits));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// `u` causes `t` when every step sequence `σU` with `t ∈ U` has `u` in `σ`.
///
/// Occurrence of `u` in the same step as `t` does not count as preceding it.
pub fn causes(net: &AcyclicNet, t: &str, limits: Limits) -> Result<CausalityReport, CausesError> {
    if !net.is_transition(t) {
        return Err(CausesError::UnknownTransition(t.to_owned()));
    }
    if !reachable_enabling(net, t, None, limits)? {
        return Err(CausesError::TransitionNeverFires(t.to_owned()));
    }
    let mut found = NodeSet::new();
    for u in net.transitions() {
        if u != t && !reachable_enabling(net, t, Some(u), limits)? {
            found.insert(u.clone());
        }
    }
    Ok(CausalityReport {
        target: t.to_owned(),
        causes: found,
        graph_predecessors: net.transition_predecessors(t).expect("known transition"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::foundations::node_set;
    use crate::semantics::run;

    fn seq(s: &str) -> StepSequence {
        s.parse().unwrap()
    }

    #[test]
    fn step_sequence_conditions() {
        let w1 = fixtures::w1();
        assert_eq!(
            is_wf_stepseq(&w1, &seq("{a,b} c")).unwrap(),
            Some(DoubleFill { position: 1, place: "p3".into() })
        );
        assert_eq!(is_wf_stepseq(&fixtures::bd1(), &seq("a {b,c}")).unwrap(), None);
        assert_eq!(is_wf_stepseq(&w1, &StepSequence::default()).unwrap(), None);
        assert!(is_wf_stepseq(&w1, &seq("c")).is_err());
    }

    #[test]
    fn verdicts_on_fixtures() {
        for net in [fixtures::an1(), fixtures::bd1(), fixtures::wf_a(), fixtures::wf_b(), fixtures::on1()] {
            assert_eq!(is_well_formed(&net, Limits::default()), WellFormedVerdict::Ok);
            assert_eq!(is_well_formed_by_steps(&net, Limits::default()), WellFormedVerdict::Ok);
        }
        let w1 = fixtures::w1();
        let verdict = is_well_formed(&w1, Limits::default());
        let Some(Violation::DoubleFill { sequence, position, place }) = verdict.violation() else {
            panic!("expected a double fill, got {verdict}");
        };
        assert_eq!(sequence, &seq("a b"));
        assert_eq!((*position, place.as_str()), (2, "p3"));
        let mixed = run(&w1, &w1.initial_marking(), sequence.steps()).unwrap();
        assert_eq!(mixed.markings().len(), 3);
        assert_eq!(
            is_wf_stepseq(&w1, sequence).unwrap(),
            Some(DoubleFill { position: 2, place: "p3".into() })
        );
    }

    #[test]
    fn unfireable_transition_is_reported() {
        // t needs x and y, but x and y are alternatives.
        let net = crate::acyclic::RawNet::new(
            ["s", "x", "y", "z", "o"],
            ["a", "b", "t"],
            [("s", "a"), ("s", "b"), ("a", "x"), ("b", "y"), ("x", "t"), ("y", "t"), ("t", "z"), ("t", "o")],
        )
        .validate()
        .unwrap();
        assert_eq!(
            is_well_formed(&net, Limits::default()),
            WellFormedVerdict::NotOk { violation: Violation::NeverFires { transition: "t".into() } }
        );
        assert_eq!(causes(&net, "t", Limits::default()), Err(CausesError::TransitionNeverFires("t".into())));
    }

    #[test]
    fn bound_gives_unknown() {
        let verdict = is_well_formed(&fixtures::an1(), Limits::items(2));
        assert!(verdict.is_unknown());
    }

    #[test]
    fn causality() {
        let report = causes(&fixtures::w1(), "c", Limits::default()).unwrap();
        assert!(report.causes.is_empty());
        assert_eq!(report.graph_predecessors, node_set(["a", "b"]));
        assert_eq!(causes(&fixtures::bd1(), "b", Limits::default()).unwrap().causes, node_set(["a"]));
        assert!(causes(&fixtures::on1(), "a", Limits::default()).unwrap().causes.is_empty());
        assert_eq!(
            causes(&fixtures::an1(), "zz", Limits::default()),
            Err(CausesError::UnknownTransition("zz".into()))
        );
    }
}
