//! JSON payloads shared by the command line and the session service.

use serde::Serialize;
use sonet_core::bsa::BsaError;
use sonet_core::semantics::Refusal;
use sonet_core::{AnyNet, Marking, Step, StepSystem};

/// Default cap on listed enabled steps.
pub const STEP_CAP: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct StepView {
    pub step: Step,
    pub notation: String,
    /// The step split into syn-cycles, in an order in which they can occur.
    pub parts: Vec<Step>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisabledView {
    pub transition: String,
    pub refusal: Refusal,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseView {
    /// 0-based component index.
    pub component: usize,
    pub upper_place: Option<String>,
    pub lower_marking: Marking,
    pub consistent: bool,
    /// Set when the marking was not reached by executing the net.
    pub speculative: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateView {
    pub marking: Marking,
    pub notation: String,
    pub enabled: Vec<StepView>,
    pub truncated: bool,
    pub disabled: Vec<DisabledView>,
    pub terminal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<PhaseView>>,
}

fn parts(net: &AnyNet, m: &Marking, u: &Step) -> Vec<Step> {
    match net {
        AnyNet::Acyclic(_) => u.iter().map(|t| Step::singleton(t.clone())).collect(),
        _ => net.as_csa().decompose_step(m, u).unwrap_or_else(|_| vec![u.clone()]),
    }
}

pub fn step_view(net: &AnyNet, m: &Marking, u: &Step) -> StepView {
    StepView { step: u.clone(), notation: u.to_string(), parts: parts(net, m, u) }
}

/// Phase information per component of a bsa-net; `None` for other kinds.
pub fn phase_views(net: &AnyNet, m: &Marking, speculative: bool) -> Option<Vec<PhaseView>> {
    let AnyNet::Bsa(b) = net else { return None };
    let views = b
        .upper()
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let marked: Vec<&String> = c.places().iter().filter(|p| m.contains(p)).collect();
            let lower_marking = m.restrict(b.lower().components()[i].places());
            let upper_place = match marked.as_slice() {
                [p] => Some((*p).clone()),
                _ => None,
            };
            let consistent = upper_place
                .as_ref()
                .and_then(|p| b.phase(p).ok())
                .is_some_and(|ph| ph.markings.contains(&lower_marking));
            PhaseView { component: i, upper_place, lower_marking, consistent, speculative }
        })
        .collect();
    Some(views)
}

/// Whether a bsa marking is phase-consistent; other kinds are always consistent.
pub fn phase_consistent(net: &AnyNet, m: &Marking) -> Result<bool, BsaError> {
    match net {
        AnyNet::Bsa(b) => b.is_phase_consistent(m),
        _ => Ok(true),
    }
}

/// Enabled steps, those made of a single syn-cycle first, then by size.
pub fn state_view(net: &AnyNet, m: &Marking, cap: usize, speculative: bool) -> StateView {
    let mut enabled: Vec<StepView> = net.enabled_steps(m, false).iter().map(|u| step_view(net, m, u)).collect();
    enabled.sort_by(|a, b| {
        (a.parts.len(), a.step.len(), &a.step).cmp(&(b.parts.len(), b.step.len(), &b.step))
    });
    let terminal = enabled.is_empty();
    let truncated = enabled.len() > cap;
    enabled.truncate(cap);
    let disabled = net
        .transition_ids()
        .iter()
        .filter_map(|t| {
            let u = Step::singleton(t.clone());
            net.refusal(m, &u).map(|refusal| DisabledView {
                transition: t.clone(),
                message: refusal.to_string(),
                refusal,
            })
        })
        .collect();
    StateView {
        marking: m.clone(),
        notation: m.to_string(),
        enabled,
        truncated,
        disabled,
        terminal,
        phases: phase_views(net, m, speculative),
    }
}

/// Plain-text rendering of a state.
pub fn render_state(s: &StateView) -> String {
    let mut out = format!("marking: {}\n", s.notation);
    if s.enabled.is_empty() {
        out.push_str("no enabled steps\n");
    } else {
        out.push_str(&format!("enabled steps ({}{}):\n", s.enabled.len(), if s.truncated { ", truncated" } else { "" }));
        for v in &s.enabled {
            let parts: Vec<String> = v.parts.iter().map(ToString::to_string).collect();
            if parts.len() > 1 {
                out.push_str(&format!("  {}    syn-cycles: {}\n", v.notation, parts.join(" ")));
            } else {
                out.push_str(&format!("  {}\n", v.notation));
            }
        }
    }
    for d in &s.disabled {
        out.push_str(&format!("  disabled {}: {}\n", d.transition, d.message));
    }
    for p in s.phases.iter().flatten() {
        out.push_str(&format!(
            "  component {}: upper {}, lower {} ({})\n",
            p.component + 1,
            p.upper_place.as_deref().unwrap_or("?"),
            p.lower_marking,
            if p.consistent { "phase-consistent" } else { "not phase-consistent" }
        ));
    }
    out
}
