//! Subcommands. Each produces an [`Outcome`]: an exit code plus JSON and
//! plain-text renderings of the same result.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sonet_core::bsa::{bsa_scenario_of, bsa_well_formed_report, classify_bso, scenario_analysis, BsoVerdict};
use sonet_core::csa::{
    csa_coverage, csa_is_well_formed, csa_maximal_scenarios, csa_scenario_of, csa_scenarios, project, project_mixed,
    syn_cycles, syn_cycles_csa,
};
use sonet_core::netio::{export_dot, parse, DotOptions};
use sonet_core::scenarios::{coverage, enumerate_scenarios, maximal_scenarios, scenario_of};
use sonet_core::semantics::{behaviours, fire, replay, run};
use sonet_core::wellformed::{causes, is_well_formed, CausesError, Violation};
use sonet_core::{
    fixtures, AnyNet, BehaviourKind, BehaviourQuery, CsaClass, CsaNet, Limits, Marking, NetDocument, NodeSet,
    SemanticsError, Step, StepSequence, StepSystem,
};

use crate::report::{phase_views, render_state, state_view, STEP_CAP};

/// Exit codes.
pub const OK: u8 = 0;
pub const PROPERTY_FAILS: u8 = 1;
pub const USAGE: u8 = 2;
pub const BOUND: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sonet", version, about = "Analyse acyclic, csa and bsa nets")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Maximum number of items (markings, sequences, states) an enumeration may visit.
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    /// Maximum step-sequence length explored.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// A net file (`.sonet.json`) or `fixture:NAME` for a bundled example.
type NetArg = String;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a document describes a valid net.
    Validate { net: NetArg },
    /// Report the structural class of a net.
    Classify { net: NetArg },
    /// List the steps enabled at a marking.
    Enabled {
        net: NetArg,
        /// Marking such as `{p1,p2}`; defaults to the document's marking or the initial one.
        #[arg(long)]
        marking: Option<String>,
        /// Cap on listed steps.
        #[arg(long, default_value_t = STEP_CAP)]
        limit: usize,
    },
    /// Fire one step, e.g. `{b,c}` or `a`.
    Fire {
        net: NetArg,
        step: String,
        #[arg(long)]
        marking: Option<String>,
    },
    /// Execute a step sequence such as `a {b,c}` and print the mixed sequence.
    Run {
        net: NetArg,
        sequence: String,
        #[arg(long)]
        marking: Option<String>,
    },
    /// Reachable markings.
    Reach { net: NetArg },
    /// Reachable markings with no enabled step.
    Finreach { net: NetArg },
    /// Maximal step sequences.
    Maxsseq { net: NetArg },
    /// Decide well-formedness and print a witness when it fails.
    Wellformed { net: NetArg },
    /// The transitions without which `transition` can never occur (acyclic nets).
    Causes { net: NetArg, transition: String },
    /// Scenarios of a net.
    Scenarios {
        net: NetArg,
        /// Only maximal scenarios.
        #[arg(long)]
        maximal: bool,
        /// The scenario induced by this step sequence.
        #[arg(long, value_name = "SEQUENCE")]
        of: Option<String>,
    },
    /// Syn-cycles (for acyclic nets every transition is its own).
    Syncycles { net: NetArg },
    /// Project a step sequence onto one component.
    Project {
        net: NetArg,
        sequence: String,
        /// 1-based component index; for bsa-nets lower components come first.
        #[arg(long)]
        component: usize,
        /// Project the mixed step sequence instead.
        #[arg(long)]
        mixed: bool,
    },
    /// Phase tables of a bsa-net.
    Phases {
        net: NetArg,
        #[arg(long)]
        place: Option<String>,
    },
    /// Full bsa-net report: bso classification, scenarios and well-formedness.
    BsaCheck { net: NetArg },
    /// Graphviz rendering.
    ExportDot {
        net: NetArg,
        #[arg(long)]
        marking: Option<String>,
        /// Draw without tokens.
        #[arg(long, conflicts_with = "marking")]
        no_marking: bool,
        /// Highlight the transitions of this step sequence.
        #[arg(long, value_name = "SEQUENCE")]
        highlight: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory for session snapshots; snapshots are disabled without it.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: u8,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    fn ok(json: Value, text: impl Into<String>) -> Self {
        Self { code: OK, json, text: text.into() }
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json") + "\n",
            Format::Table => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
        }
    }
}

/// An enumeration ran past its bound; exit code 3.
#[derive(Debug)]
pub struct BoundExceeded(pub String);

impl std::fmt::Display for BoundExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "bound exceeded: {}", self.0)
    }
}

impl std::error::Error for BoundExceeded {}

/// Exit code for an error returned by [`execute`].
pub fn error_code(e: &anyhow::Error) -> u8 {
    if e.chain().any(|c| c.downcast_ref::<BoundExceeded>().is_some()) {
        BOUND
    } else {
        USAGE
    }
}

fn semantic<T>(r: Result<T, SemanticsError>) -> Result<T> {
    r.map_err(|e| match e {
        SemanticsError::BoundExceeded { what, limits, partial } => {
            let found = partial.map(|p| format!(", {} items found so far", p.len())).unwrap_or_default();
            anyhow::Error::new(BoundExceeded(format!("{what} ({limits}){found}")))
        }
        other => anyhow::Error::new(other),
    })
}

pub fn load_document(arg: &str) -> Result<NetDocument> {
    if let Some(name) = arg.strip_prefix("fixture:") {
        return fixtures::document(name)
            .ok_or_else(|| anyhow!("unknown fixture `{name}`; known: {}", fixtures::NAMES.join(", ")));
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("cannot read `{arg}`"))?;
    parse(&text).with_context(|| format!("cannot parse `{arg}`"))
}

fn load(arg: &str) -> Result<(NetDocument, AnyNet)> {
    let doc = load_document(arg)?;
    let net = doc.build().with_context(|| format!("`{arg}` is not a valid {} net", doc.kind()))?;
    Ok((doc, net))
}

fn start_marking(doc: &NetDocument, net: &AnyNet, flag: Option<&str>) -> Result<Marking> {
    let m = match flag {
        Some(text) => text.parse::<Marking>().with_context(|| format!("bad marking `{text}`"))?,
        None => doc.marking().unwrap_or_else(|| net.initial_marking()),
    };
    let places = net.all_places();
    if let Some(p) = m.places().iter().find(|p| !places.contains(*p)) {
        bail!("marking names unknown place `{p}`");
    }
    Ok(m)
}

fn parse_sequence(text: &str) -> Result<StepSequence> {
    text.parse().with_context(|| format!("bad step sequence `{text}`"))
}

fn set_json(s: &NodeSet) -> Value {
    json!(s)
}

fn lines<T: std::fmt::Display>(header: &str, items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    let items: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "{header} ({}):", items.len());
    for x in items {
        let _ = writeln!(out, "  {x}");
    }
    out
}

fn set_of_sets(sets: &[Marking]) -> String {
    let inner: Vec<String> = sets.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

pub fn limits_of(cli: &Cli) -> Limits {
    let d = Limits::default();
    Limits::new(cli.bound.unwrap_or(d.max_items), cli.depth.unwrap_or(d.max_depth))
}

/// Runs every subcommand except `serve`.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let limits = limits_of(cli);
    match &cli.command {
        Command::Validate { net } => validate(net),
        Command::Classify { net } => classify(net, limits),
        Command::Enabled { net, marking, limit } => {
            let (doc, net) = load(net)?;
            let m = start_marking(&doc, &net, marking.as_deref())?;
            let reachable_start = marking.is_none() && doc.marking.is_none();
            let state = state_view(&net, &m, *limit, !reachable_start);
            Ok(Outcome::ok(json!(state), render_state(&state)))
        }
        Command::Fire { net, step, marking } => fire_cmd(net, step, marking.as_deref()),
        Command::Run { net, sequence, marking } => run_cmd(net, sequence, marking.as_deref()),
        Command::Reach { net } => marking_set(net, BehaviourKind::Reach, limits),
        Command::Finreach { net } => marking_set(net, BehaviourKind::Finreach, limits),
        Command::Maxsseq { net } => {
            let (_, net) = load(net)?;
            let q = BehaviourQuery::with_limits(BehaviourKind::Maxsseq, limits);
            let seqs = semantic(behaviours(&net, q))?.into_sequences().expect("sequences");
            let text: Vec<String> = seqs.iter().map(ToString::to_string).collect();
            Ok(Outcome::ok(json!({ "maxsseq": text, "steps": seqs }), lines("maximal step sequences", &text)))
        }
        Command::Wellformed { net } => wellformed(net, limits),
        Command::Causes { net, transition } => causes_cmd(net, transition, limits),
        Command::Scenarios { net, maximal, of } => scenarios_cmd(net, *maximal, of.as_deref(), limits),
        Command::Syncycles { net } => {
            let (_, net) = load(net)?;
            let csa = net.as_csa();
            let cycles = if csa.classify() == CsaClass::CsoNet { syn_cycles(&csa) } else { syn_cycles_csa(&csa, limits) }
                .map_err(csa_error)?;
            let shown: Vec<String> = cycles.iter().map(|c| Marking(c.clone()).to_string()).collect();
            Ok(Outcome::ok(json!({ "syn_cycles": cycles }), lines("syn-cycles", shown)))
        }
        Command::Project { net, sequence, component, mixed } => project_cmd(net, sequence, *component, *mixed),
        Command::Phases { net, place } => phases_cmd(net, place.as_deref()),
        Command::BsaCheck { net } => bsa_check(net, limits),
        Command::ExportDot { net, marking, no_marking, highlight, output } => {
            let (doc, net) = load(net)?;
            let marking = if *no_marking { None } else { Some(start_marking(&doc, &net, marking.as_deref())?) };
            let highlight = highlight.as_deref().map(parse_sequence).transpose()?.map(|s| s.occurring());
            let dot = export_dot(&net, &DotOptions { marking, highlight });
            if let Some(path) = output {
                std::fs::write(path, &dot).with_context(|| format!("cannot write `{}`", path.display()))?;
                let msg = format!("wrote {}", path.display());
                return Ok(Outcome::ok(json!({ "written": path }), msg));
            }
            Ok(Outcome::ok(json!({ "dot": dot }), dot))
        }
        Command::Serve { .. } => bail!("`serve` is handled by the binary"),
    }
}

fn csa_error(e: sonet_core::csa::CsaError) -> anyhow::Error {
    match e {
        sonet_core::csa::CsaError::BoundExceeded(l) => anyhow::Error::new(BoundExceeded(l.to_string())),
        other => anyhow::Error::new(other),
    }
}

fn bsa_error(e: sonet_core::bsa::BsaError) -> anyhow::Error {
    use sonet_core::bsa::BsaError;
    match e {
        BsaError::BoundExceeded(l) | BsaError::Csa(sonet_core::csa::CsaError::BoundExceeded(l)) => {
            anyhow::Error::new(BoundExceeded(l.to_string()))
        }
        BsaError::Semantics(s) => semantic::<()>(Err(s)).unwrap_err(),
        other => anyhow::Error::new(other),
    }
}

fn validate(arg: &str) -> Result<Outcome> {
    let doc = load_document(arg)?;
    match doc.build() {
        Ok(net) => {
            let summary = json!({
                "places": net.all_places().len(),
                "transitions": net.transition_ids().len(),
                "components": net.as_csa().components().len(),
            });
            let text = format!(
                "valid {} net: {} places, {} transitions",
                doc.kind(),
                net.all_places().len(),
                net.transition_ids().len()
            );
            Ok(Outcome::ok(json!({ "valid": true, "kind": doc.kind(), "summary": summary }), text))
        }
        Err(e) => {
            let text = format!("invalid {} net: {e}", doc.kind());
            Ok(Outcome::ok(json!({ "valid": false, "kind": doc.kind(), "error": e.to_string() }), text)
                .with_code(PROPERTY_FAILS))
        }
    }
}

fn classify(arg: &str, limits: Limits) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    Ok(match &net {
        AnyNet::Acyclic(n) => {
            let class = n.classify();
            Outcome::ok(json!({ "kind": "acyclic", "class": class, "name": class.to_string() }), class.to_string())
        }
        AnyNet::Csa(c) => {
            let class = c.classify();
            Outcome::ok(json!({ "kind": "csa", "class": class, "name": class.to_string() }), class.to_string())
        }
        AnyNet::Bsa(b) => {
            let (lower, upper) = (b.lower().classify(), b.upper().classify());
            let bso = classify_bso(b, limits);
            let name = match &bso {
                BsoVerdict::Bso { .. } => "bso-net".to_owned(),
                BsoVerdict::NotBso { .. } => "bsa-net".to_owned(),
                BsoVerdict::Unknown { .. } => "bsa-net (bso undecided)".to_owned(),
            };
            let text = format!("{name}\n  lower level: {lower}\n  upper level: {upper}");
            let out = Outcome::ok(
                json!({ "kind": "bsa", "name": name, "lower": lower, "upper": upper, "bso": bso }),
                text,
            );
            if matches!(bso, BsoVerdict::Unknown { .. }) {
                out.with_code(BOUND)
            } else {
                out
            }
        }
    })
}

fn fire_cmd(arg: &str, step: &str, marking: Option<&str>) -> Result<Outcome> {
    let (doc, net) = load(arg)?;
    let m = start_marking(&doc, &net, marking)?;
    let u: Step = step.parse().with_context(|| format!("bad step `{step}`"))?;
    match fire(&net, &m, &u) {
        Ok(next) => {
            let phases = phase_views(&net, &next, marking.is_some());
            let text = format!("{m} {u} {next}");
            Ok(Outcome::ok(json!({ "from": m, "step": u, "marking": next, "phases": phases }), text))
        }
        Err(SemanticsError::StepNotEnabled { refusal, .. }) => {
            let text = format!("{u} is not enabled at {m}: {refusal}");
            Ok(Outcome::ok(json!({ "from": m, "step": u, "enabled": false, "refusal": refusal }), text)
                .with_code(PROPERTY_FAILS))
        }
        Err(e) => Err(e).context("cannot fire"),
    }
}

fn run_cmd(arg: &str, sequence: &str, marking: Option<&str>) -> Result<Outcome> {
    let (doc, net) = load(arg)?;
    let m = start_marking(&doc, &net, marking)?;
    let seq = parse_sequence(sequence)?;
    match run(&net, &m, &seq.0) {
        Ok(mu) => Ok(Outcome::ok(
            json!({ "mixed": mu.to_string(), "markings": mu.markings(), "steps": mu.steps(), "final": mu.last() }),
            mu.to_string(),
        )),
        Err(SemanticsError::StepNotEnabled { position, step, refusal }) => {
            let at = position.map(|p| format!(" at position {p}")).unwrap_or_default();
            let text = format!("{step} is not enabled{at}: {refusal}");
            Ok(Outcome::ok(
                json!({ "enabled": false, "position": position, "step": step, "refusal": refusal }),
                text,
            )
            .with_code(PROPERTY_FAILS))
        }
        Err(e) => Err(e).context("cannot run the sequence"),
    }
}

fn marking_set(arg: &str, kind: BehaviourKind, limits: Limits) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    let q = BehaviourQuery::with_limits(kind, limits);
    let ms: Vec<Marking> = semantic(behaviours(&net, q))?.into_markings().expect("markings").into_iter().collect();
    let label = if kind == BehaviourKind::Reach { "reachable markings" } else { "final markings" };
    let key = if kind == BehaviourKind::Reach { "reach" } else { "finreach" };
    Ok(Outcome::ok(json!({ key: ms }), lines(label, &ms)))
}

fn wellformed(arg: &str, limits: Limits) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    let (verdict_json, text, code) = match &net {
        AnyNet::Bsa(b) => {
            let report = bsa_well_formed_report(b, limits)
                .map_err(|l| anyhow::Error::new(BoundExceeded(format!("bsa well-formedness ({l})"))))?;
            let verdict = report.verdict();
            let code = if verdict.is_ok() { OK } else { PROPERTY_FAILS };
            let text = format!(
                "{verdict}\n  step sequences match scenarios: {}\n  maximal scenarios realised: {}",
                report.sequences.as_ref().map_or("yes".to_owned(), |v| format!("no ({v})")),
                report.realisation.as_ref().map_or("yes".to_owned(), |v| format!("no ({v})")),
            );
            (json!({ "verdict": verdict, "conditions": report }), text, code)
        }
        other => {
            let verdict = match other {
                AnyNet::Acyclic(n) => is_well_formed(n, limits),
                _ => csa_is_well_formed(&other.as_csa(), limits),
            };
            let code = if verdict.is_ok() {
                OK
            } else if verdict.is_unknown() {
                BOUND
            } else {
                PROPERTY_FAILS
            };
            let mut text = verdict.to_string();
            if let Some(Violation::DoubleFill { sequence, .. }) = verdict.violation() {
                let _ = write!(text, "\n  witness: {sequence}");
            }
            (json!({ "verdict": verdict }), text, code)
        }
    };
    Ok(Outcome::ok(verdict_json, text).with_code(code))
}

fn causes_cmd(arg: &str, t: &str, limits: Limits) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    let AnyNet::Acyclic(n) = &net else { bail!("causes is defined for acyclic nets only") };
    match causes(n, t, limits) {
        Ok(r) => {
            let text = format!(
                "causes({t}) = {}\ngraph predecessors = {}",
                Marking(r.causes.clone()),
                Marking(r.graph_predecessors.clone())
            );
            Ok(Outcome::ok(json!(r), text))
        }
        Err(CausesError::TransitionNeverFires(t)) => {
            let text = format!("`{t}` occurs in no step sequence");
            Ok(Outcome::ok(json!({ "target": t, "fires": false }), text).with_code(PROPERTY_FAILS))
        }
        Err(CausesError::BoundExceeded(l)) => Err(anyhow::Error::new(BoundExceeded(l.to_string()))),
        Err(e) => Err(e.into()),
    }
}

fn scenario_entry(transitions: &NodeSet, places: &NodeSet) -> (Value, String) {
    (
        json!({ "transitions": transitions, "places": places }),
        format!("T = {}  P = {}", Marking(transitions.clone()), Marking(places.clone())),
    )
}

fn scenarios_cmd(arg: &str, maximal: bool, of: Option<&str>, limits: Limits) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    if let Some(seq) = of {
        let s = parse_sequence(seq)?;
        let (entry, text) = match &net {
            AnyNet::Acyclic(n) => {
                let sc = scenario_of(n, &s)?;
                scenario_entry(sc.transitions(), sc.net().places())
            }
            AnyNet::Csa(c) => {
                let sc = csa_scenario_of(c, &s).map_err(csa_error)?;
                scenario_entry(sc.transitions(), sc.net().places())
            }
            AnyNet::Bsa(b) => {
                let sc = bsa_scenario_of(b, &s).map_err(bsa_error)?;
                let places = sc.net.underlying().places().clone();
                scenario_entry(&sc.transitions(), &places)
            }
        };
        return Ok(Outcome::ok(json!({ "scenario": entry }), format!("scenario of {s}: {text}")));
    }
    let mut entries = Vec::new();
    let mut extra = json!(null);
    match &net {
        AnyNet::Acyclic(n) => {
            let list = if maximal { maximal_scenarios(n, limits) } else { enumerate_scenarios(n, limits) };
            let list = list.map_err(|e| match e {
                sonet_core::scenarios::ScenarioError::BoundExceeded(l) => anyhow::Error::new(BoundExceeded(l.to_string())),
                other => other.into(),
            })?;
            entries.extend(list.iter().map(|s| scenario_entry(s.transitions(), s.net().places())));
            if maximal {
                extra = json!(coverage(n, limits)?);
            }
        }
        AnyNet::Csa(c) => {
            let list = if maximal { csa_maximal_scenarios(c, limits) } else { csa_scenarios(c, limits) };
            entries.extend(list.map_err(csa_error)?.iter().map(|s| scenario_entry(s.transitions(), s.net().places())));
            if maximal {
                extra = json!(csa_coverage(c, limits).map_err(csa_error)?);
            }
        }
        AnyNet::Bsa(b) => {
            let analysis = scenario_analysis(b, limits).map_err(bsa_error)?;
            let chosen: Vec<_> = if maximal { analysis.maximal() } else { analysis.scenarios.iter().collect() };
            for s in chosen {
                let places = s.net.underlying().places().clone();
                let (mut v, t) = scenario_entry(&s.transitions(), &places);
                v["lower_transitions"] = set_json(&s.lower_transitions);
                v["upper_transitions"] = set_json(&s.upper_transitions);
                v["witness"] = json!(s.witness.to_string());
                entries.push((v, t));
            }
            extra = json!({
                "uncovered_pairs": analysis.uncovered.len(),
                "rejected_pairs": analysis.rejected.len(),
            });
        }
    }
    let header = if maximal { "maximal scenarios" } else { "scenarios" };
    let text = lines(header, entries.iter().map(|(_, t)| t));
    let list: Vec<Value> = entries.into_iter().map(|(v, _)| v).collect();
    Ok(Outcome::ok(json!({ "scenarios": list, "details": extra }), text))
}

fn project_cmd(arg: &str, sequence: &str, component: usize, mixed: bool) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    let csa: CsaNet = net.as_csa();
    let s = parse_sequence(sequence)?;
    let i = component.checked_sub(1).context("components are numbered from 1")?;
    if mixed {
        let mu = semantic(replay(&net, &s))?;
        let p = project_mixed(&csa, i, &mu).map_err(csa_error)?;
        return Ok(Outcome::ok(json!({ "component": component, "mixed": p.to_string() }), p.to_string()));
    }
    let p = project(&csa, i, &s).map_err(csa_error)?;
    Ok(Outcome::ok(json!({ "component": component, "projection": p.to_string(), "steps": p }), p.to_string()))
}

fn phases_cmd(arg: &str, place: Option<&str>) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    let AnyNet::Bsa(b) = &net else { bail!("phases are defined for bsa-nets only") };
    let chosen: Vec<_> = match place {
        Some(p) => vec![b.phase(p)?],
        None => b.phases().collect(),
    };
    let mut text = String::new();
    for ph in &chosen {
        let ms: Vec<Marking> = ph.markings.iter().cloned().collect();
        let _ = writeln!(text, "phase({}) = {}", ph.anchor, set_of_sets(&ms));
    }
    let json = json!(chosen
        .iter()
        .map(|ph| json!({ "place": ph.anchor, "component": ph.component, "beta": b.beta_of(&ph.anchor), "markings": ph.markings }))
        .collect::<Vec<_>>());
    Ok(Outcome::ok(json!({ "phases": json }), text))
}

fn bsa_check(arg: &str, limits: Limits) -> Result<Outcome> {
    let (_, net) = load(arg)?;
    let AnyNet::Bsa(b) = &net else { bail!("bsa-check expects a bsa-net") };
    let bso = classify_bso(b, limits);
    let analysis = scenario_analysis(b, limits).map_err(bsa_error)?;
    let report = bsa_well_formed_report(b, limits)
        .map_err(|l| anyhow::Error::new(BoundExceeded(format!("bsa well-formedness ({l})"))))?;
    let verdict = report.verdict();
    let maximal = analysis.maximal();
    let mut text = String::new();
    let _ = writeln!(text, "levels: lower {}, upper {}", b.lower().classify(), b.upper().classify());
    let _ = writeln!(
        text,
        "bso: {}",
        match &bso {
            BsoVerdict::Bso { witness } => format!("yes, witness {witness}"),
            BsoVerdict::NotBso { reason } => format!("no, {reason}"),
            BsoVerdict::Unknown { limits } => format!("unknown ({limits})"),
        }
    );
    let _ = writeln!(
        text,
        "scenarios: {} ({} maximal); {} pairs without a covering sequence; {} pairs rejected",
        analysis.scenarios.len(),
        maximal.len(),
        analysis.uncovered.len(),
        analysis.rejected.len()
    );
    for s in &maximal {
        let _ = writeln!(
            text,
            "  maximal: lower {} upper {} via {}",
            Marking(s.lower_transitions.clone()),
            Marking(s.upper_transitions.clone()),
            s.witness
        );
    }
    let _ = writeln!(text, "well-formedness: {verdict}");
    let maximal_json: Vec<Value> = maximal
        .iter()
        .map(|s| json!({ "lower": s.lower_transitions, "upper": s.upper_transitions, "witness": s.witness.to_string() }))
        .collect();
    let code = if verdict.is_ok() { OK } else { PROPERTY_FAILS };
    Ok(Outcome::ok(
        json!({
            "bso": bso,
            "scenarios": analysis.scenarios.len(),
            "maximal": maximal_json,
            "uncovered_pairs": analysis.uncovered.len(),
            "rejected_pairs": analysis.rejected.iter().map(|(l, u, v)| json!({ "lower": l, "upper": u, "violations": v })).collect::<Vec<_>>(),
            "well_formed": verdict,
            "conditions": report,
        }),
        text,
    )
    .with_code(code))
}
