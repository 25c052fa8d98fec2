//! The `.sonet.json` document format and DOT export.
//!
//! A document is one JSON object with a top-level `kind` (`acyclic`, `csa`
//! or `bsa`), the net under `net`, and optionally a `marking` and `layout`
//! hints. Canonical output sorts keys and node lists; the bsa-net body keeps
//! `lower`, `upper`, `beta` in that order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::acyclic::{AcyclicNet, InvalidNet, RawNet};
use crate::bsa::{BsaNet, InvalidBsa, RawBsa};
use crate::csa::{CsaNet, InvalidCsa, RawCsa};
use crate::foundations::NodeSet;
use crate::semantics::{Marking, Refusal, Step, StepSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetKind {
    Acyclic,
    Csa,
    Bsa,
}

impl NetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Acyclic => "acyclic",
            Self::Csa => "csa",
            Self::Bsa => "bsa",
        }
    }
}

impl fmt::Display for NetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NetKind {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s {
            "acyclic" => Ok(Self::Acyclic),
            "csa" => Ok(Self::Csa),
            "bsa" => Ok(Self::Bsa),
            other => Err(ParseError::UnknownKind(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetBody {
    Acyclic(RawNet),
    Csa(RawCsa),
    Bsa(RawBsa),
}

impl NetBody {
    pub fn kind(&self) -> NetKind {
        match self {
            Self::Acyclic(_) => NetKind::Acyclic,
            Self::Csa(_) => NetKind::Csa,
            Self::Bsa(_) => NetKind::Bsa,
        }
    }
}

/// Drawing position of a node; ignored by every analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetDocument {
    pub net: NetBody,
    pub marking: Option<Vec<String>>,
    pub layout: Option<BTreeMap<String, Position>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("the document must be a JSON object with a string field `kind`")]
    MissingKind,
    #[error("unknown net kind `{0}` (expected acyclic, csa or bsa)")]
    UnknownKind(String),
    #[error("identifier `{id}` is declared twice")]
    DuplicateId { id: String },
    #[error("malformed {kind} document: {message}")]
    Schema { kind: NetKind, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Acyclic(#[from] InvalidNet),
    #[error(transparent)]
    Csa(#[from] InvalidCsa),
    #[error(transparent)]
    Bsa(#[from] InvalidBsa),
    #[error("marking names unknown place `{0}`")]
    UnknownMarkedPlace(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Parts<N> {
    #[allow(dead_code)]
    kind: String,
    net: N,
    #[serde(default)]
    marking: Option<Vec<String>>,
    #[serde(default)]
    layout: Option<BTreeMap<String, Position>>,
}

fn parts<N: DeserializeOwned>(kind: NetKind, v: Value) -> Result<Parts<N>, ParseError> {
    serde_json::from_value(v).map_err(|e| ParseError::Schema { kind, message: e.to_string() })
}

fn first_duplicate<'a>(ids: impl IntoIterator<Item = &'a String>) -> Option<String> {
    let mut seen = BTreeSet::new();
    ids.into_iter().find(|id| !seen.insert(*id)).cloned()
}

fn raw_ids(n: &RawNet) -> impl Iterator<Item = &String> {
    n.places.iter().chain(&n.transitions)
}

fn csa_ids(c: &RawCsa) -> impl Iterator<Item = &String> {
    c.components.iter().flat_map(raw_ids).chain(&c.buffers)
}

/// Parses a document. Only the shape is checked here; use
/// [`NetDocument::build`] for the net conditions.
pub fn parse(text: &str) -> Result<NetDocument, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let kind: NetKind = value.get("kind").and_then(Value::as_str).ok_or(ParseError::MissingKind)?.parse()?;
    let (net, marking, layout) = match kind {
        NetKind::Acyclic => {
            let p: Parts<RawNet> = parts(kind, value)?;
            (NetBody::Acyclic(p.net), p.marking, p.layout)
        }
        NetKind::Csa => {
            let p: Parts<RawCsa> = parts(kind, value)?;
            (NetBody::Csa(p.net), p.marking, p.layout)
        }
        NetKind::Bsa => {
            let p: Parts<RawBsa> = parts(kind, value)?;
            (NetBody::Bsa(p.net), p.marking, p.layout)
        }
    };
    let duplicate = match &net {
        NetBody::Acyclic(n) => first_duplicate(raw_ids(n)),
        NetBody::Csa(c) => first_duplicate(csa_ids(c)),
        NetBody::Bsa(b) => first_duplicate(csa_ids(&b.lower)).or_else(|| first_duplicate(csa_ids(&b.upper))),
    };
    if let Some(id) = duplicate {
        return Err(ParseError::DuplicateId { id });
    }
    Ok(NetDocument { net, marking, layout })
}

impl FromStr for NetDocument {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

fn sorted(v: &[String]) -> Vec<String> {
    let mut v = v.to_vec();
    v.sort();
    v.dedup();
    v
}

fn sorted_pairs(v: &[(String, String)]) -> Vec<(String, String)> {
    let mut v = v.to_vec();
    v.sort();
    v.dedup();
    v
}

fn canonical_raw(n: &RawNet) -> RawNet {
    RawNet { places: sorted(&n.places), transitions: sorted(&n.transitions), arcs: sorted_pairs(&n.arcs) }
}

fn canonical_csa(c: &RawCsa) -> RawCsa {
    RawCsa {
        components: c.components.iter().map(canonical_raw).collect(),
        buffers: sorted(&c.buffers),
        buffer_arcs: sorted_pairs(&c.buffer_arcs),
    }
}

impl NetDocument {
    pub fn new(net: NetBody) -> Self {
        Self { net, marking: None, layout: None }
    }

    pub fn with_marking(mut self, marking: &Marking) -> Self {
        self.marking = Some(marking.places().iter().cloned().collect());
        self
    }

    pub fn kind(&self) -> NetKind {
        self.net.kind()
    }

    /// The same document with every list sorted. Component order is kept.
    pub fn canonical(&self) -> NetDocument {
        let net = match &self.net {
            NetBody::Acyclic(n) => NetBody::Acyclic(canonical_raw(n)),
            NetBody::Csa(c) => NetBody::Csa(canonical_csa(c)),
            NetBody::Bsa(b) => NetBody::Bsa(RawBsa {
                lower: canonical_csa(&b.lower),
                upper: canonical_csa(&b.upper),
                beta: sorted_pairs(&b.beta),
            }),
        };
        NetDocument { net, marking: self.marking.as_deref().map(sorted), layout: self.layout.clone() }
    }

    /// Validates the net and the optional marking.
    pub fn build(&self) -> Result<AnyNet, BuildError> {
        let net = match &self.net {
            NetBody::Acyclic(n) => AnyNet::Acyclic(n.validate()?),
            NetBody::Csa(c) => AnyNet::Csa(CsaNet::new(c)?),
            NetBody::Bsa(b) => AnyNet::Bsa(BsaNet::new(b)?),
        };
        if let Some(m) = &self.marking {
            let places = net.all_places();
            if let Some(p) = m.iter().find(|p| !places.contains(*p)) {
                return Err(BuildError::UnknownMarkedPlace(p.clone()));
            }
        }
        Ok(net)
    }

    /// The stored marking, if any.
    pub fn marking(&self) -> Option<Marking> {
        self.marking.as_ref().map(|m| Marking::new(m.iter().cloned()))
    }

    pub fn from_net(net: &AnyNet) -> Self {
        let body = match net {
            AnyNet::Acyclic(n) => NetBody::Acyclic(n.to_raw()),
            AnyNet::Csa(c) => NetBody::Csa(c.to_raw()),
            AnyNet::Bsa(b) => NetBody::Bsa(b.to_raw()),
        };
        NetDocument::new(body).canonical()
    }

    fn to_value(&self) -> Value {
        let doc = self.canonical();
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), Value::String(doc.kind().as_str().into()));
        let net = match &doc.net {
            NetBody::Acyclic(n) => serde_json::to_value(n),
            NetBody::Csa(c) => serde_json::to_value(c),
            NetBody::Bsa(b) => serde_json::to_value(b),
        };
        obj.insert("net".into(), net.expect("plain data"));
        if let Some(m) = &doc.marking {
            obj.insert("marking".into(), serde_json::to_value(m).expect("plain data"));
        }
        if let Some(l) = &doc.layout {
            obj.insert("layout".into(), serde_json::to_value(l).expect("plain data"));
        }
        Value::Object(obj)
    }
}

/// Canonical text: sorted keys (except `lower`, `upper`, `beta`), sorted
/// lists, two-space indent, flat arrays on one line, trailing newline.
pub fn serialize(doc: &NetDocument) -> String {
    let mut out = String::new();
    write_value(&mut out, &doc.to_value(), 0);
    out.push('\n');
    out
}

fn key_rank(k: &str) -> (u8, &str) {
    match k {
        "lower" => (0, ""),
        "upper" => (1, ""),
        "beta" => (2, ""),
        _ => (3, k),
    }
}

fn is_flat(v: &[Value]) -> bool {
    v.iter().all(|x| !x.is_array() && !x.is_object())
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| " ".repeat(n);
    match v {
        Value::Object(map) if !map.is_empty() => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort_by_key(|k| key_rank(k));
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push_str(",\n");
                }
                out.push_str(&pad(indent + 2));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 2);
            }
            out.push('\n');
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) if !items.is_empty() && !is_flat(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(",\n");
                }
                out.push_str(&pad(indent + 2));
                write_value(out, x, indent + 2);
            }
            out.push('\n');
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// A validated net of any kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyNet {
    Acyclic(AcyclicNet),
    Csa(CsaNet),
    Bsa(BsaNet),
}

impl AnyNet {
    pub fn kind(&self) -> NetKind {
        match self {
            Self::Acyclic(_) => NetKind::Acyclic,
            Self::Csa(_) => NetKind::Csa,
            Self::Bsa(_) => NetKind::Bsa,
        }
    }

    fn system(&self) -> &dyn StepSystem {
        match self {
            Self::Acyclic(n) => n,
            Self::Csa(c) => c,
            Self::Bsa(b) => b,
        }
    }

    /// The net as a csa-net: an acyclic net is one component, a bsa-net its
    /// underlying csa-net.
    pub fn as_csa(&self) -> CsaNet {
        match self {
            Self::Acyclic(n) => CsaNet::single(n.clone()),
            Self::Csa(c) => c.clone(),
            Self::Bsa(b) => b.underlying().clone(),
        }
    }

    /// Places including buffers.
    pub fn all_places(&self) -> NodeSet {
        match self {
            Self::Acyclic(n) => n.places().clone(),
            Self::Csa(c) => c.places().union(c.buffers()).cloned().collect(),
            Self::Bsa(b) => {
                let u = b.underlying();
                u.places().union(u.buffers()).cloned().collect()
            }
        }
    }
}

impl StepSystem for AnyNet {
    fn initial_marking(&self) -> Marking {
        self.system().initial_marking()
    }

    fn transition_ids(&self) -> &NodeSet {
        self.system().transition_ids()
    }

    fn pre(&self, t: &str) -> &NodeSet {
        self.system().pre(t)
    }

    fn post(&self, t: &str) -> &NodeSet {
        self.system().post(t)
    }

    fn refusal(&self, m: &Marking, u: &Step) -> Option<Refusal> {
        self.system().refusal(m, u)
    }

    fn enabled_steps(&self, m: &Marking, singletons_only: bool) -> Vec<Step> {
        self.system().enabled_steps(m, singletons_only)
    }

    fn firing_sequences_defined(&self) -> bool {
        self.system().firing_sequences_defined()
    }

    fn fire_unchecked(&self, m: &Marking, u: &Step) -> Marking {
        self.system().fire_unchecked(m, u)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotOptions {
    pub marking: Option<Marking>,
    /// Transitions to emphasise, together with their surrounding places.
    pub highlight: Option<NodeSet>,
}

fn quote(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

struct DotWriter<'a> {
    out: String,
    opts: &'a DotOptions,
    lit: NodeSet,
}

impl DotWriter<'_> {
    fn place(&mut self, p: &str, indent: &str, buffer: bool) {
        let marked = self.opts.marking.as_ref().is_some_and(|m| m.contains(p));
        let mut label = quote(p);
        if marked {
            label.insert_str(label.len() - 1, "\\n●");
        }
        let mut attrs = vec![format!("label={label}")];
        if buffer {
            attrs.push("shape=doublecircle, style=filled, fillcolor=\"#e8e8e8\", class=buffer".into());
        } else {
            attrs.push("shape=circle".into());
        }
        if marked {
            attrs.push("class=marked, penwidth=2".into());
        }
        if self.lit.contains(p) {
            attrs.push("color=red".into());
        }
        let _ = writeln!(self.out, "{indent}{} [{}];", quote(p), attrs.join(", "));
    }

    fn transition(&mut self, t: &str, indent: &str) {
        let mut attrs = vec!["shape=box".to_owned()];
        if self.lit.contains(t) {
            attrs.push("color=red, penwidth=2".into());
        }
        let _ = writeln!(self.out, "{indent}{} [{}];", quote(t), attrs.join(", "));
    }

    fn component(&mut self, name: &str, label: &str, net: &AcyclicNet) {
        let _ = writeln!(self.out, "  subgraph cluster_{name} {{");
        let _ = writeln!(self.out, "    label={};", quote(label));
        let _ = writeln!(self.out, "    style=dashed;");
        for p in net.places() {
            self.place(p, "    ", false);
        }
        for t in net.transitions() {
            self.transition(t, "    ");
        }
        let _ = writeln!(self.out, "  }}");
    }

    fn arcs<'b>(&mut self, arcs: impl IntoIterator<Item = &'b (String, String)>, style: &str) {
        for (x, y) in arcs {
            let _ = writeln!(self.out, "  {} -> {}{};", quote(x), quote(y), style);
        }
    }

    fn csa(&mut self, net: &CsaNet, prefix: &str, label: &str) {
        for (i, c) in net.components().iter().enumerate() {
            self.component(&format!("{prefix}{i}"), &format!("{label} {}", i + 1), c);
        }
        for q in net.buffers() {
            self.place(q, "  ", true);
        }
        for c in net.components() {
            self.arcs(c.flow(), "");
        }
        self.arcs(net.buffer_arcs(), " [style=dashed, class=buffer_arc]");
    }
}

/// Graphviz description of a net: circles for places, boxes for
/// transitions, buffers double-circled, marked places with a token dot,
/// dashed clusters per component and dotted undirected β edges.
pub fn export_dot(net: &AnyNet, opts: &DotOptions) -> String {
    let mut lit = NodeSet::new();
    if let Some(h) = &opts.highlight {
        for t in h.iter().filter(|t| net.transition_ids().contains(*t)) {
            lit.insert(t.clone());
            lit.extend(net.pre(t).iter().cloned());
            lit.extend(net.post(t).iter().cloned());
        }
    }
    let mut w = DotWriter { out: String::new(), opts, lit };
    w.out.push_str("digraph sonet {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
    match net {
        AnyNet::Acyclic(n) => {
            for p in n.places() {
                w.place(p, "  ", false);
            }
            for t in n.transitions() {
                w.transition(t, "  ");
            }
            w.arcs(n.flow(), "");
        }
        AnyNet::Csa(c) => w.csa(c, "", "component"),
        AnyNet::Bsa(b) => {
            w.csa(b.upper(), "upper_", "upper");
            w.csa(b.lower(), "lower_", "lower");
            w.arcs(b.beta(), " [style=dotted, dir=none, constraint=false, class=beta]");
        }
    }
    w.out.push_str("}\n");
    w.out
}
