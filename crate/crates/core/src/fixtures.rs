//! The example nets used throughout the documentation and tests.

use crate::acyclic::{AcyclicNet, RawNet};
use crate::bsa::{validate_bsa, BsaNet, RawBsa};
use crate::csa::{validate_csa, CsaNet, RawCsa};
use crate::netio::{NetBody, NetDocument};

fn build(raw: RawNet) -> AcyclicNet {
    raw.validate().expect("fixture nets are valid")
}

pub fn an1_raw() -> RawNet {
    RawNet::new(
        ["p1", "p2", "p3", "p4", "p5"],
        ["a", "b", "c", "d"],
        [
            ("p1", "a"),
            ("a", "p2"),
            ("a", "p3"),
            ("p2", "b"),
            ("b", "p4"),
            ("p3", "c"),
            ("c", "p5"),
            ("p3", "d"),
            ("d", "p5"),
        ],
    )
}

pub fn bd1_raw() -> RawNet {
    RawNet::new(
        ["p1", "p2", "p3", "p4", "p5", "p6"],
        ["a", "b", "c", "d"],
        [
            ("p1", "a"),
            ("a", "p2"),
            ("a", "p3"),
            ("p2", "b"),
            ("b", "p4"),
            ("p3", "c"),
            ("c", "p5"),
            ("p3", "d"),
            ("d", "p6"),
        ],
    )
}

pub fn on1_raw() -> RawNet {
    RawNet::new(
        ["p1", "p2", "p3", "p4", "p5"],
        ["a", "b", "c"],
        [("p1", "a"), ("a", "p2"), ("a", "p3"), ("p2", "b"), ("b", "p4"), ("p3", "c"), ("c", "p5")],
    )
}

pub fn on2_raw() -> RawNet {
    RawNet::new(
        ["p1", "p2", "p3", "p4", "p5"],
        ["a", "b", "d"],
        [("p1", "a"), ("a", "p2"), ("a", "p3"), ("p2", "b"), ("b", "p4"), ("p3", "d"), ("d", "p5")],
    )
}

/// Two transitions filling the same place: not well-formed.
pub fn w1_raw() -> RawNet {
    RawNet::new(
        ["p1", "p2", "p3", "p4"],
        ["a", "b", "c"],
        [("p1", "a"), ("a", "p3"), ("p2", "b"), ("b", "p3"), ("p3", "c"), ("c", "p4")],
    )
}

/// W1 repaired by giving `b` its own output place.
pub fn wf_a_raw() -> RawNet {
    RawNet::new(
        ["p1", "p2", "p3", "p4", "p5"],
        ["a", "b", "c"],
        [("p1", "a"), ("a", "p3"), ("p2", "b"), ("b", "p5"), ("p3", "c"), ("c", "p4")],
    )
}

/// W1 repaired so that `c` follows `b` instead of `a`.
pub fn wf_b_raw() -> RawNet {
    RawNet::new(
        ["p1", "p2", "p3", "p4", "p5"],
        ["a", "b", "c"],
        [("p1", "a"), ("a", "p3"), ("p2", "b"), ("b", "p5"), ("p5", "c"), ("c", "p4")],
    )
}

pub fn an1() -> AcyclicNet {
    build(an1_raw())
}

pub fn bd1() -> AcyclicNet {
    build(bd1_raw())
}

pub fn on1() -> AcyclicNet {
    build(on1_raw())
}

pub fn on2() -> AcyclicNet {
    build(on2_raw())
}

pub fn w1() -> AcyclicNet {
    build(w1_raw())
}

pub fn wf_a() -> AcyclicNet {
    build(wf_a_raw())
}

pub fn wf_b() -> AcyclicNet {
    build(wf_b_raw())
}

fn raw_csa(components: Vec<RawNet>, buffers: &[&str], buffer_arcs: &[(&str, &str)]) -> RawCsa {
    RawCsa {
        components,
        buffers: buffers.iter().map(|q| q.to_string()).collect(),
        buffer_arcs: buffer_arcs.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect(),
    }
}

fn build_csa(raw: RawCsa) -> CsaNet {
    validate_csa(&raw).expect("fixture csa-nets are valid")
}

const CS1_BUFFER_ARCS: [(&str, &str); 6] =
    [("e", "q1"), ("q1", "c"), ("d", "q2"), ("q2", "f"), ("f", "q3"), ("q3", "d")];

pub fn cs1_raw() -> RawCsa {
    let an1 = RawNet::new(
        ["p1", "p2", "p3", "p4"],
        ["a", "b", "c", "d"],
        [("p1", "a"), ("a", "p2"), ("p2", "b"), ("b", "p4"), ("p1", "c"), ("c", "p3"), ("p3", "d"), ("d", "p4")],
    );
    let an2 = RawNet::new(["p5", "p6", "p7"], ["e", "f"], [("p5", "e"), ("e", "p6"), ("p6", "f"), ("f", "p7")]);
    raw_csa(vec![an1, an2], &["q1", "q2", "q3"], &CS1_BUFFER_ARCS)
}

pub fn cso1_raw() -> RawCsa {
    raw_csa(
        vec![
            RawNet::new(["p1", "p2"], ["a"], [("p1", "a"), ("a", "p2")]),
            RawNet::new(["p5", "p6"], ["e"], [("p5", "e"), ("e", "p6")]),
        ],
        &["q1"],
        &[("e", "q1")],
    )
}

pub fn cso2_raw() -> RawCsa {
    raw_csa(
        vec![
            RawNet::new(["p1", "p2", "p4"], ["a", "b"], [("p1", "a"), ("a", "p2"), ("p2", "b"), ("b", "p4")]),
            RawNet::new(["p5", "p6"], ["e"], [("p5", "e"), ("e", "p6")]),
        ],
        &["q1"],
        &[("e", "q1")],
    )
}

pub fn cso3_raw() -> RawCsa {
    raw_csa(
        vec![
            RawNet::new(["p1", "p3", "p4"], ["c", "d"], [("p1", "c"), ("c", "p3"), ("p3", "d"), ("d", "p4")]),
            RawNet::new(["p5", "p6", "p7"], ["e", "f"], [("p5", "e"), ("e", "p6"), ("p6", "f"), ("f", "p7")]),
        ],
        &["q1", "q2", "q3"],
        &CS1_BUFFER_ARCS,
    )
}

pub fn cs1() -> CsaNet {
    build_csa(cs1_raw())
}

pub fn cso1() -> CsaNet {
    build_csa(cso1_raw())
}

pub fn cso2() -> CsaNet {
    build_csa(cso2_raw())
}

pub fn cso3() -> CsaNet {
    build_csa(cso3_raw())
}

fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
    items.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
}

/// Chains `nodes` alternately as place, transition, place, ...
fn chain(nodes: &[&str]) -> Vec<(String, String)> {
    nodes.windows(2).map(|w| (w[0].to_string(), w[1].to_string())).collect()
}

fn raw_from_arcs(arcs: Vec<(String, String)>, places: &[&str]) -> RawNet {
    let transitions: std::collections::BTreeSet<String> = arcs
        .iter()
        .flat_map(|(x, y)| [x, y])
        .filter(|n| !places.contains(&n.as_str()))
        .cloned()
        .collect();
    RawNet::new(places.iter().copied(), transitions, arcs)
}

const BSA0_BETA: [(&str, &str); 10] = [
    ("r1", "p1"),
    ("r2", "p1"),
    ("r3", "p2"),
    ("r5", "p2"),
    ("r7", "p3"),
    ("r8", "p3"),
    ("r9", "p4"),
    ("r11", "p4"),
    ("r10", "p5"),
    ("r11", "p5"),
];

fn bsa_from(upper: &[&[&str]], upper_places: &[&str], lower: &[&[&str]], lower_places: &[&str]) -> RawBsa {
    let upper_arcs = upper.iter().flat_map(|c| chain(c)).collect();
    let lower_arcs = lower.iter().flat_map(|c| chain(c)).collect();
    let beta = BSA0_BETA
        .iter()
        .filter(|(r, p)| lower_places.contains(r) && upper_places.contains(p))
        .copied()
        .collect::<Vec<_>>();
    RawBsa {
        lower: RawCsa { components: vec![raw_from_arcs(lower_arcs, lower_places)], ..Default::default() },
        upper: RawCsa { components: vec![raw_from_arcs(upper_arcs, upper_places)], ..Default::default() },
        beta: pairs(&beta),
    }
}

/// Upper level: `p1` branches into `a b` or `c d`; the lower level runs
/// two alternative lines next to an independent third.
pub fn bsa0_raw() -> RawBsa {
    bsa_from(
        &[&["p1", "a", "p2", "b", "p4"], &["p1", "c", "p3", "d", "p5"]],
        &["p1", "p2", "p3", "p4", "p5"],
        &[
            &["r1", "e", "r3", "f", "r6", "i", "r9"],
            &["r1", "g", "r4", "h", "r7", "j", "r10"],
            &["r2", "k", "r5", "l", "r8", "m", "r11"],
        ],
        &["r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8", "r9", "r10", "r11"],
    )
}

/// The maximal scenario through `a b`.
pub fn bsa0_scenario1_raw() -> RawBsa {
    bsa_from(
        &[&["p1", "a", "p2", "b", "p4"]],
        &["p1", "p2", "p4"],
        &[&["r1", "e", "r3", "f", "r6", "i", "r9"], &["r2", "k", "r5", "l", "r8", "m", "r11"]],
        &["r1", "r2", "r3", "r5", "r6", "r8", "r9", "r11"],
    )
}

/// The maximal scenario through `c d`.
pub fn bsa0_scenario2_raw() -> RawBsa {
    bsa_from(
        &[&["p1", "c", "p3", "d", "p5"]],
        &["p1", "p3", "p5"],
        &[&["r1", "g", "r4", "h", "r7", "j", "r10"], &["r2", "k", "r5", "l", "r8", "m", "r11"]],
        &["r1", "r2", "r4", "r5", "r7", "r8", "r10", "r11"],
    )
}

fn build_bsa(raw: RawBsa) -> BsaNet {
    validate_bsa(&raw).expect("fixture bsa-nets are valid")
}

pub fn bsa0() -> BsaNet {
    build_bsa(bsa0_raw())
}

pub fn bsa0_scenario1() -> BsaNet {
    build_bsa(bsa0_scenario1_raw())
}

pub fn bsa0_scenario2() -> BsaNet {
    build_bsa(bsa0_scenario2_raw())
}

/// Names of the bundled fixtures, in presentation order.
pub const NAMES: [&str; 14] = [
    "AN1", "BD1", "ON1", "ON2", "W1", "WF-A", "WF-B", "CS1", "CSO1", "CSO2", "CSO3", "BSA0", "BSA0-S1", "BSA0-S2",
];

/// A bundled fixture as a canonical document.
pub fn document(name: &str) -> Option<NetDocument> {
    let body = match name {
        "AN1" => NetBody::Acyclic(an1_raw()),
        "BD1" => NetBody::Acyclic(bd1_raw()),
        "ON1" => NetBody::Acyclic(on1_raw()),
        "ON2" => NetBody::Acyclic(on2_raw()),
        "W1" => NetBody::Acyclic(w1_raw()),
        "WF-A" => NetBody::Acyclic(wf_a_raw()),
        "WF-B" => NetBody::Acyclic(wf_b_raw()),
        "CS1" => NetBody::Csa(cs1_raw()),
        "CSO1" => NetBody::Csa(cso1_raw()),
        "CSO2" => NetBody::Csa(cso2_raw()),
        "CSO3" => NetBody::Csa(cso3_raw()),
        "BSA0" => NetBody::Bsa(bsa0_raw()),
        "BSA0-S1" => NetBody::Bsa(bsa0_scenario1_raw()),
        "BSA0-S2" => NetBody::Bsa(bsa0_scenario2_raw()),
        _ => return None,
    };
    Some(NetDocument::new(body).canonical())
}
