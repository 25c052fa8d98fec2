//! Random net generators and brute-force reference semantics.
//!
//! The oracle works straight from the arc list: steps are found by trying
//! every subset of transitions, markings by plain breadth-first search, and
//! well-formedness by checking every step sequence against the definition.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use proptest::prelude::*;
use sonet_core::{Marking, RawCsa, RawNet, Step, StepSequence};

pub type Set = BTreeSet<String>;

/// Sequence cap shared by the oracle and library enumerations.
pub const CAP: usize = 2_000;

/// Places to the left of a transition in the random order feed it, places
/// to the right are fed by it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    General,
    /// At most one producer per place.
    Backward,
    /// At most one producer and one consumer per place.
    Occurrence,
}

pub fn net(shape: Shape, max_t: usize) -> impl Strategy<Value = RawNet> {
    (1..=max_t, 2usize..=9)
        .prop_flat_map(|(nt, np)| {
            let order: Vec<usize> = (0..nt + np).collect();
            (Just(nt), Just(np), Just(order).prop_shuffle(), prop::collection::vec(0u8..10, nt * np), 2u8..5)
        })
        .prop_map(move |(nt, np, order, dice, density)| build(shape, nt, np, &order, &dice, density))
}

fn build(shape: Shape, nt: usize, np: usize, order: &[usize], dice: &[u8], density: u8) -> RawNet {
    // node k < np is place p{k+1}; otherwise transition t{k-np+1}
    let rank: Vec<usize> = {
        let mut r = vec![0; nt + np];
        for (pos, &k) in order.iter().enumerate() {
            r[k] = pos;
        }
        r
    };
    let place = |i: usize| format!("p{}", i + 1);
    let trans = |j: usize| format!("t{}", j + 1);
    let mut arcs: Vec<(String, String)> = Vec::new();
    let mut producers: BTreeMap<usize, usize> = BTreeMap::new();
    let mut consumers: BTreeMap<usize, usize> = BTreeMap::new();
    for j in 0..nt {
        for i in 0..np {
            if dice[j * np + i] >= density {
                continue;
            }
            if rank[i] < rank[np + j] {
                let c = consumers.entry(i).or_default();
                if shape == Shape::Occurrence && *c > 0 {
                    continue;
                }
                *c += 1;
                arcs.push((place(i), trans(j)));
            } else {
                let c = producers.entry(i).or_default();
                if shape != Shape::General && *c > 0 {
                    continue;
                }
                *c += 1;
                arcs.push((trans(j), place(i)));
            }
        }
    }
    let mut places: Vec<String> = (0..np).map(place).collect();
    for j in 0..nt {
        let t = trans(j);
        if !arcs.iter().any(|(_, y)| *y == t) {
            let p = format!("i{}", j + 1);
            arcs.push((p.clone(), t.clone()));
            places.push(p);
        }
        if !arcs.iter().any(|(x, _)| *x == t) {
            let p = format!("o{}", j + 1);
            arcs.push((t.clone(), p.clone()));
            places.push(p);
        }
    }
    RawNet { places, transitions: (0..nt).map(trans).collect(), arcs }
}

pub fn any_net(max_t: usize) -> impl Strategy<Value = RawNet> {
    prop_oneof![net(Shape::General, max_t), net(Shape::Backward, max_t), net(Shape::Occurrence, max_t)]
}

/// Reference semantics computed from the arc list alone.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub places: Set,
    pub transitions: Vec<String>,
    pub pre: BTreeMap<String, Set>,
    pub post: BTreeMap<String, Set>,
    /// Buffer places of a csa-net; a step may supply its own buffer inputs.
    pub buffers: Set,
    steps_at: std::cell::RefCell<HashMap<Set, Vec<Set>>>,
}

pub type Run = (Vec<Set>, Set);

impl Oracle {
    pub fn of(raw: &RawNet) -> Self {
        let mut pre: BTreeMap<String, Set> = BTreeMap::new();
        let mut post: BTreeMap<String, Set> = BTreeMap::new();
        for x in raw.places.iter().chain(&raw.transitions) {
            pre.insert(x.clone(), Set::new());
            post.insert(x.clone(), Set::new());
        }
        for (x, y) in &raw.arcs {
            post.get_mut(x).unwrap().insert(y.clone());
            pre.get_mut(y).unwrap().insert(x.clone());
        }
        Self {
            places: raw.places.iter().cloned().collect(),
            transitions: raw.transitions.clone(),
            pre,
            post,
            buffers: Set::new(),
            steps_at: Default::default(),
        }
    }

    /// One flat net of all components plus the buffers and their arcs.
    pub fn of_csa(raw: &RawCsa) -> Self {
        let mut flat = RawNet::default();
        for c in &raw.components {
            flat.places.extend(c.places.iter().cloned());
            flat.transitions.extend(c.transitions.iter().cloned());
            flat.arcs.extend(c.arcs.iter().cloned());
        }
        flat.places.extend(raw.buffers.iter().cloned());
        flat.arcs.extend(raw.buffer_arcs.iter().cloned());
        let mut o = Self::of(&flat);
        o.buffers = raw.buffers.iter().cloned().collect();
        o
    }

    pub fn initial(&self) -> Set {
        self.places.iter().filter(|p| self.pre[*p].is_empty()).cloned().collect()
    }

    pub fn finals(&self) -> Set {
        self.places.iter().filter(|p| self.post[*p].is_empty()).cloned().collect()
    }

    pub fn pre_of(&self, u: &Set) -> Set {
        u.iter().flat_map(|t| self.pre[t].iter().cloned()).collect()
    }

    pub fn post_of(&self, u: &Set) -> Set {
        u.iter().flat_map(|t| self.post[t].iter().cloned()).collect()
    }

    pub fn enabled(&self, m: &Set, u: &Set) -> bool {
        let supplied: Set = self.post_of(u).intersection(&self.buffers).cloned().collect();
        let mut seen = Set::new();
        for t in u {
            for p in &self.pre[t] {
                if !(m.contains(p) || supplied.contains(p)) || !seen.insert(p.clone()) {
                    return false;
                }
            }
        }
        !u.is_empty()
    }

    /// Every enabled step, by trying all subsets.
    pub fn steps(&self, m: &Set) -> Vec<Set> {
        if let Some(s) = self.steps_at.borrow().get(m) {
            return s.clone();
        }
        let n = self.transitions.len();
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let u: Set = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.transitions[i].clone()).collect();
            if self.enabled(m, &u) {
                out.push(u);
            }
        }
        self.steps_at.borrow_mut().insert(m.clone(), out.clone());
        out
    }

    pub fn fire(&self, m: &Set, u: &Set) -> Set {
        let mut next: Set = m.union(&self.post_of(u)).cloned().collect();
        for p in self.pre_of(u) {
            next.remove(&p);
        }
        next
    }

    pub fn reach(&self) -> BTreeSet<Set> {
        self.reach_from(&self.initial())
    }

    pub fn reach_from(&self, m0: &Set) -> BTreeSet<Set> {
        let m0 = m0.clone();
        let mut seen = BTreeSet::from([m0.clone()]);
        let mut queue = VecDeque::from([m0]);
        while let Some(m) = queue.pop_front() {
            for u in self.steps(&m) {
                let next = self.fire(&m, &u);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    /// All step sequences with their end markings; `None` past `cap`.
    pub fn sseq(&self, singletons: bool, cap: usize) -> Option<Vec<Run>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        if self.walk(&self.initial(), &mut path, singletons, cap, &mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn walk(&self, m: &Set, path: &mut Vec<Set>, singletons: bool, cap: usize, out: &mut Vec<Run>) -> bool {
        out.push((path.clone(), m.clone()));
        if out.len() > cap {
            return false;
        }
        for u in self.steps(m) {
            if singletons && u.len() > 1 {
                continue;
            }
            let next = self.fire(m, &u);
            path.push(u);
            let ok = self.walk(&next, path, singletons, cap, out);
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn is_maximal(&self, run: &Run) -> bool {
        self.steps(&run.1).is_empty()
    }

    /// Post-sets pairwise disjoint within and across steps.
    pub fn well_formed_run(&self, steps: &[Set]) -> bool {
        let mut filled = Set::new();
        steps.iter().flatten().all(|t| self.post[t].iter().all(|p| filled.insert(p.clone())))
    }

    /// Every transition occurs somewhere and every step sequence is well-formed.
    pub fn well_formed(&self) -> Option<bool> {
        let runs = self.sseq(false, CAP)?;
        let used: Set = runs.iter().flat_map(|(s, _)| s.iter().flatten().cloned()).collect();
        Some(used.len() == self.transitions.len() && runs.iter().all(|(s, _)| self.well_formed_run(s)))
    }

    pub fn backward_deterministic(&self) -> bool {
        self.places.iter().all(|p| self.pre[p].len() <= 1)
    }

    pub fn occurrence(&self) -> bool {
        self.places.iter().all(|p| self.pre[p].len() <= 1 && self.post[p].len() <= 1)
    }
}

pub fn marking(m: &Set) -> Marking {
    Marking(m.clone())
}

pub fn step(u: &Set) -> Step {
    Step::of(u.iter().cloned()).expect("nonempty")
}

pub fn sequence(steps: &[Set]) -> StepSequence {
    StepSequence(steps.iter().map(step).collect())
}

pub fn sets_of(seq: &StepSequence) -> Vec<Set> {
    seq.steps().iter().map(|u| u.transitions().clone()).collect()
}

/// Renames the nodes of the second component so the two never clash.
fn second(raw: RawNet) -> RawNet {
    let rename = |x: &String| {
        let (head, rest) = x.split_at(1);
        let head = match head {
            "p" => "r",
            "i" => "j",
            "o" => "k",
            _ => "u",
        };
        format!("{head}{rest}")
    };
    RawNet {
        places: raw.places.iter().map(rename).collect(),
        transitions: raw.transitions.iter().map(rename).collect(),
        arcs: raw.arcs.iter().map(|(x, y)| (rename(x), rename(y))).collect(),
    }
}

/// Two components of at most `max_t` transitions each, joined by up to
/// three buffers. Only structurally valid nets with well-formed components
/// are produced.
pub fn csa(max_t: usize) -> impl Strategy<Value = RawCsa> {
    let component = prop_oneof![net(Shape::Occurrence, max_t), net(Shape::Backward, max_t), net(Shape::General, max_t)];
    let link = (any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<bool>(), 0usize..3);
    (component.clone(), component, prop::collection::vec(link, 0..=4))
        .prop_map(|(a, b, links)| {
            let b = second(b);
            let mut buffers: Vec<String> = Vec::new();
            let mut buffer_arcs: Vec<(String, String)> = Vec::new();
            for (x, y, forward, q) in links {
                let (from, to) = if forward { (&a, &b) } else { (&b, &a) };
                let q = format!("q{}", q + 1);
                let producer = from.transitions[x.index(from.transitions.len())].clone();
                let consumer = to.transitions[y.index(to.transitions.len())].clone();
                if !buffers.contains(&q) {
                    buffers.push(q.clone());
                }
                for arc in [(producer, q.clone()), (q, consumer)] {
                    if !buffer_arcs.contains(&arc) {
                        buffer_arcs.push(arc);
                    }
                }
            }
            RawCsa { components: vec![a, b], buffers, buffer_arcs }
        })
        .prop_filter("valid csa-net", |raw| sonet_core::CsaNet::new(raw).is_ok())
}
