mod common;

use std::collections::BTreeSet;

use common::{marking, sequence, sets_of, step, Oracle, Set, CAP};
use proptest::prelude::*;
use sonet_core::csa::{csa_is_well_formed, csa_maximal_scenarios, csa_scenario_of, csa_scenarios, project, syn_cycles};
use sonet_core::semantics::{behaviours, fire, final_markings, reachable_markings, run};
use sonet_core::{Behaviour, BehaviourKind, BehaviourQuery, CsaClass, CsaNet, Limits, RawCsa, StepSystem};

fn limits() -> Limits {
    Limits::new(CAP, 64)
}

fn build(raw: &RawCsa) -> CsaNet {
    CsaNet::new(raw).expect("generator keeps valid nets")
}

fn component_oracles(raw: &RawCsa) -> Vec<Oracle> {
    raw.components.iter().map(Oracle::of).collect()
}

fn union(items: Vec<Behaviour>) -> Behaviour {
    let mut it = items.into_iter();
    let mut acc = it.next().expect("at least the empty scenario");
    for b in it {
        acc = match (acc, b) {
            (Behaviour::Sequences(mut a), Behaviour::Sequences(b)) => {
                a.extend(b);
                Behaviour::Sequences(a)
            }
            (Behaviour::Mixed(mut a), Behaviour::Mixed(b)) => {
                a.extend(b);
                Behaviour::Mixed(a)
            }
            (Behaviour::Markings(mut a), Behaviour::Markings(b)) => {
                a.extend(b);
                Behaviour::Markings(a)
            }
            _ => unreachable!("same kind throughout"),
        };
    }
    acc
}

fn included(a: &Behaviour, b: &Behaviour) -> bool {
    match (a, b) {
        (Behaviour::Sequences(a), Behaviour::Sequences(b)) => a.is_subset(b),
        (Behaviour::Mixed(a), Behaviour::Mixed(b)) => a.is_subset(b),
        (Behaviour::Markings(a), Behaviour::Markings(b)) => a.is_subset(b),
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, max_local_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn synchronous_steps_match_brute_force(raw in common::csa(4)) {
        let net = build(&raw);
        let o = Oracle::of_csa(&raw);
        let reach = o.reach();
        for m in &reach {
            let lib: BTreeSet<Set> = net.enabled_steps(&marking(m), false).iter().map(|u| u.transitions().clone()).collect();
            let expected: BTreeSet<Set> = o.steps(m).into_iter().collect();
            prop_assert_eq!(&lib, &expected, "at {:?}", m);
            for u in &expected {
                prop_assert_eq!(fire(&net, &marking(m), &step(u)).unwrap(), marking(&o.fire(m, u)));
            }
        }
        let lib_reach: BTreeSet<Set> = reachable_markings(&net, limits()).unwrap().into_iter().map(|m| m.0).collect();
        prop_assert_eq!(&lib_reach, &reach);
        let finals: BTreeSet<Set> = reach.iter().filter(|m| o.steps(m).is_empty()).cloned().collect();
        let lib_finals: BTreeSet<Set> = final_markings(&net, limits()).unwrap().into_iter().map(|m| m.0).collect();
        prop_assert_eq!(lib_finals, finals);

        let Some(runs) = o.sseq(false, CAP) else { return Ok(()) };
        let Ok(Behaviour::Sequences(lib)) = behaviours(&net, BehaviourQuery::with_limits(BehaviourKind::Sseq, limits())) else { return Ok(()) };
        let expected: BTreeSet<Vec<Set>> = runs.iter().map(|(s, _)| s.clone()).collect();
        prop_assert_eq!(lib.iter().map(sets_of).collect::<BTreeSet<_>>(), expected);
        let ends: BTreeSet<Set> = runs.iter().map(|(_, m)| m.clone()).collect();
        prop_assert_eq!(ends, reach);
    }

    #[test]
    fn projections_are_component_runs(raw in common::csa(4)) {
        let net = build(&raw);
        let o = Oracle::of_csa(&raw);
        let parts = component_oracles(&raw);
        let Some(runs) = o.sseq(false, CAP) else { return Ok(()) };
        let component_runs: Vec<BTreeSet<Vec<Set>>> = parts
            .iter()
            .map(|c| c.sseq(false, 100 * CAP).expect("components are small").into_iter().map(|(s, _)| s).collect())
            .collect();
        for (s, _) in &runs {
            for (i, c) in parts.iter().enumerate() {
                let own: Set = c.transitions.iter().cloned().collect();
                let p = project(&net, i, &sequence(s)).unwrap();
                let expected: Vec<Set> = s.iter().map(|u| u.intersection(&own).cloned().collect::<Set>()).filter(|u| !u.is_empty()).collect();
                prop_assert_eq!(&sets_of(&p), &expected);
                prop_assert!(component_runs[i].contains(&expected), "{:?} not a run of component {}", expected, i);
            }
        }
    }

    #[test]
    fn well_formedness_matches_the_definition(raw in common::csa(4)) {
        let net = build(&raw);
        let o = Oracle::of_csa(&raw);
        let Some(expected) = o.well_formed() else { return Ok(()) };
        let verdict = csa_is_well_formed(&net, limits());
        prop_assert_eq!(verdict.is_ok(), expected, "{:?}", verdict);
        if matches!(net.classify(), CsaClass::CsoNet | CsaClass::BdCsaNet) {
            for (s, _) in o.sseq(false, CAP).unwrap() {
                prop_assert!(o.well_formed_run(&s));
            }
        }
    }

    #[test]
    fn syn_cycles_partition_cso_nets(raw in common::csa(4)) {
        let net = build(&raw);
        if net.classify() != CsaClass::CsoNet {
            prop_assert!(syn_cycles(&net).is_err());
            return Ok(());
        }
        let cycles = syn_cycles(&net).unwrap();
        let mut seen = Set::new();
        for c in &cycles {
            prop_assert!(!c.is_empty());
            for t in c {
                prop_assert!(seen.insert(t.clone()), "{t} in two syn-cycles");
            }
        }
        prop_assert_eq!(&seen, net.transitions());

        // every enabled step runs as its syn-cycles, one after another
        let o = Oracle::of_csa(&raw);
        for m in o.reach() {
            for u in o.steps(&m) {
                let parts = net.decompose_step(&marking(&m), &step(&u)).unwrap();
                for part in &parts {
                    prop_assert!(cycles.contains(part.transitions()) || cycles.iter().any(|c| part.transitions().is_subset(c)));
                }
                let mu = run(&net, &marking(&m), &parts).unwrap();
                prop_assert_eq!(mu.last(), &marking(&o.fire(&m, &u)));
            }
        }
    }

    #[test]
    fn scenarios_cover_the_behaviour(raw in common::csa(4)) {
        let net = build(&raw);
        let o = Oracle::of_csa(&raw);
        let Some(runs) = o.sseq(false, CAP) else { return Ok(()) };
        let (Ok(all), Ok(maximal)) = (csa_scenarios(&net, limits()), csa_maximal_scenarios(&net, limits())) else { return Ok(()) };
        for sc in &all {
            prop_assert_eq!(sc.net().classify(), CsaClass::CsoNet);
        }
        let wf = o.well_formed() == Some(true);
        if wf {
            let from_runs: BTreeSet<Set> = runs.iter().map(|(s, _)| s.iter().flatten().cloned().collect()).collect();
            let from_lib: BTreeSet<Set> = all.iter().map(|sc| sc.transitions().clone()).collect();
            prop_assert_eq!(&from_lib, &from_runs);

            // equal scenarios exactly when equal transition sets
            let sample: Vec<&Vec<Set>> = runs.iter().map(|(s, _)| s).step_by(runs.len() / 12 + 1).collect();
            for a in &sample {
                for b in &sample {
                    let sa = csa_scenario_of(&net, &sequence(a)).unwrap();
                    let sb = csa_scenario_of(&net, &sequence(b)).unwrap();
                    let ta: Set = a.iter().flatten().cloned().collect();
                    let tb: Set = b.iter().flatten().cloned().collect();
                    prop_assert_eq!(sa == sb, ta == tb);
                }
            }
        }
        let kinds = [BehaviourKind::Sseq, BehaviourKind::Mixsseq, BehaviourKind::Reach];
        let max_kinds = [BehaviourKind::Maxsseq, BehaviourKind::Maxmixsseq, BehaviourKind::Finreach];
        for (pool, list, always) in [(&all, kinds, true), (&maximal, max_kinds, false)] {
            for kind in list {
                let q = BehaviourQuery::with_limits(kind, limits());
                let Ok(whole) = behaviours(&net, q) else { continue };
                let Ok(parts) = pool.iter().map(|sc| behaviours(sc.net(), q)).collect::<Result<Vec<_>, _>>() else { continue };
                let u = union(parts);
                if always {
                    prop_assert!(included(&u, &whole), "{kind:?}");
                }
                if wf {
                    prop_assert_eq!(&u, &whole, "{:?}", kind);
                }
            }
        }
    }
}
