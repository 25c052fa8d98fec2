//! Structured acyclic nets.
//!
//! Acyclic nets, communication structured acyclic nets (csa-nets) and
//! behavioural structured acyclic nets (bsa-nets): validation,
//! classification, step semantics, well-formedness, scenarios, syn-cycles
//! and phases, plus a JSON document format.

pub mod acyclic;
pub mod bsa;
pub mod csa;
pub mod foundations;
pub mod netio;
pub mod scenarios;
pub mod semantics;
pub mod wellformed;

pub mod fixtures;

pub use acyclic::{AcyclicNet, InvalidNet, NetClass, NetViolation, RawNet};
pub use bsa::{BsaNet, RawBsa};
pub use csa::{CsaClass, CsaNet, RawCsa};
pub use netio::{AnyNet, NetDocument, NetKind};
pub use foundations::{natural_cmp, node_set, NodeSet, Relation, SetSequence};
pub use semantics::{
    Behaviour, BehaviourKind, BehaviourQuery, Limits, Marking, MixedStepSequence, Refusal, SemanticsError, Step,
    StepSequence, StepSystem,
};
