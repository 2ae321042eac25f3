//! Finite higher-dimensional transition systems at desk scale.
//!
//! The crate models concurrency as transition systems whose transitions are
//! tuples of simultaneous actions, together with the machinery that makes
//! them a usable mathematical laboratory: axiom validation and closure,
//! standard generated objects, hom-set enumeration and finite colimits,
//! cylinder and path-space functors with their adjunction, the cubical and
//! regular subcategories with their coreflection and reflection, a lifting
//! solver, cellular decompositions with relocation of state-merging cells,
//! and a bounded saturation procedure that exhibits the causal-collapse
//! behaviour of fibrant approximations.

pub mod catops;
pub mod cli;
pub mod cylinder;
pub mod document;
pub mod error;
pub mod generators;
pub mod model;
pub mod morphism;
pub mod subcats;
pub mod system;

pub use error::{Error, Result};
pub use morphism::{find_isomorphism, Morphism};
pub use system::{ActionId, Alphabet, Label, StateId, Transition, TransitionSystem};

/// Default bound on the dimension of generated objects; the interval and the
/// terminal object are infinite-dimensional and get truncated to this.
/// Overridable per call and, in the CLI, via `HDTS_DMAX`.
pub const DEFAULT_DMAX: usize = 4;

/// The three categories the operations are parameterized over: weak systems,
/// cubical systems and regular systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Wts,
    Cts,
    Rts,
}

impl Variant {
    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "wts" => Some(Variant::Wts),
            "cts" => Some(Variant::Cts),
            "rts" => Some(Variant::Rts),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Wts => "wts",
            Variant::Cts => "cts",
            Variant::Rts => "rts",
        }
    }
}
