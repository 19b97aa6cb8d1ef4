//! Exact range-compatibility toolkit for operator spaces of symmetric and
//! alternating matrices over small finite fields.
//!
//! An additive map `F` on a matrix space `S` is range-compatible when
//! `F(s)` lies in the column space of `s` for every `s` in `S`, and local when
//! `F(s) = s x` for one fixed vector `x`. This crate computes these sets
//! exactly (as linear spaces over the prime subfield) and checks the known
//! classification results on them by exhaustive enumeration.

pub mod cli;
pub mod error;
pub mod field;
pub mod linalg;
pub mod opspace;
pub mod rcmaps;
pub mod verify;

pub use error::{Error, Result};
pub use field::{make_field, Elem, Field, Scalar};
pub use linalg::{Matrix, SubspaceBasis};
pub use opspace::{Ambient, AmbientKind, OperatorSpace, SpaceFamily, SpaceFamilyId};
pub use rcmaps::{AdditiveMap, RCSpace, RootLinearForm};
pub use verify::{SuiteId, SuiteSpec, VerificationReport};

/// Resource caps shared by the exhaustive procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Caps {
    /// Largest admissible field order.
    pub field_order: u64,
    /// Largest domain `|S| = q^dim S` that may be iterated element by element.
    pub elements: u64,
    /// Largest number of subspaces (or oracle candidates) an enumeration may produce.
    pub enumeration: u64,
}

pub const DEFAULT_ELEMENT_CAP: u64 = 1 << 20;

impl Default for Caps {
    fn default() -> Self {
        Caps {
            field_order: field::DEFAULT_ORDER_CAP,
            elements: DEFAULT_ELEMENT_CAP,
            enumeration: DEFAULT_ELEMENT_CAP,
        }
    }
}

impl Caps {
    /// Defaults, with the element and enumeration caps replaced by `RC_KIT_CAP` when set.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = std::env::var("RC_KIT_CAP")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
        {
            caps.elements = v;
            caps.enumeration = v;
        }
        caps
    }
}
