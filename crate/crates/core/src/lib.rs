//! Recovery and stability of approximate unitary
//! representations of finite groups.
//!
//! Given a matrix-valued map on a finite group, the crate measures its
//! Gowers-type defects, builds the Stinespring dilation of the associated
//! positive definite map, and runs the constructive recovery pipelines that
//! produce a nearby genuine representation together with a ledger of every
//! bound that the construction is guaranteed to satisfy.

pub mod dilation;
pub mod error;
pub mod experiment;
pub mod groups;
pub mod instances;
pub mod matcore;
pub mod random;
pub mod recovery;
pub mod seminorms;
pub mod suite;
pub mod tolerance;
pub mod uniformity;

pub use error::{Error, Result};

pub use matcore::CMatrix;

pub use groups::{FiniteGroup, GroupMap};
pub use seminorms::Seminorm;
pub use tolerance::ToleranceProfile;
