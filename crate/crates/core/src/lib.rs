//! Pontryagin duality for group bundles with finite base and finite Abelian fibres.
//!
//! A [`GroupBundle`] is a disjoint union of finite Abelian groups `G_x`, one per
//! base point, each carrying the Haar measure `c_x · counting`. From it the crate
//! builds the dual bundle of character groups with the Plancherel-normalised dual
//! Haar system, the double dual, and the evaluation map `Φ(s)(ω) = ω(s)`, and it
//! certifies the identities that make `Φ` an isomorphism of group bundles:
//!
//! * [`group`]: exact arithmetic on `∏ Z_{n_j}`, characters and invariant factors.
//! * [`bundle`]: bundles, Haar systems and the convolution *-algebra `C_c(G)`.
//! * [`duality`]: dual bundles, the fibrewise Fourier/Gelfand transform and `Φ`.
//! * [`bochner`]: positive-definite functions `h* * h` and their Bochner measures.
//! * [`harness`]: eventually-trivialised sequences and sequential continuity of `Φ`.
//! * [`document`] and [`cli`]: the JSON bundle format and the command-line front end.

pub mod bochner;
pub mod bundle;
pub mod cli;
pub mod document;
pub mod duality;
pub mod error;
pub mod group;
pub mod harness;
pub mod report;
mod transform;

pub use bochner::BochnerMeasure;
pub use bundle::{BundleElement, BundleFunction, FibreSubset, GroupBundle};
pub use duality::{DualBundle, DualFunction, TransformPath};
pub use error::{Error, Result};
pub use group::{Character, FiniteAbelianGroup, GroupElement, Phase};
pub use harness::SequenceScenario;
pub use report::{Check, Status, VerificationReport};

/// Re-exported so callers do not need a direct `num-complex` dependency.
pub use num_complex::Complex64;

/// Default absolute tolerance for floating-point checks, scaled by operand norms.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
