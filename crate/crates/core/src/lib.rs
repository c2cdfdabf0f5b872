//! Positive-definite states on free groups: reduced words, the group algebra and its
//! left-regular representation, explicit state families, Gram-matrix certificates and
//! boundary integral representations.

pub mod algebra;
pub mod boundary;
pub mod eigen;
pub mod error;
pub mod gram;
pub mod numeric;
pub mod states;
pub mod suite;
pub mod word;

pub use algebra::{AlgebraElement, HalfSpace, L2Vector};
pub use boundary::{AlphaParams, Cocycle, CylinderMeasure, DepthMeasure};
pub use error::{Error, Result};
pub use gram::{GramMatrix, PsdCertificate};
pub use num_complex::Complex64;
pub use states::{State, StateSpec};
pub use suite::{Report, RunConfig};
pub use word::{Letter, ReducedWord, SphereConstraint};
