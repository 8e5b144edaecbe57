//! Fisher information for one-parameter qubit models.
//!
//! - [`matkernel`]: small dense complex matrices, Hermitian eigendecomposition, PSD square roots.
//! - [`model`]: pure families and their two-component orthogonal mixtures.
//! - [`sld`]: symmetric logarithmic derivatives and quantum information.
//! - [`measure`]: POVMs, classical Fisher information, attainability and attaining measurements.
//! - [`estim`]: Monte Carlo maximum-likelihood experiments against both Cramér–Rao bounds.

pub mod error;
pub mod estim;
pub mod matkernel;
pub mod measure;
pub mod model;
pub mod sld;

pub use error::{Error, Result};
pub use matkernel::{ComplexMatrix, HermitianEig, C64};
pub use model::{BlochVector, DerivativeMethod, PureFamily, PureKind, QubitModel, Weight, WeightFamily};
