//! Exact asymptotic expansions of Hermitian matrix integrals.
//!
//! The expansion is computed three ways and cross-checked: by summing Wick
//! pairings and ribbon graphs, by the closed Penner-model formula in Bernoulli
//! numbers, and through the determinant tau-function of the KP hierarchy. The
//! `stabilizer` module checks the sl(2) stability of the associated point of
//! the Grassmannian symbolically.

pub mod kp;
pub mod npoly;
pub mod penner;
pub mod profile;
pub mod rational;
pub mod ribbon;
pub mod series;
pub mod stabilizer;
pub mod wick;

pub use npoly::NPoly;
pub use profile::DegreeProfile;
pub use rational::Rational;
pub use series::{Coeff, NPolySeries, RationalSeries, SeriesError, VariableSpec, WeightedSeries};
