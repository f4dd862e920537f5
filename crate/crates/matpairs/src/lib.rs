//! Canonical forms and orbit codimensions of complex matrix pairs `(E, Q)`
//! under T-equivalence `(UEV, U^{-T}QV)` and *-equivalence `(UEV, U^{-*}QV)`,
//! computed exactly over the Gaussian rationals.

pub mod blocks;
pub mod codim;
pub mod congruence;
pub mod exactmat;
pub mod fuzz;
pub mod oracle;
pub mod pairs;

pub use exactmat::{GaussianRational, Kind, Matrix};

/// Dense matrix over `Q(i)`; the carrier for every pair, witness and block.
pub type ExactMatrix = Matrix<GaussianRational>;
/// Dense matrix over `Q`, used for realified systems.
pub type RealMatrix = Matrix<num_rational::BigRational>;
