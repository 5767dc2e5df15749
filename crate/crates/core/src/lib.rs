//! Numerical laboratory for non-degenerate dispersionless Toda solutions built
//! from a pair of conformal-map series and a polynomial Hamiltonian.

pub mod conformal_pair;
pub mod coords;
pub mod error;
pub mod flows;
pub mod grunsky;
pub mod hamiltonian;
pub mod reductions;
pub mod series;
pub mod special;
mod util;

pub use conformal_pair::{fixtures, ConformalPair, Resolution};
pub use coords::TodaCoordinates;
pub use error::{Result, TodaError};
pub use grunsky::{FaberPolynomial, GrunskyTable};
pub use hamiltonian::{GaugeTerm, Hamiltonian, Monomial, MonomialSum, Variable};
pub use series::{Flavor, LaurentSeries, C64};
