//! Multiplicities of simple `G̃ × G̃`-modules in the cohomology of line
//! bundles on regular compactifications of reductive groups.
//!
//! The input is purely combinatorial: a root datum, a smooth fan
//! subdividing the dominant chamber (or a complete fan in the torus case)
//! and a piecewise-linear function on it. The general multiplicity formula
//! reduces to relative cohomology of sign regions of that function, which
//! is computed exactly from an order-complex model over the rationals.
//!
//! Module map:
//! - [`linalg`]: exact matrices, rank, integral solving;
//! - [`rootsys`]: root data, Weyl groups, dot action, lattice cones;
//! - [`fan`]: validated fans and piecewise-linear functions;
//! - [`refine`]: sign-adapted simplicial refinements;
//! - [`cohomology`]: order complexes and relative cohomology dimensions;
//! - [`engine`]: the multiplicity formulas and their cross-checks.

pub mod cohomology;
pub mod engine;
pub mod fan;
pub mod linalg;
pub mod refine;

pub mod rootsys;
pub mod scalar;

pub use num_bigint::BigInt;

/// Arbitrary-precision rational, always in lowest terms.
pub type Rat = num_rational::BigRational;
/// Exact rational matrix.
pub type RatMatrix = linalg::Matrix<Rat>;
/// Exact integer matrix.
pub type IntMatrix = linalg::Matrix<BigInt>;
/// Rational column vector.
pub type RatVector = Vec<Rat>;

pub use cohomology::{PairDims, SimplicialComplex};
pub use engine::{MultiplicityReport, TermContribution};
pub use fan::{Ambient, ChamberFan, FanError, PLFunction};
pub use linalg::Matrix;
pub use refine::{Cell, LabeledComplex, Sign};

pub use rootsys::{CartanType, Coweight, LatticeChoice, RootDatum, Weight, WeylElement};

/// Convenience: an integer as a `Rat`.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
