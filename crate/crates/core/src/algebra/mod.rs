//! Exact linear algebra over the integers and rationals.

pub mod group;
pub mod homology;
pub mod lattice;
pub mod laurent;
pub mod matrix;
pub mod rational;
pub mod snf;

pub use group::{FgAbGroup, Ring};
pub use homology::{homology_of_pair, induced_matrix, map_verdicts, PairHomology};
pub use laurent::LaurentPoly;
pub use matrix::{IntMatrix, Matrix, RatMatrix};
pub use snf::{smith_normal_form, SmithDecomposition};
