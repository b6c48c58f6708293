//! Exact computations for u-equivariant, doubly filtered chain complexes: window
//! homology, the four limit orderings of Tate homology with their comparison maps,
//! localization, presentations of the rationals as colimits, and numerical checks of
//! the associated gradient flows.

pub mod algebra;
pub mod catalog;
pub mod complex;
pub mod error;
pub mod flows;
pub mod homology;
pub mod localization;
pub mod presentations;
pub mod tate;

pub use error::{Error, Result};
