//! u-equivariant doubly filtered complexes and their finite windows.

pub mod format;
pub mod model;
pub mod reduce;
pub mod window;

pub use format::{complex_to_json, parse_complex, ComplexDocument};
pub use model::{
    validate, BaseGenerator, BoundaryTerm, EquivariantComplex, ValidationReport, Violation,
};
pub use reduce::reduce_complex;
pub use window::{
    identity_on_generators, instantiate_window, is_zero_complex, u_shift, u_unshift, ChainComplex,
    ChainMap, GenKey, TruncationSpec, WindowComplex,
};
