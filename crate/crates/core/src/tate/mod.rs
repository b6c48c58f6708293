//! Towers and their limits, bidirect grids, and the four Tate groups with their canonical maps.

mod backwards;
mod diagram;
mod grid;
mod localize;
mod tower;

pub use backwards::{backwards_split, BackwardsSplit, BackwardsSummary};
pub use diagram::{
    corner_matches, four_tate_groups, sigma_surjectivity, DegreeDiagram, DiagramParams,
    HorizonBehaviour, MapReport, TateDiagram,
};
pub use grid::{build_grid, BidirectGrid};
pub use localize::{
    equivariant_module, euler_endomorphism, localize_module, GradedModule, LocalizedDegree,
    LocalizedModule,
};
pub use tower::{
    direct_limit, inverse_limit, ColimitElement, Direction, LimitValue, ScalingRule, Stabilization,
    StableImage, Tower, TowerColimit, COLIMIT_PROBE_DEPTH, RATIONALS_PRIME_BOUND,
};
