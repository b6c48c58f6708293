//! Example complexes with their known homology and Tate diagrams.

mod cotangent;
mod orbits;
mod rabinowitz;
mod staircase;

use std::sync::Arc;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{FgAbGroup, Ring};
use crate::complex::{instantiate_window, EquivariantComplex, TruncationSpec};
use crate::error::Result;
use crate::homology::{homology, GradedHomology};
use crate::presentations::{IntSequence, SequenceRule};

pub use cotangent::{horizontal_homology_expectation, t_star_s2, WeightRule};
pub use orbits::{local_orbit, torus};
pub use rabinowitz::{rabinowitz_c, rabinowitz_equivariant, rabinowitz_expectations};
pub use staircase::{cn_complex, cn_weight, staircase_basis, BasisElement};

/// Which coefficient rings an example's expectations cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientScope {
    Int,
    Rat,
    Both,
}

impl CoefficientScope {
    pub fn covers(self, ring: Ring) -> bool {
        matches!(
            (self, ring),
            (CoefficientScope::Both, _)
                | (CoefficientScope::Int, Ring::Int)
                | (CoefficientScope::Rat, Ring::Rat)
        )
    }
}

/// A group in one corner of the diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum GroupValue {
    Group {
        group: FgAbGroup,
    },
    /// The additive group of the rationals, reached only as a colimit over the horizon.
    Rationals,
}

impl GroupValue {
    pub fn group(g: FgAbGroup) -> Self {
        GroupValue::Group { group: g }
    }

    pub fn zero() -> Self {
        GroupValue::group(FgAbGroup::zero())
    }

    pub fn free(r: usize) -> Self {
        GroupValue::group(FgAbGroup::free(r))
    }

    pub fn render(&self, ring: Ring) -> String {
        match self {
            GroupValue::Group { group } => group.render(ring),
            GroupValue::Rationals => "Q".into(),
        }
    }
}

/// The four corners in one degree, as (top-left, top-right, bottom-left, bottom-right).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagramCorners {
    pub chain_direct_inverse: GroupValue,
    pub jones_petrack: GroupValue,
    pub chain_inverse_direct: GroupValue,
    pub goodwillie: GroupValue,
}

impl DiagramCorners {
    pub fn ranks(top: usize, bottom: usize) -> Self {
        DiagramCorners {
            chain_direct_inverse: GroupValue::free(top),
            jones_petrack: GroupValue::free(top),
            chain_inverse_direct: GroupValue::free(bottom),
            goodwillie: GroupValue::free(bottom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Expected {
    WindowGroup {
        spec: TruncationSpec,
        degree: i64,
        group: FgAbGroup,
    },
    Diagram {
        degree: i64,
        corners: DiagramCorners,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpectedEntry {
    pub tag: String,
    pub ring: Ring,
    pub value: Expected,
}

/// Parameters that rebuild an example at another horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "family")]
pub enum Family {
    Rabinowitz,
    RabinowitzEquivariant,
    Cn {
        n: usize,
    },
    TStarS2 {
        weights: WeightRule,
    },
    LocalOrbit {
        covering: u64,
        good: bool,
        shift: i64,
    },
    Torus {
        n: usize,
        class_bound: i64,
    },
    File,
}

impl Family {
    /// Rebuilds the complex at horizon `k` (ignored by horizon-free families).
    pub fn build(&self, k: usize) -> Result<EquivariantComplex> {
        Ok(match self {
            Family::Rabinowitz => rabinowitz::complex(),
            Family::RabinowitzEquivariant => rabinowitz::equivariant_complex(),
            Family::Cn { n } => staircase::complex(*n, k)?,
            Family::TStarS2 { weights } => cotangent::complex(k, weights)?,
            Family::LocalOrbit {
                covering,
                good,
                shift,
            } => orbits::orbit_complex(*covering, *good, *shift)?,
            Family::Torus { n, class_bound } => orbits::torus_complex(*n, *class_bound),
            Family::File => {
                return Err(crate::Error::BadParams(
                    "a file complex has no horizon".into(),
                ))
            }
        })
    }

    pub fn has_horizon(&self) -> bool {
        matches!(self, Family::Cn { .. } | Family::TStarS2 { .. })
    }

    /// Multiplier of the horizon step `k - 1 -> k` on the top row, when the family has one.
    pub fn horizon_weight(&self, k: usize) -> Option<i64> {
        match self {
            Family::Cn { n } => Some(cn_weight(*n, k)),
            _ => None,
        }
    }

    /// The multipliers `horizon_weight(k)`, `k >= 1`, as a sequence rule.
    pub fn horizon_sequence(&self) -> Option<IntSequence> {
        match self {
            Family::Cn { n } => Some(IntSequence::rule(SequenceRule::Repeat { n: *n as u64 })),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExampleBundle {
    pub name: String,
    pub family: Family,
    pub horizon: usize,
    pub complex: Arc<EquivariantComplex>,
    pub expected: Vec<ExpectedEntry>,
    pub scope: CoefficientScope,
}

impl ExampleBundle {
    fn new(
        name: &str,
        family: Family,
        horizon: usize,
        scope: CoefficientScope,
        expected: Vec<ExpectedEntry>,
    ) -> Result<Self> {
        let complex = Arc::new(family.build(horizon)?);
        Ok(ExampleBundle {
            name: name.into(),
            family,
            horizon,
            complex,
            expected,
            scope,
        })
    }

    /// Wraps a complex read from elsewhere; it carries no expectations.
    pub fn from_complex(name: &str, complex: EquivariantComplex) -> Self {
        ExampleBundle {
            name: name.into(),
            family: Family::File,
            horizon: 0,
            complex: Arc::new(complex),
            expected: Vec::new(),
            scope: CoefficientScope::Both,
        }
    }

    pub fn at_horizon(&self, k: usize) -> Result<Arc<EquivariantComplex>> {
        if k == self.horizon || !self.family.has_horizon() {
            return Ok(Arc::clone(&self.complex));
        }
        Ok(Arc::new(self.family.build(k)?))
    }

    pub fn diagram_expectations(&self, ring: Ring) -> impl Iterator<Item = (i64, &DiagramCorners)> {
        self.expected
            .iter()
            .filter(move |e| e.ring == ring)
            .filter_map(|e| match &e.value {
                Expected::Diagram { degree, corners } => Some((*degree, corners)),
                _ => None,
            })
    }
}

/// An expected window group that the engine does not reproduce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mismatch {
    pub tag: String,
    pub ring: Ring,
    pub spec: TruncationSpec,
    pub degree: i64,
    pub expected: FgAbGroup,
    pub found: FgAbGroup,
}

/// Recomputes every window-group expectation of the bundle (each window once).
pub fn window_mismatches(bundle: &ExampleBundle) -> Result<(usize, Vec<Mismatch>)> {
    let mut windows: Vec<(Ring, &TruncationSpec)> = Vec::new();
    for e in &bundle.expected {
        if let Expected::WindowGroup { spec, .. } = &e.value {
            if !windows.iter().any(|(r, s)| *r == e.ring && *s == spec) {
                windows.push((e.ring, spec));
            }
        }
    }
    let computed: Vec<GradedHomology> = windows
        .par_iter()
        .map(|(ring, spec)| homology(&instantiate_window(&bundle.complex, spec)?, *ring))
        .collect::<Result<_>>()?;
    let mut checked = 0;
    let mut out = Vec::new();
    for e in &bundle.expected {
        let Expected::WindowGroup {
            spec,
            degree,
            group,
        } = &e.value
        else {
            continue;
        };
        let i = windows
            .iter()
            .position(|(r, s)| *r == e.ring && *s == spec)
            .expect("collected above");
        let found = computed[i].group(*degree);
        checked += 1;
        if &found != group {
            out.push(Mismatch {
                tag: e.tag.clone(),
                ring: e.ring,
                spec: spec.clone(),
                degree: *degree,
                expected: group.clone(),
                found,
            });
        }
    }
    Ok((checked, out))
}

/// Closed 4-manifold rank arithmetic: `d_n = n^2 + n + 2` against `2^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct XnRankReport {
    pub n: u32,
    pub total_rank: u64,
    pub goodwillie_rank: u64,
    /// `Some(false)` when ranks rule injectivity out, `None` when they say nothing.
    pub kappa_injective: Option<bool>,
    pub kappa_surjective: Option<bool>,
}

pub fn xn_rank_report(n: u32) -> Result<XnRankReport> {
    if n == 0 || n > 62 {
        return Err(crate::Error::BadParams(format!("n = {n} outside 1..=62")));
    }
    let n64 = u64::from(n);
    let binomial = n64 * (n64 - 1) / 2;
    let total_rank = 2 + 2 * n64 + 2 * binomial;
    let goodwillie_rank = 1u64 << n;
    Ok(XnRankReport {
        n,
        total_rank,
        goodwillie_rank,
        kappa_injective: (total_rank > goodwillie_rank).then_some(false),
        kappa_surjective: (total_rank < goodwillie_rank).then_some(false),
    })
}

pub(crate) fn h(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub(crate) fn entry(tag: &str, ring: Ring, value: Expected) -> ExpectedEntry {
    ExpectedEntry {
        tag: tag.into(),
        ring,
        value,
    }
}
