//! The complex of T*S^2 built from a non-reversible Finsler metric with two simple geodesics.

use serde::{Deserialize, Serialize};

use crate::algebra::{FgAbGroup, Ring};
use crate::complex::{BaseGenerator, EquivariantComplex, TruncationSpec};
use crate::error::{Error, Result};

use super::{
    entry, h, CoefficientScope, DiagramCorners, ExampleBundle, Expected, ExpectedEntry, Family,
};

/// The long horizontal weights `c_k = <d d_k^-, d_{k-1}^+>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "rule")]
pub enum WeightRule {
    Constant { value: i64 },
    Cycle { values: Vec<i64> },
    Affine { slope: i64, intercept: i64 },
}

impl Default for WeightRule {
    fn default() -> Self {
        WeightRule::Constant { value: 2 }
    }
}

impl WeightRule {
    /// `c_k` for `k >= 1`.
    pub fn at(&self, k: usize) -> i64 {
        match self {
            WeightRule::Constant { value } => *value,
            WeightRule::Cycle { values } => values[(k - 1) % values.len()],
            WeightRule::Affine { slope, intercept } => slope * k as i64 + intercept,
        }
    }

    pub fn check(&self, horizon: usize) -> Result<()> {
        if let WeightRule::Cycle { values } = self {
            if values.is_empty() {
                return Err(Error::InvalidWeights("empty cycle".into()));
            }
        }
        for k in 1..=horizon {
            let c = self.at(k);
            if c == 0 || c % 2 != 0 {
                return Err(Error::InvalidWeights(format!(
                    "c_{k} = {c} must be even and nonzero"
                )));
            }
        }
        if horizon >= 1 && self.at(1) != 2 {
            return Err(Error::InvalidWeights(format!(
                "c_1 = {} but the first weight is 2",
                self.at(1)
            )));
        }
        Ok(())
    }
}

pub(super) fn complex(horizon: usize, weights: &WeightRule) -> Result<EquivariantComplex> {
    if horizon == 0 {
        return Err(Error::BadParams("T*S^2 needs horizon >= 1".into()));
    }
    weights.check(horizon)?;
    let mut c = EquivariantComplex::new();
    c.add_generator(BaseGenerator::new("min", 0, 0, h(0)).labelled("constant loops, minimum"));
    c.add_generator(BaseGenerator::new("d0+", 2, 0, h(0)).labelled("constant loops, maximum"));
    for k in 1..=horizon {
        let kk = k as i64;
        c.add_generator(BaseGenerator::new(
            format!("r{k}-"),
            2 * kk - 1,
            0,
            h(2 * kk - 1),
        ));
        c.add_generator(BaseGenerator::new(
            format!("r{k}+"),
            2 * kk,
            0,
            h(2 * kk - 1),
        ));
        c.add_generator(BaseGenerator::new(
            format!("d{k}-"),
            2 * kk + 1,
            0,
            h(2 * kk),
        ));
        c.add_generator(BaseGenerator::new(
            format!("d{k}+"),
            2 * kk + 2,
            0,
            h(2 * kk),
        ));
    }
    for k in 1..=horizon {
        let kk = k as i64;
        let (rp, dp, prev) = (format!("r{k}+"), format!("d{k}+"), format!("d{}+", k - 1));
        c.set_boundary(&format!("r{k}-"), &[(kk, -1, &rp)]);
        c.set_boundary(
            &format!("d{k}-"),
            &[(2, 0, &rp), (weights.at(k), 0, &prev), (kk, -1, &dp)],
        );
    }
    Ok(c)
}

/// Loop space homology of S^2 read off the level-zero row, degrees `0..=2K`.
pub fn horizontal_homology_expectation(horizon: usize) -> Vec<ExpectedEntry> {
    let top = 2 * horizon as i64;
    let spec = TruncationSpec {
        a_mu_level: Some(0),
        mu_ceiling: Some(0),
        b_action: None,
        degree_window: (-2, top),
    };
    (-2..=top)
        .map(|d| {
            let group = match d {
                d if d < 0 => FgAbGroup::zero(),
                0 => FgAbGroup::free(1),
                d if d % 2 != 0 => FgAbGroup::free(1),
                _ => FgAbGroup::free(1).direct_sum(&FgAbGroup::cyclic(2)),
            };
            entry(
                "loop-space-homology",
                Ring::Int,
                Expected::WindowGroup {
                    spec: spec.clone(),
                    degree: d,
                    group,
                },
            )
        })
        .collect()
}

pub fn t_star_s2(horizon: usize, weights: WeightRule) -> Result<ExampleBundle> {
    let mut expected = horizontal_homology_expectation(horizon);
    for d in -2..=8i64 {
        let corners = if d % 2 == 0 {
            DiagramCorners::ranks(2, 1)
        } else {
            DiagramCorners::ranks(0, 0)
        };
        expected.push(entry(
            "cotangent-sphere-diagram",
            Ring::Rat,
            Expected::Diagram { degree: d, corners },
        ));
    }
    ExampleBundle::new(
        "t-star-s2",
        Family::TStarS2 { weights },
        horizon,
        CoefficientScope::Both,
        expected,
    )
}
