//! The staircase complex of C^n.

use serde::{Deserialize, Serialize};

use crate::algebra::Ring;
use crate::complex::{BaseGenerator, EquivariantComplex};
use crate::error::{Error, Result};

use super::{
    entry, h, CoefficientScope, DiagramCorners, ExampleBundle, Expected, Family, GroupValue,
};

/// Vertical weight `a_k`: each natural number repeated `n` times.
pub fn cn_weight(n: usize, k: usize) -> i64 {
    k.div_ceil(n) as i64
}

pub(super) fn complex(n: usize, horizon: usize) -> Result<EquivariantComplex> {
    if n == 0 || horizon < 2 {
        return Err(Error::BadParams(format!(
            "C^n needs n >= 1 and horizon >= 2, got n = {n}, K = {horizon}"
        )));
    }
    let mut c = EquivariantComplex::new();
    c.add_generator(BaseGenerator::new("w0+", 0, 0, h(0)).labelled("minimum of H"));
    for k in 1..=horizon {
        let kk = k as i64;
        c.add_generator(BaseGenerator::new(format!("w{k}+"), 2 * kk, 0, h(kk)));
        c.add_generator(BaseGenerator::new(format!("w{k}-"), 2 * kk - 1, 0, h(kk)));
    }
    for k in 1..=horizon {
        let below = format!("w{}+", k - 1);
        let same = format!("w{k}+");
        c.set_boundary(
            &format!("w{k}-"),
            &[(1, 0, &below), (cn_weight(n, k), -1, &same)],
        );
    }
    Ok(c)
}

/// `coeff * u^shift * id`, one of the degree-0/1 staircase generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BasisElement {
    pub name: String,
    pub coeff: i64,
    pub id: String,
    pub shift: i64,
}

/// `x_k = (-1)^k u^-k w_k^+` for `0 <= k <= K` and `y_k = (-1)^(k+1) u^(1-k) w_k^-` for `1 <= k <= K`.
pub fn staircase_basis(horizon: usize) -> Vec<BasisElement> {
    let sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    let mut out = Vec::new();
    for k in 0..=horizon {
        let kk = k as i64;
        out.push(BasisElement {
            name: format!("x{k}"),
            coeff: sign(k),
            id: format!("w{k}+"),
            shift: -kk,
        });
        if k >= 1 {
            out.push(BasisElement {
                name: format!("y{k}"),
                coeff: -sign(k),
                id: format!("w{k}-"),
                shift: 1 - kk,
            });
        }
    }
    out
}

pub fn cn_complex(n: usize, horizon: usize) -> Result<ExampleBundle> {
    let mut expected = Vec::new();
    for d in -2..=8i64 {
        let even = d % 2 == 0;
        let top = if even {
            GroupValue::Rationals
        } else {
            GroupValue::zero()
        };
        let corners = DiagramCorners {
            chain_direct_inverse: top.clone(),
            jones_petrack: top,
            chain_inverse_direct: GroupValue::zero(),
            goodwillie: GroupValue::zero(),
        };
        expected.push(entry(
            "cn-integer-diagram",
            Ring::Int,
            Expected::Diagram { degree: d, corners },
        ));
        let corners = DiagramCorners::ranks(usize::from(even), 0);
        expected.push(entry(
            "cn-rational-diagram",
            Ring::Rat,
            Expected::Diagram { degree: d, corners },
        ));
    }
    ExampleBundle::new(
        "cn",
        Family::Cn { n },
        horizon,
        CoefficientScope::Both,
        expected,
    )
}
