//! Finitely generated abelian groups in invariant-factor form.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient ring of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Int,
    Rat,
}

impl Ring {
    pub fn is_field(self) -> bool {
        matches!(self, Ring::Rat)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::Int => "Z",
            Ring::Rat => "Q",
        })
    }
}

impl std::str::FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "int" | "integer" | "integers" => Ok(Ring::Int),
            "q" | "rat" | "rational" | "rationals" => Ok(Ring::Rat),
            other => Err(Error::Parse(format!("unknown ring `{other}`"))),
        }
    }
}

/// `Z^free_rank + Z/d_1 + ... + Z/d_k` with `d_1 | d_2 | ... | d_k` and every `d_i > 1`.
///
/// Over a field only `free_rank` is used and it is the dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(order: u64) -> Self {
        Self::from_orders(&[BigInt::from(order)])
    }

    /// Normalizes arbitrary cyclic orders (0 meaning infinite) into invariant factors.
    pub fn from_orders(orders: &[BigInt]) -> Self {
        let free_rank = orders.iter().filter(|o| o.is_zero()).count();
        let mut factors: Vec<BigInt> = orders
            .iter()
            .filter(|o| !o.is_zero())
            .map(num_traits::Signed::abs)
            .collect();
        // Repeatedly replace (a, b) by (gcd, lcm) until the chain divides.
        let n = factors.len();
        for i in 0..n {
            for j in i + 1..n {
                let g = num_integer::Integer::gcd(&factors[i], &factors[j]);
                let l = &factors[i] / &g * &factors[j];
                factors[i] = g;
                factors[j] = l;
            }
        }
        factors.retain(|d| !d.is_one());
        FgAbGroup {
            free_rank,
            torsion: factors,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Cyclic orders of the normal-form generators: torsion first, then zeros for free summands.
    pub fn orders(&self) -> Vec<BigInt> {
        self.torsion
            .iter()
            .cloned()
            .chain(std::iter::repeat_n(BigInt::zero(), self.free_rank))
            .collect()
    }

    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders = self.orders();
        orders.extend(other.orders());
        Self::from_orders(&orders)
    }

    pub fn render(&self, ring: Ring) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let base = ring.to_string();
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push(base.clone()),
            r => parts.push(format!("{base}^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        parts.join(" + ")
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Ring::Int))
    }
}
