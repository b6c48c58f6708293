//! Localization of a graded module at a degree `-2` endomorphism, and the Euler-class
//! action `u^-1` followed by projection on `HT_a`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{column_basis, rank, solve};
use crate::algebra::{IntMatrix, RatMatrix, Ring};
use crate::complex::{
    instantiate_window, ChainMap, EquivariantComplex, GenKey, TruncationSpec, WindowComplex,
};
use crate::error::{Error, Result};
use crate::homology::{homology, induced_map};

/// Finite-dimensional graded pieces with `t[d]: H_{d+2} -> H_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GradedModule {
    pub dims: BTreeMap<i64, usize>,
    pub t: BTreeMap<i64, RatMatrix>,
}

impl GradedModule {
    pub fn new(dims: BTreeMap<i64, usize>, t: BTreeMap<i64, RatMatrix>) -> Result<Self> {
        for (d, m) in &t {
            let (rows, cols) = (
                dims.get(d).copied().unwrap_or(0),
                dims.get(&(d + 2)).copied().unwrap_or(0),
            );
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "T in degree {d} is {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(GradedModule { dims, t })
    }

    fn dim(&self, d: i64) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    fn t_at(&self, d: i64) -> Option<&RatMatrix> {
        self.t.get(&d)
    }

    /// `T^j: H_{d+2j} -> H_d`, or `None` once the data runs out.
    fn power(&self, d: i64, j: usize) -> Option<RatMatrix> {
        let mut m = RatMatrix::identity(self.dim(d));
        for i in 0..j as i64 {
            m = &m * self.t_at(d + 2 * i)?;
        }
        Some(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalizedDegree {
    /// Dimension of the eventual image, `None` when it did not settle within the probe.
    pub dimension: Option<usize>,
    /// First power from which the image stayed constant.
    pub stabilized_at: Option<usize>,
    /// Basis of the eventual image (columns), when settled.
    pub basis: Option<RatMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalizedModule {
    pub degrees: BTreeMap<i64, LocalizedDegree>,
    /// Whether `T` restricts to a bijection from degree `d + 2` onto degree `d`.
    pub t_bijective: BTreeMap<i64, Option<bool>>,
}

impl LocalizedModule {
    pub fn dimension(&self, d: i64) -> Option<usize> {
        self.degrees.get(&d).and_then(|x| x.dimension)
    }
}

/// Images of `T^j` settling for at least `MIN_RUN` further powers count as stable.
const MIN_RUN: usize = 2;

/// Per degree, the eventual image `cap_j im T^j` with the induced action of `T`.
pub fn localize_module(h: &GradedModule, probe_depth: usize) -> LocalizedModule {
    let mut degrees = BTreeMap::new();
    for &d in h.dims.keys() {
        let ranks: Vec<(usize, RatMatrix)> = (0..=probe_depth)
            .map_while(|j| h.power(d, j).map(|m| (rank(&m), m)))
            .collect();
        let last = ranks.len() - 1;
        let settled = (0..=last)
            .find(|&j| last - j >= MIN_RUN && ranks[j..].iter().all(|(r, _)| *r == ranks[j].0));
        let entry = match settled {
            Some(j) => {
                let cols = column_basis(&ranks[j].1);
                let basis =
                    RatMatrix::from_columns(&cols, h.dim(d)).expect("columns share a length");
                LocalizedDegree {
                    dimension: Some(cols.len()),
                    stabilized_at: Some(j),
                    basis: Some(basis),
                }
            }
            None => LocalizedDegree {
                dimension: None,
                stabilized_at: None,
                basis: None,
            },
        };
        degrees.insert(d, entry);
    }
    let mut t_bijective = BTreeMap::new();
    for (&d, t) in &h.t {
        let (Some(lo), Some(hi)) = (degrees.get(&d), degrees.get(&(d + 2))) else {
            continue;
        };
        let verdict = match (&lo.basis, &hi.basis) {
            (Some(bl), Some(bh)) => {
                let images = t * bh;
                let inside = images.columns().iter().all(|c| solve(bl, c).is_some());
                Some(inside && bl.cols() == bh.cols() && rank(&images) == bh.cols())
            }
            _ => None,
        };
        t_bijective.insert(d, verdict);
    }
    LocalizedModule {
        degrees,
        t_bijective,
    }
}

/// `u^-1` followed by the projection back to the window's cut: `u^k g -> u^(k-1) g`,
/// dropped when it falls below the cut.
pub fn euler_endomorphism(w: &WindowComplex) -> Result<ChainMap> {
    let mut matrices = BTreeMap::new();
    for d in w.chain.stored_degrees() {
        if !w.chain.stored_degrees().contains(&(d - 2)) {
            continue;
        }
        let (src, tgt) = (w.chain.generators(d), w.chain.generators(d - 2));
        let mut m = IntMatrix::zeros(tgt.len(), src.len());
        for (j, key) in src.iter().enumerate() {
            let image = GenKey {
                base: key.base,
                shift: key.shift - 1,
            };
            if let Some(i) = tgt.iter().position(|t| *t == image) {
                m.set(i, j, BigInt::from(1));
            }
        }
        matrices.insert(d, m);
    }
    let map = ChainMap {
        degree_shift: -2,
        matrices,
    };
    map.verify(&w.chain, &w.chain)?;
    Ok(map)
}

/// `HT_a` (no action cut) over Q in the given degrees, with the Euler-class action.
pub fn equivariant_module(
    c: &Arc<EquivariantComplex>,
    a: i64,
    degrees: (i64, i64),
) -> Result<GradedModule> {
    let w = instantiate_window(c, &TruncationSpec::full(degrees.0, degrees.1).with_a(a))?;
    let h = homology(&w, Ring::Rat)?;
    let t_map = induced_map(&euler_endomorphism(&w)?, &w.chain, &w.chain, &h, &h)?;
    let dims = (degrees.0..=degrees.1).map(|d| (d, h.rank(d))).collect();
    let t = t_map
        .matrices
        .iter()
        .map(|(d, m)| (d - 2, m.clone()))
        .collect();
    GradedModule::new(dims, t)
}
