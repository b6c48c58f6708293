//! Finite windows `CT_a^b` of an equivariant complex, chain maps between them,
//! and the u-shift isomorphism.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::model::EquivariantComplex;
use crate::algebra::IntMatrix;
use crate::error::{Error, Result};

/// Which generators `u^k g` a window keeps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncationSpec {
    /// Lower A^mu cut `a = pi * a_mu_level`; `None` is minus infinity.
    pub a_mu_level: Option<i64>,
    /// Upper A^mu cut, used for sub-bands such as `{A^mu < 0}`; `None` is plus infinity.
    #[serde(default)]
    pub mu_ceiling: Option<i64>,
    /// Upper A_H cut; `None` is plus infinity.
    pub b_action: Option<BigRational>,
    pub degree_window: (i64, i64),
}

impl TruncationSpec {
    pub fn full(d_lo: i64, d_hi: i64) -> Self {
        TruncationSpec {
            a_mu_level: None,
            mu_ceiling: None,
            b_action: None,
            degree_window: (d_lo, d_hi),
        }
    }

    pub fn with_a(mut self, a: i64) -> Self {
        self.a_mu_level = Some(a);
        self
    }

    pub fn with_b(mut self, b: BigRational) -> Self {
        self.b_action = Some(b);
        self
    }

    pub fn with_ceiling(mut self, c: i64) -> Self {
        self.mu_ceiling = Some(c);
        self
    }

    pub fn keeps(&self, mu: i64, h: &BigRational) -> bool {
        self.a_mu_level.is_none_or(|a| mu >= a)
            && self.mu_ceiling.is_none_or(|c| mu <= c)
            && self.b_action.as_ref().is_none_or(|b| h <= b)
    }

    fn check(&self) -> Result<()> {
        let (lo, hi) = self.degree_window;
        if lo > hi {
            return Err(Error::BadParams(format!(
                "empty degree window [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for TruncationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self
            .a_mu_level
            .map_or("-inf".to_string(), |a| a.to_string());
        let c = self.mu_ceiling.map_or("inf".to_string(), |c| c.to_string());
        let b = self
            .b_action
            .as_ref()
            .map_or("inf".to_string(), |b| b.to_string());
        write!(
            f,
            "mu in [{a}, {c}], h <= {b}, degrees [{}, {}]",
            self.degree_window.0, self.degree_window.1
        )
    }
}

/// An instantiated generator `u^shift * base`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenKey {
    pub base: usize,
    pub shift: i64,
}

/// A bounded chain complex: interior degrees `d_lo..=d_hi` plus one padding degree on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    pub d_lo: i64,
    pub d_hi: i64,
    gens: BTreeMap<i64, Vec<GenKey>>,
    /// `diffs[d]` maps degree `d` to degree `d - 1`, for `d` in `d_lo..=d_hi + 1`.
    diffs: BTreeMap<i64, IntMatrix>,
}

impl ChainComplex {
    pub fn new(
        d_lo: i64,
        d_hi: i64,
        gens: BTreeMap<i64, Vec<GenKey>>,
        diffs: BTreeMap<i64, IntMatrix>,
    ) -> Result<Self> {
        let c = ChainComplex {
            d_lo,
            d_hi,
            gens,
            diffs,
        };
        for d in d_lo..=d_hi + 1 {
            let m = c.boundary(d);
            if m.cols() != c.rank(d) || m.rows() != c.rank(d - 1) {
                return Err(Error::DimensionMismatch(format!(
                    "boundary in degree {d} has the wrong shape"
                )));
            }
        }
        Ok(c)
    }

    pub fn stored_degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.d_lo - 1..=self.d_hi + 1
    }

    pub fn generators(&self, d: i64) -> &[GenKey] {
        self.gens.get(&d).map_or(&[], Vec::as_slice)
    }

    pub fn rank(&self, d: i64) -> usize {
        self.generators(d).len()
    }

    pub fn position(&self, d: i64, key: GenKey) -> Option<usize> {
        self.generators(d).iter().position(|&k| k == key)
    }

    /// The boundary out of degree `d`; zero outside the stored range.
    pub fn boundary(&self, d: i64) -> IntMatrix {
        self.diffs
            .get(&d)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.rank(d - 1), self.rank(d)))
    }

    pub fn boundary_ref(&self, d: i64) -> Option<&IntMatrix> {
        self.diffs.get(&d)
    }

    /// Degrees where two consecutive stored boundaries fail to compose to zero.
    pub fn square_defects(&self) -> Vec<i64> {
        (self.d_lo..=self.d_hi)
            .filter(|&d| !(&self.boundary(d) * &self.boundary(d + 1)).is_zero())
            .collect()
    }

    pub fn total_rank(&self) -> usize {
        self.gens.values().map(Vec::len).sum()
    }
}

/// `CT_a^b` restricted to a degree window, with its provenance.
#[derive(Clone, Debug)]
pub struct WindowComplex {
    pub source: Arc<EquivariantComplex>,
    pub spec: TruncationSpec,
    pub chain: ChainComplex,
    /// Pairs removed by `reduce_complex`, as (higher, lower) generators.
    pub cancelled: Vec<(GenKey, GenKey)>,
}

impl WindowComplex {
    pub fn key_label(&self, key: GenKey) -> String {
        let id = &self.source.generator(key.base).id;
        match key.shift {
            0 => id.clone(),
            k => format!("u^{k} {id}"),
        }
    }

    pub fn key_id(&self, key: GenKey) -> &str {
        &self.source.generator(key.base).id
    }

    /// Level of `u^k g`.
    pub fn mu_of(&self, key: GenKey) -> i64 {
        self.source.generator(key.base).mu_level + key.shift
    }
}

/// Instantiates the window: keeps `u^k g` inside the truncation, drops boundary terms below the A^mu cut.
pub fn instantiate_window(
    c: &Arc<EquivariantComplex>,
    spec: &TruncationSpec,
) -> Result<WindowComplex> {
    c.ensure_valid()?;
    spec.check()?;
    let (lo, hi) = spec.degree_window;
    let mut gens: BTreeMap<i64, Vec<GenKey>> = BTreeMap::new();
    for d in lo - 1..=hi + 1 {
        let keys: Vec<GenKey> = c
            .generators()
            .iter()
            .enumerate()
            .filter(|(_, g)| (d - g.degree).rem_euclid(2) == 0)
            .map(|(i, g)| (i, g, (d - g.degree) / 2))
            .filter(|(_, g, k)| spec.keeps(g.mu_level + k, &g.h_action))
            .map(|(i, _, k)| GenKey { base: i, shift: k })
            .collect();
        gens.insert(d, keys);
    }
    let mut diffs = BTreeMap::new();
    for d in lo..=hi + 1 {
        let cols = &gens[&d];
        let rows = &gens[&(d - 1)];
        let row_of: BTreeMap<GenKey, usize> =
            rows.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (j, key) in cols.iter().enumerate() {
            let id = &c.generator(key.base).id;
            for t in c.boundary_of(id) {
                let tb = c.index_of(&t.target).expect("validated complex");
                let target = GenKey {
                    base: tb,
                    shift: key.shift + t.u_shift,
                };
                match row_of.get(&target) {
                    Some(&i) => m.add_at(i, j, BigInt::from(t.coeff)),
                    None => {
                        // only the A^mu quotient may drop terms
                        debug_assert!(spec
                            .a_mu_level
                            .is_some_and(|a| c.generator(tb).mu_level + target.shift < a));
                    }
                }
            }
        }
        diffs.insert(d, m);
    }
    let chain = ChainComplex::new(lo, hi, gens, diffs)?;
    debug_assert!(chain.square_defects().is_empty());
    Ok(WindowComplex {
        source: Arc::clone(c),
        spec: spec.clone(),
        chain,
        cancelled: Vec::new(),
    })
}

/// A degree-preserving (or degree-shifting) map given by matrices per source degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    pub degree_shift: i64,
    /// Source degree to matrix (target generators by source generators).
    pub matrices: BTreeMap<i64, IntMatrix>,
}

impl ChainMap {
    pub fn matrix(&self, d: i64) -> Option<&IntMatrix> {
        self.matrices.get(&d)
    }

    /// Checks `d_target f = f d_source` on every degree where both sides are stored.
    pub fn verify(&self, source: &ChainComplex, target: &ChainComplex) -> Result<()> {
        for d in source.d_lo..=source.d_hi + 1 {
            let (Some(f_hi), Some(f_lo)) = (self.matrix(d), self.matrix(d - 1)) else {
                continue;
            };
            let (Some(dt), Some(ds)) = (
                target.boundary_ref(d + self.degree_shift),
                source.boundary_ref(d),
            ) else {
                continue;
            };
            if dt * f_hi != f_lo * ds {
                return Err(Error::NotChainMap { degree: d });
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &ChainMap) -> Result<ChainMap> {
        let mut matrices = BTreeMap::new();
        for (d, f) in &self.matrices {
            if let Some(g) = after.matrix(d + self.degree_shift) {
                matrices.insert(*d, g.checked_mul(f)?);
            }
        }
        Ok(ChainMap {
            degree_shift: self.degree_shift + after.degree_shift,
            matrices,
        })
    }
}

/// The map sending `u^k g` to the same generator in `to` (matched by id), or to zero.
///
/// This realizes inclusions (larger `b` or horizon), projections (larger `a`), and their
/// composites. The result is verified to commute with both boundaries.
pub fn identity_on_generators(from: &WindowComplex, to: &WindowComplex) -> Result<ChainMap> {
    if from.spec.degree_window != to.spec.degree_window {
        return Err(Error::WindowMismatch(format!(
            "degree windows {:?} and {:?}",
            from.spec.degree_window, to.spec.degree_window
        )));
    }
    let same_source = Arc::ptr_eq(&from.source, &to.source);
    let mut matrices = BTreeMap::new();
    for d in from.chain.stored_degrees() {
        let src = from.chain.generators(d);
        let tgt = to.chain.generators(d);
        let mut m = IntMatrix::zeros(tgt.len(), src.len());
        for (j, key) in src.iter().enumerate() {
            let mapped = if same_source {
                Some(*key)
            } else {
                to.source.index_of(from.key_id(*key)).map(|b| GenKey {
                    base: b,
                    shift: key.shift,
                })
            };
            if let Some(i) = mapped.and_then(|k| tgt.iter().position(|t| *t == k)) {
                m.set(i, j, BigInt::from(1));
            }
        }
        matrices.insert(d, m);
    }
    let map = ChainMap {
        degree_shift: 0,
        matrices,
    };
    map.verify(&from.chain, &to.chain)?;
    Ok(map)
}

/// Multiplication by `u`: the window for `(a, b)` onto the window for `(a + 1, b)` two degrees up.
pub fn u_shift(w: &WindowComplex) -> Result<(WindowComplex, ChainMap)> {
    if !w.cancelled.is_empty() {
        return Err(Error::WindowMismatch("u-shift of a reduced window".into()));
    }
    let (lo, hi) = w.spec.degree_window;
    let spec = TruncationSpec {
        a_mu_level: w.spec.a_mu_level.map(|a| a + 1),
        mu_ceiling: w.spec.mu_ceiling.map(|c| c + 1),
        b_action: w.spec.b_action.clone(),
        degree_window: (lo + 2, hi + 2),
    };
    let target = instantiate_window(&w.source, &spec)?;
    let map = shift_map(w, &target, 1)?;
    Ok((target, map))
}

/// The inverse of `u_shift`, from the shifted window back to `w`.
pub fn u_unshift(shifted: &WindowComplex, w: &WindowComplex) -> Result<ChainMap> {
    shift_map(shifted, w, -1)
}

fn shift_map(from: &WindowComplex, to: &WindowComplex, by: i64) -> Result<ChainMap> {
    let mut matrices = BTreeMap::new();
    for d in from.chain.stored_degrees() {
        let src = from.chain.generators(d);
        let tgt = to.chain.generators(d + 2 * by);
        if src.len() != tgt.len() {
            return Err(Error::WindowMismatch(format!(
                "rank {} vs {} in degree {d}",
                src.len(),
                tgt.len()
            )));
        }
        let mut m = IntMatrix::zeros(tgt.len(), src.len());
        for (j, key) in src.iter().enumerate() {
            let image = GenKey {
                base: key.base,
                shift: key.shift + by,
            };
            let i = tgt.iter().position(|t| *t == image).ok_or_else(|| {
                Error::WindowMismatch(format!("no image for generator in degree {d}"))
            })?;
            m.set(i, j, BigInt::from(1));
        }
        matrices.insert(d, m);
    }
    let map = ChainMap {
        degree_shift: 2 * by,
        matrices,
    };
    map.verify(&from.chain, &to.chain)?;
    Ok(map)
}

/// Generators below the degree window do not matter; this reports whether the window is
/// free of chains altogether.
pub fn is_zero_complex(w: &WindowComplex) -> bool {
    w.chain.total_rank() == 0
}

pub(crate) fn unit(x: &BigInt) -> bool {
    *x == BigInt::from(1) || *x == BigInt::from(-1)
}
