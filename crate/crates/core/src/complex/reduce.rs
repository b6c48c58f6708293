//! Cancellation of acyclic pairs (Gaussian elimination on the boundary).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::window::{unit, ChainComplex, GenKey, WindowComplex};
use crate::algebra::{IntMatrix, Ring};
use crate::error::{Error, Result};

/// Removes each pair `(y, x)` with `<dy, x>` invertible, keeping homology in every interior degree.
///
/// Over the integers the pivot must be a unit. Over the rationals a non-unit pivot `c` is
/// handled fraction-free: the affected boundary is replaced by `c` times the exact reduced
/// boundary, which has the same kernel and image over a field.
pub fn reduce_complex(
    w: &WindowComplex,
    pairs: &[(GenKey, GenKey)],
    ring: Ring,
) -> Result<WindowComplex> {
    let mut chain = w.chain.clone();
    let mut cancelled = w.cancelled.clone();
    for &(y, x) in pairs {
        chain = cancel_pair(&chain, y, x, ring, |k| w.key_label(k))?;
        cancelled.push((y, x));
    }
    Ok(WindowComplex {
        source: w.source.clone(),
        spec: w.spec.clone(),
        chain,
        cancelled,
    })
}

fn locate(chain: &ChainComplex, key: GenKey) -> Option<(i64, usize)> {
    chain
        .stored_degrees()
        .find_map(|d| chain.position(d, key).map(|i| (d, i)))
}

fn cancel_pair(
    chain: &ChainComplex,
    y: GenKey,
    x: GenKey,
    ring: Ring,
    label: impl Fn(GenKey) -> String,
) -> Result<ChainComplex> {
    let missing = |k: GenKey| Error::UnknownGenerator(label(k));
    let (dy, jy) = locate(chain, y).ok_or_else(|| missing(y))?;
    let (dx, ix) = locate(chain, x).ok_or_else(|| missing(x))?;
    let pivot_error = |p: &BigInt| Error::NonInvertiblePivot {
        from: label(y),
        to: label(x),
        pivot: p.to_string(),
    };
    if dx != dy - 1 {
        return Err(pivot_error(&BigInt::zero()));
    }
    let d = chain.boundary(dy);
    let c = d.get(ix, jy).clone();
    if c.is_zero() || (ring == Ring::Int && !unit(&c)) {
        return Err(pivot_error(&c));
    }
    let exact = unit(&c);

    let mut gens: BTreeMap<i64, Vec<GenKey>> = chain
        .stored_degrees()
        .map(|e| (e, chain.generators(e).to_vec()))
        .collect();
    gens.get_mut(&dy).expect("stored").remove(jy);
    gens.get_mut(&dx).expect("stored").remove(ix);

    let mut diffs = BTreeMap::new();
    for e in chain.d_lo..=chain.d_hi + 1 {
        let Some(m) = chain.boundary_ref(e) else {
            continue;
        };
        let keep_rows: Vec<usize> = (0..m.rows())
            .filter(|&i| !(e - 1 == dy && i == jy) && !(e - 1 == dx && i == ix))
            .collect();
        let keep_cols: Vec<usize> = (0..m.cols())
            .filter(|&j| !(e == dy && j == jy) && !(e == dx && j == ix))
            .collect();
        let reduced = if e == dy {
            // d'(a) = d(a) - d(y) c^{-1} <d a, x>, restricted; scaled by c when c is not a unit
            IntMatrix::from_fn(keep_rows.len(), keep_cols.len(), |r, s| {
                let (i, j) = (keep_rows[r], keep_cols[s]);
                let correction = m.get(i, jy) * m.get(ix, j);
                if exact {
                    m.get(i, j) - &c * correction
                } else {
                    &c * m.get(i, j) - correction
                }
            })
        } else {
            m.select_rows(&keep_rows).select_columns(&keep_cols)
        };
        diffs.insert(e, reduced);
    }
    ChainComplex::new(chain.d_lo, chain.d_hi, gens, diffs)
}
