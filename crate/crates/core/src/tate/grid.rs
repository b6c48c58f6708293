//! Finite bidirect grids `HT_a^b` with their inclusion and projection maps.

use std::sync::Arc;

use num_rational::BigRational;
use rayon::prelude::*;

use super::tower::{Direction, Tower};
use crate::algebra::{RatMatrix, Ring};
use crate::complex::{
    identity_on_generators, instantiate_window, EquivariantComplex, TruncationSpec, WindowComplex,
};
use crate::error::{Error, Result};
use crate::homology::{homology, induced_map, GradedHomology, HomologyMap};

/// `cells[i][j]` is `HT` at `a_levels[i]`, `b_values[j]`; `None` for `b` means no action cut.
#[derive(Clone, Debug)]
pub struct BidirectGrid {
    pub ring: Ring,
    pub a_levels: Vec<i64>,
    pub b_values: Vec<Option<BigRational>>,
    pub windows: Vec<Vec<WindowComplex>>,
    pub cells: Vec<Vec<GradedHomology>>,
    /// `inclusions[i][j]`: cell `(i, j)` into `(i, j + 1)`.
    pub inclusions: Vec<Vec<HomologyMap>>,
    /// `projections[i][j]`: cell `(i, j)` onto `(i + 1, j)`.
    pub projections: Vec<Vec<HomologyMap>>,
}

fn ascending<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

fn b_key(b: &Option<BigRational>) -> (bool, Option<&BigRational>) {
    (b.is_none(), b.as_ref())
}

/// Builds every cell concurrently, then the maps between neighbouring cells.
pub fn build_grid(
    c: &Arc<EquivariantComplex>,
    ring: Ring,
    degree_window: (i64, i64),
    a_levels: &[i64],
    b_values: &[Option<BigRational>],
) -> Result<BidirectGrid> {
    if a_levels.is_empty() || b_values.is_empty() {
        return Err(Error::GridTooSmall(
            "a grid needs at least one a and one b".into(),
        ));
    }
    let b_sorted = b_values.windows(2).all(|w| b_key(&w[0]) < b_key(&w[1]));
    if !ascending(a_levels) || !b_sorted {
        return Err(Error::BadParams(
            "grid levels must be strictly increasing".into(),
        ));
    }
    let (na, nb) = (a_levels.len(), b_values.len());
    let spec = |i: usize, j: usize| {
        let s = TruncationSpec::full(degree_window.0, degree_window.1).with_a(a_levels[i]);
        match &b_values[j] {
            Some(b) => s.with_b(b.clone()),
            None => s,
        }
    };
    let flat: Result<Vec<(WindowComplex, GradedHomology)>> = (0..na * nb)
        .into_par_iter()
        .map(|idx| {
            let w = instantiate_window(c, &spec(idx / nb, idx % nb))?;
            let h = homology(&w, ring)?;
            Ok((w, h))
        })
        .collect();
    let mut windows = vec![Vec::with_capacity(nb); na];
    let mut cells = vec![Vec::with_capacity(nb); na];
    for (idx, (w, h)) in flat?.into_iter().enumerate() {
        windows[idx / nb].push(w);
        cells[idx / nb].push(h);
    }
    let map = |from: (usize, usize), to: (usize, usize)| -> Result<HomologyMap> {
        let (x, y) = (&windows[from.0][from.1], &windows[to.0][to.1]);
        let f = identity_on_generators(x, y)?;
        induced_map(
            &f,
            &x.chain,
            &y.chain,
            &cells[from.0][from.1],
            &cells[to.0][to.1],
        )
    };
    let inclusions: Result<Vec<Vec<HomologyMap>>> = (0..na)
        .map(|i| (0..nb - 1).map(|j| map((i, j), (i, j + 1))).collect())
        .collect();
    let projections: Result<Vec<Vec<HomologyMap>>> = (0..na - 1)
        .map(|i| (0..nb).map(|j| map((i, j), (i + 1, j))).collect())
        .collect();
    Ok(BidirectGrid {
        ring,
        a_levels: a_levels.to_vec(),
        b_values: b_values.to_vec(),
        windows,
        cells,
        inclusions: inclusions?,
        projections: projections?,
    })
}

impl BidirectGrid {
    /// Cells `(i, j)` and degrees where `Hp o Hi != Hi o Hp` on homology.
    pub fn square_failures(&self) -> Result<Vec<(usize, usize, i64)>> {
        let mut out = Vec::new();
        for i in 0..self.projections.len() {
            for j in 0..self.inclusions[i].len() {
                let right_then_down = self.inclusions[i][j].then(&self.projections[i][j + 1])?;
                let down_then_right = self.projections[i][j].then(&self.inclusions[i + 1][j])?;
                for (d, m) in &right_then_down.matrices {
                    if down_then_right.matrix(*d) != Some(m) {
                        out.push((i, j, *d));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The chain-level squares as matrix identities.
    pub fn chain_squares_commute(&self) -> Result<bool> {
        for i in 0..self.projections.len() {
            for j in 0..self.inclusions[i].len() {
                let w = &self.windows;
                let across = identity_on_generators(&w[i][j], &w[i][j + 1])?
                    .compose(&identity_on_generators(&w[i][j + 1], &w[i + 1][j + 1])?)?;
                let down = identity_on_generators(&w[i][j], &w[i + 1][j])?
                    .compose(&identity_on_generators(&w[i + 1][j], &w[i + 1][j + 1])?)?;
                if across != down {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Degree-`d` tower along `b` at the `i`-th `a`.
    pub fn direct_tower(&self, i: usize, d: i64) -> Result<Tower> {
        let groups = self.cells[i].iter().map(|h| h.group(d)).collect();
        let maps = self.inclusions[i]
            .iter()
            .map(|m| degree_matrix(m, d))
            .collect();
        Tower::new(self.ring, Direction::ToDirectLimit, groups, maps)
    }

    /// Degree-`d` tower along decreasing `a` at the `j`-th `b`; level 0 is the highest `a`.
    pub fn inverse_tower(&self, j: usize, d: i64) -> Result<Tower> {
        let na = self.a_levels.len();
        let groups = (0..na).rev().map(|i| self.cells[i][j].group(d)).collect();
        let maps = (0..na - 1)
            .rev()
            .map(|i| degree_matrix(&self.projections[i][j], d))
            .collect();
        Tower::new(self.ring, Direction::ToInverseLimit, groups, maps)
    }
}

fn degree_matrix(m: &HomologyMap, d: i64) -> RatMatrix {
    m.matrix(d).cloned().unwrap_or_else(|| {
        RatMatrix::zeros(
            m.target.group(d).generator_count(),
            m.source.group(d).generator_count(),
        )
    })
}
