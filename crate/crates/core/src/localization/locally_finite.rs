//! Countable-dimensional spaces given by finite-support rules on basis vectors, and
//! their finite truncations.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{eventual_image, tate_triple_compare, LinearEndoSpace, SquareZeroHomology};
use crate::algebra::rational::{nullspace, rank};
use crate::algebra::RatMatrix;
use crate::error::{Error, Result};

pub type Rule<B> = Vec<(B, i64)>;

/// A space with a countable basis where `T` and the boundary send each basis vector to a
/// finite combination.
pub trait LocallyFinite {
    type Basis: Clone + Ord + Debug;

    /// Basis vectors kept at truncation parameter `n`; both rules must stay inside.
    fn truncation(&self, n: usize) -> Vec<Self::Basis>;
    fn t_rule(&self, b: &Self::Basis) -> Rule<Self::Basis>;
    fn boundary_rule(&self, _b: &Self::Basis) -> Rule<Self::Basis> {
        Vec::new()
    }
    fn has_boundary(&self) -> bool {
        false
    }

    /// The truncation as a finite endo-space (a Tate triple when there is a boundary),
    /// with the basis order used for its matrices.
    fn truncate(&self, n: usize) -> Result<(Vec<Self::Basis>, LinearEndoSpace)> {
        let basis = self.truncation(n);
        let index: BTreeMap<&Self::Basis, usize> =
            basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let matrix = |rule: &dyn Fn(&Self::Basis) -> Rule<Self::Basis>| -> Result<RatMatrix> {
            let mut m = RatMatrix::zeros(basis.len(), basis.len());
            for (j, b) in basis.iter().enumerate() {
                for (target, c) in rule(b) {
                    let i = *index.get(&target).ok_or_else(|| {
                        Error::BadParams(format!("{target:?} leaves the truncation at {n}"))
                    })?;
                    m.add_at(i, j, BigRational::from_integer(c.into()));
                }
            }
            Ok(m)
        };
        let t = matrix(&|b| self.t_rule(b))?;
        let space = if self.has_boundary() {
            LinearEndoSpace::triple(t, matrix(&|b| self.boundary_rule(b))?)?
        } else {
            LinearEndoSpace::new(t)?
        };
        Ok((basis, space))
    }
}

/// Basis `e_1, e_2, ...` with `T e_i = e_(i-1)` and `T e_1 = 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShiftSpace;

impl LocallyFinite for ShiftSpace {
    type Basis = usize;

    fn truncation(&self, n: usize) -> Vec<usize> {
        (1..=n).collect()
    }

    fn t_rule(&self, &i: &usize) -> Rule<usize> {
        if i > 1 {
            vec![(i - 1, 1)]
        } else {
            Vec::new()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cell {
    E { i: usize, j: usize },
    F { i: usize, j: usize },
}

/// Basis `e_(i,j), f_(i,j)` for `j >= i >= 1`, with `T` lowering `i` and
/// `d f_(i,j) = e_(i,j) + e_(i,j+1)`. The truncation at `n` keeps `e_(i,j)` for `j <= n`
/// and `f_(i,j)` for `j <= n - 1`, so both rules stay inside.
#[derive(Clone, Copy, Debug, Default)]
pub struct StaircasePairs;

impl LocallyFinite for StaircasePairs {
    type Basis = Cell;

    fn truncation(&self, n: usize) -> Vec<Cell> {
        let es = (1..=n).flat_map(|j| (1..=j).map(move |i| Cell::E { i, j }));
        let fs = (1..n).flat_map(|j| (1..=j).map(move |i| Cell::F { i, j }));
        es.chain(fs).collect()
    }

    fn t_rule(&self, b: &Cell) -> Rule<Cell> {
        match *b {
            Cell::E { i, j } if i > 1 => vec![(Cell::E { i: i - 1, j }, 1)],
            Cell::F { i, j } if i > 1 => vec![(Cell::F { i: i - 1, j }, 1)],
            _ => Vec::new(),
        }
    }

    fn boundary_rule(&self, b: &Cell) -> Rule<Cell> {
        match *b {
            Cell::F { i, j } => vec![(Cell::E { i, j }, 1), (Cell::E { i, j: j + 1 }, 1)],
            Cell::E { .. } => Vec::new(),
        }
    }

    fn has_boundary(&self) -> bool {
        true
    }
}

/// What a truncation of [`StaircasePairs`] shows about the two sides of the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleReport {
    pub n: usize,
    pub dimension: usize,
    /// `T^k V` lies in the span of cells with `j >= i + k`, for `k = 1..=n`.
    pub image_support: Vec<bool>,
    pub eventual_image_dim: usize,
    /// `lim H(V^T_k, d_k)` on the truncation.
    pub limit_side: usize,
    pub homology_dim: usize,
    /// One class per row: `[e_(i,j)] = (-1)^(j-i) [e_(i,i)]` with `[e_(i,i)] != 0`.
    pub row_classes: bool,
    /// `HT [e_(i,i)] = -[e_(i-1,i-1)]` and `HT [e_(1,1)] = 0`.
    pub signed_shift: bool,
    pub kernel_dim: usize,
    /// Classes of rows `i <= n - margin` all lie in the image of `HT`.
    pub surjective_away_from_cut: bool,
    pub margin: usize,
    /// `x_m = (-1)^(m-1) [e_(m,m)]` satisfies `HT x_(m+1) = x_m` for `m < n`.
    pub compatible_witness: bool,
}

impl CounterexampleReport {
    /// Left side vanishes: no eventual image and no limit homology.
    pub fn left_vanishes(&self) -> bool {
        self.image_support.iter().all(|&b| b)
            && self.eventual_image_dim == 0
            && self.limit_side == 0
    }

    /// Right side looks free of rank one: a shift with one-dimensional kernel that is
    /// onto away from the cut, carrying a nowhere-zero compatible sequence.
    pub fn right_is_rank_one(&self) -> bool {
        self.row_classes
            && self.signed_shift
            && self.kernel_dim == 1
            && self.surjective_away_from_cut
            && self.compatible_witness
    }
}

fn unit(len: usize, at: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); len];
    v[at] = BigRational::one();
    v
}

/// Probes the truncation of [`StaircasePairs`] at `n >= 2`.
pub fn counterexample_probe(n: usize) -> Result<CounterexampleReport> {
    if n < 2 {
        return Err(Error::BadParams("the truncation needs n >= 2".into()));
    }
    let (basis, space) = StaircasePairs.truncate(n)?;
    let dim = basis.len();
    let index: BTreeMap<Cell, usize> = basis.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let e = |i: usize, j: usize| index[&Cell::E { i, j }];

    let mut image_support = Vec::with_capacity(n);
    let mut power = RatMatrix::identity(dim);
    for k in 1..=n {
        power = &space.t * &power;
        let ok = basis.iter().enumerate().all(|(row, cell)| {
            let (Cell::E { i, j } | Cell::F { i, j }) = *cell;
            j >= i + k || (0..dim).all(|col| power.get(row, col).is_zero())
        });
        image_support.push(ok);
    }
    let eventual_image_dim = eventual_image(&space).dimension();
    let limit_side = tate_triple_compare(&space, n)?.limit_side;

    let boundary = space.boundary.as_ref().expect("a triple");
    let h = SquareZeroHomology::new(boundary);
    let class = |i: usize, j: usize| h.class_of(&unit(dim, e(i, j))).expect("e cells are cycles");
    let diagonal: Vec<Vec<BigRational>> = (1..=n).map(|i| class(i, i)).collect();
    let sign = |p: usize| {
        if p.is_multiple_of(2) {
            BigRational::one()
        } else {
            -BigRational::one()
        }
    };
    let scaled = |v: &[BigRational], c: &BigRational| v.iter().map(|x| x * c).collect::<Vec<_>>();
    let row_classes = diagonal.iter().all(|c| c.iter().any(|x| !x.is_zero()))
        && (1..=n).all(|i| (i..=n).all(|j| class(i, j) == scaled(&diagonal[i - 1], &sign(j - i))));

    let ht = h.induced(&space.t).ok_or(Error::NotACycle)?;
    let zero = vec![BigRational::zero(); h.dimension()];
    let signed_shift = ht.mul_vec(&diagonal[0]) == zero
        && (2..=n).all(|i| {
            ht.mul_vec(&diagonal[i - 1]) == scaled(&diagonal[i - 2], &-BigRational::one())
        });
    let kernel_dim = nullspace(&ht).len();
    let margin = 1;
    let surjective_away_from_cut = (1..=n - margin).all(|i| {
        let target =
            RatMatrix::from_columns(&[diagonal[i - 1].clone()], h.dimension()).expect("one column");
        rank(&ht.hstack(&target).expect("same height")) == rank(&ht)
    });
    let witness: Vec<Vec<BigRational>> = (1..=n)
        .map(|m| scaled(&diagonal[m - 1], &sign(m - 1)))
        .collect();
    let compatible_witness =
        witness.iter().all(|x| *x != zero) && witness.windows(2).all(|w| ht.mul_vec(&w[1]) == w[0]);

    Ok(CounterexampleReport {
        n,
        dimension: dim,
        image_support,
        eventual_image_dim,
        limit_side,
        homology_dim: h.dimension(),
        row_classes,
        signed_shift,
        kernel_dim,
        surjective_away_from_cut,
        margin,
        compatible_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_truncation_has_no_eventual_image() {
        let (_, s) = ShiftSpace.truncate(5).unwrap();
        let e = eventual_image(&s);
        assert_eq!((e.dimension(), e.stabilized_at), (0, 5));
    }

    #[test]
    fn staircase_truncation_is_a_triple() {
        let (basis, s) = StaircasePairs.truncate(3).unwrap();
        // 6 e-cells and 3 f-cells
        assert_eq!(basis.len(), 9);
        let d = s.boundary.as_ref().unwrap();
        assert!((d * d).is_zero());
    }

    #[test]
    fn second_power_support() {
        // direct enumeration at n = 3: T^2 sends e_(3,3) to e_(1,3) and kills every other cell
        let (basis, s) = StaircasePairs.truncate(3).unwrap();
        let t2 = &s.t * &s.t;
        let nonzero: Vec<(Cell, Cell)> = (0..basis.len())
            .flat_map(|r| (0..basis.len()).map(move |c| (r, c)))
            .filter(|&(r, c)| !t2.get(r, c).is_zero())
            .map(|(r, c)| (basis[r], basis[c]))
            .collect();
        assert_eq!(
            nonzero,
            vec![(Cell::E { i: 1, j: 3 }, Cell::E { i: 3, j: 3 })]
        );
    }

    #[test]
    fn neighbouring_classes_differ_by_sign() {
        let (basis, s) = StaircasePairs.truncate(3).unwrap();
        let h = SquareZeroHomology::new(s.boundary.as_ref().unwrap());
        let at = |cell: Cell| unit(basis.len(), basis.iter().position(|b| *b == cell).unwrap());
        let sum: Vec<BigRational> = at(Cell::E { i: 1, j: 1 })
            .iter()
            .zip(at(Cell::E { i: 1, j: 2 }))
            .map(|(a, b)| a + b)
            .collect();
        assert_eq!(
            h.class_of(&sum),
            Some(vec![BigRational::zero(); h.dimension()])
        );
        assert_ne!(
            h.class_of(&at(Cell::E { i: 1, j: 1 })),
            Some(vec![BigRational::zero(); h.dimension()])
        );
    }

    #[test]
    fn probe_at_eight() {
        let r = counterexample_probe(8).unwrap();
        assert!(r.left_vanishes());
        assert!(r.right_is_rank_one());
        assert_eq!(r.homology_dim, 8);
        assert!(counterexample_probe(1).is_err());
    }
}
