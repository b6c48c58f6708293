//! Homology of a composable pair of boundary matrices.
//!
//! Over the integers the computation goes through two Smith forms (kernel, then
//! quotient); over the rationals it is plain row reduction. The two paths share
//! no code beyond the matrix type, so comparing them is a meaningful check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::group::{FgAbGroup, Ring};
use super::lattice::{morphism_injective, morphism_surjective, QuotientLattice};
use super::matrix::{to_rational_vec, IntMatrix, RatMatrix};
use super::rational::{clear_denominators, independent_columns, inverse, nullspace, rank};
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Coords {
    Int {
        kernel_coords: IntMatrix,
        quotient: QuotientLattice,
    },
    Rat {
        left_inverse: RatMatrix,
        boundary_rank: usize,
    },
}

/// `ker(d_out) / im(d_in)` in normal form with a cycle representative per generator.
#[derive(Clone, Debug)]
pub struct PairHomology {
    pub ring: Ring,
    pub group: FgAbGroup,
    /// Cycles in the chain basis, torsion generators first.
    pub representatives: Vec<Vec<BigInt>>,
    d_out: IntMatrix,
    coords: Coords,
}

impl PairHomology {
    pub fn orders(&self) -> Vec<BigInt> {
        self.group.orders()
    }

    pub fn generator_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn chain_dim(&self) -> usize {
        self.d_out.cols()
    }

    /// Class of a cycle, in normal-form coordinates (integers reduced modulo the orders over Z).
    pub fn class_of(&self, z: &[BigRational]) -> Result<Vec<BigRational>> {
        if z.len() != self.chain_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a chain group of rank {}",
                z.len(),
                self.chain_dim()
            )));
        }
        if !self
            .d_out
            .to_rational()
            .mul_vec(z)
            .iter()
            .all(Zero::is_zero)
        {
            return Err(Error::NotACycle);
        }
        match &self.coords {
            Coords::Int {
                kernel_coords,
                quotient,
            } => {
                if !z.iter().all(|x| x.is_integer()) {
                    return Err(Error::NotIntegral);
                }
                let zi: Vec<BigInt> = z.iter().map(|x| x.to_integer()).collect();
                Ok(to_rational_vec(
                    &quotient.coordinates(&kernel_coords.mul_vec(&zi)),
                ))
            }
            Coords::Rat {
                left_inverse,
                boundary_rank,
            } => Ok(left_inverse.mul_vec(z)[*boundary_rank..].to_vec()),
        }
    }

    pub fn class_of_int(&self, z: &[BigInt]) -> Result<Vec<BigRational>> {
        self.class_of(&to_rational_vec(z))
    }

    pub fn is_boundary(&self, z: &[BigInt]) -> Result<bool> {
        Ok(self.class_of_int(z)?.iter().all(Zero::is_zero))
    }
}

/// Homology at the middle of `C_{d+1} --d_in--> C_d --d_out--> C_{d-1}`.
pub fn homology_of_pair(d_in: &IntMatrix, d_out: &IntMatrix, ring: Ring) -> Result<PairHomology> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::DimensionMismatch(format!(
            "incoming map lands in rank {}, outgoing map starts at rank {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !(d_out * d_in).is_zero() {
        return Err(Error::CompositionNonzero);
    }
    match ring {
        Ring::Int => integer_homology(d_in, d_out),
        Ring::Rat => rational_homology(d_in, d_out),
    }
}

fn integer_homology(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<PairHomology> {
    let n = d_out.cols();
    let snf = smith_normal_form(d_out);
    let r = snf.rank();
    let kernel_idx: Vec<usize> = (r..n).collect();
    let kernel = snf.v.select_columns(&kernel_idx);
    let kernel_coords = snf.v_inv.select_rows(&kernel_idx);
    let relations = &kernel_coords * d_in;
    let quotient = QuotientLattice::new(&relations);
    let representatives = (0..quotient.group.generator_count())
        .map(|i| kernel.mul_vec(&quotient.lift(i)))
        .collect();
    Ok(PairHomology {
        ring: Ring::Int,
        group: quotient.group.clone(),
        representatives,
        d_out: d_out.clone(),
        coords: Coords::Int {
            kernel_coords,
            quotient,
        },
    })
}

fn rational_homology(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<PairHomology> {
    let n = d_out.cols();
    let cycles = nullspace(&d_out.to_rational());
    let d_in_q = d_in.to_rational();
    let boundaries: Vec<Vec<BigRational>> = independent_columns(&d_in_q)
        .into_iter()
        .map(|j| d_in_q.column(j))
        .collect();
    let b = boundaries.len();
    let mut candidates = boundaries.clone();
    candidates.extend(cycles.iter().cloned());
    let stacked = RatMatrix::from_columns(&candidates, n)?;
    let complement: Vec<Vec<BigInt>> = independent_columns(&stacked)
        .into_iter()
        .filter(|&j| j >= b)
        .map(|j| clear_denominators(&candidates[j]))
        .collect();
    let mut basis = boundaries;
    basis.extend(complement.iter().map(|v| to_rational_vec(v)));
    let a = RatMatrix::from_columns(&basis, n)?;
    let at = a.transpose();
    let gram_inv = inverse(&(&at * &a)).expect("columns are independent");
    let left_inverse = &gram_inv * &at;
    Ok(PairHomology {
        ring: Ring::Rat,
        group: FgAbGroup::free(complement.len()),
        representatives: complement,
        d_out: d_out.clone(),
        coords: Coords::Rat {
            left_inverse,
            boundary_rank: b,
        },
    })
}

/// Matrix of the map induced by a chain-level map `f` (target chain basis by source chain basis),
/// written on normal-form generators. The caller is responsible for `f` being a chain map.
pub fn induced_matrix(
    f: &IntMatrix,
    source: &PairHomology,
    target: &PairHomology,
) -> Result<RatMatrix> {
    if f.cols() != source.chain_dim() || f.rows() != target.chain_dim() {
        return Err(Error::DimensionMismatch(format!(
            "chain map {}x{} between chain groups of rank {} and {}",
            f.rows(),
            f.cols(),
            source.chain_dim(),
            target.chain_dim()
        )));
    }
    let columns: Result<Vec<Vec<BigRational>>> = source
        .representatives
        .iter()
        .map(|z| target.class_of_int(&f.mul_vec(z)))
        .collect();
    RatMatrix::from_columns(&columns?, target.generator_count())
}

/// Injectivity and surjectivity of a homomorphism given on normal-form generators.
pub fn map_verdicts(
    ring: Ring,
    m: &RatMatrix,
    source_orders: &[BigInt],
    target_orders: &[BigInt],
) -> (bool, bool) {
    match ring {
        Ring::Rat => {
            let r = rank(m);
            (r == m.cols(), r == m.rows())
        }
        Ring::Int => {
            let f = m
                .to_integer()
                .expect("integral homology maps have integer matrices");
            (
                morphism_injective(&f, source_orders, target_orders),
                morphism_surjective(&f, target_orders),
            )
        }
    }
}
