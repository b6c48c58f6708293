//! Integer lattices: kernels, linear solves, quotients and subgroups of finitely
//! generated abelian groups, and morphism verdicts between them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::FgAbGroup;
use super::matrix::IntMatrix;
use super::snf::{smith_normal_form, SmithDecomposition};

/// Basis (as columns) of the integer kernel of `a`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let d = smith_normal_form(a);
    let r = d.rank();
    let idx: Vec<usize> = (r..a.cols()).collect();
    d.v.select_columns(&idx)
}

/// Some integer solution of `a x = b`, if one exists.
pub fn integer_solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    solve_with(&smith_normal_form(a), b)
}

fn solve_with(d: &SmithDecomposition, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let ub = d.u.mul_vec(b);
    let r = d.rank();
    if ub[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut y = vec![BigInt::zero(); d.v.rows()];
    for i in 0..r {
        let (q, rem) = ub[i].div_rem(&d.invariant_factors[i]);
        if !rem.is_zero() {
            return None;
        }
        y[i] = q;
    }
    Some(d.v.mul_vec(&y))
}

/// Reduces `x` modulo `order` into `[0, order)`; order 0 leaves `x` unchanged.
pub fn reduce_mod(x: &BigInt, order: &BigInt) -> BigInt {
    if order.is_zero() {
        x.clone()
    } else {
        x.mod_floor(order)
    }
}

/// `Z^m / (column span of relations)` with coordinates in invariant-factor form.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientLattice {
    pub group: FgAbGroup,
    /// Rows of the left transform for the kept (non-unit) summands.
    to_normal: IntMatrix,
    /// Columns of the inverse transform for the kept summands.
    from_normal: IntMatrix,
    orders: Vec<BigInt>,
}

impl QuotientLattice {
    pub fn new(relations: &IntMatrix) -> Self {
        let m = relations.rows();
        let d = smith_normal_form(relations);
        let r = d.rank();
        let mut keep = Vec::new();
        let mut orders = Vec::new();
        for i in 0..m {
            let order = if i < r {
                d.invariant_factors[i].clone()
            } else {
                BigInt::zero()
            };
            if !order.is_one() {
                keep.push(i);
                orders.push(order);
            }
        }
        QuotientLattice {
            group: FgAbGroup::from_orders(&orders),
            to_normal: d.u.select_rows(&keep),
            from_normal: d.u_inv.select_columns(&keep),
            orders,
        }
    }

    /// Quotient of `Z^m` by nothing.
    pub fn free(m: usize) -> Self {
        Self::new(&IntMatrix::zeros(m, 0))
    }

    pub fn ambient_dim(&self) -> usize {
        self.from_normal.rows()
    }

    /// Cyclic orders of the normal generators, aligned with `coordinates`.
    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.to_normal
            .mul_vec(x)
            .iter()
            .zip(&self.orders)
            .map(|(c, o)| reduce_mod(c, o))
            .collect()
    }

    /// Ambient lift of the `i`-th normal generator.
    pub fn lift(&self, i: usize) -> Vec<BigInt> {
        self.from_normal.column(i)
    }
}

/// Orders of the normal generators are invariant factors in ascending order
/// followed by free summands; this returns the diagonal relation block.
pub fn order_relations(orders: &[BigInt]) -> IntMatrix {
    let n = orders.len();
    let torsion: Vec<usize> = (0..n).filter(|&i| !orders[i].is_zero()).collect();
    IntMatrix::from_fn(n, torsion.len(), |i, j| {
        if i == torsion[j] {
            orders[i].clone()
        } else {
            BigInt::zero()
        }
    })
}

/// Subgroup of a group in normal coordinates generated by given elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Subgroup {
    pub group: FgAbGroup,
    generators: IntMatrix,
    ambient_orders: Vec<BigInt>,
    quotient: QuotientLattice,
}

impl Subgroup {
    /// `generators` holds one element per column, in the normal coordinates of a
    /// group whose cyclic orders are `ambient_orders`.
    pub fn new(generators: IntMatrix, ambient_orders: &[BigInt]) -> Self {
        let c = generators.cols();
        let rel = order_relations(ambient_orders);
        let neg = rel.map(|x| -x);
        let stacked = generators.hstack(&neg).expect("row counts agree");
        let kernel = integer_kernel(&stacked);
        let idx: Vec<usize> = (0..c).collect();
        let relations = kernel.select_rows(&idx);
        let quotient = QuotientLattice::new(&relations);
        Subgroup {
            group: quotient.group.clone(),
            generators,
            ambient_orders: ambient_orders.to_vec(),
            quotient,
        }
    }

    /// Coordinates of an ambient element in the subgroup's normal form, if it belongs.
    pub fn coordinates(&self, h: &[BigInt]) -> Option<Vec<BigInt>> {
        let rel = order_relations(&self.ambient_orders);
        let stacked = self.generators.hstack(&rel).expect("row counts agree");
        let x = integer_solve(&stacked, h)?;
        Some(self.quotient.coordinates(&x[..self.generators.cols()]))
    }

    pub fn contains(&self, h: &[BigInt]) -> bool {
        self.coordinates(h).is_some()
    }

    /// Ambient element representing the `i`-th normal generator.
    pub fn element(&self, i: usize) -> Vec<BigInt> {
        let x = self.quotient.lift(i);
        self.generators
            .mul_vec(&x)
            .iter()
            .zip(&self.ambient_orders)
            .map(|(v, o)| reduce_mod(v, o))
            .collect()
    }

    pub fn generator_orders(&self) -> &[BigInt] {
        self.quotient.orders()
    }
}

/// Whether the morphism with matrix `f` (target coordinates by source coordinates)
/// between groups with the given cyclic orders is injective.
pub fn morphism_injective(
    f: &IntMatrix,
    source_orders: &[BigInt],
    target_orders: &[BigInt],
) -> bool {
    let rel = order_relations(target_orders).map(|x| -x);
    let kernel = integer_kernel(&f.hstack(&rel).expect("row counts agree"));
    (0..kernel.cols()).all(|j| {
        (0..f.cols()).all(|i| {
            let x = kernel.get(i, j);
            let o = &source_orders[i];
            if o.is_zero() {
                x.is_zero()
            } else {
                x.mod_floor(o).is_zero()
            }
        })
    })
}

pub fn morphism_surjective(f: &IntMatrix, target_orders: &[BigInt]) -> bool {
    let stacked = f
        .hstack(&order_relations(target_orders))
        .expect("row counts agree");
    QuotientLattice::new(&stacked).group.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::int_vec;

    #[test]
    fn kernel_and_solve() {
        let a = IntMatrix::from_i64(&[&[1, 2, 3]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).is_zero());
        let x = integer_solve(&IntMatrix::from_i64(&[&[2, 4]]), &int_vec(&[6])).unwrap();
        assert_eq!(
            BigInt::from(2) * &x[0] + BigInt::from(4) * &x[1],
            BigInt::from(6)
        );
        assert!(integer_solve(&IntMatrix::from_i64(&[&[2, 4]]), &int_vec(&[3])).is_none());
    }

    #[test]
    fn quotient_by_two() {
        let q = QuotientLattice::new(&IntMatrix::from_i64(&[&[2]]));
        assert_eq!(q.group, FgAbGroup::cyclic(2));
        assert_eq!(q.coordinates(&int_vec(&[3])), int_vec(&[1]));
    }

    #[test]
    fn subgroup_of_z4() {
        let orders = int_vec(&[4]);
        let s = Subgroup::new(IntMatrix::from_i64(&[&[2]]), &orders);
        assert_eq!(s.group, FgAbGroup::cyclic(2));
        assert!(s.contains(&int_vec(&[2])));
        assert!(!s.contains(&int_vec(&[1])));
    }

    #[test]
    fn verdicts() {
        // Z/4 --x2--> Z/4: neither injective nor surjective
        let f = IntMatrix::from_i64(&[&[2]]);
        let o = int_vec(&[4]);
        assert!(!morphism_injective(&f, &o, &o));
        assert!(!morphism_surjective(&f, &o));
        // Z --x3--> Z: injective only
        let z = int_vec(&[0]);
        let g = IntMatrix::from_i64(&[&[3]]);
        assert!(morphism_injective(&g, &z, &z));
        assert!(!morphism_surjective(&g, &z));
        // Z/2 --x3--> Z/2: iso
        let t = int_vec(&[2]);
        assert!(morphism_injective(&g, &t, &t) && morphism_surjective(&g, &t));
    }
}
