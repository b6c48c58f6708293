//! Exact Gaussian elimination over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::RatMatrix;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (
        RatMatrix::from_rows(a, cols).expect("shape preserved"),
        pivots,
    )
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

/// Basis of the null space, one vector per free column.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<BigRational>> {
    let (r, pivots) = rref(m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, f).clone();
            }
            v
        })
        .collect()
}

/// Indices of a maximal linearly independent subset of the columns, chosen greedily left to right.
pub fn independent_columns(m: &RatMatrix) -> Vec<usize> {
    rref(m).1
}

/// Some solution of `a x = b`, if one exists.
pub fn solve(a: &RatMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let aug = a
        .hstack(&RatMatrix::from_columns(&[b.to_vec()], a.rows()).ok()?)
        .ok()?;
    let (r, pivots) = rref(&aug);
    let n = a.cols();
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, n).clone();
    }
    Some(x)
}

pub fn inverse(a: &RatMatrix) -> Option<RatMatrix> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    let (r, pivots) = rref(&a.hstack(&RatMatrix::identity(n)).ok()?);
    if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
        return None;
    }
    let idx: Vec<usize> = (n..2 * n).collect();
    Some(r.select_columns(&idx))
}

/// Scales a rational vector by the lcm of its denominators, giving a primitive integer direction.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Basis of the column span.
pub fn column_basis(m: &RatMatrix) -> Vec<Vec<BigRational>> {
    independent_columns(m)
        .into_iter()
        .map(|j| m.column(j))
        .collect()
}

/// `a` restricted to the subspace spanned by `basis` (columns), expressed in that basis.
/// Returns `None` when the subspace is not invariant.
pub fn restrict(a: &RatMatrix, basis: &RatMatrix) -> Option<RatMatrix> {
    let images = a * basis;
    let cols: Option<Vec<Vec<BigRational>>> = (0..images.cols())
        .map(|j| solve(basis, &images.column(j)))
        .collect();
    RatMatrix::from_columns(&cols?, basis.cols()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        crate::algebra::matrix::IntMatrix::from_i64(rows).to_rational()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&a), 1);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_and_invert() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(&a * &inv, RatMatrix::identity(2));
        let x = solve(&a, &[rat(3), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[rat(1), rat(2)]).is_none());
        assert!(inverse(&m(&[&[1, 1], &[1, 1]])).is_none());
    }

    #[test]
    fn clearing() {
        let v = vec![
            BigRational::new(1.into(), 2.into()),
            BigRational::new(1.into(), 3.into()),
        ];
        assert_eq!(
            clear_denominators(&v),
            vec![BigInt::from(3), BigInt::from(2)]
        );
    }
}
