//! Smith normal form over the integers with transform tracking.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * a * v == s`, with the inverses of both transforms kept for coordinate changes.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero diagonal entries of `s`, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

type Rows = Vec<Vec<BigInt>>;

struct Reducer {
    a: Rows,
    u: Rows,
    u_inv: Rows,
    v: Rows,
    v_inv: Rows,
    m: usize,
    n: usize,
}

fn identity_rows(n: usize) -> Rows {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn axpy(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += q * s;
        }
    }
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.v {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// row_t += q * row_s
    fn add_row(&mut self, t: usize, s: usize, q: &BigInt) {
        let src = self.a[s].clone();
        axpy(&mut self.a[t], &src, q);
        let src = self.u[s].clone();
        axpy(&mut self.u[t], &src, q);
        for row in &mut self.u_inv {
            let c = row[t].clone();
            if !c.is_zero() {
                row[s] -= q * c;
            }
        }
    }

    /// col_t += q * col_s
    fn add_col(&mut self, t: usize, s: usize, q: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            let c = row[s].clone();
            if !c.is_zero() {
                row[t] += q * c;
            }
        }
        let src = self.v_inv[t].clone();
        axpy(&mut self.v_inv[s], &src, &-q);
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -&*x;
        }
        for row in &mut self.u_inv {
            row[i] = -&row[i];
        }
    }

    fn smallest_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if !x.is_zero() && best.as_ref().is_none_or(|(_, _, b)| x.abs() < *b) {
                    best = Some((i, j, x.abs()));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn reduce(&mut self) {
        let mut t = 0;
        while t < self.m.min(self.n) {
            let Some((pi, pj)) = self.smallest_in_block(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut residue = false;
                for i in t + 1..self.m {
                    if !self.a[i][t].is_zero() {
                        let q = &self.a[i][t] / &self.a[t][t];
                        self.add_row(i, t, &-q);
                        residue |= !self.a[i][t].is_zero();
                    }
                }
                for j in t + 1..self.n {
                    if !self.a[t][j].is_zero() {
                        let q = &self.a[t][j] / &self.a[t][t];
                        self.add_col(j, t, &-q);
                        residue |= !self.a[t][j].is_zero();
                    }
                }
                if residue {
                    self.promote_smallest_residue(t);
                    continue;
                }
                let p = self.a[t][t].clone();
                let offender = (t + 1..self.m)
                    .find(|&i| (t + 1..self.n).any(|j| !(&self.a[i][j] % &p).is_zero()));
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }

    fn promote_smallest_residue(&mut self, t: usize) {
        let mut best: Option<(bool, usize, BigInt)> = None;
        for i in t + 1..self.m {
            let x = &self.a[i][t];
            if !x.is_zero() && best.as_ref().is_none_or(|(_, _, b)| x.abs() < *b) {
                best = Some((true, i, x.abs()));
            }
        }
        for j in t + 1..self.n {
            let x = &self.a[t][j];
            if !x.is_zero() && best.as_ref().is_none_or(|(_, _, b)| x.abs() < *b) {
                best = Some((false, j, x.abs()));
            }
        }
        match best {
            Some((true, i, _)) => self.swap_rows(t, i),
            Some((false, j, _)) => self.swap_cols(t, j),
            None => {}
        }
    }
}

fn to_matrix(rows: Rows, cols: usize) -> IntMatrix {
    IntMatrix::from_rows(rows, cols).expect("reducer keeps rectangular shapes")
}

/// Unimodular `u`, `v` with `u * a * v` diagonal, pivoting on the smallest nonzero entry.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut r = Reducer {
        a: a.to_rows(),
        u: identity_rows(m),
        u_inv: identity_rows(m),
        v: identity_rows(n),
        v_inv: identity_rows(n),
        m,
        n,
    };
    r.reduce();
    let invariant_factors: Vec<BigInt> = (0..m.min(n))
        .map(|i| r.a[i][i].clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SmithDecomposition {
        s: to_matrix(r.a, n),
        u: to_matrix(r.u, m),
        u_inv: to_matrix(r.u_inv, m),
        v: to_matrix(r.v, n),
        v_inv: to_matrix(r.v_inv, n),
        invariant_factors,
    }
}
