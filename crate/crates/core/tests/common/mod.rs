#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;
use tate_core::algebra::{FgAbGroup, IntMatrix, Ring};
use tate_core::catalog::{Family, WeightRule};
use tate_core::complex::{
    reduce_complex, ChainComplex, EquivariantComplex, GenKey, TruncationSpec, WindowComplex,
};

/// Any catalog family at a small horizon.
pub fn family() -> impl Strategy<Value = (Family, usize)> {
    let weights = prop_oneof![
        Just(WeightRule::Constant { value: 2 }),
        Just(WeightRule::Cycle {
            values: vec![2, 4, -2]
        }),
        Just(WeightRule::Affine {
            slope: 2,
            intercept: 0
        }),
    ];
    prop_oneof![
        (1usize..=3, 2usize..=5).prop_map(|(n, k)| (Family::Cn { n }, k)),
        (weights, 1usize..=4).prop_map(|(weights, k)| (Family::TStarS2 { weights }, k)),
        (1u64..=4, any::<bool>(), -2i64..=2).prop_map(|(c, good, shift)| {
            // bad orbits need an even covering number
            let covering = if good { c } else { 2 * c };
            (
                Family::LocalOrbit {
                    covering,
                    good,
                    shift,
                },
                0,
            )
        }),
        (1usize..=2, 1i64..=2).prop_map(|(n, class_bound)| (Family::Torus { n, class_bound }, 0)),
        Just((Family::Rabinowitz, 0)),
        Just((Family::RabinowitzEquivariant, 0)),
    ]
}

pub fn build((family, k): &(Family, usize)) -> Arc<EquivariantComplex> {
    Arc::new(family.build(*k).expect("catalog families build"))
}

/// A truncation with every cut optional.
pub fn spec() -> impl Strategy<Value = TruncationSpec> {
    (
        proptest::option::of(-4i64..=2),
        proptest::option::of(0i64..=4),
        proptest::option::of(0i64..=8),
        -4i64..=4,
        0i64..=5,
    )
        .prop_map(|(a, width, b, lo, len)| TruncationSpec {
            a_mu_level: a,
            mu_ceiling: width.map(|w| a.unwrap_or(-2) + w),
            b_action: b.map(|b| BigRational::from_integer(b.into())),
            degree_window: (lo, lo + len),
        })
}

/// A chain complex with known homology, hidden behind unimodular changes of basis.
pub struct OracleComplex {
    pub chain: ChainComplex,
    /// Homology in the interior degrees.
    pub expected: BTreeMap<i64, FgAbGroup>,
}

/// Row operations `row_i += c row_j` on an identity matrix, with the inverse built alongside.
fn unimodular(n: usize, rng: &mut impl Rng) -> (IntMatrix, IntMatrix) {
    let mut p = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    if n < 2 {
        return (p, inv);
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = rng.gen_range(-2i64..=2);
        let mut e = IntMatrix::identity(n);
        e.set(i, j, BigInt::from(c));
        let mut e_inv = IntMatrix::identity(n);
        e_inv.set(i, j, BigInt::from(-c));
        p = &e * &p;
        inv = &inv * &e_inv;
    }
    (p, inv)
}

/// Interior degrees `1..=3`, padding `0` and `4`. Summands: free classes and pairs
/// `Z --m--> Z` from degree `d + 1` to `d`.
pub fn oracle_complex(rng: &mut impl Rng) -> OracleComplex {
    let (lo, hi) = (1i64, 3i64);
    let mut ranks: BTreeMap<i64, usize> = (lo - 1..=hi + 1).map(|d| (d, 0)).collect();
    let mut free: BTreeMap<i64, usize> = BTreeMap::new();
    // (degree of the target, multiplier)
    let mut pairs: Vec<(i64, i64)> = Vec::new();
    for d in lo - 1..=hi + 1 {
        let f = rng.gen_range(0..=2);
        free.insert(d, f);
        *ranks.get_mut(&d).unwrap() += f;
        if d < hi + 1 {
            for _ in 0..rng.gen_range(0..=2) {
                let m = [1, 1, 2, 3, 4, 6][rng.gen_range(0..6)];
                pairs.push((d, m));
            }
        }
    }
    let mut next: BTreeMap<i64, usize> = free.clone();
    let mut diffs: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    let mut entries: Vec<(i64, usize, usize, i64)> = Vec::new();
    for &(d, _) in &pairs {
        *ranks.get_mut(&d).unwrap() += 1;
        *ranks.get_mut(&(d + 1)).unwrap() += 1;
    }
    for &(d, m) in &pairs {
        let row = next[&d];
        *next.get_mut(&d).unwrap() += 1;
        let col = next[&(d + 1)];
        *next.get_mut(&(d + 1)).unwrap() += 1;
        entries.push((d + 1, row, col, m));
    }
    for d in lo..=hi + 1 {
        let mut m = IntMatrix::zeros(ranks[&(d - 1)], ranks[&d]);
        for &(e, r, c, v) in &entries {
            if e == d {
                m.set(r, c, BigInt::from(v));
            }
        }
        diffs.insert(d, m);
    }
    let bases: BTreeMap<i64, (IntMatrix, IntMatrix)> = (lo - 1..=hi + 1)
        .map(|d| (d, unimodular(ranks[&d], rng)))
        .collect();
    let conjugated = diffs
        .into_iter()
        .map(|(d, m)| (d, &(&bases[&(d - 1)].0 * &m) * &bases[&d].1))
        .collect();
    let gens = ranks
        .iter()
        .map(|(&d, &r)| (d, (0..r).map(|i| GenKey { base: i, shift: d }).collect()))
        .collect();
    let chain = ChainComplex::new(lo, hi, gens, conjugated).expect("shapes agree");
    let expected = (lo..=hi)
        .map(|d| {
            let mut orders: Vec<BigInt> = vec![BigInt::from(0); free[&d]];
            orders.extend(
                pairs
                    .iter()
                    .filter(|(t, m)| *t == d && *m > 1)
                    .map(|(_, m)| BigInt::from(*m)),
            );
            (d, FgAbGroup::from_orders(&orders))
        })
        .collect();
    OracleComplex { chain, expected }
}

/// Rank over Q by fraction-free elimination on `i128`, independent of the engine.
pub fn oracle_rank(m: &IntMatrix) -> usize {
    let mut a: Vec<Vec<i128>> = m
        .to_rows()
        .into_iter()
        .map(|r| {
            r.iter()
                .map(|x| i128::try_from(x).expect("small entries"))
                .collect()
        })
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let (f, g) = (a[rank][c], a[r][c]);
                let pivot_row = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = *x * f - y * g;
                }
                let h = a[r].iter().fold(0i128, |x, y| num_integer::gcd(x, *y));
                if h > 1 {
                    a[r].iter_mut().for_each(|x| *x /= h);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Cancels up to `steps` pairs picked at random among unit (or, over Q, nonzero) entries.
pub fn random_reduction(
    w: &WindowComplex,
    ring: Ring,
    steps: usize,
    rng: &mut impl Rng,
) -> WindowComplex {
    let mut current = w.clone();
    for _ in 0..steps {
        let mut candidates = Vec::new();
        for d in current.chain.d_lo..=current.chain.d_hi + 1 {
            let m = current.chain.boundary(d);
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let v = m.get(i, j);
                    let usable = match ring {
                        Ring::Int => *v == BigInt::from(1) || *v == BigInt::from(-1),
                        Ring::Rat => *v != BigInt::from(0),
                    };
                    if usable {
                        candidates.push((
                            current.chain.generators(d)[j],
                            current.chain.generators(d - 1)[i],
                        ));
                    }
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        let pick = candidates[rng.gen_range(0..candidates.len())];
        current = reduce_complex(&current, &[pick], ring).unwrap();
    }
    current
}
