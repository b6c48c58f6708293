mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tate_core::algebra::rational::{inverse, rank};
use tate_core::algebra::{IntMatrix, RatMatrix};
use tate_core::localization::{localize, tate_triple_compare, LinearEndoSpace};

/// Random integer endomorphism, with some columns killed so nilpotent parts show up.
fn random_endo(rng: &mut impl Rng) -> IntMatrix {
    let n = rng.gen_range(1..=6);
    let keep: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.7)).collect();
    IntMatrix::from_fn(n, n, |_, j| {
        if keep[j] && rng.gen_bool(0.5) {
            BigInt::from(rng.gen_range(-2i64..=2))
        } else {
            BigInt::from(0)
        }
    })
}

fn power(t: &IntMatrix, k: usize) -> IntMatrix {
    (0..k).fold(IntMatrix::identity(t.rows()), |acc, _| t * &acc)
}

#[test]
fn eventual_images_of_random_endomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..50 {
        let t = random_endo(&mut rng);
        let n = t.rows();
        let t_n = power(&t, n);
        let loc = localize(&LinearEndoSpace::new(t.to_rational()).unwrap());
        // the eventual image is the image of T^n
        assert_eq!(loc.rank(), common::oracle_rank(&t_n), "trial {trial}");
        let both = t_n.to_rational().hstack(&loc.image.basis).unwrap();
        assert_eq!(rank(&both), loc.rank(), "trial {trial}");
        assert!(loc.image.stabilized_at <= n);
        assert_eq!(
            &loc.t_bar * &loc.t_bar_inverse,
            RatMatrix::identity(loc.rank())
        );
        assert!(loc.p_intertwines(&t.to_rational()), "trial {trial}");
        assert!(
            loc.quotient_squares_commute(&t.to_rational()),
            "trial {trial}"
        );
        assert!(loc.quotient_images_are_eventual_image(), "trial {trial}");
        assert!(loc.p_injective);
        assert_eq!(
            loc.p_surjective,
            common::oracle_rank(&t) == n,
            "trial {trial}"
        );
    }
}

/// `diag(a, a) + b d` on each 2x2 block, with `d` one Jordan-type nilpotent per block that carries one.
fn block_triple(rng: &mut impl Rng) -> (IntMatrix, IntMatrix, usize) {
    let n = 4;
    let mut t = IntMatrix::zeros(n, n);
    let mut d = IntMatrix::zeros(n, n);
    let mut boundary_rank = 0;
    for block in 0..2 {
        let (i, j) = (2 * block, 2 * block + 1);
        let a = [1i64, -1][rng.gen_range(0..2)];
        let b = rng.gen_range(-2i64..=2);
        t.set(i, i, BigInt::from(a));
        t.set(j, j, BigInt::from(a));
        t.set(i, j, BigInt::from(b));
        if rng.gen_bool(0.6) {
            d.set(i, j, BigInt::from(1));
            boundary_rank += 1;
        }
    }
    (t, d, boundary_rank)
}

#[test]
fn surjective_triples_compare_equal() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..40 {
        let (t0, d0, boundary_rank) = block_triple(&mut rng);
        // hide the block structure behind a change of basis
        let p = IntMatrix::from_fn(4, 4, |i, j| {
            BigInt::from(i64::from(i == j) + i64::from(j == i + 1) * rng.gen_range(-1i64..=1))
        });
        let (pr, pinv) = (p.to_rational(), inverse(&p.to_rational()).unwrap());
        let t = &(&pr * &t0.to_rational()) * &pinv;
        let d = &(&pr * &d0.to_rational()) * &pinv;
        let space = LinearEndoSpace::triple(t, d).unwrap();
        assert!(space.t_surjective());
        let cmp = tate_triple_compare(&space, 4).unwrap();
        let expected = 4 - 2 * boundary_rank;
        assert!(cmp.equal, "trial {trial}");
        assert_eq!(cmp.eventual_homology_dim, expected, "trial {trial}");
        assert_eq!(
            (cmp.limit_side, cmp.localized_side),
            (expected, expected),
            "trial {trial}"
        );
        assert!(
            cmp.quotient_dims.iter().all(|k| *k == expected),
            "trial {trial}"
        );
        assert!(cmp.transitions_iso.iter().all(|x| *x), "trial {trial}");
    }
}

#[test]
fn boundary_must_commute_with_the_action() {
    let t = IntMatrix::from_fn(2, 2, |i, j| {
        BigInt::from(i64::from(i == j) + i64::from(i == 0 && j == 1))
    })
    .to_rational();
    let d = RatMatrix::from_fn(2, 2, |i, j| {
        if i == 1 && j == 0 {
            BigRational::from_integer(1.into())
        } else {
            BigRational::from_integer(0.into())
        }
    });
    assert!(LinearEndoSpace::triple(t, d).is_err());
}
