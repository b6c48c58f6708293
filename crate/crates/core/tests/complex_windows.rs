mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tate_core::algebra::{FgAbGroup, IntMatrix, Ring};
use tate_core::catalog::Family;
use tate_core::complex::{
    identity_on_generators, instantiate_window, is_zero_complex, reduce_complex, u_shift,
    u_unshift, BaseGenerator, EquivariantComplex, GenKey, TruncationSpec, WindowComplex,
};
use tate_core::homology::homology;
use tate_core::Error;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn window(c: &Arc<EquivariantComplex>, spec: &TruncationSpec) -> WindowComplex {
    instantiate_window(c, spec).unwrap()
}

fn groups(w: &WindowComplex, ring: Ring) -> Vec<(i64, FgAbGroup)> {
    homology(w, ring)
        .unwrap()
        .degrees
        .into_iter()
        .map(|(d, h)| (d, h.group))
        .collect()
}

#[test]
fn rabinowitz_band_is_two_circles() {
    let c = Arc::new(Family::Rabinowitz.build(0).unwrap());
    for m in -2..=2 {
        for n in m..=2 {
            let spec = TruncationSpec::full(2 * m - 3, 2 * n + 3)
                .with_a(m)
                .with_ceiling(n);
            let w = window(&c, &spec);
            let h = homology(&w, Ring::Int).unwrap();
            for (d, x) in &h.degrees {
                let expected = if *d == 2 * n + 1 || *d == 2 * m {
                    FgAbGroup::free(1)
                } else {
                    FgAbGroup::zero()
                };
                assert_eq!(x.group, expected, "m = {m}, n = {n}, degree {d}");
            }
            // the top class is u^n w+ and the bottom class is u^m w-
            let top = &h.degrees[&(2 * n + 1)].representatives[0];
            let key = w.chain.generators(2 * n + 1)
                [top.iter().position(|x| *x != BigInt::from(0)).unwrap()];
            assert_eq!((w.key_id(key), key.shift), ("w+", n));
            let bottom = &h.degrees[&(2 * m)].representatives[0];
            let key = w.chain.generators(2 * m)
                [bottom.iter().position(|x| *x != BigInt::from(0)).unwrap()];
            assert_eq!((w.key_id(key), key.shift), ("w-", m));
        }
    }
}

#[test]
fn window_below_the_cut_is_zero() {
    // with a = 0 nothing lives below degree 0
    let c = Arc::new(Family::Cn { n: 1 }.build(3).unwrap());
    let w = window(&c, &TruncationSpec::full(-24, -20).with_a(0));
    assert!(is_zero_complex(&w));
    assert!(groups(&w, Ring::Int).iter().all(|(_, g)| g.is_zero()));
}

#[test]
fn staircase_matrices_follow_the_boundary_rule() {
    // d(u^j w_k^-) = u^j w_{k-1}^+ + a_k u^(j-1) w_k^+ with a_k = k for n = 1
    let horizon = 4;
    let c = Arc::new(Family::Cn { n: 1 }.build(horizon).unwrap());
    let w = window(&c, &TruncationSpec::full(-1, 2).with_a(-(horizon as i64)));
    assert!(c.validate().is_valid());
    for d in w.chain.d_lo..=w.chain.d_hi + 1 {
        let m = w.chain.boundary(d);
        let (cols, rows) = (w.chain.generators(d), w.chain.generators(d - 1));
        for (j, src) in cols.iter().enumerate() {
            let mut expected = vec![BigInt::from(0); rows.len()];
            let id = w.key_id(*src).to_string();
            if let Some(k) = id.strip_prefix('w').and_then(|s| s.strip_suffix('-')) {
                let k: usize = k.parse().unwrap();
                let terms = [
                    (format!("w{}+", k - 1), src.shift, 1),
                    (format!("w{k}+"), src.shift - 1, k),
                ];
                for (target, shift, coeff) in terms {
                    if let Some(i) = rows
                        .iter()
                        .position(|r| w.key_id(*r) == target && r.shift == shift)
                    {
                        expected[i] += coeff;
                    }
                }
            }
            assert_eq!(
                m.column(j),
                expected,
                "degree {d}, generator {}",
                w.key_label(*src)
            );
        }
    }
}

#[test]
fn u_shift_on_rabinowitz_moves_the_bottom_class() {
    let c = Arc::new(Family::Rabinowitz.build(0).unwrap());
    let w = window(&c, &TruncationSpec::full(-5, 5).with_a(-1).with_ceiling(1));
    let (shifted, map) = u_shift(&w).unwrap();
    assert_eq!(shifted.spec.a_mu_level, Some(0));
    let (hw, hs) = (
        homology(&w, Ring::Int).unwrap(),
        homology(&shifted, Ring::Int).unwrap(),
    );
    let induced =
        tate_core::homology::induced_map(&map, &w.chain, &shifted.chain, &hw, &hs).unwrap();
    // w-^(-1) in degree -2 goes to w-^(0) in degree 0
    assert!(induced.is_iso(-2));
    assert_eq!(hs.group(0), FgAbGroup::free(1));
}

#[test]
fn cancelling_nothing_changes_nothing() {
    let c = Arc::new(Family::Cn { n: 2 }.build(4).unwrap());
    let w = window(&c, &TruncationSpec::full(-2, 4).with_a(-3));
    let r = reduce_complex(&w, &[], Ring::Int).unwrap();
    assert_eq!(r.chain, w.chain);
}

/// T*S^2 with an extra acyclic pair `z_k -> w_k` (coefficient 2) next to every `d_k^-`.
fn padded_cotangent(horizon: usize) -> Arc<EquivariantComplex> {
    let mut c = Family::TStarS2 {
        weights: Default::default(),
    }
    .build(horizon)
    .unwrap();
    for k in 1..=horizon as i64 {
        let (z, w) = (format!("z{k}"), format!("w{k}"));
        c.add_generator(BaseGenerator::new(w.clone(), 2 * k + 1, 0, q(2 * k)));
        c.add_generator(BaseGenerator::new(z.clone(), 2 * k + 2, 0, q(2 * k)));
        c.set_boundary(&z, &[(2, 0, &w)]);
    }
    Arc::new(c)
}

fn pair_keys(w: &WindowComplex, horizon: usize) -> Vec<(GenKey, GenKey)> {
    let find = |id: &str| {
        w.chain
            .stored_degrees()
            .flat_map(|d| w.chain.generators(d).to_vec())
            .find(|k| w.key_id(*k) == id && k.shift == 0)
    };
    (1..=horizon)
        .filter_map(|k| Some((find(&format!("z{k}"))?, find(&format!("w{k}"))?)))
        .collect()
}

#[test]
fn cotangent_pairs_cancel_over_the_rationals() {
    let horizon = 4;
    let c = padded_cotangent(horizon);
    let spec = TruncationSpec::full(0, 8).with_a(0);
    let w = window(&c, &spec);
    let pairs = pair_keys(&w, horizon);
    assert_eq!(pairs.len(), 3);
    let reduced = reduce_complex(&w, &pairs, Ring::Rat).unwrap();
    assert_eq!(groups(&reduced, Ring::Rat), groups(&w, Ring::Rat));
    // the reduced complex is the bare cotangent staircase
    let bare = Arc::new(
        Family::TStarS2 {
            weights: Default::default(),
        }
        .build(horizon)
        .unwrap(),
    );
    assert_eq!(
        groups(&reduced, Ring::Rat),
        groups(&window(&bare, &spec), Ring::Rat)
    );
    let err = reduce_complex(&w, &pairs, Ring::Int).unwrap_err();
    assert!(
        matches!(err, Error::NonInvertiblePivot { ref pivot, .. } if pivot == "2"),
        "{err}"
    );
}

#[test]
fn u_shift_round_trip_on_every_example() {
    let families = [
        (Family::Cn { n: 1 }, 4),
        (Family::Cn { n: 3 }, 5),
        (
            Family::TStarS2 {
                weights: Default::default(),
            },
            3,
        ),
        (Family::Rabinowitz, 0),
        (
            Family::LocalOrbit {
                covering: 2,
                good: false,
                shift: 1,
            },
            0,
        ),
    ];
    for (family, k) in families {
        let c = Arc::new(family.build(k).unwrap());
        let w = window(&c, &TruncationSpec::full(-2, 6).with_a(-2).with_b(q(3)));
        let (shifted, there) = u_shift(&w).unwrap();
        let back = u_unshift(&shifted, &w).unwrap();
        let round = there.compose(&back).unwrap();
        for (d, m) in &round.matrices {
            assert_eq!(
                *m,
                IntMatrix::identity(w.chain.rank(*d)),
                "{family:?} degree {d}"
            );
        }
        // conjugation: d' S = S d
        for d in w.chain.d_lo..=w.chain.d_hi + 1 {
            let (s_hi, s_lo) = (&there.matrices[&d], &there.matrices[&(d - 1)]);
            assert_eq!(
                &shifted.chain.boundary(d + 2) * s_hi,
                s_lo * &w.chain.boundary(d)
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn windows_square_to_zero(fam in common::family(), spec in common::spec()) {
        let c = common::build(&fam);
        let w = window(&c, &spec);
        prop_assert!(w.chain.square_defects().is_empty());
        for d in w.chain.d_lo..=w.chain.d_hi {
            prop_assert!((&w.chain.boundary(d) * &w.chain.boundary(d + 1)).is_zero());
        }
        // every kept generator satisfies the cuts
        for d in w.chain.stored_degrees() {
            for key in w.chain.generators(d) {
                let g = c.generator(key.base);
                prop_assert_eq!(g.degree + 2 * key.shift, d);
                prop_assert!(spec.keeps(g.mu_level + key.shift, &g.h_action));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn nested_windows_commute_at_chain_level(
        fam in common::family(),
        a1 in -4i64..=1,
        da in 0i64..=2,
        b1 in 0i64..=6,
        db in 0i64..=3,
        lo in -3i64..=3,
    ) {
        let c = common::build(&fam);
        let spec = |a: i64, b: i64| TruncationSpec::full(lo, lo + 4).with_a(a).with_b(q(b));
        let (a2, b2) = (a1 + da, b1 + db);
        let w11 = window(&c, &spec(a1, b1));
        let w12 = window(&c, &spec(a1, b2));
        let w21 = window(&c, &spec(a2, b1));
        let w22 = window(&c, &spec(a2, b2));
        let across = identity_on_generators(&w11, &w12).unwrap().compose(&identity_on_generators(&w12, &w22).unwrap()).unwrap();
        let down = identity_on_generators(&w11, &w21).unwrap().compose(&identity_on_generators(&w21, &w22).unwrap()).unwrap();
        prop_assert_eq!(across, down);
    }
}

#[test]
fn reductions_keep_homology() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = (common::family(), common::spec());
    let mut reduced_something = 0;
    for _ in 0..100 {
        let (fam, spec) = strategy.new_tree(&mut runner).unwrap().current();
        let c = common::build(&fam);
        let w = window(&c, &spec);
        for ring in [Ring::Int, Ring::Rat] {
            let r = common::random_reduction(&w, ring, 4, &mut rng);
            reduced_something += usize::from(!r.cancelled.is_empty());
            assert_eq!(groups(&r, ring), groups(&w, ring), "{fam:?} {spec}");
        }
    }
    assert!(
        reduced_something > 50,
        "only {reduced_something} reductions did anything"
    );
}
