//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p tate-core --test acceptance -- --nocapture` to see the lines.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::strategy::{Strategy, ValueTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tate_core::algebra::rational::inverse;
use tate_core::algebra::{FgAbGroup, IntMatrix, Ring};
use tate_core::catalog::{
    cn_complex, local_orbit, t_star_s2, xn_rank_report, ExampleBundle, Family, WeightRule,
};
use tate_core::complex::{instantiate_window, EquivariantComplex, TruncationSpec, WindowComplex};
use tate_core::flows::{
    count_c1, gradient_identity, heat_flow_check, heteroclinic, integrate_rabinowitz,
    residual_convergence, RabinowitzState,
};
use tate_core::homology::{chain_homology, homology, GradedHomology};
use tate_core::localization::{
    counterexample_probe, localize, tate_triple_compare, LinearEndoSpace,
};
use tate_core::presentations::{iso_h, phi_report, prime_expand, IntSequence, SequenceRule};
use tate_core::tate::{build_grid, four_tate_groups, DiagramParams, LimitValue, TateDiagram};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn window(c: &Arc<EquivariantComplex>, spec: &TruncationSpec) -> Result<WindowComplex, String> {
    instantiate_window(c, spec).map_err(|e| e.to_string())
}

fn groups_of(w: &WindowComplex, ring: Ring) -> Result<GradedHomology, String> {
    homology(w, ring).map_err(|e| e.to_string())
}

fn z_if(cond: bool) -> FgAbGroup {
    if cond {
        FgAbGroup::free(1)
    } else {
        FgAbGroup::zero()
    }
}

/// Compares every interior degree of `spec` with `expected`.
fn band(
    c: &Arc<EquivariantComplex>,
    spec: TruncationSpec,
    expected: impl Fn(i64) -> FgAbGroup,
    label: &str,
) -> Outcome {
    let h = groups_of(&window(c, &spec)?, Ring::Int)?;
    for (d, x) in &h.degrees {
        let want = expected(*d);
        ensure(x.group == want, || {
            format!(
                "{label}, degree {d}: expected {want:?}, found {:?}",
                x.group
            )
        })?;
    }
    Ok(())
}

fn rabinowitz_filtered_groups() -> Outcome {
    let plain = Arc::new(Family::Rabinowitz.build(0).map_err(|e| e.to_string())?);
    let equi = Arc::new(
        Family::RabinowitzEquivariant
            .build(0)
            .map_err(|e| e.to_string())?,
    );
    let (lo, hi) = (-9, 9);
    let spec = |a: Option<i64>, ceiling: Option<i64>| TruncationSpec {
        a_mu_level: a,
        mu_ceiling: ceiling,
        b_action: None,
        degree_window: (lo, hi),
    };
    let even = |d: i64| d % 2 == 0;
    for n in -3..=3i64 {
        band(
            &plain,
            spec(None, Some(n)),
            |d| z_if(d == 2 * n + 1),
            &format!("FH^{n}"),
        )?;
        band(
            &plain,
            spec(Some(n), None),
            |d| z_if(d == 2 * n),
            &format!("FH_{n}"),
        )?;
        band(
            &equi,
            spec(None, Some(n)),
            |d| z_if(even(d) && d <= 2 * n),
            &format!("equivariant FH^{n}"),
        )?;
        band(
            &equi,
            spec(Some(n), None),
            |d| z_if(even(d) && d >= 2 * n),
            &format!("equivariant FH_{n}"),
        )?;
        for m in -3..=n {
            band(
                &plain,
                spec(Some(m), Some(n)),
                |d| z_if(d == 2 * n + 1 || d == 2 * m),
                &format!("FH_{m}^{n}"),
            )?;
            let interval = |d: i64| even(d) && (2 * m..=2 * n).contains(&d);
            band(
                &equi,
                spec(Some(m), Some(n)),
                |d| z_if(interval(d)),
                &format!("equivariant FH_{m}^{n}"),
            )?;
            // the surviving classes are u^n w+ on top and u^m w- at the bottom
            let w = window(&plain, &spec(Some(m), Some(n)))?;
            let h = groups_of(&w, Ring::Int)?;
            for (d, id, shift) in [(2 * n + 1, "w+", n), (2 * m, "w-", m)] {
                let rep = &h.degrees[&d].representatives[0];
                let support: Vec<_> = w
                    .chain
                    .generators(d)
                    .iter()
                    .zip(rep)
                    .filter(|(_, c)| **c != BigInt::from(0))
                    .collect();
                ensure(
                    support.len() == 1
                        && w.key_id(*support[0].0) == id
                        && support[0].0.shift == shift,
                    || format!("FH_{m}^{n}: degree {d} class is not u^{shift} {id}"),
                )?;
            }
        }
    }
    Ok(())
}

fn diagram(
    bundle: &ExampleBundle,
    ring: Ring,
    params: &DiagramParams,
) -> Result<TateDiagram, String> {
    let d = four_tate_groups(bundle, ring, (-2, 8), params).map_err(|e| e.to_string())?;
    ensure(d.violations.is_empty(), || {
        format!("{}: {}", bundle.name, d.violations.join("; "))
    })?;
    Ok(d)
}

fn is_group(v: &LimitValue, g: &FgAbGroup) -> bool {
    v.as_group() == Some(g)
}

fn complex_space_over_integers() -> Outcome {
    let primes: Vec<u64> = (2..=97u64)
        .filter(|p| (2..*p).all(|q| p % q != 0))
        .collect();
    for n in 1..=2 {
        let bundle = cn_complex(n, 4).map_err(|e| e.to_string())?;
        let params = DiagramParams {
            horizon_probes: vec![4, 6, 8],
            ..DiagramParams::default()
        };
        let d = diagram(&bundle, Ring::Int, &params)?;
        for (deg, g) in &d.degrees {
            let label = format!("C^{n}, degree {deg}");
            if deg % 2 == 0 {
                let LimitValue::Colimit { criterion, .. } = &g.jones_petrack else {
                    return Err(format!("{label}: top right is not a horizon colimit"));
                };
                ensure(
                    criterion.torsion_free && criterion.rank == 1 && !criterion.cyclic,
                    || format!("{label}: not torsion-free of rank one"),
                )?;
                let probed: Vec<u64> = criterion
                    .divisible_by
                    .iter()
                    .filter(|(_, ok)| *ok)
                    .map(|(p, _)| *p)
                    .collect();
                ensure(probed == primes, || {
                    format!("{label}: divisible only by {probed:?}")
                })?;
            } else {
                ensure(is_group(&g.jones_petrack, &FgAbGroup::zero()), || {
                    format!("{label}: odd top right is not 0")
                })?;
            }
            ensure(
                is_group(&g.chain_inverse_direct, &FgAbGroup::zero()),
                || format!("{label}: bottom left is not 0"),
            )?;
            ensure(is_group(&g.goodwillie, &FgAbGroup::zero()), || {
                format!("{label}: Goodwillie side is not 0")
            })?;
        }
    }
    Ok(())
}

fn complex_space_over_rationals() -> Outcome {
    for n in 1..=2 {
        let d = diagram(
            &cn_complex(n, 4).map_err(|e| e.to_string())?,
            Ring::Rat,
            &DiagramParams::default(),
        )?;
        ensure(d.degrees.keys().copied().eq(-2..=8), || {
            "degree window not covered".into()
        })?;
        for (deg, g) in &d.degrees {
            let top = z_if(deg % 2 == 0);
            let label = format!("C^{n}, degree {deg}");
            ensure(
                is_group(&g.chain_direct_inverse, &top) && is_group(&g.jones_petrack, &top),
                || format!("{label}: top row"),
            )?;
            ensure(
                is_group(&g.chain_inverse_direct, &FgAbGroup::zero())
                    && is_group(&g.goodwillie, &FgAbGroup::zero()),
                || format!("{label}: bottom row"),
            )?;
            ensure(g.rho.is_iso() == Some(true), || {
                format!("{label}: rho is not an isomorphism")
            })?;
        }
    }
    Ok(())
}

fn cotangent_sphere() -> Outcome {
    let horizon = 6;
    let weights = [
        WeightRule::default(),
        WeightRule::Cycle {
            values: vec![2, 4, -2],
        },
        WeightRule::Affine {
            slope: 2,
            intercept: 0,
        },
    ];
    let mut shapes = Vec::new();
    for rule in weights {
        let bundle = t_star_s2(horizon, rule.clone()).map_err(|e| e.to_string())?;
        let d = diagram(&bundle, Ring::Rat, &DiagramParams::default())?;
        for (deg, g) in &d.degrees {
            let (top, bottom) = if deg % 2 == 0 {
                (FgAbGroup::free(2), FgAbGroup::free(1))
            } else {
                (FgAbGroup::zero(), FgAbGroup::zero())
            };
            ensure(
                is_group(&g.jones_petrack, &top) && is_group(&g.goodwillie, &bottom),
                || {
                    format!(
                        "{rule:?}, degree {deg}: corners {} / {}",
                        g.jones_petrack.render(Ring::Rat),
                        g.goodwillie.render(Ring::Rat)
                    )
                },
            )?;
        }
        shapes.push(
            d.degrees
                .values()
                .map(|g| g.corners().map(|c| c.render(Ring::Rat)))
                .collect::<Vec<_>>(),
        );

        // loop space of the sphere: Z, Z in odd degrees, Z + Z/2 in even positive degrees
        let top = 2 * horizon as i64;
        let spec = TruncationSpec {
            a_mu_level: Some(0),
            mu_ceiling: Some(0),
            b_action: None,
            degree_window: (-2, top),
        };
        band(
            &bundle.complex,
            spec,
            |d| match d {
                d if d < 0 => FgAbGroup::zero(),
                0 => FgAbGroup::free(1),
                d if d % 2 != 0 => FgAbGroup::free(1),
                _ => FgAbGroup::free(1).direct_sum(&FgAbGroup::cyclic(2)),
            },
            &format!("loop space, {rule:?}"),
        )?;
    }
    ensure(shapes.windows(2).all(|w| w[0] == w[1]), || {
        "diagram depends on the weights".into()
    })
}

fn local_orbits() -> Outcome {
    for n in 1..=5u64 {
        for good in [true, false] {
            if !good && n % 2 != 0 {
                continue;
            }
            for shift in [0, 1] {
                let bundle = local_orbit(n, good, shift).map_err(|e| e.to_string())?;
                let w = window(&bundle.complex, &TruncationSpec::full(-4, 6))?;
                let over_z = groups_of(&w, Ring::Int)?;
                let over_q = groups_of(&w, Ring::Rat)?;
                for d in -4..=6i64 {
                    let expected = match (good, n) {
                        (true, 1) => FgAbGroup::zero(),
                        (true, _) if (d - shift - 1).rem_euclid(2) == 0 => FgAbGroup::cyclic(n),
                        (false, _) if (d - shift).rem_euclid(2) == 0 => FgAbGroup::cyclic(2),
                        _ => FgAbGroup::zero(),
                    };
                    let label = format!("n = {n}, good = {good}, shift = {shift}, degree {d}");
                    ensure(over_z.group(d) == expected, || {
                        format!("{label}: found {:?}", over_z.group(d))
                    })?;
                    ensure(over_q.group(d).is_zero(), || {
                        format!("{label}: nonzero over Q")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn random_endo(rng: &mut impl Rng, n: usize, invertible: bool) -> IntMatrix {
    if invertible {
        // upper unitriangular times lower unitriangular, with signs
        let upper = IntMatrix::from_fn(n, n, |i, j| {
            BigInt::from(if i == j {
                1
            } else if j > i {
                rng.gen_range(-2i64..=2)
            } else {
                0
            })
        });
        let lower = IntMatrix::from_fn(n, n, |i, j| {
            BigInt::from(if i == j {
                [1, -1][rng.gen_range(0..2)]
            } else if j < i {
                rng.gen_range(-2i64..=2)
            } else {
                0
            })
        });
        return &upper * &lower;
    }
    IntMatrix::from_fn(n, n, |_, _| {
        BigInt::from(if rng.gen_bool(0.4) {
            rng.gen_range(-2i64..=2)
        } else {
            0
        })
    })
}

fn localization_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..30 {
        let n = rng.gen_range(1..=6);
        let invertible = trial % 2 == 0;
        let t = random_endo(&mut rng, n, invertible).to_rational();
        let loc = localize(&LinearEndoSpace::new(t.clone()).map_err(|e| e.to_string())?);
        let label = format!("trial {trial}");
        ensure(loc.p_injective, || format!("{label}: P is not injective"))?;
        if invertible {
            ensure(loc.p_surjective, || {
                format!("{label}: T invertible but P not onto")
            })?;
        }
        ensure(loc.p_intertwines(&t), || format!("{label}: T P != P T_bar"))?;
        ensure(
            loc.quotient_squares_commute(&t) && loc.quotient_images_are_eventual_image(),
            || format!("{label}: quotients do not reproduce the eventual image"),
        )?;
    }
    // Tate triples with surjective T: block structure hidden by a change of basis
    for trial in 0..20 {
        let mut t0 = IntMatrix::zeros(4, 4);
        let mut d0 = IntMatrix::zeros(4, 4);
        let mut boundary_rank = 0;
        for block in 0..2 {
            let (i, j) = (2 * block, 2 * block + 1);
            let a = [1i64, -1, 2][rng.gen_range(0..3)];
            t0.set(i, i, BigInt::from(a));
            t0.set(j, j, BigInt::from(a));
            t0.set(i, j, BigInt::from(rng.gen_range(-2i64..=2)));
            if rng.gen_bool(0.6) {
                d0.set(i, j, BigInt::from(1));
                boundary_rank += 1;
            }
        }
        let p = random_endo(&mut rng, 4, true).to_rational();
        let p_inv = inverse(&p).ok_or("change of basis is singular")?;
        let t = &(&p * &t0.to_rational()) * &p_inv;
        let d = &(&p * &d0.to_rational()) * &p_inv;
        let space = LinearEndoSpace::triple(t, d).map_err(|e| e.to_string())?;
        let cmp = tate_triple_compare(&space, 5).map_err(|e| e.to_string())?;
        let expected = 4 - 2 * boundary_rank;
        ensure(
            cmp.equal && cmp.limit_side == expected && cmp.localized_side == expected,
            || {
                format!(
                    "triple {trial}: sides {} and {}, expected {expected}",
                    cmp.limit_side, cmp.localized_side
                )
            },
        )?;
        ensure(
            cmp.transitions_iso.iter().all(|x| *x)
                && cmp
                    .quotient_dims
                    .iter()
                    .all(|k| *k == cmp.eventual_homology_dim),
            || format!("triple {trial}: quotient homologies do not stabilize"),
        )?;
    }
    let report = counterexample_probe(8).map_err(|e| e.to_string())?;
    ensure(report.left_vanishes(), || {
        format!(
            "truncation 8: left side {} / {}",
            report.eventual_image_dim, report.limit_side
        )
    })?;
    ensure(report.right_is_rank_one(), || {
        "truncation 8: right side is not of rank one".into()
    })
}

fn rationals_presentation() -> Outcome {
    let report = phi_report(20, 20, 10);
    ensure(report.well_defined, || "phi is not well defined".into())?;
    ensure(report.additive, || "phi is not additive".into())?;
    ensure(report.injective, || {
        "phi is not injective on the grid".into()
    })?;
    ensure(report.hits_generators, || {
        "phi misses a generator x_q, q <= 10".into()
    })?;
    ensure(report.grid_size == 41 * 20, || {
        format!("grid has {} fractions", report.grid_size)
    })?;
    let successor = prime_expand(&IntSequence::successor(), 600).sequence();
    let doubled = prime_expand(&IntSequence::rule(SequenceRule::Repeat { n: 2 }), 600).sequence();
    ensure(successor != doubled, || "the two sequences coincide".into())?;
    for (a, b) in [(&successor, &doubled), (&doubled, &successor)] {
        let h = iso_h(a, b, 20, 400).map_err(|e| e.to_string())?;
        ensure(h.relations_respected && h.surjective_on_targets, || {
            "iso_h fails below 20".into()
        })?;
    }
    Ok(())
}

fn heat_flow() -> Outcome {
    for x0 in [0.1, -0.1, 0.5, -0.5, 0.9, -0.9] {
        let r = heat_flow_check(x0, (-0.2, 1.0), 1e-8).map_err(|e| e.to_string())?;
        ensure(r.max_relative_error <= 1e-8, || {
            format!("x0 = {x0}: relative error {:.3e}", r.max_relative_error)
        })?;
    }
    let fit = residual_convergence(0.3, (-0.05, 0.05), 50, 2);
    ensure((fit.order - 2.0).abs() < 0.1, || {
        format!("fitted order {:.3}", fit.order)
    })?;
    ensure(fit.samples.windows(2).all(|w| w[1].1 < w[0].1), || {
        "residual does not shrink".into()
    })?;
    let count = count_c1().map_err(|e| e.to_string())?.count;
    ensure(count == 2, || format!("count_c1 = {count}"))
}

fn rabinowitz_flow() -> Outcome {
    let mut s = RabinowitzState::zero(-2, 2, 0.3);
    for (k, z) in [
        (-2, (0.2, 0.1)),
        (-1, (0.3, -0.4)),
        (0, (0.5, 0.2)),
        (1, (-0.2, 0.3)),
        (2, (0.1, 0.1)),
    ] {
        *s.mode_mut(k) = Complex64::new(z.0, z.1);
    }
    let gap = gradient_identity(&s, 0.3, 100).map_err(|e| e.to_string())?;
    ensure(gap <= 1e-6, || {
        format!("gradient identity off by {gap:.3e}")
    })?;

    let mut sub = RabinowitzState::zero(-1, 2, 0.2);
    *sub.mode_mut(0) = Complex64::new(0.8, 0.1);
    *sub.mode_mut(1) = Complex64::new(0.3, -0.2);
    let run = integrate_rabinowitz(&sub, 0.3, 1e-10).map_err(|e| e.to_string())?;
    ensure(run.drift <= 1e-12, || {
        format!("modes outside the subspace reached {:.3e}", run.drift)
    })?;

    let orbit = heteroclinic(0).map_err(|e| e.to_string())?;
    ensure(orbit.start_action.abs() <= 1e-6, || {
        format!("start action {:.3e}", orbit.start_action)
    })?;
    ensure((orbit.end_action - PI).abs() <= 1e-6, || {
        format!("end action off by {:.3e}", orbit.end_action - PI)
    })
}

fn four_manifold_ranks() -> Outcome {
    for n in 1..=10u32 {
        let r = xn_rank_report(n).map_err(|e| e.to_string())?;
        let d = u64::from(n * n + n + 2);
        ensure(r.total_rank == d, || {
            format!("n = {n}: d_n = {}, expected {d}", r.total_rank)
        })?;
        ensure(r.goodwillie_rank == 1 << n, || {
            format!("n = {n}: Goodwillie rank {}", r.goodwillie_rank)
        })?;
        if n <= 4 {
            ensure(r.kappa_injective == Some(false), || {
                format!("n = {n}: kappa should not be injective")
            })?;
        }
        if n >= 6 {
            ensure(r.kappa_surjective == Some(false), || {
                format!("n = {n}: kappa should not be surjective")
            })?;
        }
        if n == 5 {
            ensure(
                r.kappa_injective.is_none() && r.kappa_surjective.is_none(),
                || "n = 5: ranks agree".into(),
            )?;
        }
    }
    Ok(())
}

fn property_suites() -> Outcome {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = (common::family(), common::spec());
    let mut draw = || {
        strategy
            .new_tree(&mut runner)
            .map(|t| t.current())
            .map_err(|e| e.to_string())
    };
    for i in 0..500 {
        let (fam, spec) = draw()?;
        let w = window(&common::build(&fam), &spec)?;
        ensure(w.chain.square_defects().is_empty(), || {
            format!("window {i}: boundary squares to nonzero")
        })?;
    }
    let examples = [
        (Family::Cn { n: 1 }, 4),
        (Family::Cn { n: 2 }, 4),
        (
            Family::TStarS2 {
                weights: WeightRule::default(),
            },
            4,
        ),
        (
            Family::LocalOrbit {
                covering: 3,
                good: true,
                shift: 0,
            },
            0,
        ),
        (
            Family::LocalOrbit {
                covering: 2,
                good: false,
                shift: 0,
            },
            0,
        ),
        (
            Family::Torus {
                n: 2,
                class_bound: 1,
            },
            0,
        ),
        (Family::Rabinowitz, 0),
        (Family::RabinowitzEquivariant, 0),
    ];
    for (fam, k) in examples {
        let c = common::build(&(fam.clone(), k));
        for ring in [Ring::Int, Ring::Rat] {
            let grid = build_grid(
                &c,
                ring,
                (-2, 6),
                &[-3, -2, -1, 0],
                &[Some(q(1)), Some(q(3)), None],
            )
            .map_err(|e| e.to_string())?;
            let failures = grid.square_failures().map_err(|e| e.to_string())?;
            ensure(failures.is_empty(), || {
                format!("{fam:?} over {ring:?}: squares {failures:?} fail")
            })?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for i in 0..100 {
        let (fam, spec) = draw()?;
        let w = window(&common::build(&fam), &spec)?;
        let ring = if i % 2 == 0 { Ring::Int } else { Ring::Rat };
        let reduced = common::random_reduction(&w, ring, 4, &mut rng);
        let (before, after) = (groups_of(&w, ring)?, groups_of(&reduced, ring)?);
        ensure(
            before
                .degrees
                .keys()
                .all(|d| before.group(*d) == after.group(*d)),
            || format!("reduction {i} changed homology"),
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for i in 0..200 {
        let oracle = common::oracle_complex(&mut rng);
        let h = chain_homology(&oracle.chain, Ring::Int).map_err(|e| e.to_string())?;
        ensure(
            oracle.expected.iter().all(|(d, g)| h.group(*d) == *g),
            || format!("oracle complex {i} disagrees"),
        )?;
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("1 Rabinowitz filtered groups", rabinowitz_filtered_groups),
        ("2 C^n over Z", complex_space_over_integers),
        ("3 C^n over Q", complex_space_over_rationals),
        ("4 T*S^2 over Q and loop space homology", cotangent_sphere),
        ("5 local orbit homologies", local_orbits),
        ("6 localization suite", localization_suite),
        ("7 presentation of Q", rationals_presentation),
        ("8 heat flow", heat_flow),
        ("9 Rabinowitz flow", rabinowitz_flow),
        ("10 four-manifold rank arithmetic", four_manifold_ranks),
        ("11 property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
