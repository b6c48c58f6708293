//! Local complexes of multiply covered circles, and the flat torus model built from them.

use num_integer::Integer;

use crate::algebra::{FgAbGroup, Ring};
use crate::complex::{BaseGenerator, EquivariantComplex, TruncationSpec};
use crate::error::{Error, Result};

use super::{entry, h, CoefficientScope, DiagramCorners, ExampleBundle, Expected, Family};

fn add_orbit(
    c: &mut EquivariantComplex,
    name: &str,
    covering: u64,
    good: bool,
    shift: i64,
    action: i64,
) {
    let (m, p) = (format!("{name}-"), format!("{name}+"));
    c.add_generator(BaseGenerator::new(m.clone(), shift, 0, h(action)));
    c.add_generator(BaseGenerator::new(p.clone(), shift + 1, 0, h(action)));
    if good {
        c.set_boundary(&m, &[(covering as i64, -1, &p)]);
    } else {
        c.set_boundary(&p, &[(2, 0, &m)]);
    }
}

pub(super) fn orbit_complex(covering: u64, good: bool, shift: i64) -> Result<EquivariantComplex> {
    if covering == 0 {
        return Err(Error::BadParams("covering number must be positive".into()));
    }
    if !good && !covering.is_multiple_of(2) {
        return Err(Error::BadParity(format!(
            "a bad orbit has even covering number, got {covering}"
        )));
    }
    let mut c = EquivariantComplex::new();
    add_orbit(&mut c, "w", covering, good, shift, 1);
    Ok(c)
}

/// A circle with covering number `covering` whose minimum sits in degree `shift`.
pub fn local_orbit(covering: u64, good: bool, shift: i64) -> Result<ExampleBundle> {
    orbit_complex(covering, good, shift)?;
    let spec = TruncationSpec::full(-4, 6);
    let mut expected = Vec::new();
    for d in -4..=6i64 {
        let group = match (good, covering) {
            (true, 1) => FgAbGroup::zero(),
            (true, n) if (d - shift - 1).rem_euclid(2) == 0 => FgAbGroup::cyclic(n),
            (false, _) if (d - shift).rem_euclid(2) == 0 => FgAbGroup::cyclic(2),
            _ => FgAbGroup::zero(),
        };
        let value = Expected::WindowGroup {
            spec: spec.clone(),
            degree: d,
            group,
        };
        expected.push(entry("local-circle-integer", Ring::Int, value));
        let value = Expected::WindowGroup {
            spec: spec.clone(),
            degree: d,
            group: FgAbGroup::zero(),
        };
        expected.push(entry("local-circle-rational", Ring::Rat, value));
    }
    ExampleBundle::new(
        "local-orbit",
        Family::LocalOrbit {
            covering,
            good,
            shift,
        },
        0,
        CoefficientScope::Both,
        expected,
    )
}

fn classes(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| (-bound..=bound).map(move |x| [v.clone(), vec![x]].concat()))
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

pub(super) fn torus_complex(n: usize, bound: i64) -> EquivariantComplex {
    let mut c = EquivariantComplex::new();
    for bits in 0u32..(1 << n) {
        c.add_generator(BaseGenerator::new(
            format!("t{bits:0n$b}"),
            i64::from(bits.count_ones()),
            0,
            h(0),
        ));
    }
    for v in classes(n, bound) {
        let covering = v.iter().fold(0i64, |g, x| g.gcd(x)) as u64;
        let length = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        let name = format!("o{v:?}").replace(' ', "");
        add_orbit(&mut c, &name, covering, true, 0, length);
    }
    c
}

/// Flat `T^n`: cells of the torus at the constants plus one good circle per nonzero class.
/// The circle families are collapsed to single circles, which is only faithful over Q.
pub fn torus(n: usize, class_bound: i64, ring: Ring) -> Result<ExampleBundle> {
    if ring != Ring::Rat {
        return Err(Error::RequiresRationalCoefficients);
    }
    if n == 0 || n > 6 || class_bound < 0 {
        return Err(Error::BadParams(format!(
            "torus needs 1 <= n <= 6 and a nonnegative bound, got {n}, {class_bound}"
        )));
    }
    let half = 1usize << (n - 1);
    let expected = (-2..=8)
        .map(|d| {
            entry(
                "flat-torus-diagram",
                Ring::Rat,
                Expected::Diagram {
                    degree: d,
                    corners: DiagramCorners::ranks(half, half),
                },
            )
        })
        .collect();
    ExampleBundle::new(
        "torus",
        Family::Torus { n, class_bound },
        0,
        CoefficientScope::Rat,
        expected,
    )
}
