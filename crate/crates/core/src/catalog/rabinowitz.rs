//! The Rabinowitz complex of the unit circle in C, and its equivariant version.

use crate::algebra::{FgAbGroup, Ring};
use crate::complex::{BaseGenerator, EquivariantComplex, TruncationSpec};
use crate::error::Result;

use super::{entry, h, CoefficientScope, ExampleBundle, Expected, ExpectedEntry, Family};

/// `w_+` in degree 1 and `w_-` in degree 0 on the level-zero circle, `d w_- = u^-1 w_+`.
pub(super) fn complex() -> EquivariantComplex {
    let mut c = EquivariantComplex::new();
    c.add_generator(BaseGenerator::new("w+", 1, 0, h(0)).labelled("maximum on the level-0 circle"));
    c.add_generator(BaseGenerator::new("w-", 0, 0, h(0)).labelled("minimum on the level-0 circle"));
    c.set_boundary("w-", &[(1, -1, "w+")]);
    c
}

/// One generator per circle, zero boundary.
pub(super) fn equivariant_complex() -> EquivariantComplex {
    let mut c = EquivariantComplex::new();
    c.add_generator(BaseGenerator::new("w", 0, 0, h(0)).labelled("level-0 circle"));
    c
}

fn window(lower: Option<i64>, upper: Option<i64>, lo: i64, hi: i64) -> TruncationSpec {
    TruncationSpec {
        a_mu_level: lower,
        mu_ceiling: upper,
        b_action: None,
        degree_window: (lo, hi),
    }
}

fn band(tag: &str, spec: TruncationSpec, nonzero: impl Fn(i64) -> bool) -> Vec<ExpectedEntry> {
    let (lo, hi) = spec.degree_window;
    (lo..=hi)
        .map(|d| {
            let group = if nonzero(d) {
                FgAbGroup::free(1)
            } else {
                FgAbGroup::zero()
            };
            entry(
                tag,
                Ring::Int,
                Expected::WindowGroup {
                    spec: spec.clone(),
                    degree: d,
                    group,
                },
            )
        })
        .collect()
}

/// Filtered groups of both complexes for all integer levels `m <= n` in `levels`.
pub fn rabinowitz_expectations(
    levels: std::ops::RangeInclusive<i64>,
    equivariant: bool,
) -> Vec<ExpectedEntry> {
    let (lo, hi) = (2 * levels.start() - 3, 2 * levels.end() + 3);
    let mut out = Vec::new();
    for n in levels.clone() {
        if equivariant {
            out.extend(band(
                "rabinowitz-equivariant-upper",
                window(None, Some(n), lo, hi),
                |d| d % 2 == 0 && d <= 2 * n,
            ));
            out.extend(band(
                "rabinowitz-equivariant-lower",
                window(Some(n), None, lo, hi),
                |d| d % 2 == 0 && d >= 2 * n,
            ));
        } else {
            out.extend(band(
                "rabinowitz-upper",
                window(None, Some(n), lo, hi),
                |d| d == 2 * n + 1,
            ));
            out.extend(band(
                "rabinowitz-lower",
                window(Some(n), None, lo, hi),
                |d| d == 2 * n,
            ));
        }
        for m in *levels.start()..=n {
            let spec = window(Some(m), Some(n), lo, hi);
            if equivariant {
                out.extend(band("rabinowitz-equivariant-band", spec, |d| {
                    d % 2 == 0 && (2 * m..=2 * n).contains(&d)
                }));
            } else {
                out.extend(band("rabinowitz-band", spec, |d| {
                    d == 2 * n + 1 || d == 2 * m
                }));
            }
        }
    }
    out
}

pub fn rabinowitz_c() -> Result<ExampleBundle> {
    ExampleBundle::new(
        "rabinowitz",
        Family::Rabinowitz,
        0,
        CoefficientScope::Int,
        rabinowitz_expectations(-3..=3, false),
    )
}

pub fn rabinowitz_equivariant() -> Result<ExampleBundle> {
    ExampleBundle::new(
        "rabinowitz-equivariant",
        Family::RabinowitzEquivariant,
        0,
        CoefficientScope::Int,
        rabinowitz_expectations(-3..=3, true),
    )
}
