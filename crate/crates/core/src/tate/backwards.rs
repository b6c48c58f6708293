//! The split of a window along `A^mu = 0`: the backwards part `{A^mu < 0}` as a subcomplex,
//! the nonnegative part as the quotient, and their long exact sequence.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{FgAbGroup, Ring};
use crate::complex::{
    identity_on_generators, instantiate_window, EquivariantComplex, TruncationSpec, WindowComplex,
};
use crate::error::Result;
use crate::homology::{homology, induced_between, les_check, GradedHomology, LesReport};

#[derive(Clone, Debug)]
pub struct BackwardsSplit {
    /// `{a <= A^mu <= -1}`.
    pub backwards: WindowComplex,
    /// `{a <= A^mu}`.
    pub total: WindowComplex,
    /// `{0 <= A^mu}`.
    pub nonnegative: WindowComplex,
    pub homology: [GradedHomology; 3],
    pub les: LesReport,
    /// Whether lowering the cut by one changes nothing, for the backwards part and the total.
    pub rho_iso: [bool; 2],
}

/// Group table of a split, for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BackwardsSummary {
    pub degree: i64,
    pub backwards: FgAbGroup,
    pub total: FgAbGroup,
    pub nonnegative: FgAbGroup,
}

fn deeper_is_iso(
    c: &Arc<EquivariantComplex>,
    spec: &TruncationSpec,
    w: &WindowComplex,
    ring: Ring,
) -> Result<bool> {
    let a = spec.a_mu_level.expect("cut windows");
    let deeper = instantiate_window(c, &spec.clone().with_a(a - 1))?;
    let m = induced_between(&deeper, w, ring)?;
    Ok(m.matrices.keys().all(|d| m.is_iso(*d)))
}

pub fn backwards_split(
    c: &Arc<EquivariantComplex>,
    ring: Ring,
    a: i64,
    degree_window: (i64, i64),
) -> Result<BackwardsSplit> {
    let base = TruncationSpec::full(degree_window.0, degree_window.1).with_a(a);
    let b_spec = base.clone().with_ceiling(-1);
    let backwards = instantiate_window(c, &b_spec)?;
    let total = instantiate_window(c, &base)?;
    let nonnegative = instantiate_window(
        c,
        &TruncationSpec::full(degree_window.0, degree_window.1).with_a(0.max(a)),
    )?;
    let inc = identity_on_generators(&backwards, &total)?;
    let proj = identity_on_generators(&total, &nonnegative)?;
    let les = les_check(
        &backwards.chain,
        &total.chain,
        &nonnegative.chain,
        &inc,
        &proj,
    )?;
    let homology = [
        homology(&backwards, ring)?,
        homology(&total, ring)?,
        homology(&nonnegative, ring)?,
    ];
    let rho_iso = [
        deeper_is_iso(c, &b_spec, &backwards, ring)?,
        deeper_is_iso(c, &base, &total, ring)?,
    ];
    Ok(BackwardsSplit {
        backwards,
        total,
        nonnegative,
        homology,
        les,
        rho_iso,
    })
}

impl BackwardsSplit {
    pub fn summary(&self) -> Vec<BackwardsSummary> {
        self.homology[1]
            .degrees
            .keys()
            .map(|&d| BackwardsSummary {
                degree: d,
                backwards: self.homology[0].group(d),
                total: self.homology[1].group(d),
                nonnegative: self.homology[2].group(d),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Family;

    #[test]
    fn rabinowitz_backwards_part() {
        let c = Arc::new(Family::Rabinowitz.build(0).unwrap());
        for m in -3..=-1 {
            let s = backwards_split(&c, Ring::Int, m, (2 * m - 1, 3)).unwrap();
            assert!(s.les.is_exact());
            for (d, g) in s.homology[0].degrees.iter().map(|(d, h)| (*d, &h.group)) {
                let expected = if d == 2 * m || d == -1 {
                    FgAbGroup::free(1)
                } else {
                    FgAbGroup::zero()
                };
                assert_eq!(*g, expected, "m = {m}, degree {d}");
            }
        }
    }

    #[test]
    fn nothing_above_zero() {
        // in degrees below -1 every generator of the Rabinowitz window sits at a negative level
        let c = Arc::new(Family::Rabinowitz.build(0).unwrap());
        let s = backwards_split(&c, Ring::Rat, -4, (-6, -3)).unwrap();
        assert!(s.nonnegative.chain.total_rank() == 0);
        assert_eq!(s.homology[0].render(), s.homology[1].render());
        assert!(s.les.is_exact());
    }
}
