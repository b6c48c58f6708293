//! Per-degree homology of windows, maps induced by the bidirect system, and long exact
//! sequences with their connecting maps.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::algebra::lattice::reduce_mod;
use crate::algebra::matrix::to_rational_vec;
use crate::algebra::rational::{rank, solve};
use crate::algebra::{
    homology_of_pair, induced_matrix, map_verdicts, FgAbGroup, IntMatrix, PairHomology, RatMatrix,
    Ring,
};
use crate::complex::{identity_on_generators, ChainComplex, ChainMap, WindowComplex};
use crate::error::{Error, Result};

/// Homology in the interior degrees of a window.
#[derive(Clone, Debug)]
pub struct GradedHomology {
    pub ring: Ring,
    pub degrees: BTreeMap<i64, PairHomology>,
}

impl GradedHomology {
    pub fn group(&self, d: i64) -> FgAbGroup {
        self.degrees
            .get(&d)
            .map_or_else(FgAbGroup::zero, |h| h.group.clone())
    }

    pub fn at(&self, d: i64) -> Option<&PairHomology> {
        self.degrees.get(&d)
    }

    /// Dimension over Q, or free rank over Z.
    pub fn rank(&self, d: i64) -> usize {
        self.group(d).free_rank
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.values().all(|h| h.group.is_zero())
    }

    pub fn render(&self) -> BTreeMap<i64, String> {
        self.degrees
            .iter()
            .map(|(d, h)| (*d, h.group.render(self.ring)))
            .collect()
    }
}

pub fn chain_homology(chain: &ChainComplex, ring: Ring) -> Result<GradedHomology> {
    let degrees: Result<BTreeMap<i64, PairHomology>> = (chain.d_lo..=chain.d_hi)
        .into_par_iter()
        .map(|d| homology_of_pair(&chain.boundary(d + 1), &chain.boundary(d), ring).map(|h| (d, h)))
        .collect();
    Ok(GradedHomology {
        ring,
        degrees: degrees?,
    })
}

pub fn homology(w: &WindowComplex, ring: Ring) -> Result<GradedHomology> {
    chain_homology(&w.chain, ring)
}

/// A homomorphism between graded homologies, written on normal-form generators.
#[derive(Clone, Debug)]
pub struct HomologyMap {
    pub ring: Ring,
    pub degree_shift: i64,
    pub source: GradedHomology,
    pub target: GradedHomology,
    pub matrices: BTreeMap<i64, RatMatrix>,
    pub injective: BTreeMap<i64, bool>,
    pub surjective: BTreeMap<i64, bool>,
}

impl HomologyMap {
    fn assemble(
        source: GradedHomology,
        target: GradedHomology,
        degree_shift: i64,
        matrices: BTreeMap<i64, RatMatrix>,
    ) -> Self {
        let ring = source.ring;
        let mut injective = BTreeMap::new();
        let mut surjective = BTreeMap::new();
        for (d, m) in &matrices {
            let (i, s) = map_verdicts(
                ring,
                m,
                &source.degrees[d].orders(),
                &target.degrees[&(d + degree_shift)].orders(),
            );
            injective.insert(*d, i);
            surjective.insert(*d, s);
        }
        HomologyMap {
            ring,
            degree_shift,
            source,
            target,
            matrices,
            injective,
            surjective,
        }
    }

    pub fn matrix(&self, d: i64) -> Option<&RatMatrix> {
        self.matrices.get(&d)
    }

    pub fn is_iso(&self, d: i64) -> bool {
        self.injective.get(&d).copied().unwrap_or(false)
            && self.surjective.get(&d).copied().unwrap_or(false)
    }

    /// `after` composed with `self`, on the degrees where both are defined.
    pub fn then(&self, after: &HomologyMap) -> Result<HomologyMap> {
        let mut matrices = BTreeMap::new();
        for (d, f) in &self.matrices {
            let Some(g) = after.matrix(d + self.degree_shift) else {
                continue;
            };
            let orders =
                after.target.degrees[&(d + self.degree_shift + after.degree_shift)].orders();
            matrices.insert(*d, reduce_rows(&g.checked_mul(f)?, &orders, self.ring));
        }
        Ok(HomologyMap::assemble(
            self.source.clone(),
            after.target.clone(),
            self.degree_shift + after.degree_shift,
            matrices,
        ))
    }
}

/// Reduces integral rows modulo the cyclic orders of the target (no-op over Q).
pub fn reduce_rows(m: &RatMatrix, orders: &[BigInt], ring: Ring) -> RatMatrix {
    match ring {
        Ring::Rat => m.clone(),
        Ring::Int => RatMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            BigRational::from_integer(reduce_mod(&m.get(i, j).to_integer(), &orders[i]))
        }),
    }
}

/// The map on homology induced by a chain map, after checking it commutes with both boundaries.
pub fn induced_map(
    f: &ChainMap,
    from: &ChainComplex,
    to: &ChainComplex,
    source: &GradedHomology,
    target: &GradedHomology,
) -> Result<HomologyMap> {
    f.verify(from, to)?;
    let mut matrices = BTreeMap::new();
    for (d, hs) in &source.degrees {
        let (Some(ht), Some(m)) = (target.degrees.get(&(d + f.degree_shift)), f.matrix(*d)) else {
            continue;
        };
        matrices.insert(*d, induced_matrix(m, hs, ht)?);
    }
    Ok(HomologyMap::assemble(
        source.clone(),
        target.clone(),
        f.degree_shift,
        matrices,
    ))
}

fn same_a(x: &WindowComplex, y: &WindowComplex) -> bool {
    x.spec.a_mu_level == y.spec.a_mu_level && x.spec.mu_ceiling == y.spec.mu_ceiling
}

/// `Hi`: the map induced by enlarging the action bound at fixed `a`.
pub fn induced_inclusion(
    small: &WindowComplex,
    large: &WindowComplex,
    ring: Ring,
) -> Result<HomologyMap> {
    let ordered = match (&small.spec.b_action, &large.spec.b_action) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(b1), Some(b2)) => b1 <= b2,
    };
    if !same_a(small, large) || !ordered {
        return Err(Error::WindowMismatch(format!(
            "not an inclusion: {} into {}",
            small.spec, large.spec
        )));
    }
    induced_between(small, large, ring)
}

/// `Hp`: the map induced by raising the A^mu cut at fixed `b`.
pub fn induced_projection(
    deep: &WindowComplex,
    shallow: &WindowComplex,
    ring: Ring,
) -> Result<HomologyMap> {
    let ordered = match (deep.spec.a_mu_level, shallow.spec.a_mu_level) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a1), Some(a2)) => a1 <= a2,
    };
    if deep.spec.b_action != shallow.spec.b_action
        || deep.spec.mu_ceiling != shallow.spec.mu_ceiling
        || !ordered
    {
        return Err(Error::WindowMismatch(format!(
            "not a projection: {} onto {}",
            deep.spec, shallow.spec
        )));
    }
    induced_between(deep, shallow, ring)
}

/// Map induced by sending each generator to itself or to zero (any composite of inclusions and projections).
pub fn induced_between(
    from: &WindowComplex,
    to: &WindowComplex,
    ring: Ring,
) -> Result<HomologyMap> {
    let f = identity_on_generators(from, to)?;
    induced_map(
        &f,
        &from.chain,
        &to.chain,
        &homology(from, ring)?,
        &homology(to, ring)?,
    )
}

/// Position in a long exact sequence `... -> H(A) -> H(B) -> H(C) -> H(A) -> ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Node {
    Sub,
    Total,
    Quotient,
}

#[derive(Clone, Debug)]
pub struct LesReport {
    pub sub: GradedHomology,
    pub total: GradedHomology,
    pub quotient: GradedHomology,
    /// `connecting[d]` maps `H_d(C)` to `H_{d-1}(A)`.
    pub connecting: BTreeMap<i64, RatMatrix>,
    pub nodes: Vec<(i64, Node, bool)>,
}

impl LesReport {
    pub fn is_exact(&self) -> bool {
        self.nodes.iter().all(|n| n.2)
    }
}

/// Checks `0 -> A --inc--> B --proj--> C -> 0` degreewise and verifies exactness of the long
/// exact sequence in homology over Q at every node whose neighbours lie in the window.
pub fn les_check(
    a: &ChainComplex,
    b: &ChainComplex,
    c: &ChainComplex,
    inc: &ChainMap,
    proj: &ChainMap,
) -> Result<LesReport> {
    inc.verify(a, b)?;
    proj.verify(b, c)?;
    let zero = |r: usize, s: usize| IntMatrix::zeros(r, s);
    for d in b.stored_degrees() {
        let i = inc
            .matrix(d)
            .cloned()
            .unwrap_or_else(|| zero(b.rank(d), a.rank(d)))
            .to_rational();
        let p = proj
            .matrix(d)
            .cloned()
            .unwrap_or_else(|| zero(c.rank(d), b.rank(d)))
            .to_rational();
        let fail = |reason: &str| {
            Err(Error::NotExactAtChainLevel {
                degree: d,
                reason: reason.into(),
            })
        };
        if !(&p * &i).is_zero() {
            return fail("composite is nonzero");
        }
        if rank(&i) != a.rank(d) {
            return fail("first map is not injective");
        }
        if rank(&p) != c.rank(d) {
            return fail("second map is not surjective");
        }
        if a.rank(d) + c.rank(d) != b.rank(d) {
            return fail("ranks do not add up");
        }
    }
    let ring = Ring::Rat;
    let (ha, hb, hc) = (
        chain_homology(a, ring)?,
        chain_homology(b, ring)?,
        chain_homology(c, ring)?,
    );
    let i_star = induced_map(inc, a, b, &ha, &hb)?;
    let p_star = induced_map(proj, b, c, &hb, &hc)?;

    let mut connecting = BTreeMap::new();
    for d in b.d_lo + 1..=b.d_hi {
        let (hc_d, ha_lo) = (&hc.degrees[&d], &ha.degrees[&(d - 1)]);
        let p = proj.matrix(d).expect("stored").to_rational();
        let i = inc.matrix(d - 1).expect("stored").to_rational();
        let db = b.boundary(d).to_rational();
        let mut cols = Vec::new();
        for z in &hc_d.representatives {
            let lift = solve(&p, &to_rational_vec(z)).expect("projection is surjective");
            let y =
                solve(&i, &db.mul_vec(&lift)).expect("boundary of a lift lies in the subcomplex");
            cols.push(ha_lo.class_of(&y)?);
        }
        connecting.insert(d, RatMatrix::from_columns(&cols, ha_lo.generator_count())?);
    }

    let dims = |h: &GradedHomology, d: i64| h.degrees[&d].generator_count();
    let exact_at = |f: &RatMatrix, g: &RatMatrix, middle: usize| {
        g.checked_mul(f).map(|m| m.is_zero()).unwrap_or(false) && rank(f) + rank(g) == middle
    };
    let mut nodes = Vec::new();
    for d in b.d_lo..=b.d_hi {
        nodes.push((
            d,
            Node::Total,
            exact_at(&i_star.matrices[&d], &p_star.matrices[&d], dims(&hb, d)),
        ));
        if let Some(delta) = connecting.get(&d) {
            nodes.push((
                d,
                Node::Quotient,
                exact_at(&p_star.matrices[&d], delta, dims(&hc, d)),
            ));
        }
        if let Some(delta) = connecting.get(&(d + 1)) {
            nodes.push((
                d,
                Node::Sub,
                exact_at(delta, &i_star.matrices[&d], dims(&ha, d)),
            ));
        }
    }
    Ok(LesReport {
        sub: ha,
        total: hb,
        quotient: hc,
        connecting,
        nodes,
    })
}

pub fn is_zero_map(m: &HomologyMap) -> bool {
    m.matrices.values().all(RatMatrix::is_zero)
}
