//! The four Tate groups in each degree and the canonical maps `rho`, `kappa`, `sigma`, `Hk`.
//!
//! Per degree every window is finite, so the limits in `a` and `b` are reached at chain
//! level: the deepest `a` needed is the lowest level among generators in the degree, and
//! `b = infinity` is the end of the `b` direction. The horizon (how many orbits the model
//! carries) is the one direction that does not stop; it is probed separately.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tower::{direct_limit, Direction, LimitValue, StableImage, Tower};
use crate::algebra::lattice::integer_kernel;
use crate::algebra::{map_verdicts, FgAbGroup, RatMatrix, Ring};
use crate::catalog::{ExampleBundle, Family, GroupValue};
use crate::complex::{
    identity_on_generators, instantiate_window, ChainMap, TruncationSpec, WindowComplex,
};
use crate::error::{Error, Result};
use crate::homology::{homology, induced_map, reduce_rows, GradedHomology, HomologyMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagramParams {
    /// Initial number of `a` steps below the reference level in the Goodwillie tower.
    pub depth: usize,
    /// Deepest tower tried before a corner is reported undecided.
    pub max_depth: usize,
    /// Lowest `a` the caller allows; a degree needing a deeper cut is `GridTooSmall`.
    pub a_floor: Option<i64>,
    /// Largest horizon built while waiting for chain groups to stabilize.
    pub max_probe_horizon: usize,
    /// Horizons for the top-row tower; empty means the base horizon and two steps of two.
    pub horizon_probes: Vec<usize>,
}

impl Default for DiagramParams {
    fn default() -> Self {
        DiagramParams {
            depth: 3,
            max_depth: 10,
            a_floor: None,
            max_probe_horizon: 80,
            horizon_probes: Vec::new(),
        }
    }
}

/// A homomorphism with its verdicts; `None` verdicts are undecided.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MapReport {
    pub matrix: Option<RatMatrix>,
    pub injective: Option<bool>,
    pub surjective: Option<bool>,
}

impl MapReport {
    fn new(ring: Ring, m: RatMatrix, source: &FgAbGroup, target: &FgAbGroup) -> Self {
        let (i, s) = map_verdicts(ring, &m, &source.orders(), &target.orders());
        MapReport {
            matrix: Some(m),
            injective: Some(i),
            surjective: Some(s),
        }
    }

    fn undecided() -> Self {
        MapReport {
            matrix: None,
            injective: None,
            surjective: None,
        }
    }

    pub fn is_iso(&self) -> Option<bool> {
        Some(self.injective? && self.surjective?)
    }

    pub fn verdict(&self) -> &'static str {
        match (self.injective, self.surjective) {
            (Some(true), Some(true)) => "iso",
            (Some(true), Some(false)) => "injective",
            (Some(false), Some(true)) => "surjective",
            (Some(false), Some(false)) => "neither",
            _ => "undecided",
        }
    }
}

/// How the top row behaves as the horizon grows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum HorizonBehaviour {
    /// The example has no horizon parameter.
    HorizonFree,
    /// Every probed horizon step is an isomorphism.
    Stable {
        probes: Vec<usize>,
    },
    /// Steps multiply by the family's weights; the corner is the colimit.
    Colimit {
        probes: Vec<usize>,
        multipliers: Vec<BigInt>,
    },
    Unstable {
        probes: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeDiagram {
    pub degree: i64,
    /// `H(lim_b lim_a CT)`, top left.
    pub chain_direct_inverse: LimitValue,
    /// `lim_b lim_a HT`, top right.
    pub jones_petrack: LimitValue,
    /// `H(lim_a lim_b CT)`, bottom left.
    pub chain_inverse_direct: LimitValue,
    /// `lim_a lim_b HT`, bottom right.
    pub goodwillie: LimitValue,
    /// Maps at the base horizon: top left to top right.
    pub rho: MapReport,
    /// Top right to bottom right.
    pub kappa: MapReport,
    /// Bottom left to bottom right.
    pub sigma: MapReport,
    /// Top left to bottom left.
    pub hk: MapReport,
    pub square_commutes: Option<bool>,
    pub top_row: HorizonBehaviour,
    /// Lowest level among generators in the degree at the base horizon.
    pub a_bottom: i64,
    pub depth_used: usize,
    /// Horizon at which the bottom row's chain groups were stable.
    pub probe_horizon: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TateDiagram {
    pub name: String,
    pub ring: Ring,
    pub horizon: usize,
    pub degrees: BTreeMap<i64, DegreeDiagram>,
    pub violations: Vec<String>,
}

fn full_spec(d: i64) -> TruncationSpec {
    TruncationSpec::full(d, d + 1)
}

fn lowest_level(w: &WindowComplex) -> Option<i64> {
    w.chain
        .stored_degrees()
        .flat_map(|d| w.chain.generators(d).iter().map(|k| w.mu_of(*k)))
        .min()
}

fn generator_ids(w: &WindowComplex) -> Vec<Vec<(String, i64)>> {
    w.chain
        .stored_degrees()
        .map(|d| {
            let mut ids: Vec<(String, i64)> = w
                .chain
                .generators(d)
                .iter()
                .map(|k| (w.key_id(*k).to_string(), k.shift))
                .collect();
            ids.sort();
            ids
        })
        .collect()
}

fn induced(
    f: &ChainMap,
    from: (&WindowComplex, &GradedHomology),
    to: (&WindowComplex, &GradedHomology),
) -> Result<HomologyMap> {
    induced_map(f, &from.0.chain, &to.0.chain, from.1, to.1)
}

/// The smallest horizon from which the window at `spec` stops changing.
fn probe_horizon(
    bundle: &ExampleBundle,
    spec: &TruncationSpec,
    params: &DiagramParams,
) -> Result<usize> {
    if !bundle.family.has_horizon() {
        return Ok(bundle.horizon);
    }
    let ids = |k: usize| -> Result<Vec<Vec<(String, i64)>>> {
        Ok(generator_ids(&instantiate_window(
            &bundle.at_horizon(k)?,
            spec,
        )?))
    };
    let mut k = bundle.horizon;
    let mut current = ids(k)?;
    while k + 2 <= params.max_probe_horizon {
        if current == ids(k + 2)? {
            return Ok(k);
        }
        k += 1;
        current = ids(k)?;
    }
    Err(Error::GridTooSmall(format!(
        "window {spec} still changes at horizon {}",
        params.max_probe_horizon
    )))
}

/// Column `j` holds the class of `f` applied to the `j`-th generator of `from`, in `to`.
fn classes_of_images(
    f: &ChainMap,
    from: &GradedHomology,
    to: &GradedHomology,
    d: i64,
) -> Result<RatMatrix> {
    let m = f.matrix(d).expect("degree stored");
    let (hs, ht) = (&from.degrees[&d], &to.degrees[&d]);
    let cols: Result<Vec<_>> = hs
        .representatives
        .iter()
        .map(|z| ht.class_of_int(&m.mul_vec(z)))
        .collect();
    RatMatrix::from_columns(&cols?, ht.generator_count())
}

fn coordinates_in(s: &StableImage, m: &RatMatrix) -> Option<RatMatrix> {
    let cols: Option<Vec<_>> = m.columns().iter().map(|c| s.coordinates(c)).collect();
    RatMatrix::from_columns(&cols?, s.group.generator_count()).ok()
}

struct TopRow {
    chain_direct_inverse: LimitValue,
    jones_petrack: LimitValue,
    behaviour: HorizonBehaviour,
}

fn probes_for(bundle: &ExampleBundle, params: &DiagramParams) -> Vec<usize> {
    let mut probes = if params.horizon_probes.is_empty() {
        vec![bundle.horizon, bundle.horizon + 2, bundle.horizon + 4]
    } else {
        params.horizon_probes.clone()
    };
    probes.sort_unstable();
    probes.dedup();
    probes
}

/// A horizon's full window and its cut at the lowest level, with homologies.
type Level = (WindowComplex, GradedHomology, WindowComplex, GradedHomology);

/// Top-row groups over the horizon: the full window (top left) and the deepest needed cut
/// (top right) at each probe, joined by the inclusions of smaller horizons.
fn top_row(bundle: &ExampleBundle, ring: Ring, d: i64, params: &DiagramParams) -> Result<TopRow> {
    let base = |w: &WindowComplex| -> Result<FgAbGroup> { Ok(homology(w, ring)?.group(d)) };
    if !bundle.family.has_horizon() {
        let c = bundle.at_horizon(bundle.horizon)?;
        let full = instantiate_window(&c, &full_spec(d))?;
        let g = base(&full)?;
        return Ok(TopRow {
            chain_direct_inverse: LimitValue::group(g.clone()),
            jones_petrack: LimitValue::group(g),
            behaviour: HorizonBehaviour::HorizonFree,
        });
    }
    let probes = probes_for(bundle, params);
    let levels: Vec<(WindowComplex, GradedHomology, WindowComplex, GradedHomology)> = probes
        .par_iter()
        .map(|&k| {
            let c = bundle.at_horizon(k)?;
            let full = instantiate_window(&c, &full_spec(d))?;
            let a = lowest_level(&full).unwrap_or(0);
            let cut = instantiate_window(&c, &full_spec(d).with_a(a))?;
            let (hf, hc) = (homology(&full, ring)?, homology(&cut, ring)?);
            Ok((full, hf, cut, hc))
        })
        .collect::<Result<_>>()?;
    let tower = |pick: &dyn Fn(&Level) -> (&WindowComplex, &GradedHomology)| -> Result<Tower> {
        let groups = levels.iter().map(|l| pick(l).1.group(d)).collect();
        let maps: Result<Vec<RatMatrix>> = levels
            .windows(2)
            .map(|pair| {
                let (from, to) = (pick(&pair[0]), pick(&pair[1]));
                let f = identity_on_generators(from.0, to.0)?;
                Ok(induced(&f, from, to)?.matrices[&d].clone())
            })
            .collect();
        let t = Tower::new(ring, Direction::ToDirectLimit, groups, maps?)?;
        Ok(match bundle.family.horizon_sequence() {
            Some(seq) => t.with_scaling(seq, probes.clone()),
            None => t,
        })
    };
    let left = tower(&|l| (&l.0, &l.1))?;
    let right = tower(&|l| (&l.2, &l.3))?;
    let (chain_direct_inverse, jones_petrack) = (direct_limit(&left), direct_limit(&right));
    let behaviour = match &jones_petrack {
        LimitValue::Colimit { .. } => HorizonBehaviour::Colimit {
            probes: probes.clone(),
            multipliers: right
                .maps
                .iter()
                .map(|m| m.get(0, 0).to_integer())
                .collect(),
        },
        _ if (0..right.maps.len()).all(|i| right.transition_is_iso(i)) => {
            HorizonBehaviour::Stable {
                probes: probes.clone(),
            }
        }
        _ => HorizonBehaviour::Unstable {
            probes: probes.clone(),
        },
    };
    Ok(TopRow {
        chain_direct_inverse,
        jones_petrack,
        behaviour,
    })
}

/// The bottom row at a probe horizon: windows `C_a` for `a` from `a_ref - depth` to `a_ref`.
struct BottomTower {
    windows: Vec<WindowComplex>,
    homologies: Vec<GradedHomology>,
    probe: usize,
}

impl BottomTower {
    fn build(
        bundle: &ExampleBundle,
        ring: Ring,
        d: i64,
        a_ref: i64,
        depth: usize,
        params: &DiagramParams,
    ) -> Result<Self> {
        let a_lo = a_ref - depth as i64;
        let probe = probe_horizon(bundle, &full_spec(d).with_a(a_lo), params)?;
        let c = bundle.at_horizon(probe)?;
        let built: Vec<(WindowComplex, GradedHomology)> = (0..=depth)
            .into_par_iter()
            .map(|i| {
                let w = instantiate_window(&c, &full_spec(d).with_a(a_ref - i as i64))?;
                let h = homology(&w, ring)?;
                Ok((w, h))
            })
            .collect::<Result<_>>()?;
        let (windows, homologies) = built.into_iter().unzip();
        Ok(BottomTower {
            windows,
            homologies,
            probe,
        })
    }

    /// Level `i` sits at `a_ref - i`.
    fn tower(&self, ring: Ring, degree: i64) -> Result<Tower> {
        let groups = self.homologies.iter().map(|h| h.group(degree)).collect();
        let maps: Result<Vec<RatMatrix>> = (0..self.windows.len() - 1)
            .map(|i| {
                let f = identity_on_generators(&self.windows[i + 1], &self.windows[i])?;
                let m = induced(
                    &f,
                    (&self.windows[i + 1], &self.homologies[i + 1]),
                    (&self.windows[i], &self.homologies[i]),
                )?;
                Ok(m.matrices[&degree].clone())
            })
            .collect();
        Tower::new(ring, Direction::ToInverseLimit, groups, maps?)
    }

    /// Chain-first image: cycles of the deepest window projected to the reference window.
    fn chain_image(&self, ring: Ring, d: i64) -> Result<StableImage> {
        let (deep, top) = (self.windows.last().expect("nonempty"), &self.windows[0]);
        let cycles = integer_kernel(&deep.chain.boundary(d));
        let p = identity_on_generators(deep, top)?;
        let projected = p.matrix(d).expect("degree stored") * &cycles;
        let target = &self.homologies[0].degrees[&d];
        let cols: Result<Vec<_>> = projected
            .columns()
            .iter()
            .map(|z| target.class_of_int(z))
            .collect();
        let m = RatMatrix::from_columns(&cols?, target.generator_count())?;
        Ok(StableImage::new(ring, &m, &target.group))
    }
}

fn degree_diagram(
    bundle: &ExampleBundle,
    ring: Ring,
    d: i64,
    params: &DiagramParams,
) -> Result<(DegreeDiagram, Vec<String>)> {
    let mut violations = Vec::new();
    let c = bundle.at_horizon(bundle.horizon)?;
    let full = instantiate_window(&c, &full_spec(d))?;
    let top_left = homology(&full, ring)?;
    let a_bottom = lowest_level(&full).unwrap_or(0);
    if let Some(floor) = params.a_floor {
        if a_bottom < floor {
            return Err(Error::GridTooSmall(format!(
                "degree {d} needs a = {a_bottom}, below the floor {floor}"
            )));
        }
    }
    let cut = instantiate_window(&c, &full_spec(d).with_a(a_bottom))?;
    let deeper = instantiate_window(&c, &full_spec(d).with_a(a_bottom - 1))?;
    if generator_ids(&cut) != generator_ids(&deeper) {
        return Err(Error::GridTooSmall(format!(
            "chain groups of degree {d} still change below a = {a_bottom}"
        )));
    }
    let top_right = homology(&cut, ring)?;
    let rho_map = induced(
        &identity_on_generators(&full, &cut)?,
        (&full, &top_left),
        (&cut, &top_right),
    )?;
    let rho = MapReport::new(
        ring,
        rho_map.matrices[&d].clone(),
        &top_left.group(d),
        &top_right.group(d),
    );

    let row = top_row(bundle, ring, d, params)?;

    let a_ref = a_bottom;
    let mut depth = params.depth.max(2);
    let (bottom, stable) = loop {
        let bottom = BottomTower::build(bundle, ring, d, a_ref, depth, params)?;
        match bottom.tower(ring, d)?.stable_image() {
            Ok(s) => break (bottom, Ok(s)),
            Err(reason) if depth >= params.max_depth => break (bottom, Err(reason)),
            Err(_) => depth += 1,
        }
    };
    let reference = (&bottom.windows[0], &bottom.homologies[0]);

    let (goodwillie, chain_inverse_direct, kappa, sigma, hk, square) = match stable {
        Err(reason) => (
            LimitValue::Undecided {
                reason: reason.clone(),
            },
            LimitValue::Undecided { reason },
            MapReport::undecided(),
            MapReport::undecided(),
            MapReport::undecided(),
            None,
        ),
        Ok(s) => {
            let chain = bottom.chain_image(ring, d)?;
            if !chain.same_as(&s) {
                violations.push(format!(
                    "degree {d}: chain-level and homology-level stable images differ"
                ));
            }
            let lim1_vanishes =
                ring.is_field() || bottom.tower(ring, d + 1)?.stable_image().is_ok();
            let chain_corner = if lim1_vanishes {
                LimitValue::group(chain.group.clone())
            } else {
                LimitValue::Undecided {
                    reason: format!("Mittag-Leffler fails in degree {}", d + 1),
                }
            };
            let sigma = match coordinates_in(&s, &chain.basis) {
                Some(m) if lim1_vanishes => MapReport::new(ring, m, &chain.group, &s.group),
                _ => MapReport::undecided(),
            };
            let into_s = |from: &WindowComplex,
                          h: &GradedHomology,
                          target: &StableImage|
             -> Result<Option<RatMatrix>> {
                let f = identity_on_generators(from, reference.0)?;
                Ok(coordinates_in(
                    target,
                    &classes_of_images(&f, h, reference.1, d)?,
                ))
            };
            let kappa = match into_s(&cut, &top_right, &s)? {
                Some(m) => MapReport::new(ring, m, &top_right.group(d), &s.group),
                None => {
                    violations.push(format!(
                        "degree {d}: image of the top right corner leaves the stable image"
                    ));
                    MapReport::undecided()
                }
            };
            let hk = match into_s(&full, &top_left, &chain)? {
                Some(m) if lim1_vanishes => {
                    MapReport::new(ring, m, &top_left.group(d), &chain.group)
                }
                Some(_) => MapReport::undecided(),
                None => {
                    violations.push(format!(
                        "degree {d}: image of the top left corner leaves the chain-level limit"
                    ));
                    MapReport::undecided()
                }
            };
            let square = match (&kappa.matrix, &rho.matrix, &sigma.matrix, &hk.matrix) {
                (Some(k), Some(r), Some(sg), Some(h)) => {
                    let orders = s.group.orders();
                    Some(
                        reduce_rows(&(k * r), &orders, ring)
                            == reduce_rows(&(sg * h), &orders, ring),
                    )
                }
                _ => None,
            };
            (
                LimitValue::group(s.group.clone()),
                chain_corner,
                kappa,
                sigma,
                hk,
                square,
            )
        }
    };

    if ring.is_field() {
        if rho.is_iso() != Some(true) {
            violations.push(format!(
                "degree {d}: rho is not an isomorphism over a field"
            ));
        }
        if square != Some(true) {
            violations.push(format!(
                "degree {d}: the square does not commute over a field"
            ));
        }
    }
    if sigma.surjective == Some(false) {
        violations.push(format!("degree {d}: sigma is not surjective"));
    }
    let diagram = DegreeDiagram {
        degree: d,
        chain_direct_inverse: row.chain_direct_inverse,
        jones_petrack: row.jones_petrack,
        chain_inverse_direct,
        goodwillie,
        rho,
        kappa,
        sigma,
        hk,
        square_commutes: square,
        top_row: row.behaviour,
        a_bottom,
        depth_used: depth,
        probe_horizon: bottom.probe,
    };
    Ok((diagram, violations))
}

/// All four groups and the canonical maps in every degree of the window.
pub fn four_tate_groups(
    bundle: &ExampleBundle,
    ring: Ring,
    degree_window: (i64, i64),
    params: &DiagramParams,
) -> Result<TateDiagram> {
    if matches!(bundle.family, Family::Torus { .. }) && ring == Ring::Int {
        return Err(Error::RequiresRationalCoefficients);
    }
    let (lo, hi) = degree_window;
    if lo > hi {
        return Err(Error::BadParams(format!(
            "empty degree window [{lo}, {hi}]"
        )));
    }
    let per_degree: Vec<(DegreeDiagram, Vec<String>)> = (lo..=hi)
        .into_par_iter()
        .map(|d| degree_diagram(bundle, ring, d, params))
        .collect::<Result<_>>()?;
    let mut degrees = BTreeMap::new();
    let mut violations = Vec::new();
    for (diagram, v) in per_degree {
        violations.extend(v);
        degrees.insert(diagram.degree, diagram);
    }
    Ok(TateDiagram {
        name: bundle.name.clone(),
        ring,
        horizon: bundle.horizon,
        degrees,
        violations,
    })
}

/// Per-degree surjectivity of `sigma`, read off its matrix.
pub fn sigma_surjectivity(diagram: &TateDiagram) -> BTreeMap<i64, Option<bool>> {
    diagram
        .degrees
        .iter()
        .map(|(d, g)| (*d, g.sigma.surjective))
        .collect()
}

/// Whether a computed corner agrees with an expected one.
pub fn corner_matches(found: &LimitValue, expected: &GroupValue) -> bool {
    match (found, expected) {
        (LimitValue::Group { group }, GroupValue::Group { group: e }) => group == e,
        (LimitValue::Colimit { criterion, .. }, GroupValue::Rationals) => criterion.holds(),
        _ => false,
    }
}

impl DegreeDiagram {
    pub fn corners(&self) -> [&LimitValue; 4] {
        [
            &self.chain_direct_inverse,
            &self.jones_petrack,
            &self.chain_inverse_direct,
            &self.goodwillie,
        ]
    }

    pub fn maps(&self) -> [&MapReport; 4] {
        [&self.rho, &self.kappa, &self.sigma, &self.hk]
    }

    /// Same groups and verdicts; the u-isomorphism carries one onto the other.
    pub fn same_shape(&self, other: &DegreeDiagram) -> bool {
        self.corners() == other.corners()
            && self
                .maps()
                .iter()
                .zip(other.maps())
                .all(|(a, b)| (a.injective, a.surjective) == (b.injective, b.surjective))
            && self.square_commutes == other.square_commutes
    }
}

impl TateDiagram {
    /// Degrees `d` whose diagram differs in shape from the one in degree `d + 2`.
    pub fn u_periodicity_failures(&self) -> Vec<i64> {
        self.degrees
            .iter()
            .filter_map(|(d, g)| {
                self.degrees
                    .get(&(d + 2))
                    .filter(|h| !g.same_shape(h))
                    .map(|_| *d)
            })
            .collect()
    }

    /// Degrees where a corner disagrees with the bundle's expectations for this ring.
    pub fn mismatches(&self, bundle: &ExampleBundle) -> Vec<i64> {
        bundle
            .diagram_expectations(self.ring)
            .filter_map(|(d, e)| {
                let g = self.degrees.get(&d)?;
                let expected = [
                    &e.chain_direct_inverse,
                    &e.jones_petrack,
                    &e.chain_inverse_direct,
                    &e.goodwillie,
                ];
                let ok = g
                    .corners()
                    .iter()
                    .zip(expected)
                    .all(|(f, x)| corner_matches(f, x));
                (!ok).then_some(d)
            })
            .collect()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} over {} (horizon {})",
            self.name, self.ring, self.horizon
        );
        let _ = writeln!(
            out,
            "{:>4}  {:<12} {:<12} {:<12} {:<12} {:<11} {:<11} {:<11} {:<11} square",
            "deg",
            "H(dir inv C)",
            "JP",
            "H(inv dir C)",
            "Goodwillie",
            "rho",
            "kappa",
            "sigma",
            "Hk"
        );
        for (d, g) in &self.degrees {
            let r = |v: &LimitValue| v.render(self.ring);
            let square = match g.square_commutes {
                Some(true) => "commutes",
                Some(false) => "fails",
                None => "undecided",
            };
            let _ = writeln!(
                out,
                "{d:>4}  {:<12} {:<12} {:<12} {:<12} {:<11} {:<11} {:<11} {:<11} {square}",
                r(&g.chain_direct_inverse),
                r(&g.jones_petrack),
                r(&g.chain_inverse_direct),
                r(&g.goodwillie),
                g.rho.verdict(),
                g.kappa.verdict(),
                g.sigma.verdict(),
                g.hk.verdict(),
            );
        }
        for v in &self.violations {
            let _ = writeln!(out, "violation: {v}");
        }
        out
    }
}
