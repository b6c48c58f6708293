//! Reports: one self-describing document per run, rendered as text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tate_core::algebra::FgAbGroup;
use tate_core::catalog::XnRankReport;
use tate_core::complex::TruncationSpec;
use tate_core::flows::{ConvergenceFit, HeatReport};
use tate_core::presentations::{PhiReport, RationalsCriterion};
use tate_core::tate::{BackwardsSummary, LimitValue, LocalizedModule, TateDiagram};

use crate::config::{Format, GroupKind, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TowerDegree {
    pub degree: i64,
    /// Limit along `b`, one per `a` level.
    pub direct: Vec<LimitValue>,
    /// Limit along decreasing `a`, one per `b` value.
    pub inverse: Vec<LimitValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IsoSummary {
    pub horizon: usize,
    pub relations_respected: bool,
    pub surjective_on_targets: bool,
    /// `Some` when the map could not be built.
    pub failure: Option<String>,
}

// externally tagged: integer map keys inside do not survive serde's buffered tag handling
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Body {
    Diagram {
        diagram: TateDiagram,
        mismatches: Vec<i64>,
        periodicity_failures: Vec<i64>,
        horizon_notes: BTreeMap<i64, String>,
    },
    Homology {
        spec: TruncationSpec,
        groups: BTreeMap<i64, FgAbGroup>,
    },
    Localize {
        a: i64,
        module: LocalizedModule,
    },
    Towers {
        a_levels: Vec<i64>,
        b_labels: Vec<String>,
        degrees: Vec<TowerDegree>,
        square_failures: Vec<(usize, usize, i64)>,
    },
    Backwards {
        a: i64,
        summary: Vec<BackwardsSummary>,
        les_exact: bool,
        rho_iso: [bool; 2],
    },
    Heat {
        report: HeatReport,
        convergence: ConvergenceFit,
    },
    Rabinowitz {
        from: i64,
        to: i64,
        angle: f64,
        start_action: f64,
        end_action: f64,
        closest_distance: f64,
        samples: usize,
    },
    GroupQa {
        sequence: String,
        terms: Vec<u64>,
        prime_expansion: Vec<u64>,
        criterion: RationalsCriterion,
        group: GroupKind,
        phi: Option<PhiReport>,
        iso: Option<IsoSummary>,
    },
    XnReport {
        rows: Vec<XnRankReport>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub config: RunConfig,
    /// Tags of the reference values the run was compared against.
    pub provenance: Vec<String>,
    pub checks: Vec<Check>,
    pub body: Body,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn emit(&self) -> String {
        match self.config.format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let ring = self.config.ring;
        match &self.body {
            Body::Diagram {
                diagram,
                horizon_notes,
                ..
            } => {
                out.push_str(&diagram.render_table());
                for (d, note) in horizon_notes {
                    let _ = writeln!(out, "horizon, degree {d}: {note}");
                }
            }
            Body::Homology { groups, .. } => {
                for (d, g) in groups {
                    let _ = writeln!(out, "H_{d} = {}", g.render(ring));
                }
            }
            Body::Localize { a, module } => {
                let _ = writeln!(out, "eventual image of the Euler action, cut a = {a}");
                for (d, x) in &module.degrees {
                    let dim = x
                        .dimension
                        .map_or("undecided".to_string(), |n| n.to_string());
                    let _ = writeln!(out, "{d:>4}  dim {dim}");
                }
            }
            Body::Towers {
                a_levels,
                b_labels,
                degrees,
                ..
            } => {
                for t in degrees {
                    let _ = writeln!(out, "degree {}", t.degree);
                    for (a, v) in a_levels.iter().zip(&t.direct) {
                        let _ = writeln!(out, "  a = {a:>3}: lim_b = {}", v.render(ring));
                    }
                    for (b, v) in b_labels.iter().zip(&t.inverse) {
                        let _ = writeln!(out, "  b = {b:>3}: lim_a = {}", v.render(ring));
                    }
                }
            }
            Body::Backwards { a, summary, .. } => {
                let _ = writeln!(out, "cut a = {a}");
                let _ = writeln!(
                    out,
                    "{:>4}  {:<12} {:<12} {:<12}",
                    "deg", "negative", "total", "nonnegative"
                );
                for s in summary {
                    let _ = writeln!(
                        out,
                        "{:>4}  {:<12} {:<12} {:<12}",
                        s.degree,
                        s.backwards.render(ring),
                        s.total.render(ring),
                        s.nonnegative.render(ring)
                    );
                }
            }
            Body::Heat {
                report,
                convergence,
            } => {
                let _ = writeln!(out, "x0 = {}", report.x0);
                let _ = writeln!(
                    out,
                    "max relative error vs closed form: {:.3e}",
                    report.max_relative_error
                );
                let _ = writeln!(out, "final x: {:.12}", report.final_x);
                let end = match report.pole {
                    0 => "stationary on the equator".to_string(),
                    p => format!("tends to the pole x = {p}"),
                };
                let _ = writeln!(out, "limit: {end}");
                for (n, r) in &convergence.samples {
                    let _ = writeln!(out, "residual on {n}x{n} grid: {r:.3e}");
                }
                let _ = writeln!(out, "fitted order: {:.3}", convergence.order);
            }
            Body::Rabinowitz {
                from,
                to,
                angle,
                start_action,
                end_action,
                closest_distance,
                samples,
            } => {
                let _ = writeln!(out, "connecting orbit from mode {from} to mode {to}");
                let _ = writeln!(out, "launch angle: {angle:.12}");
                let _ = writeln!(out, "action at start: {start_action:.12}");
                let _ = writeln!(out, "action at closest approach: {end_action:.12}");
                let _ = writeln!(
                    out,
                    "closest distance to target circle: {closest_distance:.3e}"
                );
                let _ = writeln!(out, "samples: {samples}");
            }
            Body::GroupQa {
                sequence,
                terms,
                prime_expansion,
                criterion,
                group,
                phi,
                iso,
            } => {
                let _ = writeln!(out, "sequence {sequence}: {terms:?}");
                let _ = writeln!(out, "prime expansion: {prime_expansion:?}");
                let _ = writeln!(
                    out,
                    "torsion-free: {}, rank: {}",
                    criterion.torsion_free, criterion.rank
                );
                let missing: Vec<u64> = criterion
                    .divisible_by
                    .iter()
                    .filter(|(_, d)| !d)
                    .map(|(p, _)| *p)
                    .collect();
                if missing.is_empty() {
                    let _ = writeln!(out, "divisible by every probed prime");
                } else {
                    let _ = writeln!(out, "not divisible by {missing:?}");
                }
                let verdict = match group {
                    GroupKind::Rationals => "isomorphic to Q",
                    GroupKind::Integers => "isomorphic to Z",
                    GroupKind::Other => "rank one, torsion-free, not isomorphic to Q or Z",
                };
                let _ = writeln!(out, "{verdict}");
                if let Some(p) = phi {
                    let _ = writeln!(
                        out,
                        "phi: {} ({} fractions)",
                        if p.all_pass() { "verified" } else { "FAILED" },
                        p.grid_size
                    );
                }
                if let Some(h) = iso {
                    let ok = h.relations_respected && h.surjective_on_targets;
                    let _ = writeln!(
                        out,
                        "h to the k+1 expansion up to {}: {}",
                        h.horizon,
                        if ok { "verified" } else { "FAILED" }
                    );
                }
            }
            Body::XnReport { rows } => {
                let _ = writeln!(
                    out,
                    "{:>3}  {:>6}  {:>10}  kappa",
                    "n", "total", "goodwillie"
                );
                for r in rows {
                    let verdict = match (r.kappa_injective, r.kappa_surjective) {
                        (Some(false), _) => "not injective",
                        (_, Some(false)) => "not surjective",
                        _ => "ranks agree",
                    };
                    let _ = writeln!(
                        out,
                        "{:>3}  {:>6}  {:>10}  {verdict}",
                        r.n, r.total_rank, r.goodwillie_rank
                    );
                }
            }
        }
        for c in &self.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(out, "[{mark}] {}", c.name);
            } else {
                let _ = writeln!(out, "[{mark}] {}: {}", c.name, c.detail);
            }
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "some checks failed"
            }
        );
        out
    }
}
