//! Command dispatch: build the configuration, run the engine, collect checks.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use tate_core::algebra::Ring;
use tate_core::catalog::{
    cn_complex, local_orbit, rabinowitz_c, rabinowitz_equivariant, t_star_s2, torus,
    xn_rank_report, ExampleBundle, Expected,
};
use tate_core::complex::format::parse_fraction;
use tate_core::complex::{complex_to_json, instantiate_window, parse_complex, TruncationSpec};
use tate_core::flows::{heat_flow_check, heteroclinic, residual_convergence};
use tate_core::homology::homology;
use tate_core::presentations::{
    iso_h, phi_report, prime_expand, rationals_criterion, IntSequence, SequenceRule,
};
use tate_core::tate::{
    backwards_split, build_grid, direct_limit, equivariant_module, four_tate_groups, inverse_limit,
    localize_module, DiagramParams, HorizonBehaviour,
};
use tate_core::{Error, Result};

use crate::config::{
    parse_a_list, parse_b_list, Cli, Command, ComplexArgs, ExampleName, FlowSystem, Format,
    GroupKind, RunConfig, Source,
};
use crate::report::{Body, Check, IsoSummary, Report, TowerDegree};

/// What a run prints: a report, or a raw complex document.
#[derive(Debug)]
pub enum Outcome {
    Report(Box<Report>),
    Document(String),
}

impl Outcome {
    pub fn emit(&self) -> String {
        match self {
            Outcome::Report(r) => r.emit(),
            Outcome::Document(d) => d.clone(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Report(r) => r.exit_code(),
            Outcome::Document(_) => 0,
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let f = cli.format;
    let report = match cli.command {
        Command::Diagram(args) => cmd_diagram(&configure("diagram", &args, f)?)?,
        Command::Homology {
            input,
            a,
            b,
            ceiling,
        } => {
            let cfg = configure("homology", &input, f)?;
            let mut spec = TruncationSpec::full(cfg.degree_window.0, cfg.degree_window.1);
            if let Some(a) = a {
                spec = spec.with_a(a);
            }
            if let Some(b) = b {
                spec = spec.with_b(parse_fraction(&b)?);
            }
            if let Some(c) = ceiling {
                spec = spec.with_ceiling(c);
            }
            cmd_homology(&cfg, spec)?
        }
        Command::Localize {
            input,
            a,
            probe_depth,
        } => cmd_localize(&configure("localize", &input, f)?, a, probe_depth)?,
        Command::Towers {
            input,
            a_list,
            b_list,
        } => {
            let mut cfg = RunConfig::from_complex_args("towers", &input, f)?;
            cfg.grid.a_levels = parse_a_list(&a_list)?;
            cfg.grid.b_values = parse_b_list(&b_list)?;
            cfg.validate()?;
            cmd_towers(&cfg)?
        }
        Command::Backwards { input, a } => cmd_backwards(&configure("backwards", &input, f)?, a)?,
        Command::Flow {
            system:
                FlowSystem::Heat {
                    x0,
                    s_min,
                    s_max,
                    tol,
                },
        } => {
            let cfg = RunConfig {
                tolerance: Some(tol),
                ..RunConfig::bare("flow heat", f)
            };
            cfg.validate()?;
            cmd_flow_heat(&cfg, x0, (s_min, s_max))?
        }
        Command::Flow {
            system: FlowSystem::Rabinowitz { modes, tol },
        } => {
            let cfg = RunConfig {
                tolerance: Some(tol),
                ..RunConfig::bare("flow rabinowitz", f)
            };
            cfg.validate()?;
            cmd_flow_rabinowitz(&cfg, modes[0], modes[1])?
        }
        Command::GroupQa {
            seq,
            depth,
            prime_bound,
            expect,
        } => {
            let cfg = RunConfig::bare("group-qa", f);
            cfg.validate()?;
            cmd_group_qa(&cfg, &seq, depth, prime_bound, expect)?
        }
        Command::XnReport { max_n } => {
            let cfg = RunConfig::bare("xn-report", f);
            cfg.validate()?;
            cmd_xn_report(&cfg, max_n)?
        }
        Command::Export(args) => {
            let cfg = configure("export", &args, f)?;
            return Ok(Outcome::Document(complex_to_json(&load(&cfg)?.complex)));
        }
    };
    Ok(Outcome::Report(Box::new(report)))
}

fn configure(command: &str, args: &ComplexArgs, format: Format) -> Result<RunConfig> {
    let cfg = RunConfig::from_complex_args(command, args, format)?;
    cfg.validate()?;
    Ok(cfg)
}

/// The example or file named by the configuration.
pub fn load(cfg: &RunConfig) -> Result<ExampleBundle> {
    match &cfg.source {
        Source::Example {
            name,
            n,
            weights,
            covering,
            good,
            shift,
            class_bound,
        } => match name {
            ExampleName::Cn => cn_complex(*n, cfg.horizon),
            ExampleName::TStarS2 => t_star_s2(cfg.horizon, weights.clone()),
            ExampleName::Rabinowitz => rabinowitz_c(),
            ExampleName::RabinowitzEquivariant => rabinowitz_equivariant(),
            ExampleName::Orbit => local_orbit(*covering, *good, *shift),
            ExampleName::Torus => torus(*n, *class_bound, cfg.ring),
        },
        Source::File { path } => {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            let name = std::path::Path::new(path)
                .file_stem()
                .map_or("file".into(), |s| s.to_string_lossy().into_owned());
            Ok(ExampleBundle::from_complex(&name, parse_complex(&text)?))
        }
        Source::None => Err(Error::BadParams("this command needs a complex".into())),
    }
}

fn tags(bundle: &ExampleBundle, ring: Ring) -> Vec<String> {
    let set: BTreeSet<String> = bundle
        .expected
        .iter()
        .filter(|e| e.ring == ring)
        .map(|e| e.tag.clone())
        .collect();
    set.into_iter().collect()
}

fn horizon_note(b: &HorizonBehaviour) -> String {
    match b {
        HorizonBehaviour::HorizonFree => "no horizon parameter".into(),
        HorizonBehaviour::Stable { probes } => format!("top row stable over horizons {probes:?}"),
        HorizonBehaviour::Colimit {
            probes,
            multipliers,
        } => {
            let m: Vec<String> = multipliers.iter().map(ToString::to_string).collect();
            format!(
                "top row is a colimit over horizons {probes:?}, steps multiply by [{}]",
                m.join(", ")
            )
        }
        HorizonBehaviour::Unstable { probes } => {
            format!("top row changes across horizons {probes:?}")
        }
    }
}

pub fn cmd_diagram(cfg: &RunConfig) -> Result<Report> {
    let bundle = load(cfg)?;
    let diagram = four_tate_groups(
        &bundle,
        cfg.ring,
        cfg.degree_window,
        &DiagramParams::default(),
    )?;
    let mismatches = diagram.mismatches(&bundle);
    let periodicity_failures = diagram.u_periodicity_failures();
    let expected = bundle
        .diagram_expectations(cfg.ring)
        .filter(|(d, _)| diagram.degrees.contains_key(d))
        .count();
    let checks = vec![
        Check::new(
            "corners match reference values",
            mismatches.is_empty(),
            if mismatches.is_empty() {
                format!("{expected} degrees compared")
            } else {
                format!("degrees {mismatches:?} differ")
            },
        ),
        Check::new(
            "diagram consistent",
            diagram.violations.is_empty(),
            diagram.violations.join("; "),
        ),
        Check::new(
            "u-periodicity",
            periodicity_failures.is_empty(),
            format!("degrees breaking period two: {periodicity_failures:?}"),
        ),
    ];
    let horizon_notes = diagram
        .degrees
        .iter()
        .map(|(d, g)| (*d, horizon_note(&g.top_row)))
        .collect();
    Ok(Report {
        config: cfg.clone(),
        provenance: tags(&bundle, cfg.ring),
        checks,
        body: Body::Diagram {
            diagram,
            mismatches,
            periodicity_failures,
            horizon_notes,
        },
    })
}

pub fn cmd_homology(cfg: &RunConfig, spec: TruncationSpec) -> Result<Report> {
    let bundle = load(cfg)?;
    let w = instantiate_window(&bundle.complex, &spec)?;
    let h = homology(&w, cfg.ring)?;
    let groups: BTreeMap<_, _> = h
        .degrees
        .iter()
        .map(|(d, p)| (*d, p.group.clone()))
        .collect();
    let mut checks = Vec::new();
    let mut provenance = BTreeSet::new();
    for e in bundle.expected.iter().filter(|e| e.ring == cfg.ring) {
        if let Expected::WindowGroup {
            spec: s,
            degree,
            group,
        } = &e.value
        {
            if *s == spec {
                if let Some(found) = groups.get(degree) {
                    provenance.insert(e.tag.clone());
                    checks.push(Check::new(
                        &format!("H_{degree}"),
                        found == group,
                        format!(
                            "expected {}, found {}",
                            group.render(cfg.ring),
                            found.render(cfg.ring)
                        ),
                    ));
                }
            }
        }
    }
    Ok(Report {
        config: cfg.clone(),
        provenance: provenance.into_iter().collect(),
        checks,
        body: Body::Homology { spec, groups },
    })
}

pub fn cmd_localize(cfg: &RunConfig, a: i64, probe_depth: usize) -> Result<Report> {
    if cfg.ring != Ring::Rat {
        return Err(Error::RequiresField);
    }
    let bundle = load(cfg)?;
    let module = localize_module(
        &equivariant_module(&bundle.complex, a, cfg.degree_window)?,
        probe_depth,
    );
    let broken: Vec<i64> = module
        .t_bijective
        .iter()
        .filter(|(_, v)| **v == Some(false))
        .map(|(d, _)| *d)
        .collect();
    let checks = vec![Check::new(
        "action bijective on the eventual image",
        broken.is_empty(),
        format!("failing degrees: {broken:?}"),
    )];
    Ok(Report {
        config: cfg.clone(),
        provenance: Vec::new(),
        checks,
        body: Body::Localize { a, module },
    })
}

pub fn cmd_towers(cfg: &RunConfig) -> Result<Report> {
    let bundle = load(cfg)?;
    let (a_levels, b_values) = (&cfg.grid.a_levels, &cfg.grid.b_values);
    let grid = build_grid(
        &bundle.complex,
        cfg.ring,
        cfg.degree_window,
        a_levels,
        b_values,
    )?;
    let mut degrees = Vec::new();
    for d in cfg.degree_window.0..=cfg.degree_window.1 {
        let direct = (0..a_levels.len())
            .map(|i| grid.direct_tower(i, d).map(|t| direct_limit(&t)))
            .collect::<Result<_>>()?;
        let inverse = (0..b_values.len())
            .map(|j| grid.inverse_tower(j, d).map(|t| inverse_limit(&t)))
            .collect::<Result<_>>()?;
        degrees.push(TowerDegree {
            degree: d,
            direct,
            inverse,
        });
    }
    let square_failures = grid.square_failures()?;
    let checks = vec![
        Check::new("chain squares commute", grid.chain_squares_commute()?, ""),
        Check::new(
            "homology squares commute",
            square_failures.is_empty(),
            format!("{} failures", square_failures.len()),
        ),
    ];
    let b_labels = b_values
        .iter()
        .map(|b| b.as_ref().map_or("inf".into(), ToString::to_string))
        .collect();
    Ok(Report {
        config: cfg.clone(),
        provenance: Vec::new(),
        checks,
        body: Body::Towers {
            a_levels: a_levels.clone(),
            b_labels,
            degrees,
            square_failures,
        },
    })
}

pub fn cmd_backwards(cfg: &RunConfig, a: i64) -> Result<Report> {
    let bundle = load(cfg)?;
    let split = backwards_split(&bundle.complex, cfg.ring, a, cfg.degree_window)?;
    let les_exact = split.les.is_exact();
    let checks = vec![Check::new("long exact sequence", les_exact, "")];
    Ok(Report {
        config: cfg.clone(),
        provenance: Vec::new(),
        checks,
        body: Body::Backwards {
            a,
            summary: split.summary(),
            les_exact,
            rho_iso: split.rho_iso,
        },
    })
}

pub fn cmd_flow_heat(cfg: &RunConfig, x0: f64, span: (f64, f64)) -> Result<Report> {
    let tol = cfg.tolerance.unwrap_or(1e-8);
    let report = heat_flow_check(x0, span, tol)?;
    let convergence = residual_convergence(x0, (-0.05, 0.05), 50, 2);
    let expected_pole = if x0 == 0.0 { 0 } else { x0.signum() as i8 };
    let checks = vec![
        Check::new(
            "closed form",
            report.within_tolerance,
            format!("max relative error {:.3e}", report.max_relative_error),
        ),
        Check::new("sign preserved", report.sign_preserved, ""),
        Check::new("phase constant", report.y_constant, ""),
        Check::new(
            "limit",
            report.pole == expected_pole,
            format!("pole {} expected {expected_pole}", report.pole),
        ),
        Check::new(
            "loop equation residual is second order",
            (convergence.order - 2.0).abs() < 0.1,
            format!("order {:.3}", convergence.order),
        ),
    ];
    Ok(Report {
        config: cfg.clone(),
        provenance: Vec::new(),
        checks,
        body: Body::Heat {
            report,
            convergence,
        },
    })
}

pub fn cmd_flow_rabinowitz(cfg: &RunConfig, from: i64, to: i64) -> Result<Report> {
    if to != from + 1 {
        return Err(Error::BadParams(format!(
            "modes must be consecutive, got {from} and {to}"
        )));
    }
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let orbit = heteroclinic(from)?;
    let start_gap = (orbit.start_action - PI * from as f64).abs();
    let end_gap = (orbit.end_action - PI * to as f64).abs();
    let checks = vec![
        Check::new(
            "start action",
            start_gap <= tol,
            format!("off by {start_gap:.3e}"),
        ),
        Check::new(
            "end action",
            end_gap <= tol,
            format!("off by {end_gap:.3e}"),
        ),
        Check::new(
            "reaches the target circle",
            orbit.closest_distance < 1e-3,
            format!("closest distance {:.3e}", orbit.closest_distance),
        ),
    ];
    Ok(Report {
        config: cfg.clone(),
        provenance: Vec::new(),
        checks,
        body: Body::Rabinowitz {
            from,
            to,
            angle: orbit.angle,
            start_action: orbit.start_action,
            end_action: orbit.end_action,
            closest_distance: orbit.closest_distance,
            samples: orbit.trajectory.len(),
        },
    })
}

const ISO_HORIZON: usize = 10;

pub fn cmd_group_qa(
    cfg: &RunConfig,
    spec: &str,
    depth: usize,
    prime_bound: u64,
    expect: Option<GroupKind>,
) -> Result<Report> {
    let seq: IntSequence = spec.parse()?;
    let terms: Vec<u64> = (1..=12).map_while(|k| seq.term(k)).collect();
    let expansion = prime_expand(&seq, 24);
    let criterion = rationals_criterion(&seq, prime_bound, depth);
    let group = if criterion.cyclic {
        GroupKind::Integers
    } else if criterion.holds() {
        GroupKind::Rationals
    } else {
        GroupKind::Other
    };
    let mut checks = vec![Check::new(
        "prime expansion respects the relations",
        expansion.relabeling_respects_relations(&seq),
        "",
    )];
    let phi = (seq.prefix.is_empty() && seq.rule == SequenceRule::Successor)
        .then(|| phi_report(6, 12, 8));
    if let Some(p) = &phi {
        checks.push(Check::new(
            "phi: Q into the group",
            p.all_pass(),
            format!("{} fractions", p.grid_size),
        ));
    }
    let iso = (group == GroupKind::Rationals).then(|| {
        let a = prime_expand(&seq, 400).sequence();
        let b = prime_expand(&IntSequence::successor(), 400).sequence();
        match iso_h(&a, &b, ISO_HORIZON, depth.max(ISO_HORIZON) * 4) {
            Ok(h) => IsoSummary {
                horizon: ISO_HORIZON,
                relations_respected: h.relations_respected,
                surjective_on_targets: h.surjective_on_targets,
                failure: None,
            },
            Err(e) => IsoSummary {
                horizon: ISO_HORIZON,
                relations_respected: false,
                surjective_on_targets: false,
                failure: Some(e.to_string()),
            },
        }
    });
    if let Some(h) = &iso {
        checks.push(Check::new(
            "h: isomorphism onto the k+1 presentation",
            h.relations_respected && h.surjective_on_targets,
            h.failure.clone().unwrap_or_default(),
        ));
    }
    if let Some(e) = expect {
        checks.push(Check::new(
            "expected group",
            e == group,
            format!("expected {e:?}, found {group:?}"),
        ));
    }
    Ok(Report {
        config: cfg.clone(),
        provenance: Vec::new(),
        checks,
        body: Body::GroupQa {
            sequence: spec.to_string(),
            terms,
            prime_expansion: expansion.primes,
            criterion,
            group,
            phi,
            iso,
        },
    })
}

pub fn cmd_xn_report(cfg: &RunConfig, max_n: u32) -> Result<Report> {
    let rows = (1..=max_n)
        .map(xn_rank_report)
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        config: cfg.clone(),
        provenance: Vec::new(),
        checks: Vec::new(),
        body: Body::XnReport { rows },
    })
}
