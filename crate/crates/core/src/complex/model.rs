//! Base generators and the u-equivariant boundary.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::LaurentPoly;
use crate::error::{Error, Result};

/// A generator modulo the u-action. `u^k g` has degree `degree + 2k` and level `mu_level + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGenerator {
    pub id: String,
    pub degree: i64,
    pub mu_level: i64,
    pub h_action: BigRational,
    pub label: String,
}

impl BaseGenerator {
    pub fn new(id: impl Into<String>, degree: i64, mu_level: i64, h_action: BigRational) -> Self {
        let id = id.into();
        BaseGenerator {
            label: id.clone(),
            id,
            degree,
            mu_level,
            h_action,
        }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// `coeff * u^u_shift * target`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryTerm {
    pub coeff: i64,
    pub u_shift: i64,
    pub target: String,
}

impl BoundaryTerm {
    pub fn new(coeff: i64, u_shift: i64, target: impl Into<String>) -> Self {
        BoundaryTerm {
            coeff,
            u_shift,
            target: target.into(),
        }
    }
}

#[derive(Debug, Default)]
pub struct EquivariantComplex {
    generators: Vec<BaseGenerator>,
    boundary: BTreeMap<String, Vec<BoundaryTerm>>,
    index: HashMap<String, usize>,
    report: OnceLock<ValidationReport>,
}

impl Clone for EquivariantComplex {
    fn clone(&self) -> Self {
        EquivariantComplex {
            generators: self.generators.clone(),
            boundary: self.boundary.clone(),
            index: self.index.clone(),
            report: OnceLock::new(),
        }
    }
}

impl PartialEq for EquivariantComplex {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.boundary == other.boundary
    }
}

impl EquivariantComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_generator(&mut self, g: BaseGenerator) -> &mut Self {
        self.index
            .entry(g.id.clone())
            .or_insert(self.generators.len());
        self.generators.push(g);
        self.report = OnceLock::new();
        self
    }

    pub fn add_term(&mut self, source: &str, term: BoundaryTerm) -> &mut Self {
        self.boundary
            .entry(source.to_string())
            .or_default()
            .push(term);
        self.report = OnceLock::new();
        self
    }

    /// Adds `(coeff, u_shift, target)` terms to the boundary of `source`.
    pub fn set_boundary(&mut self, source: &str, terms: &[(i64, i64, &str)]) -> &mut Self {
        for &(c, k, t) in terms {
            self.add_term(source, BoundaryTerm::new(c, k, t));
        }
        self
    }

    pub fn generators(&self) -> &[BaseGenerator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &BaseGenerator {
        &self.generators[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn boundary_of(&self, id: &str) -> &[BoundaryTerm] {
        self.boundary.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn boundary_map(&self) -> &BTreeMap<String, Vec<BoundaryTerm>> {
        &self.boundary
    }

    /// Boundary of a base generator as Laurent coefficients per target.
    pub fn boundary_polys(&self, id: &str) -> BTreeMap<String, LaurentPoly> {
        let mut out: BTreeMap<String, LaurentPoly> = BTreeMap::new();
        for t in self.boundary_of(id) {
            out.entry(t.target.clone())
                .or_default()
                .add_term(BigInt::from(t.coeff), t.u_shift);
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn validate(&self) -> &ValidationReport {
        self.report.get_or_init(|| validate(self))
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidComplex(report.to_string()))
        }
    }

    /// Largest A_H value among the generators, if any.
    pub fn max_action(&self) -> Option<&BigRational> {
        self.generators.iter().map(|g| &g.h_action).max()
    }

    /// Sorted distinct A_H values.
    pub fn action_values(&self) -> Vec<BigRational> {
        let mut v: Vec<BigRational> = self.generators.iter().map(|g| g.h_action.clone()).collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Violation {
    DuplicateId {
        id: String,
    },
    UnknownSource {
        source: String,
    },
    UnknownTarget {
        source: String,
        target: String,
    },
    ZeroCoefficient {
        source: String,
        target: String,
    },
    DegreeMismatch {
        source: String,
        target: String,
        u_shift: i64,
        expected: i64,
        found: i64,
    },
    MuLevelIncrease {
        source: String,
        target: String,
        u_shift: i64,
    },
    ActionIncrease {
        source: String,
        target: String,
    },
    SquareNonzero {
        source: String,
        target: String,
        u_power: i64,
        coeff: String,
    },
    PositiveShiftSingleLevel {
        source: String,
        target: String,
        u_shift: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { id } => write!(f, "duplicate generator id `{id}`"),
            Violation::UnknownSource { source } => write!(f, "boundary given for unknown generator `{source}`"),
            Violation::UnknownTarget { source, target } => write!(f, "`{source}` has a term on unknown `{target}`"),
            Violation::ZeroCoefficient { source, target } => write!(f, "zero coefficient in `{source}` -> `{target}`"),
            Violation::DegreeMismatch { source, target, u_shift, expected, found } => write!(
                f,
                "degree mismatch in `{source}` -> u^{u_shift} `{target}`: expected {expected}, found {found}"
            ),
            Violation::MuLevelIncrease { source, target, u_shift } => {
                write!(f, "A^mu increases along `{source}` -> u^{u_shift} `{target}`")
            }
            Violation::ActionIncrease { source, target } => write!(f, "A_H increases along `{source}` -> `{target}`"),
            Violation::SquareNonzero { source, target, u_power, coeff } => write!(
                f,
                "boundary squared is nonzero: `{source}` -> {coeff} u^{u_power} `{target}`"
            ),
            Violation::PositiveShiftSingleLevel { source, target, u_shift } => write!(
                f,
                "positive u-shift {u_shift} in `{source}` -> `{target}` although all generators share one level"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&lines.join("; "))
    }
}

/// Lists every violated structural invariant.
pub fn validate(c: &EquivariantComplex) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = HashMap::new();
    for g in &c.generators {
        if seen.insert(g.id.as_str(), ()).is_some() {
            violations.push(Violation::DuplicateId { id: g.id.clone() });
        }
    }
    let single_level = c
        .generators
        .windows(2)
        .all(|w| w[0].mu_level == w[1].mu_level);
    for (source, terms) in &c.boundary {
        let Some(si) = c.index_of(source) else {
            violations.push(Violation::UnknownSource {
                source: source.clone(),
            });
            continue;
        };
        let s = &c.generators[si];
        for t in terms {
            let Some(ti) = c.index_of(&t.target) else {
                violations.push(Violation::UnknownTarget {
                    source: source.clone(),
                    target: t.target.clone(),
                });
                continue;
            };
            let g = &c.generators[ti];
            if t.coeff == 0 {
                violations.push(Violation::ZeroCoefficient {
                    source: source.clone(),
                    target: t.target.clone(),
                });
            }
            let found = g.degree + 2 * t.u_shift;
            if found != s.degree - 1 {
                violations.push(Violation::DegreeMismatch {
                    source: source.clone(),
                    target: t.target.clone(),
                    u_shift: t.u_shift,
                    expected: s.degree - 1,
                    found,
                });
            }
            if g.mu_level + t.u_shift > s.mu_level {
                violations.push(Violation::MuLevelIncrease {
                    source: source.clone(),
                    target: t.target.clone(),
                    u_shift: t.u_shift,
                });
            }
            if g.h_action > s.h_action {
                violations.push(Violation::ActionIncrease {
                    source: source.clone(),
                    target: t.target.clone(),
                });
            }
            if single_level && t.u_shift > 0 {
                violations.push(Violation::PositiveShiftSingleLevel {
                    source: source.clone(),
                    target: t.target.clone(),
                    u_shift: t.u_shift,
                });
            }
        }
    }
    violations.extend(square_violations(c));
    ValidationReport { violations }
}

fn square_violations(c: &EquivariantComplex) -> Vec<Violation> {
    let mut out = Vec::new();
    for g in &c.generators {
        let mut total: BTreeMap<String, LaurentPoly> = BTreeMap::new();
        for (mid, p) in c.boundary_polys(&g.id) {
            if c.index_of(&mid).is_none() {
                continue;
            }
            for (target, q) in c.boundary_polys(&mid) {
                let prod = &p * &q;
                let slot = total.entry(target).or_default();
                *slot = &*slot + &prod;
            }
        }
        for (target, p) in total {
            for (k, coeff) in p.terms() {
                out.push(Violation::SquareNonzero {
                    source: g.id.clone(),
                    target: target.clone(),
                    u_power: k,
                    coeff: coeff.to_string(),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn three_generator(broken: bool) -> EquivariantComplex {
        // a (deg 2) -> b (deg 1) -> c (deg 0), with a second path a -> b' -> c
        let mut c = EquivariantComplex::new();
        for (id, d) in [("a", 2), ("b", 1), ("bb", 1), ("c", 0)] {
            c.add_generator(BaseGenerator::new(id, d, 0, rat(0)));
        }
        c.set_boundary("a", &[(1, 0, "b"), (if broken { 2 } else { 1 }, 0, "bb")]);
        c.set_boundary("b", &[(1, 0, "c")]);
        c.set_boundary("bb", &[(-1, 0, "c")]);
        c
    }

    #[test]
    fn square_zero_detected() {
        assert!(three_generator(false).validate().is_valid());
        let bad = three_generator(true);
        let report = bad.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            &report.violations[0],
            Violation::SquareNonzero { source, target, u_power: 0, .. } if source == "a" && target == "c"
        ));
    }

    #[test]
    fn degree_violation_reported_once() {
        let mut c = EquivariantComplex::new();
        c.add_generator(BaseGenerator::new("x", 3, 0, rat(0)));
        c.add_generator(BaseGenerator::new("y", 0, 0, rat(0)));
        c.set_boundary("x", &[(1, 0, "y")]);
        let r = c.validate();
        assert_eq!(r.violations.len(), 1);
        assert!(matches!(
            r.violations[0],
            Violation::DegreeMismatch {
                expected: 2,
                found: 0,
                ..
            }
        ));
    }

    #[test]
    fn monotonicity_and_single_level_shift() {
        let mut c = EquivariantComplex::new();
        c.add_generator(BaseGenerator::new("x", 1, 0, rat(1)));
        c.add_generator(BaseGenerator::new("y", -2, 0, rat(2)));
        c.set_boundary("x", &[(1, 1, "y")]);
        let kinds: Vec<_> = c
            .validate()
            .violations
            .iter()
            .map(std::mem::discriminant)
            .collect();
        assert_eq!(kinds.len(), 3);
    }
}
