//! JSON document format for equivariant complexes.
//!
//! ```json
//! {"generators": [{"id": "x", "degree": 0, "muLevel": 0, "hAction": "1/2", "label": "x"}],
//!  "boundary": {"x": [{"coeff": 1, "uShift": -1, "target": "y"}]}}
//! ```

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::model::{BaseGenerator, BoundaryTerm, EquivariantComplex};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratorRecord {
    pub id: String,
    pub degree: i64,
    pub mu_level: i64,
    pub h_action: String,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub generators: Vec<GeneratorRecord>,
    #[serde(default)]
    pub boundary: BTreeMap<String, Vec<BoundaryTerm>>,
}

pub fn parse_fraction(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(Error::Parse(format!("`{s}` is not a fraction p/q")));
    }
    let r: BigRational = s.parse().map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
    Ok(r)
}

impl ComplexDocument {
    pub fn from_complex(c: &EquivariantComplex) -> Self {
        ComplexDocument {
            generators: c
                .generators()
                .iter()
                .map(|g| GeneratorRecord {
                    id: g.id.clone(),
                    degree: g.degree,
                    mu_level: g.mu_level,
                    h_action: g.h_action.to_string(),
                    label: g.label.clone(),
                })
                .collect(),
            boundary: c.boundary_map().clone(),
        }
    }

    pub fn to_complex(&self) -> Result<EquivariantComplex> {
        let mut c = EquivariantComplex::new();
        for g in &self.generators {
            let label = if g.label.is_empty() {
                g.id.clone()
            } else {
                g.label.clone()
            };
            c.add_generator(
                BaseGenerator::new(
                    g.id.clone(),
                    g.degree,
                    g.mu_level,
                    parse_fraction(&g.h_action)?,
                )
                .labelled(label),
            );
        }
        for (source, terms) in &self.boundary {
            for t in terms {
                c.add_term(source, t.clone());
            }
        }
        Ok(c)
    }
}

pub fn parse_complex(json: &str) -> Result<EquivariantComplex> {
    let doc: ComplexDocument =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_complex()
}

pub fn complex_to_json(c: &EquivariantComplex) -> String {
    serde_json::to_string_pretty(&ComplexDocument::from_complex(c)).expect("document serializes")
}
