//! The JSON bundle document.
//!
//! ```json
//! {
//!   "base": [ { "id": "x", "moduli": [4], "weight": 1.0 } ],
//!   "functions": { "f": { "x": [[1, 0], [0, 0], [0, 0], [0, 0]] } },
//!   "subsets": { "U": { "x": [[0], [1]] } },
//!   "scenario": {
//!     "tail_index": 1,
//!     "limit": { "point": "x", "element": [1], "character": [0] },
//!     "terms": [ { "point": "x", "element": [1], "character": [0], "trivialization": [0, 1, 2, 3] } ],
//!     "windows": { "w": [[1]], "v": [[0]] }
//!   }
//! }
//! ```
//!
//! Function tables list `[re, im]` pairs in enumeration order of the fibre; base
//! points a function omits are zero there. Elements, characters and subset
//! members are residue arrays. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bundle::{BundleFunction, FibreSubset, GroupBundle};
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::harness::{SequenceScenario, Term, Windows};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasePointSpec {
    pub id: String,
    pub moduli: Vec<i64>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub w: Vec<Vec<u64>>,
    pub v: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub tail_index: usize,
    pub limit: TermSpec,
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<WindowSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub point: String,
    pub element: Vec<u64>,
    pub character: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivialization: Option<Vec<usize>>,
}

pub type FunctionTable = BTreeMap<String, Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDocument {
    pub base: Vec<BasePointSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, FunctionTable>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subsets: BTreeMap<String, BTreeMap<String, Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
}

fn invalid(field: impl Into<String>, err: impl ToString) -> Error {
    Error::Validation { field: field.into(), message: err.to_string() }
}

/// Reads and validates a document.
pub fn parse_document(path: impl AsRef<Path>) -> Result<BundleDocument> {
    let text = std::fs::read_to_string(path)?;
    BundleDocument::parse_str(&text)
}

impl BundleDocument {
    pub fn parse_str(text: &str) -> Result<Self> {
        let doc: BundleDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serialises");
        s.push('\n');
        s
    }

    /// A document holding just the base of `b`.
    pub fn from_bundle(b: &GroupBundle) -> Self {
        let base = b
            .fibres()
            .map(|(id, f)| BasePointSpec {
                id: id.to_string(),
                moduli: f.group.moduli().iter().map(|&n| n as i64).collect(),
                weight: f.weight,
            })
            .collect();
        BundleDocument { base, functions: BTreeMap::new(), subsets: BTreeMap::new(), scenario: None }
    }

    pub fn function_table(b: &GroupBundle, f: &BundleFunction) -> FunctionTable {
        b.fibres()
            .zip(f.values())
            .map(|((id, _), v)| (id.to_string(), v.iter().map(|z| [z.re, z.im]).collect()))
            .collect()
    }

    /// Checks everything that can be checked without building the scenario twice.
    pub fn validate(&self) -> Result<()> {
        let bundle = self.bundle()?;
        for name in self.functions.keys() {
            self.function_on(&bundle, name)?;
        }
        for name in self.subsets.keys() {
            self.subset_on(&bundle, name)?;
        }
        if self.scenario.is_some() {
            self.scenario_on(&bundle)?;
            self.windows_on(&bundle)?;
        }
        Ok(())
    }

    pub fn bundle(&self) -> Result<GroupBundle> {
        let mut points = Vec::with_capacity(self.base.len());
        for (i, p) in self.base.iter().enumerate() {
            if self.base[..i].iter().any(|q| q.id == p.id) {
                return Err(invalid(format!("base[{i}].id"), format!("duplicate base point `{}`", p.id)));
            }
            let group = FiniteAbelianGroup::new(&p.moduli).map_err(|e| invalid(format!("base[{i}].moduli"), e))?;
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(invalid(format!("base[{i}].weight"), format!("weight must be positive, got {}", p.weight)));
            }
            points.push((p.id.clone(), group, p.weight));
        }
        GroupBundle::from_points(points).map_err(|e| invalid("base", e))
    }

    pub fn function(&self, name: &str) -> Result<BundleFunction> {
        self.function_on(&self.bundle()?, name)
    }

    pub fn function_on(&self, b: &GroupBundle, name: &str) -> Result<BundleFunction> {
        let table = self.functions.get(name).ok_or_else(|| Error::UnknownFunction(name.to_string()))?;
        for x in table.keys() {
            b.base_index(x).map_err(|e| invalid(format!("functions.{name}.{x}"), e))?;
        }
        let mut values = Vec::with_capacity(b.len());
        for (id, fibre) in b.fibres() {
            let v = match table.get(id) {
                Some(v) => {
                    if v.len() != fibre.group.order() {
                        return Err(invalid(
                            format!("functions.{name}.{id}"),
                            format!("expected {} values, found {}", fibre.group.order(), v.len()),
                        ));
                    }
                    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
                }
                None => vec![Complex64::new(0.0, 0.0); fibre.group.order()],
            };
            values.push(v);
        }
        BundleFunction::from_values(b, values)
    }

    pub fn function_names(&self) -> impl Iterator<Item = &str> {
        self.functions.keys().map(String::as_str)
    }

    pub fn subset(&self, name: &str) -> Result<FibreSubset> {
        self.subset_on(&self.bundle()?, name)
    }

    pub fn subset_on(&self, b: &GroupBundle, name: &str) -> Result<FibreSubset> {
        let spec = self
            .subsets
            .get(name)
            .ok_or_else(|| invalid(format!("subsets.{name}"), "no such subset"))?;
        let mut set = FibreSubset::empty(b);
        for (x, members) in spec {
            let field = format!("subsets.{name}.{x}");
            let bi = b.base_index(x).map_err(|e| invalid(&field, e))?;
            let group = &b.fibre_at(bi).1.group;
            for m in members {
                let ei = group.index_of(m).map_err(|e| invalid(&field, e))?;
                set.insert_index(bi, ei);
            }
        }
        Ok(set)
    }

    pub fn scenario(&self) -> Result<Option<SequenceScenario>> {
        self.scenario_on(&self.bundle()?)
    }

    fn scenario_on(&self, b: &GroupBundle) -> Result<Option<SequenceScenario>> {
        let Some(spec) = &self.scenario else {
            return Ok(None);
        };
        let term = |t: &TermSpec| Term {
            point: t.point.clone(),
            element: GroupElement { residues: t.element.clone() },
            character: t.character.clone().into(),
            trivialization: t.trivialization.clone(),
        };
        let sc = SequenceScenario::new(b.clone(), spec.tail_index, term(&spec.limit), spec.terms.iter().map(term).collect())
            .map_err(|e| invalid("scenario", e))?;
        Ok(Some(sc))
    }

    pub fn windows(&self) -> Result<Option<Windows>> {
        self.windows_on(&self.bundle()?)
    }

    fn windows_on(&self, b: &GroupBundle) -> Result<Option<Windows>> {
        let Some(spec) = self.scenario.as_ref().and_then(|s| s.windows.as_ref()) else {
            return Ok(None);
        };
        let limit = &self.scenario.as_ref().expect("checked").limit.point;
        let group = b.group(limit).map_err(|e| invalid("scenario.limit.point", e))?;
        let elems = |field: &str, list: &[Vec<u64>]| -> Result<Vec<GroupElement>> {
            list.iter().map(|r| group.element(r).map_err(|e| invalid(field, e))).collect()
        };
        Ok(Some(Windows { w: elems("scenario.windows.w", &spec.w)?, v: elems("scenario.windows.v", &spec.v)? }))
    }
}

impl From<Vec<u64>> for crate::group::Character {
    fn from(residues: Vec<u64>) -> Self {
        crate::group::Character { residues }
    }
}
