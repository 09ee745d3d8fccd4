//! JSON corpus of function models.
//!
//! A corpus file is an array of objects
//! `{"id", "kind", "params", "extent", "order_hint"}`; complex numbers are
//! `[re, im]` pairs and a null extent means the whole plane.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::error::{NevError, Result};
use crate::model::{FunctionModel, ModelKind};
use crate::poly::PolynomialCoeffs;

/// The reference corpus shipped with the crate.
pub const REFERENCE_JSON: &str = include_str!("../data/reference.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: ModelKind,
    pub params: serde_json::Value,
    #[serde(default)]
    pub extent: Option<f64>,
    #[serde(default)]
    pub order_hint: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalParams {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpParams {
    exponent: Vec<[f64; 2]>,
    #[serde(default)]
    scale: Option<[f64; 2]>,
    #[serde(default)]
    offset: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductParams {
    /// `[re, im]` or `[re, im, multiplicity]`.
    zeros: Vec<Vec<f64>>,
    #[serde(default)]
    reciprocal: bool,
}

fn point(p: [f64; 2]) -> ComplexPoint {
    ComplexPoint::new(p[0], p[1])
}

fn poly(coeffs: &[[f64; 2]]) -> Result<PolynomialCoeffs> {
    PolynomialCoeffs::new(coeffs.iter().map(|&p| point(p)).collect())
}

fn params<T: serde::de::DeserializeOwned>(entry: &CorpusEntry) -> Result<T> {
    serde_json::from_value(entry.params.clone())
        .map_err(|e| NevError::Corpus(format!("bad params for '{}': {e}", entry.id)))
}

impl CorpusEntry {
    pub fn build(&self) -> Result<FunctionModel> {
        let extent = self.extent.unwrap_or(f64::INFINITY);
        if let Some(s) = self.order_hint {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(NevError::Corpus(format!("order_hint of '{}' must be a nonnegative real", self.id)));
            }
        }
        let model = match self.kind {
            ModelKind::Rational => {
                let p: RationalParams = params(self)?;
                FunctionModel::build_rational(&poly(&p.num)?, &poly(&p.den)?, extent)?
            }
            ModelKind::ExpPolynomial => {
                let p: ExpParams = params(self)?;
                let zero_extent = self.extent.unwrap_or(crate::model::DEFAULT_EXTENT);
                FunctionModel::build_exp_affine(
                    p.scale.map_or(ComplexPoint::new(1.0, 0.0), point),
                    &poly(&p.exponent)?,
                    p.offset.map_or(ComplexPoint::new(0.0, 0.0), point),
                    zero_extent,
                )?
            }
            ModelKind::CanonicalProduct => {
                let p: ProductParams = params(self)?;
                let mut zeros = Vec::with_capacity(p.zeros.len());
                for z in &p.zeros {
                    let mult = match z.len() {
                        2 => 1,
                        3 if z[2] >= 1.0 && z[2].fract() == 0.0 && z[2] <= u32::MAX as f64 => z[2] as u32,
                        _ => {
                            return Err(NevError::Corpus(format!(
                                "zero entries of '{}' must be [re, im] or [re, im, multiplicity]",
                                self.id
                            )))
                        }
                    };
                    zeros.push((ComplexPoint::new(z[0], z[1]), mult));
                }
                let product = FunctionModel::build_canonical_product(&zeros, extent, self.order_hint)?;
                if p.reciprocal {
                    product.reciprocal()?
                } else {
                    product
                }
            }
            other => {
                return Err(NevError::Corpus(format!(
                    "kind {other:?} of '{}' cannot be loaded from a corpus file",
                    self.id
                )))
            }
        };
        Ok(match self.order_hint {
            Some(s) => model.with_order_hint(Some(s)),
            None => model,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CorpusMember {
    pub entry: CorpusEntry,
    pub model: FunctionModel,
}

impl CorpusMember {
    pub fn id(&self) -> &str {
        &self.entry.id
    }
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    members: Vec<CorpusMember>,
}

impl Corpus {
    pub fn reference() -> Corpus {
        Corpus::from_json_str(REFERENCE_JSON).expect("reference corpus is valid")
    }

    pub fn from_entries(entries: Vec<CorpusEntry>) -> Result<Corpus> {
        let mut seen = BTreeSet::new();
        let mut members = Vec::with_capacity(entries.len());
        for entry in entries {
            if !seen.insert(entry.id.clone()) {
                return Err(NevError::Corpus(format!("duplicate corpus id '{}'", entry.id)));
            }
            let model = entry.build()?;
            members.push(CorpusMember { entry, model });
        }
        Ok(Corpus { members })
    }

    /// Parses an array of entries, or a single entry object.
    pub fn from_json_str(text: &str) -> Result<Corpus> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| NevError::Corpus(format!("corpus is not valid JSON: {e}")))?;
        let entries: Vec<CorpusEntry> = if value.is_array() {
            serde_json::from_value(value)
        } else {
            serde_json::from_value(value).map(|e| vec![e])
        }
        .map_err(|e| NevError::Corpus(format!("bad corpus entry: {e}")))?;
        Corpus::from_entries(entries)
    }

    pub fn from_path(path: &Path) -> Result<Corpus> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NevError::Corpus(format!("cannot read corpus {}: {e}", path.display())))?;
        Corpus::from_json_str(&text)
    }

    pub fn members(&self) -> &[CorpusMember] {
        &self.members
    }

    pub fn get(&self, id: &str) -> Option<&CorpusMember> {
        self.members.iter().find(|m| m.id() == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.id()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}
