//! The JSON sequence format.
//!
//! ```json
//! {"v": 1, "field": "real", "kind": "finite", "vectors": [[1, 0], [0, 1]]}
//! {"v": 1, "field": "complex", "kind": "structured", "base": "onb",
//!  "edits": [{"op": "replace", "index": 2, "vector": [1, [0, 1]]}]}
//! {"v": 1, "field": "real", "kind": "structured",
//!  "rule": {"terms": [{"index": {"a": 2, "b": -1}, "coeff": {"poly": [1, 0, 0]}}]}}
//! ```
//!
//! Complex entries are `[re, im]` pairs; bare numbers are real.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numkernel::{Field, Scalar};
use crate::seqmodel::{
    CoefficientRule, Edit, EditScript, FiniteSequence, RuleTerm, SequenceKind, VectorSequence,
};

/// Current schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// A scalar as written in files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl Number {
    fn from_scalar(z: Scalar) -> Self {
        if z.im == 0.0 {
            Number::Real(z.re)
        } else {
            Number::Complex([z.re, z.im])
        }
    }

    fn to_scalar(self) -> Scalar {
        match self {
            Number::Real(x) => Scalar::new(x, 0.0),
            Number::Complex([re, im]) => Scalar::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum EditSpec {
    Drop {
        index: usize,
    },
    Insert {
        position: usize,
        vector: Vec<Number>,
    },
    Replace {
        index: usize,
        vector: Vec<Number>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSpec {
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSpec {
    pub poly: Vec<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub index: IndexSpec,
    pub coeff: CoeffSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Onb,
}

/// A sequence document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub v: u32,
    pub field: Field,
    pub kind: SequenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Base>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edits: Option<Vec<EditSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleSpec>,
}

fn numbers(values: &[Scalar]) -> Vec<Number> {
    values.iter().copied().map(Number::from_scalar).collect()
}

fn scalars(values: &[Number], field: Field, path: &str) -> Result<Vec<Scalar>> {
    values
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let z = x.to_scalar();
            if field == Field::Real && z.im != 0.0 {
                Err(invalid(format!(
                    "{path}[{i}]: complex entry in a sequence declared real"
                )))
            } else {
                Ok(z)
            }
        })
        .collect()
}

fn at(path: &str) -> impl Fn(crate::error::Error) -> crate::error::Error + '_ {
    move |e| {
        invalid(format!(
            "{path}: {}",
            e.to_string().trim_start_matches("invalid input: ")
        ))
    }
}

impl SequenceSpec {
    pub fn from_sequence(s: &VectorSequence) -> Self {
        let mut spec = SequenceSpec {
            v: SCHEMA_VERSION,
            field: s.field(),
            kind: s.kind(),
            vectors: None,
            base: None,
            edits: None,
            rule: None,
        };
        match s {
            VectorSequence::Finite(f) => {
                spec.vectors = Some(f.vectors().iter().map(|v| numbers(v)).collect());
            }
            VectorSequence::Edited(e) => {
                spec.base = Some(Base::Onb);
                spec.edits = Some(
                    e.script()
                        .edits
                        .iter()
                        .map(|edit| match edit {
                            Edit::Drop { index } => EditSpec::Drop { index: *index },
                            Edit::Insert { position, vector } => EditSpec::Insert {
                                position: *position,
                                vector: numbers(vector),
                            },
                            Edit::Replace { index, vector } => EditSpec::Replace {
                                index: *index,
                                vector: numbers(vector),
                            },
                        })
                        .collect(),
                );
            }
            VectorSequence::Rule(r) => {
                spec.rule = Some(RuleSpec {
                    terms: r
                        .terms()
                        .iter()
                        .map(|t| TermSpec {
                            index: IndexSpec {
                                a: t.index.a,
                                b: t.index.b,
                            },
                            coeff: CoeffSpec {
                                poly: numbers(&t.coeff.0),
                            },
                        })
                        .collect(),
                });
            }
        }
        spec
    }

    /// Validates the document and builds the sequence it describes.
    pub fn to_sequence(&self) -> Result<VectorSequence> {
        if self.v != SCHEMA_VERSION {
            return Err(invalid(format!(
                "v: unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.v
            )));
        }
        let field = self.field;
        match self.kind {
            SequenceKind::Finite => {
                if self.base.is_some() || self.edits.is_some() || self.rule.is_some() {
                    return Err(invalid(
                        "finite sequences take only \"vectors\" (no \"base\", \"edits\" or \"rule\")",
                    ));
                }
                let vectors = self
                    .vectors
                    .as_ref()
                    .ok_or_else(|| invalid("vectors: required for kind \"finite\""))?;
                let converted = vectors
                    .iter()
                    .enumerate()
                    .map(|(i, v)| scalars(v, field, &format!("vectors[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(VectorSequence::Finite(
                    FiniteSequence::new(&converted).map_err(at("vectors"))?,
                ))
            }
            SequenceKind::Structured => {
                if self.vectors.is_some() {
                    return Err(invalid("vectors: not allowed for kind \"structured\""));
                }
                match (&self.edits, &self.rule) {
                    (Some(_), Some(_)) => {
                        Err(invalid("give either \"edits\" or \"rule\", not both"))
                    }
                    (None, Some(rule)) => {
                        if self.base.is_some() {
                            return Err(invalid("base: not used with \"rule\""));
                        }
                        self.rule_sequence(rule)
                    }
                    (edits, None) => {
                        if self.base.is_none() {
                            return Err(invalid("base: required for edit scripts (use \"onb\")"));
                        }
                        self.edited_sequence(edits.as_deref().unwrap_or(&[]))
                    }
                }
            }
        }
    }

    fn edited_sequence(&self, edits: &[EditSpec]) -> Result<VectorSequence> {
        let script = edits
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let path = format!("edits[{i}].vector");
                Ok(match e {
                    EditSpec::Drop { index } => Edit::Drop { index: *index },
                    EditSpec::Insert { position, vector } => Edit::Insert {
                        position: *position,
                        vector: scalars(vector, self.field, &path)?,
                    },
                    EditSpec::Replace { index, vector } => Edit::Replace {
                        index: *index,
                        vector: scalars(vector, self.field, &path)?,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        VectorSequence::make_structured(EditScript::new(script)).map_err(at("edits"))
    }

    fn rule_sequence(&self, rule: &RuleSpec) -> Result<VectorSequence> {
        let terms = rule
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let path = format!("rule.terms[{i}].coeff.poly");
                let poly = scalars(&t.coeff.poly, self.field, &path)?;
                if poly.is_empty() || poly.len() > 3 {
                    return Err(invalid(format!(
                        "{path}: expected 1 to 3 coefficients, got {}",
                        poly.len()
                    )));
                }
                let mut c = [Scalar::new(0.0, 0.0); 3];
                c[..poly.len()].copy_from_slice(&poly);
                Ok(RuleTerm::new(t.index.a, t.index.b, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorSequence::make_rule(
            CoefficientRule::new(terms).map_err(at("rule"))?,
        ))
    }
}

/// Parses a sequence document.
pub fn parse(text: &str) -> Result<VectorSequence> {
    let spec: SequenceSpec =
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed sequence file: {e}")))?;
    spec.to_sequence()
}

/// Pretty-printed sequence document.
pub fn to_json(s: &VectorSequence) -> String {
    serde_json::to_string_pretty(&SequenceSpec::from_sequence(s)).expect("specs always serialize")
}
