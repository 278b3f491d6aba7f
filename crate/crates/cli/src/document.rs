//! JSON documents read and written by the command-line tool.
//!
//! Rationals travel as strings (`"3/8"`, `"-1"`). Every map serializes with
//! sorted keys, and a [`ResultDocument`] re-validates its witnesses when it
//! is parsed.

use std::collections::BTreeMap;

use couplings::coupling::Connection;
use couplings::distributions::DistributionError;
use couplings::rational::{format_rational, parse_rational, ParseRationalError, Rational};
use couplings::{Context, Coupling, PairDistribution, Pattern, Scenario};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("`pairs` has no entry for context {0}")]
    MissingContext(&'static str),
    #[error("`pairs` has unknown context `{0}` (expected 11, 12, 21, 22)")]
    UnknownContext(String),
    #[error("context {context}, cell {cell}: {source}")]
    Cell {
        context: String,
        cell: &'static str,
        source: ParseRationalError,
    },
    #[error("context {context}: {source}")]
    Pair {
        context: String,
        source: DistributionError,
    },
    #[error("unsupported schema_version `{0}` (expected \"1\")")]
    Schema(String),
    #[error("witness `{name}`: {reason}")]
    Witness { name: String, reason: String },
}

/// Cells of one context, `+`/`-` for Alice then Bob.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairCells {
    pub pp: String,
    pub pm: String,
    pub mp: String,
    pub mm: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub pairs: BTreeMap<String, PairCells>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

impl ScenarioDocument {
    pub fn from_scenario(s: &Scenario, metadata: Option<Value>) -> Self {
        let pairs = Context::ALL
            .into_iter()
            .map(|ctx| {
                let [pp, pm, mp, mm] = s.pair(ctx).cells().map(format_rational);
                (ctx.label().to_string(), PairCells { pp, pm, mp, mm })
            })
            .collect();
        ScenarioDocument { pairs, metadata }
    }

    /// Parses and validates, returning the canonical form (lowest terms,
    /// positive denominators).
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: ScenarioDocument = serde_json::from_str(text)?;
        doc.canonical()
    }

    pub fn canonical(&self) -> Result<Self, DocumentError> {
        Ok(ScenarioDocument::from_scenario(
            &self.to_scenario()?,
            self.metadata.clone(),
        ))
    }

    pub fn to_scenario(&self) -> Result<Scenario, DocumentError> {
        if let Some(label) = self.pairs.keys().find(|k| Context::from_label(k).is_none()) {
            return Err(DocumentError::UnknownContext(label.clone()));
        }
        let mut pairs = Vec::with_capacity(4);
        for ctx in Context::ALL {
            let cells = self
                .pairs
                .get(ctx.label())
                .ok_or(DocumentError::MissingContext(ctx.label()))?;
            let parse = |cell: &'static str, text: &str| {
                parse_rational(text).map_err(|source| DocumentError::Cell {
                    context: ctx.label().to_string(),
                    cell,
                    source,
                })
            };
            let pair = PairDistribution::new(
                parse("pp", &cells.pp)?,
                parse("pm", &cells.pm)?,
                parse("mp", &cells.mp)?,
                parse("mm", &cells.mm)?,
            )
            .map_err(|source| DocumentError::Pair {
                context: ctx.label().to_string(),
                source,
            })?;
            pairs.push(pair);
        }
        let pairs: [PairDistribution; 4] = pairs.try_into().expect("four contexts");
        Ok(Scenario::new(pairs))
    }

    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }
}

/// A coupling of the eight variables, with the scenario it must reproduce
/// and optionally the connection targets it must meet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDocument {
    /// Nonzero masses keyed by pattern, `A11 A12 A21 A22 B11 B12 B21 B22`.
    pub masses: BTreeMap<String, String>,
    pub scenario: ScenarioDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connections: Option<BTreeMap<String, String>>,
}

impl WitnessDocument {
    pub fn new(w: &Coupling, s: &Scenario, targets: Option<&[Rational; 4]>) -> Self {
        WitnessDocument {
            masses: w
                .support()
                .map(|(p, m)| (p.to_string(), format_rational(m)))
                .collect(),
            scenario: ScenarioDocument::from_scenario(s, None),
            connections: targets.map(|t| {
                Connection::ALL
                    .into_iter()
                    .map(|c| (c.name().to_string(), format_rational(&t[c as usize])))
                    .collect()
            }),
        }
    }

    /// Rebuilds the coupling and checks it against its scenario and targets.
    pub fn validate(&self) -> Result<Coupling, String> {
        let mut cells = Vec::with_capacity(self.masses.len());
        for (pattern, mass) in &self.masses {
            let p: Pattern = pattern.parse().map_err(|e| format!("{e}"))?;
            let m = parse_rational(mass).map_err(|e| format!("pattern {pattern}: {e}"))?;
            cells.push((p, m));
        }
        let w = Coupling::from_sparse(cells).map_err(|e| e.to_string())?;
        let s = self.scenario.to_scenario().map_err(|e| e.to_string())?;
        if !w.reproduces(&s) {
            return Err("does not reproduce its scenario".into());
        }
        if let Some(targets) = &self.connections {
            for (name, target) in targets {
                let which = Connection::from_name(name)
                    .ok_or_else(|| format!("unknown connection `{name}`"))?;
                let t = parse_rational(target).map_err(|e| format!("connection {name}: {e}"))?;
                if w.connection_expectation(which) != t {
                    return Err(format!("connection {name} is not {target}"));
                }
            }
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandEcho {
    pub name: String,
    pub args: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<ScenarioDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub schema_version: String,
    pub command: CommandEcho,
    pub verdicts: BTreeMap<String, bool>,
    pub reports: BTreeMap<String, Value>,
    pub witnesses: BTreeMap<String, WitnessDocument>,
}

impl ResultDocument {
    pub fn new(name: &str) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            command: CommandEcho {
                name: name.to_string(),
                args: BTreeMap::new(),
                input: None,
            },
            verdicts: BTreeMap::new(),
            reports: BTreeMap::new(),
            witnesses: BTreeMap::new(),
        }
    }

    pub fn arg(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.command.args.insert(key.to_string(), value.into());
        self
    }

    pub fn verdict(&mut self, key: &str, value: bool) -> &mut Self {
        self.verdicts.insert(key.to_string(), value);
        self
    }

    pub fn report(&mut self, key: &str, value: Value) -> &mut Self {
        self.reports.insert(key.to_string(), value);
        self
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: ResultDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::Schema(doc.schema_version));
        }
        if let Some(input) = &doc.command.input {
            input.to_scenario()?;
        }
        for (name, w) in &doc.witnesses {
            w.validate().map_err(|reason| DocumentError::Witness {
                name: name.clone(),
                reason,
            })?;
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }
}

/// Pretty JSON with every object's keys in sorted order.
fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("documents serialize");
    serde_json::to_string_pretty(&v).expect("values serialize")
}

pub fn rational_value(r: &Rational) -> Value {
    Value::String(format_rational(r))
}
