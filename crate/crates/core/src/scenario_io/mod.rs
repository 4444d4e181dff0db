//! Scenario files, CSV tables, run manifests and the command line.
//!
//! A scenario is one JSON document holding the attack graph, the business
//! lines and a default policy. Its canonical form (sorted keys, compact,
//! shortest round-trip numbers) is hashed into the digest recorded in every
//! run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::attack_graph::{AttackGraph, GraphError, ValidationReport};
use crate::loss_models::{BusinessLine, LineError, ModelError, RiskModel};
use crate::pricing::Policy;

pub mod cli;
pub mod manifest;
pub mod tables;

pub use cli::cli_dispatch;
pub use manifest::RunManifest;
pub use tables::{export_csv, CsvTable};

/// Schema versions this build reads.
pub const SCHEMA_VERSION: u32 = 1;

/// The bundled seven-node smart-home scenario, verbatim.
pub const CASE_STUDY_JSON: &str = include_str!("../../scenarios/case_study.json");

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported schema version {found} (this build reads {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("invalid graph: {0}")]
    Graph(ValidationReport),
    #[error(transparent)]
    Line(#[from] LineError),
    #[error("{0}")]
    Other(String),
}

impl From<ModelError> for ScenarioError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Graph(GraphError::Invalid(report)) => ScenarioError::Graph(report),
            ModelError::Graph(other) => ScenarioError::Other(other.to_string()),
            ModelError::Line(l) => ScenarioError::Line(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub description: String,
    pub graph: AttackGraph,
    pub lines: Vec<BusinessLine>,
    pub policy: Policy,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u32>,
}

fn parse_error(e: serde_json::Error) -> ScenarioError {
    ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let probe: VersionProbe = serde_json::from_str(text).map_err(parse_error)?;
        match probe.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(found) => return Err(ScenarioError::SchemaVersion { found }),
            None => {
                return Err(ScenarioError::Parse {
                    line: 1,
                    column: 1,
                    message: "missing field `schema_version`".into(),
                })
            }
        }
        let scenario: Scenario = serde_json::from_str(text).map_err(parse_error)?;
        scenario.model()?;
        Ok(scenario)
    }

    pub fn case_study() -> Self {
        Self::parse(CASE_STUDY_JSON).expect("bundled scenario is valid")
    }

    /// Compiled graph and lines ready for simulation.
    pub fn model(&self) -> Result<RiskModel, ScenarioError> {
        Ok(RiskModel::new(&self.graph, self.lines.clone())?)
    }

    /// Sorted-key compact JSON. Semantically identical files share it.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("scenario serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::parse(&text)
}
